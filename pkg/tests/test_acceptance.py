"""End-to-end acceptance checks.

Each test covers one acceptance criterion and emits a single
"[criterion N] PASS/FAIL" line on the real stdout (bypassing capture), in
addition to the usual pytest verdict.
"""
import itertools
import random
import time
from fractions import Fraction

import pytest

from bowcalc.bowcore import BraneDiagram, enumerate_fixed_points, mirror
from bowcalc.expr import (HBAR, Monomial, a_var, evaluate, evaluate_h,
                          random_point, z_var)
from bowcalc.shuffle import star, wheel_check
from bowcalc.stab import (euler_class_at, restrict_class, w_function, wtilde)
from bowcalc.verify import (_with_resample, check_axioms, fay_normal_form,
                            limit_suite, mirror_identity, sweep)
from bowcalc.fixtures import (NAMED_MATRICES, POSET_EXAMPLE_C,
                              POSET_EXAMPLE_R, named_ids)

from _helpers import (T, closed_form_tsp_e, rational_values, tsp1_points,
                      tsp_diagram, tsp_fixed_point, tsp_point)
from test_bowcore import brute_force_bcts

POSET_RC = (POSET_EXAMPLE_R, POSET_EXAMPLE_C)

# Hasse diagram of the chamber-induced order on the 12 fixed points of
# X((1,1,2,1),(2,2,1)), in enumeration ids (enumeration id = 13 - hand label)
EXPECTED_HASSE = {
    (3, 1), (3, 2), (4, 3), (5, 3), (6, 2), (7, 3), (7, 6), (8, 4),
    (8, 7), (9, 8), (10, 5), (10, 9), (11, 5), (11, 7), (12, 10), (12, 11),
}

# trisecant parametrization of the printed 3x4 identity for the pair
# (f12, f9) (enumeration ids 1, 4)
FAY_X = (Monomial({a_var(1): 1, a_var(2): -1}),
         Monomial({a_var(2): 1, a_var(3): -1}),
         Monomial({a_var(3): 1, a_var(1): -1}))
FAY_Y = (Monomial({z_var(2): 1, z_var(3): -1, HBAR: 1}),
         Monomial({z_var(3): 1, z_var(2): -1}),
         Monomial({HBAR: -1}))

Q_LIST = (0.05, 0.1 + 0.1j, 0.3)


def _report(capsys, n, ok, detail):
    with capsys.disabled():
        print('[criterion %d] %s: %s' % (n, 'PASS' if ok else 'FAIL', detail))
    assert ok, detail


def test_criterion_01_fixed_point_enumeration(capsys):
    t0 = time.monotonic()
    ok = True
    checked = 0
    for m, n in [(2, 2), (2, 3), (3, 3), (2, 5), (4, 5)]:
        assert m * n <= 20
        for r in itertools.product(range(3), repeat=m):
            for c in itertools.product(range(2), repeat=n):
                if sum(r) != sum(c) or sum(r) == 0:
                    continue
                got = [f.matrix for f in
                       enumerate_fixed_points(BraneDiagram(r, c), None)]
                ok = ok and sorted(got) == sorted(brute_force_bcts(r, c))
                ok = ok and len(set(got)) == len(got)
                checked += 1
    fps = enumerate_fixed_points(BraneDiagram(*POSET_RC), None)
    ok = ok and len(fps) == 12
    elapsed = time.monotonic() - t0
    ok = ok and elapsed < 1.0
    _report(capsys, 1, ok,
            '%d margin pairs vs brute force, 12 points on the poset '
            'example, %.2fs' % (checked, elapsed))


def test_criterion_02_tsp1_h_and_unit_restrictions(capsys):
    t0 = time.monotonic()
    pts = tsp1_points()
    rng = random.Random(21)
    ok = True
    for _ in range(3):
        vals = rational_values(rng, [T, HBAR, a_var(1), a_var(2)])
        t, h = vals[T], vals[HBAR]
        a1, a2 = vals[a_var(1)], vals[a_var(2)]
        ok = ok and evaluate_h(w_function(pts[1], (1, 2), 'H').cls,
                               vals) == t - a2 + h
        ok = ok and evaluate_h(w_function(pts[2], (1, 2), 'H').cls,
                               vals) == a1 - t
        ok = ok and evaluate_h(w_function(pts[1], (2, 1), 'H').cls,
                               vals) == a2 - t
        ok = ok and evaluate_h(w_function(pts[2], (2, 1), 'H').cls,
                               vals) == t - a1 + h
    # one-point varieties restrict to exactly 1
    for r, c in [((1, 1), (2,)), ((0, 1, 0, 1), (2,))]:
        (f,) = enumerate_fixed_points(BraneDiagram(r, c), None)
        rest = restrict_class(w_function(f, (1,), 'H'), f)
        for _ in range(2):
            vals = rational_values(rng, [a_var(1), HBAR])
            ok = ok and rest.eval_exact(vals) == 1
    elapsed = time.monotonic() - t0
    ok = ok and elapsed < 1.0
    _report(capsys, 2, ok,
            'four T*P^1 H displays and both one-point restrictions '
            'match exactly (rational arithmetic), %.2fs' % elapsed)


def test_criterion_03_tsp_elliptic_closed_form(capsys):
    t0 = time.monotonic()
    rng = random.Random(30)
    worst = 0.0
    for n in (2, 3, 4):
        sigma = tuple(range(1, n + 1))
        for k in range(1, n + 1):
            w = w_function(tsp_fixed_point(n, k), sigma, 'E')
            for _ in range(20):
                pt = tsp_point(rng, n, q=0.1)
                got = evaluate(w.cls, pt)
                want = closed_form_tsp_e(n, k, pt)
                worst = max(worst,
                            abs(got - want) / max(1.0, abs(want)))
    elapsed = time.monotonic() - t0
    ok = worst < 1e-9 and elapsed < 10.0
    _report(capsys, 3, ok,
            'T*P^{n-1} n=2,3,4, all points, 20 samples each: max residual '
            '%.2e, %.1fs' % (worst, elapsed))


def _diagonal_worst(diag, sigma, rng, points=3):
    worst = 0.0
    for f in enumerate_fixed_points(diag, None):
        rest = restrict_class(w_function(f, sigma, 'E'), f)
        eu = euler_class_at(f, sigma, 'E')

        def both(pt):
            return rest.eval(pt, rng), evaluate(eu, pt)

        for _ in range(points):
            got, want = _with_resample(rng, diag.n, diag.m, 0.1, both)
            worst = max(worst, abs(got - want) / max(1.0, abs(want)))
    return worst


def test_criterion_04_diagonal_axiom(capsys):
    t0 = time.monotonic()
    rng = random.Random(40)
    w1 = _diagonal_worst(tsp_diagram(4), (1, 2, 3, 4), rng)
    w2 = _diagonal_worst(BraneDiagram(*POSET_RC), (1, 2, 3), rng)
    elapsed = time.monotonic() - t0
    worst = max(w1, w2)
    ok = worst < 1e-8 and elapsed < 120.0
    _report(capsys, 4, ok,
            'W(f)|_f = e(N^-_f) on T*P^3 and the 12-point example: '
            'max residual %.2e, %.1fs' % (worst, elapsed))


def test_criterion_05_axioms_and_hasse(capsys):
    t0 = time.monotonic()
    rep = check_axioms(*POSET_RC, flavor='H')
    elapsed = time.monotonic() - t0
    ok = rep['passed'] and rep['is_partial_order']
    ok = ok and set(rep['reduction_edges']) == EXPECTED_HASSE
    ok = ok and elapsed < 300.0
    _report(capsys, 5, ok,
            'H axioms on X((1,1,2,1),(2,2,1)): diag residual %.1e, Hasse '
            'reduction matches the 16 expected cover relations, %.1fs'
            % (rep['max_diagonal_residual'], elapsed))


def test_criterion_06_named_identities(capsys):
    t0 = time.monotonic()
    ids = named_ids()
    f12, f9, f3 = ids['f12'], ids['f9'], ids['f3']
    r, c = POSET_RC

    rec_a = mirror_identity(r, c, f12, f9, points=20, q_list=Q_LIST)
    rec_b = mirror_identity(r, c, f9, f3, points=20, q_list=Q_LIST)
    rec_c = mirror_identity(r, c, f12, f3, points=20, q_list=Q_LIST)
    ok = all(rec.certification['certified'] and
             rec.certification['max_residual'] < 1e-8
             for rec in (rec_a, rec_b, rec_c))
    shapes = [(rec.term_count, max(rec.factors_per_term))
              for rec in (rec_a, rec_b, rec_c)]
    ok = ok and shapes == [(3, 4), (4, 6), (7, 11)]
    matches = fay_normal_form(rec_a, all_matches=True)
    ok = ok and {'x': FAY_X, 'y': FAY_Y} in matches
    elapsed = time.monotonic() - t0
    ok = ok and elapsed < 120.0
    _report(capsys, 6, ok,
            'pairs (f12,f9), (f9,f3), (f12,f3): shapes %s, Fay trisecant '
            'form recovered, %.1fs' % (shapes, elapsed))


def _all_pairs_certified(r, c):
    fps = enumerate_fixed_points(BraneDiagram(r, c), None)
    caches = ({}, {})
    recs = {}
    for f in fps:
        for g in fps:
            rec = mirror_identity(r, c, f.fid, g.fid, points=3,
                                  q_list=(0.1,), _caches=caches)
            recs[(f.fid, g.fid)] = rec
    certified = all(rec.certification['certified'] for rec in recs.values())
    consistent = all(
        recs[(i, j)].trivially_zero or recs[(j, i)].trivially_zero
        for i in range(1, 13) for j in range(1, 13) if i != j)
    return certified, consistent, len(recs)


def test_criterion_07_full_mirror_sweep(capsys):
    t0 = time.monotonic()
    r, c = POSET_RC
    cert_x, cons_x, n_x = _all_pairs_certified(r, c)
    # the mirror variety, checked independently
    rm = (3, 2, 2)
    cm = (2, 1, 2, 2)
    cert_m, cons_m, n_m = _all_pairs_certified(rm, cm)
    elapsed = time.monotonic() - t0
    ok = cert_x and cons_x and cert_m and cons_m and elapsed < 900.0
    _report(capsys, 7, ok,
            '%d + %d ordered pairs on X((1,1,2,1),(2,2,1)) and its mirror '
            'all certify; one-sided trivial vanishing holds for every '
            'unordered pair, %.1fs' % (n_x, n_m, elapsed))


def test_criterion_08_limits(capsys):
    t0 = time.monotonic()
    rep = limit_suite((2, 1), (1, 1, 1))
    elapsed = time.monotonic() - t0
    ok = rep['passed'] and rep['ek_monotone'] and rep['kh_exact']
    ok = ok and rep['ek_final_max'] < 1e-6 and elapsed < 60.0
    _report(capsys, 8, ok,
            'T*P^2 E->K residuals decay monotonically to %.1e; K->H '
            'agrees exactly in rational arithmetic, %.1fs'
            % (rep['ek_final_max'], elapsed))


def test_criterion_09_algebraic_checks(capsys):
    from test_shuffle import _atom, _rand_pt
    from bowcalc.expr import t_var

    t0 = time.monotonic()
    rng = random.Random(90)
    # shuffle associativity, 10 random triples at 10 points each
    worst_assoc = 0.0
    for _ in range(10):
        fs = []
        for j in range(3):
            exps = {t_var(-1, 1): 1, a_var(rng.randrange(1, 4)): -1,
                    HBAR: rng.randrange(0, 2)}
            if rng.random() < 0.5:
                exps[z_var(1)] = 1
            fs.append(_atom('E', (1, 1), exps))
        left = star(star(fs[0], fs[1]), fs[2])
        right = star(fs[0], star(fs[1], fs[2]))
        for _ in range(10):
            pt = _rand_pt(rng, left)
            lv = evaluate(left.cls, pt)
            rv = evaluate(right.cls, pt)
            worst_assoc = max(worst_assoc,
                              abs(lv - rv) / max(1.0, abs(lv), abs(rv)))
    ok = worst_assoc < 1e-9

    # permutation symmetry in the negative-level t variables, on every
    # computed wtilde: the small 3-point variety and the 12-point example
    worst_sym = 0.0
    targets = [(BraneDiagram((1, 2), (1, 1, 1)), (1, 2, 3), None),
               (BraneDiagram(*POSET_RC), (1, 2, 3), 1)]
    for d, sigma, only_fid in targets:
        for f in enumerate_fixed_points(d, None):
            if only_fid is not None and f.fid != only_fid:
                continue
            w = wtilde(f, sigma, 'E')
            for lvl, dim in enumerate(w.dims):
                if lvl == 0 or dim < 2:
                    continue
                swap = {t_var(-lvl, 1): t_var(-lvl, 2),
                        t_var(-lvl, 2): t_var(-lvl, 1)}
                swapped = w.cls.rename(swap)
                for _ in range(3):
                    pt = _rand_pt(rng, w)
                    v1 = evaluate(w.cls, pt)
                    v2 = evaluate(swapped, pt)
                    worst_sym = max(worst_sym,
                                    abs(v1 - v2) / max(1.0, abs(v1)))
    ok = ok and worst_sym < 1e-10

    # wheel conditions on the 4-row one-point example
    dw = BraneDiagram((0, 1, 0, 1), (2,))
    fw = enumerate_fixed_points(dw, None)[0]
    wheels = wheel_check(wtilde(fw, (1,), 'E'), trials=4, seed=9)
    ok = ok and wheels['applicable'] and wheels['max_residual'] < 1e-9

    # mirror is an involution with the transposed-complement margins
    mirror_ok = True
    for _ in range(10000):
        m = rng.randrange(1, 5)
        n = rng.randrange(1, 5)
        mat = [[rng.randrange(2) for _ in range(n)] for _ in range(m)]
        r = tuple(sum(row) for row in mat)
        c = tuple(sum(row[j] for row in mat) for j in range(n))
        f = enumerate_fixed_points(BraneDiagram(r, c), None)[0].__class__(
            BraneDiagram(r, c), mat)
        g = mirror(f)
        mirror_ok = mirror_ok and (
            g.diagram.r == tuple(m - c[n - 1 - i] for i in range(n))
            and g.diagram.c == tuple(n - r[m - 1 - i] for i in range(m))
            and mirror(g).matrix == f.matrix)
    ok = ok and mirror_ok
    elapsed = time.monotonic() - t0
    ok = ok and elapsed < 120.0
    _report(capsys, 9, ok,
            'associativity %.1e, level symmetry %.1e, wheels %.1e, mirror '
            'involution on 10^4 matrices, %.1fs'
            % (worst_assoc, worst_sym, wheels['max_residual'], elapsed))


def test_criterion_10_sweep(capsys):
    t0 = time.monotonic()
    rep = sweep(3, 3, 4)
    elapsed = time.monotonic() - t0
    table = rep['table']
    ok = (3, 4) in table and table[(3, 4)] >= 1
    _report(capsys, 10, ok,
            'sweep(3,3,4) shape table %s contains the smallest 3-term '
            '4-factor identity, %.1fs'
            % (sorted(table.items()), elapsed))
