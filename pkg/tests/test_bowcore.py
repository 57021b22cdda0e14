import itertools
import random

import pytest

from bowcalc.bowcore import (BraneDiagram, InputError, crossings, decorations,
                             enumerate_fixed_points, expected_tangent_rank,
                             mirror, parse_brane_diagram,
                             restriction_substitution, tangent_character)
from bowcalc.expr import HBAR, Monomial, a_var, t_var


def brute_force_bcts(r, c):
    """All 01-matrices with margins (r, c), by raw enumeration."""
    m, n = len(r), len(c)
    out = []
    rows_choices = [list(itertools.combinations(range(n), ri)) for ri in r]
    for picks in itertools.product(*rows_choices):
        cols = [0] * n
        for pick in picks:
            for j in pick:
                cols[j] += 1
        if cols == list(c):
            out.append(tuple(tuple(1 if j in pick else 0 for j in range(n))
                             for pick in picks))
    return out


def test_parse_slash_form():
    d = parse_brane_diagram('/1/2\\1\\')
    assert d.r == (1, 1) and d.c == (1, 1)
    assert d.text() == '/1/2\\1\\'


def test_parse_charge_form():
    d = parse_brane_diagram('r=1,1,2,1;c=2,2,1')
    assert d.r == (1, 1, 2, 1) and d.c == (2, 2, 1)
    assert d.d0 == 5


def test_parse_rejects_nonpositive_and_malformed():
    for bad in ('/2/1\\', 'r=0,1;c=1', '/1\\1/2\\', 'x', 'r=1,1;c=3'):
        with pytest.raises(InputError):
            parse_brane_diagram(bad)


def test_library_accepts_zero_charges():
    d = BraneDiagram((0, 1, 0, 1), (2,))
    fps = enumerate_fixed_points(d, None)
    assert len(fps) == 1
    assert fps[0].matrix == ((0,), (1,), (0,), (1,))


def test_dimension_vector():
    d = BraneDiagram((1, 1, 2, 1), (2, 2, 1))
    assert d.dims == (5, 4, 3, 1, 0)
    assert d.d(0) == 5 and d.d(-2) == 3 and d.d(1) == 3 and d.d(3) == 0


def test_enumeration_against_brute_force():
    # every margin pair with small entries and m*n <= 20
    rng_margins = []
    for m, n in [(2, 2), (2, 3), (3, 2), (3, 3), (3, 4), (2, 5), (4, 5)]:
        assert m * n <= 20
        for r in itertools.product(range(3), repeat=m):
            for c in itertools.product(range(3), repeat=n):
                if sum(r) != sum(c) or sum(r) == 0:
                    continue
                rng_margins.append((r, c))
    assert len(rng_margins) > 200
    for r, c in rng_margins:
        got = [f.matrix for f in
               enumerate_fixed_points(BraneDiagram(r, c), None)]
        assert sorted(got) == sorted(brute_force_bcts(r, c)), (r, c)
        assert len(set(got)) == len(got)


def test_enumeration_deterministic_ids():
    d = BraneDiagram((1, 1, 2, 1), (2, 2, 1))
    fps = enumerate_fixed_points(d, None)
    assert len(fps) == 12
    assert [f.fid for f in fps] == list(range(1, 13))
    # leftmost-packed row-major order: the first matrix is reproducible
    assert fps[0].matrix == ((1, 0, 0), (1, 0, 0), (0, 1, 1), (0, 1, 0))


def test_crossings():
    d = BraneDiagram((1, 1), (1, 1))
    f1, f2 = enumerate_fixed_points(d, None)
    assert crossings(f1) == 0 and crossings(f2) == 1
    d12 = BraneDiagram((1, 1, 2, 1), (2, 2, 1))
    fps = enumerate_fixed_points(d12, None)
    assert crossings(fps[0]) == 1
    assert crossings(fps[3]) == 3
    assert crossings(fps[9]) == 6


def test_mirror_involution_and_margins():
    rng = random.Random(7)
    for _ in range(500):
        m = rng.randrange(1, 5)
        n = rng.randrange(1, 5)
        mat = [[rng.randrange(2) for _ in range(n)] for _ in range(m)]
        r = tuple(sum(row) for row in mat)
        c = tuple(sum(row[j] for row in mat) for j in range(n))
        d = BraneDiagram(r, c)
        f = enumerate_fixed_points(d, None)[0].__class__(d, mat)
        g = mirror(f)
        assert g.diagram.r == tuple(m - c[n - 1 - i] for i in range(n))
        assert g.diagram.c == tuple(n - r[m - 1 - i] for i in range(m))
        assert mirror(g).matrix == f.matrix
        assert mirror(g).diagram == d


def test_decorations_tsp1():
    d = BraneDiagram((1, 1), (1, 1))
    f1, _f2 = enumerate_fixed_points(d, None)
    # f1 ties {(1,1), (2,2)}: X_{-1} is covered only by the tie at A_2
    dec = decorations(f1, -1)
    assert dec == [Monomial({a_var(2): 1, HBAR: -1})]
    sub = restriction_substitution(f1)
    assert sub.table[t_var(-1, 1)] == Monomial({a_var(2): 1, HBAR: -1})


def test_tangent_character_tsp1():
    d = BraneDiagram((1, 1), (1, 1))
    f1, f2 = enumerate_fixed_points(d, None)
    ch1 = tangent_character(f1)
    # at the point with ties {(1,1),(2,2)}: T T*P^1 = a_2/a_1 + hbar a_1/a_2
    expected = {Monomial({a_var(2): 1, a_var(1): -1}): 1,
                Monomial({a_var(1): 1, a_var(2): -1, HBAR: 1}): 1}
    assert dict(ch1) == expected
    assert sum(tangent_character(f2).values()) == 2


def test_tangent_rank_matches_dimension():
    # dim X = #f-independent: all fixed points of one variety agree
    d = BraneDiagram((1, 1, 2, 1), (2, 2, 1))
    ranks = {sum(tangent_character(f).values())
             for f in enumerate_fixed_points(d, None)}
    assert ranks == {expected_tangent_rank(d)} == {6}
