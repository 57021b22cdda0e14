import json
import random
from fractions import Fraction

import pytest

from bowcalc.bowcore import BraneDiagram, enumerate_fixed_points
from bowcalc.expr import (HBAR, Monomial, a_var, evaluate, evaluate_h,
                          random_point, t_var, z_var)
from bowcalc.stab import (SlopeConfig, StabResult, euler_class_at,
                          restrict_class, w_function)

from _helpers import (T, closed_form_tsp_e, rational_values, tsp1_points,
                      tsp_point)


def _h_val(w, vals):
    return evaluate_h(w.cls, vals)


def test_tsp1_h_displays_exact():
    pts = tsp1_points()
    rng = random.Random(11)
    for _ in range(3):
        vals = rational_values(rng, [T, HBAR, a_var(1), a_var(2)])
        t, h = vals[T], vals[HBAR]
        a1, a2 = vals[a_var(1)], vals[a_var(2)]
        # chamber (1,2)
        assert _h_val(w_function(pts[1], (1, 2), 'H'), vals) == t - a2 + h
        assert _h_val(w_function(pts[2], (1, 2), 'H'), vals) == a1 - t
        # opposite chamber (2,1)
        assert _h_val(w_function(pts[1], (2, 1), 'H'), vals) == a2 - t
        assert _h_val(w_function(pts[2], (2, 1), 'H'), vals) == t - a1 + h


def test_one_point_restriction_is_one():
    d = BraneDiagram((1, 1), (2,))
    (f,) = enumerate_fixed_points(d, None)
    w = w_function(f, (1,), 'H')
    rest = restrict_class(w, f)
    rng = random.Random(3)
    for _ in range(2):
        vals = rational_values(rng, [a_var(1), HBAR])
        assert rest.eval_exact(vals) == 1


def test_two_term_restriction_is_one():
    d = BraneDiagram((0, 1, 0, 1), (2,))
    (f,) = enumerate_fixed_points(d, None)
    w = w_function(f, (1,), 'H')
    assert len(w.cls.terms) == 2
    rest = restrict_class(w, f)
    rng = random.Random(4)
    for _ in range(2):
        vals = rational_values(rng, [a_var(1), HBAR])
        assert rest.eval_exact(vals) == 1


def test_tsp1_e_closed_form():
    pts = tsp1_points()
    rng = random.Random(8)
    for k in (1, 2):
        w = w_function(pts[k], (1, 2), 'E')
        for _ in range(5):
            pt = tsp_point(rng, 2, q=0.1)
            got = evaluate(w.cls, pt)
            want = closed_form_tsp_e(2, k, pt)
            assert abs(got - want) < 1e-9 * max(1.0, abs(want)), (k, got, want)


@pytest.mark.parametrize('flavor', ['E', 'K'])
def test_diagonal_restriction_tsp1(flavor):
    pts = tsp1_points()
    rng = random.Random(13)
    slopes = SlopeConfig([Fraction(431, 997)])
    for k in (1, 2):
        w = w_function(pts[k], (1, 2), flavor, slopes=slopes)
        rest = restrict_class(w, pts[k])
        eu = euler_class_at(pts[k], (1, 2), flavor)
        for _ in range(3):
            pt = random_point(rng, 2, 2, q=0.1 if flavor == 'E' else None)
            got = rest.eval(pt)
            want = evaluate(eu, pt)
            assert abs(got - want) < 1e-9 * max(1.0, abs(want))


def test_off_diagonal_triangularity_tsp1():
    # in chamber (1,2) the point with tie (2,2) is the top one:
    # W(f_bottom)|_top must vanish, W(f_top)|_bottom need not
    pts = tsp1_points()
    rng = random.Random(17)
    w_bot = w_function(pts[1], (1, 2), 'E')
    rest = restrict_class(w_bot, pts[2])
    for _ in range(3):
        pt = random_point(rng, 2, 2, q=0.1)
        assert abs(rest.eval(pt)) < 1e-10


def test_stabresult_json_roundtrip():
    pts = tsp1_points()
    w = w_function(pts[1], (1, 2), 'E')
    blob = json.dumps(w.to_json())
    back = StabResult.from_json(json.loads(blob))
    assert back.dims == w.dims
    assert back.sigma == w.sigma
    assert back.flavor == 'E'
    assert back.fixed_point.matrix == w.fixed_point.matrix
    assert repr(back.cls) == repr(w.cls)

    slopes = SlopeConfig([Fraction(431, 997)])
    wk = w_function(pts[2], (2, 1), 'K', slopes=slopes)
    back = StabResult.from_json(json.loads(json.dumps(wk.to_json())))
    assert back.slopes.s == slopes.s
    assert repr(back.cls) == repr(wk.cls)


def test_slope_config():
    s = SlopeConfig([Fraction(431, 997), Fraction(112, 997)])
    assert s.m_ik(1, 2) == Fraction(431, 997)
    assert s.m_ik(1, 3) == Fraction(543, 997)
    assert s.exponent(1, 2) == Fraction(1, 2)
    dflt = SlopeConfig.default(4, seed=7)
    assert len(dflt.s) == 3
    assert dflt.s == SlopeConfig.default(4, seed=7).s  # deterministic
