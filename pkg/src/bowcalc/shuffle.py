"""The framed shuffle algebra: kernel functions, the star product, and the
wheel-condition checker.

A GradedFunction is a FlavorClass together with its left dimension vector
d = (d_0, d_{-1}, d_{-2}, ...); it is (semantically) symmetric in the t_{k,i}
for each k < 0, but not in the t_{0,i}.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

from .expr import (HBAR, EvalPoint, FlavorClass, FlavorTerm, Lin, Monomial,
                   evaluate, t_var, z_shift)


class GradedFunction:
    """cls: FlavorClass; dims: tuple with dims[i] = d_{-i} (dims[0] = d_0)."""

    def __init__(self, cls, dims):
        while len(dims) > 1 and dims[-1] == 0:
            dims = dims[:-1]
        self.cls = cls
        self.dims = tuple(dims)

    @property
    def flavor(self):
        return self.cls.flavor

    def t_vars(self):
        out = []
        for i, dk in enumerate(self.dims):
            out.extend(t_var(-i, j + 1) for j in range(dk))
        return out

    @staticmethod
    def one(flavor, dims=(0,)):
        return GradedFunction(FlavorClass.one(flavor), dims)

    def __repr__(self):
        return 'GradedFunction(d=%s, %s)' % (self.dims, self.cls)


def _e_factors(flavor, A, B, hbar_shift):
    """Factor list of e(A, B) = prod_{a in A, b in B} atom(hbar^shift * b / a)."""
    out = []
    for a in A:
        for b in B:
            mono = b * a.inv()
            if hbar_shift:
                mono = mono * Monomial({HBAR: hbar_shift})
            if flavor == 'H':
                out.append((Lin.from_monomial(mono), 1))
            else:
                out.append((mono, 1))
    return out


def kernel(dp, dpp, flavor, name1=None, name2=None):
    """The kernel phi_{d', d''} as a single-term FlavorClass.

    phi = prod_{k<0} e_h(t'_k, t''_k) e_h(t''_{k+1}, t'_k) e(t''_k, t'_{k+1})
                     / e(t''_k, t'_k)

    with e_h(A,B) = prod theta(hbar b/a) (E) / ahat(hbar b/a) (K) /
    (b - a + hbar) (H) and e = the hbar-free version.  name1/name2 map (k, i)
    to the variables standing in for t' and t''; defaults keep them apart as
    ('t1', k, i) and ('t2', k, i)."""
    if name1 is None:
        name1 = lambda k, i: ('t1', k, i)
    if name2 is None:
        name2 = lambda k, i: ('t2', k, i)
    depth = max(len(dp), len(dpp))
    dp = tuple(dp) + (0,) * (depth - len(dp))
    dpp = tuple(dpp) + (0,) * (depth - len(dpp))

    def tp(k):
        return [Monomial.var(name1(k, i + 1)) for i in range(dp[-k])]

    def tpp(k):
        return [Monomial.var(name2(k, i + 1)) for i in range(dpp[-k])]

    facs = []
    for i in range(1, depth):
        k = -i
        facs += _e_factors(flavor, tp(k), tpp(k), 1)
        facs += _e_factors(flavor, tpp(k + 1), tp(k), 1)
        facs += _e_factors(flavor, tpp(k), tp(k + 1), 0)
        facs += [(arg, -p) for arg, p in _e_factors(flavor, tpp(k), tp(k), 0)]
    return FlavorClass(flavor, [FlavorTerm(1, None, facs)])


def star(f1, f2):
    """Shuffle product.  Sum over all ways to split the t_{k,.} variables
    (k < 0) between the factors; t_0 variables are concatenated positionally
    (f1's first).  f2 is z-shifted by f1's NS5 charges before renaming."""
    if f1.flavor != f2.flavor:
        raise ValueError('flavor mismatch')
    flavor = f1.flavor
    depth = max(len(f1.dims), len(f2.dims))
    d1 = tuple(f1.dims) + (0,) * (depth - len(f1.dims))
    d2 = tuple(f2.dims) + (0,) * (depth - len(f2.dims))
    dims = tuple(x + y for x, y in zip(d1, d2))

    charges1 = [d1[k - 1] - d1[k] for k in range(1, depth)] + [d1[depth - 1]]
    cls2 = z_shift(f2.cls, charges1)

    terms = []
    level_choices = [itertools.combinations(range(dims[i]), d1[i])
                     for i in range(1, depth)]
    for picks in itertools.product(*level_choices):
        map1 = {}
        map2 = {}
        for j in range(d1[0]):
            map1[t_var(0, j + 1)] = t_var(0, j + 1)
        for j in range(d2[0]):
            map2[t_var(0, j + 1)] = t_var(0, d1[0] + j + 1)
        for i in range(1, depth):
            k = -i
            chosen = picks[i - 1]
            rest = [x for x in range(dims[i]) if x not in chosen]
            for j, x in enumerate(chosen):
                map1[t_var(k, j + 1)] = t_var(k, x + 1)
            for j, x in enumerate(rest):
                map2[t_var(k, j + 1)] = t_var(k, x + 1)
        phi = kernel(d1, d2, flavor,
                     name1=lambda k, i: map1[t_var(k, i)],
                     name2=lambda k, i: map2[t_var(k, i)])
        piece = f1.cls.rename(map1).mul(cls2.rename(map2)).mul(phi)
        terms.extend(piece.terms)
    return GradedFunction(FlavorClass(flavor, terms), dims)


def star_all(funcs):
    out = None
    for f in funcs:
        out = f if out is None else star(out, f)
    return out


def shuffle_term_count(d, dp):
    depth = max(len(d), len(dp))
    d = tuple(d) + (0,) * (depth - len(d))
    dp = tuple(dp) + (0,) * (depth - len(dp))
    return math.prod(math.comb(d[i], dp[i]) for i in range(1, depth))


# ---------------------------------------------------------------------------
# wheel conditions

def wheel_substitution_patterns(dims):
    """All index patterns for the two wheel-condition families on a dimension
    vector.  Yields (kind, k, a, b, c) with a != c indices at level -k and b at
    level -k+1 (kind 1) or -k-1 (kind 2); the substituted values are

        kind 1:  t_{-k,a} = hbar * t_{-k,c},   t_{-k+1,b} = hbar * t_{-k,c}
        kind 2:  t_{-k,a} = t_{-k,c} / hbar,   t_{-k-1,b} = t_{-k,c} / hbar
    """
    depth = len(dims)
    for i in range(1, depth):
        dk = dims[i]
        if dk < 2:
            continue
        for a, c in itertools.permutations(range(1, dk + 1), 2):
            up = dims[i - 1]
            for b in range(1, up + 1):
                yield (1, i, a, b, c)
            if i + 1 < depth:
                for b in range(1, dims[i + 1] + 1):
                    yield (2, i, a, b, c)


def wheel_check(f, trials=4, rng=None, q=0.17, tol=1e-9, seed=11):
    """Numerically test the wheel conditions on a GradedFunction.

    Returns a report dict: {'applicable': bool, 'max_residual': float,
    'passed': bool, 'cases': int}.  Residuals are |value| / max |term value|.
    """
    import random

    from .expr import a_var, z_var

    if rng is None:
        rng = random.Random(seed)
    dims = f.dims
    patterns = list(wheel_substitution_patterns(dims))
    if not patterns:
        return {'applicable': False, 'max_residual': 0.0, 'passed': True,
                'cases': 0}

    vs = f.cls.variables()
    free = sorted((v for v in vs if v[0] != 't'), key=str)
    worst = 0.0
    cases = 0
    for _ in range(trials):
        logs = {}
        for v in free + [HBAR]:
            logs[v] = complex(math.log(rng.uniform(0.6, 1.6)),
                              rng.uniform(-math.pi, math.pi))
        for v in f.t_vars():
            logs[v] = complex(math.log(rng.uniform(0.6, 1.6)),
                              rng.uniform(-math.pi, math.pi))
        lh = logs[HBAR]
        # reference scale at the generic point: on the wheel locus every
        # individual term may vanish (a theta factor hits argument 1), which
        # would make max|term| there a useless denominator
        pt0 = EvalPoint(logs, q=q if f.flavor == 'E' else None, guard=1e-12)
        if f.flavor == 'H':
            _, scale0 = _h_sum_and_scale(
                f.cls, {v: _h_value(v, logs) for v in logs})
        else:
            _, scale0 = _sum_and_scale(f.cls, pt0)
        for kind, i, a, b, c in patterns:
            L = dict(logs)
            base = L[t_var(-i, c)]
            if kind == 1:
                L[t_var(-i, a)] = base + lh
                L[t_var(-i + 1, b)] = base + lh
            else:
                L[t_var(-i, a)] = base - lh
                L[t_var(-i - 1, b)] = base - lh
            pt = EvalPoint(L, q=q if f.flavor == 'E' else None, guard=1e-12)
            if f.flavor == 'H':
                vals = {v: _h_value(v, L) for v in L}
                total, scale = _h_sum_and_scale(f.cls, vals)
            else:
                total, scale = _sum_and_scale(f.cls, pt)
            cases += 1
            worst = max(worst, abs(total) / max(scale, scale0, 1e-300))
    return {'applicable': True, 'max_residual': worst, 'passed': worst < tol,
            'cases': cases}


def _h_value(v, logs):
    # additive coordinates for the H flavor: just reuse the random logs as
    # generic complex numbers
    return logs[v]


def _sum_and_scale(cls, pt):
    cache = {}
    total = 0
    scale = 0.0
    for t in cls.terms:
        val = evaluate(FlavorClass(cls.flavor, [t]), pt, theta_cache=cache)
        total += val
        scale = max(scale, abs(val))
    return total, scale


def _h_sum_and_scale(cls, vals):
    total = 0
    scale = 0.0
    for t in cls.terms:
        val = complex(t.coeff)
        for v, x in t.pref.e.items():
            val *= vals[v] ** int(x)
        for arg, p in t.factors.items():
            av = sum(vals[v] * complex(x) for v, x in arg.c.items())
            val *= av ** p
        total += val
        scale = max(scale, abs(val))
    return total, scale
