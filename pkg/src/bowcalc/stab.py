"""Stable-envelope formula apparatus: one-tie generators, the chamber-ordered
shuffle product W~, the correction factors epsilon_c / tau_r / eu_{c,sigma},
the chamber substitution of the t_0 block, the W function, and limit-aware
fixed-point restriction.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction

from . import bowcore
from .bowcore import CharacterSum, negative_part
from .expr import (HBAR, EvalPoint, FlavorClass, FlavorTerm, Lin, Monomial,
                   Substitution, a_var, apply_substitution, evaluate,
                   t_var, theta_eval, ahat_eval, z_var, _exp)
from .shuffle import GradedFunction, star_all


class SlopeConfig:
    """Generic rational slopes s_1..s_{m-1} for the K flavor.

    m_{ik} = sum_{j=i}^{k-1} s_j.  K one-tie prefactor exponents use
    floor(m_{ik}) + 1/2 when floor=True (the default; this is the convention
    under which the q->0 limit of the elliptic one-tie equals the K one-tie,
    and which matches the projective-space closed form).
    """

    N_GUARD = 8

    def __init__(self, s, floor=True):
        self.s = tuple(Fraction(x) for x in s)
        self.floor = floor
        if not self.is_generic(self.s):
            raise ValueError('slopes fail the genericity guard: %s' % (self.s,))

    @staticmethod
    def is_generic(s, n_guard=None):
        n_guard = n_guard or SlopeConfig.N_GUARD
        import itertools
        rng = range(-n_guard, n_guard + 1)
        for combo in itertools.product(rng, repeat=len(s)):
            if all(n == 0 for n in combo):
                continue
            v = sum(n * x for n, x in zip(combo, s))
            if v.denominator == 1:
                return False
        return True

    @staticmethod
    def default(m, seed=7):
        """Slopes p_i/997 with distinct p_i in [100, 900), re-drawn until
        generic."""
        rng = random.Random(seed)
        while True:
            ps = rng.sample(range(100, 900), max(m - 1, 0))
            s = [Fraction(p, 997) for p in ps]
            if not s or SlopeConfig.is_generic(s):
                return SlopeConfig(s)

    def m_ik(self, i, k):
        return sum(self.s[j - 1] for j in range(i, k))

    def exponent(self, i, k):
        m = self.m_ik(i, k)
        if self.floor:
            m = Fraction(math.floor(m))
        return m + Fraction(1, 2)


def one_tie(k, l, flavor, slopes=None):
    """The one-tie generator W~(1_{kl}), on dims (1,)*k.  Independent of l."""
    if k < 1:
        raise ValueError('tie NS5 index must be >= 1')
    dims = (1,) * k
    if flavor == 'H':
        cls = FlavorClass('H', [FlavorTerm(1, Monomial({HBAR: k - 1}))])
        return GradedFunction(cls, dims)
    if flavor == 'K':
        if slopes is None:
            raise ValueError('K flavor one-tie needs slopes')
        pref = Monomial()
        facs = []
        hb = Monomial({HBAR: 1})
        for i in range(1, k):
            facs.append((hb, 1))
            base = Monomial.var(t_var(-i, 1)) * Monomial.var(t_var(-i + 1, 1)) ** -1 * hb
            pref = pref * base ** slopes.exponent(i, k)
        return GradedFunction(FlavorClass('K', [FlavorTerm(1, pref, facs)]), dims)
    if flavor == 'E':
        facs = []
        hb = Monomial({HBAR: 1})
        for i in range(1, k):
            ratio = Monomial.var(t_var(-i, 1)) * Monomial.var(t_var(-i + 1, 1)) ** -1
            zz = Monomial.var(z_var(k)) * Monomial.var(z_var(i)) ** -1
            facs.append((ratio * zz, 1))
            facs.append((hb, 1))
            facs.append((zz * hb ** -1, -1))
        return GradedFunction(FlavorClass('E', [FlavorTerm(1, None, facs)]), dims)
    raise ValueError('unknown flavor %r' % flavor)


def tie_order(f, sigma):
    """Ties sorted by (sigma^{-1}(l) ascending, then k descending)."""
    inv = {v: pos for pos, v in enumerate(sigma, start=1)}
    return sorted(f.ties, key=lambda kl: (inv[kl[1]], -kl[0]))


def wtilde(f, sigma, flavor, slopes=None):
    """Shuffle product of the one-tie generators in increasing chamber order."""
    return star_all([one_tie(k, l, flavor, slopes)
                     for k, l in tie_order(f, sigma)])


# ---------------------------------------------------------------------------
# correction factors

def e_star(ch, flavor):
    """Euler-type class of a virtual character: prod over monomials w of
    atom(w)^mult.  atom = theta / ahat / additive reading."""
    facs = []
    for mono, mult in ch.items():
        arg = Lin.from_monomial(mono) if flavor == 'H' else mono
        facs.append((arg, mult))
    return FlavorClass(flavor, [FlavorTerm(1, None, facs)])


def epsilon_factor(c, flavor):
    ch = CharacterSum()
    for ck in c:
        for j in range(1, ck):
            for i in range(1, j + 1):
                ch.add(Monomial({HBAR: i}), -1)
    return e_star(ch, flavor)


def tau_factor(diagram, flavor):
    """tau_r = prod_{k<0} prod_{i,j=1..d_k} e(hbar t_{ki}/t_{kj})^{-1}, the
    full double product including the diagonal."""
    facs = []
    for lev in range(1, diagram.m + 1):
        k = -lev
        dk = diagram.d(k)
        for i in range(1, dk + 1):
            for j in range(1, dk + 1):
                mono = Monomial({HBAR: 1}) * Monomial.var(t_var(k, i)) \
                    * Monomial.var(t_var(k, j)) ** -1
                arg = Lin.from_monomial(mono) if flavor == 'H' else mono
                facs.append((arg, -1))
    return FlavorClass(flavor, [FlavorTerm(1, None, facs)])


def eu_factor(c, sigma, flavor, convention='sigma'):
    """eu_{c,sigma} = e(chamber-negative part of the trivialized D5 tangent
    character); comes out as an inverse Euler factor because that character's
    negative part has multiplicity -1 throughout."""
    ch = bowcore.d5_tangent_character(c)
    neg = negative_part(ch, sigma, convention)
    return e_star(neg, flavor)


def t0_substitution(c, sigma):
    """The chamber-ordered substitution of the t_0 block: blocks
    a_{sigma(1)}, a_{sigma(1)}/hbar, ..., then the sigma(2) block, etc."""
    table = {}
    pos = 1
    for l in sigma:
        for i in range(c[l - 1]):
            table[t_var(0, pos)] = Monomial({a_var(l): 1, HBAR: -i})
            pos += 1
    return Substitution(table)


class StabResult:
    """W (or W~) plus provenance: the separate correction factors and the
    defining data."""

    def __init__(self, cls, dims, fixed_point, sigma, flavor, slopes=None,
                 factors=None):
        self.cls = cls
        self.dims = tuple(dims)
        self.fixed_point = fixed_point
        self.sigma = tuple(sigma)
        self.flavor = flavor
        self.slopes = slopes
        self.factors = factors or {}

    def graded(self):
        return GradedFunction(self.cls, self.dims)

    def to_json(self):
        out = {
            'class': self.cls.to_json(),
            'dims': list(self.dims),
            'fixed_point': [list(r) for r in self.fixed_point.matrix],
            'diagram': {'r': list(self.fixed_point.diagram.r),
                        'c': list(self.fixed_point.diagram.c)},
            'chamber': list(self.sigma),
            'flavor': self.flavor,
        }
        if self.slopes is not None:
            out['slopes'] = [[x.numerator, x.denominator] for x in self.slopes.s]
        if self.factors:
            out['factors'] = {k: v.to_json() for k, v in self.factors.items()}
        return out

    @staticmethod
    def from_json(d):
        diag = bowcore.BraneDiagram(d['diagram']['r'], d['diagram']['c'])
        fp = bowcore.FixedPoint(diag, d['fixed_point'])
        slopes = None
        if 'slopes' in d:
            slopes = SlopeConfig([Fraction(a, b) for a, b in d['slopes']])
        factors = {k: FlavorClass.from_json(v)
                   for k, v in d.get('factors', {}).items()}
        return StabResult(FlavorClass.from_json(d['class']), d['dims'], fp,
                          d['chamber'], d['flavor'], slopes, factors)


def w_function(f, sigma, flavor, slopes=None):
    """W = epsilon_c * tau_r * eu_{c,sigma} * W~|_{(c,sigma)}."""
    diag = f.diagram
    if flavor == 'K' and slopes is None:
        slopes = SlopeConfig.default(diag.m)
    wt = wtilde(f, sigma, flavor, slopes)
    sub0 = t0_substitution(diag.c, sigma)
    wt0 = apply_substitution(wt.cls, sub0)
    eps = epsilon_factor(diag.c, flavor)
    tau = tau_factor(diag, flavor)
    eu = eu_factor(diag.c, sigma, flavor)
    cls = eps.mul(tau).mul(eu).mul(wt0)
    return StabResult(cls, wt.dims, f, sigma, flavor, slopes,
                      factors={'epsilon': eps, 'tau': tau, 'eu': eu,
                               'wtilde_sub': wt0})


# ---------------------------------------------------------------------------
# restriction with 0/0 bookkeeping

class PoleError(ArithmeticError):
    pass


class RestrictionError(ArithmeticError):
    pass


def _direction(arg):
    """t-direction of an atom: the argument's exponents/coefficients on
    t-variables, as a canonically scaled tuple, plus the scale.  Two zero
    atoms with proportional directions have a direction-independent ratio."""
    d = arg.t_part()
    if not d:
        return None, None
    items = sorted(d.items())
    lead = items[0][1]
    normalized = tuple((v, x / lead) for v, x in items)
    return normalized, lead


class RestrictedTerm:
    """One term of a class after a substitution, with its structural zeros
    classified."""

    def __init__(self, term, sub_term, status, ratio=None, clean_factors=None,
                 num_zero_dirs=None, den_zero_dirs=None):
        self.term = term              # original (pre-substitution) term
        self.sub_term = sub_term      # substituted term (zeros still present)
        self.status = status          # 'zero' | 'clean' | 'paired' | 'limit'
        self.ratio = ratio            # Fraction, for 'paired'
        self.clean_factors = clean_factors
        self.num_zero_dirs = num_zero_dirs or []
        self.den_zero_dirs = den_zero_dirs or []


def analyze_restriction(cls, sub):
    """Apply a substitution term-by-term and classify each term.

    Per term we count structural zeros in the numerator and denominator:
    ord_num > ord_den   -> the term contributes 0,
    ord_num < ord_den   -> pole (error),
    ord_num = ord_den   -> pair zeros with proportional t-directions; the pair
                           ratio is exact; if some zeros cannot be paired the
                           term is left to a numeric directional limit.
    """
    is_h = cls.flavor == 'H'
    table = sub.table if isinstance(sub, Substitution) else dict(sub)
    add = {v: Lin.from_monomial(m) for v, m in table.items()} if is_h else None
    out = []
    for t in cls.terms:
        zeros = []     # (direction, lead, power sign) per unit of multiplicity
        clean = []
        ord_num = ord_den = 0
        for arg, p in t.factors.items():
            new_arg = arg.subs(add) if is_h else arg.subs(table)
            zero = new_arg.is_zero() if is_h else new_arg.is_one()
            if zero:
                if p > 0:
                    ord_num += p
                else:
                    ord_den += -p
                zeros.append((arg, new_arg, p))
            else:
                clean.append((new_arg, p))
        pref = t.pref.subs(table)
        sub_term = FlavorTerm(t.coeff, pref, clean + [(z[1], z[2]) for z in zeros])
        if ord_num > ord_den:
            out.append(RestrictedTerm(t, sub_term, 'zero'))
            continue
        if ord_num < ord_den:
            raise PoleError('pole in restriction: term %r' % t)
        if ord_num == 0:
            out.append(RestrictedTerm(t, sub_term, 'clean', clean_factors=clean))
            continue
        # balanced: try exact direction pairing
        num_units = []
        den_units = []
        for arg, _new, p in zeros:
            dirn, lead = _direction(arg)
            for _ in range(abs(p)):
                (num_units if p > 0 else den_units).append((dirn, lead, arg))
        ratio = Fraction(1)
        used = [False] * len(den_units)
        ok = True
        for dirn, lead, arg in num_units:
            hit = None
            for j, (dj, lj, aj) in enumerate(den_units):
                if not used[j] and dj == dirn and dj is not None:
                    hit = j
                    break
            if hit is None:
                ok = False
                break
            used[hit] = True
            ratio *= lead / den_units[hit][1]
        if ok:
            out.append(RestrictedTerm(t, sub_term, 'paired', ratio=ratio,
                                      clean_factors=clean))
        else:
            out.append(RestrictedTerm(
                t, sub_term, 'limit',
                clean_factors=clean,
                num_zero_dirs=[(a, p) for a, _n, p in zeros if p > 0],
                den_zero_dirs=[(a, p) for a, _n, p in zeros if p < 0]))
    return out


class Restriction:
    """The restriction of a class under a substitution (typically phi_g)."""

    def __init__(self, cls, sub, diagram=None):
        self.flavor = cls.flavor
        self.cls = cls
        self.sub = sub
        self.diagram = diagram
        self.terms = analyze_restriction(cls, sub)
        self.has_limit_terms = any(rt.status == 'limit' for rt in self.terms)

    # ---- symbolic form -------------------------------------------------
    def restricted_class(self):
        """The restriction as a FlavorClass in the remaining variables.
        Requires every balanced term to be exactly pairable."""
        terms = []
        for rt in self.terms:
            if rt.status == 'zero':
                continue
            if rt.status == 'limit':
                raise RestrictionError(
                    'term has direction-dependent 0/0; no symbolic form')
            coeff = rt.term.coeff * (rt.ratio if rt.ratio is not None else 1)
            pref = rt.term.pref.subs(
                self.sub.table if isinstance(self.sub, Substitution) else
                dict(self.sub))
            terms.append(FlavorTerm(coeff, pref, rt.clean_factors))
        return FlavorClass(self.flavor, terms)

    # ---- numeric -------------------------------------------------------
    def eval(self, pt, rng=None):
        """Numeric value at an EvalPoint (multiplicative flavors)."""
        cache = {}
        total = 0
        for rt in self.terms:
            if rt.status == 'zero':
                continue
            if rt.status in ('clean', 'paired'):
                term = FlavorTerm(
                    rt.term.coeff * (rt.ratio if rt.ratio is not None else 1),
                    rt.term.pref.subs(self._table()), rt.clean_factors)
                total += evaluate(FlavorClass(self.flavor, [term]), pt,
                                  theta_cache=cache)
            else:
                total += self._limit_eval(rt, pt, rng or random.Random(23))
        return total

    def eval_exact(self, values, rng=None):
        """Exact H-flavor evaluation at rational values of a_j, hbar.

        Balanced terms are handled with a formal perturbation parameter:
        every factor becomes alpha + beta*eps (exact), and the term limit is
        the ratio of lowest-order coefficients, cross-checked in a second
        random direction."""
        if self.flavor != 'H':
            raise ValueError('exact path is for the H flavor')
        rng = rng or random.Random(5)
        table = self._table()
        add = {v: Lin.from_monomial(m) for v, m in table.items()}
        total = Fraction(0)
        for rt in self.terms:
            if rt.status == 'zero':
                continue
            t = rt.term
            val = None
            for attempt in range(2):
                u = {v: Fraction(rng.randrange(1, 10 ** 6))
                     for v in self._t_vars_of(t)}
                cur = Fraction(t.coeff)
                for v, x in t.pref.e.items():
                    base = self._h_value(v, values, add, u, None)
                    if base[1] != 0:
                        raise RestrictionError('eps in H prefactor')
                    cur *= base[0] ** int(x)
                num_ord = 0
                num_coef = Fraction(1)
                den_ord = 0
                den_coef = Fraction(1)
                for arg, p in t.factors.items():
                    alpha = Fraction(0)
                    beta = Fraction(0)
                    for v, x in arg.c.items():
                        a0, a1 = self._h_value(v, values, add, u, None)
                        alpha += x * a0
                        beta += x * a1
                    if alpha == 0 and beta == 0:
                        raise RestrictionError('identically zero factor')
                    if alpha == 0:
                        if p > 0:
                            num_ord += p
                            num_coef *= beta ** p
                        else:
                            den_ord += -p
                            den_coef *= beta ** (-p)
                    else:
                        cur *= alpha ** p
                if num_ord != den_ord:
                    raise RestrictionError('order mismatch in exact path')
                cur *= num_coef / den_coef
                if val is None:
                    val = cur
                elif val != cur:
                    raise RestrictionError(
                        'direction-dependent 0/0 in exact H restriction')
            total += val
        return total

    # ---- helpers -------------------------------------------------------
    def _table(self):
        return self.sub.table if isinstance(self.sub, Substitution) else \
            dict(self.sub)

    @staticmethod
    def _t_vars_of(term):
        vs = set(v for v in term.pref.e if v[0] == 't')
        for arg in term.factors:
            src = arg.e if isinstance(arg, Monomial) else arg.c
            vs.update(v for v in src if v[0] == 't')
        return sorted(vs)

    @staticmethod
    def _h_value(v, values, add, u, _):
        """(constant, eps-coefficient) of a variable under the perturbed
        substitution: t -> value(t) + eps*u_t, others -> themselves."""
        if v in add:
            lin = add[v]
            const = sum(values[w] * x for w, x in lin.c.items())
            return (const + 0, u.get(v, Fraction(0)))
        return (values[v], Fraction(0))

    def _limit_eval(self, rt, pt, rng):
        """Directional numeric limit for an unpairable balanced term:
        perturb every t-value multiplicatively, evaluate at eps in
        {1e-4, 1e-5, 1e-6}, Richardson-extrapolate, and require two random
        directions to agree."""
        table = self._table()
        tvars = self._t_vars_of(rt.term)
        results = []
        for attempt in range(2):
            u = {v: complex(rng.uniform(0.5, 1.5), rng.uniform(-1, 1))
                 for v in tvars}
            vals = []
            for eps in (1e-4, 1e-5, 1e-6):
                logs = dict(pt.logs)
                for v in tvars:
                    base = table[v]
                    lg = sum(float(x) * pt.logs[w] for w, x in base.e.items())
                    logs[v] = lg + _clog(1 + eps * u[v])
                ppt = EvalPoint(logs, pt.q, pt.tol, guard=1e-300)
                vals.append(evaluate(
                    FlavorClass(self.flavor, [rt.term]), ppt))
            l12 = (10 * vals[1] - vals[0]) / 9
            l23 = (10 * vals[2] - vals[1]) / 9
            scale = max(abs(l23), 1e-300)
            if abs(l12 - l23) / scale > 1e-4:
                raise RestrictionError('directional limit did not stabilize')
            results.append(l23)
        scale = max(abs(results[0]), abs(results[1]), 1e-300)
        if abs(results[0] - results[1]) / scale > 1e-6:
            raise RestrictionError('direction-dependent 0/0 term')
        return results[0]


def _clog(x):
    import cmath
    return cmath.log(x)


def restrict_class(w, g):
    """Restrict a StabResult (or GradedFunction whose t_0 block is already
    substituted) at the fixed point g: apply phi_g on the t_{k<0} variables."""
    cls = w.cls if hasattr(w, 'cls') else w
    full = bowcore.restriction_substitution(g)
    table = {v: m for v, m in full.items() if v[0] == 't' and v[1] < 0}
    return Restriction(cls, Substitution(table), g.diagram)


def euler_class_at(g, sigma, flavor, convention='sigma'):
    """e(N^-_g): the flavor Euler class of the chamber-negative tangent
    character at g -- the closed form of the diagonal restriction."""
    ch = bowcore.tangent_character(g)
    return e_star(negative_part(ch, sigma, convention), flavor)
