"""End-to-end certifications.

Three families of checks live here:

  * check_axioms  -- diagonal restrictions vs Euler classes, triangularity,
                     and the induced partial order on fixed points;
  * mirror_identity / fay_normal_form / sweep -- generation and numeric
                     certification of theta-function identities coming from
                     the mirror-symmetry statement for restricted stable
                     envelopes;
  * limit_suite   -- the E->K (pinned Kähler parameter) and K->H (leading
                     degree) degeneration checks.

Identities are exported as IdentityRecord objects: cleared-denominator sums
of products of theta factors with +-1 coefficients, JSON- and LaTeX-
serializable.
"""

from __future__ import annotations

import cmath
import itertools
import json
import math
import random
from fractions import Fraction

from . import bowcore
from .bowcore import (BraneDiagram, FixedPoint, crossings,
                      enumerate_fixed_points, mirror, negative_part,
                      tangent_character)
from .expr import (HBAR, EvalPoint, FlavorClass, FlavorTerm, Lin, Monomial,
                   ResampleNeeded, a_var, evaluate, evaluate_h, random_point,
                   z_var)
from .stab import (Restriction, RestrictionError, SlopeConfig, e_star,
                   euler_class_at, restrict_class, w_function)


# ---------------------------------------------------------------------------
# small helpers

def _identity_perm(n):
    return tuple(range(1, n + 1))


def _as_fixed_point(diagram, f, fps=None):
    if isinstance(f, FixedPoint):
        return f
    fps = fps if fps is not None else enumerate_fixed_points(diagram, None)
    return fps[int(f) - 1]


def _find_fid(fps, f):
    for g in fps:
        if g.matrix == f.matrix:
            return g.fid
    raise ValueError('fixed point not in enumeration')


def _orient(arg):
    """Canonical orientation of a theta argument: the first nonzero exponent
    (variables sorted) is made positive.  theta(1/x) = -theta(x), so flipping
    a factor of power p contributes (-1)^p to the coefficient."""
    for v, x in sorted(arg.e.items()):
        if x > 0:
            return arg, 1
        if x < 0:
            return arg.inv(), -1
    return arg, 1


def _mono_key(arg):
    return tuple(sorted(arg.e.items()))


def _orient_term(coeff, factors):
    """Orient every factor; returns (coeff, {oriented arg: power})."""
    out = {}
    for arg, p in factors:
        oarg, s = _orient(arg)
        if s < 0 and p % 2:
            coeff = -coeff
        out[oarg] = out.get(oarg, 0) + p
    return coeff, {a: p for a, p in out.items() if p}


def _eval_class_scaled(cls, pt, cache=None):
    """(sum, max single-term magnitude) of a FlavorClass at a point."""
    cache = {} if cache is None else cache
    total = 0
    scale = 0.0
    for t in cls.terms:
        v = evaluate(FlavorClass(cls.flavor, [t]), pt, theta_cache=cache)
        total += v
        scale = max(scale, abs(v))
    return total, scale


def _sample(rng, n_a, m_z, q):
    return random_point(rng, n_a, m_z, q=q)


def _with_resample(rng, n_a, m_z, q, fn, max_tries=20):
    """Run fn(pt) at a fresh random point, resampling if the evaluator hits
    a near-degenerate theta argument."""
    for _ in range(max_tries):
        pt = _sample(rng, n_a, m_z, q)
        try:
            return fn(pt)
        except ResampleNeeded:
            continue
    raise ResampleNeeded('no well-conditioned sample point found')


def transitive_reduction(nodes, edges):
    """Transitive reduction of a DAG given as a set of (lo, hi) pairs."""
    succ = {x: set() for x in nodes}
    for lo, hi in edges:
        if lo != hi:
            succ[lo].add(hi)

    def reachable(x, y, skip):
        stack = [x]
        seen = set()
        while stack:
            cur = stack.pop()
            for nxt in succ[cur]:
                if (cur, nxt) == skip:
                    continue
                if nxt == y:
                    return True
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return False

    red = set()
    for lo in nodes:
        for hi in succ[lo]:
            if not reachable(lo, hi, skip=(lo, hi)):
                red.add((lo, hi))
    return sorted(red)


# ---------------------------------------------------------------------------
# axiom suite

def check_axioms(r, c, sigma=None, flavor='H', points=3, tol=1e-8, seed=3,
                 slopes=None, q=0.13):
    """Certify the defining restriction properties of the W functions.

    For every ordered pair (f, g) of fixed points of X(r, c):
      * diagonal (f = g): W(f)|_f equals the flavor Euler class of the
        chamber-negative part of the tangent character;
      * off-diagonal: the restriction either vanishes (g not below f) or is
        a genuine nonzero class; the induced relation must be a partial
        order.

    H flavor is checked in exact rational arithmetic; K and E numerically at
    random points.  Returns a report dict.
    """
    diagram = r if isinstance(r, BraneDiagram) else BraneDiagram(r, c)
    sigma = sigma or _identity_perm(diagram.n)
    if flavor == 'K' and slopes is None:
        slopes = SlopeConfig.default(diagram.m)
    fps = enumerate_fixed_points(diagram, None)
    rng = random.Random(seed)

    ws = {f.fid: w_function(f, sigma, flavor, slopes) for f in fps}
    diag_report = []
    nonzero = {}
    max_diag = 0.0

    if flavor == 'H':
        value_sets = []
        for _ in range(2):
            vals = {a_var(j + 1): Fraction(rng.randrange(10 ** 4, 10 ** 6), 997)
                    for j in range(diagram.n)}
            vals[HBAR] = Fraction(rng.randrange(10 ** 4, 10 ** 6), 991)
            value_sets.append(vals)
    else:
        m_z = diagram.m if flavor == 'E' else 0
        qq = q if flavor == 'E' else None

    for f in fps:
        for g in fps:
            restr = restrict_class(ws[f.fid], g)
            if f.fid == g.fid:
                euler = euler_class_at(g, sigma, flavor)
                if flavor == 'H':
                    res = 0.0
                    for vals in value_sets:
                        lv = restr.eval_exact(vals)
                        rv = evaluate_h(euler, vals)
                        if lv != rv:
                            res = max(res, abs(complex(lv - rv)) /
                                      max(abs(complex(rv)), 1e-300))
                else:
                    res = 0.0
                    for _ in range(points):
                        def diag_at(pt):
                            lv = restr.eval(pt, rng)
                            rv = evaluate(euler, pt)
                            return abs(lv - rv) / max(abs(rv), 1e-300)
                        res = max(res, _with_resample(rng, diagram.n, m_z,
                                                      qq, diag_at))
                diag_report.append({'f': f.fid, 'residual': res})
                max_diag = max(max_diag, res)
                continue
            if flavor == 'H':
                vanishes = all(restr.eval_exact(vals) == 0
                               for vals in value_sets)
            else:
                worst = 0.0
                for _ in range(points):
                    def off_at(pt):
                        total, scale = _restriction_eval_scaled(
                            restr, pt, rng)
                        return abs(total) / max(scale, 1e-300)
                    worst = max(worst, _with_resample(rng, diagram.n, m_z,
                                                      qq, off_at))
                vanishes = worst < tol
            if not vanishes:
                nonzero[(g.fid, f.fid)] = True   # g <= f (g is below f)

    raw = sorted(nonzero)
    ids = [f.fid for f in fps]
    # Nonvanishing of W(f)|_g forces g <= f but not conversely: comparable
    # pairs may still restrict to zero.  The induced order is therefore the
    # transitive closure of the nonvanishing relation.
    order = _transitive_closure(ids, raw)
    ok_order = _is_strict_partial_order(ids, order)
    report = {
        'r': tuple(diagram.r), 'c': tuple(diagram.c), 'flavor': flavor,
        'sigma': tuple(sigma), 'fixed_points': len(fps),
        'diagonal': diag_report, 'max_diagonal_residual': max_diag,
        'nonzero_edges': raw,
        'order_edges': order,
        'reduction_edges': transitive_reduction(ids, order),
        'is_partial_order': ok_order,
        'passed': ok_order and max_diag < tol,
    }
    return report


def _transitive_closure(nodes, edges):
    es = set(edges)
    changed = True
    while changed:
        changed = False
        for x, y in list(es):
            for y2, z in list(es):
                if y2 == y and (x, z) not in es and x != z:
                    es.add((x, z))
                    changed = True
    return sorted(es)


def _restriction_eval_scaled(restr, pt, rng):
    cache = {}
    total = 0
    scale = 0.0
    for rt in restr.terms:
        if rt.status == 'zero':
            continue
        if rt.status in ('clean', 'paired'):
            term = FlavorTerm(
                rt.term.coeff * (rt.ratio if rt.ratio is not None else 1),
                rt.term.pref.subs(restr.sub.table), rt.clean_factors)
            v = evaluate(FlavorClass(restr.flavor, [term]), pt,
                         theta_cache=cache)
        else:
            v = restr._limit_eval(rt, pt, rng)
        total += v
        scale = max(scale, abs(v))
    return total, scale


def _is_strict_partial_order(nodes, edges):
    es = set(edges)
    if any((y, x) in es for x, y in es):
        return False
    for x, y in es:
        for z in nodes:
            if (y, z) in es and (x, z) not in es:
                return False
    return True


# ---------------------------------------------------------------------------
# mirror identities

class IdentityRecord:
    """A certified (or trivially-zero) theta-function identity.

    Fields: the variety (r, c), the fixed-point pair (fid, matrices), the
    sign (-1)^(#f + #g), the two restricted ratio classes, the expanded
    cleared-denominator form (list of {coeff, factors}), and the
    certification metadata."""

    def __init__(self, r, c, f_id, g_id, f_matrix, g_matrix, sign,
                 trivially_zero, terms, lhs=None, rhs=None,
                 certification=None, hbar_inverted=True):
        self.r = tuple(r)
        self.c = tuple(c)
        self.f_id = f_id
        self.g_id = g_id
        self.f_matrix = f_matrix
        self.g_matrix = g_matrix
        self.sign = sign
        self.trivially_zero = trivially_zero
        self.terms = terms            # [(coeff Fraction, {Monomial: power})]
        self.lhs = lhs                # FlavorClass or None
        self.rhs = rhs
        self.certification = certification or {}
        self.hbar_inverted = hbar_inverted

    @property
    def term_count(self):
        return len(self.terms)

    @property
    def factors_per_term(self):
        """theta factors per term, counted with multiplicity."""
        return [sum(p for p in fac.values()) for _c, fac in self.terms]

    def to_json(self):
        return {
            'r': list(self.r), 'c': list(self.c),
            'f_id': self.f_id, 'g_id': self.g_id,
            'f_matrix': [list(row) for row in self.f_matrix],
            'g_matrix': [list(row) for row in self.g_matrix],
            'sign': self.sign,
            'trivially_zero': self.trivially_zero,
            'hbar_inverted': self.hbar_inverted,
            'terms': [{'coeff': [co.numerator, co.denominator],
                       'factors': [[arg.to_json(), p]
                                   for arg, p in sorted(
                                       fac.items(),
                                       key=lambda kv: _mono_key(kv[0]))]}
                      for co, fac in self.terms],
            'lhs': self.lhs.to_json() if self.lhs is not None else None,
            'rhs': self.rhs.to_json() if self.rhs is not None else None,
            'certification': _cert_json(self.certification),
        }

    @staticmethod
    def from_json(d):
        terms = [(Fraction(t['coeff'][0], t['coeff'][1]),
                  {Monomial.from_json(a): p for a, p in t['factors']})
                 for t in d['terms']]
        return IdentityRecord(
            d['r'], d['c'], d['f_id'], d['g_id'],
            tuple(tuple(row) for row in d['f_matrix']),
            tuple(tuple(row) for row in d['g_matrix']),
            d['sign'], d['trivially_zero'], terms,
            lhs=FlavorClass.from_json(d['lhs']) if d.get('lhs') else None,
            rhs=FlavorClass.from_json(d['rhs']) if d.get('rhs') else None,
            certification=_cert_unjson(d.get('certification') or {}),
            hbar_inverted=d.get('hbar_inverted', True))

    def to_latex(self):
        """Render the expanded identity with the (x) = theta(x) shorthand."""
        if self.trivially_zero:
            return '0 = 0'
        parts = []
        for i, (co, fac) in enumerate(self.terms):
            body = ''.join(
                '(%s)%s' % (_latex_monomial(arg),
                            '' if p == 1 else '^{%d}' % p)
                for arg, p in sorted(fac.items(),
                                     key=lambda kv: _mono_key(kv[0])))
            mag = abs(co)
            pre = '' if mag == 1 else '%s\\,' % mag
            if i == 0:
                sgn = '-' if co < 0 else ''
            else:
                sgn = ' - ' if co < 0 else ' + '
            parts.append(sgn + pre + body)
        return ''.join(parts) + ' = 0'

    def __repr__(self):
        if self.trivially_zero:
            shape = 'trivially zero'
        else:
            shape = '%d terms x %s factors' % (
                self.term_count, sorted(set(self.factors_per_term)))
        return 'IdentityRecord((%s,%s), f%s, g%s: %s)' % (
            list(self.r), list(self.c), self.f_id, self.g_id, shape)


def _cert_json(cert):
    out = dict(cert)
    if 'q_list' in out:
        out['q_list'] = [[complex(q).real, complex(q).imag]
                         for q in out['q_list']]
    return out


def _cert_unjson(cert):
    out = dict(cert)
    if 'q_list' in out:
        out['q_list'] = [complex(re, im) for re, im in out['q_list']]
    return out


def _latex_monomial(arg):
    parts = []
    for v, x in sorted(arg.e.items()):
        if v[0] == 'h':
            name = '\\h'
        else:
            name = '%s_{%d}' % (v[0], v[1])
        if x == 1:
            parts.append(name)
        else:
            xs = str(x) if x.denominator == 1 else '%s/%s' % (
                x.numerator, x.denominator)
            parts.append('%s^{%s}' % (name, xs))
    return '\\,'.join(parts) if parts else '1'


def az_swap(cls, m, n, invert_hbar=True):
    """Express a class on the mirror variety in the original variables:
    a_j -> z_{m+1-j}, z_i -> a_{n+1-i}, and (optionally) hbar -> 1/hbar.
    Here m, n are the NS5/D5 counts of the ORIGINAL variety."""
    def conv(mono):
        e = {}
        for v, x in mono.e.items():
            if v[0] == 'a':
                e[z_var(m + 1 - v[1])] = x
            elif v[0] == 'z':
                e[a_var(n + 1 - v[1])] = x
            elif v == HBAR:
                e[HBAR] = -x if invert_hbar else x
            else:
                raise ValueError('unexpected variable %r in mirror class' %
                                 (v,))
        return Monomial(e)

    terms = []
    for t in cls.terms:
        terms.append(FlavorTerm(t.coeff, conv(t.pref),
                                [(conv(arg), p)
                                 for arg, p in t.factors.items()]))
    return FlavorClass(cls.flavor, terms)


def _inverse_class(cls):
    if len(cls.terms) != 1:
        raise ValueError('can only invert a single-term class')
    t = cls.terms[0]
    return FlavorClass(cls.flavor, [FlavorTerm(
        Fraction(1) / Fraction(t.coeff), t.pref.inv(),
        [(arg, -p) for arg, p in t.factors.items()])])


def _restricted_ratio(f, g, sigma, ws=None):
    """W_id(f)|_g / e(N^-_g) as a symbolic FlavorClass (E flavor).

    The denominator W_id(g)|_g is replaced by its closed form, the Euler
    class of the repelling part of the tangent space at g."""
    w = ws[f.fid] if ws else w_function(f, sigma, 'E')
    num = restrict_class(w, g).restricted_class()
    den = euler_class_at(g, sigma, 'E')
    return num.mul(_inverse_class(den))


def mirror_identity(r, c, f, g, points=20, q_list=(0.05, 0.1 + 0.1j, 0.3),
                    tol=1e-8, seed=1, invert_hbar=True, _caches=None):
    """Generate and certify the theta identity attached to a pair (f, g).

    LHS = W_id(f)|_g / W_id(g)|_g on X(r, c);
    RHS = (-1)^(#f + #g) W_id(g!)|_{f!} / W_id(f!)|_{f!} on the mirror
    variety.  The two sides are identified through the a-z swap
    a_i <-> z_{n+1-i}, z_i <-> a_{m+1-i} (and hbar -> 1/hbar); the identity
    LHS - RHS = 0 is certified numerically at random points and exported
    with denominators cleared, written in the mirror variety's variables.
    """
    diagram = r if isinstance(r, BraneDiagram) else BraneDiagram(r, c)
    sigma = _identity_perm(diagram.n)
    fps = enumerate_fixed_points(diagram, None)
    f = _as_fixed_point(diagram, f, fps)
    g = _as_fixed_point(diagram, g, fps)

    mf = mirror(f)
    mg = mirror(g)
    mdiag = mf.diagram
    msigma = _identity_perm(mdiag.n)
    mfps = enumerate_fixed_points(mdiag, None)
    mf = _as_fixed_point(mdiag, _find_fid(mfps, mf), mfps)
    mg = _as_fixed_point(mdiag, _find_fid(mfps, mg), mfps)

    if _caches is None:
        _caches = ({}, {})
    wcache, mwcache = _caches
    if f.fid not in wcache:
        wcache[f.fid] = w_function(f, sigma, 'E')
    if mg.fid not in mwcache:
        mwcache[mg.fid] = w_function(mg, msigma, 'E')

    sign = (-1) ** (crossings(f) + crossings(g))
    lhs_x = _restricted_ratio(f, g, sigma, ws=wcache)
    rhs_raw = _restricted_ratio(mg, mf, msigma, ws=mwcache)
    # Both sides are expressed in the mirror variety's variables: that is
    # where the cleared identity takes its natural printed form.
    lhs = az_swap(lhs_x, mdiag.m, mdiag.n, invert_hbar)
    rhs = rhs_raw
    if sign < 0:
        rhs = FlavorClass('E', [FlavorTerm(-t.coeff, t.pref,
                                           list(t.factors.items()))
                                for t in rhs.terms])

    # ---- numeric certification of LHS = RHS -----------------------------
    rng = random.Random(seed)
    worst = 0.0
    lhs_zero = rhs_zero = True
    for q in q_list:
        for _ in range(points):
            def both_at(pt):
                cache = {}
                lv, ls = _eval_class_scaled(lhs, pt, cache)
                rv, rs = _eval_class_scaled(rhs, pt, cache)
                return lv, rv, max(ls, rs, 1e-300)
            lv, rv, scale = _with_resample(rng, mdiag.n, mdiag.m, q,
                                           both_at)
            worst = max(worst, abs(lv - rv) / scale)
            if abs(lv) / scale > tol:
                lhs_zero = False
            if abs(rv) / scale > tol:
                rhs_zero = False
    certified = worst < tol
    trivially_zero = lhs_zero and rhs_zero

    terms = [] if trivially_zero else _expand_identity(lhs, rhs)

    cert = {'points': points, 'q_list': list(q_list), 'tol': tol,
            'max_residual': worst, 'certified': certified}
    if terms:
        cert['expanded_residual'] = _certify_expanded(
            terms, mdiag.n, mdiag.m, q_list, points, seed + 1)
        certified = certified and cert['expanded_residual'] < tol
        cert['certified'] = certified
    if not certified:
        raise RestrictionError(
            'mirror identity failed to certify: pair (%s, %s), residual %g'
            % (f.fid, g.fid, worst))

    return IdentityRecord(
        diagram.r, diagram.c, f.fid, g.fid, f.matrix, g.matrix, sign,
        trivially_zero, terms, lhs=lhs, rhs=rhs, certification=cert,
        hbar_inverted=invert_hbar)


def _expand_identity(lhs, rhs):
    """Cleared-denominator form of LHS - RHS = 0.

    Orient all theta arguments canonically, multiply through by the product
    of every denominator factor, merge equal terms, strip factors common to
    all terms, and normalize the global sign."""
    raw = []
    for cls, flip in ((lhs, 1), (rhs, -1)):
        for t in cls.terms:
            if not t.pref.is_one():
                raise RestrictionError(
                    'nontrivial monomial prefactor in identity term: %r'
                    % t.pref)
            coeff, fac = _orient_term(flip * Fraction(t.coeff),
                                      list(t.factors.items()))
            raw.append((coeff, fac))

    need = {}
    for _co, fac in raw:
        for arg, p in fac.items():
            if p < 0:
                k = _mono_key(arg)
                if -p > need.get(k, (0, None))[0]:
                    need[k] = (-p, arg)

    cleared = []
    for co, fac in raw:
        out = {_mono_key(a): [a, p] for a, p in fac.items()}
        for k, (p, arg) in need.items():
            if k in out:
                out[k][1] += p
            else:
                out[k] = [arg, p]
        cleared.append((co, {a: p for a, p in out.values() if p}))

    merged = {}
    for co, fac in cleared:
        key = tuple(sorted((_mono_key(a), p) for a, p in fac.items()))
        if key in merged:
            merged[key] = (merged[key][0] + co, merged[key][1])
        else:
            merged[key] = (co, fac)
    terms = [(co, fac) for co, fac in merged.values() if co != 0]
    if not terms:
        return []

    # strip common factors
    common = None
    for _co, fac in terms:
        cur = {_mono_key(a): (a, p) for a, p in fac.items()}
        if common is None:
            common = cur
        else:
            common = {k: (a, min(p, cur[k][1]))
                      for k, (a, p) in common.items() if k in cur}
    for k, (arg, p) in (common or {}).items():
        if p <= 0:
            continue
        for co, fac in terms:
            fac[arg] -= p
            if fac[arg] == 0:
                del fac[arg]

    terms.sort(key=lambda t: (sum(t[1].values()),
                              sorted((_mono_key(a), p)
                                     for a, p in t[1].items())))
    if terms[0][0] < 0:
        terms = [(-co, fac) for co, fac in terms]
    return terms


def _certify_expanded(terms, n_a, m_z, q_list, points, seed):
    rng = random.Random(seed)
    worst = 0.0
    for q in q_list:
        for _ in range(points):
            def expanded_at(pt):
                cache = {}
                total = 0
                scale = 0.0
                for co, fac in terms:
                    cls = FlavorClass('E', [FlavorTerm(co, None,
                                                       list(fac.items()))])
                    v = evaluate(cls, pt, theta_cache=cache)
                    total += v
                    scale = max(scale, abs(v))
                return abs(total) / max(scale, 1e-300)
            worst = max(worst, _with_resample(rng, n_a, m_z, q, expanded_at))
    return worst


# ---------------------------------------------------------------------------
# Fay normal form

def fay_normal_form(record, all_matches=False):
    """Match a 3-term-4-factor record against the trisecant normal form

        t(x3) t(y3) t(x1 y2) t(x2 / y1)
      + t(x1) t(y1) t(x2 y3) t(x3 / y2)
      + t(x2) t(y2) t(x3 y1) t(x1 / y3)  =  0,    x1 x2 x3 = y1 y2 y3 = 1,

    up to term order and theta orientation.  Returns {'x': (...), 'y': (...)}
    with Monomial entries (the lexicographically first valid assignment), or
    None if the record does not have this shape.  The parametrization is far
    from unique; all_matches=True returns every valid assignment."""
    if record.trivially_zero or record.term_count != 3:
        return None
    if any(n != 4 for n in record.factors_per_term):
        return None

    tfacs = []
    signs = []
    for co, fac in record.terms:
        if abs(co) != 1:
            return None
        lst = []
        for arg, p in fac.items():
            lst.extend([arg] * p)
        tfacs.append(lst)
        signs.append(1 if co > 0 else -1)

    matches = []
    for perm in itertools.permutations(range(3)):
        A, B, C = (tfacs[i] for i in perm)
        sA, sB, sC = (signs[i] for i in perm)
        for (x1, fx1), (y1, fy1), brest in _pick_two(B):
            for (x2, fx2), (y2, fy2), crest in _pick_two(C):
                x3 = (x1 * x2).inv()
                y3 = (y1 * y2).inv()
                mA = _match_multiset(A, [x3, y3, x1 * y2, x2 * y1.inv()])
                if mA is None:
                    continue
                mB = _match_multiset(brest, [x2 * y3, x3 * y2.inv()])
                if mB is None:
                    continue
                mC = _match_multiset(crest, [x3 * y1, x1 * y3.inv()])
                if mC is None:
                    continue
                # orientation flips must yield a consistent overall sign
                tA = sA * mA
                tB = sB * fx1 * fy1 * mB
                tC = sC * fx2 * fy2 * mC
                if not (tA == tB == tC):
                    continue
                matches.append(((x1, x2, x3), (y1, y2, y3)))
    seen = set()
    unique = []
    for x, y in matches:
        key = tuple(_mono_key(m) for m in x + y)
        if key not in seen:
            seen.add(key)
            unique.append((x, y))
    if not unique:
        return None if not all_matches else []
    unique.sort(key=lambda xy: ([_mono_key(m) for m in xy[0]],
                                [_mono_key(m) for m in xy[1]]))
    if all_matches:
        return [{'x': x, 'y': y} for x, y in unique]
    x, y = unique[0]
    return {'x': x, 'y': y}


def _pick_two(factors):
    """Ordered pairs of distinct positions with orientation choices, plus
    the remaining factors."""
    n = len(factors)
    for i, j in itertools.permutations(range(n), 2):
        rest = [factors[k] for k in range(n) if k not in (i, j)]
        for fi in (1, -1):
            for fj in (1, -1):
                u = factors[i] if fi > 0 else factors[i].inv()
                v = factors[j] if fj > 0 else factors[j].inv()
                yield (u, fi), (v, fj), rest


def _match_multiset(record_factors, wanted):
    """Match record factors against wanted monomials up to orientation.
    Returns the product of orientation-flip signs, or None."""
    if len(record_factors) != len(wanted):
        return None
    remaining = list(record_factors)
    sign = 1
    for w in wanted:
        wk = _mono_key(_orient(w)[0])
        hit = None
        for idx, rf in enumerate(remaining):
            if _mono_key(_orient(rf)[0]) == wk:
                hit = idx
                break
        if hit is None:
            return None
        rf = remaining.pop(hit)
        if rf.e != w.e:         # matched through an inversion
            sign = -sign
    return sign


# ---------------------------------------------------------------------------
# limits

def k_to_h(cls):
    """The leading-cohomological-degree shadow of a K class: multiplicative
    prefactors drop to 1 and every ahat(x) factor becomes the additive
    reading of its argument (exponents turn into coefficients)."""
    if cls.flavor != 'K':
        raise ValueError('k_to_h expects a K class')
    return FlavorClass('H', [
        FlavorTerm(t.coeff, None,
                   [(Lin.from_monomial(arg), p)
                    for arg, p in t.factors.items()])
        for t in cls.terms])


def limit_suite(r, c, sigma=None, slopes=None,
                q_list=(1e-2, 1e-3, 1e-4, 1e-8, 1e-12, 1e-16),
                points=2, tol=1e-6, seed=2, direction='up'):
    """Degeneration checks for every fixed point of X(r, c).

    E->K: pin the Kähler parameters to z_{i+1}/z_i = q^{-s_i} (direction
    'up'; 'down' uses z_i/z_{i+1} = q^{-s_i}) and drive q -> 0 along q_list;
    the relative deviation from W^K (same slopes) must decay monotonically
    and end below tol.  W is a plain product of theta factors, so double
    precision tracks the tiny q values without cancellation.

    K->H: the leading-degree shadow of W^K must equal W^H exactly in
    rational arithmetic.
    """
    diagram = r if isinstance(r, BraneDiagram) else BraneDiagram(r, c)
    sigma = sigma or _identity_perm(diagram.n)
    slopes = slopes or SlopeConfig.default(diagram.m)
    fps = enumerate_fixed_points(diagram, None)
    rng = random.Random(seed)

    per_point = []
    for f in fps:
        wk = w_function(f, sigma, 'K', slopes)
        we = w_function(f, sigma, 'E')
        wh = w_function(f, sigma, 'H')
        tvars = sorted(set(v for v in wk.cls.variables() if v[0] == 't') |
                       set(v for v in we.cls.variables() if v[0] == 't'))

        seqs = []
        for _ in range(points):
            logs = {a_var(j + 1): _rand_log(rng) for j in range(diagram.n)}
            logs[HBAR] = _rand_log(rng)
            for v in tvars:
                logs[v] = _rand_log(rng)
            vk = evaluate(wk.cls, EvalPoint(dict(logs), None))
            seq = []
            for q in q_list:
                lq = math.log(q)
                zl = dict(logs)
                zl[z_var(1)] = 0j
                for i in range(1, diagram.m):
                    step = -float(slopes.s[i - 1]) * lq
                    if direction != 'up':
                        step = -step
                    zl[z_var(i + 1)] = zl[z_var(i)] + step
                ve = evaluate(we.cls, EvalPoint(zl, q))
                seq.append(abs(ve - vk) / max(abs(vk), 1e-300))
            seqs.append(seq)

        vals = {a_var(j + 1): Fraction(rng.randrange(10 ** 3, 10 ** 5), 997)
                for j in range(diagram.n)}
        vals[HBAR] = Fraction(rng.randrange(10 ** 3, 10 ** 5), 991)
        for v in tvars:
            vals[v] = Fraction(rng.randrange(10 ** 3, 10 ** 5), 983)
        kh_equal = evaluate_h(k_to_h(wk.cls), vals) == \
            evaluate_h(wh.cls, vals)

        worst_seq = max(seqs, key=lambda s: s[-1])
        per_point.append({
            'f': f.fid,
            'ek_residuals': worst_seq,
            'ek_monotone': all(worst_seq[i + 1] < worst_seq[i]
                               for i in range(len(worst_seq) - 1)),
            'ek_final': worst_seq[-1],
            'kh_exact': kh_equal,
        })

    report = {
        'r': tuple(diagram.r), 'c': tuple(diagram.c),
        'q_list': list(q_list), 'direction': direction,
        'slopes': [str(s) for s in slopes.s],
        'per_point': per_point,
        'ek_monotone': all(p['ek_monotone'] for p in per_point),
        'ek_final_max': max(p['ek_final'] for p in per_point),
        'kh_exact': all(p['kh_exact'] for p in per_point),
    }
    report['passed'] = (report['ek_monotone'] and report['kh_exact']
                        and report['ek_final_max'] < tol)
    return report


def _rand_log(rng):
    return complex(math.log(rng.uniform(0.6, 1.6)),
                   rng.uniform(-math.pi, math.pi))


# ---------------------------------------------------------------------------
# sweep

def _compositions(total, max_parts):
    for k in range(1, max_parts + 1):
        for cuts in itertools.combinations(range(1, total), k - 1):
            bounds = (0,) + cuts + (total,)
            yield tuple(bounds[i + 1] - bounds[i] for i in range(k))


def sweep(max_m, max_n, max_boxes, points=3, q_list=(0.1,), tol=1e-7,
          seed=0, max_fixed_points=12, max_subset=4):
    """Enumerate small varieties, certify the mirror identity for every
    ordered pair of fixed points, and tabulate the sizes (term count,
    theta factors per term) of the irreducible nontrivial identities.

    An identity is counted as irreducible when no proper subset of at most
    `max_subset` of its terms already sums to zero numerically; the label is
    heuristic.  Returns a report with a (terms, factors) -> count table.
    """
    rng = random.Random(seed)
    table = {}
    rows = []
    for boxes in range(1, max_boxes + 1):
        for r in _compositions(boxes, max_m):
            for c in _compositions(boxes, max_n):
                diagram = BraneDiagram(r, c)
                fps = enumerate_fixed_points(diagram, None)
                if len(fps) < 2 or len(fps) > max_fixed_points:
                    continue
                caches = ({}, {})
                for f in fps:
                    for g in fps:
                        if f.fid == g.fid:
                            continue
                        rec = mirror_identity(
                            diagram, None, f, g, points=points,
                            q_list=q_list, tol=tol,
                            seed=rng.randrange(10 ** 6), _caches=caches)
                        if rec.trivially_zero or rec.term_count < 2:
                            continue
                        fpt = rec.factors_per_term
                        if len(set(fpt)) != 1:
                            shape = (rec.term_count, max(fpt))
                        else:
                            shape = (rec.term_count, fpt[0])
                        irred = _is_irreducible(rec, rng, q_list[0],
                                                max_subset)
                        rows.append({'r': list(r), 'c': list(c),
                                     'f': f.fid, 'g': g.fid,
                                     'terms': shape[0], 'factors': shape[1],
                                     'irreducible': irred})
                        if irred:
                            table[shape] = table.get(shape, 0) + 1
    return {'max_m': max_m, 'max_n': max_n, 'max_boxes': max_boxes,
            'table': table, 'identities': rows}


def _is_irreducible(record, rng, q, max_subset):
    n = record.term_count
    if n <= 2:
        return True
    vals = []
    for _ in range(2):
        def terms_at(pt):
            cache = {}
            return [evaluate(FlavorClass('E', [FlavorTerm(
                co, None, list(fac.items()))]), pt, theta_cache=cache)
                for co, fac in record.terms]
        vals.append(_with_resample(rng, len(record.r), len(record.c), q,
                                   terms_at))
    for size in range(2, min(max_subset, n - 1) + 1):
        for sub in itertools.combinations(range(n), size):
            ok = True
            for v in vals:
                scale = max(abs(v[i]) for i in sub)
                if abs(sum(v[i] for i in sub)) / max(scale, 1e-300) > 1e-8:
                    ok = False
                    break
            if ok:
                return False
    return True
