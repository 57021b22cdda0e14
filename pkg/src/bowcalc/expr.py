"""Symbolic expression layer.

Variables are hashable tuples:

    ('t', k, i)   Chern roots, k <= 0, 1 <= i <= d_k
    ('a', j)      equivariant / framing parameters, 1-based
    ('z', j)      Kaehler parameters, 1-based
    ('h',)        hbar

A Monomial is a Laurent monomial with exact rational exponents (the only
non-integer exponents that actually occur are half-integers from the K-flavor
slope prefactors; serialization doubles them into integers).

Three "flavors" share one term structure:

    E  factors are theta(arg), arg a Monomial
    K  factors are ahat(arg) = arg^{1/2} - arg^{-1/2}, arg a Monomial
    H  factors are linear forms (additive reading of a monomial argument)

A FlavorTerm is coeff * prefactor * prod(factor^power); a FlavorClass is a
list of terms.  Everything is immutable-by-convention (we never mutate a
stored dict after construction).
"""

from __future__ import annotations

import cmath
import math
import os
from fractions import Fraction

HBAR = ('h',)


def t_var(k, i):
    return ('t', k, i)


def a_var(j):
    return ('a', j)


def z_var(j):
    return ('z', j)


def var_name(v):
    if v[0] == 't':
        return 't_{%d,%d}' % (v[1], v[2])
    if v[0] == 'h':
        return 'hbar'
    return '%s_%d' % (v[0], v[1])


def _var_sort_key(v):
    order = {'t': 0, 'a': 1, 'z': 2, 'h': 3}
    return (order[v[0]],) + tuple(v[1:])


class Monomial:
    """Laurent monomial: dict variable -> Fraction exponent (no zeros stored)."""

    __slots__ = ('e', '_hash')

    def __init__(self, e=None):
        d = {}
        if e:
            for v, x in e.items():
                x = x if isinstance(x, Fraction) else Fraction(x)
                if x != 0:
                    d[v] = x
        self.e = d
        self._hash = None

    @staticmethod
    def var(v, exp=1):
        return Monomial({v: Fraction(exp)})

    @staticmethod
    def one():
        return Monomial()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.e.items()))
        return self._hash

    def __eq__(self, other):
        return isinstance(other, Monomial) and self.e == other.e

    def __mul__(self, other):
        d = dict(self.e)
        for v, x in other.e.items():
            y = d.get(v, 0) + x
            if y:
                d[v] = y
            elif v in d:
                del d[v]
        m = Monomial()
        m.e = d
        return m

    def __pow__(self, p):
        p = p if isinstance(p, Fraction) else Fraction(p)
        if p == 0:
            return Monomial()
        m = Monomial()
        m.e = {v: x * p for v, x in self.e.items()}
        return m

    def inv(self):
        return self ** -1

    def is_one(self):
        return not self.e

    def subs(self, mapping):
        """Multiplicative substitution; mapping: var -> Monomial (partial)."""
        out = Monomial()
        for v, x in self.e.items():
            rep = mapping.get(v)
            if rep is None:
                out = out * Monomial({v: x})
            else:
                out = out * (rep ** x)
        return out

    def rename(self, varmap):
        m = Monomial()
        m.e = {varmap.get(v, v): x for v, x in self.e.items()}
        return m

    def t_part(self):
        """Exponents restricted to t-variables (a tuple-sorted dict)."""
        return {v: x for v, x in self.e.items() if v[0] == 't'}

    def __repr__(self):
        if not self.e:
            return '1'
        bits = []
        for v in sorted(self.e, key=_var_sort_key):
            x = self.e[v]
            bits.append(var_name(v) if x == 1 else '%s^%s' % (var_name(v), x))
        return '*'.join(bits)

    def to_json(self):
        out = {}
        for v, x in sorted(self.e.items(), key=lambda kv: _var_sort_key(kv[0])):
            dx = 2 * x
            if dx.denominator != 1:
                raise ValueError('exponent %s is not a half-integer' % x)
            out['/'.join(str(p) for p in v)] = int(dx)
        return out

    @staticmethod
    def from_json(d):
        e = {}
        for key, dx in d.items():
            parts = key.split('/')
            v = (parts[0],) + tuple(int(p) for p in parts[1:])
            e[v] = Fraction(dx, 2)
        return Monomial(e)


class Lin:
    """Linear form sum(coeff * var) -- the additive (cohomology) atom."""

    __slots__ = ('c', '_hash')

    def __init__(self, c=None):
        d = {}
        if c:
            for v, x in c.items():
                x = x if isinstance(x, Fraction) else Fraction(x)
                if x != 0:
                    d[v] = x
        self.c = d
        self._hash = None

    @staticmethod
    def from_monomial(m):
        """Additive reading: a_j * hbar^{-s}  ->  a_j - s*hbar."""
        return Lin(dict(m.e))

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.c.items()))
        return self._hash

    def __eq__(self, other):
        return isinstance(other, Lin) and self.c == other.c

    def __neg__(self):
        l = Lin()
        l.c = {v: -x for v, x in self.c.items()}
        return l

    def __add__(self, other):
        d = dict(self.c)
        for v, x in other.c.items():
            y = d.get(v, 0) + x
            if y:
                d[v] = y
            elif v in d:
                del d[v]
        l = Lin()
        l.c = d
        return l

    def scale(self, s):
        s = Fraction(s)
        l = Lin()
        if s != 0:
            l.c = {v: x * s for v, x in self.c.items()}
        return l

    def is_zero(self):
        return not self.c

    def subs(self, mapping):
        """Additive substitution; mapping: var -> Lin (partial)."""
        out = Lin()
        for v, x in self.c.items():
            rep = mapping.get(v)
            if rep is None:
                out = out + Lin({v: x})
            else:
                out = out + rep.scale(x)
        return out

    def rename(self, varmap):
        l = Lin()
        l.c = {varmap.get(v, v): x for v, x in self.c.items()}
        return l

    def t_part(self):
        return {v: x for v, x in self.c.items() if v[0] == 't'}

    def __repr__(self):
        if not self.c:
            return '0'
        bits = []
        for v in sorted(self.c, key=_var_sort_key):
            x = self.c[v]
            s = var_name(v) if x == 1 else ('-' + var_name(v) if x == -1
                                            else '%s*%s' % (x, var_name(v)))
            bits.append(s)
        out = bits[0]
        for b in bits[1:]:
            out += b if b.startswith('-') else '+' + b
        return out

    def to_json(self):
        out = {}
        for v, x in sorted(self.c.items(), key=lambda kv: _var_sort_key(kv[0])):
            dx = 2 * x
            if dx.denominator != 1:
                raise ValueError('coefficient %s not half-integral' % x)
            out['/'.join(str(p) for p in v)] = int(dx)
        return out

    @staticmethod
    def from_json(d):
        c = {}
        for key, dx in d.items():
            parts = key.split('/')
            v = (parts[0],) + tuple(int(p) for p in parts[1:])
            c[v] = Fraction(dx, 2)
        return Lin(c)


class FlavorTerm:
    """coeff * prefactor * prod(atom(arg)^power).

    factors is a dict arg -> integer power; arg is a Monomial (E/K) or Lin (H).
    Identical args merge by adding powers (this is how e.g. theta(hbar) from a
    one-tie cancels against the tau factor's theta(hbar)^{-1}).
    """

    __slots__ = ('coeff', 'pref', 'factors')

    def __init__(self, coeff=1, pref=None, factors=None):
        self.coeff = coeff if isinstance(coeff, Fraction) else Fraction(coeff)
        self.pref = pref if pref is not None else Monomial()
        f = {}
        if factors:
            items = factors.items() if isinstance(factors, dict) else factors
            for arg, p in items:
                q = f.get(arg, 0) + p
                if q:
                    f[arg] = q
                elif arg in f:
                    del f[arg]
        self.factors = f

    def mul(self, other):
        t = FlavorTerm(self.coeff * other.coeff, self.pref * other.pref,
                       dict(self.factors))
        for arg, p in other.factors.items():
            q = t.factors.get(arg, 0) + p
            if q:
                t.factors[arg] = q
            elif arg in t.factors:
                del t.factors[arg]
        return t

    def rename(self, varmap):
        return FlavorTerm(self.coeff, self.pref.rename(varmap),
                          [(arg.rename(varmap), p)
                           for arg, p in self.factors.items()])

    def __repr__(self):
        bits = [] if self.coeff == 1 else [str(self.coeff)]
        if not self.pref.is_one():
            bits.append(repr(self.pref))
        for arg, p in self.factors.items():
            s = '(%s)' % arg
            if p != 1:
                s += '^%d' % p
            bits.append(s)
        return '*'.join(bits) if bits else '1'


class FlavorClass:
    """flavor in {'H','K','E'}; terms: list of FlavorTerm."""

    __slots__ = ('flavor', 'terms')

    def __init__(self, flavor, terms=None):
        self.flavor = flavor
        self.terms = list(terms) if terms else []

    @staticmethod
    def one(flavor):
        return FlavorClass(flavor, [FlavorTerm()])

    @staticmethod
    def zero(flavor):
        return FlavorClass(flavor, [])

    def mul(self, other):
        if self.flavor != other.flavor:
            raise ValueError('flavor mismatch %s/%s' % (self.flavor, other.flavor))
        return FlavorClass(self.flavor,
                           [t1.mul(t2) for t1 in self.terms for t2 in other.terms])

    def add(self, other):
        if self.flavor != other.flavor:
            raise ValueError('flavor mismatch')
        return FlavorClass(self.flavor, self.terms + other.terms)

    def rename(self, varmap):
        return FlavorClass(self.flavor, [t.rename(varmap) for t in self.terms])

    def variables(self):
        vs = set()
        for t in self.terms:
            vs.update(t.pref.e)
            for arg in t.factors:
                vs.update(arg.e if isinstance(arg, Monomial) else arg.c)
        return vs

    def __repr__(self):
        if not self.terms:
            return '0'
        return ' + '.join(repr(t) for t in self.terms)

    def to_json(self):
        kind = {'E': 'theta', 'K': 'ahat', 'H': 'linear'}[self.flavor]
        terms = []
        for t in self.terms:
            terms.append({
                'coeff': [t.coeff.numerator, t.coeff.denominator],
                'prefactor': t.pref.to_json(),
                'factors': [{'kind': kind, 'arg': arg.to_json(), 'power': p}
                            for arg, p in t.factors.items()],
            })
        return {'flavor': self.flavor, 'terms': terms}

    @staticmethod
    def from_json(d):
        flavor = d['flavor']
        terms = []
        for td in d['terms']:
            coeff = Fraction(td['coeff'][0], td['coeff'][1])
            pref = Monomial.from_json(td['prefactor'])
            facs = []
            for fd in td['factors']:
                if fd['kind'] == 'linear':
                    facs.append((Lin.from_json(fd['arg']), fd['power']))
                else:
                    facs.append((Monomial.from_json(fd['arg']), fd['power']))
            terms.append(FlavorTerm(coeff, pref, facs))
        return FlavorClass(flavor, terms)


# ---------------------------------------------------------------------------
# substitutions

class Substitution:
    """Map from t-variables to Monomials (multiplicative reading).

    The additive (H flavor) view is derived on demand via Lin.from_monomial.
    """

    def __init__(self, table):
        self.table = dict(table)

    def additive(self):
        return {v: Lin.from_monomial(m) for v, m in self.table.items()}

    def items(self):
        return self.table.items()

    def get(self, v):
        return self.table.get(v)

    def __repr__(self):
        bits = ['%s -> %s' % (var_name(v), m)
                for v, m in sorted(self.table.items(),
                                   key=lambda kv: _var_sort_key(kv[0]))]
        return '{' + ', '.join(bits) + '}'


def apply_substitution(cls, sub):
    """Rewrite every atom argument and prefactor.  Structural zeros (trivial
    monomial argument / zero linear form) are kept in place, not simplified;
    restriction logic counts them."""
    if isinstance(sub, Substitution):
        table = sub.table
    else:
        table = dict(sub)
    out_terms = []
    add = None
    if cls.flavor == 'H':
        add = {v: Lin.from_monomial(m) for v, m in table.items()}
    for t in cls.terms:
        if cls.flavor == 'H':
            facs = [(arg.subs(add), p) for arg, p in t.factors.items()]
            pref = t.pref.subs(table)
        else:
            facs = [(arg.subs(table), p) for arg, p in t.factors.items()]
            pref = t.pref.subs(table)
        out_terms.append(FlavorTerm(t.coeff, pref, facs))
    return FlavorClass(cls.flavor, out_terms)


def z_shift(cls, charges):
    """z_k -> hbar^{-c_k} z_k, i.e. every z_k-exponent e contributes -c_k*e to
    the hbar exponent.  charges: list/tuple, 1-based conceptually (charges[k-1]).
    No-op on H and K flavors."""
    if cls.flavor != 'E':
        return cls
    if not any(charges):
        return cls

    def shift_mono(m):
        dh = Fraction(0)
        for v, x in m.e.items():
            if v[0] == 'z' and v[1] <= len(charges):
                dh -= charges[v[1] - 1] * x
        if dh == 0:
            return m
        return m * Monomial({HBAR: dh})

    out = []
    for t in cls.terms:
        facs = [(shift_mono(arg), p) for arg, p in t.factors.items()]
        out.append(FlavorTerm(t.coeff, shift_mono(t.pref), facs))
    return FlavorClass(cls.flavor, out)


# ---------------------------------------------------------------------------
# numeric evaluation

class ResampleNeeded(Exception):
    """A denominator atom came within the guard distance of zero."""


def _use_mp():
    return os.environ.get('BOWCALC_PRECISION', 'double') == 'extended'


def _exp(x):
    if _use_mp():
        import mpmath
        return mpmath.exp(x)
    return cmath.exp(x)


def theta_eval(x, q, tol=1e-14, logx=None):
    """theta(x) = (x^{1/2} - x^{-1/2}) prod_{n>0} (1-q^n x)(1-q^n/x), truncated.

    The square root is taken from the supplied log branch (principal log of x
    if logx is None).  Truncation: smallest N with |q|^N * max(|x|,1/|x|) < tol,
    capped at 512.
    """
    if q is not None and abs(q) >= 1:
        raise ValueError('|q| must be < 1')
    if logx is None:
        if x == 0:
            raise ValueError('theta at x=0')
        logx = cmath.log(x)
    else:
        x = _exp(logx)
    val = _exp(logx / 2) - _exp(-logx / 2)
    if q == 0 or q is None:
        return val
    ax = abs(x)
    big = max(ax, 1.0 / ax)
    aq = abs(q)
    n = 1
    qn = q
    while n <= 512 and aq ** n * big >= tol:
        val = val * (1 - qn * x) * (1 - qn / x)
        qn = qn * q
        n += 1
    # one more factor pair for safety margin at the boundary
    val = val * (1 - qn * x) * (1 - qn / x)
    return val


def ahat_eval(x=None, logx=None):
    if logx is None:
        logx = cmath.log(x)
    return _exp(logx / 2) - _exp(-logx / 2)


class EvalPoint:
    """Numeric evaluation context for the multiplicative flavors.

    logs: dict var -> complex log of the value (fixes every branch once);
    q: nome (|q| < 1) or None/0 for the K flavor; tol: theta truncation.
    """

    def __init__(self, logs, q=None, tol=1e-14, guard=1e-6):
        self.logs = dict(logs)
        self.q = q
        self.tol = tol
        self.guard = guard

    def extended(self, more_logs):
        logs = dict(self.logs)
        logs.update(more_logs)
        return EvalPoint(logs, self.q, self.tol, self.guard)

    def value(self, mono):
        return _exp(self.logm(mono))

    def logm(self, mono):
        s = 0
        for v, x in mono.e.items():
            s += float(x) * self.logs[v]
        return s


def random_point(rng, n_a, m_z, q=None, tol=1e-14, mod_range=(0.6, 1.6)):
    """Random evaluation point: moduli uniform in mod_range, phases uniform."""
    logs = {}
    names = [a_var(j) for j in range(1, n_a + 1)] + \
            [z_var(j) for j in range(1, m_z + 1)] + [HBAR]
    for v in names:
        r = rng.uniform(*mod_range)
        ph = rng.uniform(-math.pi, math.pi)
        logs[v] = complex(math.log(r), ph)
    return EvalPoint(logs, q=q, tol=tol)


def evaluate(cls, pt, sub=None, theta_cache=None):
    """Evaluate a FlavorClass at an EvalPoint (E/K flavors).

    sub, if given, is applied first.  Raises ResampleNeeded when a denominator
    atom is within pt.guard of zero.
    """
    if cls.flavor == 'H':
        return evaluate_h(cls, pt if isinstance(pt, dict) else pt.logs, sub)
    if sub is not None:
        cls = apply_substitution(cls, sub)
    cache = theta_cache if theta_cache is not None else {}
    total = 0
    for t in cls.terms:
        val = complex(t.coeff) * _exp(pt.logm(t.pref))
        for arg, p in t.factors.items():
            key = arg
            av = cache.get(key)
            if av is None:
                lx = pt.logm(arg)
                if cls.flavor == 'E':
                    av = theta_eval(None, pt.q, pt.tol, logx=lx)
                else:
                    av = ahat_eval(logx=lx)
                cache[key] = av
            if p < 0 and abs(av) < pt.guard:
                raise ResampleNeeded(repr(arg))
            val *= av ** p
        total += val
    return total


def evaluate_h(cls, values, sub=None):
    """Evaluate an H-flavor class.  values: dict var -> number (Fraction for
    exact work, complex for numeric); additive semantics throughout except the
    prefactor, which is a genuine monomial in the values."""
    if sub is not None:
        cls = apply_substitution(cls, sub)
    total = 0
    for t in cls.terms:
        val = Fraction(t.coeff) if all(
            isinstance(x, Fraction) for x in values.values()) else complex(t.coeff)
        for v, x in t.pref.e.items():
            if x.denominator != 1:
                raise ValueError('non-integer H prefactor power')
            val *= values[v] ** int(x)
        for arg, p in t.factors.items():
            av = sum(values[v] * x for v, x in arg.c.items())
            if av == 0:
                raise ZeroDivisionError('structural zero in direct H evaluation')
            val *= av ** p
        total += val
    return total
