"""Combinatorics of type-A bow varieties.

Conventions:
  * NS5 branes Z_1..Z_m are indexed right-to-left, D5 branes A_1..A_n
    left-to-right.  Charges r_i (NS5) and c_j (D5).
  * The dimension vector d: d_0 = sum(r) = sum(c), d_{-i} = d_{-i+1} - r_i for
    i >= 1 (left side), d_k = d_{k-1} - c_k for k >= 1 (right side).
  * Torus fixed points are 01-matrices with margins (r, c) ("binary
    contingency tables"), equivalently tie diagrams {(k, l) : T[k][l] = 1}.

The text parser enforces positive charges; the library layer deliberately
accepts zero charges (several standard small examples need r entries 0).
"""

from __future__ import annotations

import re
from fractions import Fraction
from itertools import combinations

from .expr import HBAR, Lin, Monomial, Substitution, a_var, t_var


class InputError(ValueError):
    """Malformed user-facing input (CLI exit code 3)."""


class BraneDiagram:
    """A separated type-A brane diagram, named by its charge vectors."""

    def __init__(self, r, c):
        self.r = tuple(int(x) for x in r)
        self.c = tuple(int(x) for x in c)
        if any(x < 0 for x in self.r) or any(x < 0 for x in self.c):
            raise InputError('negative charge')
        if sum(self.r) != sum(self.c):
            raise InputError('sum(r) != sum(c)')
        self.m = len(self.r)
        self.n = len(self.c)
        self.d0 = sum(self.r)
        # left dims: dminus[i] = d_{-i}, i = 0..m  (dminus[m] == 0)
        dm = [self.d0]
        for ri in self.r:
            dm.append(dm[-1] - ri)
        # right dims: dplus[k] = d_k, k = 0..n (dplus[n] == 0)
        dp = [self.d0]
        for cj in self.c:
            dp.append(dp[-1] - cj)
        if any(x < 0 for x in dm) or any(x < 0 for x in dp) or dm[-1] or dp[-1]:
            raise InputError('inconsistent multiplicities for charges r=%s c=%s'
                             % (self.r, self.c))
        self.dminus = tuple(dm)
        self.dplus = tuple(dp)

    @property
    def dims(self):
        """Left dimension vector as used by t-variables: dims[i] = d_{-i}."""
        return self.dminus

    def d(self, k):
        """d_k for -m <= k <= n."""
        return self.dminus[-k] if k <= 0 else self.dplus[k]

    def __eq__(self, other):
        return isinstance(other, BraneDiagram) and (self.r, self.c) == (other.r, other.c)

    def __hash__(self):
        return hash((self.r, self.c))

    def __repr__(self):
        return 'BraneDiagram(r=%s, c=%s)' % (self.r, self.c)

    def text(self):
        seq = []
        dm = self.dminus
        for i in range(self.m):
            seq.append('/%d' % dm[self.m - 1 - i])
        dp = self.dplus
        for k in range(1, self.n):
            seq.append('\\%d' % dp[k])
        seq.append('\\')
        return ''.join(seq)


_DIAGRAM_RE = re.compile(r'^(?:/\-?\d+)+(?:\\\-?\d+)*\\$')


def parse_brane_diagram(text):
    """Parse either the slash form "/1/3/4/5\\3\\1\\" (integers are D3
    multiplicities) or the charge form "r=1,1,2,1;c=2,2,1".

    Positive-charge and separatedness assumptions are enforced here.
    """
    text = text.strip().replace(' ', '')
    if text.startswith('r='):
        m = re.match(r'^r=([\d,]+);c=([\d,]+)$', text)
        if not m:
            raise InputError('bad charge form: %r' % text)
        r = [int(x) for x in m.group(1).split(',')]
        c = [int(x) for x in m.group(2).split(',')]
        if any(x <= 0 for x in r + c):
            raise InputError('charges must be positive')
        return BraneDiagram(r, c)
    if '\\' in text and '/' in text and text.index('\\') < text.rindex('/'):
        raise InputError('diagram is not separated (a / occurs after a \\)')
    if not _DIAGRAM_RE.match(text):
        raise InputError('malformed brane diagram: %r' % text)
    # multiplicities: between consecutive branes
    tokens = re.findall(r'([/\\])(\-?\d*)', text)
    mult = []
    kinds = []
    for kind, num in tokens:
        kinds.append(kind)
        if num != '':
            mult.append(int(num))
    m = kinds.count('/')
    n = kinds.count('\\')
    # mult has one entry per gap: m + n - 1 entries (nothing outside the ends)
    if len(mult) != m + n - 1:
        raise InputError('multiplicity count mismatch')
    if any(x < 0 for x in mult):
        raise InputError('negative multiplicity')
    left = [0] + mult[:m]          # d_{-m}..d_0 reading left to right
    right = mult[m - 1:] + [0]     # d_0..d_n
    r = [left[i + 1] - left[i] for i in range(m)][::-1]
    c = [right[k] - right[k + 1] for k in range(n)]
    if any(x <= 0 for x in r) or any(x <= 0 for x in c):
        raise InputError('non-positive fivebrane charge (non-monotone multiplicities)')
    diag = BraneDiagram(r, c)
    return diag


class FixedPoint:
    """A fixed point = 01-matrix with margins (r, c) = tie diagram."""

    def __init__(self, diagram, matrix, fid=None):
        self.diagram = diagram
        self.matrix = tuple(tuple(int(x) for x in row) for row in matrix)
        if len(self.matrix) != diagram.m or any(len(row) != diagram.n
                                                for row in self.matrix):
            raise InputError('matrix shape mismatch')
        for i, row in enumerate(self.matrix):
            if sum(row) != diagram.r[i]:
                raise InputError('row sum mismatch at NS5 %d' % (i + 1))
        for j in range(diagram.n):
            if sum(row[j] for row in self.matrix) != diagram.c[j]:
                raise InputError('column sum mismatch at D5 %d' % (j + 1))
        self.fid = fid

    @property
    def ties(self):
        """Tie set as 1-based (k, l) pairs, k = NS5 index, l = D5 index."""
        return [(i + 1, j + 1) for i, row in enumerate(self.matrix)
                for j, x in enumerate(row) if x]

    def __eq__(self, other):
        return isinstance(other, FixedPoint) and self.matrix == other.matrix \
            and self.diagram == other.diagram

    def __hash__(self):
        return hash((self.diagram, self.matrix))

    def __repr__(self):
        rows = [''.join(str(x) for x in row) for row in self.matrix]
        tag = 'f%s ' % self.fid if self.fid else ''
        return '%s[%s]' % (tag, '|'.join(rows))


def _gale_ryser_feasible(row_sums, col_sums):
    """Existence of a 01-matrix with the given margins."""
    if sum(row_sums) != sum(col_sums):
        return False
    n = len(col_sums)
    if any(x < 0 or x > n for x in row_sums):
        return False
    rows = sorted(row_sums, reverse=True)
    cols = sorted(col_sums, reverse=True)
    if any(x < 0 for x in cols):
        return False
    for k in range(1, len(rows) + 1):
        lhs = sum(rows[:k])
        rhs = sum(min(cj, k) for cj in cols)
        if lhs > rhs:
            return False
    return True


def enumerate_fixed_points(r, c):
    """All 01-matrices with margins (r, c), deterministic order.

    Rows are filled top-down; candidate rows are tried in lexicographic order
    with 1 sorting before 0 (i.e. leftmost-packed first), giving a stable
    row-major order and hence stable 1-based IDs.
    """
    diag = r if isinstance(r, BraneDiagram) else BraneDiagram(r, c)
    m, n = diag.m, diag.n
    out = []
    matrix = []

    def rec(i, rem_cols):
        if i == m:
            out.append([row[:] for row in matrix])
            return
        ri = diag.r[i]
        avail = [j for j in range(n) if rem_cols[j] > 0]
        if len(avail) < ri:
            return
        for pick in combinations(avail, ri):
            row = [0] * n
            new_rem = list(rem_cols)
            for j in pick:
                row[j] = 1
                new_rem[j] -= 1
            if not _gale_ryser_feasible(diag.r[i + 1:], new_rem):
                continue
            matrix.append(row)
            rec(i + 1, new_rem)
            matrix.pop()

    rec(0, list(diag.c))
    return [FixedPoint(diag, mat, fid=i + 1) for i, mat in enumerate(out)]


def crossings(f):
    """#f = number of tie pairs (k,l),(k',l') with (k-k')(l-l') < 0."""
    ties = f.ties
    cnt = 0
    for x in range(len(ties)):
        k, l = ties[x]
        for y in range(x + 1, len(ties)):
            kp, lp = ties[y]
            if (k - kp) * (l - lp) < 0:
                cnt += 1
    return cnt


def mirror(f):
    """The 3d-mirror fixed point: T!_{i,j} = 1 - T_{n+1-j, m+1-i}."""
    diag = f.diagram
    m, n = diag.m, diag.n
    T = f.matrix
    mat = [[1 - T[m - 1 - j][n - 1 - i] for j in range(m)] for i in range(n)]
    r_bang = [m - diag.c[n - 1 - i] for i in range(n)]
    c_bang = [n - diag.r[m - 1 - i] for i in range(m)]
    return FixedPoint(BraneDiagram(r_bang, c_bang), mat)


def decorations(f, k):
    """Decoration multiset over D3 brane X_k (k <= 0): list of Monomials
    a_l * hbar^{-e}, canonically sorted by (l, e).

    A tie (k', l) covers X_k for k <= 0 iff k' >= 1 - k; it contributes
    e = (rank of the tie among ties at A_l, longest = largest k' first,
    0-based) + (-k) (one /hbar per NS5 brane crossed walking left)."""
    diag = f.diagram
    out = []
    for l in range(1, diag.n + 1):
        col = sorted((kp for kp, lp in f.ties if lp == l), reverse=True)
        for pos, kp in enumerate(col):
            if kp >= 1 - k:
                out.append((l, pos - k))
    out.sort()
    return [Monomial({a_var(l): 1, HBAR: -e}) for l, e in out]


def restriction_substitution(f):
    """The substitution phi_f: t_{k,i} -> decoration, k <= 0.

    For k < 0 the order within a level is the canonical sorted one (all
    consumers are symmetric there); the k = 0 slots also get the canonical
    order here -- stab.w_function replaces them via the chamber-ordered
    substitution before restriction ever happens."""
    diag = f.diagram
    table = {}
    for i in range(0, diag.m + 1):
        k = -i
        decs = decorations(f, k)
        if len(decs) != diag.d(k):
            raise InputError('decoration count mismatch at level %d' % k)
        for idx, mono in enumerate(decs):
            table[t_var(k, idx + 1)] = mono
    return Substitution(table)


# ---------------------------------------------------------------------------
# characters

class CharacterSum(dict):
    """Formal Z-linear combination of Monomials in {a_j, hbar}."""

    def add(self, mono, mult=1):
        x = self.get(mono, 0) + mult
        if x:
            self[mono] = x
        elif mono in self:
            del self[mono]

    def __iadd__(self, other):
        for m, x in other.items():
            self.add(m, x)
        return self

    def __isub__(self, other):
        for m, x in other.items():
            self.add(m, -x)
        return self

    def rank(self):
        return sum(self.values())

    def scaled(self, mono):
        out = CharacterSum()
        for m, x in self.items():
            out.add(m * mono, x)
        return out

    def __repr__(self):
        if not self:
            return '0'
        bits = []
        for m in sorted(self, key=lambda m: sorted(m.e.items())):
            x = self[m]
            bits.append(('%+d*%s' % (x, m)) if x != 1 else '+%s' % m)
        return ' '.join(bits)


def _hom(A, B):
    """Character of Hom(A, B) = sum b/a for decoration multisets A, B."""
    ch = CharacterSum()
    for a in A:
        ai = a.inv()
        for b in B:
            ch.add(b * ai)
    return ch


def trivialized_xi(c, k):
    """xi_k for k >= 0 from the D5-side trivialization:
    direct sum over j > k of a_j, a_j/hbar, ..., a_j/hbar^{c_j-1}."""
    out = []
    for j in range(k + 1, len(c) + 1):
        for i in range(c[j - 1]):
            out.append(Monomial({a_var(j): 1, HBAR: -i}))
    return out


def ns5_tangent_character(f):
    """T_NS5 X at f: sum over k <= 0 of hbar*Hom(xi_k, xi_{k-1}) + Hom(xi_{k-1},
    xi_k) minus (1+hbar)*End(xi_k) for k < 0, in restricted decorations."""
    diag = f.diagram
    xi = {k: decorations(f, k) for k in range(-diag.m, 1)}
    hb = Monomial({HBAR: 1})
    ch = CharacterSum()
    for k in range(-diag.m + 1, 1):
        ch += _hom(xi[k], xi[k - 1]).scaled(hb)
        ch += _hom(xi[k - 1], xi[k])
    for k in range(-diag.m, 0):
        e = _hom(xi[k], xi[k])
        ch -= e
        ch -= e.scaled(hb)
    return ch


def d5_tangent_character(c, f=None):
    """T_D5 X(d^+) in the trivialized form; depends only on the D5 charges c
    when evaluated with the trivialization (f is accepted for symmetry)."""
    n = len(c)
    xi = {k: trivialized_xi(c, k) for k in range(0, n + 1)}
    hb = Monomial({HBAR: 1})
    ch = CharacterSum()
    for k in range(1, n + 1):
        Ca = [Monomial({a_var(k): 1})]
        ch += _hom(Ca, xi[k - 1])
        ch += _hom(xi[k], Ca).scaled(hb)
        hom = _hom(xi[k], xi[k - 1])
        ch += hom
        ch -= hom.scaled(hb)
        ch += _hom(xi[k - 1], xi[k - 1]).scaled(hb)
        ch += _hom(xi[k], xi[k]).scaled(hb)
    for k in range(0, n + 1):
        e = _hom(xi[k], xi[k])
        ch -= e
        ch -= e.scaled(hb)
    return ch


def tangent_character(f):
    """Full tangent character TX|_f as a CharacterSum in {a_j, hbar}."""
    ch = ns5_tangent_character(f)
    ch += d5_tangent_character(f.diagram.c, f)
    return ch


def expected_tangent_rank(diag):
    """dim X from the dimension vector alone (rank bookkeeping of the two
    virtual sums)."""
    dm = {k: diag.d(k) for k in range(-diag.m, 1)}
    rank = 0
    for k in range(-diag.m + 1, 1):
        rank += 2 * dm[k] * dm[k - 1]
    for k in range(-diag.m, 0):
        rank -= 2 * dm[k] ** 2
    dp = {k: diag.d(k) for k in range(0, diag.n + 1)}
    for k in range(1, diag.n + 1):
        rank += dp[k - 1] + dp[k] + dp[k - 1] ** 2 + dp[k] ** 2
    for k in range(0, diag.n + 1):
        rank -= 2 * dp[k] ** 2
    return rank


def negative_part(ch, sigma, convention='sigma'):
    """Chamber-negative part: keep monomials a_i/a_j * hbar^s with
    sigma(i) < sigma(j) (the literal convention; 'sigma_inv' compares
    sigma^{-1} instead).  A-fixed monomials (pure hbar powers) are dropped."""
    perm = list(sigma)
    inv = [0] * (len(perm) + 1)
    for pos, v in enumerate(perm, start=1):
        inv[v] = pos
    out = CharacterSum()
    for mono, mult in ch.items():
        ais = [(v[1], x) for v, x in mono.e.items() if v[0] == 'a']
        if not ais:
            continue
        pos = [p for p in ais if p[1] > 0]
        neg = [p for p in ais if p[1] < 0]
        if len(pos) != 1 or len(neg) != 1 or pos[0][1] != 1 or neg[0][1] != -1:
            raise ValueError('monomial %s is not of a_i/a_j shape' % mono)
        i, j = pos[0][0], neg[0][0]
        if convention == 'sigma':
            keep = sigma[i - 1] < sigma[j - 1]
        else:
            keep = inv[i] < inv[j]
        if keep:
            out.add(mono, mult)
    return out
