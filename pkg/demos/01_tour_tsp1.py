"""A guided tour on the smallest interesting bow variety, T*P^1.

Walks through the whole pipeline: parse a brane diagram, enumerate the
torus fixed points, build the weight functions in all three flavors,
restrict them to fixed points, and check the diagonal against the Euler
class of the negative half of the tangent space.

Run:  python3 demos/01_tour_tsp1.py
"""
import random
from fractions import Fraction

from bowcalc import (SlopeConfig, enumerate_fixed_points, euler_class_at,
                     evaluate, evaluate_h, parse_brane_diagram, random_point,
                     restrict_class, w_function)
from bowcalc.expr import HBAR, a_var, t_var

# ---------------------------------------------------------------------------
# 1. the diagram.  Two NS5 branes, two D5 branes, charges all 1.
diag = parse_brane_diagram('/1/2\\1\\')
print('diagram :', diag.text())
print('charges : r =', diag.r, ' c =', diag.c)
print('dims    :', diag.dims)

# 2. fixed points are 01-matrices with the given margins.
fps = enumerate_fixed_points(diag, None)
for f in fps:
    print('fixed point %d: ties %s' % (f.fid, f.ties))

# 3. cohomological weight functions in both chambers.  These are linear
#    polynomials in the single Chern root t_{-1,1}.
print()
for sigma in [(1, 2), (2, 1)]:
    for f in fps:
        w = w_function(f, sigma, 'H')
        print('W^H chamber %s, point %d: %s' % (sigma, f.fid, w.cls))

# 4. restriction to a fixed point substitutes t_{-1,1} -> a_k / hbar.
#    The diagonal restriction must equal the Euler class of the
#    chamber-negative part of the tangent space -- exactly, in rational
#    arithmetic for the H flavor.
print()
rng = random.Random(0)
vals = {a_var(1): Fraction(5, 3), a_var(2): Fraction(9, 7),
        HBAR: Fraction(2, 5)}
for f in fps:
    w = w_function(f, (1, 2), 'H')
    rest = restrict_class(w, f)
    eu = euler_class_at(f, (1, 2), 'H')
    lhs = rest.eval_exact(vals)
    rhs = evaluate_h(eu, vals)
    print('point %d: W|_f = %s, e(N^-) = %s, equal: %s'
          % (f.fid, lhs, rhs, lhs == rhs))

# 5. the same statement holds numerically for the K and elliptic flavors.
print()
slopes = SlopeConfig([Fraction(431, 997)])
for flavor, q in [('K', None), ('E', 0.1)]:
    for f in fps:
        w = w_function(f, (1, 2), flavor, slopes=slopes)
        rest = restrict_class(w, f)
        eu = euler_class_at(f, (1, 2), flavor)
        pt = random_point(rng, 2, 2, q=q)
        res = abs(rest.eval(pt) - evaluate(eu, pt))
        print('%s diagonal at point %d: residual %.2e' % (flavor, f.fid, res))
