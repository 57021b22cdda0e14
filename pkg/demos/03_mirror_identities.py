"""Theta-function identities out of 3d mirror symmetry.

restrict an elliptic weight function of X((1,1,2,1),(2,2,1)) at another
fixed point, divide by the euler factor, do the same for the mirror pair
on the mirror variety, equate, clear denominators -> a certified identity
between products of theta functions. the smallest one is a form of the
Fay trisecant identity.
"""
from bowcalc import fay_normal_form, mirror_identity
from bowcalc.fixtures import POSET_EXAMPLE_C as C
from bowcalc.fixtures import POSET_EXAMPLE_R as R
from bowcalc.fixtures import named_ids

ids = named_ids()
print('named ids:', ids)

for name_f, name_g in [('f12', 'f9'), ('f9', 'f3'), ('f12', 'f3')]:
    rec = mirror_identity(R, C, ids[name_f], ids[name_g])
    print()
    print('pair (%s, %s): %r' % (name_f, name_g, rec))
    print('  residual %.2e over %d random points'
          % (rec.certification['max_residual'], rec.certification['points']))
    print('  ' + rec.to_latex())
    nf = fay_normal_form(rec)
    if nf:
        print('  trisecant data x =', nf['x'])
        print('                 y =', nf['y'])
