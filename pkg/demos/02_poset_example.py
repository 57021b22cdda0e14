"""The 12-fixed-point example X((1,1,2,1), (2,2,1)).

Verifies the stable-envelope axioms in the cohomological flavor and draws
the Hasse diagram of the order induced by the support of the weight
functions.  Takes about half a minute.
"""
from bowcalc import check_axioms
from bowcalc.fixtures import POSET_EXAMPLE_C, POSET_EXAMPLE_R, named_ids

rep = check_axioms(POSET_EXAMPLE_R, POSET_EXAMPLE_C, flavor='H')

print('variety        : X(%s, %s)' % (rep['r'], rep['c']))
print('fixed points   :', rep['fixed_points'])
print('axioms passed  :', rep['passed'])
print('diag residual  :', rep['max_diagonal_residual'])
print('partial order  :', rep['is_partial_order'])
print()
print('cover relations (g < f):')
for f, g in sorted(rep['reduction_edges']):
    print('  %2d -> %2d' % (f, g))
print()
print('named points resolve to enumeration ids:', named_ids())
