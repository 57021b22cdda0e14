"""Degeneration chain elliptic -> K-theory -> cohomology on T*P^2.

Pins the Kahler variables to powers of the nome (z_{i+1}/z_i = q^{-s_i})
and watches the elliptic weight function converge to the K-theoretic one
as q -> 0; then compares the K class against the H class exactly.
"""
from bowcalc import limit_suite

rep = limit_suite((2, 1), (1, 1, 1))
print('q ladder:', rep['q_list'])
for per in rep['per_point']:
    row = '  '.join('%.1e' % x for x in per['ek_residuals'])
    print('point %d: %s   monotone=%s  K->H exact=%s'
          % (per['f'], row, per['ek_monotone'], per['kh_exact']))
print('passed:', rep['passed'])
