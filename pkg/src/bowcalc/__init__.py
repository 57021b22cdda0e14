"""bowcalc: stable envelopes on type-A bow varieties.

Cohomological (H), K-theoretic (K) and elliptic (E) weight/W functions via
the framed shuffle algebra, fixed-point restriction, axiom verification,
and certified theta-function identities from 3d mirror symmetry.
"""

from .bowcore import (BraneDiagram, FixedPoint, InputError, crossings,
                      decorations, enumerate_fixed_points, mirror,
                      negative_part, parse_brane_diagram,
                      restriction_substitution, tangent_character)
from .expr import (HBAR, EvalPoint, FlavorClass, FlavorTerm, Lin, Monomial,
                   Substitution, a_var, evaluate, evaluate_h, random_point,
                   t_var, theta_eval, z_var)
from .shuffle import GradedFunction, kernel, star, star_all, wheel_check
from .stab import (PoleError, Restriction, RestrictionError, SlopeConfig,
                   StabResult, euler_class_at, one_tie, restrict_class,
                   w_function, wtilde)
from .verify import (IdentityRecord, check_axioms, fay_normal_form, k_to_h,
                     limit_suite, mirror_identity, sweep)

__all__ = [
    'BraneDiagram', 'FixedPoint', 'InputError', 'crossings', 'decorations',
    'enumerate_fixed_points', 'mirror', 'negative_part',
    'parse_brane_diagram', 'restriction_substitution', 'tangent_character',
    'HBAR', 'EvalPoint', 'FlavorClass', 'FlavorTerm', 'Lin', 'Monomial',
    'Substitution', 'a_var', 'evaluate', 'evaluate_h', 'random_point',
    't_var', 'theta_eval', 'z_var',
    'GradedFunction', 'kernel', 'star', 'star_all', 'wheel_check',
    'PoleError', 'Restriction', 'RestrictionError', 'SlopeConfig',
    'StabResult', 'euler_class_at', 'one_tie', 'restrict_class',
    'w_function', 'wtilde',
    'IdentityRecord', 'check_axioms', 'fay_normal_form', 'k_to_h',
    'limit_suite', 'mirror_identity', 'sweep',
]

__version__ = '0.1.0'
