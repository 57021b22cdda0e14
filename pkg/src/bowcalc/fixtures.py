"""Named fixed points for the standard worked example X((1,1,2,1), (2,2,1)).

Fixed-point IDs in this package are 1-based positions in the deterministic
enumeration order, which is not how these points are usually labelled when
the 12-point poset of this variety is drawn by hand.  The hand labels that
matter for the classical identities are pinned here by their explicit BCT
matrices, so they can be resolved to enumeration IDs on any machine.
"""

from .bowcore import BraneDiagram, enumerate_fixed_points

POSET_EXAMPLE_R = (1, 1, 2, 1)
POSET_EXAMPLE_C = (2, 2, 1)

NAMED_MATRICES = {
    'f3': ((0, 1, 0),
           (0, 0, 1),
           (1, 1, 0),
           (1, 0, 0)),
    'f9': ((1, 0, 0),
           (0, 1, 0),
           (0, 1, 1),
           (1, 0, 0)),
    'f12': ((1, 0, 0),
            (1, 0, 0),
            (0, 1, 1),
            (0, 1, 0)),
}


def named_fixed_point(name, diagram=None):
    """Resolve a hand label ('f3', 'f9', 'f12') to the enumerated FixedPoint
    of X((1,1,2,1), (2,2,1))."""
    if diagram is None:
        diagram = BraneDiagram(POSET_EXAMPLE_R, POSET_EXAMPLE_C)
    matrix = NAMED_MATRICES[name]
    for f in enumerate_fixed_points(diagram, None):
        if f.matrix == matrix:
            return f
    raise ValueError('named point %r not found' % name)


def named_ids(diagram=None):
    """{name: enumeration id} for all named points."""
    if diagram is None:
        diagram = BraneDiagram(POSET_EXAMPLE_R, POSET_EXAMPLE_C)
    by_matrix = {f.matrix: f.fid
                 for f in enumerate_fixed_points(diagram, None)}
    return {name: by_matrix[m] for name, m in NAMED_MATRICES.items()}
