"""Unicellular maps on orientable and non-orientable surfaces.

Representation of rooted maps as rotation systems with twists, the tour of a
one-face map and its canonical orientation, node opening/gluing bijections,
the twist-permuting averaging involution, an exhaustive polygon-gluing
census, and exact counting formulas, all cross-verified against each other.
"""

from .map_kernel import (
    RibbonMap,
    SurfaceType,
    FaceTrace,
    MapStructureError,
    validate,
    check,
    trace_faces,
    euler_type,
    is_orientable,
    orienting_flips,
    flip_vertex,
    flip_equivalent,
    to_umap,
    parse_umap,
)

__version__ = "0.1.0"
