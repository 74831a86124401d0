"""Short ropes: arc spaces, axis decompositions, deformations, loop classes."""

from .geometry import (
    Rope,
    axis_decomposition,
    c1_distance,
    extend,
    hausdorff_distance,
    in_WL,
    in_WR,
    is_short,
    knot_blocks,
    measures,
    min_self_distance,
    multiplicity,
    rope_type,
    tight_rope,
    validate_rope,
)
from .homotopies import delta_contract, tighten, wl_stage1, wl_stage2, wl_stage3
from .knots import Diagram, KnotClass, determinant, diagram, fox_colorings, identify, simplify
from .loops import RopeFamily, concat_families, loop_class, loop_verify, reverse_family, tie_and_push
from .mccord import Configuration, Timeline, is_subordinate, omega, winding_class
from .monoid import GrothendieckElement, MonoidElement, complete, gdiff, parse_element

__all__ = [
    "Rope", "axis_decomposition", "c1_distance", "extend", "hausdorff_distance",
    "in_WL", "in_WR", "is_short", "knot_blocks", "measures", "min_self_distance",
    "multiplicity", "rope_type", "tight_rope", "validate_rope",
    "delta_contract", "tighten", "wl_stage1", "wl_stage2", "wl_stage3",
    "Diagram", "KnotClass", "determinant", "diagram", "fox_colorings",
    "identify", "simplify",
    "RopeFamily", "concat_families", "loop_class", "loop_verify",
    "reverse_family", "tie_and_push",
    "Configuration", "Timeline", "is_subordinate", "omega", "winding_class",
    "GrothendieckElement", "MonoidElement", "complete", "gdiff", "parse_element",
]
