"""Braid-group orbits on conjugation-invariant tuples, the graded rings of
components, a Koszul-style chain model, and exact homology of components."""

from .action import HurwitzAction, Orbit, OrbitTable
from .groups import (
    FiniteGroup,
    InvariantSubset,
    Subgroup,
    conjugacy_classes,
    is_large,
    k_invariant,
    load_group,
    subgroup_closure,
    validate_Q,
)

__all__ = [
    "FiniteGroup",
    "InvariantSubset",
    "Subgroup",
    "HurwitzAction",
    "Orbit",
    "OrbitTable",
    "conjugacy_classes",
    "is_large",
    "k_invariant",
    "load_group",
    "subgroup_closure",
    "validate_Q",
]
