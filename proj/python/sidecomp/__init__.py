"""Strongly irreducible decompositions and similarity invariants of commuting matrix tuples."""

from ._core import (
    InputError,
    NumericalDegeneracy,
    PropertyViolation,
    decompose,
    defect,
    grid,
    inflation_check,
    invariant,
    is_strongly_irreducible,
    joint_commutant,
    joint_eigenvector,
    planted,
    run,
    similar,
    spherical_shift,
    truncated_tuple,
    validate_commuting,
)

__version__ = "0.1.0"
