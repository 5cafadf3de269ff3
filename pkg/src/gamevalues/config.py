"""Central tolerance settings shared by all numeric routines."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Default accuracy targets.

    structural: exactness checks on constructed objects (Gram feasibility,
    orthogonality, reconstruction residuals).
    optimization: stopping criterion for iterative solvers.
    """

    structural: float = 1e-9
    optimization: float = 1e-7


DEFAULT = Tolerances()
