"""Numerical tolerances used across the toolkit, echoed into reports."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Default tolerances; every report records the values it was run with.

    orthonormality: max deviation of the grid Gram matrix from identity.
    gram_floor: smallest Gram eigenvalue accepted before orthonormalization.
    design: relative slack of the optimal-design stopping rule.
    eigen: eigensolver tolerance echoed in exact-eigen reports.
    lp_feasibility: feasibility tolerance handed to the LP solver.
    ascent: target accuracy of the ratio ascent refiners.
    span_residual: residual norm below which a function counts as in-span.
    """

    orthonormality: float = 1e-10
    gram_floor: float = 1e-10
    design: float = 0.01
    eigen: float = 1e-10
    lp_feasibility: float = 1e-9
    ascent: float = 1e-6
    span_residual: float = 1e-8


DEFAULT_TOLS = Tolerances()
