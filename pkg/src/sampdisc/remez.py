"""Remez constants for excluded grid sets, and the implication from
uniform-norm discretization.

Excluded sets are unions of grid cells and their measure is grid measure;
reports carry both the normalized measure (total mass one) and the Lebesgue
one (total ``(2*pi)^d`` on the torus) to keep the two conventions apart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .certify import UniformReport, sup_over_constraints
from .config import DEFAULT_TOLS
from .pointset import PointSet
from .subspace import FrequencySet, GriddedSpace, Subspace

__all__ = [
    "ExcludedSet",
    "RemezReport",
    "DiscretizationRemezCheck",
    "remez_constant",
    "remez_from_discretization",
    "remez_thresholds",
    "adversarial_excluded",
]


@dataclass(frozen=True)
class ExcludedSet:
    """A union of grid cells to be removed from the constraint set."""

    mask: np.ndarray
    measure: float
    generator: dict = field(default_factory=dict)

    def __post_init__(self):
        mask = np.array(self.mask, dtype=bool)
        mask.setflags(write=False)
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "generator", dict(self.generator))
        if not 0.0 <= self.measure < 1.0:
            raise ValueError("excluded measure must lie in [0, 1)")

    @property
    def cells(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    @staticmethod
    def empty(space: GriddedSpace) -> "ExcludedSet":
        return ExcludedSet(np.zeros(space.size, dtype=bool), 0.0,
                           {"method": "empty"})

    @staticmethod
    def from_cells(space: GriddedSpace, cells, generator=None) -> "ExcludedSet":
        mask = np.zeros(space.size, dtype=bool)
        mask[np.asarray(cells, dtype=np.int64)] = True
        return ExcludedSet(mask, float(space.weights[mask].sum()),
                           generator or {"method": "cells"})

    @staticmethod
    def intervals(space: GriddedSpace, segments) -> "ExcludedSet":
        """Cells of a univariate grid whose point falls in any segment.

        Segments are (lo, hi) in domain coordinates; on the torus a segment
        with lo > hi wraps around.
        """
        if space.dim != 1:
            raise ValueError("interval generators need a univariate grid")
        x = space.points[:, 0]
        mask = np.zeros(space.size, dtype=bool)
        for lo, hi in segments:
            if space.domain == "torus" and lo > hi:
                mask |= (x >= lo) | (x < hi)
            else:
                mask |= (x >= lo) & (x < hi)
        return ExcludedSet(mask, float(space.weights[mask].sum()),
                           {"method": "intervals",
                            "segments": [[float(a), float(b)] for a, b in segments]})

    @staticmethod
    def random_cells(space: GriddedSpace, max_measure: float, seed) -> "ExcludedSet":
        """Uniformly random cells while the total measure stays strictly
        below ``max_measure``."""
        if not 0 <= max_measure < 1:
            raise ValueError("max_measure must lie in [0, 1)")
        rng = np.random.default_rng(seed)
        order = rng.permutation(space.size)
        mask = np.zeros(space.size, dtype=bool)
        total = 0.0
        for cell in order:
            wt = float(space.weights[cell])
            if total + wt >= max_measure:
                continue
            mask[cell] = True
            total += wt
        return ExcludedSet(mask, float(space.weights[mask].sum()),
                           {"method": "random", "seed": seed,
                            "max_measure": float(max_measure)})


@dataclass(frozen=True)
class RemezReport:
    """Computed Remez constant with the applicable comparison ceilings.

    ``r`` is the grid supremum of ``max |f|`` over functions bounded by one
    off the excluded set; infinite when too few cells remain to pin the
    subspace down.  ``bounds`` maps ceiling names to dictionaries with at
    least a "factor" and the hypothesis that makes them applicable.
    """

    r: float
    measure: float
    measure_lebesgue: float
    resolution: int
    bounds: dict
    argmax_index: int | None = None
    coefficients: np.ndarray | None = field(default=None, repr=False)
    certificate: np.ndarray | None = field(default=None, repr=False)


@dataclass(frozen=True)
class DiscretizationRemezCheck:
    """Verdict of the discretization-implies-Remez test."""

    verdict: str      # "pass", "fail", or "hypothesis-unmet"
    r: float
    d: float
    m: int
    measure: float


def _lebesgue_factor(space: GriddedSpace) -> float:
    side = 2.0 * math.pi if space.domain == "torus" else 2.0
    return side ** space.dim


def remez_constant(subspace: Subspace, excluded: ExcludedSet,
                   feas_tol=None) -> RemezReport:
    """Exact (at grid resolution) Remez constant for an excluded cell set.

    One linear program per excluded cell: maximize ``f`` there subject to
    ``|f| <= 1`` on every kept cell.  Kept cells contribute exactly one to
    the supremum, so the constant is ``max(1, excluded-cell maximum)`` and
    equals one exactly for the empty set.
    """
    feas_tol = DEFAULT_TOLS.lp_feasibility if feas_tol is None else feas_tol
    space = subspace.space
    if excluded.mask.shape != (space.size,):
        raise ValueError("excluded set does not match the grid")
    kept = np.flatnonzero(~excluded.mask)
    if kept.size == 0:
        raise ValueError("the excluded set must leave at least one cell")
    bounds = _ceilings(subspace, excluded)
    if not excluded.mask.any():
        return RemezReport(1.0, 0.0, 0.0, space.size, bounds)
    value, row, coef, cert = sup_over_constraints(
        subspace.values, kept, excluded.cells, feas_tol=feas_tol,
        initial_best=1.0,
    )
    leb = excluded.measure * _lebesgue_factor(space)
    if math.isinf(value):
        return RemezReport(math.inf, excluded.measure, leb, space.size,
                           bounds, certificate=cert)
    return RemezReport(float(value), excluded.measure, leb, space.size,
                       bounds, argmax_index=row, coefficients=coef)


def _ceilings(subspace: Subspace, excluded: ExcludedSet) -> dict:
    """Comparison ceilings applicable to this subspace and excluded measure."""
    out: dict = {}
    freqs = subspace.frequencies
    space = subspace.space
    if freqs is None or space.domain != "torus":
        return out
    leb = excluded.measure * _lebesgue_factor(space)
    card = freqs.card
    maxima = freqs.max_abs()
    if space.dim == 1:
        n = maxima[0]
        out["univariate"] = {
            "factor": math.exp(4.0 * n * leb),
            "applies": bool(leb < math.pi / 2.0),
            "measure_max_lebesgue": math.pi / 2.0,
            "degree": n,
        }
    if all(n >= 1 for n in maxima):
        d = space.dim
        prod_n = math.prod(maxima)
        thresh = (math.pi / 2.0) ** d * min(maxima) ** d / prod_n
        out["box"] = {
            "factor": math.exp(2.0 * d * (leb * prod_n) ** (1.0 / d)),
            "applies": bool(leb < thresh),
            "measure_max_lebesgue": thresh,
            "degrees": list(maxima),
        }
    out["sqrt_card"] = {
        "factor": math.sqrt(card),
        "applies": bool(excluded.measure <= 1.0 / card),
        "measure_max": 1.0 / card,
    }
    out["const12"] = {
        "factor": 12.0,
        "applies": bool(excluded.measure <= 2.0 ** (-4 * card) / card ** 2),
        "measure_max": 2.0 ** (-4 * card) / card ** 2,
    }
    return out


def remez_from_discretization(subspace: Subspace, points: PointSet, d: float,
                              excluded: ExcludedSet,
                              tol: float = 1e-6) -> DiscretizationRemezCheck:
    """Test the implication from a certified uniform constant to a Remez bound.

    Valid for translation-invariant trigonometric subspaces only: there the
    certified inequality transfers to every translate, and excluding a set
    of measure below ``1/m`` leaves some translate with all sample points
    outside it, forcing the Remez constant under ``d``.  Applicability is a
    separate verdict, never a pass or fail.
    """
    if subspace.frequencies is None or subspace.space.domain != "torus":
        raise ValueError(
            "the discretization-to-Remez implication needs a translation-"
            "invariant trigonometric subspace on the torus"
        )
    if d < 1.0:
        raise ValueError("a certified uniform constant is at least 1")
    m = points.m
    if excluded.measure >= 1.0 / m:
        return DiscretizationRemezCheck("hypothesis-unmet", math.nan, d, m,
                                        excluded.measure)
    r = remez_constant(subspace, excluded).r
    verdict = "pass" if r <= d + tol else "fail"
    return DiscretizationRemezCheck(verdict, r, d, m, excluded.measure)


def remez_thresholds(freqs: FrequencySet, s: int | None = None, c1: float = 1.0,
                     C1: float = 1.0, c_d: float = 1.0, C_d: float = 1.0) -> dict:
    """Closed-form Remez regimes for a frequency set: admissible excluded
    measure, the factor, and (for the tradeoff family) the kernel size M and
    point budget.

    ``s`` selects the general tradeoff member and must be an integer in
    ``[sqrt(|Q|), |Q|]``; the special member ``s = |Q|`` sharpens the factor
    to 12 with ``M = 2^(4|Q|)`` and is always reported.  Constants default to
    one and are echoed.
    """
    card = freqs.card
    out = {
        "sqrt_card": {
            "measure_bound": c1 / card,
            "factor": C1 * math.sqrt(card),
        },
        "const12": {
            "measure_bound": c_d * 2.0 ** (-4 * card) / card ** 2,
            "factor": 12.0,
        },
        "tradeoff_special": {
            "factor": 12.0,
            "M": 2 ** (4 * card),
            "point_budget": _tradeoff_budget(2 ** (4 * card), card, C_d),
        },
        "constants": {"c1": c1, "C1": C1, "c_d": c_d, "C_d": C_d},
    }
    if s is not None:
        if not (math.sqrt(card) <= s <= card):
            raise ValueError(
                f"s must lie in [sqrt(|Q|), |Q|] = [{math.sqrt(card):.3f}, {card}]"
            )
        m_terms = int(card ** 2 * math.exp(2 * s) * (1 + card / s) ** (2 * s)) + 1
        out["tradeoff"] = {
            "factor": 6.0 * math.sqrt(math.e * (1.0 + card / s)),
            "M": m_terms,
            "s": int(s),
            "point_budget": _tradeoff_budget(m_terms, card, C_d),
        }
    return out


def _tradeoff_budget(m_terms: int, card: int, C_d: float) -> int:
    return max(1, math.ceil(C_d * m_terms * card * math.log2(m_terms)))


def adversarial_excluded(subspace: Subspace, measure_budget: float,
                         pool: int = 8, feas_tol=None) -> ExcludedSet:
    """Grow an excluded set greedily to push the Remez constant up.

    Each round ranks unexcluded cells by the magnitude of the current
    extremal function (the binding constraints), evaluates the exact new
    constant for the ``pool`` leading candidates, and keeps the best.  Stops
    when no cell fits the measure budget.  Deterministic.
    """
    space = subspace.space
    mask = np.zeros(space.size, dtype=bool)
    total = 0.0
    current = remez_constant(subspace, ExcludedSet(mask, 0.0))
    while True:
        free = np.flatnonzero(~mask)
        fits = free[space.weights[free] + total < measure_budget]
        if fits.size == 0:
            break
        if current.coefficients is not None:
            scores = np.abs(subspace.values[fits] @ current.coefficients)
        else:
            # No extremal yet: rank by pointwise evaluation capacity.
            scores = np.sqrt(np.einsum("ij,ij->i", subspace.values[fits],
                                       subspace.values[fits]))
        cand = fits[np.argsort(-scores)[:pool]]
        best_cell, best_rep = None, None
        for cell in cand:
            trial = mask.copy()
            trial[cell] = True
            rep = remez_constant(
                subspace,
                ExcludedSet(trial, float(space.weights[trial].sum())),
                feas_tol=feas_tol,
            )
            if math.isinf(rep.r):
                continue
            if best_rep is None or rep.r > best_rep.r:
                best_cell, best_rep = cell, rep
        if best_cell is None:
            break
        mask[best_cell] = True
        total = float(space.weights[mask].sum())
        current = best_rep
    return ExcludedSet(mask, total, {"method": "adversarial",
                                     "budget": float(measure_budget),
                                     "pool": int(pool)})
