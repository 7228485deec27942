"""Finite-dimensional function subspaces on gridded probability spaces.

Everything downstream works with a :class:`Subspace`: a family of real-valued
functions, orthonormal with respect to a discrete probability measure carried
by a quadrature grid.  This module builds the two families used throughout
(trigonometric spaces with a prescribed frequency set, and Legendre-seeded
polynomial spaces on an interval), orthonormalizes arbitrary raw bases, and
computes the pointwise quantities attached to a subspace: the Christoffel
profile, Nikol'skii constants, reproducing-kernel values, and G-optimal
design measures.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg

from .config import DEFAULT_TOLS
from .errors import DegeneracyError, ResolutionError
from ._ascent import batched_refine

__all__ = [
    "FrequencySet",
    "GriddedSpace",
    "Subspace",
    "ChristoffelProfile",
    "DesignMeasure",
    "NikolskiiEstimate",
    "build_trig_subspace",
    "build_poly_subspace",
    "orthonormalize",
    "christoffel",
    "nikolskii_constant",
    "g_optimal_design",
    "design_subspace",
    "dirichlet_eval",
]


# ---------------------------------------------------------------------------
# Frequency sets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FrequencySet:
    """A finite set of integer frequency vectors in ``Z^d``.

    Frequencies are stored deduplicated and sorted lexicographically so that
    identical inputs always produce identical objects.
    """

    dim: int
    freqs: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("frequency dimension must be positive")
        if len(self.freqs) == 0:
            raise ValueError("frequency set must be nonempty")
        seen = set()
        for k in self.freqs:
            if len(k) != self.dim:
                raise ValueError(f"frequency {k} does not have dimension {self.dim}")
            if k in seen:
                raise ValueError(f"duplicate frequency {k}")
            seen.add(k)

    @property
    def card(self) -> int:
        return len(self.freqs)

    def max_abs(self) -> tuple[int, ...]:
        """Per-axis maximum of ``|k_i|`` over the set."""
        arr = np.abs(np.asarray(self.freqs, dtype=int))
        return tuple(int(v) for v in arr.max(axis=0))

    @staticmethod
    def from_list(vectors, dim=None) -> "FrequencySet":
        vecs = [tuple(int(v) for v in k) for k in vectors]
        if not vecs:
            raise ValueError("frequency set must be nonempty")
        d = dim if dim is not None else len(vecs[0])
        uniq = sorted(set(vecs))
        return FrequencySet(dim=d, freqs=tuple(uniq))

    @staticmethod
    def box(limits, dim=None) -> "FrequencySet":
        """All ``k`` with ``|k_i| <= n_i``; ``limits`` is a scalar or per-axis list."""
        if np.isscalar(limits):
            if dim is None:
                dim = 1
            limits = [int(limits)] * dim
        else:
            limits = [int(n) for n in limits]
            dim = len(limits)
        if any(n < 0 for n in limits):
            raise ValueError("box limits must be nonnegative")
        ranges = [range(-n, n + 1) for n in limits]
        return FrequencySet.from_list(itertools.product(*ranges), dim=dim)

    @staticmethod
    def hyperbolic_cross(dim, radius) -> "FrequencySet":
        """All ``k`` with ``prod_j max(|k_j|, 1) <= radius``."""
        radius = int(radius)
        if radius < 1:
            raise ValueError("hyperbolic cross radius must be >= 1")
        ranges = [range(-radius, radius + 1)] * dim
        vecs = [
            k
            for k in itertools.product(*ranges)
            if math.prod(max(abs(kj), 1) for kj in k) <= radius
        ]
        return FrequencySet.from_list(vecs, dim=dim)

    @staticmethod
    def lacunary(count, base=2.0) -> "FrequencySet":
        """Univariate lacunary frequencies ``k_1 = 1``, ``k_{j+1} >= ceil(base * k_j)``."""
        if base <= 1.0:
            raise ValueError("lacunary base must exceed 1")
        if count < 1:
            raise ValueError("lacunary count must be >= 1")
        ks = [1]
        while len(ks) < count:
            ks.append(max(math.ceil(base * ks[-1]), ks[-1] + 1))
        return FrequencySet.from_list([(k,) for k in ks], dim=1)


# ---------------------------------------------------------------------------
# Gridded probability spaces
# ---------------------------------------------------------------------------

_DOMAINS = ("torus", "box")


@dataclass(frozen=True)
class GriddedSpace:
    """A finite quadrature grid standing in for a probability space.

    domain "torus" lives on ``[0, 2*pi)^d``, domain "box" on ``[-1, 1]^d``.
    ``weights`` are nonnegative and sum to one; they define all grid norms.
    ``axis_sizes`` is set for tensor-product grids (row-major point order).
    """

    domain: str
    points: np.ndarray
    weights: np.ndarray
    axis_sizes: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.domain not in _DOMAINS:
            raise ValueError(f"unknown domain {self.domain!r}")
        pts = np.atleast_2d(np.array(self.points, dtype=float))
        w = np.array(self.weights, dtype=float)
        if pts.shape[0] < 1:
            raise ValueError("grid must contain at least one point")
        if w.shape != (pts.shape[0],):
            raise ValueError("weights must be one per grid point")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {w.sum()!r}, expected 1 within 1e-12")
        lo, hi = (0.0, 2.0 * np.pi) if self.domain == "torus" else (-1.0, 1.0)
        if pts.min() < lo - 1e-12 or pts.max() > hi + 1e-12:
            raise ValueError("grid points fall outside the domain")
        if self.axis_sizes is not None and math.prod(self.axis_sizes) != pts.shape[0]:
            raise ValueError("axis sizes inconsistent with point count")
        pts.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def with_weights(self, weights) -> "GriddedSpace":
        """Same grid, new probability weights (used for design measures)."""
        return GriddedSpace(self.domain, self.points, np.asarray(weights, float),
                            self.axis_sizes)

    @staticmethod
    def torus(dim, points_per_axis) -> "GriddedSpace":
        """Uniform tensor grid on the d-torus with the uniform measure."""
        sizes = _axis_sizes(dim, points_per_axis)
        axes = [2.0 * np.pi * np.arange(n) / n for n in sizes]
        pts = _tensor_points(axes)
        g = pts.shape[0]
        return GriddedSpace("torus", pts, np.full(g, 1.0 / g), tuple(sizes))

    @staticmethod
    def box(dim, points_per_axis) -> "GriddedSpace":
        """Midpoint tensor grid on ``[-1, 1]^d`` with the uniform measure."""
        sizes = _axis_sizes(dim, points_per_axis)
        axes = [-1.0 + 2.0 * (np.arange(n) + 0.5) / n for n in sizes]
        pts = _tensor_points(axes)
        g = pts.shape[0]
        return GriddedSpace("box", pts, np.full(g, 1.0 / g), tuple(sizes))


def _axis_sizes(dim, points_per_axis):
    if np.isscalar(points_per_axis):
        sizes = [int(points_per_axis)] * dim
    else:
        sizes = [int(n) for n in points_per_axis]
    if len(sizes) != dim or any(n < 1 for n in sizes):
        raise ValueError("need a positive point count per axis")
    return sizes


def _tensor_points(axes):
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


# ---------------------------------------------------------------------------
# Subspaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Subspace:
    """An N-dimensional function space, orthonormal on its grid.

    ``values[i, j]`` tabulates the j-th basis function at the i-th grid
    point.  Construction verifies grid orthonormality within ``ortho_tol``.
    """

    space: GriddedSpace
    values: np.ndarray
    frequencies: FrequencySet | None = None
    ortho_tol: float = DEFAULT_TOLS.orthonormality

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 2 or vals.shape[0] != self.space.size:
            raise ValueError("basis values must be a (grid, N) array")
        gram = vals.T @ (self.space.weights[:, None] * vals)
        dev = np.abs(gram - np.eye(vals.shape[1])).max()
        if dev > self.ortho_tol:
            raise ValueError(
                f"basis is not grid-orthonormal: Gram deviates by {dev:.3e} "
                f"(tolerance {self.ortho_tol:.1e})"
            )
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def n_dim(self) -> int:
        return self.values.shape[1]

    def gram(self) -> np.ndarray:
        return self.values.T @ (self.space.weights[:, None] * self.values)


@dataclass(frozen=True)
class ChristoffelProfile:
    """Pointwise values ``w(x) = (sum_j u_j(x)^2)^(1/2)`` and their maximum."""

    values: np.ndarray
    h2inf: float


@dataclass(frozen=True)
class DesignMeasure:
    """Result of the multiplicative optimal-design iteration.

    ``gvalue`` is ``max_x`` of the inverse Christoffel function squared under
    the design measure; at the optimum it equals the dimension N.
    ``objective_history`` records the log-determinant of the design Gram,
    which the multiplicative update never decreases.
    """

    weights: np.ndarray
    gvalue: float
    iterations: int
    converged: bool
    objective_history: np.ndarray = field(repr=False, default=None)


@dataclass(frozen=True)
class NikolskiiEstimate:
    """Estimated constant H of ``sup |f| <= H * ||f||_q``; exact for q = 2."""

    q: float
    value: float
    exact: bool


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------

def build_trig_subspace(freqs: FrequencySet, space: GriddedSpace,
                        ortho_tol=None) -> Subspace:
    """Real trigonometric subspace with frequencies from ``freqs``.

    The complex span of ``exp(i<k, x>)`` over ``k`` in the set is represented
    by real functions: the constant (when 0 is in the set) plus a cosine and
    a sine per representative of each ``{k, -k}`` pair.  Both the cosine and
    the sine are kept even when only one of ``k, -k`` is listed, so the real
    dimension can exceed the set cardinality for asymmetric sets.

    Parameters
    ----------
    freqs : FrequencySet
    space : GriddedSpace
        Uniform tensor grid on the torus of matching dimension; each axis
        must carry at least ``2 * max|k_i| + 2`` points so that distinct
        frequencies stay orthogonal on the grid.

    Returns
    -------
    Subspace
        Orthonormal on the grid, carrying ``freqs`` as metadata.
    """
    if space.domain != "torus":
        raise ValueError("trigonometric subspaces require a torus grid")
    if space.dim != freqs.dim:
        raise ValueError(
            f"grid dimension {space.dim} does not match frequency dimension {freqs.dim}"
        )
    if space.axis_sizes is None:
        raise ResolutionError("trigonometric subspaces require a tensor-product grid")
    if np.ptp(space.weights) > 1e-15:
        raise ResolutionError("trigonometric subspaces require the uniform grid measure")
    maxima = freqs.max_abs()
    for axis, (n_axis, kmax) in enumerate(zip(space.axis_sizes, maxima)):
        if n_axis < 2 * kmax + 2:
            raise ResolutionError(
                f"axis {axis} has {n_axis} points, need >= {2 * kmax + 2} "
                f"for max frequency {kmax}"
            )

    has_zero = any(all(v == 0 for v in k) for k in freqs.freqs)
    reps = sorted({_pair_representative(k) for k in freqs.freqs
                   if any(v != 0 for v in k)})

    cols = []
    if has_zero:
        cols.append(np.ones(space.size))
    for k in reps:
        phase = space.points @ np.asarray(k, dtype=float)
        cols.append(np.cos(phase))
        cols.append(np.sin(phase))
    raw = np.stack(cols, axis=1)
    return orthonormalize(raw, space, frequencies=freqs, ortho_tol=ortho_tol)


def _pair_representative(k):
    """Canonical member of ``{k, -k}``: first nonzero coordinate positive."""
    for v in k:
        if v > 0:
            return tuple(k)
        if v < 0:
            return tuple(-x for x in k)
    return tuple(k)


def build_poly_subspace(space: GriddedSpace, degree: int,
                        ortho_tol=None) -> Subspace:
    """Polynomials of degree at most ``degree`` on a univariate box grid.

    Seeds the raw basis with Legendre polynomials so the pre-orthonormalization
    Gram stays well conditioned at any degree used here.
    """
    if space.domain != "box" or space.dim != 1:
        raise ValueError("polynomial subspaces are built on a 1-d box grid")
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    raw = np.polynomial.legendre.legvander(space.points[:, 0], degree)
    return orthonormalize(raw, space, ortho_tol=ortho_tol)


def orthonormalize(raw, space: GriddedSpace, frequencies=None,
                   ortho_tol=None, gram_floor=None) -> Subspace:
    """Symmetric (Gram inverse square root) orthonormalization of raw columns.

    The symmetric variant is used instead of a triangular one so that the
    output does not depend on column order beyond a permutation.  The span is
    unchanged: returned columns are linear combinations of the input columns.

    Raises
    ------
    DegeneracyError
        If the smallest Gram eigenvalue is at or below ``gram_floor``
        (default 1e-10); the offending eigenvalue is reported.
    """
    ortho_tol = DEFAULT_TOLS.orthonormality if ortho_tol is None else ortho_tol
    gram_floor = DEFAULT_TOLS.gram_floor if gram_floor is None else gram_floor
    raw = np.asarray(raw, dtype=float)
    if raw.ndim != 2 or raw.shape[0] != space.size:
        raise ValueError("raw basis values must be a (grid, N) array")
    gram = raw.T @ (space.weights[:, None] * raw)
    evals, evecs = np.linalg.eigh(gram)
    if evals[0] <= gram_floor:
        raise DegeneracyError(
            f"raw basis is rank deficient: smallest Gram eigenvalue {evals[0]:.3e} "
            f"<= {gram_floor:.1e}",
            eigenvalue=float(evals[0]),
        )
    inv_sqrt = (evecs / np.sqrt(evals)) @ evecs.T
    return Subspace(space, raw @ inv_sqrt, frequencies=frequencies,
                    ortho_tol=ortho_tol)


# ---------------------------------------------------------------------------
# Pointwise quantities
# ---------------------------------------------------------------------------

def christoffel(subspace: Subspace) -> ChristoffelProfile:
    """Profile ``w(x) = (sum_j u_j(x)^2)^(1/2)`` over the grid.

    ``w`` depends only on the span, not on the orthonormal basis chosen, and
    its maximum is the exact Nikol'skii (2, infinity) constant of the grid
    space.  The reciprocal of ``w`` is the classical Christoffel function.
    """
    w = np.sqrt(np.einsum("ij,ij->i", subspace.values, subspace.values))
    return ChristoffelProfile(values=w, h2inf=float(w.max()))


def dirichlet_eval(subspace: Subspace, i: int, j: int) -> float:
    """Reproducing kernel value ``sum_k u_k(x_i) u_k(x_j)`` at two grid points."""
    g = subspace.space.size
    if not (0 <= i < g and 0 <= j < g):
        raise IndexError("grid index out of range")
    return float(subspace.values[i] @ subspace.values[j])


def nikolskii_constant(subspace: Subspace, q: float, refine_top: int = 32,
                       iters: int = 400) -> NikolskiiEstimate:
    """Constant H of the inequality ``sup |f| <= H ||f||_q`` on the grid.

    For q = 2 the supremum is attained by the reproducing element, so the
    returned value ``max_x w(x)`` is exact.  For other q the value is a lower
    bound: per grid point, ascent on ``|f(x)| / ||f||_q`` is started from the
    q = 2 extremizer, and only the most promising points are refined.
    """
    if q < 1:
        raise ValueError("q must be at least 1")
    prof = christoffel(subspace)
    if q == 2:
        return NikolskiiEstimate(q=2.0, value=prof.h2inf, exact=True)

    vals = subspace.values
    w = subspace.space.weights
    # Ratio of the q=2 extremizer (kernel column) per point, in blocks.
    g = subspace.space.size
    ratios = np.empty(g)
    for start in range(0, g, 512):
        block = vals[start:start + 512] @ vals.T          # kernel rows
        qn = (np.abs(block) ** q @ w) ** (1.0 / q)
        diag = np.einsum("ij,ij->i", vals[start:start + 512],
                         vals[start:start + 512])
        ratios[start:start + 512] = diag / np.where(qn > 0, qn, np.inf)

    order = np.argsort(-ratios)[:refine_top]
    amat = vals[order]                    # per-point linear objectives

    def num(cmat):
        return np.einsum("ij,ij->i", amat, cmat), amat.copy()

    def den(cmat):
        y = cmat @ vals.T
        absy = np.abs(y)
        raw = absy ** q @ w
        norm = raw ** (1.0 / q)
        grads = ((w * absy ** (q - 1.0) * np.sign(y)) @ vals) \
            / np.maximum(norm ** (q - 1.0), 1e-300)[:, None]
        return norm, grads

    refined, _ = batched_refine(amat.copy(), num, den, sense=+1, iters=iters)
    return NikolskiiEstimate(q=float(q), value=float(refined.max()), exact=False)


# ---------------------------------------------------------------------------
# Optimal design
# ---------------------------------------------------------------------------

def g_optimal_design(raw, space: GriddedSpace, tol=None,
                     max_iters: int = 2000) -> DesignMeasure:
    """G-optimal design measure by multiplicative reweighting.

    Iterates ``weight_i <- weight_i * d_i / N`` where ``d_i`` is the inverse
    Christoffel function squared of the raw span under the current measure
    (Titterington's update for D-optimal design).  Stops when
    ``max_i d_i <= N (1 + tol)``; the resulting measure certifies
    ``sup |f| <= sqrt(N (1 + tol)) ||f||_2`` on the grid.

    On non-convergence the best iterate is returned with ``converged=False``;
    the log-determinant objective history is recorded either way.
    """
    tol = DEFAULT_TOLS.design if tol is None else tol
    raw = np.asarray(raw, dtype=float)
    n = raw.shape[1]
    weights = space.weights.copy()
    history = []
    gvalue = np.inf
    it = 0
    for it in range(max_iters + 1):
        m_mat = raw.T @ (weights[:, None] * raw)
        try:
            chol = scipy.linalg.cholesky(m_mat, lower=True)
        except scipy.linalg.LinAlgError as exc:
            raise DegeneracyError(
                "design Gram lost positive definiteness; raw basis must be "
                "full rank on the grid"
            ) from exc
        half = scipy.linalg.solve_triangular(chol, raw.T, lower=True)
        d = np.einsum("ji,ji->i", half, half)
        history.append(2.0 * float(np.log(np.diag(chol)).sum()))
        gvalue = float(d.max())
        if gvalue <= n * (1.0 + tol):
            return DesignMeasure(weights, gvalue, it, True, np.asarray(history))
        weights = weights * d / n
        weights /= weights.sum()
    return DesignMeasure(weights, gvalue, it, False, np.asarray(history))


def design_subspace(raw, space: GriddedSpace, design: DesignMeasure,
                    frequencies=None) -> Subspace:
    """Orthonormalize ``raw`` with respect to a design measure on ``space``."""
    return orthonormalize(raw, space.with_weights(design.weights),
                          frequencies=frequencies)
