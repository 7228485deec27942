"""Sampling point sets: random draws, Christoffel reweighting, and
deterministic barrier-method sparsification, plus the closed-form
sample-size rules used to size them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from .config import DEFAULT_TOLS
from .errors import NumericalError
from .subspace import FrequencySet, GriddedSpace, Subspace, christoffel, orthonormalize

__all__ = [
    "PointSet",
    "SampleSizeQuery",
    "SAMPLE_SIZE_RULES",
    "sample_iid",
    "sample_christoffel",
    "bss_select",
    "bss_condition_bound",
    "augment_constant",
    "required_m",
    "sparse_weighted_factor",
]


@dataclass(frozen=True)
class PointSet:
    """Sampling points as grid indices with nonnegative weights.

    ``provenance`` records the generating method, its seed (when randomized)
    and parameters, so a set can be reproduced byte for byte.
    """

    indices: np.ndarray
    weights: np.ndarray
    provenance: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        idx = np.array(self.indices, dtype=np.int64)
        w = np.array(self.weights, dtype=float)
        if idx.ndim != 1 or idx.size < 1:
            raise ValueError("a point set needs at least one point")
        if w.shape != idx.shape:
            raise ValueError("one weight per point required")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        idx.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "provenance", dict(self.provenance))

    @property
    def m(self) -> int:
        return self.indices.size

    def coordinates(self, space: GriddedSpace) -> np.ndarray:
        return space.points[self.indices]


def _rng(seed):
    return np.random.default_rng(seed)


def _draw_indices(weights, m, rng):
    # Inverse-CDF draws: prefix-stable, so (seed, m) and (seed, m') share
    # their first min(m, m') points.
    cum = np.cumsum(weights)
    cum[-1] = 1.0
    return np.searchsorted(cum, rng.random(m), side="right").astype(np.int64)


def sample_iid(space: GriddedSpace, m: int, seed) -> PointSet:
    """``m`` iid draws from the grid measure, each with weight ``1/m``."""
    if m < 1:
        raise ValueError("m must be at least 1")
    idx = _draw_indices(space.weights, m, _rng(seed))
    return PointSet(
        idx,
        np.full(m, 1.0 / m),
        provenance={"method": "iid", "seed": _seed_repr(seed), "m": m},
    )


def sample_christoffel(subspace: Subspace, m: int, seed,
                       importance_weights: bool = True) -> PointSet:
    """Draws from the Christoffel-reweighted measure of a subspace.

    Points are iid from the density ``U(x) = w(x)^2 / N`` against the grid
    measure (cells where ``w`` vanishes are never drawn).  With importance
    weights ``lambda_j = N / (m * w(xi_j)^2)`` the weighted sum of squares is
    an unbiased estimator of the squared grid L2 norm for every fixed
    function of the subspace.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    n = subspace.n_dim
    w2 = christoffel(subspace).values ** 2
    density = subspace.space.weights * w2 / n
    density = density / density.sum()
    idx = _draw_indices(density, m, _rng(seed))
    if importance_weights:
        lam = n / (m * w2[idx])
    else:
        lam = np.full(m, 1.0 / m)
    return PointSet(
        idx,
        lam,
        provenance={
            "method": "christoffel",
            "seed": _seed_repr(seed),
            "m": m,
            "importance_weights": bool(importance_weights),
        },
    )


def _seed_repr(seed):
    if isinstance(seed, np.random.SeedSequence):
        return {"entropy": seed.entropy, "spawn_key": list(seed.spawn_key)}
    return seed


# ---------------------------------------------------------------------------
# Deterministic barrier-method sparsification
# ---------------------------------------------------------------------------

def bss_condition_bound(b: float) -> float:
    """Guaranteed frame-condition bound ``(b+1+2*sqrt(b)) / (b+1-2*sqrt(b))``."""
    if b <= 1.0:
        raise ValueError("oversampling factor b must exceed 1")
    rb = math.sqrt(b)
    return (b + 1.0 + 2.0 * rb) / (b + 1.0 - 2.0 * rb)


def bss_select(subspace: Subspace, b: float) -> PointSet:
    """Select at most ``ceil(b*N)`` weighted grid points with two-sided
    spectral guarantees (Batson-Spielman-Srivastava barrier method).

    The returned weights are rescaled so the frame matrix
    ``F = sum_j lambda_j u(xi_j) u(xi_j)^T`` has smallest eigenvalue exactly
    one; its largest eigenvalue is then at most ``bss_condition_bound(b)``.
    Fully deterministic: among maximizers of the barrier quotient the
    smallest grid index wins.

    Raises
    ------
    NumericalError
        If no grid point satisfies the barrier inequalities at some step;
        the failing step index is reported.
    """
    if b <= 1.0:
        raise ValueError("oversampling factor b must exceed 1")
    n = subspace.n_dim
    om = subspace.space.weights
    vecs = subspace.values * np.sqrt(om)[:, None]   # rows v_i, sum v v^T = I
    steps = math.ceil(b * n)

    rb = math.sqrt(b)
    delta_l, delta_u = 1.0, (rb + 1.0) / (rb - 1.0)
    lo = -n * rb
    up = n * (b + rb) / (rb - 1.0)

    a_mat = np.zeros((n, n))
    eye = np.eye(n)
    chosen: dict[int, float] = {}
    for step in range(steps):
        up_new = up + delta_u
        lo_new = lo + delta_l
        evals = np.linalg.eigvalsh(a_mat)
        if evals.max() >= up_new or evals.min() <= lo_new:
            raise NumericalError(
                "barrier invariants violated", context={"step": step}
            )
        pot_u = float(np.sum(1.0 / (up - evals)))
        pot_u_new = float(np.sum(1.0 / (up_new - evals)))
        pot_l = float(np.sum(1.0 / (evals - lo)))
        pot_l_new = float(np.sum(1.0 / (evals - lo_new)))

        inv_u = np.linalg.inv(up_new * eye - a_mat)
        inv_l = np.linalg.inv(a_mat - lo_new * eye)
        vu = vecs @ inv_u                       # row i is (u'I - A)^-1 v_i
        vl = vecs @ inv_l
        quad_u2 = np.einsum("ij,ij->i", vu, vu)
        quad_u1 = np.einsum("ij,ij->i", vecs, vu)
        quad_l2 = np.einsum("ij,ij->i", vl, vl)
        quad_l1 = np.einsum("ij,ij->i", vecs, vl)

        upper = quad_u2 / (pot_u - pot_u_new) + quad_u1
        lower = quad_l2 / (pot_l_new - pot_l) - quad_l1

        quot = lower / upper
        pick = int(np.argmax(quot))          # first maximizer = smallest index
        if not lower[pick] >= upper[pick] * (1.0 - 1e-9):
            raise NumericalError(
                "no admissible barrier vector",
                context={"step": step, "best_quotient": float(quot[pick])},
            )
        weight = 2.0 / (upper[pick] + lower[pick])
        a_mat += weight * np.outer(vecs[pick], vecs[pick])
        chosen[pick] = chosen.get(pick, 0.0) + weight
        up, lo = up_new, lo_new

    evals = np.linalg.eigvalsh(a_mat)
    scale = 1.0 / float(evals[0])
    idx = np.array(sorted(chosen), dtype=np.int64)
    lam = np.array([chosen[i] * om[i] * scale for i in idx])
    return PointSet(
        idx,
        lam,
        provenance={
            "method": "bss",
            "b": float(b),
            "budget": steps,
            "condition_bound": bss_condition_bound(b),
        },
    )


def augment_constant(subspace: Subspace) -> Subspace:
    """Span of the subspace together with the constant function.

    Returns the input unchanged when constants already lie in the span
    (residual below the in-span tolerance); otherwise appends the normalized
    residual, raising the dimension by one.  Downstream, certifying the
    augmented space bounds the total weight of a point set, because the
    constant function turns the upper frame inequality into a weight-sum
    inequality.
    """
    w = subspace.space.weights
    ones = np.ones(subspace.space.size)
    coef = subspace.values.T @ (w * ones)
    resid = ones - subspace.values @ coef
    rnorm = math.sqrt(float(resid @ (w * resid)))
    if rnorm <= DEFAULT_TOLS.span_residual:
        return subspace
    extra = resid / rnorm
    vals = np.concatenate([subspace.values, extra[:, None]], axis=1)
    freqs = subspace.frequencies
    if freqs is not None:
        zero = tuple([0] * freqs.dim)
        if zero not in freqs.freqs:
            freqs = FrequencySet.from_list(list(freqs.freqs) + [zero],
                                           dim=freqs.dim)
    return Subspace(subspace.space, vals, frequencies=freqs,
                    ortho_tol=subspace.ortho_tol)


# ---------------------------------------------------------------------------
# Sample-size rules
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SampleSizeQuery:
    """Parameters feeding the closed-form sample-size rules.

    Unknown absolute constants default to one (``c`` scales lower-bound-style
    rules, ``C`` upper-bound-style ones); reports echo the values used.
    All logarithms in the rules are base 2.
    """

    N: int
    q: float | None = None
    H: float | None = None
    delta: float | None = None
    eps: float | None = None
    B: float | None = None
    k: float | None = None
    b: float | None = None
    c: float = 1.0
    C: float = 1.0

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be a positive integer")
        if self.delta is not None and not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if self.eps is not None and not 0 < self.eps < 1:
            raise ValueError("eps must lie in (0, 1)")


SAMPLE_SIZE_RULES = (
    "nikolskii_iid",      # c * delta^-2 * q^2 * H^q * N,  q >= 2
    "l1_relative",        # C * eps^-2 * N * log2(N)
    "entropy_chaining",   # C * q * 4^q * N^(2-1/q) * B^q * log-squared term
    "growth_uniform",     # c / log2(B)^2 * N^(k+2) * log2(N)^2
    "weighted_relative",  # C * eps^-2 * N
    "sparse_weighted",    # ceil(b * N), companion factor C / (b-1)^2
)


def _need(query, rule, *names):
    vals = []
    for name in names:
        v = getattr(query, name)
        if v is None:
            raise ValueError(f"rule {rule!r} requires parameter {name!r}")
        vals.append(v)
    return vals


def required_m(query: SampleSizeQuery, rule: str) -> int:
    """Ceiling of the selected sample-size formula. Pure arithmetic."""
    n = query.N
    if rule == "nikolskii_iid":
        q, h, delta = _need(query, rule, "q", "H", "delta")
        if q < 2:
            raise ValueError("rule 'nikolskii_iid' requires q >= 2")
        value = query.c * delta ** -2 * q ** 2 * h ** q * n
    elif rule == "l1_relative":
        (eps,) = _need(query, rule, "eps")
        value = query.C * eps ** -2 * n * math.log2(max(n, 1))
    elif rule == "entropy_chaining":
        q, b_ent = _need(query, rule, "q", "B")
        if q <= 1:
            raise ValueError("rule 'entropy_chaining' requires q > 1")
        if b_ent < 1:
            raise ValueError("rule 'entropy_chaining' requires B >= 1")
        inner = math.log2(4.0 * (4.0 * b_ent) ** q * n * q)
        value = (query.C * q * 4.0 ** q * n ** (2.0 - 1.0 / q) * b_ent ** q
                 * math.log2(2.0 * n * inner) ** 2)
    elif rule == "growth_uniform":
        b_ent, k = _need(query, rule, "B", "k")
        if b_ent <= 1:
            raise ValueError("rule 'growth_uniform' requires B > 1")
        value = query.c / math.log2(b_ent) ** 2 * n ** (k + 2) * math.log2(n) ** 2
    elif rule == "weighted_relative":
        (eps,) = _need(query, rule, "eps")
        value = query.C * eps ** -2 * n
    elif rule == "sparse_weighted":
        (b,) = _need(query, rule, "b")
        if b <= 1:
            raise ValueError("rule 'sparse_weighted' requires b > 1")
        value = b * n
    else:
        raise ValueError(f"unknown sample-size rule {rule!r}")
    return max(1, math.ceil(value - 1e-12))


def sparse_weighted_factor(b: float, C: float = 1.0) -> float:
    """Upper frame constant ``C / (b - 1)^2`` paired with ``ceil(b*N)`` points."""
    if b <= 1:
        raise ValueError("b must exceed 1")
    return C / (b - 1.0) ** 2
