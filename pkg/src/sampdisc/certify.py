"""Certified discretization constants.

Three certifiers with different precision/price points:

* ``certify_l2``: exact two-sided L2 constants as extreme eigenvalues of the
  weighted frame matrix; valid for every function of the subspace at once.
* ``certify_uniform``: the exact (at grid resolution) uniform-norm constant,
  one linear program per grid point.
* ``certify_lq``: empirical two-sided Lq constants from randomized ratio
  ascent; one-sided by construction and flagged as such.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg
from scipy.optimize import linprog

from ._ascent import batched_refine
from .config import DEFAULT_TOLS
from .errors import NumericalError
from .pointset import PointSet, sample_iid
from .subspace import Subspace, christoffel, nikolskii_constant

__all__ = [
    "MZReport",
    "UniformReport",
    "ChainReport",
    "certify_l2",
    "certify_uniform",
    "certify_lq",
    "mc_success_probability",
    "success_curve",
    "uniform_chain_check",
]


@dataclass(frozen=True)
class MZReport:
    """Two-sided discretization constants ``C1 <= C2`` for one exponent q.

    ``method`` is "exact-eigen" (constants are extreme eigenvalues of the
    frame matrix, valid for all functions simultaneously) or "empirical"
    (ratio extremes over sampled directions; then C1 can only overestimate
    and C2 only underestimate the true constants).
    """

    q: float
    m: int
    c1: float
    c2: float
    method: str
    tolerance: float
    resolution: int
    seed: object = None
    trials: int | None = None
    certificate: np.ndarray | None = field(default=None, repr=False)


@dataclass(frozen=True)
class UniformReport:
    """Uniform-norm constant ``D`` of a point set, exact at grid resolution.

    ``d`` is infinite exactly when some nonzero function of the subspace
    vanishes at every sample point; ``certificate`` then holds its
    coefficients.
    """

    d: float
    m: int
    argmax_index: int | None
    coefficients: np.ndarray | None
    resolution: int
    tolerance: float
    certificate: np.ndarray | None = field(default=None, repr=False)


@dataclass(frozen=True)
class ChainReport:
    """Uniform constant compared against the Nikol'skii / L2-frame bound."""

    d: float
    h: float
    c1_normalized: float
    bound: float
    ok: bool


# ---------------------------------------------------------------------------
# Exact L2 certification
# ---------------------------------------------------------------------------

def frame_matrix(subspace: Subspace, points: PointSet) -> np.ndarray:
    rows = subspace.values[points.indices]
    return rows.T @ (points.weights[:, None] * rows)


def certify_l2(subspace: Subspace, points: PointSet, eig_tol=None) -> MZReport:
    """Exact L2 constants: extreme eigenvalues of the weighted frame matrix.

    Solves the generalized problem against the grid Gram so the report is
    invariant under rescaling the basis values.  A singular frame (C1 = 0)
    is reported together with a null-space certificate vector.
    """
    eig_tol = DEFAULT_TOLS.eigen if eig_tol is None else eig_tol
    fmat = frame_matrix(subspace, points)
    gram = subspace.gram()
    evals, evecs = scipy.linalg.eigh(fmat, gram)
    c1 = float(max(evals[0], 0.0))
    c2 = float(evals[-1])
    cert = None
    if evals[0] <= eig_tol:
        c1 = 0.0
        # Prefer the null vector of the evaluation rows themselves: its
        # point evaluations vanish to machine precision.
        rows = subspace.values[points.indices]
        _, svals, vt = scipy.linalg.svd(rows)
        if rows.shape[0] < rows.shape[1] or svals[-1] <= 1e-9:
            cert = vt[-1] / np.linalg.norm(vt[-1])
        else:
            cert = evecs[:, 0] / np.linalg.norm(evecs[:, 0])
    return MZReport(
        q=2.0,
        m=points.m,
        c1=c1,
        c2=c2,
        method="exact-eigen",
        tolerance=eig_tol,
        resolution=subspace.space.size,
        certificate=cert,
    )


# ---------------------------------------------------------------------------
# LP core (shared with the Remez module)
# ---------------------------------------------------------------------------

def sup_over_constraints(values, constraint_idx, objective_idx, feas_tol=None,
                         initial_best=-np.inf, rank_tol=1e-9):
    """Exact supremum machinery behind the uniform and Remez constants.

    Computes ``max`` over rows ``x`` in ``objective_idx`` of the linear
    program value ``max_c values[x] @ c`` subject to
    ``|values[j] @ c| <= 1`` for ``j`` in ``constraint_idx``.

    Returns ``(value, argmax_row, coefficients, certificate)``.  When the
    constraint rows are rank deficient the supremum is infinite; the
    certificate is a unit coefficient vector whose constraint evaluations all
    vanish.  Rows whose cheap ellipsoid upper bound cannot beat the running
    best are skipped, which leaves the exact maximum unchanged.
    """
    feas_tol = DEFAULT_TOLS.lp_feasibility if feas_tol is None else feas_tol
    emat = values[np.asarray(constraint_idx, dtype=np.int64)]
    n = values.shape[1]
    svals = scipy.linalg.svd(emat, compute_uv=False) if emat.size else np.zeros(1)
    if emat.shape[0] < n or svals[-1] <= rank_tol:
        _, _, vt = scipy.linalg.svd(emat) if emat.size else (None, None, np.eye(n))
        cert = vt[-1] / np.linalg.norm(vt[-1])
        return math.inf, None, None, cert

    objective_idx = np.asarray(objective_idx, dtype=np.int64)
    if objective_idx.size == 0:
        return initial_best, None, None, None

    # Two cheap sound upper bounds per objective row drive the pruning
    # order; both leave the exact maximum unchanged.  First, the feasible
    # set lies inside the ellipsoid {c : c^T (E^T E) c <= m}.
    ete = emat.T @ emat
    try:
        chol = scipy.linalg.cho_factor(ete)
        half = scipy.linalg.cho_solve(chol, values[objective_idx].T)
        quad = np.einsum("ij,ji->i", values[objective_idx], half)
        ubound = np.sqrt(np.maximum(emat.shape[0] * quad, 0.0))
    except scipy.linalg.LinAlgError:
        ubound = np.full(objective_idx.size, np.inf)
    # Second, interpolation through n well-spread constraint rows (greedy
    # maximal volume via pivoted QR) caps every feasible function by the
    # Lebesgue function of those rows; a small inflation absorbs the solve's
    # rounding so the cap stays sound.
    _, rmat, piv = scipy.linalg.qr(emat.T, pivoting=True, mode="economic")
    rdiag = np.abs(np.diag(rmat))
    if rdiag.min() > 1e-8 * rdiag.max():
        vy = emat[piv[:n]]
        z = scipy.linalg.solve(vy.T, values[objective_idx].T)
        leb = np.abs(z).sum(axis=0) * (1.0 + 1e-6) + 1e-9
        ubound = np.minimum(ubound, leb)

    order = np.argsort(-ubound)
    options = {
        "primal_feasibility_tolerance": max(feas_tol, 1e-10),
        "dual_feasibility_tolerance": max(feas_tol, 1e-10),
    }
    base = piv[:n] if rdiag.min() > 1e-8 * rdiag.max() else None
    best = initial_best
    best_row = None
    best_coef = None
    work = None   # binding rows barely move between nearby objectives
    for pos in order:
        if ubound[pos] <= best + 1e-12:
            break
        row = objective_idx[pos]
        val, coef, work = _lp_max(values[row], emat, base, feas_tol, options,
                                  row, work)
        if val > best:
            best, best_row, best_coef = val, int(row), coef
    return float(best), best_row, best_coef, None


def _lp_max(objective, emat, base, feas_tol, options, row, work=None):
    """Exact ``max objective @ c`` over ``|emat c| <= 1`` by row generation.

    Starts from a full-rank working set (so every relaxation is bounded) and
    adds the most violated rows until the relaxed optimum satisfies all
    constraints; then relaxation and full problem agree.  ``work`` seeds the
    working set, letting a caller reuse the binding rows of a previous solve.
    """
    n = emat.shape[1]
    m_rows = emat.shape[0]
    if base is None or len(base) < min(n, m_rows):
        base = np.arange(min(m_rows, 4 * n))
    work = np.unique(base) if work is None else np.unique(
        np.concatenate([base, work]))
    for _ in range(60):
        rows = emat[work]
        a_ub = np.vstack([rows, -rows])
        res = linprog(-objective, A_ub=a_ub, b_ub=np.ones(a_ub.shape[0]),
                      bounds=[(None, None)] * n, method="highs",
                      options=options)
        if res.status == 3:
            # Working set leaves a free direction; densify it and retry.
            if work.size == m_rows:
                raise NumericalError(
                    "LP unbounded on full constraint set",
                    context={"grid_index": int(row)})
            stride = max(1, m_rows // max(work.size, 1) // 2)
            work = np.unique(np.concatenate([work,
                                             np.arange(0, m_rows, stride)]))
            continue
        if res.status != 0:
            raise NumericalError(
                "LP solver failed", context={"grid_index": int(row),
                                             "status": int(res.status)}
            )
        evals = emat @ res.x
        viol = np.abs(evals) - 1.0
        worst = np.argsort(-viol)[: 8 * n]
        worst = worst[viol[worst] > feas_tol]
        if worst.size == 0:
            return -res.fun, res.x.copy(), work
        work = np.unique(np.concatenate([work, worst]))
    raise NumericalError("row generation failed to converge",
                         context={"grid_index": int(row)})


def certify_uniform(subspace: Subspace, points: PointSet,
                    feas_tol=None) -> UniformReport:
    """Exact uniform-norm constant of a point set at grid resolution.

    ``D`` is the largest value over grid points ``x`` of
    ``max f(x)`` subject to ``|f| <= 1`` at every sample point, i.e. the best
    constant in ``sup |f| <= D max_j |f(xi_j)|`` over the subspace restricted
    to the grid.  Weights play no role here; only the sample locations do.
    """
    feas_tol = DEFAULT_TOLS.lp_feasibility if feas_tol is None else feas_tol
    g = subspace.space.size
    sample = np.unique(points.indices)
    rest = np.setdiff1d(np.arange(g), sample, assume_unique=True)
    value, row, coef, cert = sup_over_constraints(
        subspace.values, sample, rest, feas_tol=feas_tol, initial_best=1.0
    )
    if math.isinf(value):
        return UniformReport(math.inf, points.m, None, None, g, feas_tol,
                             certificate=cert)
    return UniformReport(float(value), points.m, row, coef, g, feas_tol)


def uniform_chain_check(subspace: Subspace, points: PointSet,
                        tol: float = 1e-6) -> ChainReport:
    """Check ``D <= H / sqrt(C1)`` with sum-normalized weights.

    ``H`` is the exact (2, infinity) Nikol'skii constant and ``C1`` the lower
    frame eigenvalue after rescaling the weights to total mass one (the
    normalization under which the chain of inequalities behind the bound is
    valid for any weighted point set).
    """
    d = certify_uniform(subspace, points).d
    h = nikolskii_constant(subspace, 2).value
    normalized = PointSet(points.indices,
                          points.weights / points.weights.sum(),
                          provenance=dict(points.provenance))
    c1 = certify_l2(subspace, normalized).c1
    bound = math.inf if c1 <= 0 else h / math.sqrt(c1)
    return ChainReport(d=d, h=h, c1_normalized=c1, bound=bound,
                       ok=bool(d <= bound + tol))


# ---------------------------------------------------------------------------
# Empirical Lq certification
# ---------------------------------------------------------------------------

def _qnorm_batch(rows, weights, q):
    """Batched ``C -> (sum_i weights_i |rows_i c_k|^q per row, gradients)``."""

    def form(cmat):
        y = cmat @ rows.T
        absy = np.abs(y)
        vals = absy ** q @ weights
        grads = q * ((weights * absy ** (q - 1.0) * np.sign(y)) @ rows)
        return vals, grads

    return form


def certify_lq(subspace: Subspace, points: PointSet, q: float, trials: int,
               seed, iters: int = 250) -> MZReport:
    """Empirical two-sided Lq constants of a weighted point set.

    Extremizes the ratio ``sum_j lambda_j |f(xi_j)|^q / ||f||_q^q`` over
    ``trials`` random coefficient directions plus the exact L2 extremizers,
    each refined by projected ratio ascent/descent.  The reported interval
    ``[C1, C2]`` is inner: C1 is an upper bound on the true lower constant
    and C2 a lower bound on the true upper constant.
    """
    if q < 1:
        raise ValueError("q must be at least 1")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    n = subspace.n_dim
    rows = subspace.values[points.indices]
    num = _qnorm_batch(rows, points.weights, q)
    den = _qnorm_batch(subspace.values, subspace.space.weights, q)

    rng = np.random.default_rng(seed)
    evals, evecs = scipy.linalg.eigh(frame_matrix(subspace, points),
                                     subspace.gram())
    starts = np.vstack([rng.standard_normal((trials, n)),
                        evecs[:, 0], evecs[:, -1]])

    r_hi, _ = batched_refine(starts, num, den, sense=+1, iters=iters)
    r_lo, _ = batched_refine(starts, num, den, sense=-1, iters=iters)
    hi = float(r_hi.max())
    lo = float(r_lo.min())
    return MZReport(
        q=float(q),
        m=points.m,
        c1=float(lo),
        c2=float(hi),
        method="empirical",
        tolerance=DEFAULT_TOLS.ascent,
        resolution=subspace.space.size,
        seed=_seed_field(seed),
        trials=trials,
    )


def _seed_field(seed):
    if isinstance(seed, np.random.SeedSequence):
        return {"entropy": seed.entropy, "spawn_key": list(seed.spawn_key)}
    return seed


# ---------------------------------------------------------------------------
# Monte Carlo success frequency
# ---------------------------------------------------------------------------

def mc_success_probability(subspace: Subspace, q: float, m: int, trials: int,
                           seed, lq_trials: int = 6,
                           iters: int = 150) -> float:
    """Fraction of iid m-point draws whose empirical Lq constants stay
    within [1/2, 3/2].

    Per trial, ``m`` points are drawn iid from the grid measure with weights
    ``1/m`` and certified; for q = 2 the exact eigenvalue certificate is
    used, otherwise the empirical one.  Per-trial seeds are derived from
    ``(seed, trial)`` only, so sweeps over ``m`` sharing a seed are coupled:
    a trial's draws for smaller ``m`` are a prefix of its draws for larger
    ``m``.
    """
    if m < 1 or trials < 1:
        raise ValueError("m and trials must be at least 1")
    hits = 0
    for t in range(trials):
        pts = sample_iid(subspace.space, m,
                         seed=np.random.SeedSequence((_entropy(seed), t)))
        if q == 2:
            rep = certify_l2(subspace, pts)
        else:
            rep = certify_lq(subspace, pts, q, trials=lq_trials,
                             seed=np.random.SeedSequence((_entropy(seed), t, 1)),
                             iters=iters)
        if rep.c1 >= 0.5 and rep.c2 <= 1.5:
            hits += 1
    return hits / trials


def _entropy(seed):
    return int(seed) if not isinstance(seed, np.random.SeedSequence) else seed.entropy


def success_curve(subspace: Subspace, q: float, ms: Sequence[int],
                  trials: int, seed, **kwargs) -> list[float]:
    """``mc_success_probability`` over an m-sweep with shared paired seeds."""
    return [mc_success_probability(subspace, q, m, trials, seed, **kwargs)
            for m in ms]
