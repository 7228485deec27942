"""Reproducing-kernel L1 norms, de la Vallee Poussin constructions, and the
derived upper bounds on constrained bilinear approximation of the kernel."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .subspace import FrequencySet, GriddedSpace, Subspace, christoffel

__all__ = [
    "VPRecord",
    "VPSearchResult",
    "KernelReport",
    "dirichlet_l1",
    "vp_classical",
    "vp_search",
    "bilinear_point_budget",
    "kernel_report",
]


@dataclass(frozen=True)
class VPRecord:
    """A real even trigonometric kernel with unit coefficients on a target set.

    ``freqs`` lists the (symmetric) support, ``coeffs`` the matching Fourier
    coefficients, and ``l1_norm`` the grid quadrature L1 norm.  ``m_terms``
    is the support cardinality, the M of the M-term budget.
    """

    freqs: FrequencySet
    coeffs: np.ndarray
    m_terms: int
    l1_norm: float
    resolution: int


@dataclass(frozen=True)
class VPSearchResult:
    record: VPRecord
    objective_trace: np.ndarray = field(repr=False, default=None)


@dataclass(frozen=True)
class KernelReport:
    """Kernel-row L1 norms with the bilinear bound and point budget they imply.

    ``l1_max`` bounds the zero-term bilinear approximation error from above;
    a de la Vallee Poussin record sharpens it to ``vp.l1_norm`` with
    ``bilinear_terms`` free terms.  ``point_budget`` evaluates the matching
    sample-count formula ``ceil(c1 (M+N) N log2((M+N) N))``.
    """

    l1_max: float
    diag_sqrt_max: float
    l1_values: np.ndarray
    vp: VPRecord | None
    bilinear_bound: float
    bilinear_terms: int
    point_budget: int
    resolution: int
    c1: float


def dirichlet_l1(subspace: Subspace, block: int = 256):
    """Quadrature L1 norm of every kernel row, and the maximum over rows.

    Row ``x`` of the kernel is ``y -> sum_j u_j(x) u_j(y)``; by Cauchy-Schwarz
    in the grid measure its L1 norm never exceeds ``sqrt`` of the diagonal,
    so the maximum is at most the subspace's Nikol'skii (2, infinity)
    constant.
    """
    vals = subspace.values
    w = subspace.space.weights
    g = subspace.space.size
    out = np.empty(g)
    for start in range(0, g, block):
        rows = vals[start:start + block] @ vals.T
        out[start:start + block] = np.abs(rows) @ w
    return out, float(out.max())


# ---------------------------------------------------------------------------
# de la Vallee Poussin kernels
# ---------------------------------------------------------------------------

def vp_classical(n: int, resolution: int = 4096) -> VPRecord:
    """Classical univariate construction for the frequency box ``[-n, n]``.

    Trapezoidal coefficient profile: one on ``|k| <= n``, then linear decay
    ``(2n + 1 - |k|) / (n + 1)`` until the support ends at ``|k| = 2n``, so
    the kernel has ``M = 4n + 1`` terms.  Equals the average of the ``n + 1``
    partial-sum kernels of orders ``n`` through ``2n``, whose L1 norm is
    classically below 3.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    ks = np.arange(-2 * n, 2 * n + 1)
    coeffs = np.minimum(1.0, (2 * n + 1 - np.abs(ks)) / (n + 1))
    freqs = FrequencySet.from_list([(int(k),) for k in ks])
    order = np.argsort([k[0] for k in freqs.freqs])
    assert np.all(order == np.arange(ks.size))
    l1 = _even_kernel_l1(freqs, coeffs, resolution)
    return VPRecord(freqs=freqs, coeffs=coeffs, m_terms=int(ks.size),
                    l1_norm=l1, resolution=resolution)


def _kernel_grid(dim: int, resolution: int) -> GriddedSpace:
    return GriddedSpace.torus(dim, resolution)


def _cos_matrix(freqs: FrequencySet, space: GriddedSpace):
    """Columns ``x -> cos(<k, x>)`` per representative, with pair multiplicity."""
    reps = []
    mult = []
    seen = set()
    for k in freqs.freqs:
        rep = _rep(k)
        if rep in seen:
            continue
        seen.add(rep)
        reps.append(rep)
        mult.append(1.0 if all(v == 0 for v in rep) else 2.0)
    phases = space.points @ np.asarray(reps, dtype=float).T
    return np.cos(phases) * np.asarray(mult), reps


def _rep(k):
    for v in k:
        if v > 0:
            return tuple(k)
        if v < 0:
            return tuple(-x for x in k)
    return tuple(k)


def _even_kernel_l1(freqs, coeffs, resolution):
    space = _kernel_grid(freqs.dim, resolution)
    cmat, reps = _cos_matrix(freqs, space)
    rep_coeff = _coeffs_by_rep(freqs, coeffs, reps)
    kernel = cmat @ rep_coeff
    return float(np.abs(kernel) @ space.weights)


def _coeffs_by_rep(freqs, coeffs, reps):
    lookup = {k: float(c) for k, c in zip(freqs.freqs, coeffs)}
    out = []
    for rep in reps:
        neg = tuple(-v for v in rep)
        c_pos, c_neg = lookup.get(rep), lookup.get(neg)
        vals = [v for v in (c_pos, c_neg) if v is not None]
        if c_pos is not None and c_neg is not None and abs(c_pos - c_neg) > 1e-12:
            raise ValueError(f"asymmetric coefficients on pair {rep}")
        out.append(vals[0])
    return np.asarray(out)


def vp_search(target: FrequencySet, support: FrequencySet, iters: int,
              seed, resolution: int = 1024) -> VPSearchResult:
    """Heuristic small-L1 kernel with unit coefficients on ``target``.

    Minimizes the grid L1 norm over real even coefficient vectors fixed to
    one on the target set and free on the rest of ``support``, by plain
    subgradient descent with diminishing steps and best-iterate memory,
    restarted from a zero fill, a trapezoidal taper, and one random fill.
    The result is an upper bound for the optimal M-term norm with
    ``M = |support|``; no optimality is claimed.
    """
    target_sym = _symmetrize(target)
    support_sym = _symmetrize(support)
    if not set(target_sym.freqs) <= set(support_sym.freqs):
        raise ValueError("support must contain the target frequency set")

    space = _kernel_grid(support_sym.dim, resolution)
    cmat, reps = _cos_matrix(support_sym, space)
    fixed = np.array([(_rep(k) in {_rep(t) for t in target_sym.freqs})
                      for k in reps])
    base = cmat[:, fixed] @ np.ones(int(fixed.sum()))
    free_mat = cmat[:, ~fixed]
    w = space.weights

    n_free = free_mat.shape[1]
    if n_free == 0:
        l1 = float(np.abs(base) @ w)
        coeffs = _expand_coeffs(support_sym, reps, fixed, np.zeros(0))
        rec = VPRecord(support_sym, coeffs, support_sym.card, l1, resolution)
        return VPSearchResult(rec, np.asarray([l1]))

    rng = np.random.default_rng(seed)
    starts = [np.zeros(n_free), _taper_start(target_sym, reps, fixed),
              0.5 * rng.standard_normal(n_free)]

    def objective(t):
        return float(np.abs(base + free_mat @ t) @ w)

    best_t = starts[0]
    best_val = objective(best_t)
    trace = [best_val]
    per_start = max(1, iters // len(starts))
    for t0 in starts:
        t = t0.copy()
        val = objective(t)
        if val < best_val:
            best_val, best_t = val, t.copy()
        trace.append(min(best_val, val))
        step0 = 0.25 * max(1.0, val)
        for it in range(per_start):
            resid = base + free_mat @ t
            grad = free_mat.T @ (w * np.sign(resid))
            gn = np.linalg.norm(grad)
            if gn < 1e-14:
                break
            t = t - (step0 / math.sqrt(1.0 + it)) * grad / gn
            val = objective(t)
            if val < best_val:
                best_val, best_t = val, t.copy()
            trace.append(best_val)

    coeffs = _expand_coeffs(support_sym, reps, fixed, best_t)
    rec = VPRecord(support_sym, coeffs, support_sym.card, best_val, resolution)
    return VPSearchResult(rec, np.asarray(trace))


def _symmetrize(freqs: FrequencySet) -> FrequencySet:
    sym = set(freqs.freqs) | {tuple(-v for v in k) for k in freqs.freqs}
    return FrequencySet.from_list(sorted(sym), dim=freqs.dim)


def _taper_start(target, reps, fixed):
    """Per-axis trapezoid matching the classical profile on interval targets."""
    maxima = np.maximum(np.asarray(target.max_abs(), dtype=float), 1.0)
    vals = []
    for k, is_fixed in zip(reps, fixed):
        if is_fixed:
            continue
        factors = [
            min(1.0, max(0.0, (2.0 * nj + 1.0 - abs(kj)) / (nj + 1.0)))
            for kj, nj in zip(k, maxima)
        ]
        vals.append(math.prod(factors))
    return np.asarray(vals)


def _expand_coeffs(support, reps, fixed, free_vals):
    by_rep = {}
    fi = 0
    for k, is_fixed in zip(reps, fixed):
        if is_fixed:
            by_rep[k] = 1.0
        else:
            by_rep[k] = float(free_vals[fi])
            fi += 1
    return np.asarray([by_rep[_rep(k)] for k in support.freqs])


# ---------------------------------------------------------------------------
# Point budgets
# ---------------------------------------------------------------------------

def bilinear_point_budget(n_dim: int, m_terms: int, c1: float = 1.0) -> int:
    """Sample budget ``ceil(c1 (M+N) N log2((M+N) N))`` paired with an
    M-term bilinear bound."""
    if n_dim < 1 or m_terms < 0:
        raise ValueError("need N >= 1 and M >= 0")
    s = (m_terms + n_dim) * n_dim
    return max(1, math.ceil(c1 * s * math.log2(s) - 1e-12))


def kernel_report(subspace: Subspace, vp: VPRecord | None = None,
                  c1: float = 1.0) -> KernelReport:
    """Bundle kernel L1 numbers with the bilinear bound they certify.

    With a de la Vallee Poussin record whose target matches the subspace's
    frequency set, the bound is the record's L1 norm at
    ``M = m_terms - |Q|`` free terms (the kernel minus the pure Dirichlet
    part has coefficients vanishing on the set).  Without one, the row-norm
    maximum bounds the zero-term error.
    """
    l1_values, l1_max = dirichlet_l1(subspace)
    diag = christoffel(subspace).h2inf
    if vp is not None:
        if subspace.frequencies is None:
            raise ValueError("a VP-based bound needs a trigonometric subspace")
        qsym = _symmetrize(subspace.frequencies)
        if not set(qsym.freqs) <= set(vp.freqs.freqs):
            raise ValueError("VP record does not cover the frequency set")
        lookup = dict(zip(vp.freqs.freqs, np.asarray(vp.coeffs, float)))
        off = max(abs(lookup[k] - 1.0) for k in qsym.freqs)
        if off > 1e-8:
            raise ValueError(f"VP coefficients deviate from 1 on the set by {off:.2e}")
        bound = vp.l1_norm
        terms = vp.freqs.card - qsym.card
    else:
        bound = l1_max
        terms = 0
    return KernelReport(
        l1_max=l1_max,
        diag_sqrt_max=diag,
        l1_values=l1_values,
        vp=vp,
        bilinear_bound=float(bound),
        bilinear_terms=int(terms),
        point_budget=bilinear_point_budget(subspace.n_dim, int(terms), c1),
        resolution=subspace.space.size,
        c1=c1,
    )
