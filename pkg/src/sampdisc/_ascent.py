"""Projected ratio ascent shared by the empirical certifiers."""

import numpy as np


def refine_ratio(c0, num, den, sense=+1, iters=200, step0=0.1):
    """Locally extremize ``num(c) / den(c)`` over coefficient directions.

    ``num`` and ``den`` are callables returning ``(value, gradient)``; both
    must be positively homogeneous of the same degree so the ratio is scale
    invariant, and ``c`` is renormalized after every accepted step.
    ``sense`` is +1 to maximize, -1 to minimize.  Deterministic given the
    start vector.

    Returns ``(ratio, c)`` for the best iterate found.
    """
    c = np.asarray(c0, dtype=float)
    nrm = np.linalg.norm(c)
    if nrm == 0:
        raise ValueError("start vector must be nonzero")
    c = c / nrm
    n_val, n_grad = num(c)
    d_val, d_grad = den(c)
    if d_val <= 0:
        raise ValueError("denominator must be positive at the start vector")
    ratio = n_val / d_val
    alpha = step0
    for _ in range(iters):
        grad = (n_grad * d_val - n_val * d_grad) / (d_val * d_val)
        gn = np.linalg.norm(grad)
        if gn < 1e-300:
            break
        cand = c + (sense * alpha / gn) * grad
        cn = np.linalg.norm(cand)
        if cn == 0:
            alpha *= 0.5
            continue
        cand /= cn
        cn_val, cn_grad = num(cand)
        cd_val, cd_grad = den(cand)
        if cd_val > 0 and sense * (cn_val / cd_val - ratio) > 0:
            c, ratio = cand, cn_val / cd_val
            n_val, n_grad, d_val, d_grad = cn_val, cn_grad, cd_val, cd_grad
            alpha = min(alpha * 1.5, 1.0)
        else:
            alpha *= 0.5
            if alpha < 1e-15:
                break
    return float(ratio), c


def batched_refine(c0, batch_num, batch_den, sense=+1, iters=200, step0=0.1):
    """Vectorized :func:`refine_ratio` over a batch of start directions.

    ``c0`` is (K, N); ``batch_num`` and ``batch_den`` map a (K, N) batch to
    ``(values (K,), gradients (K, N))``.  Each row keeps its own step size
    and accept/reject state, so the result matches running the scalar refiner
    per row while sharing the matrix products.

    Returns ``(ratios (K,), C (K, N))``.
    """
    c = np.array(c0, dtype=float)
    norms = np.linalg.norm(c, axis=1, keepdims=True)
    if np.any(norms == 0):
        raise ValueError("start vectors must be nonzero")
    c /= norms
    n_val, n_grad = batch_num(c)
    d_val, d_grad = batch_den(c)
    if np.any(d_val <= 0):
        raise ValueError("denominators must be positive at the start vectors")
    ratio = n_val / d_val
    alpha = np.full(c.shape[0], step0)
    for _ in range(iters):
        grad = (n_grad * d_val[:, None] - n_val[:, None] * d_grad) \
            / (d_val * d_val)[:, None]
        gn = np.linalg.norm(grad, axis=1)
        live = gn > 1e-300
        if not live.any():
            break
        step = np.where(live, sense * alpha / np.where(live, gn, 1.0), 0.0)
        cand = c + step[:, None] * grad
        cn = np.linalg.norm(cand, axis=1, keepdims=True)
        cand = np.where(cn > 0, cand / np.where(cn > 0, cn, 1.0), c)
        cn_val, cn_grad = batch_num(cand)
        cd_val, cd_grad = batch_den(cand)
        ok = (cd_val > 0) & (sense * (cn_val / np.where(cd_val > 0, cd_val, 1.0)
                                      - ratio) > 0) & live
        c[ok] = cand[ok]
        ratio[ok] = cn_val[ok] / cd_val[ok]
        n_val[ok], d_val[ok] = cn_val[ok], cd_val[ok]
        n_grad[ok], d_grad[ok] = cn_grad[ok], cd_grad[ok]
        alpha[ok] = np.minimum(alpha[ok] * 1.5, 1.0)
        alpha[~ok] *= 0.5
        if np.all(alpha < 1e-15):
            break
    return ratio, c
