"""Independent oracle implementations used to freeze expected test values.

Everything here is deliberately written from first principles (brute force,
closed forms, plain subgradient search) and stays independent of the library
code paths it is used to check.
"""

import itertools
import math

import numpy as np


def hyperbolic_count(dim, radius):
    """Brute-force count of {k : prod_j max(|k_j|, 1) <= radius}."""
    count = 0
    for k in itertools.product(range(-radius, radius + 1), repeat=dim):
        prod = 1
        for kj in k:
            prod *= max(abs(kj), 1)
        if prod <= radius:
            count += 1
    return count


def gram_matrix(values, weights):
    g = np.zeros((values.shape[1], values.shape[1]))
    for i in range(values.shape[0]):
        g += weights[i] * np.outer(values[i], values[i])
    return g


def dirichlet_closed_form(x, y):
    """Kernel of the real span of {1, e^{ix}, e^{-ix}}: 1 + 2 cos(x - y)."""
    return 1.0 + 2.0 * np.cos(x - y)


ABS_ONE_PLUS_TWO_COS_MEAN = 1.0 / 3.0 + 2.0 * math.sqrt(3.0) / math.pi
"""(1/2pi) * integral over [0, 2pi) of |1 + 2 cos u| du, by antiderivative:
the integrand changes sign at 2pi/3 and 4pi/3, F(u) = u + 2 sin u."""


def trig_interp_lebesgue(n, nodes, xs):
    """max over xs of sum_j |D_n(x - nodes_j)| / m for the order-n kernel.

    For m = 2n+1 nodes this is the exact uniform-vs-samples constant of the
    degree-n trigonometric space: every f is its own interpolant, and signs
    can be matched at the nodes.
    """
    m = len(nodes)

    def kernel(u):
        s = np.sin(u / 2.0)
        flat = np.abs(s) < 1e-14
        return np.where(flat, 2 * n + 1.0,
                        np.sin((n + 0.5) * u) / np.where(flat, 1.0, s))

    lam = np.abs(kernel(xs[:, None] - nodes[None, :])).sum(axis=1) / m
    return float(lam.max())


def uniform_ratio_search(values, sample_idx, seed, starts=64, iters=400):
    """Best ratio ``max_x |f(x)| / max_j |f(xi_j)|`` found by direct search.

    Subgradient ascent on the log ratio from random coefficient starts, each
    followed by a sign-interpolation polish: the active sample constraints of
    a maximizer sit at +-1, so solving for that vertex sharpens the estimate
    to machine precision when the right sign pattern is found.  The result
    is a lower bound for the true constant by construction.
    """
    rng = np.random.default_rng(seed)
    rows = values[sample_idx]
    n = values.shape[1]
    best = 1.0

    def ratio(c):
        num = np.abs(values @ c).max()
        den = np.abs(rows @ c).max()
        return num / den if den > 0 else math.inf

    for _ in range(starts):
        c = rng.standard_normal(n)
        c /= np.linalg.norm(c)
        step = 0.2
        r = ratio(c)
        for _ in range(iters):
            fx = values @ c
            fs = rows @ c
            ix = int(np.argmax(np.abs(fx)))
            js = int(np.argmax(np.abs(fs)))
            grad = values[ix] * np.sign(fx[ix]) / max(abs(fx[ix]), 1e-300) \
                - rows[js] * np.sign(fs[js]) / max(abs(fs[js]), 1e-300)
            gn = np.linalg.norm(grad)
            if gn < 1e-14:
                break
            cand = c + step * grad / gn
            cand /= np.linalg.norm(cand)
            rc = ratio(cand)
            if rc > r and math.isfinite(rc):
                c, r = cand, rc
                step = min(step * 1.3, 0.5)
            else:
                step *= 0.5
                if step < 1e-13:
                    break
        best = max(best, r)
        # Sign-interpolation polish at the nearly-active sample rows.
        fs = rows @ c
        mx = np.abs(fs).max()
        active = np.argsort(-np.abs(fs))[:n]
        if np.abs(fs[active]).min() >= 0.5 * mx:
            try:
                vertex = np.linalg.solve(rows[active], np.sign(fs[active]))
            except np.linalg.LinAlgError:
                continue
            rv = ratio(vertex)
            if math.isfinite(rv):
                best = max(best, rv)
    return best


def segment_covering_radius(radius, n_balls):
    """Exact n-ball covering radius of a segment of half-length ``radius``."""
    return radius / n_balls


# Duplicate sample-size evaluations, written against plain math only.

def m_iid_nikolskii(c, delta, q, h, n):
    return math.ceil(c * (1.0 / delta) ** 2 * q * q * h ** q * n - 1e-12)


def m_l1_relative(cc, eps, n):
    return max(1, math.ceil(cc * eps ** -2 * n * math.log2(n) - 1e-12))


def m_entropy_chaining(cc, q, b, n):
    inner = math.log2(4.0 * (4.0 * b) ** q * n * q)
    outer = math.log2(2.0 * n * inner)
    return math.ceil(cc * q * (4.0 ** q) * n ** (2.0 - 1.0 / q) * b ** q
                     * outer * outer - 1e-12)


def m_bilinear_budget(c1, n, m_terms):
    s = (m_terms + n) * n
    return max(1, math.ceil(c1 * s * math.log2(s) - 1e-12))


def frequency_count_within_sigma(counts, m, probs, sigmas=4.0):
    """Per-cell binomial check: |count - m p| <= sigmas * sqrt(m p (1-p))."""
    counts = np.asarray(counts, dtype=float)
    probs = np.asarray(probs, dtype=float)
    bound = sigmas * np.sqrt(m * probs * (1.0 - probs))
    return bool(np.all(np.abs(counts - m * probs) <= bound + 1e-9))
