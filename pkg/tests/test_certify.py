import math

import numpy as np
import pytest

import sampdisc as sd

import oracles


def equispaced(space, m):
    g = space.axis_sizes[0]
    assert g % m == 0
    return sd.PointSet(np.arange(m, dtype=np.int64) * (g // m),
                       np.full(m, 1.0 / m))


# ---------------------------------------------------------------------------
# Exact L2 certification
# ---------------------------------------------------------------------------

def test_equispaced_exactness_small():
    for n in (1, 2):
        m = 2 * n + 1
        s = sd.build_trig_subspace(sd.FrequencySet.box(n),
                                   sd.GriddedSpace.torus(1, 64 * m))
        rep = sd.certify_l2(s, equispaced(s.space, m))
        assert abs(rep.c1 - 1) < 1e-10 and abs(rep.c2 - 1) < 1e-10
        assert rep.method == "exact-eigen"
        assert 0 < rep.c1 <= rep.c2


def test_full_grid_is_the_identity_frame(trig3, poly3):
    for s in (trig3, poly3):
        p = sd.PointSet(np.arange(s.space.size), s.space.weights)
        rep = sd.certify_l2(s, p)
        assert abs(rep.c1 - 1) < 1e-10 and abs(rep.c2 - 1) < 1e-10


def test_bss_pointset_recertifies(trig5_256):
    p = sd.bss_select(trig5_256, 3)
    rep = sd.certify_l2(trig5_256, p)
    assert rep.c1 >= 1 - 1e-8
    assert rep.c2 <= sd.bss_condition_bound(3) + 1e-8


def test_rank_deficient_frame_reports_zero_with_certificate(trig3):
    m = trig3.n_dim - 1
    p = sd.PointSet(np.array([3, 40]), np.full(m, 1.0 / m))
    rep = sd.certify_l2(trig3, p)
    assert rep.c1 == 0.0
    assert rep.certificate is not None
    evals = trig3.values[p.indices] @ rep.certificate
    assert np.abs(evals).max() < 1e-9


# ---------------------------------------------------------------------------
# Uniform-norm certification
# ---------------------------------------------------------------------------

def test_uniform_infinite_when_points_too_few(trig3):
    p = sd.PointSet(np.array([0, 21]), np.full(2, 0.5))
    rep = sd.certify_uniform(trig3, p)
    assert math.isinf(rep.d)
    assert np.abs(trig3.values[p.indices] @ rep.certificate).max() < 1e-9


def test_uniform_equals_one_on_full_grid(trig3):
    p = sd.PointSet(np.arange(trig3.space.size), trig3.space.weights)
    rep = sd.certify_uniform(trig3, p)
    assert rep.d == 1.0


def test_uniform_at_least_one(trig3):
    p = equispaced(trig3.space, 4)
    assert sd.certify_uniform(trig3, p).d >= 1.0


def test_uniform_equispaced_cross_checked_by_oracles():
    n, m = 4, 9
    g = 114 * m   # 1026-point grid, near the 2^10 scale, divisible by m
    s = sd.build_trig_subspace(sd.FrequencySet.box(n),
                               sd.GriddedSpace.torus(1, g))
    p = equispaced(s.space, m)
    rep = sd.certify_uniform(s, p)
    x = s.space.points[:, 0]
    # Interpolation identity: the constant equals the Lebesgue function max.
    lam = oracles.trig_interp_lebesgue(n, x[p.indices], x)
    assert rep.d == pytest.approx(lam, abs=1e-10)
    # Direct ratio search is an independent lower-bound oracle.
    found = oracles.uniform_ratio_search(s.values, p.indices, seed=17)
    assert found <= rep.d + 1e-9
    assert rep.d == pytest.approx(found, abs=1e-6)
    assert rep.argmax_index is not None
    f = s.values @ rep.coefficients
    assert abs(f[rep.argmax_index]) == pytest.approx(rep.d, abs=1e-8)
    assert np.abs(f[p.indices]).max() <= 1 + 1e-8


def test_uniform_superset_monotone(trig5_256):
    base = sd.sample_iid(trig5_256.space, 8, seed=14)
    bigger = sd.sample_iid(trig5_256.space, 20, seed=14)   # prefix-coupled
    assert np.array_equal(bigger.indices[:8], base.indices)
    d_small = sd.certify_uniform(trig5_256, base).d
    d_large = sd.certify_uniform(trig5_256, bigger).d
    assert d_large <= d_small + 1e-9


def test_scaling_invariance_of_reports(trig3):
    scaled = sd.Subspace(trig3.space, 3.7 * trig3.values, ortho_tol=100.0)
    p = equispaced(trig3.space, 4)
    a, b = sd.certify_uniform(trig3, p), sd.certify_uniform(scaled, p)
    assert a.d == pytest.approx(b.d, abs=1e-9)
    a2, b2 = sd.certify_l2(trig3, p), sd.certify_l2(scaled, p)
    assert a2.c1 == pytest.approx(b2.c1, abs=1e-9)
    assert a2.c2 == pytest.approx(b2.c2, abs=1e-9)
    aq = sd.certify_lq(trig3, p, 3, trials=4, seed=8)
    bq = sd.certify_lq(scaled, p, 3, trials=4, seed=8)
    assert aq.c1 == pytest.approx(bq.c1, abs=1e-9)
    assert aq.c2 == pytest.approx(bq.c2, abs=1e-9)


def test_chain_inequality_holds(trig5_256, poly5_512):
    for s in (trig5_256, poly5_512):
        for p in (sd.sample_iid(s.space, 4 * s.n_dim, seed=3),
                  sd.bss_select(s, 2.0)):
            chain = sd.uniform_chain_check(s, p)
            if chain.c1_normalized > 0:
                assert chain.ok
                assert chain.d <= chain.bound + 1e-6


# ---------------------------------------------------------------------------
# Empirical Lq certification
# ---------------------------------------------------------------------------

def test_lq_q2_brackets_exact_eigenvalues(trig3):
    p = sd.sample_iid(trig3.space, 9, seed=4)
    exact = sd.certify_l2(trig3, p)
    emp = sd.certify_lq(trig3, p, 2, trials=8, seed=6)
    assert emp.method == "empirical"
    assert exact.c1 - 1e-9 <= emp.c1 <= exact.c1 + 1e-6
    assert exact.c2 - 1e-6 <= emp.c2 <= exact.c2 + 1e-9


def test_lq_on_full_grid_is_one(trig3):
    p = sd.PointSet(np.arange(trig3.space.size), trig3.space.weights)
    for q in (1, 2, 3.5):
        rep = sd.certify_lq(trig3, p, q, trials=4, seed=1)
        assert rep.c1 == pytest.approx(1.0, abs=1e-12)
        assert rep.c2 == pytest.approx(1.0, abs=1e-12)


def test_constant_function_ratio_is_weight_sum(trig3):
    p = sd.sample_iid(trig3.space, 7, seed=9)
    lam = p.weights * 1.7          # arbitrary positive rescale
    pts = sd.PointSet(p.indices, lam)
    # First basis column is the constant one; its ratio at any q equals the
    # weight sum because the grid norm of the constant is one.
    for q in (1, 2, 4):
        num = float(lam @ np.abs(trig3.values[pts.indices, 0]) ** q)
        den = float(trig3.space.weights @ np.abs(trig3.values[:, 0]) ** q)
        assert num / den == pytest.approx(lam.sum(), abs=1e-12)
    rep = sd.certify_lq(trig3, pts, 4, trials=6, seed=2)
    assert rep.c1 <= lam.sum() + 1e-9


def test_lq_validates_arguments(trig3):
    p = sd.sample_iid(trig3.space, 5, seed=0)
    with pytest.raises(ValueError):
        sd.certify_lq(trig3, p, 0.5, trials=4, seed=0)
    with pytest.raises(ValueError):
        sd.certify_lq(trig3, p, 2, trials=0, seed=0)


# ---------------------------------------------------------------------------
# Monte Carlo frequency
# ---------------------------------------------------------------------------

def test_mc_full_size_draws_succeed(trig3):
    freq = sd.mc_success_probability(trig3, 2, trig3.space.size, 40, seed=12)
    assert freq >= 0.95


def test_mc_paired_sweep_is_nondecreasing(trig3):
    curve = sd.success_curve(trig3, 2, [6, 12, 24, 48], trials=200, seed=31)
    assert all(b >= a for a, b in zip(curve, curve[1:]))
    assert curve[-1] >= 0.9


def test_mc_seed_determinism(trig3):
    a = sd.mc_success_probability(trig3, 4, 20, 25, seed=8)
    b = sd.mc_success_probability(trig3, 4, 20, 25, seed=8)
    assert a == b
