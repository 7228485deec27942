import json
import math

import numpy as np
import pytest

import sampdisc as sd
from sampdisc import serialize
from sampdisc.errors import SchemaMismatchError


def roundtrip(obj):
    text = serialize.dumps(serialize.as_document(obj))
    return serialize.from_document(json.loads(text))


def test_float_formatting_17_digits():
    assert serialize.format_float(0.1) == "0.10000000000000001"
    assert serialize.format_float(1.0) == "1"
    assert serialize.format_float(math.inf) == "inf"
    assert serialize.format_float(-math.inf) == "-inf"
    assert serialize.format_float(math.nan) == "nan"
    # 17 significant digits round-trip doubles exactly.
    x = math.pi / 7e3
    assert float(serialize.format_float(x)) == x


def test_dumps_rejects_unknown_types():
    with pytest.raises(TypeError):
        serialize.dumps({"x": object()})


def test_frequency_set_roundtrip():
    fs = sd.FrequencySet.hyperbolic_cross(2, 3)
    back = roundtrip(fs)
    assert back == fs


def test_space_and_subspace_roundtrip(trig3):
    space = roundtrip(trig3.space)
    assert space.domain == "torus"
    assert np.array_equal(space.points, trig3.space.points)
    assert np.array_equal(space.weights, trig3.space.weights)
    assert space.axis_sizes == trig3.space.axis_sizes

    sub = roundtrip(trig3)
    assert np.array_equal(sub.values, trig3.values)
    assert sub.frequencies == trig3.frequencies


def test_pointset_roundtrip(trig3):
    p = sd.sample_christoffel(trig3, 9, seed=4)
    back = roundtrip(p)
    assert np.array_equal(back.indices, p.indices)
    assert np.array_equal(back.weights, p.weights)
    assert back.provenance["method"] == "christoffel"


def test_report_roundtrips(trig3):
    p = sd.sample_iid(trig3.space, 7, seed=2)
    for rep in (sd.certify_l2(trig3, p),
                sd.certify_lq(trig3, p, 3, trials=3, seed=5),
                sd.certify_uniform(trig3, p)):
        back = roundtrip(rep)
        for field in ("m", "resolution"):
            assert getattr(back, field) == getattr(rep, field)
    exc = sd.ExcludedSet.random_cells(trig3.space, 0.1, seed=1)
    rr = sd.remez_constant(trig3, exc)
    back = roundtrip(rr)
    assert back.r == rr.r
    assert back.bounds.keys() == rr.bounds.keys()
    assert roundtrip(exc).measure == exc.measure


def test_infinite_uniform_roundtrip(trig3):
    p = sd.PointSet(np.array([0, 1]), np.array([0.5, 0.5]))
    rep = sd.certify_uniform(trig3, p)
    assert math.isinf(rep.d)
    back = roundtrip(rep)
    assert math.isinf(back.d)
    assert np.allclose(back.certificate, rep.certificate)


def test_entropy_vp_kernel_design_roundtrips(trig3):
    est = sd.estimate_entropy(trig3, 2, 2, 200, seed=8)
    back = roundtrip(est)
    assert np.array_equal(back.levels, est.levels)

    rec = sd.vp_classical(1, resolution=256)
    assert roundtrip(rec).l1_norm == rec.l1_norm

    rep = sd.kernel_report(trig3, vp=rec)
    back = roundtrip(rep)
    assert back.point_budget == rep.point_budget
    assert back.vp.m_terms == rec.m_terms

    des = sd.g_optimal_design(trig3.values, trig3.space)
    back = roundtrip(des)
    assert back.gvalue == des.gvalue
    assert back.converged == des.converged


def test_schema_mismatch_raises():
    with pytest.raises(SchemaMismatchError):
        serialize.from_document({"schema": "mz_report/2", "q": 2})
    with pytest.raises(SchemaMismatchError):
        serialize.from_document({"no_schema": True})


def test_report_csv_schema(trig3):
    p = sd.sample_iid(trig3.space, 7, seed=2)
    rows = serialize.report_csv_rows(
        [sd.certify_l2(trig3, p), sd.certify_uniform(trig3, p)],
        constants={"c": 1.0})
    assert serialize.REPORT_CSV_COLUMNS == ("report", "q", "m", "c1", "c2",
                                            "d", "resolution", "seed",
                                            "constants")
    assert rows[0]["report"] == "mz"
    assert rows[1]["report"] == "uniform"
    assert rows[0]["constants"] == "c=1"
    assert rows[1]["d"] != ""


def test_pointset_csv(trig3):
    p = sd.PointSet(np.array([0, 16]), np.array([0.25, 0.75]))
    text = serialize.pointset_csv(trig3.space, p)
    lines = text.strip().split("\n")
    assert lines[0] == "x0,weight"
    assert lines[1].split(",")[1] == "0.25"
    assert len(lines) == 3
