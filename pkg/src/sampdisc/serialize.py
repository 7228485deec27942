"""Versioned JSON and CSV serialization for spaces, point sets, and reports.

Floats are written with 17 significant decimal digits (enough to round-trip
IEEE doubles bit-exactly); non-finite values become the strings "inf",
"-inf" and "nan".  Every document carries a ``schema`` tag of the form
``<type>/<version>``; loading an unknown version raises
:class:`SchemaMismatchError`.
"""

from __future__ import annotations

import math

import numpy as np

from .certify import MZReport, UniformReport
from .entropy import EntropyEstimate
from .errors import SchemaMismatchError
from .kernels import KernelReport, VPRecord
from .pointset import PointSet
from .remez import ExcludedSet, RemezReport
from .subspace import DesignMeasure, FrequencySet, GriddedSpace, Subspace

__all__ = [
    "dumps",
    "loads",
    "as_document",
    "from_document",
    "format_float",
    "REPORT_CSV_COLUMNS",
    "report_csv_rows",
    "write_report_csv",
    "pointset_csv",
]

SCHEMAS = {
    "frequency_set/1",
    "gridded_space/1",
    "subspace/1",
    "pointset/1",
    "mz_report/1",
    "uniform_report/1",
    "remez_report/1",
    "excluded_set/1",
    "entropy_estimate/1",
    "vp_record/1",
    "kernel_report/1",
    "design_measure/1",
    "manifest/1",
}


def format_float(x) -> str:
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


# ---------------------------------------------------------------------------
# A small JSON emitter with fixed float formatting
# ---------------------------------------------------------------------------

def _emit(obj, parts, indent, level):
    pad = " " * (indent * level)
    pad_in = " " * (indent * (level + 1))
    if obj is None:
        parts.append("null")
    elif isinstance(obj, bool):
        parts.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        parts.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            parts.append(format(x, ".17g"))
        else:
            parts.append(f'"{format_float(x)}"')
    elif isinstance(obj, str):
        import json as _json
        parts.append(_json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            parts.append("{}")
            return
        parts.append("{\n")
        items = list(obj.items())
        for i, (k, v) in enumerate(items):
            import json as _json
            parts.append(pad_in + _json.dumps(str(k)) + ": ")
            _emit(v, parts, indent, level + 1)
            parts.append(",\n" if i + 1 < len(items) else "\n")
        parts.append(pad + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        seq = obj.tolist() if isinstance(obj, np.ndarray) else list(obj)
        if not seq:
            parts.append("[]")
            return
        parts.append("[\n")
        for i, v in enumerate(seq):
            parts.append(pad_in)
            _emit(v, parts, indent, level + 1)
            parts.append(",\n" if i + 1 < len(seq) else "\n")
        parts.append(pad + "]")
    else:
        raise TypeError(f"cannot serialize object of type {type(obj)!r}")


def dumps(obj, indent: int = 2) -> str:
    parts: list[str] = []
    _emit(obj, parts, indent, 0)
    parts.append("\n")
    return "".join(parts)


def loads(text: str):
    import json
    return json.loads(text)


def _maybe_float(v):
    if isinstance(v, str):
        return float(v)  # "inf", "-inf", "nan"
    return None if v is None else float(v)


def _maybe_array(v):
    return None if v is None else np.asarray(v, dtype=float)


# ---------------------------------------------------------------------------
# Documents
# ---------------------------------------------------------------------------

def as_document(obj) -> dict:
    """Dictionary form of a toolkit object, tagged with its schema."""
    if isinstance(obj, FrequencySet):
        return {"schema": "frequency_set/1", "dim": obj.dim,
                "freqs": [list(k) for k in obj.freqs]}
    if isinstance(obj, GriddedSpace):
        return {
            "schema": "gridded_space/1",
            "domain": obj.domain,
            "dim": obj.dim,
            "axis_sizes": list(obj.axis_sizes) if obj.axis_sizes else None,
            "points": obj.points.ravel(),      # row-major
            "weights": obj.weights,
        }
    if isinstance(obj, Subspace):
        return {
            "schema": "subspace/1",
            "space": as_document(obj.space),
            "n_dim": obj.n_dim,
            "values": obj.values.ravel(),      # row-major (grid, N)
            "frequencies": as_document(obj.frequencies) if obj.frequencies else None,
            "ortho_tol": obj.ortho_tol,
        }
    if isinstance(obj, PointSet):
        return {"schema": "pointset/1", "indices": obj.indices,
                "weights": obj.weights, "provenance": obj.provenance}
    if isinstance(obj, MZReport):
        return {
            "schema": "mz_report/1", "q": obj.q, "m": obj.m,
            "c1": obj.c1, "c2": obj.c2, "method": obj.method,
            "tolerance": obj.tolerance, "resolution": obj.resolution,
            "seed": obj.seed, "trials": obj.trials,
            "certificate": obj.certificate,
        }
    if isinstance(obj, UniformReport):
        return {
            "schema": "uniform_report/1", "d": obj.d, "m": obj.m,
            "argmax_index": obj.argmax_index,
            "coefficients": obj.coefficients,
            "resolution": obj.resolution, "tolerance": obj.tolerance,
            "certificate": obj.certificate,
        }
    if isinstance(obj, RemezReport):
        return {
            "schema": "remez_report/1", "r": obj.r,
            "measure": obj.measure, "measure_lebesgue": obj.measure_lebesgue,
            "resolution": obj.resolution, "bounds": obj.bounds,
            "argmax_index": obj.argmax_index,
            "coefficients": obj.coefficients,
            "certificate": obj.certificate,
        }
    if isinstance(obj, ExcludedSet):
        return {"schema": "excluded_set/1", "cells": obj.cells,
                "size": int(obj.mask.size), "measure": obj.measure,
                "generator": obj.generator}
    if isinstance(obj, EntropyEstimate):
        return {"schema": "entropy_estimate/1", "q": obj.q,
                "target": obj.target, "levels": obj.levels,
                "n_max": obj.n_max, "samples": obj.samples, "seed": obj.seed}
    if isinstance(obj, VPRecord):
        return {"schema": "vp_record/1", "freqs": as_document(obj.freqs),
                "coeffs": obj.coeffs, "m_terms": obj.m_terms,
                "l1_norm": obj.l1_norm, "resolution": obj.resolution}
    if isinstance(obj, KernelReport):
        return {
            "schema": "kernel_report/1", "l1_max": obj.l1_max,
            "diag_sqrt_max": obj.diag_sqrt_max, "l1_values": obj.l1_values,
            "vp": as_document(obj.vp) if obj.vp else None,
            "bilinear_bound": obj.bilinear_bound,
            "bilinear_terms": obj.bilinear_terms,
            "point_budget": obj.point_budget,
            "resolution": obj.resolution, "c1": obj.c1,
        }
    if isinstance(obj, DesignMeasure):
        return {"schema": "design_measure/1", "weights": obj.weights,
                "gvalue": obj.gvalue, "iterations": obj.iterations,
                "converged": obj.converged,
                "objective_history": obj.objective_history}
    raise TypeError(f"no document form for {type(obj)!r}")


def _check_schema(doc, expected=None):
    schema = doc.get("schema")
    if schema not in SCHEMAS:
        raise SchemaMismatchError(
            f"unsupported schema {schema!r}; this tool reads {sorted(SCHEMAS)} "
            "and offers no migration path"
        )
    if expected is not None and schema != expected:
        raise SchemaMismatchError(f"expected {expected!r}, found {schema!r}")
    return schema


def from_document(doc: dict):
    """Rebuild a toolkit object from its document form."""
    schema = _check_schema(doc)
    if schema == "frequency_set/1":
        return FrequencySet.from_list(doc["freqs"], dim=doc["dim"])
    if schema == "gridded_space/1":
        dim = int(doc["dim"])
        pts = np.asarray(doc["points"], dtype=float).reshape(-1, dim)
        axis = doc.get("axis_sizes")
        return GriddedSpace(doc["domain"], pts,
                            np.asarray(doc["weights"], dtype=float),
                            tuple(axis) if axis else None)
    if schema == "subspace/1":
        space = from_document(doc["space"])
        n = int(doc["n_dim"])
        vals = np.asarray(doc["values"], dtype=float).reshape(space.size, n)
        freqs = from_document(doc["frequencies"]) if doc.get("frequencies") else None
        return Subspace(space, vals, frequencies=freqs,
                        ortho_tol=float(doc.get("ortho_tol", 1e-10)))
    if schema == "pointset/1":
        return PointSet(np.asarray(doc["indices"], dtype=np.int64),
                        np.asarray(doc["weights"], dtype=float),
                        provenance=doc.get("provenance", {}))
    if schema == "mz_report/1":
        return MZReport(
            q=float(doc["q"]), m=int(doc["m"]),
            c1=_maybe_float(doc["c1"]), c2=_maybe_float(doc["c2"]),
            method=doc["method"], tolerance=float(doc["tolerance"]),
            resolution=int(doc["resolution"]), seed=doc.get("seed"),
            trials=doc.get("trials"),
            certificate=_maybe_array(doc.get("certificate")),
        )
    if schema == "uniform_report/1":
        return UniformReport(
            d=_maybe_float(doc["d"]), m=int(doc["m"]),
            argmax_index=doc.get("argmax_index"),
            coefficients=_maybe_array(doc.get("coefficients")),
            resolution=int(doc["resolution"]),
            tolerance=float(doc["tolerance"]),
            certificate=_maybe_array(doc.get("certificate")),
        )
    if schema == "remez_report/1":
        return RemezReport(
            r=_maybe_float(doc["r"]), measure=float(doc["measure"]),
            measure_lebesgue=float(doc["measure_lebesgue"]),
            resolution=int(doc["resolution"]), bounds=doc.get("bounds", {}),
            argmax_index=doc.get("argmax_index"),
            coefficients=_maybe_array(doc.get("coefficients")),
            certificate=_maybe_array(doc.get("certificate")),
        )
    if schema == "excluded_set/1":
        mask = np.zeros(int(doc["size"]), dtype=bool)
        mask[np.asarray(doc["cells"], dtype=np.int64)] = True
        return ExcludedSet(mask, float(doc["measure"]),
                           generator=doc.get("generator", {}))
    if schema == "entropy_estimate/1":
        return EntropyEstimate(q=float(doc["q"]), target=doc["target"],
                               levels=np.asarray(doc["levels"], dtype=float),
                               n_max=int(doc["n_max"]),
                               samples=int(doc["samples"]), seed=doc.get("seed"))
    if schema == "vp_record/1":
        return VPRecord(freqs=from_document(doc["freqs"]),
                        coeffs=np.asarray(doc["coeffs"], dtype=float),
                        m_terms=int(doc["m_terms"]),
                        l1_norm=float(doc["l1_norm"]),
                        resolution=int(doc["resolution"]))
    if schema == "kernel_report/1":
        return KernelReport(
            l1_max=float(doc["l1_max"]),
            diag_sqrt_max=float(doc["diag_sqrt_max"]),
            l1_values=np.asarray(doc["l1_values"], dtype=float),
            vp=from_document(doc["vp"]) if doc.get("vp") else None,
            bilinear_bound=float(doc["bilinear_bound"]),
            bilinear_terms=int(doc["bilinear_terms"]),
            point_budget=int(doc["point_budget"]),
            resolution=int(doc["resolution"]), c1=float(doc["c1"]),
        )
    if schema == "design_measure/1":
        return DesignMeasure(
            weights=np.asarray(doc["weights"], dtype=float),
            gvalue=float(doc["gvalue"]), iterations=int(doc["iterations"]),
            converged=bool(doc["converged"]),
            objective_history=_maybe_array(doc.get("objective_history")),
        )
    raise SchemaMismatchError(f"no loader for schema {schema!r}")


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------

REPORT_CSV_COLUMNS = ("report", "q", "m", "c1", "c2", "d", "resolution",
                      "seed", "constants")


def report_csv_rows(reports, constants=None, extra=None):
    """Fixed-schema CSV rows for a sequence of reports.

    Column ``d`` carries the uniform or Remez constant; ``c1``/``c2`` the
    two-sided ones.  ``constants`` is a short ``name=value`` listing echoed
    verbatim in the last column.
    """
    const_str = ";".join(f"{k}={format_float(v)}"
                         for k, v in (constants or {}).items())
    rows = []
    for rep in reports:
        row = {c: "" for c in REPORT_CSV_COLUMNS}
        row["constants"] = const_str
        if isinstance(rep, MZReport):
            row.update(report="mz", q=format_float(rep.q), m=str(rep.m),
                       c1=format_float(rep.c1), c2=format_float(rep.c2),
                       resolution=str(rep.resolution),
                       seed="" if rep.seed is None else str(rep.seed))
        elif isinstance(rep, UniformReport):
            row.update(report="uniform", m=str(rep.m),
                       d=format_float(rep.d), resolution=str(rep.resolution))
        elif isinstance(rep, RemezReport):
            row.update(report="remez", d=format_float(rep.r),
                       resolution=str(rep.resolution),
                       m=format_float(rep.measure))
        else:
            raise TypeError(f"no CSV row for {type(rep)!r}")
        if extra:
            row["constants"] = ";".join(filter(None, [row["constants"], extra]))
        rows.append(row)
    return rows


def write_report_csv(path, rows):
    lines = [",".join(REPORT_CSV_COLUMNS)]
    lines += [",".join(row[c] for c in REPORT_CSV_COLUMNS) for row in rows]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def pointset_csv(space: GriddedSpace, points: PointSet) -> str:
    """One row per point: coordinates, then the weight."""
    header = [f"x{i}" for i in range(space.dim)] + ["weight"]
    lines = [",".join(header)]
    coords = points.coordinates(space)
    for row, wt in zip(coords, points.weights):
        lines.append(",".join([format_float(v) for v in row]
                              + [format_float(wt)]))
    return "\n".join(lines) + "\n"
