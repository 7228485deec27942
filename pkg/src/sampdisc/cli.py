"""Batch-experiment command line front end.

Commands (all driven by a strict JSON config): ``subspace``, ``design``,
``points``, ``certify``, ``kernel``, ``entropy``, ``remez``, ``run`` and
``report``.  Exit codes: 0 success, 2 validation error, 3 numerical
failure, 4 at least one hypothesis-unmet verdict.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import serialize
from .certify import (certify_l2, certify_lq, certify_uniform,
                      mc_success_probability, uniform_chain_check)
from .entropy import check_entropy_growth, estimate_entropy
from .errors import ConfigError, NumericalError, SchemaMismatchError
from .kernels import kernel_report, vp_classical, vp_search
from .pointset import (PointSet, augment_constant, bss_select, sample_christoffel,
                       sample_iid)
from .remez import (ExcludedSet, adversarial_excluded, remez_constant,
                    remez_from_discretization, remez_thresholds)
from .subspace import (FrequencySet, GriddedSpace, build_poly_subspace,
                       build_trig_subspace, design_subspace, g_optimal_design,
                       orthonormalize)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_HYPOTHESIS = 4


# ---------------------------------------------------------------------------
# Strict config parsing
# ---------------------------------------------------------------------------

def _check_keys(section, allowed, path):
    if not isinstance(section, dict):
        raise ConfigError(f"{path}: expected an object")
    for key in section:
        if key not in allowed:
            raise ConfigError(f"{path}: unknown key {key!r}")


_TOP_KEYS = {"seed", "out", "constants", "subspace", "design", "points",
             "certify", "kernel", "entropy", "remez", "sweep"}
_SUBSPACE_KEYS = {"kind", "grid", "generator", "dim", "limits", "radius",
                  "count", "base", "freqs", "degree"}
_POINT_KEYS = {"method", "m", "b", "seed", "importance_weights", "augment"}
_CERTIFY_KEYS = {"kind", "q", "trials", "m", "ms", "seed", "iters"}
_KERNEL_KEYS = {"l1", "vp_classical", "vp_search", "c1", "resolution"}
_VPSEARCH_KEYS = {"support", "iters", "seed", "resolution"}
_ENTROPY_KEYS = {"q", "target", "n_max", "samples", "seed", "check_b"}
_REMEZ_KEYS = {"excluded", "thresholds", "s", "check_discretization"}
_EXCLUDED_KEYS = {"generator", "segments", "cells", "max_measure", "seed",
                  "budget", "pool"}
_CHECK_KEYS = {"points_step", "tol"}
_SWEEP_KEYS = {"axis", "values"}
_DESIGN_KEYS = {"tol", "max_iters"}

_SWEEP_AXES = {"m", "b", "q", "measure", "grid"}


def load_config(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config does not parse as JSON: {exc}") from exc
    validate_config(cfg)
    return cfg


def validate_config(cfg):
    _check_keys(cfg, _TOP_KEYS, "config")
    if "subspace" not in cfg:
        raise ConfigError("config: missing required section 'subspace'")
    sub = cfg["subspace"]
    _check_keys(sub, _SUBSPACE_KEYS, "subspace")
    kind = sub.get("kind")
    if kind not in ("trig", "poly"):
        raise ConfigError("subspace.kind must be 'trig' or 'poly'")
    if "grid" not in sub:
        raise ConfigError("subspace: missing required key 'grid'")
    if kind == "trig" and sub.get("generator") not in ("box", "hyperbolic_cross",
                                                       "lacunary", "list"):
        raise ConfigError("subspace.generator must name a frequency generator")
    if kind == "poly" and "degree" not in sub:
        raise ConfigError("subspace: polynomial spaces need 'degree'")
    if "design" in cfg:
        _check_keys(cfg["design"], _DESIGN_KEYS, "design")
    for i, step in enumerate(cfg.get("points", [])):
        _check_keys(step, _POINT_KEYS, f"points[{i}]")
        if step.get("method") not in ("equispaced", "iid", "christoffel", "bss"):
            raise ConfigError(f"points[{i}].method must name a generator")
    for i, step in enumerate(cfg.get("certify", [])):
        _check_keys(step, _CERTIFY_KEYS, f"certify[{i}]")
        if step.get("kind") not in ("l2", "uniform", "lq", "mc", "chain"):
            raise ConfigError(f"certify[{i}].kind must name a certifier")
    if "kernel" in cfg:
        _check_keys(cfg["kernel"], _KERNEL_KEYS, "kernel")
        if "vp_search" in cfg["kernel"]:
            _check_keys(cfg["kernel"]["vp_search"], _VPSEARCH_KEYS,
                        "kernel.vp_search")
    if "entropy" in cfg:
        _check_keys(cfg["entropy"], _ENTROPY_KEYS, "entropy")
    if "remez" in cfg:
        _check_keys(cfg["remez"], _REMEZ_KEYS, "remez")
        if "excluded" in cfg["remez"]:
            _check_keys(cfg["remez"]["excluded"], _EXCLUDED_KEYS,
                        "remez.excluded")
        if "check_discretization" in cfg["remez"]:
            _check_keys(cfg["remez"]["check_discretization"], _CHECK_KEYS,
                        "remez.check_discretization")
    if "sweep" in cfg:
        _check_keys(cfg["sweep"], _SWEEP_KEYS, "sweep")
        if cfg["sweep"].get("axis") not in _SWEEP_AXES:
            raise ConfigError(f"sweep.axis must be one of {sorted(_SWEEP_AXES)}")
        if not isinstance(cfg["sweep"].get("values"), list) or not cfg["sweep"]["values"]:
            raise ConfigError("sweep.values must be a nonempty list")
    if "constants" in cfg and not isinstance(cfg["constants"], dict):
        raise ConfigError("constants must be an object of name: value pairs")


def config_digest(cfg) -> str:
    canon = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# Pipeline pieces
# ---------------------------------------------------------------------------

def _build_frequencies(sub) -> FrequencySet:
    gen = sub["generator"]
    if gen == "box":
        return FrequencySet.box(sub["limits"], dim=sub.get("dim"))
    if gen == "hyperbolic_cross":
        return FrequencySet.hyperbolic_cross(sub.get("dim", 1), sub["radius"])
    if gen == "lacunary":
        return FrequencySet.lacunary(sub["count"], base=sub.get("base", 2.0))
    return FrequencySet.from_list(sub["freqs"], dim=sub.get("dim"))


def _build_subspace(cfg):
    sub = cfg["subspace"]
    grid = int(sub["grid"])
    if sub["kind"] == "trig":
        freqs = _build_frequencies(sub)
        space = GriddedSpace.torus(freqs.dim, grid)
        raw_sub = build_trig_subspace(freqs, space)
        raw_vals = raw_sub.values
    else:
        freqs = None
        space = GriddedSpace.box(1, grid)
        raw_sub = build_poly_subspace(space, int(sub["degree"]))
        raw_vals = raw_sub.values
    subspace = raw_sub
    design = None
    if "design" in cfg:
        dcfg = cfg["design"]
        design = g_optimal_design(raw_vals, space, tol=dcfg.get("tol"),
                                  max_iters=int(dcfg.get("max_iters", 2000)))
        subspace = design_subspace(raw_vals, space, design, frequencies=freqs)
    return subspace, design


def _equispaced(space: GriddedSpace, m: int) -> PointSet:
    if space.dim != 1 or space.axis_sizes is None:
        raise ConfigError("equispaced point sets need a univariate tensor grid")
    g = space.axis_sizes[0]
    if g % m != 0:
        raise ConfigError(
            f"equispaced m={m} requires the grid size {g} to be divisible by m"
        )
    idx = np.arange(m, dtype=np.int64) * (g // m)
    return PointSet(idx, np.full(m, 1.0 / m),
                    provenance={"method": "equispaced", "m": m})


def _build_points(subspace, step, default_seed):
    method = step["method"]
    seed = step.get("seed", default_seed)
    target = augment_constant(subspace) if step.get("augment") else subspace
    if method == "equispaced":
        pts = _equispaced(target.space, int(step["m"]))
    elif method == "iid":
        pts = sample_iid(target.space, int(step["m"]), seed)
    elif method == "christoffel":
        pts = sample_christoffel(target, int(step["m"]), seed,
                                 importance_weights=step.get("importance_weights", True))
    else:
        pts = bss_select(target, float(step["b"]))
    return target, pts


def _run_certify(step, subspace, pts, default_seed, constants):
    kind = step["kind"]
    if kind == "l2":
        return certify_l2(subspace, pts)
    if kind == "uniform":
        return certify_uniform(subspace, pts)
    if kind == "lq":
        return certify_lq(subspace, pts, float(step["q"]),
                          trials=int(step.get("trials", 8)),
                          seed=step.get("seed", default_seed),
                          iters=int(step.get("iters", 250)))
    if kind == "chain":
        return uniform_chain_check(subspace, pts)
    raise ConfigError(f"certifier {kind!r} cannot run against a point set here")


def _build_excluded(space, spec) -> ExcludedSet:
    gen = spec.get("generator")
    if gen == "intervals":
        return ExcludedSet.intervals(space, spec["segments"])
    if gen == "cells":
        return ExcludedSet.from_cells(space, spec["cells"])
    if gen == "random":
        return ExcludedSet.random_cells(space, float(spec["max_measure"]),
                                        spec.get("seed", 0))
    raise ConfigError(f"unknown excluded-set generator {gen!r}")


# ---------------------------------------------------------------------------
# The run pipeline
# ---------------------------------------------------------------------------

def execute(cfg, out_dir: Path):
    """Run the configured pipeline; returns (manifest, exit_code)."""
    out_dir.mkdir(parents=True, exist_ok=True)
    started = time.strftime("%Y-%m-%dT%H:%M:%S")
    constants = dict(cfg.get("constants", {}))
    default_seed = int(cfg.get("seed", 0))
    sweep = cfg.get("sweep")
    axis_values = sweep["values"] if sweep else [None]
    axis = sweep["axis"] if sweep else None

    artifacts = {}
    steps_log = []
    rows = []
    hypothesis_unmet = False

    def save(name, text):
        path = out_dir / name
        path.write_text(text, encoding="utf-8")
        artifacts[name] = hashlib.sha256(text.encode("utf-8")).hexdigest()

    def save_doc(name, obj):
        save(name, serialize.dumps(serialize.as_document(obj)))

    for value in axis_values:
        run_cfg = _apply_axis(cfg, axis, value)
        tag = "" if value is None else f"_{axis}{_fmt_tag(value)}"
        extra = None if value is None else f"axis={axis};value={serialize.format_float(value) if isinstance(value, float) else value}"

        subspace, design = _build_subspace(run_cfg)
        if value is None or axis == "grid":
            save_doc(f"subspace{tag}.json", subspace)
            if subspace.frequencies is not None:
                save_doc(f"frequency_set{tag}.json", subspace.frequencies)
            if design is not None:
                save_doc(f"design{tag}.json", design)
        steps_log.append({"step": "subspace", "axis_value": value,
                          "n_dim": subspace.n_dim,
                          "grid": subspace.space.size,
                          "design": None if design is None else
                          {"gvalue": design.gvalue,
                           "iterations": design.iterations,
                           "converged": design.converged}})

        pointsets = []
        for i, step in enumerate(run_cfg.get("points", [])):
            target, pts = _build_points(subspace, step, default_seed)
            pointsets.append((target, pts))
            save_doc(f"points_{i}{tag}.json", pts)
            save(f"points_{i}{tag}.csv", serialize.pointset_csv(target.space, pts))
            steps_log.append({"step": f"points[{i}]", "axis_value": value,
                              "resolved": dict(pts.provenance)})

        for i, step in enumerate(run_cfg.get("certify", [])):
            if step["kind"] == "mc":
                freq = mc_success_probability(
                    subspace, float(step["q"]), int(step["m"]),
                    int(step.get("trials", 100)), step.get("seed", default_seed))
                save(f"mc_{i}{tag}.json", serialize.dumps(
                    {"schema": "manifest/1", "kind": "mc_frequency",
                     "q": step["q"], "m": step["m"], "frequency": freq}))
                steps_log.append({"step": f"certify[{i}]", "kind": "mc",
                                  "axis_value": value, "frequency": freq})
                continue
            for j, (target, pts) in enumerate(pointsets):
                rep = _run_certify(step, target, pts, default_seed, constants)
                if step["kind"] == "chain":
                    save(f"report_{i}_{j}{tag}.json", serialize.dumps(
                        {"schema": "manifest/1", "kind": "chain",
                         "d": rep.d, "h": rep.h, "bound": rep.bound,
                         "ok": rep.ok}))
                else:
                    save_doc(f"report_{i}_{j}{tag}.json", rep)
                    rows.extend(serialize.report_csv_rows(
                        [rep], constants=constants, extra=extra))
                steps_log.append({"step": f"certify[{i}]", "point_step": j,
                                  "kind": step["kind"], "axis_value": value})

        if "kernel" in run_cfg:
            kcfg = run_cfg["kernel"]
            vp = None
            if "vp_classical" in kcfg:
                vp = vp_classical(int(kcfg["vp_classical"]),
                                  resolution=int(kcfg.get("resolution", 4096)))
            elif "vp_search" in kcfg:
                vcfg = kcfg["vp_search"]
                support = _build_frequencies({"generator": "box",
                                              **vcfg["support"]}) \
                    if "limits" in vcfg["support"] else \
                    FrequencySet.from_list(vcfg["support"]["freqs"])
                vp = vp_search(subspace.frequencies, support,
                               iters=int(vcfg.get("iters", 600)),
                               seed=vcfg.get("seed", default_seed),
                               resolution=int(vcfg.get("resolution", 1024))).record
            rep = kernel_report(subspace, vp=vp,
                                c1=float(kcfg.get("c1", constants.get("c1", 1.0))))
            save_doc(f"kernel{tag}.json", rep)
            steps_log.append({"step": "kernel", "axis_value": value,
                              "l1_max": rep.l1_max,
                              "point_budget": rep.point_budget})

        if "entropy" in run_cfg:
            ecfg = run_cfg["entropy"]
            est = estimate_entropy(subspace, float(ecfg.get("q", 2)),
                                   int(ecfg.get("n_max", 3)),
                                   int(ecfg.get("samples", 2000)),
                                   ecfg.get("seed", default_seed),
                                   target=ecfg.get("target", "lq"))
            save_doc(f"entropy{tag}.json", est)
            log = {"step": "entropy", "axis_value": value,
                   "levels": est.levels.tolist()}
            if "check_b" in ecfg:
                chk = check_entropy_growth(est, float(ecfg["check_b"]),
                                           subspace.n_dim, est.q)
                log["growth_ok"] = chk.ok
                log["required_b"] = chk.required_b
            steps_log.append(log)

        if "remez" in run_cfg:
            rcfg = run_cfg["remez"]
            if "thresholds" in rcfg and rcfg["thresholds"]:
                thr = remez_thresholds(subspace.frequencies, s=rcfg.get("s"),
                                       c1=constants.get("c1", 1.0),
                                       C1=constants.get("C1", 1.0),
                                       c_d=constants.get("c_d", 1.0),
                                       C_d=constants.get("C_d", 1.0))
                save(f"remez_thresholds{tag}.json", serialize.dumps(
                    {"schema": "manifest/1", "kind": "remez_thresholds",
                     "values": thr}))
            if "excluded" in rcfg:
                exc = _build_excluded(subspace.space, rcfg["excluded"])
                rep = remez_constant(subspace, exc)
                save_doc(f"remez{tag}.json", rep)
                save_doc(f"excluded{tag}.json", exc)
                rows.extend(serialize.report_csv_rows([rep], constants=constants,
                                                      extra=extra))
                steps_log.append({"step": "remez", "axis_value": value,
                                  "r": rep.r, "measure": rep.measure})
                if "check_discretization" in rcfg:
                    ccfg = rcfg["check_discretization"]
                    target, pts = pointsets[int(ccfg.get("points_step", 0))]
                    d = certify_uniform(target, pts).d
                    chk = remez_from_discretization(target, pts, d, exc,
                                                    tol=float(ccfg.get("tol", 1e-6)))
                    if chk.verdict == "hypothesis-unmet":
                        hypothesis_unmet = True
                    save(f"remez_check{tag}.json", serialize.dumps(
                        {"schema": "manifest/1", "kind": "remez_check",
                         "verdict": chk.verdict, "r": chk.r, "d": chk.d,
                         "m": chk.m, "measure": chk.measure}))
                    steps_log.append({"step": "remez_check",
                                      "axis_value": value,
                                      "verdict": chk.verdict})

    if rows:
        serialize.write_report_csv(out_dir / "table.csv", rows)
        artifacts["table.csv"] = hashlib.sha256(
            (out_dir / "table.csv").read_bytes()).hexdigest()

    manifest = {
        "schema": "manifest/1",
        "config_digest": config_digest(cfg),
        "tool_version": __version__,
        "started": started,
        "finished": time.strftime("%Y-%m-%dT%H:%M:%S"),
        "steps": steps_log,
        "artifacts": artifacts,
    }
    (out_dir / "manifest.json").write_text(serialize.dumps(manifest),
                                           encoding="utf-8")
    return manifest, EXIT_HYPOTHESIS if hypothesis_unmet else EXIT_OK


def _apply_axis(cfg, axis, value):
    if axis is None or value is None:
        return cfg
    run_cfg = json.loads(json.dumps(cfg))
    if axis == "m":
        for step in run_cfg.get("points", []):
            if "m" in step:
                step["m"] = int(value)
        for step in run_cfg.get("certify", []):
            if step.get("kind") == "mc":
                step["m"] = int(value)
    elif axis == "b":
        for step in run_cfg.get("points", []):
            if step.get("method") == "bss":
                step["b"] = float(value)
    elif axis == "q":
        for step in run_cfg.get("certify", []):
            if step.get("kind") in ("lq", "mc"):
                step["q"] = float(value)
        if "entropy" in run_cfg:
            run_cfg["entropy"]["q"] = float(value)
    elif axis == "measure":
        exc = run_cfg.get("remez", {}).get("excluded", {})
        if "max_measure" in exc:
            exc["max_measure"] = float(value)
    elif axis == "grid":
        run_cfg["subspace"]["grid"] = int(value)
    return run_cfg


def _fmt_tag(value):
    if isinstance(value, float) and not value.is_integer():
        return str(value).replace(".", "p")
    return str(int(value)) if isinstance(value, (int, float)) else str(value)


# ---------------------------------------------------------------------------
# The report renderer
# ---------------------------------------------------------------------------

_REPORT_KINDS = ("entropy_estimate/1", "kernel_report/1", "mz_report/1",
                 "remez_report/1", "uniform_report/1")


def render_report(paths, out_dir: Path | None):
    """Aligned text tables per report type plus plot-data files per axis."""
    docs = []
    files = []
    for p in paths:
        p = Path(p)
        if p.is_dir():
            files.extend(sorted(p.glob("*.json")))
        else:
            files.append(p)
    tables = []
    for f in files:
        try:
            doc = json.loads(f.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"{f}: cannot read report ({exc})") from exc
        schema = doc.get("schema")
        if f.name == "table.csv":
            continue
        if f.name == "manifest.json" or schema == "manifest/1":
            continue
        if schema not in serialize.SCHEMAS:
            raise SchemaMismatchError(
                f"{f}: unsupported schema {schema!r}; no migration path")
        if schema in _REPORT_KINDS:
            docs.append((schema, f.name, doc))
        if f.parent not in tables and (f.parent / "table.csv").exists():
            tables.append(f.parent)

    lines = []
    for kind in _REPORT_KINDS:
        group = sorted((name, doc) for s, name, doc in docs if s == kind)
        if not group:
            continue
        lines.append(f"== {kind.split('/')[0]} ==")
        header, getter = _TABLE_SHAPES[kind]
        widths = [max(len(h), 12) for h in header]
        lines.append("  ".join(h.ljust(w) for h, w in zip(header, widths)))
        for name, doc in group:
            row = getter(name, doc)
            lines.append("  ".join(str(v)[:w].ljust(w)
                                   for v, w in zip(row, widths)))
        lines.append("")
    text = "\n".join(lines)

    plot_files = {}
    for folder in tables:
        plot_files.update(_plot_data(folder / "table.csv", out_dir or folder))
    return text, plot_files


_TABLE_SHAPES = {
    "mz_report/1": (
        ("file", "q", "m", "c1", "c2", "method"),
        lambda name, d: (name, d["q"], d["m"], d["c1"], d["c2"], d["method"]),
    ),
    "uniform_report/1": (
        ("file", "m", "d", "resolution"),
        lambda name, d: (name, d["m"], d["d"], d["resolution"]),
    ),
    "remez_report/1": (
        ("file", "measure", "r", "resolution"),
        lambda name, d: (name, d["measure"], d["r"], d["resolution"]),
    ),
    "kernel_report/1": (
        ("file", "l1_max", "diag_sqrt_max", "bilinear_bound", "point_budget"),
        lambda name, d: (name, d["l1_max"], d["diag_sqrt_max"],
                         d["bilinear_bound"], d["point_budget"]),
    ),
    "entropy_estimate/1": (
        ("file", "q", "target", "levels"),
        lambda name, d: (name, d["q"], d["target"],
                         ";".join(serialize.format_float(x) for x in d["levels"])),
    ),
}


def _plot_data(table_path, out_dir):
    rows = table_path.read_text(encoding="utf-8").strip().split("\n")
    header = rows[0].split(",")
    out = {}
    series = {}
    for line in rows[1:]:
        cells = dict(zip(header, line.split(",")))
        tags = dict(kv.split("=", 1) for kv in cells["constants"].split(";")
                    if "=" in kv)
        if "axis" not in tags or "value" not in tags:
            continue
        metric = "d" if cells["d"] else "c1"
        key = (tags["axis"], cells["report"], metric)
        series.setdefault(key, []).append((tags["value"], cells[metric] or ""))
    for (axis, report, metric), pairs in sorted(series.items()):
        name = f"plot_{axis}_{report}_{metric}.csv"
        body = "\n".join([f"{axis},{metric}"] +
                         [f"{x},{y}" for x, y in pairs]) + "\n"
        path = Path(out_dir) / name
        path.write_text(body, encoding="utf-8")
        out[name] = str(path)
    return out


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

_COMMANDS = ("subspace", "design", "points", "certify", "kernel", "entropy",
             "remez", "run", "report")

_SECTIONS = {
    "subspace": (),
    "design": ("design",),
    "points": ("design", "points"),
    "certify": ("design", "points", "certify"),
    "kernel": ("design", "kernel"),
    "entropy": ("design", "entropy"),
    "remez": ("design", "points", "remez"),
    "run": ("design", "points", "certify", "kernel", "entropy", "remez",
            "sweep"),
}


def _restrict(cfg, command):
    """Keep only the sections a single-purpose command executes."""
    kept = {"seed", "out", "constants", "subspace"} | set(_SECTIONS[command])
    return {k: v for k, v in cfg.items() if k in kept}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sampdisc",
        description="Sampling point sets and certified discretization "
                    "constants for finite-dimensional function spaces.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        sp = subparsers.add_parser(name)
        if name == "report":
            sp.add_argument("paths", nargs="+")
            sp.add_argument("--out", default=None)
            continue
        sp.add_argument("--config", required=True)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--out", default=None)
        sp.add_argument("--grid", type=int, default=None)
        sp.add_argument("--override", action="append", default=[],
                        metavar="NAME=VALUE")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "report":
            text, plots = render_report(args.paths,
                                        Path(args.out) if args.out else None)
            sys.stdout.write(text)
            for name in sorted(plots):
                sys.stdout.write(f"plot-data: {plots[name]}\n")
            return EXIT_OK
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg["seed"] = args.seed
        if args.grid is not None:
            cfg["subspace"]["grid"] = args.grid
        for item in args.override:
            if "=" not in item:
                raise ConfigError(f"--override needs NAME=VALUE, got {item!r}")
            name, value = item.split("=", 1)
            cfg.setdefault("constants", {})[name] = float(value)
        if args.command != "run":
            cfg = _restrict(cfg, args.command)
        out_dir = Path(args.out or cfg.get("out", "out"))
        manifest, code = execute(cfg, out_dir)
        sys.stdout.write(f"wrote {len(manifest['artifacts'])} artifacts to "
                         f"{out_dir} (digest {manifest['config_digest'][:12]})\n")
        return code
    except (ConfigError, SchemaMismatchError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_VALIDATION
    except (NumericalError, ArithmeticError) as exc:
        step = getattr(exc, "context", {})
        sys.stderr.write(f"numerical failure: {exc} {step}\n")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
