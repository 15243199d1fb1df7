"""Command line interface: ``sensireach {run,compare,mc} --config FILE``.

Exit status: 0 success, 1 Monte-Carlo containment failure of a guaranteed
result, 2 configuration error, 3 numerical failure (the message names the
failing step).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from .errors import SensireachError, StepError
from .integrators import IntegratorConfig
from .interval import IntervalMatrix
from .models import make_model
from .pipeline import (
    ReachProblem,
    monte_carlo_check,
    run_algorithm1,
    run_ia_only,
    run_sampling_falsification,
)
from .sampling import uniform_grid

SCHEMA_VERSION = 1
EXIT_OK, EXIT_UNSOUND, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


class ConfigError(Exception):
    pass


def _schema(name):
    return json.loads(resources.files("sensireach.data").joinpath(name).read_text())


def bundled_config(name):
    """Path-like handle of a bundled example config (``unicycle.json`` ...)."""
    return resources.files("sensireach.data").joinpath(name)


def load_config(path):
    try:
        cfg = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    try:
        jsonschema.validate(cfg, _schema("config.schema.json"))
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config {path}: {exc.message} (at {where})") from exc
    for k, (lo, hi) in enumerate(cfg["X0"]):
        if lo > hi:
            raise ConfigError(f"X0[{k}] has lo > hi ({lo} > {hi})")
    if cfg["tf"] < cfg["t0"]:
        raise ConfigError("tf must be >= t0")
    return cfg


def build_problem(cfg):
    x0 = IntervalMatrix.from_pairs(cfg["X0"])
    spec = cfg["model"]
    try:
        model = make_model(spec["name"], spec.get("params", {}), x0, cfg["t0"], cfg["tf"])
    except SensireachError as exc:
        raise StepError("model setup", exc) from exc
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(str(exc.args[0]) if exc.args else str(exc)) from exc
    if model.n != x0.shape[0]:
        raise ConfigError(f"X0 has {x0.shape[0]} dimensions but model {spec['name']!r} has {model.n}")
    return ReachProblem(model, float(cfg["t0"]), float(cfg["tf"]), x0)


def integrator_config(cfg):
    return IntegratorConfig(**cfg.get("integrator", {}))


def plan(cfg, grids):
    """``(method, grid)`` pairs requested by a config."""
    method = cfg.get("method", "algorithm1")
    sf = cfg.get("falsification", {})
    jobs = []
    if method in ("algorithm1", "all"):
        jobs += [("algorithm1", a) for a in grids]
    if method in ("ia_only", "all"):
        jobs.append(("ia_only", None))
    if method in ("sampling_falsification", "all"):
        jobs.append(("sampling_falsification", sf.get("grid", cfg.get("grid", 2))))
    return jobs


def tag_of(method, a):
    return method if a is None else f"{method}_a{a}"


def execute(problem, cfg, method, a, threads):
    icfg = integrator_config(cfg)
    order = cfg.get("taylor_order")
    if method == "algorithm1":
        return run_algorithm1(problem, a, icfg, order, threads, cfg.get("dispersion", "per_dim"))
    if method == "ia_only":
        return run_ia_only(problem, icfg, order, threads)
    max_iters = cfg.get("falsification", {}).get("max_iters", 2)
    return run_sampling_falsification(problem, a, max_iters, icfg, threads)


def _iv(m):
    return None if m is None else {"lo": m.lo.tolist(), "hi": m.hi.tolist()}


def result_document(problem, cfg, result, tag):
    b = result.bundle
    return {
        "schema_version": SCHEMA_VERSION,
        "model": cfg["model"]["name"],
        "method": b.method,
        "tag": tag,
        "guaranteed": result.guaranteed,
        "grid_per_dim": b.grid_per_dim,
        "taylor_order": b.taylor_order,
        "t0": problem.t0,
        "tf": problem.tf,
        "X0": _iv(problem.x0),
        "over_approx": _iv(result.over_approx),
        "sx_set": _iv(b.sx_set),
        "sx_tube": _iv(b.sx_tube),
        "sxx_set": _iv(b.sxx_set),
    }


def validate_result(doc):
    jsonschema.validate(doc, _schema("result.schema.json"))
    for key in ("X0", "over_approx", "sx_set", "sx_tube", "sxx_set"):
        if doc.get(key) is not None and np.any(np.asarray(doc[key]["lo"]) > np.asarray(doc[key]["hi"])):
            raise ValueError(f"result field {key} has lo > hi")


def write_json(path, obj):
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


def box_polygon(box):
    """Closed outline of the box projected on its first two coordinates."""
    lo, hi = box.lo, box.hi
    if len(lo) == 1:
        return ["x1"], [[lo[0]], [hi[0]]]
    corners = [(lo[0], lo[1]), (hi[0], lo[1]), (hi[0], hi[1]), (lo[0], hi[1]), (lo[0], lo[1])]
    return ["x1", "x2"], corners


def _write_result(out, problem, cfg, result, tag):
    doc = result_document(problem, cfg, result, tag)
    validate_result(doc)
    write_json(out / f"result_{tag}.json", doc)
    header, rows = box_polygon(result.over_approx)
    write_csv(out / f"plot_{tag}.csv", header, rows)


def _output_dir(cfg, args):
    out = Path(args.out or cfg.get("output_dir", "out"))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _run_jobs(problem, cfg, jobs, threads, out):
    results = {}
    for method, a in jobs:
        tag = tag_of(method, a)
        try:
            res = execute(problem, cfg, method, a, threads)
        except StepError as exc:
            raise StepError(f"{tag}/{exc.step}", exc.cause) from exc
        _write_result(out, problem, cfg, res, tag)
        results[tag] = res
        print(f"{tag}: " + " ".join(f"[{l:.6g}, {h:.6g}]" for l, h in zip(res.over_approx.lo, res.over_approx.hi)))
    return results


def cmd_run(args):
    cfg = load_config(args.config)
    problem = build_problem(cfg)
    out = _output_dir(cfg, args)
    results = _run_jobs(problem, cfg, plan(cfg, [cfg.get("grid", 2)]), args.threads, out)
    write_json(out / "timings.json", {tag: r.timings for tag, r in results.items()})
    return EXIT_OK


SUMMARY_STEPS = ("step1", "step2", "step3", "step4", "sampling", "falsification")


def cmd_compare(args):
    cfg = load_config(args.config)
    problem = build_problem(cfg)
    out = _output_dir(cfg, args)
    grids = cfg.get("grids", [cfg.get("grid", 2)])
    results = _run_jobs(problem, cfg, plan(cfg, grids), args.threads, out)
    n = problem.model.n
    header = ["tag", "method", "grid", "samples", "guaranteed"] + [f"t_{s}" for s in SUMMARY_STEPS]
    header += [f"w_x{i + 1}" for i in range(n)]
    rows = []
    for tag, res in results.items():
        a = res.bundle.grid_per_dim
        samples = "" if a is None else len(uniform_grid(problem.x0, a))
        row = [tag, res.bundle.method, "" if a is None else a, samples, res.guaranteed]
        row += [res.timings.get(s, "") for s in SUMMARY_STEPS]
        row += list(res.over_approx.width)
        rows.append(row)
    write_csv(out / "summary.csv", header, rows)
    write_json(out / "summary.json", [dict(zip(header, r)) for r in rows])
    for row in rows:
        print(", ".join(str(v) for v in row))
    return EXIT_OK


def _load_box(path):
    doc = json.loads(path.read_text())
    validate_result(doc)
    return IntervalMatrix(doc["over_approx"]["lo"], doc["over_approx"]["hi"]), doc["guaranteed"]


def cmd_mc(args):
    cfg = load_config(args.config)
    mc = cfg.get("monte_carlo", {})
    count = mc.get("count", 500)
    seed = args.seed if args.seed is not None else mc.get("seed", 0)
    problem = build_problem(cfg)
    out = _output_dir(cfg, args)
    boxes = {}
    for method, a in plan(cfg, [cfg.get("grid", 2)]):
        tag = tag_of(method, a)
        path = out / f"result_{tag}.json"
        if path.exists():
            boxes[tag] = _load_box(path)
        else:
            boxes.update({t: (r.over_approx, r.guaranteed) for t, r in _run_jobs(problem, cfg, [(method, a)], args.threads, out).items()})
    icfg = integrator_config(cfg)
    report = {"schema_version": SCHEMA_VERSION, "count": count, "seed": seed, "results": []}
    endpoints = None
    status = EXIT_OK
    for tag, (box, guaranteed) in boxes.items():
        try:
            rep = monte_carlo_check(problem, box, count, seed, icfg, args.threads)
        except SensireachError as exc:
            raise StepError("monte-carlo", exc) from exc
        endpoints = rep.endpoints
        report["results"].append({
            "tag": tag,
            "guaranteed": guaranteed,
            "fraction_contained": rep.fraction_contained,
            "worst_violation": rep.worst_violation.tolist(),
            "slack": rep.slack,
        })
        print(f"{tag}: contained {rep.fraction_contained:.4f} of {count}")
        if guaranteed and rep.fraction_contained < 1.0:
            status = EXIT_UNSOUND
    n = problem.model.n
    write_csv(out / "mc_endpoints.csv", [f"x{i + 1}" for i in range(n)], endpoints.tolist())
    write_json(out / "mc_report.json", report)
    return status


def build_parser():
    parser = argparse.ArgumentParser(prog="sensireach", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func, help_ in (
        ("run", cmd_run, "run the configured method(s)"),
        ("compare", cmd_compare, "run every method over the configured grid levels and tabulate"),
        ("mc", cmd_mc, "Monte-Carlo containment check of results"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--out", help="output directory (overrides output_dir)")
        p.add_argument("--seed", type=int, help="Monte-Carlo seed (overrides monte_carlo.seed)")
        p.add_argument("--threads", type=int, help="worker threads, 0 = all cores (default: $SENSIREACH_THREADS or 1)")
        p.set_defaults(func=func)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"sensireach: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SensireachError as exc:
        print(f"sensireach: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
