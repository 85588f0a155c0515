"""Command-line front end: measure | deform | schlesinger-verify | pell |
comb | billiard | selftest.

Structured results go to JSON, sampled curves and trajectories to CSV;
numbers are serialized with 17 significant digits and every output embeds
the run manifest (inputs, node count, seed, tolerance overrides), so reruns
are byte-identical.  Exit codes: 0 all gates pass, 1 a numerical gate failed
(the failing criterion is named), 2 usage or input errors.

--plot renders a matplotlib figure next to the delimited output of the
subcommands that produce one; default runs never import a plotting backend.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from . import acceptance as ac
from . import billiard as bl
from . import comb as cb
from . import deform as df
from . import measures as ms
from . import pell as pl
from . import schlesinger as sc
from .curve import ConfigError, IntervalSystem, TCurveConfig, moebius_normalize

USAGE_ERROR = 2
GATE_ERROR = 1


# ---------------------------------------------------------------------------
# deterministic serialization


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _ser(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = []
        for k in sorted(obj, key=str):
            items.append(f'{pad}  "{k}": {_ser(obj[k], indent + 1)}')
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)) or isinstance(obj, np.ndarray):
        seq = list(obj)
        if not seq:
            return "[]"
        items = [f"{pad}  {_ser(v, indent + 1)}" for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, complex):
        return _ser([obj.real, obj.imag], indent)
    if isinstance(obj, (float, np.floating)):
        return _fmt(obj)
    return json.dumps(obj)


def write_json(path: Path, obj) -> None:
    path.write_text(_ser(obj) + "\n")


def write_csv(path: Path, header, rows) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


@dataclass(frozen=True)
class RunManifest:
    """Reproducibility record embedded in every structured output."""

    subcommand: str
    input: str | None
    node_count: int
    seed: int
    tol: float
    outputs: list[str]
    version: str

    def __post_init__(self):
        if self.tol <= 0:
            raise UsageError(f"tolerance must be positive, got {self.tol}")
        if self.node_count <= 0:
            raise UsageError(f"node count must be positive, got {self.node_count}")


def _manifest(args, outputs: list[str]) -> dict:
    return asdict(
        RunManifest(
            subcommand=args.cmd,
            input=getattr(args, "input", None) or getattr(args, "e", None),
            node_count=args.nodes,
            seed=args.seed,
            tol=args.tol,
            outputs=outputs,
            version=__version__,
        )
    )


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise UsageError(f"input file not found: {path}")
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON in {path}: {exc}")


class UsageError(SystemExit):
    def __init__(self, msg: str):
        print(f"error: {msg}", file=sys.stderr)
        super().__init__(USAGE_ERROR)


def _load_intervals(path: str) -> IntervalSystem:
    data = _load_json(path)
    try:
        return IntervalSystem.from_dict(data)
    except (KeyError, ConfigError) as exc:
        raise UsageError(f"invalid interval system in {path}: {exc}")


def _load_config(path: str) -> TCurveConfig:
    data = _load_json(path)
    try:
        if "x" in data:
            return TCurveConfig.from_dict(data)
        if "endpoints" in data:
            E = IntervalSystem.from_dict(data)
            sigma = tuple(data.get("sigma_hat", ("l",) * (E.d - 1)))
            cfg, _ = moebius_normalize(E, sigma)
            return cfg
    except ConfigError as exc:
        raise UsageError(f"invalid configuration in {path}: {exc}")
    raise UsageError(f"{path} holds neither a config nor an interval system")


def _outdir(args) -> Path:
    out = Path(args.out if args.out is not None else ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# subcommands


def cmd_measure(args) -> int:
    E = _load_intervals(args.input)
    y0 = math.inf if args.y0 is None else float(args.y0)
    masses = ms.harmonic_measures(E, y0, args.nodes)
    freqs = np.cumsum(masses)
    out = _outdir(args)
    csv_path = out / "measure.csv"
    write_csv(
        csv_path,
        ["interval", "mass", "cumulative_frequency"],
        [(k + 1, m, f) for k, (m, f) in enumerate(zip(masses, freqs))],
    )
    outputs = [str(csv_path)]
    if args.plot:
        from . import viz

        png = out / "measure.png"
        viz.plot_measure(E, masses, str(png))
        outputs.append(str(png))
    report = {
        "masses": list(masses),
        "frequencies": list(freqs[:-1]),
        "pole": "infinity" if math.isinf(y0) else y0,
        "manifest": _manifest(args, outputs),
    }
    json_path = out / "measure.json"
    write_json(json_path, report)
    print(f"wrote {csv_path} and {json_path}")
    return 0


def cmd_deform(args) -> int:
    spec = _load_json(args.input)
    cfg = _load_config_from_obj(spec)
    policy = spec.get("policy", "harmonic")
    steps = int(spec.get("steps", 10))
    x_end = np.asarray(spec["x_end"], dtype=float)
    path = df.integrate_path(cfg, x_end, steps, policy=policy, node_count=args.nodes)
    out = _outdir(args)
    g = cfg.g
    header = (
        [f"x{i + 1}" for i in range(g)]
        + [f"u{i + 1}" for i in range(g - 1)]
        + ["y0"]
        + [f"f{i + 1}" for i in range(len(path.target))]
        + ["drift"]
    )
    rows = []
    for k, c in enumerate(path.configs):
        drift = 0.0 if k == 0 else path.drift[k - 1]
        if policy == "harmonic":
            fr = ms.harmonic_partial_sums(c, args.nodes)
        else:
            fr = np.asarray(ms.frequency_map(path.hat_systems[k], args.nodes).values)
        rows.append(list(c.x) + list(c.u) + [c.y0] + list(fr) + [drift])
    csv_path = out / "deform_path.csv"
    write_csv(csv_path, header, rows)
    outputs = [str(csv_path)]
    if args.plot:
        from . import viz

        png = out / "deform_path.png"
        viz.plot_path(np.array([r for r in rows], dtype=float), header, str(png))
        outputs.append(str(png))
    report = {
        "policy": path.policy,
        "steps": len(path.configs) - 1,
        "target": list(path.target),
        "max_drift": path.max_drift(),
        "final_config": path.configs[-1].to_dict(),
        "manifest": _manifest(args, outputs),
    }
    json_path = out / "deform.json"
    write_json(json_path, report)
    print(f"wrote {csv_path} and {json_path}; max drift {path.max_drift():.3e}")
    return 0


def _load_config_from_obj(spec) -> TCurveConfig:
    try:
        if "config" in spec:
            return TCurveConfig.from_dict(spec["config"])
        if "endpoints" in spec:
            E = IntervalSystem.from_dict(spec)
            return moebius_normalize(E, tuple(spec.get("sigma_hat", ("l",) * (E.d - 1))))[0]
    except ConfigError as exc:
        raise UsageError(f"invalid configuration: {exc}")
    raise UsageError("deform spec needs a 'config' or interval data")


def cmd_schlesinger_verify(args) -> int:
    cfg = _load_config(args.input)
    h = args.h
    report = {"h": h, "directions": [], "identities": sc.identity_checks(cfg, node_count=args.nodes)}
    worst = 0.0
    for i in range(cfg.g):
        rep = sc.verify_schlesinger(cfg, i=i, h=h, node_count=args.nodes)
        report["directions"].append(
            {"i": i, "max_defect": rep["max_defect"],
             "per_point": {str(k): v["fd_vs_rhs"] for k, v in rep["entries"].items()}}
        )
        worst = max(worst, rep["max_defect"])
    report["max_defect"] = worst
    report["manifest"] = _manifest(args, [])
    out = _outdir(args)
    json_path = out / "schlesinger_verify.json"
    report["manifest"]["outputs"] = [str(json_path)]
    write_json(json_path, report)
    print(f"wrote {json_path}; max FD-vs-RHS defect {worst:.3e}")
    if worst > args.tol:
        print(f"gate failed: constrained-Schlesinger defect {worst:.3e} > {args.tol}")
        return GATE_ERROR
    return 0


def cmd_pell(args) -> int:
    E = _load_intervals(args.e)
    try:
        cert = pl.chebyshev_poly(E, args.n, args.nodes)
    except pl.RegularityError as exc:
        print(f"gate failed: {exc}")
        return GATE_ERROR
    out = _outdir(args)
    json_path = out / "pell.json"
    outputs = [str(json_path)]
    if args.plot:
        from . import viz

        png = out / "pell.png"
        viz.plot_pell(E, cert.p_coeffs, str(png))
        outputs.append(str(png))
    report = {
        "n": cert.n,
        "p_coeffs": list(cert.p_coeffs),
        "q_coeffs": list(cert.q_coeffs),
        "signature": list(cert.signature),
        "winding": list(cert.winding),
        "residual": cert.residual,
        "manifest": _manifest(args, outputs),
    }
    write_json(json_path, report)
    print(
        f"wrote {json_path}; residual {cert.residual:.3e}, "
        f"signature {cert.signature}, winding {cert.winding}"
    )
    if cert.residual > args.tol:
        print(f"gate failed: Pell residual {cert.residual:.3e} > {args.tol}")
        return GATE_ERROR
    return 0


def cmd_comb(args) -> int:
    E = _load_intervals(args.e)
    region = cb.comb_region(E, args.nodes)
    poly = cb.boundary_polyline(E, args.samples, args.nodes)
    out = _outdir(args)
    csv_path = out / "comb_boundary.csv"
    write_csv(csv_path, ["x", "y"], [tuple(r) for r in poly])
    outputs = [str(csv_path)]
    if args.plot:
        from . import viz

        png = out / "comb.png"
        viz.plot_comb(poly, region, str(png))
        outputs.append(str(png))
    report = {
        "q": list(region.q),
        "h": list(region.h),
        "manifest": _manifest(args, outputs),
    }
    json_path = out / "comb.json"
    write_json(json_path, report)
    print(f"wrote {csv_path} and {json_path}")
    return 0


def cmd_billiard(args) -> int:
    data = _load_json(args.input)
    try:
        config = bl.BilliardConfig.from_dict(data)
    except ConfigError as exc:
        raise UsageError(f"invalid billiard configuration: {exc}")
    n_bounces = int(data.get("bounces", args.bounces))
    try:
        traj = bl.simulate(config, n_bounces=n_bounces, seed=args.seed)
    except bl.ConservationError as exc:
        print(f"gate failed: {exc}")
        return GATE_ERROR
    out = _outdir(args)
    csv_path = out / "trajectory.csv"
    d = config.d
    write_csv(
        csv_path,
        [f"x{i + 1}" for i in range(d)],
        [tuple(p) for p in traj.points],
    )
    outputs = [str(csv_path)]
    if args.plot:
        from . import viz

        png = out / "trajectory.png"
        viz.plot_trajectory(traj.points, str(png))
        outputs.append(str(png))
    E, sigma_hat = bl.intervals_from_billiard(config)
    report = {
        "winding": list(traj.winding),
        "closure_gap": traj.closure_gap,
        "tangency_drift": traj.tangency_drift,
        "periodic": traj.closure_gap < args.tol,
        "interval_system": E.to_dict(),
        "sigma_hat": list(sigma_hat),
        "manifest": _manifest(args, outputs),
    }
    json_path = out / "billiard.json"
    write_json(json_path, report)
    print(
        f"wrote {csv_path} and {json_path}; winding {traj.winding}, "
        f"closure gap {traj.closure_gap:.3e}"
    )
    return 0


def cmd_selftest(args) -> int:
    rows = ac.run_all(node_count=args.nodes, seed=args.seed)
    width = max(len(r["criterion"]) for r in rows)
    failed = []
    for r in rows:
        mark = "PASS" if r["pass"] else "FAIL"
        print(
            f"{mark}  {r['criterion']:<{width}s}  value={r['value']:.3e}  "
            f"bound={r['bound']:.1e}"
        )
        if not r["pass"]:
            failed.append(r["criterion"])
    if args.out is not None:
        out = _outdir(args)
        json_path = out / "selftest.json"
        write_json(json_path, {"results": rows, "manifest": _manifest(args, [str(json_path)])})
        print(f"wrote {json_path}")
    if failed:
        print(f"{len(failed)} criterion(s) failed: {', '.join(failed)}")
        return GATE_ERROR
    print(f"all {len(rows)} acceptance rows passed")
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="isoharm",
        description="isoharmonic deformations of multi-interval sets",
    )
    ap.add_argument("--tol", type=float, default=1e-6, help="numerical gate tolerance")
    ap.add_argument("--nodes", type=int, default=256, help="quadrature node count")
    ap.add_argument("--seed", type=int, default=ac.DEFAULT_SEED, help="seed for randomized suites")
    ap.add_argument("--out", default=None, help="output directory (default: current)")
    ap.add_argument("--plot", action="store_true", help="render figures next to the data files")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("measure", help="equilibrium/harmonic measures of an interval system")
    p.add_argument("input", help="interval system JSON")
    p.add_argument("--y0", type=float, default=None, help="finite pole (default: infinity)")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("deform", help="integrate an isoharmonic deformation path")
    p.add_argument("input", help="path spec JSON: config/intervals, x_end, steps, policy")
    p.set_defaults(func=cmd_deform)

    p = sub.add_parser("schlesinger-verify", help="FD verification of the residue matrices")
    p.add_argument("input", help="curve configuration JSON")
    p.add_argument("--h", type=float, default=1e-4, help="central-difference step")
    p.set_defaults(func=cmd_schlesinger_verify)

    p = sub.add_parser("pell", help="extremal-polynomial certificate")
    p.add_argument("--e", "--E", dest="e", required=True, help="interval system JSON")
    p.add_argument("--n", type=int, required=True, help="certificate degree")
    p.set_defaults(func=cmd_pell)

    p = sub.add_parser("comb", help="comb region and boundary polyline")
    p.add_argument("--e", "--E", dest="e", required=True, help="interval system JSON")
    p.add_argument("--samples", type=int, default=64, help="samples per boundary segment")
    p.set_defaults(func=cmd_comb)

    p = sub.add_parser("billiard", help="simulate a confocal billiard")
    p.add_argument("input", help="billiard configuration JSON")
    p.add_argument("--bounces", type=int, default=10)
    p.set_defaults(func=cmd_billiard)

    p = sub.add_parser("selftest", help="run the acceptance suite")
    p.set_defaults(func=cmd_selftest)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors already
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        return int(exc.code or USAGE_ERROR)
    except ConfigError as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
