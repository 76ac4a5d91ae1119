"""Command-line interface.

Every subcommand writes its artifacts into --out; JSON artifacts embed
the resolved configuration, package version, and a timestamp (the only
field allowed to vary between identical runs), CSV artifacts embed the
configuration in leading comment lines.  Numbers are printed with 17
significant digits, '.' decimal separator, ',' field separator, and LF
line endings.  Exit codes: 0 success, 2 validation error, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import contextlib
import datetime
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .asymptotics import convergence_sweep
from .basis import space_dimension
from .equilibrium import (
    EquilibriumMeasure,
    arcsine,
    ball_measure,
    cube_measure,
    eq_cdf,
    eq_density,
    eq_moment,
    eq_moment_mixed,
    simplex_measure,
    weighted_ball_green,
    weighted_ball_measure,
)
from .fekete import approx_fekete, tfd_table, tfd_to_csv
from .gram import SingularGramError, christoffel, moment_matrix, orthonormal_factor
from .measure import (
    ball,
    basis_for_space,
    cube,
    design_from_json,
    design_to_json,
    disk,
    gaussian_weight,
    interval,
    simplex,
    unit_weight,
    weight_from_json,
)
from .optimal import d_optimal, g_value, vdm_integral_christoffel, vdm_integral_det
from .simulate import RegressionExperiment, simulate_regression, variance_identity_check

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3

_COMMON_DEFAULTS = {
    "domain": "interval",
    "dimension": 1,
    "a": 1.0,
    "grid": 401,
    "grid_angular": 64,
    "spacing": "chebyshev",
    "weight": "unit",
    "seed": 0,
    "threads": None,
    "out": ".",
}

_DEFAULTS = {
    "design": {**_COMMON_DEFAULTS, "degree": 2, "epsilon": 1e-5, "max_iter": None},
    "gvalue": {**_COMMON_DEFAULTS, "design": None, "degree": None},
    "fekete": {**_COMMON_DEFAULTS, "degree": 2, "exchange_passes": 2},
    "tfd": {**_COMMON_DEFAULTS, "degrees": "1,2,4,8", "epsilon": 1e-5, "max_iter": None, "exchange_passes": 2},
    "equilibrium": {**_COMMON_DEFAULTS, "target": "arcsine", "tmax": 6},
    "converge": {**_COMMON_DEFAULTS, "degrees": "2,4,8", "target": "arcsine", "tmax": 6, "epsilon": 1e-5, "max_iter": None},
    "simulate": {**_COMMON_DEFAULTS, "design": None, "degree": None, "sigma": 0.1, "obs": 100, "trials": 10000, "epsilon": 1e-6, "max_iter": None},
    "oracle": {**_COMMON_DEFAULTS, "atoms": 4, "degree": 2},
}


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="optdesign", description=__doc__)
    ap.add_argument("--version", action="version", version=f"optdesign {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file; explicit flags override it")
        p.add_argument("--domain", choices=["interval", "cube", "ball", "simplex", "disk"])
        p.add_argument("--dimension", type=int)
        p.add_argument("--a", type=float)
        p.add_argument("--grid", type=int, help="grid density (per-axis / radial count)")
        p.add_argument("--grid-angular", dest="grid_angular", type=int)
        p.add_argument("--spacing", choices=["chebyshev", "uniform"])
        p.add_argument("--weight", help="unit, gaussian, or a weight JSON file path")
        p.add_argument("--seed", type=int)
        p.add_argument("--threads", type=int, help="cap worker threads (env OPTDESIGN_THREADS)")
        p.add_argument("--out", help="output directory")

    p = sub.add_parser("design", help="solve a D-optimal design and certify it")
    common(p)
    p.add_argument("--degree", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--max-iter", dest="max_iter", type=int)

    p = sub.add_parser("gvalue", help="G-value of a stored design over the domain grid")
    common(p)
    p.add_argument("--design", help="design JSON file")
    p.add_argument("--degree", type=int)

    p = sub.add_parser("fekete", help="approximate weighted Fekete points")
    common(p)
    p.add_argument("--degree", type=int)
    p.add_argument("--exchange-passes", dest="exchange_passes", type=int)

    p = sub.add_parser("tfd", help="s-th order diameters vs Gram determinant roots")
    common(p)
    p.add_argument("--degrees", help="comma-separated degree list")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--max-iter", dest="max_iter", type=int)
    p.add_argument("--exchange-passes", dest="exchange_passes", type=int)

    p = sub.add_parser("equilibrium", help="tabulate an equilibrium measure")
    common(p)
    p.add_argument("--target", choices=["arcsine", "cube", "ball", "simplex", "wball"])
    p.add_argument("--tmax", type=int)

    p = sub.add_parser("converge", help="weak-* convergence diagnostics across degrees")
    common(p)
    p.add_argument("--degrees", help="comma-separated degree list")
    p.add_argument("--target", choices=["arcsine", "cube", "ball", "simplex", "wball"])
    p.add_argument("--tmax", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--max-iter", dest="max_iter", type=int)

    p = sub.add_parser("simulate", help="Monte Carlo check of the regression identities")
    common(p)
    p.add_argument("--design", help="design JSON file (default: solve the optimal design)")
    p.add_argument("--degree", type=int)
    p.add_argument("--sigma", type=float)
    p.add_argument("--obs", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--max-iter", dest="max_iter", type=int)

    p = sub.add_parser("oracle", help="cross-check determinants against brute-force sums")
    common(p)
    p.add_argument("--atoms", type=int)
    p.add_argument("--degree", type=int)
    return ap


def _resolve_config(args: argparse.Namespace) -> dict:
    cmd = args.command
    resolved = dict(_DEFAULTS[cmd])
    if getattr(args, "config", None):
        with open(args.config) as fh:
            file_cfg = json.load(fh)
        unknown = set(file_cfg) - set(resolved)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        resolved.update(file_cfg)
    for key in resolved:
        val = getattr(args, key, None)
        if val is not None:
            resolved[key] = val
    resolved["command"] = cmd
    return resolved


def _make_space(cfg: dict):
    dom = cfg["domain"]
    if dom == "interval":
        return interval(a=cfg["a"], grid=cfg["grid"], spacing=cfg["spacing"])
    if dom == "cube":
        return cube(dimension=cfg["dimension"], a=cfg["a"], per_axis=cfg["grid"])
    if dom == "ball":
        return ball(dimension=cfg["dimension"], a=cfg["a"], radial=cfg["grid"], angular=cfg["grid_angular"])
    if dom == "simplex":
        return simplex(dimension=cfg["dimension"], a=cfg["a"], refine=cfg["grid"])
    if dom == "disk":
        return disk(a=cfg["a"], radial=cfg["grid"], angular=cfg["grid_angular"])
    raise ValueError(f"unknown domain {dom!r}")


def _make_weight(cfg: dict):
    spec = cfg["weight"]
    if spec == "unit":
        return unit_weight()
    if spec == "gaussian":
        return gaussian_weight()
    path = Path(spec)
    if not path.exists():
        raise ValueError(f"weight {spec!r} is neither a known kind nor a file")
    return weight_from_json(path.read_text())


def _make_target(cfg: dict) -> EquilibriumMeasure:
    t = cfg["target"]
    if t == "arcsine":
        return arcsine(cfg["a"])
    if t == "cube":
        return cube_measure(cfg["dimension"], cfg["a"])
    if t == "ball":
        return ball_measure(cfg["dimension"], cfg["a"])
    if t == "simplex":
        return simplex_measure(cfg["dimension"], cfg["a"])
    if t == "wball":
        return weighted_ball_measure(cfg["dimension"])
    raise ValueError(f"unknown target {t!r}")


def _degree_list(cfg: dict) -> list[int]:
    raw = cfg["degrees"]
    if isinstance(raw, str):
        vals = [int(v) for v in raw.split(",") if v.strip()]
    else:
        vals = [int(v) for v in raw]
    if not vals or any(v < 0 for v in vals):
        raise ValueError(f"bad degree list {raw!r}")
    return vals


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, float) and math.isinf(obj):
        return "inf" if obj > 0 else "-inf"
    return obj


def _write_json(out: Path, name: str, cfg: dict, results: dict) -> None:
    payload = {
        "artifact": name,
        "version": __version__,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "config": _plain(cfg),
        "results": _plain(results),
    }
    (out / f"{name}.json").write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _csv_header(cfg: dict) -> str:
    canon = json.dumps(_plain(cfg), sort_keys=True, separators=(",", ":"))
    return f"# optdesign {__version__}\n# config {canon}\n"


def _write_csv(out: Path, name: str, cfg: dict, body: str) -> None:
    (out / f"{name}.csv").write_text(_csv_header(cfg) + body)


def _write_plot(out: Path, name: str, body: str) -> None:
    (out / f"{name}.dat").write_text(body)


def _thread_context(cfg: dict):
    threads = cfg.get("threads")
    if threads is None:
        env = os.environ.get("OPTDESIGN_THREADS", "").strip()
        if env:
            threads = int(env)
            cfg["threads"] = threads
    if threads is None:
        return contextlib.nullcontext()
    if threads < 1:
        raise ValueError("--threads must be >= 1")
    try:
        from threadpoolctl import threadpool_limits

        return threadpool_limits(limits=threads)
    except ImportError:  # pragma: no cover - depends on environment
        return contextlib.nullcontext()


# ---------------------------------------------------------------------------
# subcommand bodies


def _cmd_design(cfg: dict, out: Path) -> int:
    space = _make_space(cfg)
    weight = _make_weight(cfg)
    res = d_optimal(space, weight, cfg["degree"], epsilon=cfg["epsilon"], max_iter=cfg["max_iter"])
    (out / "design.json").write_text(design_to_json(res.design, degree=cfg["degree"]) + "\n")
    _write_json(
        out,
        "certificate",
        cfg,
        {
            "n": res.n,
            "g_value": res.g_value,
            "g_argmax": res.g_argmax,
            "kw_gap": res.kw_gap,
            "log_det": res.log_det,
            "iterations": res.iterations,
            "converged": res.converged,
            "support_size": res.design.size,
            "support_K_min": float(np.min(res.support_K_values)),
            "support_K_max": float(np.max(res.support_K_values)),
            "mass_identity_residual": res.mass_identity_residual,
            "monotonicity_violation": res.monotonicity_violation,
        },
    )
    if not res.converged:
        print("design did not converge within the iteration budget", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def _cmd_gvalue(cfg: dict, out: Path) -> int:
    if not cfg["design"]:
        raise ValueError("gvalue needs --design pointing to a design JSON file")
    design, file_degree = design_from_json(Path(cfg["design"]).read_text())
    s = cfg["degree"] if cfg["degree"] is not None else file_degree
    space = _make_space(cfg)
    weight = _make_weight(cfg)
    basis = basis_for_space(space, s)
    mm = moment_matrix(design, weight, s, basis)
    ev = orthonormal_factor(mm, weight)
    gv = g_value(ev, space)
    _write_json(
        out,
        "gvalue",
        cfg,
        {"degree": s, "n": space_dimension(space.dimension, s), "g_value": gv.value, "argmax": gv.argmax, "grid_index": gv.index},
    )
    return EXIT_OK


def _cmd_fekete(cfg: dict, out: Path) -> int:
    space = _make_space(cfg)
    weight = _make_weight(cfg)
    res = approx_fekete(space, weight, cfg["degree"], exchange_passes=cfg["exchange_passes"])
    _write_json(
        out,
        "fekete",
        cfg,
        {
            "degree": cfg["degree"],
            "points": res.points,
            "weighted_vdm_log": res.weighted_vdm_log,
            "delta_s": res.delta_s,
            "method": res.method,
        },
    )
    body = "".join(
        " ".join(f"{v:.17g}" for pair in ([c.real, c.imag] for c in row) for v in pair) + "\n"
        for row in res.points
    )
    _write_plot(out, "fekete_points", body)
    return EXIT_OK


def _cmd_tfd(cfg: dict, out: Path) -> int:
    space = _make_space(cfg)
    weight = _make_weight(cfg)
    rows = tfd_table(
        space,
        weight,
        _degree_list(cfg),
        epsilon=cfg["epsilon"],
        max_iter=cfg["max_iter"],
        exchange_passes=cfg["exchange_passes"],
    )
    _write_csv(out, "tfd", cfg, tfd_to_csv(rows))
    _write_plot(out, "tfd_gap", "".join(f"{r.s} {r.gap:.17g}\n" for r in rows))
    return EXIT_OK


def _cmd_equilibrium(cfg: dict, out: Path) -> int:
    target = _make_target(cfg)
    tmax = cfg["tmax"]
    lines = ["alpha,moment"]
    if target.kind == "weighted-ball":
        for k in range(tmax + 1):
            lines.append(f"{k}|{k},{eq_moment_mixed(target, k, k):.17g}")
    else:
        from .basis import multi_indices

        for alpha in multi_indices(target.dimension, tmax):
            tag = "|".join(str(v) for v in alpha)
            lines.append(f"{tag},{eq_moment(target, alpha):.17g}")
    _write_csv(out, "moments", cfg, "\n".join(lines) + "\n")

    if target.dimension == 1 and target.kind != "weighted-ball":
        lo = 0.0 if target.kind == "simplex" else -target.a
        hi = target.a
        xs = np.linspace(lo, hi, 402)[:-1] + (hi - lo) / 802.0  # midpoints, avoid endpoints
        body = ["x,density,cdf"]
        for x in xs:
            body.append(f"{x:.17g},{eq_density(target, x):.17g},{eq_cdf(target, x):.17g}")
        _write_csv(out, "density", cfg, "\n".join(body) + "\n")
    if target.kind == "weighted-ball":
        rs = np.linspace(0.0, 1.2, 121)
        body = "".join(f"{r:.17g} {weighted_ball_green(complex(r), target.dimension):.17g}\n" for r in rs)
        _write_plot(out, "green", body)
    return EXIT_OK


def _cmd_converge(cfg: dict, out: Path) -> int:
    space = _make_space(cfg)
    weight = _make_weight(cfg)
    target = _make_target(cfg)
    report = convergence_sweep(
        space,
        weight,
        _degree_list(cfg),
        target,
        t_max=cfg["tmax"],
        epsilon=cfg["epsilon"],
        max_iter=cfg["max_iter"],
    )
    _write_csv(out, "converge", cfg, report.to_csv())
    _write_json(out, "converge", cfg, json.loads(report.to_json()))
    _write_plot(out, "moment_vs_s", report.plot_data("moment_distance"))
    if all(r.ks_distance is not None for r in report.rows):
        _write_plot(out, "ks_vs_s", report.plot_data("ks_distance"))
    return EXIT_OK


def _cmd_simulate(cfg: dict, out: Path) -> int:
    space = _make_space(cfg)
    weight = _make_weight(cfg)
    if cfg["design"]:
        design, file_degree = design_from_json(Path(cfg["design"]).read_text())
        s = cfg["degree"] if cfg["degree"] is not None else file_degree
    else:
        s = cfg["degree"] if cfg["degree"] is not None else 1
        design = d_optimal(space, weight, s, epsilon=cfg["epsilon"], max_iter=cfg["max_iter"]).design
    n = space_dimension(design.dimension, s)
    exp = RegressionExperiment(
        design=design,
        degree=s,
        theta=np.ones(n),
        sigma=cfg["sigma"],
        num_obs=cfg["obs"],
        trials=cfg["trials"],
        seed=cfg["seed"],
    )
    stats = simulate_regression(exp)
    _write_json(out, "simulate", cfg, json.loads(stats.to_json()))
    check = variance_identity_check(exp, design.points)
    _write_csv(out, "ratios", cfg, check.to_csv())
    return EXIT_OK


def _cmd_oracle(cfg: dict, out: Path) -> int:
    space = _make_space(cfg)
    weight = _make_weight(cfg)
    k = cfg["atoms"]
    s = cfg["degree"]
    n = space_dimension(space.dimension, s)
    if k < n:
        raise ValueError(f"need at least {n} atoms for degree {s}")
    idx = np.linspace(0, space.grid_size - 1, k).round().astype(int)
    idx = np.unique(idx)
    pts = space.grid[idx]
    w = np.arange(1.0, idx.size + 1)
    from .measure import make_design

    design = make_design(pts, w / w.sum())
    basis = basis_for_space(space, s, kind="monomial")
    mm = moment_matrix(design, weight, s, basis)
    det_main = math.exp(mm.log_det_monomial) if math.isfinite(mm.log_det_monomial) else 0.0
    det_oracle = vdm_integral_det(design, weight, s)
    rel_det = abs(det_main - det_oracle) / abs(det_oracle) if det_oracle else math.inf
    ev = orthonormal_factor(mm, weight)
    rows = []
    worst = rel_det
    probe = list(design.points[: min(3, design.size)]) + [space.grid[space.grid_size // 2]]
    for z in probe:
        k_main = christoffel(ev, z)
        k_oracle = vdm_integral_christoffel(design, weight, s, z)
        rel = abs(k_main - k_oracle) / abs(k_oracle) if k_oracle else abs(k_main)
        worst = max(worst, rel)
        rows.append({"point": np.asarray(z).reshape(-1), "christoffel": k_main, "oracle": k_oracle, "rel_err": rel})
    _write_json(
        out,
        "oracle",
        cfg,
        {
            "atoms": int(idx.size),
            "degree": s,
            "det_main": det_main,
            "det_oracle": det_oracle,
            "rel_err_det": rel_det,
            "christoffel": rows,
            "max_rel_err": worst,
            "passed": bool(worst <= 1e-8),
        },
    )
    return EXIT_OK


_HANDLERS = {
    "design": _cmd_design,
    "gvalue": _cmd_gvalue,
    "fekete": _cmd_fekete,
    "tfd": _cmd_tfd,
    "equilibrium": _cmd_equilibrium,
    "converge": _cmd_converge,
    "simulate": _cmd_simulate,
    "oracle": _cmd_oracle,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _resolve_config(args)
        out = Path(cfg["out"])
        out.mkdir(parents=True, exist_ok=True)
        if not os.access(out, os.W_OK):
            raise OSError(f"output directory {out} is not writable")
        with _thread_context(cfg):
            return _HANDLERS[args.command](cfg, out)
    except (SingularGramError, np.linalg.LinAlgError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
