"""Command-line front end.

Subcommands: eval | sweep | optimize | simulate. Thresholds enter in dB
(dBm for absolute powers) and are converted at this boundary; all table
output is UTF-8 CSV (or JSON) with one row per metric/series/point.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 infeasible optimization.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import plotting
from .association import tier_system
from .channel import LinkState, STATES
from .config import (ConfigError, NetworkConfig, db_to_linear, load_config)
from .downlink import downlink_analysis
from .extensions import NoInteriorOptimum, optimal_rho, noise_limited_stp
from .montecarlo import simulate_downlink, simulate_uplink
from .uplink import (UplinkContext, active_probability,
                     average_uplink_throughput, optimize_tau,
                     uplink_sinr_coverage)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_INFEASIBLE = 4

ROW_FIELDS = ["param", "value", "metric", "series", "analytical", "mc",
              "mc_halfwidth", "abs_delta", "error"]

METRICS = ("association", "energy", "sinr", "stp", "uplink-sinr", "p-active",
           "throughput")


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _series_name(names, j, s):
    return f"{names[j]}-{s.value}"


def _evaluate_point(cfg: NetworkConfig, metrics, opts):
    """All requested metric rows for one scenario; one downlink MC run
    covers every downlink metric when trials > 0."""
    rows = []
    trials = opts["trials"]
    seed = opts["seed"]
    gamma_e = opts["gamma_e"]
    gamma_sinr = opts["gamma_sinr"]
    gamma_ul = opts["gamma_ul"]
    tau = opts["tau"] if opts["tau"] is not None else cfg.tau
    rho = opts["rho"] if opts["rho"] is not None else cfg.rho
    include_interference = not opts["noise_limited"]

    need_dl = any(m in metrics for m in ("association", "energy", "sinr", "stp"))
    mc_dl = None
    if need_dl and trials > 0:
        mc_dl = simulate_downlink(cfg, gamma_e, gamma_sinr, trials, seed,
                                  tau=tau, rho=rho, workers=opts["workers"])

    analysis = downlink_analysis(cfg, include_interference)
    names = [t.name for t in tier_system(cfg).tiers]

    def row(metric, series, analytical, est=None):
        mc = est.estimate if est is not None else None
        hw = est.half_width if est is not None else None
        delta = abs(analytical - mc) if (mc is not None and analytical is not None
                                         and not math.isnan(analytical)) else None
        return dict(metric=metric, series=series, analytical=analytical,
                    mc=mc, mc_halfwidth=hw, abs_delta=delta, error=None)

    if "association" in metrics:
        assoc = analysis.system.association()
        for (j, s), a in assoc.items():
            est = mc_dl.association[(j, s)] if mc_dl else None
            rows.append(row("association", _series_name(names, j, s), a, est))

    coverage_metrics = [m for m in ("energy", "sinr", "stp") if m in metrics]
    if coverage_metrics:
        rep = analysis.report(gamma_e=gamma_e, gamma_sinr=gamma_sinr,
                              tau=tau, rho=rho)
        mc_tot = {"energy": mc_dl.energy, "sinr": mc_dl.sinr,
                  "stp": mc_dl.stp} if mc_dl else {}
        for m in coverage_metrics:
            rows.append(row(m, "total", rep.totals[m], mc_tot.get(m)))
            for (j, s), vals in rep.conditional.items():
                if m not in vals or math.isnan(vals[m]):
                    continue
                est = None
                if mc_dl and (j, s) in mc_dl.conditional:
                    est = mc_dl.conditional[(j, s)][m]
                rows.append(row(m, _series_name(names, j, s) + "|cond",
                                vals[m], est))

    if "p-active" in metrics or "uplink-sinr" in metrics or "throughput" in metrics:
        p_act = active_probability(tau, rho, cfg)
        if "p-active" in metrics:
            est = None
            if trials > 0:
                budget = (cfg.t_frame - tau) * cfg.p_t_ul
                mc_pa = simulate_downlink(cfg, budget if budget > 0 else -1.0,
                                          math.inf, trials, seed + 13,
                                          tau=tau, rho=rho,
                                          workers=opts["workers"])
                est = mc_pa.energy
            rows.append(row("p-active", "total", p_act, est))
        if "uplink-sinr" in metrics:
            ctx = UplinkContext(p_active=p_act,
                                paper_literal=opts["paper_literal"])
            p_ul = uplink_sinr_coverage(gamma_ul, cfg, ctx)
            est = None
            if trials > 0:
                mc_ul = simulate_uplink(cfg, tau, rho, gamma_ul, trials,
                                        seed + 29, p_active=p_act,
                                        workers=opts["workers"])
                est = mc_ul.sinr
            rows.append(row("uplink-sinr", "total", p_ul, est))
        if "throughput" in metrics:
            res = average_uplink_throughput(tau, rho, gamma_ul, cfg,
                                            r_min=opts["r_min"],
                                            gamma_sinr=gamma_sinr)
            rows.append(row("throughput", "uplink-bps", res.rate_ul))
            rows.append(row("throughput", "downlink-bps", res.rate_dl))
    return rows


def _write_rows(rows, path, fmt, param=None):
    out = []
    for r in rows:
        rec = {"param": param if param is not None else "",
               "value": r.get("value", ""), **{k: r.get(k) for k in
               ("metric", "series", "analytical", "mc", "mc_halfwidth",
                "abs_delta", "error")}}
        out.append(rec)
    if fmt == "json":
        text = json.dumps(out, indent=2, default=str)
    else:
        import io
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=ROW_FIELDS)
        writer.writeheader()
        for rec in out:
            writer.writerow({k: ("" if rec.get(k) is None else repr(rec[k])
                                 if isinstance(rec.get(k), float) else rec.get(k))
                             for k in ROW_FIELDS})
        text = buf.getvalue()
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text + ("\n" if not text.endswith("\n") else ""))


def _load(args) -> NetworkConfig:
    if args.config:
        p = Path(args.config)
        if not p.exists():
            raise CliError(f"config file not found: {p}", EXIT_CONFIG)
        try:
            return load_config(str(p))
        except (ConfigError, Exception) as exc:
            if isinstance(exc, ConfigError):
                raise CliError(f"invalid config: {exc}", EXIT_CONFIG)
            raise CliError(f"cannot read config: {exc}", EXIT_CONFIG)
    return NetworkConfig()


def _threshold_opts(args):
    return dict(
        gamma_e=db_to_linear(args.gammaE),
        gamma_sinr=db_to_linear(args.gammaSINR),
        gamma_ul=db_to_linear(args.gammaUL),
        tau=args.tau,
        rho=args.rho,
        trials=args.trials,
        seed=args.seed,
        workers=args.workers,
        noise_limited=args.noise_limited,
        paper_literal=args.paper_literal_uplink_thinning,
        r_min=getattr(args, "rmin", 0.0) or 0.0,
    )


PARAM_SETTERS = {
    "sigma": lambda c, v: c.with_cluster("thomas", v),
    "r_c": lambda c, v: c.with_cluster("matern", v),
    "cluster": lambda c, v: c.with_cluster(c.cluster.kind, v),
    "height": lambda c, v: dataclasses.replace(c, height=v),
    "h": lambda c, v: dataclasses.replace(c, height=v),
    "rho": lambda c, v: dataclasses.replace(c, rho=v),
    "tau": lambda c, v: dataclasses.replace(c, tau=v),
    "lambda_u": lambda c, v: dataclasses.replace(c, lambda_u=v),
    "lambda_g": lambda c, v: dataclasses.replace(c, lambda_g=v),
    "b_u": lambda c, v: dataclasses.replace(c, b_u=v),
    "b_g": lambda c, v: dataclasses.replace(c, b_g=v),
    "p_u_dbm": lambda c, v: dataclasses.replace(c, p_u=db_to_linear(v) * 1e-3),
    "p_g_dbm": lambda c, v: dataclasses.replace(c, p_g=db_to_linear(v) * 1e-3),
}


def cmd_eval(args):
    cfg = _load(args)
    metrics = args.metric or ["association"]
    for m in metrics:
        if m not in METRICS:
            raise CliError(f"unknown metric {m!r} (choose from {METRICS})",
                           EXIT_CONFIG)
    opts = _threshold_opts(args)
    try:
        rows = _evaluate_point(cfg, metrics, opts)
    except (ValueError, ArithmeticError) as exc:
        raise CliError(f"numerical failure: {exc}", EXIT_NUMERIC)
    _write_rows(rows, args.out, args.format)
    return EXIT_OK


def cmd_sweep(args):
    cfg = _load(args)
    if args.param not in PARAM_SETTERS:
        raise CliError(f"unknown sweep parameter {args.param!r} "
                       f"(choose from {sorted(PARAM_SETTERS)})", EXIT_CONFIG)
    if args.values:
        grid = [float(v) for v in args.values.split(",")]
    elif args.range:
        lo, hi, n = args.range.split(":")
        grid = list(np.linspace(float(lo), float(hi), int(n)))
    else:
        raise CliError("sweep needs --values or --range", EXIT_CONFIG)
    if not grid or sorted(grid) != grid:
        raise CliError("sweep grid must be nonempty and sorted", EXIT_CONFIG)
    metrics = args.metric or ["stp"]
    opts = _threshold_opts(args)
    setter = PARAM_SETTERS[args.param]

    all_rows = []
    for v in grid:
        try:
            point_cfg = setter(cfg, v).validated()
            rows = _evaluate_point(point_cfg, metrics, opts)
        except Exception as exc:  # per-point isolation: record and continue
            rows = [dict(metric=m, series="total", analytical=None, mc=None,
                         mc_halfwidth=None, abs_delta=None, error=str(exc))
                    for m in metrics]
        for r in rows:
            r["value"] = v
        all_rows.extend(rows)

    _write_rows(all_rows, args.out, args.format, param=args.param)
    if args.plot:
        stem = Path(args.out).stem if args.out else f"sweep_{args.param}"
        plot_dir = args.plot_dir or (str(Path(args.out).parent) if args.out
                                     else ".")
        written = plotting.render_sweep(all_rows, args.param, plot_dir, stem)
        for w in written:
            print(f"figure: {w}", file=sys.stderr)
    return EXIT_OK


def cmd_optimize(args):
    cfg = _load(args)
    opts = _threshold_opts(args)
    tau = opts["tau"] if opts["tau"] is not None else cfg.tau
    rho = opts["rho"] if opts["rho"] is not None else cfg.rho
    rows = []
    if args.target == "tau":
        res = optimize_tau(rho, opts["gamma_ul"], opts["r_min"], cfg,
                           gamma_sinr=opts["gamma_sinr"])
        if not res.feasible:
            print(f"infeasible: {res.reason}; minimum downlink duration "
                  f"{res.tau_min:.6g} exceeds the frame length", file=sys.stderr)
            return EXIT_INFEASIBLE
        rows.append(dict(metric="tau-optimum", series="tau", value="",
                         analytical=res.tau_opt, error=None))
        rows.append(dict(metric="tau-optimum", series="uplink-bps", value="",
                         analytical=res.result.rate_ul, error=None))
        rows.append(dict(metric="tau-optimum", series="tau-min", value="",
                         analytical=res.tau_min, error=None))
        for t, r in res.trace:
            rows.append(dict(metric="tau-scan", series="uplink-bps", value=t,
                             analytical=r, error=None))
    elif args.target == "rho":
        try:
            rho_star = optimal_rho(tau, opts["gamma_e"], opts["gamma_sinr"], cfg)
        except NoInteriorOptimum as exc:
            print(f"infeasible: {exc}", file=sys.stderr)
            return EXIT_INFEASIBLE
        rows.append(dict(metric="rho-optimum", series="rho", value="",
                         analytical=rho_star, error=None))
        if args.scan:
            for r in np.arange(0.01, 1.0, 0.01):
                case = noise_limited_stp(float(r), tau, opts["gamma_e"],
                                         opts["gamma_sinr"], cfg)
                rows.append(dict(metric="rho-scan", series="stp",
                                 value=float(r),
                                 analytical=case.report.totals["stp"],
                                 error=None))
    elif args.target == "h":
        lo, hi, n = args.hmin, args.hmax, args.hsteps
        best = (None, -1.0)
        for h in np.linspace(lo, hi, n):
            c = dataclasses.replace(cfg, height=float(h)).validated()
            rep = downlink_analysis(c).report(gamma_e=opts["gamma_e"],
                                              gamma_sinr=opts["gamma_sinr"],
                                              tau=tau, rho=rho)
            stp = rep.totals["stp"]
            rows.append(dict(metric="h-scan", series="stp", value=float(h),
                             analytical=stp, error=None))
            if stp > best[1]:
                best = (float(h), stp)
        rows.insert(0, dict(metric="h-optimum", series="height", value="",
                            analytical=best[0], error=None))
    else:
        raise CliError(f"unknown target {args.target!r}", EXIT_CONFIG)
    _write_rows(rows, args.out, args.format)
    return EXIT_OK


def cmd_simulate(args):
    cfg = _load(args)
    opts = _threshold_opts(args)
    tau = opts["tau"] if opts["tau"] is not None else cfg.tau
    rho = opts["rho"] if opts["rho"] is not None else cfg.rho
    res = simulate_downlink(cfg, opts["gamma_e"], opts["gamma_sinr"],
                            opts["trials"] or cfg.settings.mc_trials,
                            opts["seed"], tau=tau, rho=rho,
                            workers=opts["workers"])
    names = [t.name for t in tier_system(cfg).tiers]
    rows = []
    for (j, s), est in res.association.items():
        rows.append(dict(metric="association", series=_series_name(names, j, s),
                         analytical=None, mc=est.estimate,
                         mc_halfwidth=est.half_width, error=None))
    for m, est in (("energy", res.energy), ("sinr", res.sinr), ("stp", res.stp)):
        rows.append(dict(metric=m, series="total", analytical=None,
                         mc=est.estimate, mc_halfwidth=est.half_width,
                         error=None))
    for w in res.warnings:
        print(f"warning: {w}", file=sys.stderr)
    _write_rows(rows, args.out, args.format)
    return EXIT_OK


def _add_common(p):
    p.add_argument("--config", help="scenario file (YAML/JSON)")
    p.add_argument("--metric", action="append", help="metric name, repeatable")
    p.add_argument("--trials", type=int, default=0,
                   help="Monte Carlo trials (0 = analytical only)")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--gammaE", type=float, default=-40.0,
                   help="energy threshold, dB (joules)")
    p.add_argument("--gammaSINR", type=float, default=0.0,
                   help="downlink SINR threshold, dB")
    p.add_argument("--gammaUL", type=float, default=-20.0,
                   help="uplink SINR threshold, dB")
    p.add_argument("--rho", type=float, default=None)
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--rmin", type=float, default=0.0,
                   help="downlink rate floor, bits/s")
    p.add_argument("--noise-limited", action="store_true")
    p.add_argument("--paper-literal-uplink-thinning", action="store_true")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="uavcov",
        description="Coverage analysis for energy-harvesting UAV-assisted "
                    "mmWave networks with clustered users")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate metrics for one scenario")
    _add_common(p_eval)
    p_eval.set_defaults(func=cmd_eval)

    p_sweep = sub.add_parser("sweep", help="sweep one parameter over a grid")
    _add_common(p_sweep)
    p_sweep.add_argument("--param", required=True)
    p_sweep.add_argument("--values", help="comma-separated grid")
    p_sweep.add_argument("--range", help="lo:hi:n linear grid")
    p_sweep.add_argument("--plot", action="store_true",
                         help="render figures next to the table")
    p_sweep.add_argument("--plot-dir")
    p_sweep.set_defaults(func=cmd_sweep)

    p_opt = sub.add_parser("optimize", help="optimize tau, rho or height")
    _add_common(p_opt)
    p_opt.add_argument("--target", choices=("tau", "rho", "h"), required=True)
    p_opt.add_argument("--scan", action="store_true",
                       help="include the verification scan in the output")
    p_opt.add_argument("--hmin", type=float, default=0.0)
    p_opt.add_argument("--hmax", type=float, default=100.0)
    p_opt.add_argument("--hsteps", type=int, default=21)
    p_opt.set_defaults(func=cmd_optimize)

    p_sim = sub.add_parser("simulate", help="Monte Carlo only")
    _add_common(p_sim)
    p_sim.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
