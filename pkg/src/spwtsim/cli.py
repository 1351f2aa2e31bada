"""Batch command-line front end.

Subcommands
-----------
build-plan           pool construction + selection + randomization -> plan/trace JSON
simulate-field       SINR surface + peak report -> CSV/binary/JSON
intercept-prob       interception-probability sweep -> CSV
leak-predict         spacing audit + predicted leak positions -> JSON
calibrate-threshold  spacing-metric quantile calibration -> JSON
replay               re-run a manifest and verify byte-identical outputs

Every subcommand writes a manifest recording the resolved arguments and
SHA-256 digests of its outputs; `replay` re-executes the recorded
command and fails if any digest changes.  Exit codes: 0 success,
1 usage/configuration error, 2 procedure-level failure.

A TOML config file (--config or the SPWTSIM_CONFIG env var) may preset
[system], [pool], [rp], [bob] and [grid] keys; flags override it.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

import tomli

from . import __version__
from .field import Grid, compute_field, find_peaks
from .intercept import sweep_rows_to_csv, sweep_vs_ns, sweep_vs_nt
from .leaks import sweep_illegal_positions
from .model import Position, SubcarrierPlan, SystemConfig
from .pools import (POOL_KINDS, SubcarrierPool, build_pool, pss_cardinality_estimate,
                    select_random)
from .randomize import RpExhaustedError, RpParams, build_plan, calibrate_threshold

CONFIG_ENV_VAR = "SPWTSIM_CONFIG"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PROCEDURE = 2


class UsageError(Exception):
    """Bad flags or configuration; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit(2); usage errors are 1 here
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_config_file(path: str | None) -> dict:
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR)
    if not path:
        return {}
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"config file not found: {p}")
    with open(p, "rb") as fh:
        return tomli.load(fh)


def _write_manifest(out_dir: Path, command: str, args_dict: dict, outputs: list[Path],
                    extra: dict | None = None) -> Path:
    manifest = {
        "tool": "spwtsim",
        "version": __version__,
        "command": command,
        "arguments": args_dict,
        "outputs": {p.name: _sha256(p) for p in outputs},
    }
    if extra:
        manifest["run"] = extra
    path = out_dir / "manifest.json"
    _write_json(path, manifest)
    return path


# --------------------------------------------------------------------------
# shared argument plumbing
# --------------------------------------------------------------------------

def _add_system_flags(sp, file_cfg):
    sys_cfg = file_cfg.get("system", {})
    sp.add_argument("--fc", type=float, default=sys_cfg.get("carrier_freq_hz", 3.0e9),
                    help="carrier frequency, Hz")
    sp.add_argument("--df", type=float, default=sys_cfg.get("subchannel_bw_hz", 1.0e4),
                    help="subchannel bandwidth, Hz")
    sp.add_argument("--ns", type=int, default=sys_cfg.get("num_subcarriers", 16384),
                    help="total subcarrier count")
    sp.add_argument("--nt", type=int, default=sys_cfg.get("num_antennas", 120),
                    help="transmit antenna count")
    sp.add_argument("--spacing", type=float, default=sys_cfg.get("element_spacing_m"),
                    help="element spacing, m (default: half wavelength)")
    sp.add_argument("--alpha1", type=float, default=sys_cfg.get("alpha1", 0.5),
                    help="signal power fraction")
    sp.add_argument("--power", type=float, default=sys_cfg.get("total_power", 10.0),
                    help="total transmit power, W")
    sp.add_argument("--noise", type=float, default=sys_cfg.get("noise_power", 1.0),
                    help="per-branch noise power, W")
    sp.add_argument("--lightspeed", type=float, default=sys_cfg.get("lightspeed_m_s", 3.0e8),
                    help="propagation speed, m/s")


def _system_from_args(args) -> SystemConfig:
    spacing = args.spacing
    if spacing is None:
        spacing = args.lightspeed / (2.0 * args.fc)
    try:
        return SystemConfig(
            carrier_freq_hz=args.fc, subchannel_bw_hz=args.df,
            num_subcarriers=args.ns, num_antennas=args.nt,
            element_spacing_m=spacing, alpha1=args.alpha1, alpha2=1.0 - args.alpha1,
            total_power=args.power, noise_power=args.noise,
            lightspeed_m_s=args.lightspeed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _add_pool_flags(sp, file_cfg):
    pool_cfg = file_cfg.get("pool", {})
    sp.add_argument("--set", dest="pool_kind", choices=POOL_KINDS,
                    default=pool_cfg.get("kind", "pss"), help="subcarrier pool kind")
    sp.add_argument("--lss-a", type=int, default=pool_cfg.get("lss_a", 2))
    sp.add_argument("--lss-b", type=int, default=pool_cfg.get("lss_b", 0))
    sp.add_argument("--qss-a", type=int, default=pool_cfg.get("qss_a", 1))
    sp.add_argument("--qss-b", type=int, default=pool_cfg.get("qss_b", 0))
    sp.add_argument("--qss-c", type=int, default=pool_cfg.get("qss_c", 0))


def _pool_from_args(args) -> SubcarrierPool:
    try:
        if args.pool_kind == "lss":
            return build_pool("lss", args.ns, a=args.lss_a, b=args.lss_b)
        if args.pool_kind == "qss":
            return build_pool("qss", args.ns, a=args.qss_a, b=args.qss_b, c=args.qss_c)
        return build_pool("pss", args.ns)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _add_rp_flags(sp, file_cfg):
    rp_cfg = file_cfg.get("rp", {})
    sp.add_argument("--threshold", type=float, default=rp_cfg.get("metric_threshold"),
                    help="spacing-metric acceptance threshold (default: calibrated)")
    sp.add_argument("--calib-samples", type=int, default=rp_cfg.get("calib_samples", 2000))
    sp.add_argument("--calib-quantile", type=float, default=rp_cfg.get("calib_quantile", 0.5))
    sp.add_argument("--max-interleaves", type=int, default=rp_cfg.get("max_interleaves", 8))
    sp.add_argument("--max-redraws", type=int, default=rp_cfg.get("max_redraws", 20))


def _rp_params_from_args(args, pool: SubcarrierPool) -> RpParams:
    threshold = args.threshold
    if threshold is None:
        threshold = calibrate_threshold(pool, args.nt, num_samples=args.calib_samples,
                                        quantile=args.calib_quantile, seed=args.seed)
    try:
        return RpParams.for_antennas(args.nt, metric_threshold=threshold,
                                     max_interleaves=args.max_interleaves,
                                     max_redraws=args.max_redraws, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _parse_bob(text: str) -> Position:
    try:
        angle, dist = (float(x) for x in text.split(","))
        return Position.from_degrees(angle, dist)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad position spec {text!r}; expected 'angle_deg,distance_m'") from exc


def _parse_grid(text: str, bob: Position) -> Grid:
    """Grid spec: 'a0:a1:astep,d0:d1:dstep', or '1x1@bob' for Bob's cell."""
    if text == "1x1@bob":
        return Grid.single_cell(bob)
    try:
        angle_part, dist_part = text.split(",")
        a0, a1, astep = (float(x) for x in angle_part.split(":"))
        d0, d1, dstep = (float(x) for x in dist_part.split(":"))
        return Grid(a0, a1, astep, d0, d1, dstep)
    except ValueError as exc:
        raise UsageError(
            f"bad grid spec {text!r}; expected 'a0:a1:astep,d0:d1:dstep' or '1x1@bob'") from exc


def _grid_from_args(args, file_cfg, bob: Position) -> Grid:
    if args.grid is not None:
        return _parse_grid(args.grid, bob)
    grid_cfg = file_cfg.get("grid")
    if grid_cfg:
        try:
            return Grid(**grid_cfg)
        except (TypeError, ValueError) as exc:
            raise UsageError(f"bad [grid] config: {exc}") from exc
    return Grid()


def _args_dict(args, skip=("func", "config", "out_dir", "command")) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _grid_spec(grid: Grid) -> str:
    return (f"{grid.angle_start_deg:.10g}:{grid.angle_stop_deg:.10g}:"
            f"{grid.angle_step_deg:.10g},{grid.dist_start_m:.10g}:"
            f"{grid.dist_stop_m:.10g}:{grid.dist_step_m:.10g}")


def _resolve_for_manifest(args, bob: Position | None = None, grid: Grid | None = None,
                          config: SystemConfig | None = None) -> None:
    """Write resolved values back so manifests replay without the config file."""
    if bob is not None:
        args.bob = f"{bob.angle_deg:.10g},{bob.distance_m:.10g}"
    if grid is not None:
        args.grid = _grid_spec(grid)
    if config is not None:
        args.spacing = config.element_spacing_m


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def _cmd_build_plan(args, file_cfg, out_dir: Path) -> int:
    config = _system_from_args(args)  # validate the physics parameters early
    _resolve_for_manifest(args, config=config)
    pool = _pool_from_args(args)
    if args.nt > pool.cardinality:
        raise UsageError(f"pool cardinality {pool.cardinality} < requested antennas {args.nt}")
    outputs = []
    extra = {"pool_cardinality": pool.cardinality}
    if pool.kind == "pss":
        extra["pool_cardinality_estimate"] = pss_cardinality_estimate(args.ns)
    if args.no_rp:
        plan, trace = build_plan(pool, args.nt, RpParams.for_antennas(
            args.nt, metric_threshold=0.0, seed=args.seed), apply_rp=False)
    else:
        params = _rp_params_from_args(args, pool)
        extra["rp_params"] = params.to_dict()
        try:
            plan, trace = build_plan(pool, args.nt, params, apply_rp=True)
        except RpExhaustedError as exc:
            trace_path = out_dir / "trace.json"
            _write_json(trace_path, exc.trace.to_dict())
            _write_manifest(out_dir, "build-plan", _args_dict(args), [trace_path], extra)
            print(f"randomization exhausted: {exc}", file=sys.stderr)
            return EXIT_PROCEDURE
    plan_path = out_dir / "plan.json"
    _write_json(plan_path, plan.to_dict())
    outputs.append(plan_path)
    if trace is not None:
        trace_path = out_dir / "trace.json"
        _write_json(trace_path, trace.to_dict())
        outputs.append(trace_path)
        extra["metric"] = trace.best_metric
    _write_manifest(out_dir, "build-plan", _args_dict(args), outputs, extra)
    print(f"wrote {plan_path} ({plan.num_antennas} indices from {pool.kind})")
    return EXIT_OK


def _load_plan(path: str) -> SubcarrierPlan:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"plan file not found: {p}")
    return SubcarrierPlan.from_dict(json.loads(p.read_text()))


def _cmd_simulate_field(args, file_cfg, out_dir: Path) -> int:
    config = _system_from_args(args)
    bob_cfg = file_cfg.get("bob", {})
    bob = _parse_bob(args.bob) if args.bob else Position.from_degrees(
        bob_cfg.get("angle_deg", 60.0), bob_cfg.get("distance_m", 500.0))
    grid = _grid_from_args(args, file_cfg, bob)
    _resolve_for_manifest(args, bob=bob, grid=grid, config=config)
    extra = {}
    if args.plan:
        plan = _load_plan(args.plan)
        if plan.num_antennas != args.nt:
            raise UsageError(f"plan has {plan.num_antennas} antennas, --nt is {args.nt}")
    else:
        pool = _pool_from_args(args)
        if args.nt > pool.cardinality:
            raise UsageError(
                f"pool cardinality {pool.cardinality} < requested antennas {args.nt}")
        if args.no_rp:
            plan, trace = build_plan(pool, args.nt, RpParams.for_antennas(
                args.nt, metric_threshold=0.0, seed=args.seed), apply_rp=False)
        else:
            params = _rp_params_from_args(args, pool)
            extra["rp_params"] = params.to_dict()
            try:
                plan, trace = build_plan(pool, args.nt, params, apply_rp=True)
            except RpExhaustedError as exc:
                print(f"randomization exhausted: {exc}", file=sys.stderr)
                return EXIT_PROCEDURE
        if trace is not None:
            extra["rp_interleaves"] = trace.interleaves_used
            extra["rp_redraws"] = trace.redraws_used
    field = compute_field(config, plan, bob, grid,
                          phase_mode=args.phase_mode, threads=args.threads)
    peaks = find_peaks(field, bob, exclusion=(args.excl_angle, args.excl_dist),
                       leakage_threshold_db=args.leak_threshold) if field.contains(bob) else None

    csv_path = out_dir / "field.csv"
    field.to_csv(csv_path)
    bin_path = out_dir / "field.bin"
    axes_path = out_dir / "field_axes.json"
    field.to_binary(bin_path, axes_path)
    plan_path = out_dir / "plan.json"
    _write_json(plan_path, plan.to_dict())
    outputs = [csv_path, bin_path, axes_path, plan_path]
    if peaks is not None:
        peaks_path = out_dir / "peaks.json"
        _write_json(peaks_path, peaks.to_dict())
        outputs.append(peaks_path)
        print(f"main peak {peaks.main_value_db:.2f} dB at "
              f"({peaks.main_angle_deg:.1f} deg, {peaks.main_distance_m:.1f} m); "
              f"max side ratio {peaks.max_side_ratio:.4f}; "
              f"leakage fraction {peaks.leakage_fraction:.3e}")
    extra["fingerprint"] = field.fingerprint
    extra["bob"] = {"angle_deg": bob.angle_deg, "distance_m": bob.distance_m}
    _write_manifest(out_dir, "simulate-field", _args_dict(args), outputs, extra)
    return EXIT_OK


def _cmd_intercept_prob(args, file_cfg, out_dir: Path) -> int:
    kinds = [k.strip() for k in args.sets.split(",") if k.strip()]
    for kind in kinds:
        if kind not in POOL_KINDS:
            raise UsageError(f"unknown pool kind {kind!r}")
    if args.nt < 1:
        raise UsageError("--nt must be >= 1")
    try:
        if args.sweep == "ns":
            values = _parse_range(args.ns_values)
            rows = sweep_vs_ns(kinds, values, args.nt, lss_a=args.lss_a, lss_b=args.lss_b)
        else:
            values = _parse_range(args.nt_values)
            rows = sweep_vs_nt(kinds, values, args.ns, lss_a=args.lss_a, lss_b=args.lss_b)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    csv_path = out_dir / "intercept.csv"
    sweep_rows_to_csv(rows, csv_path)
    _write_manifest(out_dir, "intercept-prob", _args_dict(args), [csv_path],
                    {"rows": len(rows), "infeasible": sum(not r.feasible for r in rows)})
    print(f"wrote {csv_path} ({len(rows)} rows)")
    return EXIT_OK


def _parse_range(text: str) -> list[int]:
    """'a,b,c' explicit values or 'start:stop:step' inclusive range."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"bad range spec {text!r}; expected start:stop:step")
        start, stop, step = (int(p) for p in parts)
        if step <= 0 or stop < start:
            raise UsageError("range needs step > 0 and stop >= start")
        return list(range(start, stop + 1, step))
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"bad value list {text!r}") from exc


def _cmd_leak_predict(args, file_cfg, out_dir: Path) -> int:
    config = _system_from_args(args)
    bob_cfg = file_cfg.get("bob", {})
    bob = _parse_bob(args.bob) if args.bob else Position.from_degrees(
        bob_cfg.get("angle_deg", 60.0), bob_cfg.get("distance_m", 500.0))
    _resolve_for_manifest(args, bob=bob, config=config)
    if args.plan:
        plan = _load_plan(args.plan)
    else:
        pool = _pool_from_args(args)
        if args.nt > pool.cardinality:
            raise UsageError(
                f"pool cardinality {pool.cardinality} < requested antennas {args.nt}")
        plan = select_random(pool, args.nt, seed=args.seed)
    report = sweep_illegal_positions(
        config, bob, plan, m_max=args.m_max,
        angle_range_deg=(args.angle_min, args.angle_max),
        dist_range_m=(args.dist_min, args.dist_max))
    leaks_path = out_dir / "leaks.json"
    _write_json(leaks_path, report.to_dict())
    _write_manifest(out_dir, "leak-predict", _args_dict(args), [leaks_path],
                    {"predicted": len(report.predicted_leaks),
                     "duplicate_groups": len(report.duplicate_spacings)})
    if report.predicted_leaks:
        print(f"{'angle_deg':>10} {'distance_m':>12} {'antennas':>16} {'residual_rad':>14}")
        for leak in report.predicted_leaks:
            print(f"{leak.position.angle_deg:10.4f} {leak.position.distance_m:12.3f} "
                  f"{str(leak.antennas):>16} {leak.residual_approx_rad:14.3e}")
    else:
        print("no realizable coherent-leak positions found")
    return EXIT_OK


def _cmd_calibrate_threshold(args, file_cfg, out_dir: Path) -> int:
    pool = _pool_from_args(args)
    try:
        value = calibrate_threshold(pool, args.nt, num_samples=args.samples,
                                    quantile=args.quantile, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    payload = {"pool_kind": pool.kind, "pool_cardinality": pool.cardinality,
               "num_antennas": args.nt, "num_samples": args.samples,
               "quantile": args.quantile, "seed": args.seed, "threshold": value}
    out_path = out_dir / "threshold.json"
    _write_json(out_path, payload)
    _write_manifest(out_dir, "calibrate-threshold", _args_dict(args), [out_path])
    print(f"threshold ({args.quantile} quantile of {args.samples} samples): {value:.6g}")
    return EXIT_OK


def _cmd_replay(args, file_cfg, out_dir: Path) -> int:
    manifest_path = Path(args.manifest)
    if not manifest_path.is_file():
        raise UsageError(f"manifest not found: {manifest_path}")
    manifest = json.loads(manifest_path.read_text())
    command = manifest["command"]
    stored = dict(manifest["arguments"])
    if args.threads is not None and "threads" in stored:
        stored["threads"] = args.threads
    argv = [command]
    for key, value in stored.items():
        if value is None or value is False:
            continue
        flag = "--" + key.replace("_", "-")
        if key == "pool_kind":
            flag = "--set"
        if value is True:
            argv.append(flag)
        else:
            argv.extend([flag, str(value)])
    argv.extend(["--out-dir", str(out_dir)])
    code = main(argv)
    if code != EXIT_OK:
        return code
    mismatched = []
    for name, digest in manifest["outputs"].items():
        new_path = out_dir / name
        if not new_path.is_file() or _sha256(new_path) != digest:
            mismatched.append(name)
    if mismatched:
        print(f"replay mismatch in: {', '.join(mismatched)}", file=sys.stderr)
        return EXIT_PROCEDURE
    print(f"replay of {command} verified: {len(manifest['outputs'])} outputs byte-identical")
    return EXIT_OK


# --------------------------------------------------------------------------
# parser assembly
# --------------------------------------------------------------------------

def _build_parser(file_cfg: dict) -> _Parser:
    parser = _Parser(prog="spwtsim",
                     description="Secure precise wireless transmission simulator")
    parser.add_argument("--version", action="version", version=f"spwtsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", default=None, help="TOML config file")
        sp.add_argument("--out-dir", default=".", help="output directory")
        sp.add_argument("--seed", type=int, default=file_cfg.get("seed", 0))

    sp = sub.add_parser("build-plan", help="construct a pool and draw a randomized plan")
    common(sp)
    _add_system_flags(sp, file_cfg)
    _add_pool_flags(sp, file_cfg)
    _add_rp_flags(sp, file_cfg)
    sp.add_argument("--no-rp", action="store_true", help="skip randomization (ascending order)")
    sp.set_defaults(func=_cmd_build_plan)

    sp = sub.add_parser("simulate-field", help="evaluate the SINR surface and find peaks")
    common(sp)
    _add_system_flags(sp, file_cfg)
    _add_pool_flags(sp, file_cfg)
    _add_rp_flags(sp, file_cfg)
    sp.add_argument("--no-rp", action="store_true")
    sp.add_argument("--plan", default=None, help="use an existing plan JSON instead of drawing")
    sp.add_argument("--bob", default=None, help="desired position 'angle_deg,distance_m'")
    sp.add_argument("--grid", default=None,
                    help="grid spec 'a0:a1:astep,d0:d1:dstep' or '1x1@bob'")
    sp.add_argument("--phase-mode", choices=("exact", "approx"), default="exact")
    sp.add_argument("--threads", type=int, default=1,
                    help="worker threads (never changes outputs)")
    sp.add_argument("--excl-angle", type=float, default=2.0,
                    help="main-peak exclusion half-width, degrees")
    sp.add_argument("--excl-dist", type=float, default=20.0,
                    help="main-peak exclusion half-width, meters")
    sp.add_argument("--leak-threshold", type=float, default=3.0,
                    help="leakage-fraction threshold below main, dB")
    sp.set_defaults(func=_cmd_simulate_field)

    sp = sub.add_parser("intercept-prob", help="interception-probability sweep")
    common(sp)
    sp.add_argument("--sweep", choices=("ns", "nt"), required=True)
    sp.add_argument("--sets", default="lss,qss,pss")
    sp.add_argument("--nt", type=int, default=16, help="antenna count (fixed for ns sweep)")
    sp.add_argument("--ns", type=int, default=1000,
                    help="subcarrier count (fixed for nt sweep)")
    sp.add_argument("--ns-values", default="100:10000:100",
                    help="ns sweep grid: list or start:stop:step")
    sp.add_argument("--nt-values", default="1:31:1",
                    help="nt sweep grid: list or start:stop:step")
    sp.add_argument("--lss-a", type=int, default=2)
    sp.add_argument("--lss-b", type=int, default=0)
    sp.set_defaults(func=_cmd_intercept_prob)

    sp = sub.add_parser("leak-predict", help="audit a plan for coherent-leak positions")
    common(sp)
    _add_system_flags(sp, file_cfg)
    _add_pool_flags(sp, file_cfg)
    sp.add_argument("--plan", default=None, help="plan JSON to audit")
    sp.add_argument("--bob", default=None)
    sp.add_argument("--m-max", type=int, default=3, help="integer offset enumeration bound")
    sp.add_argument("--angle-min", type=float, default=0.0)
    sp.add_argument("--angle-max", type=float, default=180.0)
    sp.add_argument("--dist-min", type=float, default=1.0)
    sp.add_argument("--dist-max", type=float, default=1000.0)
    sp.set_defaults(func=_cmd_leak_predict)

    sp = sub.add_parser("calibrate-threshold", help="spacing-metric quantile calibration")
    common(sp)
    _add_system_flags(sp, file_cfg)
    _add_pool_flags(sp, file_cfg)
    sp.add_argument("--samples", type=int, default=10000)
    sp.add_argument("--quantile", type=float, default=0.5)
    sp.set_defaults(func=_cmd_calibrate_threshold)

    sp = sub.add_parser("replay", help="re-run a manifest and verify output digests")
    common(sp)
    sp.add_argument("manifest", help="manifest.json from a previous run")
    sp.add_argument("--threads", type=int, default=None,
                    help="override thread count (outputs must not change)")
    sp.set_defaults(func=_cmd_replay)

    return parser


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    try:
        # config file feeds parser defaults, so parse it before the flags
        pre = argparse.ArgumentParser(add_help=False)
        pre.add_argument("--config", default=None)
        known, _ = pre.parse_known_args(argv)
        file_cfg = _load_config_file(known.config)
        parser = _build_parser(file_cfg)
        args = parser.parse_args(argv)
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        return args.func(args, file_cfg, out_dir)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RpExhaustedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PROCEDURE


if __name__ == "__main__":
    sys.exit(main())
