"""Command-line driver: single computations, parameter sweeps, oracle checks.

Both commands emit one RunRecord per evaluation as CSV with a fixed
column set and a '#'-prefixed metadata preamble, so downstream figure
scripts are self-describing.  Exit codes: 0 success, 1 runtime failure,
2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import subprocess
import sys
import time

import numpy as np

from . import core, oracle, params as params_mod, sekspace, windows
from .core import ConfigurationError, ParticleSystem, Periodicity, SEParams

CSV_COLUMNS = [
    "command", "sweep_axis", "D", "N", "L", "seed", "window", "xi", "eps",
    "M", "P", "shape", "s0", "s", "s0_eff", "s_eff", "nI", "R", "rc",
    "rms_vs_oracle", "t_spread", "t_aft", "t_scale", "t_aift", "t_gather",
    "t_realspace", "t_precompute", "t_total",
]


def _git_hash() -> str:
    try:
        out = subprocess.run(["git", "rev-parse", "--short", "HEAD"],
                             capture_output=True, text=True, timeout=5)
        if out.returncode == 0:
            return out.stdout.strip()
    except Exception:
        pass
    return "unknown"


def _write_records(stream, records: list[dict], threads: int) -> None:
    stream.write(f"# pmewald run {datetime.datetime.now().isoformat()}\n")
    stream.write(f"# git {_git_hash()}\n")
    stream.write(f"# threads {threads}\n")
    writer = csv.DictWriter(stream, fieldnames=CSV_COLUMNS)
    writer.writeheader()
    for rec in records:
        missing = set(CSV_COLUMNS) - set(rec)
        if missing:
            raise RuntimeError(f"record missing columns: {sorted(missing)}")
        writer.writerow(rec)


def _load_or_generate(args) -> ParticleSystem:
    if args.input:
        return core.load_particles(args.input)
    return core.generate_random_system(args.N, args.L, args.seed)


def _resolve_params(system: ParticleSystem, peri: Periodicity, args,
                    eps: float | None = None, P: int | None = None,
                    shape: float | None = None) -> SEParams:
    """Defaults from the (xi, eps) selection rules, then explicit overrides."""
    import math

    eps = args.eps if eps is None else eps
    D, L = peri.D, system.L
    rc = args.rc if args.rc else params_mod.select_cutoff(
        args.xi, eps, L=L if D >= 1 else None)
    M = args.M if args.M else params_mod.select_kinf(args.xi, L, eps)[1]
    if P is None:
        P = args.P if args.P else (
            params_mod.select_P(args.window, eps, params_mod.amplitude(system, args.xi))
            + params_mod.P_SAFETY_MARGIN)
    if (M + P) % 2 and D in (1, 2):
        P += 1
    if P > M:
        raise ConfigurationError(
            f"window needs P = {P} > M = {M}; pass a larger --M or relax --eps")
    if shape is None:
        if args.window == "gaussian" and args.m:
            shape = args.m
        elif args.window in ("bm", "kb") and args.beta:
            shape = args.beta
        else:
            shape = windows.default_shape(args.window, P)
    s0, s, nI = params_mod.select_upsampling(D, eps, M)
    if D in (1, 2):
        floor = int(math.ceil(M * math.log(10.0 / eps) / (2.0 * math.pi * P))) - 1
        nI = min(M // 2, max(nI, floor))
    h = L / M
    Lt = L + P * h
    if D < 3:
        d = 3.0 - D
        s0 = max(s0, ((1.0 + math.sqrt(d)) * L + 2.0 * rc) / Lt)
        period = sekspace.aft.padded_size(s0, M + P) * h
        R = 0.5 * (period - L + math.sqrt(d) * L)
    else:
        R = 0.0
    return SEParams(xi=args.xi, rc=rc, M=M, P=P, window=args.window, shape=shape,
                    s0=s0, s=s, nI=nI, R=R, eps=eps)


def _run_once(system, peri, prm, args, command, sweep_axis=""):
    timings: dict = {}
    t0 = time.perf_counter()
    phi = core.total_potential(system, prm, peri, threads=args.threads, timings=timings)
    t_total = time.perf_counter() - t0
    if not args.include_precompute:
        t_total -= timings.get("precompute", 0.0)

    rms = np.nan
    if args.check_oracle:
        cfg = oracle.OracleConfig.for_accuracy(prm.xi, system.L, prm.eps)
        phi_k = sekspace.se_kspace(system, prm, peri, threads=args.threads)
        phi_ref = oracle.kspace_direct(system, prm.xi, peri, cfg.kmax)
        rms = core.relative_rms_error(phi_k, phi_ref)

    grid = sekspace.Grid.build(system.L, prm, peri)
    rec = {
        "command": command, "sweep_axis": sweep_axis, "D": peri.D, "N": system.N,
        "L": system.L, "seed": args.seed, "window": prm.window, "xi": prm.xi,
        "eps": prm.eps, "M": prm.M, "P": prm.P, "shape": prm.shape,
        "s0": prm.s0, "s": prm.s,
        "s0_eff": grid.g0 / grid.Mt if peri.D < 3 else 1.0,
        "s_eff": grid.gs / grid.Mt if peri.D in (1, 2) else 1.0,
        "nI": prm.nI, "R": prm.R, "rc": prm.rc, "rms_vs_oracle": rms,
        "t_spread": timings.get("spread", 0.0), "t_aft": timings.get("aft", 0.0),
        "t_scale": timings.get("scale", 0.0), "t_aift": timings.get("aift", 0.0),
        "t_gather": timings.get("gather", 0.0),
        "t_realspace": timings.get("realspace", 0.0),
        "t_precompute": timings.get("precompute", 0.0), "t_total": t_total,
    }
    return rec, phi


def _apply_auto(args) -> None:
    if args.auto:
        args.M = args.P = 0
        args.beta = args.m = args.rc = 0.0


def cmd_compute(args) -> int:
    peri = Periodicity(args.D)
    _apply_auto(args)
    system = _load_or_generate(args)
    prm = _resolve_params(system, peri, args)
    rec, phi = _run_once(system, peri, prm, args, "compute")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("# index potential\n")
            for i, v in enumerate(phi):
                fh.write(f"{i} {v:.17g}\n")
    if args.record:
        with open(args.record, "w") as fh:
            _write_records(fh, [rec], args.threads)
    else:
        _write_records(sys.stdout, [rec], args.threads)
    return 0


def _sweep_values(args) -> list[float]:
    vals = []
    v = args.start
    while v <= args.stop + 1e-12 * max(1.0, abs(args.stop)):
        vals.append(v)
        v += args.step
    if not vals:
        raise ValueError("empty sweep range")
    return vals


def cmd_sweep(args) -> int:
    peri = Periodicity(args.D)
    _apply_auto(args)
    records = []
    for v in _sweep_values(args):
        if args.sweep == "N":
            saved = args.N
            args.N = int(round(v))
            system = _load_or_generate(args)
            args.N = saved
            prm = _resolve_params(system, peri, args)
        else:
            system = _load_or_generate(args)
            if args.sweep == "P":
                prm = _resolve_params(system, peri, args, P=int(round(v)))
            elif args.sweep == "beta":
                P = args.P if args.P else 10
                prm = _resolve_params(system, peri, args, P=P, shape=float(v))
            elif args.sweep == "eps":
                prm = _resolve_params(system, peri, args, eps=float(v))
            else:
                raise ValueError(f"unknown sweep axis {args.sweep!r}")
        rec, _ = _run_once(system, peri, prm, args, "sweep", sweep_axis=args.sweep)
        records.append(rec)
    if args.out:
        with open(args.out, "w") as fh:
            _write_records(fh, records, args.threads)
    else:
        _write_records(sys.stdout, records, args.threads)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pmewald",
                                 description="Ewald potentials with 0-3 periodic directions")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--D", type=int, required=True, choices=(0, 1, 2, 3))
        p.add_argument("--N", type=int, default=100)
        p.add_argument("--L", type=float, default=1.0)
        p.add_argument("--xi", type=float, default=6.3)
        p.add_argument("--eps", type=float, default=1e-10)
        p.add_argument("--M", type=int, default=0, help="grid size (0 = auto)")
        p.add_argument("--P", type=int, default=0, help="window support (0 = auto)")
        p.add_argument("--window", choices=windows.KINDS, default="bm")
        p.add_argument("--beta", type=float, default=0.0, help="KB/BM shape override")
        p.add_argument("--m", type=float, default=0.0, help="Gaussian shape override")
        p.add_argument("--rc", type=float, default=0.0, help="real-space cutoff override")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--input", default="", help="particle file (overrides --N/--seed)")
        p.add_argument("--out", default="", help="output file")
        p.add_argument("--record", default="", help="RunRecord CSV path (compute only)")
        p.add_argument("--check-oracle", action="store_true", dest="check_oracle")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--include-precompute", action="store_true",
                       dest="include_precompute")
        p.add_argument("--auto", action="store_true",
                       help="select everything from (xi, eps)")

    pc = sub.add_parser("compute", help="one evaluation")
    common(pc)

    ps = sub.add_parser("sweep", help="sweep one axis, one RunRecord per point")
    common(ps)
    ps.add_argument("--sweep", required=True, choices=("P", "beta", "eps", "N"))
    ps.add_argument("--from", dest="start", type=float, required=True)
    ps.add_argument("--to", dest="stop", type=float, required=True)
    ps.add_argument("--step", type=float, required=True)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return e.code if e.code is not None else 2
    try:
        if args.command == "compute":
            return cmd_compute(args)
        return cmd_sweep(args)
    except (ValueError, OSError, AssertionError) as exc:
        print(f"pmewald: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
