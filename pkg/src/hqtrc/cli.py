"""Command line entry point: corrupt -> complete -> refine -> evaluate."""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .c2f import PatchSolveError, global_complete, run_c2f_detailed
from .config import ConfigError, RunConfig, load_config
from .corrupt import CorruptionError, CorruptionSpec, corrupt, psnr
from .data import synthetic_image
from .fileio import FormatError, read_netpbm, read_trt, write_netpbm, write_trt
from .synth import random_tr_tensor
from .tensor import reshape

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4
CSV_COLUMNS = ("run", "seed", "psnr_global", "psnr_c2f", "iters_global", "wall_ms")
_IMAGE_SUFFIXES = (".pgm", ".ppm", ".pnm")


def _int_list(text: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}") from None
    if not vals or min(vals) < 1:
        raise argparse.ArgumentTypeError("entries must be positive")
    return vals


def load_tensor(path) -> np.ndarray:
    if Path(path).suffix.lower() in _IMAGE_SUFFIXES:
        return read_netpbm(path)
    return read_trt(path)


def _pair(args, cfg: RunConfig):
    m = read_trt(args.input)
    mask = read_trt(args.mask)
    if m.shape != mask.shape:
        raise ConfigError(f"observation {m.shape} and mask {mask.shape} differ in shape")
    return m, mask


def cmd_synth(args) -> int:
    ranks = args.ranks if len(args.ranks) > 1 else args.ranks * len(args.dims)
    if len(ranks) != len(args.dims):
        raise ConfigError("--ranks needs one entry or one per mode")
    x, _ = random_tr_tensor(args.dims, ranks, seed=args.seed)
    write_trt(args.output, x)
    return EXIT_OK


def cmd_corrupt(args) -> int:
    clean = load_tensor(args.input)
    spec = CorruptionSpec.parse(args.mask_spec, args.noise, args.seed)
    observed, mask = corrupt(clean, spec)
    write_trt(args.output, observed)
    write_trt(args.mask_out, mask)
    return EXIT_OK


def cmd_complete(args) -> int:
    cfg = load_config(args.config)
    m, mask = _pair(args, cfg)
    x, report, rank = global_complete(m, mask, cfg.solver_config(), cfg.rank_rule(), cfg.global_dims)
    write_trt(args.output, x)
    if args.report:
        Path(args.report).write_text(f"rank {rank}\n" + report.to_text(), encoding="utf-8")
    return EXIT_OK if report.termination != "diverged" else EXIT_NUMERIC


def cmd_c2f(args) -> int:
    cfg = load_config(args.config)
    m, mask = _pair(args, cfg)
    res = run_c2f_detailed(m, mask, cfg.patch_plan(), cfg.solver_config(), cfg.rank_rule(),
                           global_dims=cfg.global_dims, shifted_aggregation=cfg.shifted_aggregation,
                           workers=cfg.workers)
    write_trt(args.output, res.output)
    if args.report:
        lines = [f"global_rank {res.global_rank}", f"local_rank {res.local_rank}", "[global]",
                 res.global_report.to_text()]
        for origin, rep in res.patch_reports.items():
            lines += [f"[patch {origin[0]},{origin[1]}]", rep.to_text()]
        Path(args.report).write_text("\n".join(lines), encoding="utf-8")
    return EXIT_OK


def cmd_psnr(args) -> int:
    a, b = load_tensor(args.a), load_tensor(args.b)
    if a.shape != b.shape:
        raise ConfigError(f"shape mismatch: {a.shape} vs {b.shape}")
    val = psnr(a, b, args.peak)
    print("inf" if np.isinf(val) else f"{val:.6f}")
    return EXIT_OK


def cmd_convert(args) -> int:
    x = load_tensor(args.input)
    if args.reshape:
        x = reshape(x, args.reshape)
    if Path(args.output).suffix.lower() in _IMAGE_SUFFIXES:
        write_netpbm(args.output, x)
    else:
        write_trt(args.output, x)
    return EXIT_OK


def mc_run(clean: np.ndarray, cfg: RunConfig, run: int) -> dict:
    """One Monte Carlo repetition with seed ``cfg.seed ^ run``."""
    seed = cfg.seed ^ run
    t0 = time.perf_counter()
    observed, mask = corrupt(clean, cfg.corruption(seed))
    res = run_c2f_detailed(observed, mask, cfg.patch_plan(), cfg.solver_config(), cfg.rank_rule(),
                           global_dims=cfg.global_dims, shifted_aggregation=cfg.shifted_aggregation,
                           workers=cfg.workers)
    wall = (time.perf_counter() - t0) * 1000 if cfg.timing else 0.0
    return {
        "run": run, "seed": seed,
        "psnr_global": psnr(clean, res.global_estimate),
        "psnr_c2f": psnr(clean, res.output),
        "iters_global": res.global_report.iterations,
        "wall_ms": wall,
        "global": res.global_estimate, "c2f": res.output,
        "global_report": res.global_report, "patch_reports": res.patch_reports,
    }


def mc_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow([r["run"], r["seed"], f"{r['psnr_global']:.6f}", f"{r['psnr_c2f']:.6f}",
                         r["iters_global"], f"{r['wall_ms']:.0f}"])
    return buf.getvalue()


def run_mc(cfg: RunConfig, runs: int, jobs: int = 1) -> list[dict]:
    clean = load_tensor(cfg.input) if cfg.input else synthetic_image()
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(lambda r: mc_run(clean, cfg, r), range(runs)))
    else:
        rows = [mc_run(clean, cfg, r) for r in range(runs)]
    return sorted(rows, key=lambda r: r["run"])


def cmd_mc(args) -> int:
    cfg = load_config(args.config)
    runs = args.runs if args.runs is not None else cfg.runs
    if runs < 1:
        raise ConfigError("--runs must be >= 1")
    rows = run_mc(cfg, runs, args.jobs)
    write_mc_outputs(rows, args.output, args.outdir)
    return EXIT_OK


def write_mc_outputs(rows, csv_path, outdir=None) -> None:
    Path(csv_path).write_text(mc_csv(rows), encoding="utf-8")
    if outdir:
        out = Path(outdir)
        out.mkdir(parents=True, exist_ok=True)
        for r in rows:
            write_trt(out / f"run{r['run']:03d}_global.trt", r["global"])
            write_trt(out / f"run{r['run']:03d}_c2f.trt", r["c2f"])


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hqtrc", description="Robust tensor ring completion toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="random TR tensor")
    p.add_argument("--dims", type=_int_list, required=True)
    p.add_argument("--ranks", type=_int_list, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("corrupt", help="sample a mask and add noise")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--mask", dest="mask_spec", default="uniform:0.5")
    p.add_argument("--noise", default="none")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("-m", "--mask-out", required=True)
    p.set_defaults(func=cmd_corrupt)

    for name, func, text in (("complete", cmd_complete, "global HQTRC"),
                             ("c2f", cmd_c2f, "coarse-to-fine refinement")):
        p = sub.add_parser(name, help=text)
        p.add_argument("-i", "--input", required=True)
        p.add_argument("-m", "--mask", required=True)
        p.add_argument("--config")
        p.add_argument("-o", "--output", required=True)
        p.add_argument("--report")
        p.set_defaults(func=func)

    p = sub.add_parser("psnr", help="PSNR between two tensors")
    p.add_argument("-a", required=True)
    p.add_argument("-b", required=True)
    p.add_argument("--peak", type=float, default=1.0)
    p.set_defaults(func=cmd_psnr)

    p = sub.add_parser("convert", help="convert between .pgm/.ppm and .trt")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--reshape", type=_int_list)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("mc", help="Monte Carlo sweep to CSV")
    p.add_argument("--runs", type=int)
    p.add_argument("--config")
    p.add_argument("--jobs", type=int, default=min(4, os.cpu_count() or 1))
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--outdir")
    p.set_defaults(func=cmd_mc)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ArithmeticError, np.linalg.LinAlgError, PatchSolveError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, CorruptionError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
