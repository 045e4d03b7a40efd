"""Command-line entry point: ``mepcs <subcommand> ...``.

Every experiment key can come from a ``key = value`` file (``--config``)
and be overridden by the matching ``--key`` flag.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import experiments as ex
from .empirical import empirical_distribution
from .errors import MepcsError
from .quantization import build_alphabet, quantize_sequence, read_signal, write_signal
from .sensing import SensingSystem, generate_matrix, measure, read_matrix, write_matrix
from .solvers import LMEP, CostSpec, normalized_error, solve_anneal, solve_exhaustive
from .sources import estimate_information_dimension, sample_source
from .weights import default_cap, read_weights, weights_from_empirical, write_weights


def _config_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("experiment config")
    g.add_argument("--config", help="key = value file")
    for key in ex.CONFIG_KEYS:
        g.add_argument("--" + key.replace("_", "-"), dest="cfg_" + key, metavar="V")


def _config(args) -> ex.ExperimentConfig:
    overrides = {k[4:]: v for k, v in vars(args).items() if k.startswith("cfg_") and v is not None}
    if args.config:
        return ex.load_config(args.config, overrides)
    return ex.ExperimentConfig.from_mapping(overrides)


def _outdir(args) -> Path:
    out = Path(args.out) if getattr(args, "out", None) else ex.default_output_dir()
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_generate(args) -> int:
    cfg = _config(args)
    out = _outdir(args)
    x = sample_source(cfg.model(), cfg.n, cfg.seed)
    xq = quantize_sequence(x, cfg.quant())
    write_signal(out / "signal.txt", x)
    write_signal(out / "quantized.txt", xq.values)
    print(f"wrote {out / 'signal.txt'} and {out / 'quantized.txt'} (n={cfg.n}, b={cfg.bits})")
    return 0


def cmd_sense(args) -> int:
    x = read_signal(args.signal)
    m = args.m if args.m is not None else max(1, int(round(args.rate * x.size)))
    A = generate_matrix(m, x.size, args.seed)
    out = _outdir(args)
    write_matrix(out / "A.csv", A)
    write_signal(out / "y.txt", measure(A, x))
    print(f"wrote {out / 'A.csv'} and {out / 'y.txt'} (m={m}, n={x.size})")
    return 0


def cmd_recover(args) -> int:
    cfg = _config(args)
    A = read_matrix(args.matrix)
    if A.ndim == 1:
        A = A[None, :]
    y = read_signal(args.measurements)
    cfg = cfg.with_overrides({"n": str(A.shape[1])}) if A.shape[1] != cfg.n else cfg
    quant = cfg.quant()
    spec = CostSpec(LMEP, cfg.k, quant, SensingSystem(A, cfg.lam_value), y)
    if args.weights_file:
        spec = spec.with_weights(read_weights(args.weights_file, build_alphabet(quant), default_cap(quant.b, cfg.k)))
    elif cfg.weights == "true-distribution":
        spec = spec.with_weights(ex.build_weights(cfg, cfg.model(), quant, None))
    elif cfg.weights not in ("lmep",):
        raise MepcsError("recover supports weights = lmep or true-distribution, or --weights-file")
    if cfg.solver == "exhaustive":
        res = solve_exhaustive(spec)
    else:
        res = solve_anneal(spec, cfg.schedule(), seed=cfg.seed)
    out = _outdir(args)
    write_signal(out / "xhat.txt", res.xhat.values)
    record = {
        "seed": cfg.seed, "m": spec.sensing.m, "n": spec.n, "b": quant.b, "k": cfg.k,
        "lambda": spec.lam, "mode": spec.mode, "cost": res.cost, "residual": res.residual_term,
    }
    if args.signal:
        record["normalized_error"] = normalized_error(read_signal(args.signal), res.xhat)
    if args.trace:
        with open(out / "trace.jsonl", "w", encoding="utf-8") as fh:
            for row in res.trace:
                fh.write(json.dumps(row) + "\n")
    if args.save_weights:
        write_weights(out / "weights.tsv", weights_from_empirical(empirical_distribution(res.xhat, cfg.k + 1)))
    print(json.dumps(record))
    return 0


def cmd_verify(args) -> int:
    names = args.suite or list(ex.SUITES)
    failed = False
    for name in names:
        fn = ex.SUITES[name]
        kw = {"seed": args.seed}
        if args.instances is not None:
            kw["count" if name == "identity" else "instances"] = args.instances
        res = fn(**kw)
        print(res.line())
        for f in res.failures[:3]:
            print("  counterexample:", f)
        failed |= not res.ok
    return 1 if failed else 0


def cmd_sweep(args) -> int:
    cfg = _config(args)
    report = ex.run_robustness_sweep(cfg) if args.kind == "robustness" else ex.run_recovery_sweep(cfg)
    out = _outdir(args)
    csv_path = out / f"{args.kind}.csv"
    plot = out / f"{args.kind}.svg" if args.plot else None
    ex.emit_report(report, csv_path, plot=plot, timing=not args.no_timing)
    for c in report.summary():
        print(f"rate={c.rate:g} eps_w={c.eps_w:g} success={c.success_fraction:.3f} mean_error={c.mean_error:.4f}")
    for eps, shift in report.threshold_shifts().items():
        rate = report.threshold_rates()[eps]
        print(f"threshold(eps_w={eps:g}) = {rate}  shift = {shift}  budget 3*eps_w = {3 * eps:g}")
    print(f"wrote {csv_path}")
    return 0


def cmd_converge(args) -> int:
    cfg = _config(args)
    n_values = [int(v) for v in args.n_values.split(",")]
    rows = ex.run_convergence_study(cfg.model(), cfg.quant(), cfg.k, n_values, seeds=range(args.seeds))
    path = ex.emit_convergence(rows, _outdir(args) / "convergence.csv")
    for n in n_values:
        sel = [r for r in rows if r.n == n]
        print(f"n={n} mean_l1={np.mean([r.l1 for r in sel]):.5f} mean_kl={np.mean([r.kl_block for r in sel]):.6f}")
    print(f"wrote {path}")
    return 0


def cmd_estimate_id(args) -> int:
    cfg = _config(args)
    b_values = [int(v) for v in args.b_values.split(",")]
    est = estimate_information_dimension(cfg.model(), cfg.k, b_values)
    for b, r in zip(est.b_values, est.ratios):
        print(f"b={b} ratio={r:.6f}")
    print(f"estimate={est.extrapolated:.6f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mepcs", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample a source and quantize it")
    _config_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("sense", help="draw a Gaussian matrix and measure a signal")
    p.add_argument("--signal", required=True)
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--m", type=int)
    grp.add_argument("--rate", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sense)

    p = sub.add_parser("recover", help="solve one instance")
    _config_args(p)
    p.add_argument("--matrix", required=True)
    p.add_argument("--measurements", required=True)
    p.add_argument("--signal", help="ground truth, for the error column")
    p.add_argument("--weights-file")
    p.add_argument("--trace", action="store_true", help="dump the anneal trace as JSON lines")
    p.add_argument("--save-weights", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("verify", help="run the exact finite-n check suites")
    p.add_argument("--suite", action="append", choices=sorted(ex.SUITES))
    p.add_argument("--instances", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="recovery or robustness sweep")
    _config_args(p)
    p.add_argument("--kind", choices=("recovery", "robustness"), default="recovery")
    p.add_argument("--plot", action="store_true", help="also write an SVG plot")
    p.add_argument("--no-timing", action="store_true", help="blank the runtime column")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("converge", help="empirical-vs-true block law study")
    _config_args(p)
    p.add_argument("--n-values", default="100,1000,10000,100000")
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--out")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("estimate-id", help="quantized entropy per bit over a range of b")
    _config_args(p)
    p.add_argument("--b-values", default="4,8,12,16")
    p.set_defaults(func=cmd_estimate_id)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (MepcsError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
