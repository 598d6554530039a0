"""Command-line entry point: certify, simulate, exp1, exp2, replay."""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import __version__
from .bounds import certificate
from .dynamics import SimConfig, SimulationError, integrate, pis_check
from .experiments import (DESK_SAMPLES_EXP1, DESK_SAMPLES_EXP2, FULL_SAMPLES_EXP1,
                          FULL_SAMPLES_EXP2, TOPOLOGY_IDS, ExperimentConfig, experiment1,
                          experiment2)
from .io import (read_instance, write_certificates, write_experiment1,
                 write_experiment2, write_manifest, write_pair_report, write_trajectory)


def parse_n_range(text: str) -> tuple[int, ...]:
    """``A..B`` (inclusive) or a single integer."""
    try:
        if ".." in text:
            a, b = (int(x) for x in text.split("..", 1))
        else:
            a = b = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B or an integer, got {text!r}")
    if a < 2 or b < a:
        raise argparse.ArgumentTypeError(f"invalid range {text!r}")
    return tuple(range(a, b + 1))


def positive_float(text: str) -> float:
    x = float(text)
    if not x > 0 or not math.isfinite(x):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return x


def nonneg_float(text: str) -> float:
    x = float(text)
    if not x >= 0 or not math.isfinite(x):
        raise argparse.ArgumentTypeError(f"expected a nonnegative number, got {text!r}")
    return x


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kuracert", description=__doc__)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("certify", help="evaluate all coupling bounds for an instance")
    c.add_argument("instance")
    c.add_argument("--D", type=positive_float, default=None,
                   help="spread bound (default: initial spread D0)")
    c.add_argument("--seed", type=int, default=0, help="multistart seed")
    c.add_argument("--out", default=".", help="output directory")

    s = sub.add_parser("simulate", help="integrate an instance and check the invariant set")
    s.add_argument("instance")
    s.add_argument("--K", type=nonneg_float, required=True)
    s.add_argument("--horizon", type=positive_float, default=None)
    s.add_argument("--step", type=positive_float, default=None)
    s.add_argument("--D", type=positive_float, default=None,
                   help="spread bound for the invariant-set check (default: D0)")
    s.add_argument("--record-every", type=int, default=1)
    s.add_argument("--out", default=".")

    for name, n_default in (("exp1", "4..10"), ("exp2", "4..8")):
        e = sub.add_parser(name, help=f"run experiment {name[-1]}")
        e.add_argument("--seed", type=int, default=7)
        e.add_argument("--samples", type=int, default=None)
        e.add_argument("--n", type=parse_n_range, default=parse_n_range(n_default))
        e.add_argument("--paper-scale", action="store_true",
                       help="use the full sample counts (10^5 / 500)")
        e.add_argument("--out", default=".")
        if name == "exp2":
            e.add_argument("--topology", action="append", choices=sorted(TOPOLOGY_IDS),
                           help="repeatable; default all three")
            e.add_argument("--freq-low", type=float, default=0.0)
            e.add_argument("--freq-high", type=float, default=1.0)
            e.add_argument("--jobs", type=int, default=1)

    r = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    r.add_argument("manifest")
    return p


def _manifest(args, argv, outputs) -> dict:
    params = {k: v for k, v in vars(args).items() if k != "command"}
    return {
        "command": args.command,
        "argv": list(argv),
        "params": json.loads(json.dumps(params, default=list)),
        "seed": params.get("seed"),
        "version": __version__,
        "outputs": [str(o) for o in outputs],
    }


def _finish(args, argv, outputs) -> None:
    man = _manifest(args, argv, outputs)
    for o in outputs:
        write_manifest(o, man)
        print(f"wrote {o}")


def cmd_certify(args, argv) -> int:
    inst = read_instance(args.instance)
    cert = certificate(inst.graph, inst.freqs, inst.phases, D=args.D, seed=args.seed)
    out = Path(args.out)
    stem = Path(args.instance).stem
    outputs = [write_certificates(out / f"{stem}.certificate.csv", [(stem, cert)])]
    if cert.star is not None:
        outputs.append(write_pair_report(out / f"{stem}.pairs.csv", cert.star.pairs))
    k = "none" if math.isnan(cert.k_ours) else repr(cert.k_ours)
    print(f"winner: {cert.winner}, bound: {k}")
    _finish(args, argv, outputs)
    return 0


def cmd_simulate(args, argv) -> int:
    inst = read_instance(args.instance)
    D0 = float(inst.phases.max() - inst.phases.min())
    D = D0 if args.D is None else args.D
    if D < D0:
        print(f"error: --D {D} is below the initial spread {D0:.6g}", file=sys.stderr)
        return 2
    if args.record_every < 1:
        print("error: --record-every must be >= 1", file=sys.stderr)
        return 2
    cfg = SimConfig(step=args.step, horizon=args.horizon, record_every=args.record_every)
    try:
        traj = integrate(inst.graph, inst.freqs, args.K, inst.phases, cfg)
    except SimulationError as exc:
        print(f"error: blow-up: {exc}", file=sys.stderr)
        return 1
    pis = pis_check(traj, D)
    out = Path(args.out)
    path = write_trajectory(out / f"{Path(args.instance).stem}.trajectory.csv", traj)
    verdict_pis = "pass" if pis.passed else f"fail (t={pis.first_violation:.6g})"
    verdict_sync = "pass" if traj.synced else "fail"
    print(f"PIS: {verdict_pis}, sync: {verdict_sync}")
    _finish(args, argv, [path])
    return 0


def _samples(args, parser, desk, full) -> int:
    if args.paper_scale and args.samples is not None:
        parser.error("--paper-scale and --samples are mutually exclusive")
    if args.samples is not None:
        if args.samples < 1:
            parser.error("--samples must be >= 1")
        return args.samples
    return full if args.paper_scale else desk


def cmd_exp1(args, argv, parser) -> int:
    samples = _samples(args, parser, DESK_SAMPLES_EXP1, FULL_SAMPLES_EXP1)
    cfg = ExperimentConfig(seed=args.seed, samples=samples, n_range=args.n)
    rows = experiment1(cfg)
    path = write_experiment1(Path(args.out) / "experiment1.csv", rows, cfg.seed, samples)
    _finish(args, argv, [path])
    return 0


def cmd_exp2(args, argv, parser) -> int:
    samples = _samples(args, parser, DESK_SAMPLES_EXP2, FULL_SAMPLES_EXP2)
    if not args.freq_low < args.freq_high:
        parser.error("--freq-low must be below --freq-high")
    if args.jobs < 1:
        parser.error("--jobs must be >= 1")
    topologies = tuple(dict.fromkeys(args.topology)) if args.topology else (
        "chain", "ring", "star_tree")
    cfg = ExperimentConfig(seed=args.seed, samples=samples, n_range=args.n,
                           topologies=topologies,
                           freq_interval=(args.freq_low, args.freq_high), jobs=args.jobs)
    rows = experiment2(cfg)
    path = write_experiment2(Path(args.out) / "experiment2.csv", rows, cfg.seed, samples)
    _finish(args, argv, [path])
    return 0


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "certify":
            return cmd_certify(args, argv)
        if args.command == "simulate":
            return cmd_simulate(args, argv)
        if args.command == "exp1":
            return cmd_exp1(args, argv, parser)
        if args.command == "exp2":
            return cmd_exp2(args, argv, parser)
        if args.command == "replay":
            man = json.loads(Path(args.manifest).read_text())
            return main(man["argv"])
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    parser.error(f"unknown command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
