"""Command-line entry point: ``mdfm {eval,semi,synth,weights}``.

Summary lines go to stdout as ``mean=<x.xxxx> ci95=<x.xxxx>`` (prefixed with
``unlabeled=<u>`` when ``semi`` sweeps several pool sizes); the config echo
goes to stderr. Exit codes: 0 success, 1 runtime error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import features, fusion, synth
from .episodes import EpisodeConfig, evaluate
from .errors import MdfmError
from .transforms import TransformSpec


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _non_negative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def _transform(text: str) -> TransformSpec:
    try:
        return TransformSpec.parse(text)
    except MdfmError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text}") from None


def parse_counts(text: str) -> list[int]:
    """Parse ``20``, ``20,50,100`` or an inclusive range ``20..100[:step]`` (step 10)."""
    try:
        if ".." in text:
            lo, _, rest = text.partition("..")
            hi, _, step = rest.partition(":")
            values = list(range(int(lo), int(hi) + 1, int(step) if step else 10))
        else:
            values = [int(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad count list {text!r}") from None
    if not values or min(values) < 0:
        raise argparse.ArgumentTypeError(f"bad count list {text!r}")
    return values


def _add_episode_flags(p: argparse.ArgumentParser, semi: bool) -> None:
    p.add_argument("--manifest", required=True, help="dataset manifest.json")
    p.add_argument("--ways", type=_positive_int, default=5)
    p.add_argument("--shots", type=_positive_int, default=1)
    p.add_argument("--queries", type=_positive_int, default=15)
    p.add_argument("--episodes", type=_positive_int, default=600)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mu", type=_positive_float, default=1.0)
    p.add_argument("--eta", type=_positive_float, default=fusion.DEFAULT_ETA)
    p.add_argument("--transform", type=_transform, default=TransformSpec(),
                   help="none | pca:<d> | le:<d>,<k>")
    p.add_argument("--l2-normalize", action="store_true",
                   help="L2-normalize each sample after the transform")
    p.add_argument("--views", help="comma-separated subset of view names to fuse")
    p.add_argument("--fixed-weights", type=_float_list,
                   help="use these view weights instead of solving for them")
    if semi:
        p.add_argument("--unlabeled", type=parse_counts, required=True,
                       help="per-class unlabeled count, list, or range a..b[:step]")
    else:
        p.add_argument("--mode", choices=("supervised", "semi"), default="supervised")
        p.add_argument("--unlabeled", type=_non_negative_int, default=0)
    p.add_argument("--st-iters", type=_non_negative_int, default=None,
                   help="self-training rounds (default: exhaust the pool)")
    p.add_argument("--selection", choices=("balanced", "global"), default="balanced")
    p.add_argument("--workers", type=_positive_int, default=None)
    p.add_argument("--out", help="path for the JSON report")
    p.add_argument("--summary-only", action="store_true",
                   help="omit per-episode records from the JSON report")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mdfm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    _add_episode_flags(sub.add_parser("eval", help="evaluate fused classifiers over episodes"),
                       semi=False)
    _add_episode_flags(sub.add_parser("semi", help="self-training evaluation, optionally swept"),
                       semi=True)

    p = sub.add_parser("synth", help="write a synthetic multi-view dataset")
    p.add_argument("--classes", type=_positive_int, required=True)
    p.add_argument("--views", type=_positive_int, required=True)
    p.add_argument("--dim", type=_positive_int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--samples-per-class", type=_positive_int, default=120)
    p.add_argument("--noise", type=float, default=1.0)
    p.add_argument("--shift", type=float, default=0.0)
    p.add_argument("--informative", choices=("none", "partition"), default="partition",
                   help="give each view a disjoint block of low-shift classes")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("weights", help="print fusion weights for given view losses")
    p.add_argument("--losses", type=_float_list, required=True)
    p.add_argument("--eta", type=_positive_float, default=fusion.DEFAULT_ETA)
    return parser


def resolve_workers(flag: int | None) -> int:
    env = os.environ.get("MDFM_WORKERS")
    if env:
        return max(1, int(env))
    if flag is not None:
        return flag
    return os.cpu_count() or 1


def _load(args):
    dataset = features.load_dataset(args.manifest)
    if args.views:
        dataset = dataset.select_views([v.strip() for v in args.views.split(",")])
    return dataset


def _config(args, mode: str, unlabeled: int) -> EpisodeConfig:
    transform = TransformSpec(args.transform.kind, args.transform.dim,
                              args.transform.neighbors, args.transform.heat_sigma,
                              args.l2_normalize)
    return EpisodeConfig(
        ways=args.ways, shots=args.shots, queries=args.queries, unlabeled=unlabeled,
        mu=args.mu, eta=args.eta, transform=transform, episodes=args.episodes,
        base_seed=args.seed, mode=mode, st_iterations=args.st_iters,
        selection=args.selection,
        fixed_weights=tuple(args.fixed_weights) if args.fixed_weights else None,
    )


def _run(args, dataset, cfg: EpisodeConfig, out: str | None, prefix: str = "") -> None:
    echo = dict(cfg.to_json(), manifest=args.manifest, views=dataset.view_names)
    print("# config: " + json.dumps(echo, sort_keys=True), file=sys.stderr)
    report = evaluate(dataset, cfg, workers=resolve_workers(args.workers))
    print(prefix + report.summary_line())
    if out:
        Path(out).write_text(report.dumps(per_episode=not args.summary_only))


def cmd_eval(args) -> int:
    dataset = _load(args)
    _run(args, dataset, _config(args, args.mode, args.unlabeled), args.out)
    return 0


def cmd_semi(args) -> int:
    dataset = _load(args)
    settings = args.unlabeled
    for u in settings:
        mode = "semi" if u > 0 else "supervised"
        cfg = _config(args, mode, u)
        out = args.out
        if out and len(settings) > 1:
            p = Path(out)
            out = str(p.with_name(f"{p.stem}_u{u}{p.suffix}"))
        _run(args, dataset, cfg, out, prefix=f"unlabeled={u} " if len(settings) > 1 else "")
    return 0


def cmd_synth(args) -> int:
    informative = (synth.partition_classes(args.classes, args.views)
                   if args.informative == "partition" else None)
    spec = synth.SynthSpec(args.classes, args.samples_per_class, args.dim, args.views,
                           args.noise, args.shift, informative, args.seed)
    manifest = features.write_dataset(synth.generate(spec), args.out)
    print(f"wrote {len(manifest.views)} views to {args.out}")
    return 0


def cmd_weights(args) -> int:
    weights = fusion.solve_weights(args.losses, args.eta)
    print(" ".join(f"{w:.4f}" for w in weights.omega))
    return 0


COMMANDS = {"eval": cmd_eval, "semi": cmd_semi, "synth": cmd_synth, "weights": cmd_weights}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "weights" and any(not (x >= 0) for x in args.losses):
        parser.error("losses must be non-negative")
    if args.command in ("synth",) and (args.noise < 0 or args.shift < 0):
        parser.error("--noise and --shift must be non-negative")
    try:
        return COMMANDS[args.command](args)
    except (MdfmError, OSError, KeyError) as exc:
        print(f"mdfm: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
