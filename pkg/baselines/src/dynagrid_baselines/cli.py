"""Command line entry points for training, evaluation, and plotting."""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from .agent import ARCHITECTURES, TEXT_MODES
from .configs import TrainConfig
from .plotting import plot_curves
from .ppo import evaluate_remote, load_checkpoint, train


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dynagrid-baselines")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="run PPO and write curve logs + checkpoint")
    defaults = TrainConfig()
    p.add_argument("--level", default=defaults.level)
    p.add_argument("--mode", choices=["train", "test"], default=defaults.mode)
    p.add_argument("--arch", choices=list(ARCHITECTURES), default=defaults.arch)
    p.add_argument("--text", choices=list(TEXT_MODES), default=defaults.text)
    p.add_argument("--frames", type=int, default=defaults.total_frames)
    p.add_argument("--seed", type=int, default=defaults.seed)
    p.add_argument("--lr", type=float, default=defaults.lr)
    p.add_argument("--n-envs", type=int, default=defaults.n_envs)
    p.add_argument("--out", default=defaults.out_dir)

    p = sub.add_parser("evaluate", help="evaluate a checkpoint over the protocol")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--level", default=None, help="defaults to the training level")
    p.add_argument("--mode", choices=["train", "test"], default="test")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("plot", help="render learning-curve figures from curve logs")
    p.add_argument("--curves", nargs="+", required=True)
    p.add_argument("--labels", nargs="+", default=None)
    p.add_argument("--out", default="curves.png")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "train":
        config = TrainConfig(
            level=args.level,
            mode=args.mode,
            arch=args.arch,
            text=args.text,
            total_frames=args.frames,
            seed=args.seed,
            lr=args.lr,
            n_envs=args.n_envs,
            out_dir=args.out,
        )
        record = train(config)
        print(json.dumps(record, sort_keys=True))
        return 0
    if args.command == "evaluate":
        model, config = load_checkpoint(args.checkpoint)
        stats = evaluate_remote(
            model, args.level or config.level, args.mode, args.n, args.seed
        )
        print(json.dumps(stats, sort_keys=True))
        return 0
    if args.command == "plot":
        labels = args.labels or [f"run{i}" for i in range(len(args.curves))]
        if len(labels) != len(args.curves):
            print("error: one label per curve file", file=sys.stderr)
            return 2
        out = plot_curves(args.curves, labels, args.out)
        print(out)
        return 0
    return 2


if __name__ == "__main__":
    sys.exit(main())
