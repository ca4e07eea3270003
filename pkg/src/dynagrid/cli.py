"""Command line entry points.

Subcommands: levels, rollout, eval, play, serve, dump-trace. All randomness
is controlled by --seed flags; identical invocations produce byte-identical
outputs.
"""

from __future__ import annotations

import argparse
import json
import sys

from .dynamics import Outcome
from .episode import read_traces, reset, step, record_trace
from .evaluation import compare, evaluate
from .levels import UnknownLevel, builtin_levels, get_level, levels_to_json_dicts
from .policies import POLICY_FACTORIES, make_policy
from .render import ascii_grid, legend, render_trace
from .service import DEFAULT_PORT, EnvServer, serve_stdio

PLAY_KEYS = {
    "a": 0,  # turn left
    "d": 1,  # turn right
    "w": 2,  # forward
    "p": 3,  # pickup
    "o": 4,  # drop
    "t": 5,  # toggle
    "x": 6,  # done
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dynagrid",
        description="Grid worlds with per-episode tile dynamics described in text.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("levels", help="list the built-in levels")
    p.add_argument("--json", action="store_true", help="emit the registry as JSON")

    def common(p):
        p.add_argument("--level", required=True)
        p.add_argument("--mode", choices=["train", "test"], default="train")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("rollout", help="run one policy and report statistics")
    common(p)
    p.add_argument("--policy", choices=sorted(POLICY_FACTORIES), default="optimal")
    p.add_argument("--n", type=int, default=10, help="number of episodes")
    p.add_argument("--trace-out", help="write one JSON trace per line to this file")
    p.add_argument("--json", action="store_true", help="emit stats as JSON")

    p = sub.add_parser("eval", help="compare several policies on one level")
    common(p)
    p.add_argument(
        "--policies", default="optimal,greedy,random", help="comma-separated policy names"
    )
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("play", help="drive an episode from the keyboard")
    common(p)
    p.add_argument("--text", default="descriptive", help="text mode for descriptions")

    p = sub.add_parser("serve", help="run the remote stepping service")
    p.add_argument("--transport", choices=["stdio", "tcp"], default="stdio")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=DEFAULT_PORT)

    p = sub.add_parser("dump-trace", help="render a recorded trace as an ASCII overlay")
    p.add_argument("--trace", required=True, help="trace file (one JSON record per line)")
    p.add_argument("--index", type=int, default=0, help="which record to render")
    return parser


def _cmd_levels(args) -> int:
    specs = builtin_levels()
    if args.json:
        print(json.dumps(levels_to_json_dicts(specs), indent=2, sort_keys=True))
        return 0
    for spec in specs:
        props = ",".join(p.value for p in spec.allowed_properties)
        print(
            f"{spec.name:<18} {spec.grid_size}x{spec.grid_size}"
            f" tiles={spec.n_tile_types} mission={spec.mission_family}"
            f" distractors={'yes' if spec.distractors else 'no'}"
            f" partial_text={'yes' if spec.partial_text else 'no'}"
            f" max_steps={spec.max_steps} properties={props}"
        )
    return 0


def _cmd_rollout(args) -> int:
    level = get_level(args.level)
    policy = make_policy(args.policy, args.seed)
    stats, traces = evaluate(
        policy, level, args.mode, args.n, args.seed, collect_traces=True
    )
    if args.trace_out:
        with open(args.trace_out, "w", encoding="utf-8") as fh:
            for t in traces:
                fh.write(t.to_json_line() + "\n")
    if args.json:
        print(json.dumps(stats.to_dict(), sort_keys=True))
    else:
        print(
            f"{args.policy} on {level.name} ({args.mode}, n={stats.n}): "
            f"Succ {stats.succ_mean:.3f}±{stats.succ_se:.3f}  "
            f"R_avg {stats.r_mean:.3f}±{stats.r_se:.3f}  "
            f"N_epi {stats.nepi_mean:.3f}±{stats.nepi_se:.3f}"
        )
    return 0


def _cmd_eval(args) -> int:
    level = get_level(args.level)
    names = [n.strip() for n in args.policies.split(",") if n.strip()]
    stats = [
        evaluate(make_policy(name, args.seed), level, args.mode, args.n, args.seed)
        for name in names
    ]
    table = compare(stats, names)
    if args.json:
        print(json.dumps(table.to_records(), sort_keys=True))
    else:
        print(table.to_text())
    return 0


def _cmd_play(args) -> int:
    level = get_level(args.level)
    obs, ep = reset(level, args.mode, args.seed, text_mode=args.text)
    print(f"instruction: {obs.instruction}")
    for sentence in obs.descriptions:
        print(f"  {sentence}")
    print(legend(ep.instance.dynamics))
    print("keys: a=left d=right w=forward p=pickup o=drop t=toggle x=done q=quit")
    while not ep.terminated:
        print()
        print(ascii_grid(ep.grid, ep.instance.dynamics))
        try:
            key = input(f"[t={ep.time:g} steps={ep.steps}] > ").strip().lower()
        except EOFError:
            return 0
        if key == "q":
            return 0
        if key not in PLAY_KEYS:
            print(f"unknown key {key!r}")
            continue
        result = step(ep, PLAY_KEYS[key])
        if result.done:
            print(ascii_grid(ep.grid, ep.instance.dynamics))
            print(f"outcome={ep.outcome.value} reward={result.reward:.4f} time={ep.time:g}")
    return 0


def _cmd_serve(args) -> int:
    if args.transport == "stdio":
        serve_stdio()
        return 0
    server = EnvServer(args.host, args.port)
    print(f"listening on {args.host}:{server.port}", file=sys.stderr, flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def _cmd_dump_trace(args) -> int:
    traces = read_traces(args.trace)
    if not 0 <= args.index < len(traces):
        print(f"trace index {args.index} out of range (file has {len(traces)})", file=sys.stderr)
        return 2
    print(render_trace(traces[args.index]))
    return 0


_COMMANDS = {
    "levels": _cmd_levels,
    "rollout": _cmd_rollout,
    "eval": _cmd_eval,
    "play": _cmd_play,
    "serve": _cmd_serve,
    "dump-trace": _cmd_dump_trace,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except UnknownLevel as exc:
        print(f"error: {exc}", file=sys.stderr)
        print("run 'dynagrid levels' to list available levels", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
