"""Command line interface: ``tgem <command> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import bench
from .evaluation import edge_distances, model_distance
from .events import read_events, write_events
from .generation import DEFAULT_HORIZONS, DEFAULT_RATES, GenConfig, random_tgem
from .horizon import HorizonPolicy
from .learning import StructuralCaps, learn
from .model import read_model, value_to_bits, write_model
from .sampling import sample
from .scoring import log_likelihood, mle_rates, penalty
from .stats import sufficient_stats


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v.strip())


def _policy(args) -> HorizonPolicy:
    if args.heuristic == "quantile":
        return HorizonPolicy("quantile", args.q)
    return HorizonPolicy("proximal")


def cmd_score(args) -> int:
    model = read_model(args.model)
    stream = read_events(args.data)
    rates = model.rates if model.rates else None
    ll = log_likelihood(stream, model, rates)
    pen = penalty(model, stream.t_star)
    out = {"loglik": ll, "bic": ll - pen, "penalty": pen}
    if args.verbose:
        nodes = {}
        for lab in model.labels:
            st = sufficient_stats(stream, model, lab)
            k = model.n_intervals(lab)
            nodes[lab] = [
                {
                    "config": "".join(map(str, value_to_bits(j, k))),
                    "n": int(st.n[j]),
                    "d": float(st.d[j]),
                    "mle": float(r),
                }
                for j, r in enumerate(mle_rates(st))
            ]
        out["nodes"] = nodes
    print(json.dumps(out, indent=2 if args.verbose else None))
    return 0


def cmd_learn(args) -> int:
    stream = read_events(args.data)
    caps = StructuralCaps(args.max_indegree, args.max_intervals)
    model, trace = learn(stream, _policy(args), caps)
    write_model(model, args.out)
    if args.trace:
        with open(args.trace, "w") as fh:
            json.dump(trace.to_dict(), fh, indent=2)
    print(f"learned {len(model.edges)} edges, BIC {trace.final_bic:.4f}", file=sys.stderr)
    return 0


def cmd_sample(args) -> int:
    stream = sample(read_model(args.model), args.t_end, args.seed)
    write_events(stream, args.out)
    return 0


def cmd_generate(args) -> int:
    cfg = GenConfig(
        nodes=args.nodes,
        density=args.density,
        horizons=args.horizons,
        rates=args.rates,
        max_indegree=args.max_indegree,
        max_intervals_per_node=args.max_intervals,
        seed=args.seed,
    )
    write_model(random_tgem(cfg), args.out)
    return 0


def cmd_distance(args) -> int:
    a, b = read_model(args.a), read_model(args.b)
    per_edge = edge_distances(a, b, args.mode)
    out = {
        "mode": args.mode,
        "distance": model_distance(a, b, args.mode),
        "edges": [
            {
                "from": p,
                "to": c,
                "in_a": (p, c) in a.edges,
                "in_b": (p, c) in b.edges,
                "distance": d,
            }
            for (p, c), d in per_edge.items()
        ],
    }
    print(json.dumps(out, indent=2))
    return 0


def cmd_benchmark(args) -> int:
    cfg = bench.BenchmarkConfig.from_toml(args.config) if args.config else bench.BenchmarkConfig()
    if args.per_edge:
        cfg.per_edge = True
    path = bench.run_benchmark(cfg, args.out, jobs=args.jobs)
    print(path)
    return 0


def cmd_report(args) -> int:
    bench.report(args.results, args.out)
    for name in ("distance", "f1", "events"):
        with open(f"{args.out}/{name}.txt") as fh:
            print(fh.read())
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tgem", description=__doc__)
    p.add_argument("-v", "--log-level", default="WARNING")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("score", help="log-likelihood and BIC of a model on data")
    s.add_argument("--model", required=True)
    s.add_argument("--data", required=True)
    s.add_argument("--verbose", action="store_true", help="per-node sufficient statistics")
    s.set_defaults(func=cmd_score)

    s = sub.add_parser("learn", help="learn a TGEM from an event CSV")
    s.add_argument("--data", required=True)
    s.add_argument("--heuristic", choices=["proximal", "quantile"], default="proximal")
    s.add_argument("--q", type=float, default=0.5)
    s.add_argument("--max-indegree", type=int)
    s.add_argument("--max-intervals", type=int)
    s.add_argument("--out", required=True)
    s.add_argument("--trace")
    s.set_defaults(func=cmd_learn)

    s = sub.add_parser("sample", help="sample an event stream from a model")
    s.add_argument("--model", required=True)
    s.add_argument("--t-end", type=float, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("generate", help="draw a random benchmark TGEM")
    s.add_argument("--nodes", type=int, required=True)
    s.add_argument("--density", type=float, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--horizons", type=_floats, default=DEFAULT_HORIZONS)
    s.add_argument("--rates", type=_floats, default=DEFAULT_RATES)
    s.add_argument("--max-indegree", type=int, default=2)
    s.add_argument("--max-intervals", type=int, default=4)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_generate)

    s = sub.add_parser("distance", help="structural distance between two models")
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.add_argument("--mode", choices=["set", "refined"], default="refined")
    s.set_defaults(func=cmd_distance)

    s = sub.add_parser("benchmark", help="run the synthetic benchmark grid")
    s.add_argument("--config", help="TOML file; the full default grid otherwise")
    s.add_argument("--out", required=True)
    s.add_argument("--jobs", type=int)
    s.add_argument("--per-edge", action="store_true")
    s.set_defaults(func=cmd_benchmark)

    s = sub.add_parser("report", help="summary tables and plots from benchmark results")
    s.add_argument("--results", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        # parse and schema errors subclass ValueError; their messages carry the location
        print(f"tgem {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
