"""Recover a two-node chain Z -> X with window (0, 2] across seeds.

Prints the learned edges and horizon per seed, for both heuristics.
"""

import argparse

from tgem.horizon import HorizonPolicy
from tgem.learning import learn
from tgem.model import Timescale, Tgem
from tgem.sampling import sample


def chain(horizon: float, lam_z: float, low: float, high: float) -> Tgem:
    return Tgem(("Z", "X"), {("Z", "X"): Timescale((horizon,))}, {"Z": [lam_z], "X": [low, high]})


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--seeds", type=int, default=20)
    p.add_argument("--t-end", type=float, default=8000.0)
    p.add_argument("--horizon", type=float, default=2.0)
    args = p.parse_args()

    truth = chain(args.horizon, 0.2, 0.01, 0.64)
    policies = [HorizonPolicy(), HorizonPolicy("quantile", 0.5)]
    hits = {pol.name: 0 for pol in policies}
    for seed in range(args.seeds):
        stream = sample(truth, args.t_end, seed)
        cells = []
        for pol in policies:
            model, _ = learn(stream, pol)
            ts = model.edges.get(("Z", "X"))
            hits[pol.name] += ts is not None
            cells.append(f"{pol.name}: {'-' if ts is None else ts.endpoints} ({len(model.edges)} edges)")
        print(f"seed {seed:3d}  " + "  ".join(cells))
    for name, n in hits.items():
        print(f"{name}: Z -> X found in {n}/{args.seeds} seeds")


if __name__ == "__main__":
    main()
