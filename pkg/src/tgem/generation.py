"""Random benchmark TGEMs: Erdos-Renyi graphs with capped in-degree and geometric refinements."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Timescale, Tgem

DEFAULT_HORIZONS = (0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 24.0)
DEFAULT_RATES = (0.01, 0.02, 0.04, 0.08, 0.16, 0.32, 0.64)


@dataclass(frozen=True)
class GenConfig:
    nodes: int = 5
    density: float = 0.2
    horizons: tuple[float, ...] = DEFAULT_HORIZONS
    rates: tuple[float, ...] = DEFAULT_RATES
    p_geom: float = 0.85
    max_indegree: int = 2
    max_intervals_per_node: int = 4
    seed: int = 0

    def __post_init__(self):
        if self.nodes < 1:
            raise ValueError("nodes must be >= 1")
        if not 0 <= self.density < 1:
            raise ValueError("density must lie in [0, 1)")
        if not self.horizons or not self.rates:
            raise ValueError("horizons and rates must be non-empty")
        if min(self.horizons) <= 0 or min(self.rates) <= 0:
            raise ValueError("horizons and rates must be positive")
        if not 0 < self.p_geom <= 1:
            raise ValueError("p_geom must lie in (0, 1]")


def node_labels(n: int) -> tuple[str, ...]:
    return tuple(str(i) for i in range(n))


def random_tgem(config: GenConfig) -> Tgem:
    rng = np.random.default_rng(config.seed)
    labels = node_labels(config.nodes)
    n = config.nodes

    present = rng.random((n, n)) < config.density  # [parent, child], self-pairs included
    for child in range(n):
        parents = np.flatnonzero(present[:, child])
        if len(parents) > config.max_indegree:
            keep = rng.choice(parents, size=config.max_indegree, replace=False)
            present[:, child] = False
            present[keep, child] = True

    endpoints: dict[tuple[int, int], list[float]] = {}
    for p, c in zip(*np.nonzero(present)):
        endpoints[(int(p), int(c))] = [float(rng.choice(config.horizons))]

    intervals = {c: sum(1 for (_, cc) in endpoints if cc == c) for c in range(n)}
    for key in sorted(endpoints):
        ep = endpoints[key]
        # numpy's geometric counts trials to first success (support 1, 2, ...)
        k = int(rng.geometric(config.p_geom)) - 1
        for _ in range(k):
            is_split = rng.random() < 0.5
            target = int(rng.integers(len(ep))) if is_split else None
            if intervals[key[1]] + 1 > config.max_intervals_per_node:
                continue
            if is_split:
                lo = 0.0 if target == 0 else ep[target - 1]
                ep.insert(target, (lo + ep[target]) / 2)
            else:
                ep.append(2 * ep[-1])
            intervals[key[1]] += 1

    edges = {(labels[p], labels[c]): Timescale(tuple(ep)) for (p, c), ep in endpoints.items()}
    model = Tgem(labels, edges)
    rates = {
        lab: rng.choice(config.rates, size=model.n_configs(lab)).astype(float) for lab in labels
    }
    return model.with_rates(rates)


def expected_capped_edges(nodes: int, density: float, max_indegree: int) -> float:
    """Mean edge count after capping: ``nodes * E[min(Binomial(nodes, density), cap)]``."""
    from scipy.stats import binom

    k = np.arange(nodes + 1)
    pmf = binom.pmf(k, nodes, density)
    return float(nodes * np.sum(np.minimum(k, max_indegree) * pmf))
