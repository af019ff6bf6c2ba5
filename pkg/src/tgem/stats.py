"""Exact per-configuration counts and durations for one node."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .events import EventStream
from .model import Tgem, canonical_interval_order, window_bits


@dataclass(frozen=True, eq=False)
class SufficientStats:
    node: str
    n: np.ndarray  # event counts per configuration value
    d: np.ndarray  # time spent in each configuration; sums to t_star

    @property
    def total_events(self) -> int:
        return int(self.n.sum())


def sufficient_stats(stream: EventStream, model: Tgem, node: str) -> SufficientStats:
    if node not in model.labels:
        raise KeyError(f"label {node!r} not in model")
    parents = [
        (stream.times_of(p), lo, hi) for p, (lo, hi) in canonical_interval_order(model, node)
    ]
    return stats_from_windows(stream.times_of(node), parents, stream.t_star, node)


def stats_from_windows(
    node_times: np.ndarray,
    windows: list[tuple[np.ndarray, float, float]],
    t_star: float,
    node: str = "",
) -> SufficientStats:
    """Sweep over window change points.

    ``windows`` lists ``(parent_times, lo, hi)`` in bit order (most significant
    first). Between consecutive change points the configuration is constant
    on the left-open, right-closed segment, so it is evaluated at each
    segment's right end.
    """
    k = len(windows)
    if k == 0:
        return SufficientStats(node, np.array([len(node_times)]), np.array([t_star]))
    points = [np.array([0.0, t_star])]
    for times, lo, hi in windows:
        points.append(times + lo)
        points.append(times + hi)
    cuts = np.unique(np.concatenate(points))
    cuts = cuts[(cuts >= 0.0) & (cuts <= t_star)]
    right = cuts[1:]
    lengths = np.diff(cuts)
    seg_cfg = np.zeros(len(right), dtype=np.int64)
    ev_cfg = np.zeros(len(node_times), dtype=np.int64)
    for times, lo, hi in windows:
        seg_cfg = (seg_cfg << 1) | window_bits(times, lo, hi, right)
        ev_cfg = (ev_cfg << 1) | window_bits(times, lo, hi, node_times)
    size = 1 << k
    d = np.bincount(seg_cfg, weights=lengths, minlength=size)
    n = np.bincount(ev_cfg, minlength=size)
    return SufficientStats(node, n, d)
