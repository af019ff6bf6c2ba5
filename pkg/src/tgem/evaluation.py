"""Structural distances between TGEMs and edge-recovery scores."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .model import Timescale, Tgem


@dataclass(frozen=True)
class EndpointMatching:
    pairs: tuple[tuple[float, float], ...]
    n_unmatched: int

    @property
    def n_matched(self) -> int:
        return len(self.pairs)


def _vector(ts) -> np.ndarray:
    if isinstance(ts, Timescale):
        return np.array((0.0,) + ts.endpoints)
    return np.asarray(ts, dtype=float)


def _closest(value: float, candidates: np.ndarray) -> int:
    # argmin returns the first minimum, i.e. the smaller value on ties
    return int(np.argmin(np.abs(candidates - value)))


def match_endpoints(v1: Sequence[float], v2: Sequence[float]) -> EndpointMatching:
    """Pairs of endpoints that are each other's closest element."""
    a = np.asarray(v1, dtype=float)
    b = np.asarray(v2, dtype=float)
    pairs = []
    for i, u in enumerate(a):
        j = _closest(u, b)
        if _closest(b[j], a) == i:
            pairs.append((float(u), float(b[j])))
    m = len(pairs)
    return EndpointMatching(tuple(pairs), (len(a) - m) + (len(b) - m))


def elementary_distance_set(t1, t2) -> float:
    v1 = set(_vector(t1).tolist())
    v2 = set(_vector(t2).tolist())
    nid = len(v1 ^ v2)
    return nid / (nid + len(v1 & v2))


def elementary_distance_refined(t1, t2) -> float:
    """Matched endpoints cost their relative difference (capped at 1), unmatched ones cost 1.

    The total is divided by the number of matched plus unmatched endpoints;
    the ``(0, 0)`` pair counts as matched at zero cost.
    """
    m = match_endpoints(_vector(t1), _vector(t2))
    cost = 0.0
    for u, w in m.pairs:
        if u == 0.0 and w == 0.0:
            continue
        lo = min(u, w)
        cost += 1.0 if lo <= 0 else min(1.0, abs(u - w) / lo)
    return (cost + m.n_unmatched) / (m.n_matched + m.n_unmatched)


def _check_vocab(m1: Tgem, m2: Tgem) -> None:
    if set(m1.labels) != set(m2.labels):
        raise ValueError("models have different vocabularies")


def edge_distances(m1: Tgem, m2: Tgem, mode: str = "refined") -> dict[tuple[str, str], float]:
    """Per-edge contribution to :func:`model_distance` (1 for an edge in only one model)."""
    _check_vocab(m1, m2)
    elementary = {"refined": elementary_distance_refined, "set": elementary_distance_set}[mode]
    out = {}
    for e in set(m1.edges) | set(m2.edges):
        if e in m1.edges and e in m2.edges:
            out[e] = elementary(m1.edges[e], m2.edges[e])
        else:
            out[e] = 1.0
    return dict(sorted(out.items()))


def model_distance(m1: Tgem, m2: Tgem, mode: str = "refined") -> float:
    return float(sum(edge_distances(m1, m2, mode).values()))


class EdgeScores(NamedTuple):
    precision: float
    recall: float
    f1: float


def edge_f1(truth: Tgem, learned: Tgem) -> EdgeScores:
    _check_vocab(truth, learned)
    true_edges, found = set(truth.edges), set(learned.edges)
    tp = len(true_edges & found)
    if tp == 0:
        precision = tp / len(found) if found else 0.0
        recall = tp / len(true_edges) if true_edges else 0.0
        return EdgeScores(precision, recall, 0.0)
    precision = tp / len(found)
    recall = tp / len(true_edges)
    return EdgeScores(precision, recall, 2 * precision * recall / (precision + recall))
