"""Exact simulation of TGEMs by SCC condensation and piecewise-constant thinning.

Randomness: ``numpy.random.PCG64`` seeded through ``SeedSequence(seed)``,
spawning one child sequence per strongly connected component in
topological order. Inside a component, exponential waiting times are drawn
with ``Generator.standard_exponential`` for each member with a positive
rate, in model label order.
"""

from __future__ import annotations

import bisect
import heapq
import math
from dataclasses import dataclass

import networkx as nx
import numpy as np

from .events import EventStream
from .model import Tgem, canonical_interval_order, validate_model

PRNG = "numpy PCG64 via SeedSequence.spawn, v1"


@dataclass(frozen=True)
class Condensation:
    components: list[tuple[str, ...]]  # in topological order
    cyclic: list[bool]


def condensation(model: Tgem) -> Condensation:
    """SCCs in a deterministic topological order (ties by earliest member label)."""
    order = {lab: i for i, lab in enumerate(model.labels)}
    g = nx.DiGraph()
    g.add_nodes_from(model.labels)
    g.add_edges_from(model.edges)
    cg = nx.condensation(g)
    members = {
        c: tuple(sorted(cg.nodes[c]["members"], key=order.__getitem__)) for c in cg.nodes
    }
    topo = nx.lexicographical_topological_sort(cg, key=lambda c: order[members[c][0]])
    comps = [members[c] for c in topo]
    cyclic = [len(c) > 1 or (c[0], c[0]) in model.edges for c in comps]
    return Condensation(comps, cyclic)


class _Member:
    """Configuration bookkeeping for one node being sampled."""

    def __init__(self, model: Tgem, node: str, history: dict[str, list[float]]):
        self.node = node
        self.rates = model.rates[node]
        self.windows = [
            (history[p], lo, hi) for p, (lo, hi) in canonical_interval_order(model, node)
        ]

    def rate_at(self, t: float) -> float:
        value = 0
        for times, lo, hi in self.windows:
            i = bisect.bisect_left(times, t - hi)
            hit = i < len(times) and times[i] + lo < t
            value = (value << 1) | hit
        return float(self.rates[value])


def _sample_component(
    model: Tgem,
    members: tuple[str, ...],
    history: dict[str, list[float]],
    t_end: float,
    rng: np.random.Generator,
) -> None:
    inside = set(members)
    nodes = [_Member(model, lab, history) for lab in members]
    offsets: dict[str, set[float]] = {}
    for lab in members:
        for p, ts in ((p, model.edges[(p, lab)]) for p in model.parents(lab)):
            offsets.setdefault(p, set()).update((0.0,) + ts.endpoints)
    # change points contributed by parents sampled in earlier components
    heap: list[float] = []
    for p, offs in offsets.items():
        if p in inside:
            continue
        for s in history[p]:
            heap.extend(s + a for a in offs)
    heapq.heapify(heap)
    internal = {p: sorted(offs) for p, offs in offsets.items() if p in inside}

    t = 0.0
    while t < t_end:
        while heap and heap[0] <= t:
            heapq.heappop(heap)
        seg_end = min(heap[0], t_end) if heap else t_end
        best_tau, best = math.inf, None
        for m in nodes:
            lam = m.rate_at(seg_end)
            if lam > 0:
                tau = rng.standard_exponential() / lam
                if tau < best_tau:
                    best_tau, best = tau, m
        if best is not None and t + best_tau <= seg_end:
            t = t + best_tau
            history[best.node].append(t)
            for a in internal.get(best.node, ()):
                heapq.heappush(heap, t + a)
        else:
            t = seg_end


def sample(model: Tgem, t_end: float, seed: int) -> EventStream:
    """Draw an event stream on ``(0, t_end]``; the result has ``t_star = t_end``."""
    if not t_end > 0 or not math.isfinite(t_end):
        raise ValueError("t_end must be positive and finite")
    problems = validate_model(model)
    if problems:
        raise ValueError("invalid model: " + "; ".join(problems))
    cond = condensation(model)
    children = np.random.SeedSequence(seed).spawn(len(cond.components))
    history: dict[str, list[float]] = {lab: [] for lab in model.labels}
    for comp, ss in zip(cond.components, children):
        _sample_component(model, comp, history, t_end, np.random.Generator(np.random.PCG64(ss)))
    events = sorted((t, lab) for lab, ts in history.items() for t in ts)
    return EventStream.from_events(events, t_end, model.labels)
