"""Greedy BIC structure search over add/split/extend and their inverses."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .events import EventStream
from .horizon import HorizonPolicy, default_horizons
from .model import Timescale, Tgem, canonical_interval_order
from .scoring import fit_rates, local_score
from .stats import stats_from_windows

EPS = 1e-9
MAX_ITERATIONS = 10_000

FORWARD_KINDS = ("add", "split", "extend")
BACKWARD_KINDS = ("remove", "merge", "truncate")
_KIND_RANK = {k: i for i, k in enumerate(FORWARD_KINDS + BACKWARD_KINDS)}


class IllegalMoveError(ValueError):
    pass


class SearchDidNotConverge(RuntimeError):
    pass


@dataclass(frozen=True)
class Move:
    kind: str
    parent: str
    child: str
    interval: Optional[int] = None
    score_delta: float = 0.0

    @property
    def edge(self) -> tuple[str, str]:
        return (self.parent, self.child)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "edge": [self.parent, self.child],
            "interval": self.interval,
            "score_delta": self.score_delta,
        }


@dataclass
class SearchTrace:
    steps: list[tuple[str, Move, float]] = field(default_factory=list)
    initial_bic: dict[str, float] = field(default_factory=dict)

    def record(self, phase: str, move: Move, bic_after: float) -> None:
        self.steps.append((phase, move, bic_after))

    def phase(self, name: str) -> list[tuple[Move, float]]:
        return [(m, b) for p, m, b in self.steps if p == name]

    def is_monotone(self) -> bool:
        """Strictly increasing BIC within each phase, starting from the phase's initial BIC."""
        for name, start in self.initial_bic.items():
            prev = start
            for _, b in self.phase(name):
                if not b > prev:
                    return False
                prev = b
        return True

    @property
    def final_bic(self) -> float:
        last = list(self.initial_bic)[-1]
        steps = self.phase(last)
        return steps[-1][1] if steps else self.initial_bic[last]

    def extend(self, other: "SearchTrace") -> None:
        self.steps.extend(other.steps)
        self.initial_bic.update(other.initial_bic)

    def to_dict(self) -> dict:
        return {
            "initial_bic": self.initial_bic,
            "steps": [
                {"phase": p, "move": m.to_dict(), "bic_after": b} for p, m, b in self.steps
            ],
        }


def _split(endpoints: tuple[float, ...], i: int) -> tuple[float, ...]:
    lo = 0.0 if i == 0 else endpoints[i - 1]
    hi = endpoints[i]
    return endpoints[:i] + ((lo + hi) / 2,) + endpoints[i:]


def _can_merge(endpoints: tuple[float, ...], i: int) -> bool:
    """Intervals ``i`` and ``i+1`` are the two halves of one interval."""
    if i + 1 >= len(endpoints):
        return False
    lo = 0.0 if i == 0 else endpoints[i - 1]
    return endpoints[i] == (lo + endpoints[i + 1]) / 2


def _can_truncate(endpoints: tuple[float, ...]) -> bool:
    return len(endpoints) >= 2 and endpoints[-1] == 2 * endpoints[-2]


def apply_move(
    model: Tgem, move: Move, horizons: Mapping[tuple[str, str], float | None] | None = None
) -> Tgem:
    """Structure-only copy of ``model`` with ``move`` applied."""
    edges = dict(model.edges)
    key = move.edge
    if move.parent not in model.labels or move.child not in model.labels:
        raise IllegalMoveError(f"unknown label in {move}")
    current = edges.get(key)
    if move.kind == "add":
        h = (horizons or {}).get(key)
        if current is not None:
            raise IllegalMoveError(f"edge {key} already exists")
        if h is None or not h > 0:
            raise IllegalMoveError(f"no default horizon for {key}")
        edges[key] = Timescale((h,))
        return model.with_edges(edges)
    if current is None:
        raise IllegalMoveError(f"edge {key} does not exist")
    ep = current.endpoints
    if move.kind == "split":
        if move.interval is None or not 0 <= move.interval < len(ep):
            raise IllegalMoveError(f"bad interval index in {move}")
        edges[key] = Timescale(_split(ep, move.interval))
    elif move.kind == "extend":
        edges[key] = Timescale(ep + (2 * ep[-1],))
    elif move.kind == "remove":
        if len(ep) != 1:
            raise IllegalMoveError(f"edge {key} has more than one interval")
        del edges[key]
    elif move.kind == "merge":
        if move.interval is None or not _can_merge(ep, move.interval):
            raise IllegalMoveError(f"intervals at {move.interval} of {key} are not a split pair")
        edges[key] = Timescale(ep[: move.interval] + ep[move.interval + 1 :])
    elif move.kind == "truncate":
        if not _can_truncate(ep):
            raise IllegalMoveError(f"last interval of {key} is not an extension")
        edges[key] = Timescale(ep[:-1])
    else:
        raise IllegalMoveError(f"unknown move kind {move.kind!r}")
    return model.with_edges(edges)


class LocalScoreCache:
    """Per-node BIC terms keyed by the node's incoming-edge structure."""

    def __init__(self, stream: EventStream):
        self.stream = stream
        self._cache: dict[tuple, float] = {}

    def __call__(self, model: Tgem, node: str) -> float:
        key = (node, model.structure_key(node))
        score = self._cache.get(key)
        if score is None:
            s = self.stream
            windows = [(s.times_of(p), lo, hi) for p, (lo, hi) in canonical_interval_order(model, node)]
            stats = stats_from_windows(s.times_of(node), windows, s.t_star, node)
            score = local_score(stats, s.t_star)
            self._cache[key] = score
        return score

    def total(self, model: Tgem) -> float:
        return sum(self(model, lab) for lab in model.labels)


@dataclass(frozen=True)
class StructuralCaps:
    max_indegree: Optional[int] = None
    max_intervals: Optional[int] = None

    def allows(self, model: Tgem, move: Move) -> bool:
        if self.max_indegree is not None and move.kind == "add":
            if len(model.parents(move.child)) + 1 > self.max_indegree:
                return False
        if self.max_intervals is not None and move.kind in FORWARD_KINDS:
            if model.n_intervals(move.child) + 1 > self.max_intervals:
                return False
        return True


def _with_delta(model: Tgem, move: Move, horizons, cache: LocalScoreCache) -> Move:
    new = apply_move(model, move, horizons)
    delta = cache(new, move.child) - cache(model, move.child)
    return Move(move.kind, move.parent, move.child, move.interval, delta)


def forward_neighborhood(
    model: Tgem,
    horizons: Mapping[tuple[str, str], float | None],
    cache: LocalScoreCache | None = None,
    caps: StructuralCaps = StructuralCaps(),
) -> list[Move]:
    moves = []
    for z in model.labels:
        for x in model.labels:
            if (z, x) not in model.edges and horizons.get((z, x)) is not None:
                moves.append(Move("add", z, x))
    for e in model.edge_list():
        for i in range(len(e.timescale)):
            moves.append(Move("split", e.parent, e.child, i))
        moves.append(Move("extend", e.parent, e.child))
    moves = [m for m in moves if caps.allows(model, m)]
    if cache is None:
        return moves
    return [_with_delta(model, m, horizons, cache) for m in moves]


def backward_neighborhood(model: Tgem, cache: LocalScoreCache | None = None) -> list[Move]:
    moves = []
    for e in model.edge_list():
        ep = e.timescale.endpoints
        if len(ep) == 1:
            moves.append(Move("remove", e.parent, e.child))
        for i in range(len(ep) - 1):
            if _can_merge(ep, i):
                moves.append(Move("merge", e.parent, e.child, i))
        if _can_truncate(ep):
            moves.append(Move("truncate", e.parent, e.child))
    if cache is None:
        return moves
    return [_with_delta(model, m, None, cache) for m in moves]


def _best(moves: list[Move], labels: tuple[str, ...]) -> Move | None:
    order = {lab: i for i, lab in enumerate(labels)}
    improving = [m for m in moves if m.score_delta > EPS]
    if not improving:
        return None
    return min(
        improving,
        key=lambda m: (
            -m.score_delta,
            _KIND_RANK[m.kind],
            order[m.parent],
            order[m.child],
            -1 if m.interval is None else m.interval,
        ),
    )


def _climb(phase, stream, model, neighbors, horizons, cache, trace, check):
    model = model.with_edges(model.edges)
    score = cache.total(model)
    trace.initial_bic[phase] = score
    for _ in range(MAX_ITERATIONS):
        move = _best(neighbors(model), model.labels)
        if move is None:
            return model
        model = apply_move(model, move, horizons)
        score += move.score_delta
        if check:
            fresh = LocalScoreCache(stream).total(model)
            if not math.isclose(fresh, score, rel_tol=1e-9, abs_tol=1e-6):
                raise AssertionError(f"cached score {score} != fresh {fresh}")
        trace.record(phase, move, score)
    raise SearchDidNotConverge(f"{phase} search exceeded {MAX_ITERATIONS} iterations")


def forward_search(
    stream: EventStream,
    horizons: Mapping[tuple[str, str], float | None],
    start: Tgem | None = None,
    caps: StructuralCaps = StructuralCaps(),
    cache: LocalScoreCache | None = None,
    check: bool = False,
) -> tuple[Tgem, SearchTrace]:
    """Steepest-ascent over add/split/extend until no move improves BIC by more than EPS."""
    cache = cache or LocalScoreCache(stream)
    start = start if start is not None else Tgem.empty(stream.vocabulary)
    trace = SearchTrace()
    model = _climb(
        "forward",
        stream,
        start,
        lambda m: forward_neighborhood(m, horizons, cache, caps),
        horizons,
        cache,
        trace,
        check,
    )
    return model, trace


def backward_search(
    stream: EventStream,
    model: Tgem,
    cache: LocalScoreCache | None = None,
    check: bool = False,
) -> tuple[Tgem, SearchTrace]:
    cache = cache or LocalScoreCache(stream)
    trace = SearchTrace()
    model = _climb(
        "backward", stream, model, lambda m: backward_neighborhood(m, cache), None, cache, trace, check
    )
    return model, trace


def learn(
    stream: EventStream,
    policy: HorizonPolicy = HorizonPolicy(),
    caps: StructuralCaps = StructuralCaps(),
    horizons: Mapping[tuple[str, str], float | None] | None = None,
    check: bool = False,
) -> tuple[Tgem, SearchTrace]:
    """Forward then backward search from the empty model; returns the MLE-fitted model."""
    if horizons is None:
        horizons = default_horizons(stream, policy)
    cache = LocalScoreCache(stream)
    model, trace = forward_search(stream, horizons, caps=caps, cache=cache, check=check)
    model, back = backward_search(stream, model, cache=cache, check=check)
    trace.extend(back)
    return fit_rates(stream, model), trace
