"""Data-driven default horizons for candidate edges."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .events import EventStream, inter_event_times
from .scoring import node_log_likelihood
from .stats import stats_from_windows


@dataclass(frozen=True)
class HorizonPolicy:
    kind: str = "proximal"
    q: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("proximal", "quantile"):
            raise ValueError(f"unknown horizon policy {self.kind!r}")
        if self.kind == "quantile":
            if self.q is None or not 0 < self.q < 1:
                raise ValueError("quantile policy needs 0 < q < 1")
        elif self.q is not None:
            raise ValueError("q only applies to the quantile policy")

    @property
    def name(self) -> str:
        return "proximal" if self.kind == "proximal" else f"q={self.q:g}"

    @classmethod
    def from_name(cls, name: str) -> "HorizonPolicy":
        if name == "proximal":
            return cls("proximal")
        if name.startswith("q="):
            return cls("quantile", float(name[2:]))
        raise ValueError(f"unknown heuristic {name!r}")


def quantile_horizon(stream: EventStream, z: str, x: str, q: float) -> float | None:
    """Nearest-rank quantile of the ``z -> x`` inter-event times."""
    if not 0 < q < 1:
        raise ValueError("q must lie in (0, 1)")
    times = np.sort(inter_event_times(stream, z, x))
    if len(times) == 0:
        return None
    rank = max(1, math.ceil(q * len(times)))
    return float(times[rank - 1])


def proximal_objective(stream: EventStream, z: str, x: str, h: float) -> float:
    """Single-edge log-likelihood of ``x`` under ``z -> x`` with timescale ``(0, h]``."""
    stats = stats_from_windows(stream.times_of(x), [(stream.times_of(z), 0.0, h)], stream.t_star)
    return node_log_likelihood(stats)


def reach_distances(stream: EventStream, z: str, x: str) -> np.ndarray:
    """Smallest horizons whose window ``(t_z, t_z + h]`` covers each ``x`` occurrence.

    These equal the ``z -> x`` inter-event times up to rounding: each value is
    the least float ``h`` with ``t_z + h >= t_x``, so any smaller horizon leaves
    that occurrence uncovered. For a self-pair the tail to ``t_star`` is excluded.
    """
    tz = stream.times_of(z)
    tx = stream.times_of(x)
    if len(tz) == 0 or len(tx) == 0:
        return np.empty(0)
    idx = np.searchsorted(tz, tx, side="left") - 1
    keep = idx >= 0
    src, dst = tz[idx[keep]], tx[keep]
    return _least_cover(src, dst)


def _least_cover(src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    # positive floats order like their bit patterns, so bisect on those
    good = dst - src
    while np.any(src + good < dst):
        good = np.where(src + good < dst, np.nextafter(good, np.inf) + np.spacing(dst), good)
    bad = np.maximum(good - 2 * np.spacing(dst), 0.0)
    while np.any(covered := (bad > 0) & (src + bad >= dst)):
        bad = np.where(covered, np.maximum(bad - 2 * np.spacing(dst), 0.0), bad)
    hi = good.view(np.int64)
    lo = bad.view(np.int64)
    while np.any(hi - lo > 1):
        mid = lo + (hi - lo) // 2
        ok = src + mid.view(np.float64) >= dst
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid)
    return hi.view(np.float64)


def proximal_candidates(stream: EventStream, z: str, x: str) -> np.ndarray:
    if len(stream.times_of(z)) == 0:
        return np.empty(0)
    tzz = inter_event_times(stream, z, z)
    cands = np.unique(reach_distances(stream, z, x))
    if len(tzz):
        cands = np.union1d(cands, [tzz.max()])
    return cands


def proximal_objectives(
    stream: EventStream, z: str, x: str, hs: np.ndarray, left_limit: bool = False
) -> np.ndarray:
    """Vectorized :func:`proximal_objective` over many horizons.

    For the single window ``(0, h]`` the occupied time is the sum over parent
    occurrences of ``min(h, gap)``, with ``gap`` the distance to the next
    parent occurrence (or to ``t_star``), and the count in the active state is
    the number of ``z -> x`` inter-event times ``<= h``. With ``left_limit``
    the value is the limit as the horizon approaches each ``h`` from below.
    """
    hs = np.asarray(hs, dtype=float)
    tz = stream.times_of(z)
    tx = stream.times_of(x)
    t_star = stream.t_star
    n = len(tx)
    if len(tz) == 0 or n == 0:
        return np.zeros(hs.shape)
    gaps = np.sort(np.diff(np.append(tz, t_star)))
    csum = np.concatenate([[0.0], np.cumsum(gaps)])
    below = np.searchsorted(gaps, hs, side="left")
    d1 = csum[below] + hs * (len(gaps) - below)
    d0 = t_star - d1
    tzx = np.sort(reach_distances(stream, z, x))
    n1 = np.searchsorted(tzx, hs, side="left" if left_limit else "right").astype(float)
    n0 = n - n1
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = np.where(n1 > 0, n1 * np.log(n1 / d1), 0.0)
        t0 = np.where(n0 > 0, n0 * np.log(n0 / d0), 0.0)
    return t1 + t0 - n


def below(c: float, floor: float) -> float:
    """The largest horizon under ``c``, which excludes every occurrence at reach ``c``.

    Never drops below the next smaller candidate ``floor``.
    """
    return max(float(np.nextafter(c, 0.0)), floor)


def proximal_search(stream: EventStream, z: str, x: str) -> tuple[float, float] | None:
    """Best ``(horizon, objective)`` over the candidates and their left limits.

    Between consecutive candidates the counts are fixed and the objective is
    convex in the occupied time, so its supremum is attained at a candidate
    or approached from the left of one. A left limit is only chosen when it
    strictly beats every candidate; ties go to the smaller horizon.
    """
    stream.times_of(x)  # unknown labels raise here
    cands = proximal_candidates(stream, z, x)
    if len(cands) == 0:
        return None
    at = proximal_objectives(stream, z, x, cands)
    before = proximal_objectives(stream, z, x, cands, left_limit=True)
    i = int(np.argmax(at))
    j = int(np.argmax(before))
    if before[j] > at[i]:
        floor = cands[j - 1] if j > 0 else 0.0
        return below(float(cands[j]), float(floor)), float(before[j])
    return float(cands[i]), float(at[i])


def proximal_horizon(stream: EventStream, z: str, x: str) -> float | None:
    """Horizon maximizing the single-edge likelihood of ``x`` given parent ``z``."""
    best = proximal_search(stream, z, x)
    return None if best is None else best[0]


def default_horizons(
    stream: EventStream, policy: HorizonPolicy
) -> dict[tuple[str, str], float | None]:
    out = {}
    for z in stream.vocabulary:
        for x in stream.vocabulary:
            if policy.kind == "proximal":
                out[(z, x)] = proximal_horizon(stream, z, x)
            else:
                out[(z, x)] = quantile_horizon(stream, z, x, policy.q)
    return out
