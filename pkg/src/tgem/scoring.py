"""Maximum-likelihood rates, log-likelihood and BIC (natural log throughout)."""

from __future__ import annotations

import math
from typing import Mapping

import numpy as np

from .events import EventStream
from .model import Tgem
from .stats import SufficientStats, sufficient_stats


class InconsistentStatsError(ValueError):
    pass


def _check(stats: SufficientStats) -> None:
    if np.any((stats.n > 0) & (stats.d <= 0)):
        raise InconsistentStatsError(f"node {stats.node}: events in a configuration with zero duration")


def mle_rates(stats: SufficientStats) -> np.ndarray:
    _check(stats)
    rates = np.zeros(len(stats.n))
    hit = stats.n > 0
    rates[hit] = stats.n[hit] / stats.d[hit]
    return rates


def node_log_likelihood(stats: SufficientStats) -> float:
    """Log-likelihood contribution of one node at its MLE rates."""
    _check(stats)
    hit = stats.n > 0
    n = stats.n[hit].astype(float)
    return float(np.sum(n * np.log(n / stats.d[hit])) - n.sum())


def penalty(model: Tgem, t_star: float) -> float:
    return sum(model.n_configs(lab) for lab in model.labels) * math.log(t_star)


def local_score(stats: SufficientStats, t_star: float) -> float:
    """Per-node BIC term; the model BIC is the sum over nodes."""
    return node_log_likelihood(stats) - len(stats.n) * math.log(t_star)


def log_likelihood(
    stream: EventStream, model: Tgem, rates: Mapping[str, np.ndarray] | None = None
) -> float:
    """Log-likelihood of ``stream``; MLE rates are used when ``rates`` is None."""
    total = 0.0
    for lab in model.labels:
        stats = sufficient_stats(stream, model, lab)
        if rates is None:
            total += node_log_likelihood(stats)
            continue
        lam = np.asarray(rates[lab], dtype=float)
        if lam.shape != stats.n.shape:
            raise ValueError(
                f"node {lab}: rate arity mismatch (expected {len(stats.n)}, got {lam.size})"
            )
        if np.any((stats.n > 0) & (lam <= 0)):
            return -math.inf
        hit = stats.n > 0
        total += float(np.sum(stats.n[hit] * np.log(lam[hit])) - np.sum(lam * stats.d))
    return total


def bic(stream: EventStream, model: Tgem) -> float:
    """BIC at the MLE; higher is better. For ``t_star <= 1`` the penalty is non-positive."""
    return log_likelihood(stream, model) - penalty(model, stream.t_star)


def fit_rates(stream: EventStream, model: Tgem) -> Tgem:
    """Copy of ``model`` carrying MLE rates for every node."""
    return model.with_rates(
        {lab: mle_rates(sufficient_stats(stream, model, lab)) for lab in model.labels}
    )
