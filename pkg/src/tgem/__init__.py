"""Learning, sampling and comparing timescale graphical event models."""

from .evaluation import (
    edge_f1,
    elementary_distance_refined,
    elementary_distance_set,
    match_endpoints,
    model_distance,
)
from .events import EventStream, TimedEvent, inter_event_times, parse_events, serialize_events
from .generation import GenConfig, random_tgem
from .horizon import HorizonPolicy, default_horizons, proximal_horizon, quantile_horizon
from .learning import StructuralCaps, backward_search, forward_search, learn
from .model import Timescale, Tgem, parse_model, serialize_model, validate_model
from .sampling import condensation, sample
from .scoring import bic, log_likelihood, mle_rates, node_log_likelihood
from .stats import SufficientStats, sufficient_stats

__version__ = "0.1.0"
