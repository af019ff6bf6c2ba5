"""Timescale graphical event models: structure, configuration indexing, JSON."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Sequence

import jsonschema
import numpy as np

from .events import EventStream


@dataclass(frozen=True)
class Timescale:
    """Endpoint vector ``[a1 < ... < ah]`` standing for ``(0,a1], (a1,a2], ...``."""

    endpoints: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "endpoints", tuple(float(a) for a in self.endpoints))

    @property
    def horizon(self) -> float:
        return self.endpoints[-1]

    @property
    def intervals(self) -> list[tuple[float, float]]:
        lows = (0.0,) + self.endpoints[:-1]
        return list(zip(lows, self.endpoints))

    def __len__(self) -> int:
        return len(self.endpoints)

    def problems(self) -> list[str]:
        e = self.endpoints
        out = []
        if not e:
            out.append("timescale has no endpoints")
        if any(not math.isfinite(a) or a <= 0 for a in e):
            out.append("endpoints must be positive and finite")
        if any(b <= a for a, b in zip(e, e[1:])):
            out.append("endpoints not strictly increasing")
        return out


class Edge(NamedTuple):
    parent: str
    child: str
    timescale: Timescale


class ConfigIndex(NamedTuple):
    bits: tuple[int, ...]
    value: int

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "ConfigIndex":
        bits = tuple(int(b) for b in bits)
        return cls(bits, bits_to_value(bits))

    @property
    def key(self) -> str:
        return "".join(map(str, self.bits))


def bits_to_value(bits: Sequence[int]) -> int:
    value = 0
    for b in bits:
        value = (value << 1) | int(b)
    return value


def value_to_bits(value: int, k: int) -> tuple[int, ...]:
    return tuple((value >> (k - 1 - i)) & 1 for i in range(k))


@dataclass(frozen=True, eq=False)
class Tgem:
    """A TGEM over ``labels``.

    ``edges`` maps ``(parent, child)`` to a :class:`Timescale`. ``rates`` maps
    each label to an array of ``2**k`` rates indexed by configuration value;
    it may be empty for a structure-only model.
    """

    labels: tuple[str, ...]
    edges: Mapping[tuple[str, str], Timescale] = field(default_factory=dict)
    rates: Mapping[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        edges = {}
        for key, ts in dict(self.edges).items():
            edges[tuple(key)] = ts if isinstance(ts, Timescale) else Timescale(tuple(ts))
        object.__setattr__(self, "edges", edges)
        object.__setattr__(
            self, "rates", {lab: np.asarray(r, dtype=float) for lab, r in dict(self.rates).items()}
        )

    @classmethod
    def empty(cls, labels: Iterable[str]) -> "Tgem":
        return cls(tuple(labels))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Tgem):
            return NotImplemented
        if self.labels != other.labels or self.edges != other.edges:
            return False
        if self.rates.keys() != other.rates.keys():
            return False
        return all(np.array_equal(self.rates[k], other.rates[k]) for k in self.rates)

    def edge_list(self) -> list[Edge]:
        order = {lab: i for i, lab in enumerate(self.labels)}
        keys = sorted(self.edges, key=lambda e: (order[e[0]], order[e[1]]))
        return [Edge(p, c, self.edges[(p, c)]) for p, c in keys]

    def parents(self, node: str) -> list[str]:
        return [p for p, _ in canonical_parent_timescales(self, node)]

    def n_intervals(self, node: str) -> int:
        return sum(len(ts) for (_, c), ts in self.edges.items() if c == node)

    def n_configs(self, node: str) -> int:
        return 2 ** self.n_intervals(node)

    def with_edges(self, edges: Mapping[tuple[str, str], Timescale]) -> "Tgem":
        """Structure-only copy with a new edge map (rates dropped)."""
        return Tgem(self.labels, edges)

    def with_rates(self, rates: Mapping[str, np.ndarray]) -> "Tgem":
        return Tgem(self.labels, self.edges, rates)

    def structure_key(self, node: str) -> tuple:
        """Hashable description of the incoming edges of ``node``."""
        return tuple((p, ts.endpoints) for p, ts in canonical_parent_timescales(self, node))


def canonical_parent_timescales(model: Tgem, node: str) -> list[tuple[str, Timescale]]:
    order = {lab: i for i, lab in enumerate(model.labels)}
    incoming = [(p, ts) for (p, c), ts in model.edges.items() if c == node]
    return sorted(incoming, key=lambda item: order[item[0]])


def canonical_interval_order(model: Tgem, node: str) -> list[tuple[str, tuple[float, float]]]:
    """Bit order for ``node``: parents in label order, then intervals ascending."""
    if node not in model.labels:
        raise KeyError(f"unknown label {node!r}")
    return [
        (p, iv) for p, ts in canonical_parent_timescales(model, node) for iv in ts.intervals
    ]


def window_bits(parent_times: np.ndarray, lo: float, hi: float, t: np.ndarray) -> np.ndarray:
    """1 where some parent occurrence ``s`` satisfies ``s + lo < t <= s + hi``."""
    starts = parent_times + lo
    ends = parent_times + hi
    n_started = np.searchsorted(starts, t, side="left")
    n_ended = np.searchsorted(ends, t, side="left")
    return (n_started > n_ended).astype(np.int64)


def config_values(model: Tgem, node: str, stream: EventStream, t) -> np.ndarray:
    """Configuration value of ``node`` at each time in ``t`` (vectorized)."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    value = np.zeros(t.shape, dtype=np.int64)
    for parent, (lo, hi) in canonical_interval_order(model, node):
        value = (value << 1) | window_bits(stream.times_of(parent), lo, hi, t)
    return value


def active_config(model: Tgem, node: str, stream: EventStream, t: float) -> ConfigIndex:
    k = model.n_intervals(node)
    value = int(config_values(model, node, stream, [t])[0])
    return ConfigIndex(value_to_bits(value, k), value)


def validate_model(model: Tgem, require_rates: bool = True) -> list[str]:
    """Human-readable invariant violations; empty when the model is valid."""
    out = []
    labels = set(model.labels)
    if len(labels) != len(model.labels):
        out.append("duplicate labels")
    for (p, c), ts in model.edges.items():
        name = f"edge {p}->{c}"
        if p not in labels or c not in labels:
            out.append(f"{name}: label not in vocabulary")
        for msg in ts.problems():
            out.append(f"{name}: {msg}")
    for lab in model.rates:
        if lab not in labels:
            out.append(f"rates for unknown node {lab}")
    for lab in model.labels:
        if lab not in model.rates:
            if require_rates:
                out.append(f"node {lab}: missing rates")
            continue
        r = model.rates[lab]
        expected = model.n_configs(lab)
        if r.ndim != 1 or len(r) != expected:
            out.append(f"node {lab}: rate arity mismatch (expected {expected}, got {r.size})")
        elif np.any(~np.isfinite(r)) or np.any(r < 0):
            out.append(f"node {lab}: rates must be finite and non-negative")
    return out


MODEL_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["labels", "edges"],
    "properties": {
        "labels": {"type": "array", "items": {"type": "string"}},
        "edges": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["from", "to", "endpoints"],
                "properties": {
                    "from": {"type": "string"},
                    "to": {"type": "string"},
                    "endpoints": {"type": "array", "minItems": 1, "items": {"type": "number"}},
                },
            },
        },
        "rates": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "propertyNames": {"pattern": "^[01]*$"},
                "additionalProperties": {"type": "number", "minimum": 0},
            },
        },
    },
}


class ModelSchemaError(ValueError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


def model_to_dict(model: Tgem) -> dict:
    d = {
        "labels": list(model.labels),
        "edges": [
            {"from": e.parent, "to": e.child, "endpoints": list(e.timescale.endpoints)}
            for e in model.edge_list()
        ],
    }
    if model.rates:
        rates = {}
        for lab in model.labels:
            if lab not in model.rates:
                continue
            k = model.n_intervals(lab)
            rates[lab] = {
                "".join(map(str, value_to_bits(j, k))): float(r)
                for j, r in enumerate(model.rates[lab])
            }
        d["rates"] = rates
    return d


def model_from_dict(d: dict) -> Tgem:
    try:
        jsonschema.validate(d, MODEL_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ModelSchemaError(exc.json_path, exc.message) from None
    labels = d["labels"]
    if len(set(labels)) != len(labels):
        raise ModelSchemaError("$.labels", "duplicate labels")
    edges = {}
    for i, e in enumerate(d["edges"]):
        path = f"$.edges[{i}]"
        for end in ("from", "to"):
            if e[end] not in labels:
                raise ModelSchemaError(f"{path}.{end}", f"unknown label {e[end]!r}")
        key = (e["from"], e["to"])
        if key in edges:
            raise ModelSchemaError(path, "duplicate edge")
        ts = Timescale(tuple(e["endpoints"]))
        if ts.problems():
            raise ModelSchemaError(f"{path}.endpoints", "; ".join(ts.problems()))
        edges[key] = ts
    model = Tgem(tuple(labels), edges)
    rates = {}
    for lab, table in d.get("rates", {}).items():
        path = f"$.rates.{lab}"
        if lab not in labels:
            raise ModelSchemaError(path, f"unknown label {lab!r}")
        k = model.n_intervals(lab)
        if len(table) != 2**k:
            raise ModelSchemaError(path, f"expected {2 ** k} rates, got {len(table)}")
        arr = np.empty(2**k)
        filled = np.zeros(2**k, dtype=bool)
        for key, val in table.items():
            if len(key) != k:
                raise ModelSchemaError(f"{path}.{key or '<empty>'}", f"bitstring must have length {k}")
            j = int(key, 2) if k else 0
            arr[j] = val
            filled[j] = True
        if not filled.all():
            raise ModelSchemaError(path, "missing configurations")
        rates[lab] = arr
    return model.with_rates(rates)


def serialize_model(model: Tgem) -> str:
    return json.dumps(model_to_dict(model), indent=2)


def parse_model(text: str) -> Tgem:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelSchemaError("$", f"invalid JSON: {exc}") from None
    return model_from_dict(d)


def read_model(path) -> Tgem:
    with open(path) as fh:
        return parse_model(fh.read())


def write_model(model: Tgem, path) -> None:
    with open(path, "w") as fh:
        fh.write(serialize_model(model) + "\n")
