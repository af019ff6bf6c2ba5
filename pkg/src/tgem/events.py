"""Timestamped event streams: construction, CSV wire format, inter-event times."""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np


class TimedEvent(NamedTuple):
    time: float
    label: str


class EventParseError(ValueError):
    """Malformed event CSV. ``line`` is the 1-based physical line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"{message} at line {line}"
        super().__init__(message)


@dataclass(frozen=True, eq=False)
class EventStream:
    """Strictly time-ordered labelled events on ``(0, t_star]``.

    Events are stored column-wise: ``times`` (float64) and ``codes`` (indices
    into ``vocabulary``). Treat instances as immutable.
    """

    times: np.ndarray
    codes: np.ndarray
    vocabulary: tuple[str, ...]
    t_star: float
    _by_label: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        codes = np.asarray(self.codes, dtype=np.int64)
        vocab = tuple(self.vocabulary)
        if times.ndim != 1 or times.shape != codes.shape:
            raise ValueError("times and codes must be 1-d arrays of equal length")
        if len(set(vocab)) != len(vocab):
            raise ValueError("vocabulary contains duplicate labels")
        if not np.isfinite(self.t_star) or self.t_star <= 0:
            raise ValueError(f"t_star must be positive and finite, got {self.t_star}")
        if len(times):
            if not np.all(np.isfinite(times)) or times[0] <= 0:
                raise ValueError("event times must be finite and > 0")
            if np.any(np.diff(times) <= 0):
                raise ValueError("event times must be strictly increasing")
            if times[-1] > self.t_star:
                raise ValueError("event after t_star")
            if codes.min() < 0 or codes.max() >= len(vocab):
                raise ValueError("event code outside vocabulary")
        times.setflags(write=False)
        codes.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "codes", codes)
        object.__setattr__(self, "vocabulary", vocab)
        object.__setattr__(self, "t_star", float(self.t_star))
        by_label = {}
        for i, lab in enumerate(vocab):
            arr = times[codes == i]
            arr.setflags(write=False)
            by_label[lab] = arr
        object.__setattr__(self, "_by_label", by_label)

    @classmethod
    def from_events(
        cls,
        events: Iterable[tuple[float, str]],
        t_star: float,
        vocabulary: Sequence[str] | None = None,
    ) -> "EventStream":
        events = list(events)
        vocab = list(vocabulary) if vocabulary is not None else []
        seen = set(vocab)
        for _, lab in events:
            if lab not in seen:
                seen.add(lab)
                vocab.append(lab)
        index = {lab: i for i, lab in enumerate(vocab)}
        times = np.array([float(t) for t, _ in events], dtype=float)
        codes = np.array([index[lab] for _, lab in events], dtype=np.int64)
        return cls(times, codes, tuple(vocab), t_star)

    def __len__(self) -> int:
        return len(self.times)

    def __eq__(self, other) -> bool:
        if not isinstance(other, EventStream):
            return NotImplemented
        return (
            self.vocabulary == other.vocabulary
            and self.t_star == other.t_star
            and np.array_equal(self.times, other.times)
            and np.array_equal(self.codes, other.codes)
        )

    @property
    def events(self) -> list[TimedEvent]:
        return [TimedEvent(float(t), self.vocabulary[c]) for t, c in zip(self.times, self.codes)]

    def times_of(self, label: str) -> np.ndarray:
        """Sorted occurrence times of ``label``."""
        try:
            return self._by_label[label]
        except KeyError:
            raise KeyError(f"unknown label {label!r}") from None

    def counts(self) -> dict[str, int]:
        return {lab: len(arr) for lab, arr in self._by_label.items()}


def parse_events(text: str, vocabulary_override: Sequence[str] | None = None) -> EventStream:
    """Parse the event CSV format.

    Optional leading comment lines ``# t_star=<x>`` and ``# labels=A,B,...``,
    then a ``time,label`` header and one event per row. Without a ``t_star``
    header the observation end defaults to the last event time.
    """
    t_star = None
    header_labels: list[str] = []
    rows: list[tuple[float, str]] = []
    seen_header = False
    last_time = 0.0
    for lineno, raw in enumerate(io.StringIO(text), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if seen_header:
                raise EventParseError("comment after header", lineno)
            key, _, value = line[1:].strip().partition("=")
            key = key.strip()
            if key == "t_star":
                try:
                    t_star = float(value)
                except ValueError:
                    raise EventParseError(f"bad t_star value {value!r}", lineno) from None
                if not np.isfinite(t_star) or t_star <= 0:
                    raise EventParseError("t_star must be positive", lineno)
            elif key == "labels":
                header_labels = [tok.strip() for tok in value.split(",") if tok.strip()]
            continue
        if not seen_header:
            if [c.strip() for c in line.split(",")] != ["time", "label"]:
                raise EventParseError("expected header 'time,label'", lineno)
            seen_header = True
            continue
        parts = line.split(",")
        if len(parts) != 2 or not parts[1].strip():
            raise EventParseError("malformed row", lineno)
        try:
            t = float(parts[0])
        except ValueError:
            raise EventParseError(f"malformed time {parts[0]!r}", lineno) from None
        if not np.isfinite(t) or t <= 0:
            raise EventParseError("event time must be positive", lineno)
        if t <= last_time:
            raise EventParseError("non-increasing timestamps", lineno)
        if t_star is not None and t >= t_star:
            raise EventParseError("event at or after t_star", lineno)
        last_time = t
        rows.append((t, parts[1].strip()))
    if t_star is None:
        if not rows:
            raise EventParseError("empty stream without t_star header")
        t_star = rows[-1][0]
    vocab = list(header_labels)
    for lab in vocabulary_override or ():
        if lab not in vocab:
            vocab.append(lab)
    return EventStream.from_events(rows, t_star, vocab)


def serialize_events(stream: EventStream) -> str:
    out = io.StringIO()
    # A stream whose last event sits exactly on t_star came from the
    # no-header fallback; omit the header so parsing reproduces it.
    if len(stream) == 0 or stream.times[-1] < stream.t_star:
        out.write(f"# t_star={stream.t_star!r}\n")
    out.write(f"# labels={','.join(stream.vocabulary)}\n")
    out.write("time,label\n")
    vocab = stream.vocabulary
    for t, c in zip(stream.times.tolist(), stream.codes.tolist()):
        out.write(f"{t!r},{vocab[c]}\n")
    return out.getvalue()


def read_events(path) -> EventStream:
    with open(path) as fh:
        return parse_events(fh.read())


def write_events(stream: EventStream, path) -> None:
    with open(path, "w") as fh:
        fh.write(serialize_events(stream))


def inter_event_times(stream: EventStream, z: str, x: str) -> np.ndarray:
    """Distances from each ``x`` occurrence back to the latest strictly earlier ``z``.

    ``x`` occurrences with no earlier ``z`` are skipped. For ``z == x`` these
    are the inter-arrival gaps plus the tail from the last occurrence to
    ``t_star`` (dropped if it is zero).
    """
    tz = stream.times_of(z)
    tx = stream.times_of(x)
    if z == x:
        if len(tx) == 0:
            return np.empty(0)
        gaps = np.diff(tx)
        tail = stream.t_star - tx[-1]
        return np.append(gaps, tail) if tail > 0 else gaps
    if len(tz) == 0 or len(tx) == 0:
        return np.empty(0)
    idx = np.searchsorted(tz, tx, side="left") - 1
    keep = idx >= 0
    return tx[keep] - tz[idx[keep]]
