import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tgem.events import (
    EventParseError,
    EventStream,
    inter_event_times,
    parse_events,
    serialize_events,
)


def test_header_and_vocabulary():
    s = parse_events("# t_star=25\ntime,label\n1,A\n2,B\n3.5,C\n")
    assert s.t_star == 25
    assert s.vocabulary == ("A", "B", "C")
    assert len(s) == 3


def test_empty_body_with_override():
    s = parse_events("# t_star=10\ntime,label\n", vocabulary_override=["A"])
    assert len(s) == 0
    assert s.vocabulary == ("A",)
    assert s.t_star == 10


def test_tied_timestamps_rejected_with_line():
    with pytest.raises(EventParseError, match="non-increasing timestamps at line 3") as exc:
        parse_events("time,label\n3.0,A\n3.0,B\n")
    assert exc.value.line == 3


@pytest.mark.parametrize(
    "text, message",
    [
        ("# t_star=5\ntime,label\n5,A\n", "event at or after t_star at line 3"),
        ("time,label\n1,A,extra\n", "malformed row at line 2"),
        ("time,label\nabc,A\n", "malformed time"),
        ("t,l\n1,A\n", "expected header"),
        ("time,label\n", "empty stream without t_star"),
    ],
)
def test_parse_errors(text, message):
    with pytest.raises(EventParseError, match=message):
        parse_events(text)


def test_t_star_defaults_to_last_event():
    s = parse_events("time,label\n1,A\n4,B\n")
    assert s.t_star == 4
    assert parse_events(serialize_events(s)) == s


def test_zero_events_serialize_to_header_only():
    s = EventStream.from_events([], 10.0, ["A", "B"])
    text = serialize_events(s)
    assert text.splitlines()[-1] == "time,label"
    assert parse_events(text) == s


def test_unused_labels_survive_round_trip():
    s = EventStream.from_events([(1.0, "B")], 3.0, ["A", "B", "C"])
    assert parse_events(serialize_events(s)).vocabulary == ("A", "B", "C")


def test_large_round_trip():
    rng = np.random.default_rng(0)
    times = np.cumsum(rng.exponential(0.01, 100_000)) + 1e-3
    labels = rng.choice(["a", "b", "c", "d"], size=len(times))
    s = EventStream.from_events(zip(times, labels), float(times[-1]) + 1.0, ["a", "b", "c", "d"])
    back = parse_events(serialize_events(s))
    assert back == s
    assert np.array_equal(back.times, s.times)


@st.composite
def streams(draw):
    labels = draw(st.lists(st.sampled_from("ABCDE"), min_size=1, max_size=4, unique=True))
    times = draw(
        st.lists(st.floats(1e-6, 1e4, allow_nan=False), max_size=40, unique=True)
    )
    times = sorted(times)
    t_star = draw(st.floats(1e4 + 1, 2e4))
    labs = [draw(st.sampled_from(labels)) for _ in times]
    return EventStream.from_events(zip(times, labs), t_star, labels)


@given(streams())
def test_round_trip_property(s):
    assert parse_events(serialize_events(s)) == s


def test_three_label_inter_event_times(three_label_stream):
    assert sorted(inter_event_times(three_label_stream, "C", "B")) == [2.5, 3.5]
    assert sorted(inter_event_times(three_label_stream, "A", "A")) == [4, 7.5, 9.5]
    assert sorted(inter_event_times(three_label_stream, "A", "C")) == [1, 1.5]


def test_absent_parent_gives_empty():
    s = EventStream.from_events([(1.0, "X")], 5.0, ["Z", "X"])
    assert len(inter_event_times(s, "Z", "X")) == 0


def test_unknown_label():
    s = EventStream.from_events([(1.0, "X")], 5.0)
    with pytest.raises(KeyError):
        inter_event_times(s, "Q", "X")


@settings(max_examples=60)
@given(streams())
def test_self_inter_event_properties(s):
    for lab in s.vocabulary:
        tt = inter_event_times(s, lab, lab)
        occ = s.times_of(lab)
        if len(occ):
            assert len(tt) == len(occ)
            assert np.isclose(tt.sum(), s.t_star - occ[0])
        for z in s.vocabulary:
            assert np.all(inter_event_times(s, z, lab) > 0)
