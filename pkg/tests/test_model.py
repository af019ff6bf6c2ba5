import json

import numpy as np
import pytest

from tgem.events import EventStream
from tgem.model import (
    ModelSchemaError,
    Timescale,
    Tgem,
    active_config,
    bits_to_value,
    canonical_interval_order,
    config_values,
    parse_model,
    serialize_model,
    validate_model,
    value_to_bits,
)


def test_canonical_order_node_c(four_node_model):
    order = canonical_interval_order(four_node_model, "C")
    assert order == [("A", (0.0, 10.0)), ("B", (0.0, 2.0)), ("D", (0.0, 4.0))]


def test_canonical_order_node_d(four_node_model):
    assert canonical_interval_order(four_node_model, "D") == [("C", (0.0, 3.0)), ("C", (3.0, 6.0))]
    assert four_node_model.n_configs("D") == 4


def test_parentless_single_config(four_node_model):
    assert canonical_interval_order(four_node_model, "B") == []
    assert four_node_model.n_configs("B") == 1


def test_config_bits_most_significant_first(four_node_model):
    # C occurred 4 time units ago: present only in (3, 6] -> "01"
    s = EventStream.from_events([(1.0, "C")], 10.0, four_node_model.labels)
    cfg = active_config(four_node_model, "D", s, 5.0)
    assert cfg.bits == (0, 1) and cfg.value == 1


def test_no_parent_events_all_zero(four_node_model):
    s = EventStream.from_events([], 10.0, four_node_model.labels)
    assert active_config(four_node_model, "C", s, 5.0).value == 0


def test_a_precedes_every_c(three_label_stream):
    m = Tgem(three_label_stream.vocabulary, {("A", "C"): Timescale((2.0,))})
    for t in three_label_stream.times_of("C"):
        assert active_config(m, "C", three_label_stream, t).bits == (1,)


def test_window_indicator_on_grid():
    m = Tgem(("Z", "X"), {("Z", "X"): Timescale((1.0, 3.0))})
    s = EventStream.from_events([(5.0, "Z")], 20.0)
    grid = np.linspace(0.001, 20, 20000)
    # second interval (1, 3] is the low bit
    got = config_values(m, "X", s, grid) & 1
    expected = ((grid > 6) & (grid <= 8)).astype(int)
    assert np.array_equal(got, expected)
    assert config_values(m, "X", s, [8.0])[0] & 1 == 1
    assert config_values(m, "X", s, [6.0])[0] & 1 == 0


def test_event_does_not_configure_itself():
    m = Tgem(("X",), {("X", "X"): Timescale((2.0,))})
    s = EventStream.from_events([(3.0, "X")], 10.0)
    assert active_config(m, "X", s, 3.0).value == 0
    assert active_config(m, "X", s, 3.0 + 1e-9).value == 1


@pytest.mark.parametrize("k", [0, 1, 3, 5])
def test_bit_encoding_bijection(k):
    values = [bits_to_value(value_to_bits(v, k)) for v in range(2**k)]
    assert values == list(range(2**k))
    assert bits_to_value((0, 1, 1)) == 3


def test_validate_examples(four_node_model, five_node_model):
    assert validate_model(four_node_model) == []
    assert validate_model(five_node_model) == []
    bad = Tgem(("A", "B"), {("A", "B"): Timescale((1.0, 2.0))}, {"A": [1.0], "B": [1.0, 1.0, 1.0]})
    assert any("rate arity mismatch" in d for d in validate_model(bad))
    ts = Tgem(("A",), {("A", "A"): Timescale((2.0, 2.0))}, {"A": [1.0] * 4})
    assert any("endpoints not strictly increasing" in d for d in validate_model(ts))


def test_round_trip_five_nodes(five_node_model):
    text = serialize_model(five_node_model)
    assert parse_model(text) == five_node_model
    d = json.loads(text)
    assert d["rates"]["2"]["00"] == 0.6
    assert d["rates"]["0"] == {"": 0.32}


def test_empty_edge_model():
    m = parse_model('{"labels": ["a", "b", "c"], "edges": [], "rates": {"a": {"": 1}, "b": {"": 2}, "c": {"": 3}}}')
    assert all(len(m.rates[lab]) == 1 for lab in m.labels)
    assert parse_model(serialize_model(m)) == m


@pytest.mark.parametrize(
    "doc, path",
    [
        ({"labels": ["a"], "edges": [], "extra": 1}, "$"),
        ({"labels": ["a"], "edges": [{"from": "a", "to": "b", "endpoints": [1]}]}, "$.edges[0].to"),
        ({"labels": ["a"], "edges": [{"from": "a", "to": "a", "endpoints": [2, 1]}]}, "$.edges[0].endpoints"),
        ({"labels": ["a"], "edges": [], "rates": {"a": {"": 1, "0": 2}}}, "$.rates.a"),
        ({"labels": ["a"], "edges": [{"from": "a", "to": "a", "endpoints": "x"}]}, "$.edges[0].endpoints"),
    ],
)
def test_schema_errors(doc, path):
    with pytest.raises(ModelSchemaError) as exc:
        parse_model(json.dumps(doc))
    assert exc.value.path == path
