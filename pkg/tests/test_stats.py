import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import grid_stats, random_stream, random_structure
from tgem.events import EventStream
from tgem.learning import apply_move, Move
from tgem.model import Timescale, Tgem
from tgem.stats import sufficient_stats


def _zx(z_times, x_times, t_star, endpoints=(2.0,)):
    events = [(t, "Z") for t in z_times] + [(t, "X") for t in x_times]
    s = EventStream.from_events(sorted(events), t_star, ["Z", "X"])
    m = Tgem(("Z", "X"), {("Z", "X"): Timescale(tuple(endpoints))})
    return s, m


def test_parentless_node():
    s = EventStream.from_events([(float(t), "A") for t in range(1, 11)], 100.0)
    st_ = sufficient_stats(s, Tgem.empty(("A",)), "A")
    assert st_.n.tolist() == [10] and st_.d.tolist() == [100.0]


def test_single_window():
    s, m = _zx([1.0], [2.0, 5.0], 10.0)
    st_ = sufficient_stats(s, m, "X")
    assert st_.n.tolist() == [1, 1]
    assert np.allclose(st_.d, [8.0, 2.0], atol=0)


def test_overlapping_windows_union():
    s, m = _zx([1.0, 2.0], [], 10.0)
    assert sufficient_stats(s, m, "X").d.tolist() == [7.0, 3.0]


def test_event_on_window_end_is_inside():
    s, m = _zx([1.0], [3.0], 10.0)
    assert sufficient_stats(s, m, "X").n.tolist() == [0, 1]


def test_windows_clipped_at_t_star():
    s, m = _zx([9.0], [], 10.0)
    assert sufficient_stats(s, m, "X").d.tolist() == [9.0, 1.0]


def test_unknown_node():
    s, m = _zx([1.0], [], 10.0)
    with pytest.raises(KeyError):
        sufficient_stats(s, m, "Q")


def test_matches_grid_oracle():
    rng = np.random.default_rng(7)
    labels = ("A", "B", "C")
    for _ in range(25):
        s = random_stream(rng, labels)
        m = random_structure(rng, labels)
        for node in labels:
            got = sufficient_stats(s, m, node)
            n, d = grid_stats(s, m, node)
            assert np.array_equal(got.n, n)
            assert np.allclose(got.d, d, atol=1e-2)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_partition_identities(seed):
    rng = np.random.default_rng(seed)
    labels = ("A", "B")
    s = random_stream(rng, labels)
    m = random_structure(rng, labels)
    for node in labels:
        got = sufficient_stats(s, m, node)
        assert np.isclose(got.d.sum(), s.t_star, rtol=1e-12)
        assert got.n.sum() == len(s.times_of(node))
        assert np.all(got.d >= 0)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_split_refines_configurations(seed):
    rng = np.random.default_rng(seed)
    labels = ("A", "B")
    s = random_stream(rng, labels)
    m = random_structure(rng, labels, max_intervals=3)
    if not m.edges:
        return
    (p, c), ts = sorted(m.edges.items())[int(rng.integers(len(m.edges)))]
    i = int(rng.integers(len(ts.endpoints)))
    finer = apply_move(m, Move("split", p, c, i), {})
    before = sufficient_stats(s, m, c)
    after = sufficient_stats(s, finer, c)
    # the new bit sits right after the split interval's position in canonical order
    from tgem.model import canonical_interval_order

    pos = [k for k, (q, _) in enumerate(canonical_interval_order(m, c)) if q == p][i]
    k_after = finer.n_intervals(c)
    shift = k_after - 1 - pos  # bit index (from the right) of the split interval
    vals = np.arange(1 << k_after)
    high = vals >> (shift + 1)
    low = vals & ((1 << (shift - 1)) - 1) if shift >= 1 else np.zeros_like(vals)
    merged = (((high << 1) | ((vals >> shift) & 1) | ((vals >> (shift - 1)) & 1)) << (shift - 1)) | low
    n = np.bincount(merged, weights=after.n, minlength=len(before.n))
    d = np.bincount(merged, weights=after.d, minlength=len(before.d))
    assert np.array_equal(n, before.n)
    assert np.allclose(d, before.d, atol=1e-9)
