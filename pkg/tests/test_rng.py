import numpy as np
import pytest

from polyvol import RngStream
from polyvol.rng import as_stream


def test_same_seed_same_draws():
    a, b = RngStream(42), RngStream(42)
    np.testing.assert_array_equal(a.uniform(10), b.uniform(10))
    np.testing.assert_array_equal(a.normal(5), b.normal(5))
    np.testing.assert_array_equal(a.integers(7, size=20), b.integers(7, size=20))


def test_draw_ranges():
    r = RngStream(1)
    u = r.uniform(10_000)
    assert u.min() >= 0.0 and u.max() < 1.0
    k = r.integers(5, size=10_000)
    assert set(np.unique(k)) == set(range(5))


def test_batched_matches_scalar():
    a, b = RngStream(5), RngStream(5)
    batch = a.uniform(6)
    single = [b.uniform() for _ in range(6)]
    np.testing.assert_array_equal(batch, single)


def test_substreams_independent_and_reproducible():
    m = RngStream(3)
    s0, s1 = m.substream(0), m.substream(1)
    assert not np.array_equal(s0.uniform(4), s1.uniform(4))
    np.testing.assert_array_equal(RngStream(3).substream(1).uniform(4), RngStream(3, (1,)).uniform(4))


def test_seed_range():
    with pytest.raises(ValueError):
        RngStream(-1)
    with pytest.raises(ValueError):
        RngStream(2 ** 64)
    assert RngStream(2 ** 64 - 1).seed == 2 ** 64 - 1


def test_entropy_seed_echoed():
    r = RngStream()
    assert 0 <= r.seed < 2 ** 64


def test_as_stream():
    r = RngStream(1)
    assert as_stream(r) is r
    assert as_stream(4).seed == 4
