"""Shape preservation of the monotone cubic interpolant."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pmetraj.interp import MonotoneCubic


class TestBasics:
    def test_reproduces_data(self):
        x = np.array([0.0, 1.0, 2.5, 3.0])
        y = np.array([1.0, 2.0, 2.0, 5.0])
        c = MonotoneCubic(x, y)
        np.testing.assert_allclose(c(x), y, atol=1e-14)

    def test_constant_data_reproduced_exactly(self):
        x = np.linspace(0.0, 1.0, 7)
        c = MonotoneCubic(x, np.full(7, 2.5))
        q = np.linspace(0.0, 1.0, 101)
        np.testing.assert_allclose(c(q), 2.5, atol=1e-14)

    def test_linear_data_reproduced(self):
        x = np.linspace(0.0, 2.0, 9)
        c = MonotoneCubic(x, 3.0 * x - 1.0)
        q = np.linspace(0.0, 2.0, 101)
        np.testing.assert_allclose(c(q), 3.0 * q - 1.0, atol=1e-12)

    def test_scalar_query(self):
        c = MonotoneCubic([0.0, 1.0], [0.0, 2.0])
        assert isinstance(c(0.5), float)
        assert c(0.5) == pytest.approx(1.0)

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            MonotoneCubic([0.0, 0.0, 1.0], [1.0, 2.0, 3.0])
        with pytest.raises(ValueError):
            MonotoneCubic([0.0], [1.0])


class TestNoOvershoot:
    def test_monotone_segments_random(self):
        rng = np.random.default_rng(17)
        for _ in range(40):
            n = rng.integers(3, 12)
            x = np.sort(rng.uniform(0.0, 10.0, n))
            while np.any(np.diff(x) < 1e-6):
                x = np.sort(rng.uniform(0.0, 10.0, n))
            y = np.cumsum(rng.uniform(0.0, 2.0, n))  # nondecreasing data
            c = MonotoneCubic(x, y)
            for j in range(n - 1):
                q = np.linspace(x[j], x[j + 1], 33)
                vals = c(q)
                lo, hi = min(y[j], y[j + 1]), max(y[j], y[j + 1])
                assert np.all(vals >= lo - 1e-12)
                assert np.all(vals <= hi + 1e-12)

    @settings(max_examples=80, deadline=None)
    @given(st.lists(st.floats(min_value=-50.0, max_value=50.0), min_size=3, max_size=10),
           st.integers(min_value=0, max_value=2 ** 31))
    def test_values_stay_in_local_range(self, raw, seed):
        rng = np.random.default_rng(seed)
        n = len(raw)
        x = np.cumsum(rng.uniform(0.1, 1.0, n))
        y = np.array(raw)
        c = MonotoneCubic(x, y)
        for j in range(n - 1):
            q = np.linspace(x[j], x[j + 1], 17)
            vals = c(q)
            lo, hi = min(y[j], y[j + 1]), max(y[j], y[j + 1])
            span = max(hi - lo, 1.0)
            assert np.all(vals >= lo - 1e-9 * span)
            assert np.all(vals <= hi + 1e-9 * span)

    def test_nonnegative_data_stays_nonnegative(self):
        x = np.array([0.0, 1.0, 1.5, 2.0, 3.0])
        y = np.array([0.0, 2.0, 0.0, 1.0, 0.0])
        c = MonotoneCubic(x, y)
        q = np.linspace(0.0, 3.0, 301)
        assert np.all(c(q) >= -1e-12)
