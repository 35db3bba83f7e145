import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import all_images
from qcsense.encoding import best_binary_image
from qcsense.errors import InvalidArgumentError
from qcsense.metrics import fidelity, rll, rll_table, score, signal_entropy

signals = st.lists(st.floats(0, 1), min_size=1, max_size=6)
midpoints = st.floats(0.05, 0.95)


def brute_entropy(y, p):
    fs = [fidelity(y, z, p) for z in all_images(len(y))]
    return -sum(f * math.log(f) for f in fs if f > 0)


class TestFidelity:
    def test_binary_anchor(self):
        assert fidelity([1, 0], (1, 0)) == 1.0

    def test_gray_anchor(self):
        assert fidelity([2 / 3, 1 / 3], (1, 0)) == pytest.approx(9 / 16, abs=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            fidelity([0.2, 0.3], (1,))

    @given(signals, midpoints)
    def test_normalized(self, y, p):
        assert sum(fidelity(y, z, p) for z in all_images(len(y))) == pytest.approx(1.0, abs=1e-9)

    @given(st.lists(st.sampled_from([0.0, 1.0]), min_size=1, max_size=6), midpoints)
    def test_binary_best_image_is_one(self, y, p):
        assert fidelity(y, best_binary_image(y, p), p) == pytest.approx(1.0, abs=1e-15)


class TestEntropy:
    def test_binary_is_zero(self):
        assert signal_entropy([0, 1, 1]) == 0.0

    def test_half_pixel(self):
        assert signal_entropy([0.5]) == pytest.approx(math.log(2), abs=1e-12)

    @given(signals, midpoints)
    def test_pixel_sum_equals_brute_force(self, y, p):
        assert signal_entropy(y, p) == pytest.approx(brute_entropy(y, p), abs=1e-9)


class TestRll:
    def test_binary_best(self):
        assert rll([1, 0, 1], (1, 0, 1)) == 0.0

    def test_symmetric_pixel(self):
        assert rll([0.5], (0,)) == pytest.approx(0.0, abs=1e-12)
        assert rll([0.5], (1,)) == pytest.approx(0.0, abs=1e-12)

    def test_sentinel(self):
        assert rll([1, 0], (0, 0)) == -math.inf
        assert score([1, 0], (0, 0)).rll == -math.inf

    @given(signals, midpoints)
    def test_zero_mean(self, y, p):
        total = sum(
            fidelity(y, z, p) * rll(y, z, p) for z in all_images(len(y)) if fidelity(y, z, p) > 0
        )
        assert total == pytest.approx(0.0, abs=1e-9)

    @given(signals, midpoints)
    def test_best_image_is_argmax(self, y, p):
        best = rll(y, best_binary_image(y, p), p)
        assert all(rll(y, z, p) <= best + 1e-12 for z in all_images(len(y)))

    @given(signals, midpoints, st.data())
    def test_flip_degrades(self, y, p, data):
        z = list(best_binary_image(y, p))
        i = data.draw(st.integers(0, len(y) - 1))
        z[i] ^= 1
        base = rll(y, best_binary_image(y, p), p)
        flipped = rll(y, z, p)
        if y[i] in (0.0, 1.0):
            assert flipped == -math.inf
        elif abs(y[i] - p) > 1e-9:
            assert flipped < base

    @given(signals, midpoints)
    def test_score_consistent(self, y, p):
        s = score(y, best_binary_image(y, p), p)
        assert s.rll == math.log(s.fidelity) + s.entropy

    @given(signals, midpoints)
    def test_table_matches_pointwise(self, y, p):
        table = rll_table(y, p)
        for bits in all_images(len(y)):
            z = sum(b << q for q, b in enumerate(bits))
            want = rll(y, bits, p)
            if want == -math.inf:
                assert table[z] == -math.inf
            else:
                assert table[z] == pytest.approx(want, abs=1e-12)


def test_rll_table_vectorizes_over_index():
    table = rll_table(np.array([0.9, 0.1]))
    assert table[0b01] == max(table)
