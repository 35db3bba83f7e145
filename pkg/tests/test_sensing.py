import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qcsense.errors import InvalidArgumentError
from qcsense.sensing import (
    BINARY_DENSE,
    BINARY_SPARSE,
    COLUMN_SUPPORTED_UNIFORM,
    MATRIX_CLASSES,
    SINGLE_PIXEL,
    SensingMatrix,
    apply_sensing,
    generate_matrix,
)

THREE_PIXEL = np.array([[0, 0, 1, 0, 0, 0], [1, 0, 0, 0, 0, 0], [0, 0, 0, 0, 1, 0]], dtype=float)


def check_class(A: SensingMatrix):
    a = A.entries
    assert np.all(a >= 0)
    if A.matrix_class in (BINARY_DENSE, BINARY_SPARSE, SINGLE_PIXEL):
        assert np.all((a == 0) | (a == 1))
    if A.matrix_class == SINGLE_PIXEL:
        assert np.all(a.sum(axis=1) == 1)
    if A.matrix_class == COLUMN_SUPPORTED_UNIFORM:
        assert np.all(a <= 1)
        assert np.count_nonzero(a.any(axis=0)) <= A.m


class TestGenerate:
    def test_single_pixel_shape(self):
        A = generate_matrix(SINGLE_PIXEL, 3, 6, 7)
        assert A.entries.shape == (3, 6)
        assert len(set(np.argmax(A.entries, axis=1))) == 3

    def test_dense_density(self, rng):
        ones = [generate_matrix(BINARY_DENSE, 4, 6, rng).entries.mean() for _ in range(1000)]
        assert abs(np.mean(ones) - 0.5) < 0.05

    def test_sparse_density(self, rng):
        ones = [generate_matrix(BINARY_SPARSE, 4, 6, rng).entries.mean() for _ in range(2000)]
        # redrawing the all-zero matrix nudges the mean slightly above 0.2
        assert abs(np.mean(ones) - 0.2) < 0.02

    def test_column_supported_zero_columns(self):
        A = generate_matrix(COLUMN_SUPPORTED_UNIFORM, 2, 6, 3)
        assert np.count_nonzero(~A.entries.any(axis=0)) == 4

    def test_empty(self):
        A = generate_matrix(BINARY_DENSE, 0, 6, 1)
        assert A.entries.shape == (0, 6)

    @pytest.mark.parametrize("klass", [SINGLE_PIXEL, COLUMN_SUPPORTED_UNIFORM])
    def test_too_many_rows(self, klass):
        with pytest.raises(InvalidArgumentError):
            generate_matrix(klass, 7, 6, 0)

    def test_unknown_class(self):
        with pytest.raises(InvalidArgumentError):
            generate_matrix("gaussian", 2, 6, 0)

    def test_full_rank_option(self, rng):
        for _ in range(200):
            A = generate_matrix(BINARY_DENSE, 5, 6, rng, require_full_rank=True)
            assert np.linalg.matrix_rank(A.entries) == 5

    def test_repeats_allowed_when_requested(self):
        repeats = 0
        for seed in range(200):
            A = generate_matrix(SINGLE_PIXEL, 4, 6, seed, distinct_pixels=False)
            repeats += len(set(np.argmax(A.entries, axis=1))) < 4
        assert repeats > 0

    @given(st.sampled_from(MATRIX_CLASSES), st.integers(1, 6), st.integers(0, 2**32 - 1))
    def test_reproducible(self, klass, m, seed):
        a = generate_matrix(klass, m, 6, seed)
        b = generate_matrix(klass, m, 6, seed)
        assert np.array_equal(a.entries, b.entries)
        assert a.seed == seed

    def test_class_invariants_bulk(self):
        rng = np.random.default_rng(99)
        for i in range(10_000):
            klass = MATRIX_CLASSES[i % 4]
            m = int(rng.integers(1, 7))
            check_class(generate_matrix(klass, m, 6, rng))


class TestApply:
    def test_three_pixel_example(self):
        A = SensingMatrix(THREE_PIXEL, SINGLE_PIXEL)
        y = [0, 0.37, 1, 0.81, 1, 0.12]
        assert np.array_equal(apply_sensing(A, y), [1, 0, 1])

    def test_zero_rows(self):
        A = SensingMatrix(np.zeros((3, 4)), BINARY_DENSE)
        assert np.array_equal(apply_sensing(A, [0.5] * 4), np.zeros(3))

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            apply_sensing(SensingMatrix(THREE_PIXEL, SINGLE_PIXEL), [0.5] * 5)

    @given(st.sampled_from(MATRIX_CLASSES), st.integers(1, 6), st.integers(0, 2**32 - 1))
    def test_matches_naive_product(self, klass, m, seed):
        rng = np.random.default_rng(seed)
        A = generate_matrix(klass, m, 6, rng)
        y = rng.random(6)
        x = apply_sensing(A, y)
        for i in range(m):
            want = 0.0
            for j in range(6):
                want += A.entries[i][j] * y[j]
            assert abs(x[i] - want) < 1e-12


class TestSerialization:
    @given(st.sampled_from(MATRIX_CLASSES), st.integers(0, 6), st.integers(0, 2**32 - 1))
    def test_csv_round_trip(self, klass, m, seed):
        A = generate_matrix(klass, m, 6, seed)
        B = SensingMatrix.from_csv(A.to_csv())
        assert np.array_equal(A.entries, B.entries)
        assert (B.matrix_class, B.seed) == (klass, seed)

    def test_header(self):
        text = SensingMatrix(THREE_PIXEL, SINGLE_PIXEL, 5).to_csv().splitlines()
        assert text[0] == "m,n,class,seed"
        assert text[1] == "3,6,single_pixel,5"

    def test_file_round_trip(self, tmp_path):
        A = generate_matrix(COLUMN_SUPPORTED_UNIFORM, 3, 6, 11)
        A.save(tmp_path / "a.csv")
        assert np.array_equal(SensingMatrix.load(tmp_path / "a.csv").entries, A.entries)

    def test_bad_csv(self):
        with pytest.raises(InvalidArgumentError):
            SensingMatrix.from_csv("a,b\n1,2\n")

    def test_negative_entries_rejected(self):
        with pytest.raises(InvalidArgumentError):
            SensingMatrix(-np.eye(2), BINARY_DENSE)
