"""Random sensing matrices and classical measurement vectors ``x = A y``."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from qcsense.errors import InvalidArgumentError

BINARY_DENSE = "binary_dense"
BINARY_SPARSE = "binary_sparse"
SINGLE_PIXEL = "single_pixel"
COLUMN_SUPPORTED_UNIFORM = "column_supported_uniform"
MATRIX_CLASSES = (BINARY_DENSE, BINARY_SPARSE, SINGLE_PIXEL, COLUMN_SUPPORTED_UNIFORM)

SPARSE_DENSITY = 0.2
MAX_REDRAWS = 100
# a 6x6 matrix at 20% density is full rank only ~2.5% of the time
FULL_RANK_REDRAWS = 2000


@dataclass(frozen=True)
class SensingMatrix:
    entries: np.ndarray = field(repr=False)
    matrix_class: str
    seed: int | None = None

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[1] < 1:
            raise InvalidArgumentError("sensing matrix must be 2-D with n >= 1 columns")
        if self.matrix_class not in MATRIX_CLASSES:
            raise InvalidArgumentError(f"unknown matrix class {self.matrix_class!r}")
        if np.any(a < 0):
            raise InvalidArgumentError("sensing matrix entries must be non-negative")
        a.flags.writeable = False
        object.__setattr__(self, "entries", a)

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    @property
    def n(self) -> int:
        return self.entries.shape[1]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["m", "n", "class", "seed"])
        w.writerow([self.m, self.n, self.matrix_class, "" if self.seed is None else self.seed])
        for row in self.entries:
            w.writerow([f"{v:.17g}" for v in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SensingMatrix":
        rows = list(csv.reader(io.StringIO(text)))
        if len(rows) < 2 or rows[0] != ["m", "n", "class", "seed"]:
            raise InvalidArgumentError("not a sensing-matrix CSV")
        m, n, klass, seed = rows[1]
        m, n = int(m), int(n)
        body = np.array([[float(v) for v in r] for r in rows[2 : 2 + m]]).reshape(m, n)
        return cls(body, klass, int(seed) if seed else None)

    def save(self, path):
        Path(path).write_text(self.to_csv())

    @classmethod
    def load(cls, path) -> "SensingMatrix":
        return cls.from_csv(Path(path).read_text())


def _rng_and_seed(rng):
    if isinstance(rng, np.random.Generator):
        return rng, None
    return np.random.default_rng(rng), (None if rng is None else int(rng))


def generate_matrix(
    matrix_class: str,
    m: int,
    n: int,
    rng,
    distinct_pixels: bool = True,
    require_full_rank: bool = False,
) -> SensingMatrix:
    """Draw an ``m x n`` matrix of the given class.

    ``rng`` is a ``numpy.random.Generator`` or an integer seed (recorded on
    the result). Binary classes redraw an all-zero matrix; with
    ``require_full_rank`` any matrix of row rank below ``m`` is redrawn too.
    """
    rng, seed = _rng_and_seed(rng)
    if matrix_class not in MATRIX_CLASSES:
        raise InvalidArgumentError(f"unknown matrix class {matrix_class!r}")
    if n < 1 or m < 0:
        raise InvalidArgumentError("need n >= 1 and m >= 0")
    if m == 0:
        return SensingMatrix(np.zeros((0, n)), matrix_class, seed)
    if matrix_class in (SINGLE_PIXEL, COLUMN_SUPPORTED_UNIFORM) and m > n:
        raise InvalidArgumentError(f"{matrix_class} needs m <= n")
    if require_full_rank and m > n:
        raise InvalidArgumentError("full row rank needs m <= n")

    budget = FULL_RANK_REDRAWS if require_full_rank else MAX_REDRAWS
    for _ in range(budget):
        a = _draw(matrix_class, m, n, rng, distinct_pixels)
        if not a.any():
            continue
        if require_full_rank and np.linalg.matrix_rank(a) < m:
            continue
        return SensingMatrix(a, matrix_class, seed)
    raise InvalidArgumentError(
        f"no acceptable {matrix_class} matrix in {budget} draws (m={m}, n={n})"
    )


def _draw(matrix_class, m, n, rng, distinct_pixels):
    if matrix_class == BINARY_DENSE:
        return (rng.random((m, n)) < 0.5).astype(float)
    if matrix_class == BINARY_SPARSE:
        return (rng.random((m, n)) < SPARSE_DENSITY).astype(float)
    if matrix_class == SINGLE_PIXEL:
        if distinct_pixels:
            cols = rng.choice(n, size=m, replace=False)
        else:
            cols = rng.integers(0, n, size=m)
        a = np.zeros((m, n))
        a[np.arange(m), cols] = 1.0
        return a
    support = np.sort(rng.choice(n, size=m, replace=False))
    a = np.zeros((m, n))
    a[:, support] = rng.random((m, m))
    return a


def apply_sensing(A: SensingMatrix, y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.shape != (A.n,):
        raise InvalidArgumentError(f"signal of shape {y.shape} does not match n={A.n}")
    return A.entries @ y
