"""Dense complex matrices for the physics checks (bounded at 64x64).

Serialization format: ``{"rows": r, "cols": c, "re": [...], "im": [...]}``
with row-major entry order.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

MAX_DIM = 64


class ShapeMismatch(ValueError):
    pass


class ComplexMatrix:
    """Immutable rows x cols complex matrix backed by a numpy array."""

    __slots__ = ("_data",)

    def __init__(self, data: Sequence[Sequence[complex]] | np.ndarray):
        arr = np.array(data, dtype=np.complex128)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ShapeMismatch(f"expected a 2-D matrix, got shape {arr.shape}")
        if arr.shape[0] > MAX_DIM or arr.shape[1] > MAX_DIM:
            raise ShapeMismatch(f"matrix exceeds {MAX_DIM}x{MAX_DIM}: {arr.shape}")
        if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
            raise ValueError("matrix entries must be finite")
        arr.setflags(write=False)
        self._data = arr

    @property
    def rows(self) -> int:
        return self._data.shape[0]

    @property
    def cols(self) -> int:
        return self._data.shape[1]

    @property
    def array(self) -> np.ndarray:
        return self._data

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    @staticmethod
    def identity(n: int) -> "ComplexMatrix":
        return ComplexMatrix(np.eye(n, dtype=np.complex128))

    @staticmethod
    def from_json_dict(obj: dict) -> "ComplexMatrix":
        rows, cols = int(obj["rows"]), int(obj["cols"])
        re = np.asarray(obj["re"], dtype=np.float64)
        im = np.asarray(obj["im"], dtype=np.float64)
        if re.shape != (rows * cols,) or im.shape != (rows * cols,):
            raise ShapeMismatch("re/im length must equal rows*cols")
        return ComplexMatrix((re + 1j * im).reshape(rows, cols))

    def to_json_dict(self) -> dict:
        flat = self._data.reshape(-1)
        return {
            "rows": self.rows,
            "cols": self.cols,
            "re": [float(v) for v in flat.real],
            "im": [float(v) for v in flat.imag],
        }

    def dagger(self) -> "ComplexMatrix":
        return ComplexMatrix(self._data.conj().T)

    def matmul(self, other: "ComplexMatrix") -> "ComplexMatrix":
        if self.cols != other.rows:
            raise ShapeMismatch(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}"
            )
        return ComplexMatrix(self._data @ other._data)

    def trace(self) -> complex:
        if not self.is_square:
            raise ShapeMismatch("trace requires a square matrix")
        return complex(np.trace(self._data))

    def identity_distance(self) -> float:
        """Frobenius distance to the identity, ``||M - I||_F``."""
        if not self.is_square:
            raise ShapeMismatch("identity_distance requires a square matrix")
        return float(
            np.linalg.norm(self._data - np.eye(self.rows, dtype=np.complex128))
        )

    def frobenius(self) -> float:
        return float(np.linalg.norm(self._data))

    def add(self, other: "ComplexMatrix") -> "ComplexMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ShapeMismatch("addition requires equal shapes")
        return ComplexMatrix(self._data + other._data)

    def sub(self, other: "ComplexMatrix") -> "ComplexMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ShapeMismatch("subtraction requires equal shapes")
        return ComplexMatrix(self._data - other._data)

    def scale(self, factor: complex) -> "ComplexMatrix":
        return ComplexMatrix(self._data * factor)

    def submatrix(self, rows: int, cols: int) -> "ComplexMatrix":
        if rows > self.rows or cols > self.cols or rows < 1 or cols < 1:
            raise ShapeMismatch("submatrix bounds exceed matrix shape")
        return ComplexMatrix(self._data[:rows, :cols])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ComplexMatrix):
            return NotImplemented
        return self._data.shape == other._data.shape and bool(
            np.array_equal(self._data, other._data)
        )

    def __repr__(self) -> str:
        return f"ComplexMatrix({self._data.tolist()!r})"


def matrix_algebra(op: str, *args) -> "ComplexMatrix | complex | float":
    """Dispatch kernel ops by name: dagger, matmul, trace, identity_distance."""
    if op == "dagger":
        (m,) = args
        return m.dagger()
    if op == "matmul":
        a, b = args
        return a.matmul(b)
    if op == "trace":
        (m,) = args
        return m.trace()
    if op == "identity_distance":
        (m,) = args
        return m.identity_distance()
    raise ValueError(f"unknown matrix op {op!r}")


def fock_lowering(dim: int) -> ComplexMatrix:
    """Annihilation operator on a truncated Fock space: a|n> = sqrt(n)|n-1>."""
    a = np.zeros((dim, dim), dtype=np.complex128)
    for n in range(1, dim):
        a[n - 1, n] = np.sqrt(n)
    return ComplexMatrix(a)


def fock_raising(dim: int) -> ComplexMatrix:
    return fock_lowering(dim).dagger()


def is_vector(m: ComplexMatrix) -> bool:
    return m.rows == 1 or m.cols == 1


def vector_norm_squared(m: ComplexMatrix) -> float:
    if not is_vector(m):
        raise ShapeMismatch("expected a row or column vector")
    return float(np.sum(np.abs(m.array) ** 2))


def entries(m: ComplexMatrix) -> Iterable[complex]:
    return (complex(v) for v in m.array.reshape(-1))
