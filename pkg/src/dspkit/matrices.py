"""Dense matrices over the Gaussian rationals, plus first-order epsilon series.

Matrices are immutable; all operations are pure and exact.
"""

from __future__ import annotations

from .scalars import GaussianRational, as_gaussian, ZERO, ONE


class Matrix:
    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries):
        rows = tuple(tuple(as_gaussian(x) for x in row) for row in entries)
        if rows:
            w = len(rows[0])
            if any(len(r) != w for r in rows):
                raise ValueError("ragged matrix")
        else:
            w = 0
        object.__setattr__(self, "entries", rows)
        object.__setattr__(self, "rows", len(rows))
        object.__setattr__(self, "cols", w)

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    # -- constructors ---------------------------------------------------------

    @staticmethod
    def identity(n: int) -> "Matrix":
        return Matrix([[ONE if i == j else ZERO for j in range(n)] for i in range(n)])

    @staticmethod
    def zero(rows: int, cols: int | None = None) -> "Matrix":
        cols = rows if cols is None else cols
        return Matrix([[ZERO] * cols for _ in range(rows)])

    @staticmethod
    def diagonal(values) -> "Matrix":
        vals = [as_gaussian(v) for v in values]
        n = len(vals)
        return Matrix(
            [[vals[i] if i == j else ZERO for j in range(n)] for i in range(n)]
        )

    @staticmethod
    def unit(n: int, i: int, k: int, value=1) -> "Matrix":
        """Single-entry matrix: ``value`` in position (i, k), zero elsewhere."""
        return Matrix(
            [
                [as_gaussian(value) if (r, c) == (i, k) else ZERO for c in range(n)]
                for r in range(n)
            ]
        )

    # -- access ---------------------------------------------------------------

    def __getitem__(self, key):
        i, j = key
        return self.entries[i][j]

    def row(self, i):
        return self.entries[i]

    def column(self, j):
        return tuple(self.entries[i][j] for i in range(self.rows))

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_shape(other)
        return Matrix(
            [
                [self.entries[i][j] + other.entries[i][j] for j in range(self.cols)]
                for i in range(self.rows)
            ]
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_shape(other)
        return Matrix(
            [
                [self.entries[i][j] - other.entries[i][j] for j in range(self.cols)]
                for i in range(self.rows)
            ]
        )

    def __neg__(self) -> "Matrix":
        return Matrix([[-x for x in row] for row in self.entries])

    def __mul__(self, other):
        if isinstance(other, Matrix):
            return self._matmul(other)
        s = as_gaussian(other)
        return Matrix([[x * s for x in row] for row in self.entries])

    def __rmul__(self, other):
        s = as_gaussian(other)
        return Matrix([[s * x for x in row] for row in self.entries])

    def _matmul(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch in product")
        ocols = list(zip(*other.entries)) if other.entries else []
        out = []
        for row in self.entries:
            out.append(
                [
                    sum((row[k] * col[k] for k in range(self.cols)), ZERO)
                    for col in ocols
                ]
            )
        return Matrix(out)

    def __pow__(self, k: int) -> "Matrix":
        if self.rows != self.cols:
            raise ValueError("power of a non-square matrix")
        out = Matrix.identity(self.rows)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def transpose(self) -> "Matrix":
        return Matrix(list(zip(*self.entries))) if self.entries else self

    def trace(self) -> GaussianRational:
        return sum((self.entries[i][i] for i in range(self.rows)), ZERO)

    def commutator(self, other: "Matrix") -> "Matrix":
        return self * other - other * self

    def map(self, fn) -> "Matrix":
        return Matrix([[fn(x) for x in row] for row in self.entries])

    # -- predicates -----------------------------------------------------------

    def is_zero(self) -> bool:
        return all(x.is_zero() for row in self.entries for x in row)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_scalar(self) -> bool:
        if not self.is_square():
            return False
        d = self.entries[0][0] if self.rows else ZERO
        for i in range(self.rows):
            for j in range(self.cols):
                want = d if i == j else ZERO
                if self.entries[i][j] != want:
                    return False
        return True

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def _check_shape(self, other):
        if self.rows != other.rows or self.cols != other.cols:
            raise ValueError("shape mismatch")

    # -- structure ------------------------------------------------------------

    def flatten(self):
        """Row-major entry tuple; the vec() used by operator constructions."""
        return tuple(x for row in self.entries for x in row)

    def submatrix(self, row_idx, col_idx) -> "Matrix":
        return Matrix([[self.entries[i][j] for j in col_idx] for i in row_idx])

    @staticmethod
    def from_flat(values, rows: int, cols: int) -> "Matrix":
        values = list(values)
        if len(values) != rows * cols:
            raise ValueError("flat length mismatch")
        return Matrix([values[i * cols : (i + 1) * cols] for i in range(rows)])

    @staticmethod
    def block(grid) -> "Matrix":
        """Assemble a matrix from a 2D grid of blocks."""
        out_rows = []
        for block_row in grid:
            h = block_row[0].rows
            if any(b.rows != h for b in block_row):
                raise ValueError("block row height mismatch")
            for i in range(h):
                row = []
                for b in block_row:
                    row.extend(b.entries[i])
                out_rows.append(row)
        return Matrix(out_rows)

    def to_complex(self):
        return [[complex(x) for x in row] for row in self.entries]

    def __str__(self):
        return "[" + "; ".join(" ".join(str(x) for x in row) for row in self.entries) + "]"

    def __repr__(self):
        return "Matrix(%s)" % str(self)


class EpsilonSeries:
    """Truncated order-1 expansion M0 + eps*M1 of a matrix family."""

    __slots__ = ("order0", "order1")

    truncation_order = 1

    def __init__(self, order0: Matrix, order1: Matrix):
        if order0.rows != order1.rows or order0.cols != order1.cols:
            raise ValueError("series terms must share dimensions")
        object.__setattr__(self, "order0", order0)
        object.__setattr__(self, "order1", order1)

    def __setattr__(self, name, value):
        raise AttributeError("EpsilonSeries is immutable")

    def at(self, eps) -> Matrix:
        return self.order0 + as_gaussian(eps) * self.order1

    def __add__(self, other: "EpsilonSeries") -> "EpsilonSeries":
        return EpsilonSeries(self.order0 + other.order0, self.order1 + other.order1)

    def __repr__(self):
        return "EpsilonSeries(%s + eps*%s)" % (self.order0, self.order1)
