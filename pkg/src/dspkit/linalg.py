"""Exact rank / kernel / solve over the Gaussian rationals.

Rank decisions here are discontinuous, so everything is exact: matrices are
row-scaled to Gaussian integers and reduced by the fraction-free kernel
(compiled if available, pure Python otherwise), then kernel vectors and
solutions are back-substituted over the field.
"""

from __future__ import annotations

import os
from fractions import Fraction

from .matrices import Matrix
from .scalars import GaussianRational, ZERO, ONE

if os.environ.get("DSPKIT_PURE"):
    from . import _ffref_py as _kernel
else:
    try:
        from . import _ffref as _kernel  # type: ignore[attr-defined]
    except ImportError:
        from . import _ffref_py as _kernel


def kernel_backend() -> str:
    """Name of the row-reduction backend in use ("cython" or "python")."""
    return _kernel.BACKEND


def _lcm(a: int, b: int) -> int:
    from math import gcd

    return a // gcd(a, b) * b


def _scaled_int_rows(m: Matrix):
    """Row-scale to Gaussian integers; returns flat re/im int lists."""
    re = []
    im = []
    for row in m.entries:
        scale = 1
        for x in row:
            scale = _lcm(scale, x.re.denominator)
            scale = _lcm(scale, x.im.denominator)
        for x in row:
            re.append(int(x.re * scale))
            im.append(int(x.im * scale))
    return re, im


def _echelon(m: Matrix):
    """(rank, pivot_cols, echelon rows as GaussianRational tuples)."""
    if m.rows == 0 or m.cols == 0:
        return 0, [], []
    re, im = _scaled_int_rows(m)
    rank, pivots = _kernel.ffref(re, im, m.rows, m.cols)
    ech = []
    for i in range(rank):
        q = i * m.cols
        ech.append(
            tuple(
                GaussianRational(re[q + j], im[q + j]) for j in range(m.cols)
            )
        )
    return rank, pivots, ech


def rank(m: Matrix) -> int:
    """Exact rank over the Gaussian-rational field."""
    return _echelon(m)[0]


def _back_substitute(ech, pivots, ncols, free_values):
    """Solve the echelon system with prescribed free-variable values.

    ``free_values`` maps column index -> value for every non-pivot column;
    homogeneous unless a RHS column was carried inside ``ech``.
    """
    x = [ZERO] * ncols
    for c, v in free_values.items():
        x[c] = v
    for i in range(len(pivots) - 1, -1, -1):
        c = pivots[i]
        s = ZERO
        row = ech[i]
        for j in range(c + 1, ncols):
            if not x[j].is_zero() and not row[j].is_zero():
                s = s + row[j] * x[j]
        x[c] = -s / row[c]
    return x


def kernel_basis(m: Matrix):
    """Exact basis of the right null space; length = cols - rank."""
    nr, nc = m.rows, m.cols
    if nc == 0:
        return []
    if nr == 0:
        return [
            tuple(ONE if j == f else ZERO for j in range(nc)) for f in range(nc)
        ]
    rk, pivots, ech = _echelon(m)
    pivot_set = set(pivots)
    free_cols = [c for c in range(nc) if c not in pivot_set]
    basis = []
    for f in free_cols:
        vals = {c: (ONE if c == f else ZERO) for c in free_cols}
        basis.append(tuple(_back_substitute(ech, pivots, nc, vals)))
    return basis


def solve_linear(m: Matrix, b):
    """A particular exact solution of M x = b, or None if inconsistent.

    Free variables are pinned to zero (minimum-support pivot solution).
    """
    b = [x if isinstance(x, GaussianRational) else GaussianRational(x) for x in b]
    if len(b) != m.rows:
        raise ValueError("rhs length mismatch")
    aug = Matrix([list(m.entries[i]) + [b[i]] for i in range(m.rows)]) if m.rows else m
    if m.rows == 0:
        return tuple([ZERO] * m.cols)
    rk, pivots, ech = _echelon(aug)
    if m.cols in pivots:
        return None  # pivot in the RHS column: inconsistent
    free_cols = [c for c in range(m.cols) if c not in set(pivots)]
    vals = {c: ZERO for c in free_cols}
    vals[m.cols] = -ONE  # x_rhs = -1 turns [M | b] x' = 0 into M x = b
    x = _back_substitute(ech, pivots, m.cols + 1, vals)
    return tuple(x[: m.cols])


def det(m: Matrix) -> GaussianRational:
    """Exact determinant (field elimination; fine at these sizes)."""
    if not m.is_square():
        raise ValueError("determinant of a non-square matrix")
    n = m.rows
    a = [list(row) for row in m.entries]
    sign = 1
    result = ONE
    for c in range(n):
        p = next((i for i in range(c, n) if not a[i][c].is_zero()), None)
        if p is None:
            return ZERO
        if p != c:
            a[p], a[c] = a[c], a[p]
            sign = -sign
        piv = a[c][c]
        result = result * piv
        for i in range(c + 1, n):
            f = a[i][c] / piv
            if f.is_zero():
                continue
            for j in range(c + 1, n):
                a[i][j] = a[i][j] - f * a[c][j]
    return result if sign > 0 else -result


def inverse(m: Matrix) -> Matrix:
    """Exact inverse; raises on singular input."""
    if not m.is_square():
        raise ValueError("inverse of a non-square matrix")
    n = m.rows
    cols = []
    for j in range(n):
        e = [ONE if i == j else ZERO for i in range(n)]
        x = solve_linear(m, e)
        if x is None:
            raise ValueError("singular matrix")
        cols.append(x)
    if rank(m) < n:
        raise ValueError("singular matrix")
    return Matrix(list(zip(*cols)))


def charpoly(m: Matrix):
    """Coefficients [c_0, ..., c_n] of det(xI - M), c_n = 1 (Faddeev-LeVerrier)."""
    if not m.is_square():
        raise ValueError("charpoly of a non-square matrix")
    n = m.rows
    coeffs = [ZERO] * (n + 1)
    coeffs[n] = ONE
    b = Matrix.identity(n)
    for k in range(1, n + 1):
        mk = m * b
        ak = -(mk.trace() / GaussianRational(k))
        coeffs[n - k] = ak
        b = mk + ak * Matrix.identity(n)
    return coeffs


def operator_matrix(fn, rows: int, cols: int) -> Matrix:
    """Matrix of a linear map on matrix space, via images of unit matrices.

    The map eats rows x cols matrices; columns of the result are the
    flattened images of E_{i,j} in row-major order.
    """
    columns = []
    for i in range(rows):
        for j in range(cols):
            img = fn(_unit(rows, cols, i, j))
            columns.append(img.flatten())
    if not columns:
        return Matrix.zero(0, 0)
    return Matrix(list(zip(*columns)))


def _unit(rows, cols, i, j):
    return Matrix(
        [[ONE if (r, c) == (i, j) else ZERO for c in range(cols)] for r in range(rows)]
    )


class SpanSifter:
    """Incremental exact row space: feed vectors, track a reduced basis."""

    def __init__(self, ncols: int):
        self.ncols = ncols
        self._rows = {}  # pivot column -> reduced row (list)

    @property
    def dimension(self) -> int:
        return len(self._rows)

    def residue(self, vector):
        """Reduce a vector against the current basis; zero iff in the span."""
        v = list(vector)
        for c in sorted(self._rows):
            if not v[c].is_zero():
                f = v[c]
                row = self._rows[c]
                for j in range(c, self.ncols):
                    v[j] = v[j] - f * row[j]
        return v

    def add(self, vector) -> bool:
        """Sift a vector in; True if it enlarged the span."""
        v = self.residue(vector)
        for c in range(self.ncols):
            if not v[c].is_zero():
                lead = v[c]
                row = [x / lead for x in v]
                # keep existing rows reduced against the new one
                for c2, r2 in self._rows.items():
                    if not r2[c].is_zero():
                        f = r2[c]
                        self._rows[c2] = [
                            r2[j] - f * row[j] for j in range(self.ncols)
                        ]
                self._rows[c] = row
                return True
        return False

    def contains(self, vector) -> bool:
        return all(x.is_zero() for x in self.residue(vector))

    def basis(self):
        return [tuple(self._rows[c]) for c in sorted(self._rows)]
