"""Fuchsian systems as exact rational matrix functions, and the rank-one
gauge step that shifts two eigenvalues of the designated residue by -1/+1.

Rational functions keep their denominators as multisets of monic linear
factors (every pole in sight is a prescribed rational point), so sums,
products, derivatives and partial fractions stay exact.
"""

from __future__ import annotations

import random
from math import comb

from .errors import DspkitError, PreconditionError, ProcedureBlocked, SearchFailure
from .genericity import ADDITIVE
from .jnf import Partition, jordan_decomposition
from .linalg import inverse, rank
from .matrices import Matrix
from .scalars import GaussianRational, as_gaussian, ONE, ZERO
from .tuples import (
    MatrixTuple,
    centralizer_dimension,
    constraint_residual,
    is_irreducible,
    similarity_conjugator,
)

# -- scalar rational functions ---------------------------------------------------


def _trim(coeffs):
    c = list(coeffs)
    while c and c[-1].is_zero():
        c.pop()
    return tuple(c)


def _poly_add(a, b):
    out = [ZERO] * max(len(a), len(b))
    for i, x in enumerate(a):
        out[i] = out[i] + x
    for i, x in enumerate(b):
        out[i] = out[i] + x
    return _trim(out)


def _poly_mul(a, b):
    if not a or not b:
        return ()
    out = [ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return _trim(out)


def _poly_scale(a, s):
    return _trim([x * s for x in a])


def _poly_eval(a, x):
    acc = ZERO
    for c in reversed(a):
        acc = acc * x + c
    return acc


def _poly_shift(a, r):
    """Coefficients of p(t + r): the Taylor coefficients of p at r."""
    out = [ZERO] * max(len(a), 1)
    for c in reversed(a):
        # multiply by (t + r), then add c at degree 0
        carry = ZERO
        shifted = [ZERO] * len(out)
        for i in range(len(out) - 1, 0, -1):
            shifted[i] = out[i - 1]
        for i in range(len(out)):
            shifted[i] = shifted[i] + out[i] * r
        out = shifted
        out[0] = out[0] + c
    return _trim(out)


def _poly_syndiv(a, r):
    """Divide by the monic linear (t - r); returns (quotient, remainder)."""
    if not a:
        return (), ZERO
    q = [ZERO] * (len(a) - 1)
    acc = a[-1]
    for i in range(len(a) - 2, -1, -1):
        q[i] = acc
        acc = a[i] + acc * r
    return _trim(q), acc


def _poly_divmod(a, b):
    """Polynomial division; b must be nonzero."""
    a = list(a)
    q = [ZERO] * max(len(a) - len(b) + 1, 0)
    while len(_trim(a)) >= len(b):
        a = list(_trim(a))
        shift = len(a) - len(b)
        f = a[-1] / b[-1]
        q[shift] = q[shift] + f
        for i, c in enumerate(b):
            a[shift + i] = a[shift + i] - f * c
        a = list(_trim(a))
        if not a:
            break
    return _trim(q), _trim(a)


def _poly_derivative(a):
    return _trim([GaussianRational(i) * a[i] for i in range(1, len(a))])


class RationalFunction:
    """num / prod (t - r)^mult with explicit rational poles."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if isinstance(num, (int, str, GaussianRational)):
            num = (as_gaussian(num),)
        num = _trim(as_gaussian(c) for c in num)
        den = dict(den or {})
        den = {as_gaussian(r): int(m) for r, m in den.items() if int(m) != 0}
        if any(m < 0 for m in den.values()):
            raise ValueError("negative pole multiplicity")
        num, den = _normalize(num, den)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RationalFunction is immutable")

    @staticmethod
    def constant(c):
        return RationalFunction((as_gaussian(c),))

    @staticmethod
    def simple_pole(coeff, pole):
        """coeff / (t - pole)."""
        return RationalFunction((as_gaussian(coeff),), {as_gaussian(pole): 1})

    def is_zero(self):
        return not self.num

    def is_constant(self):
        return not self.den and len(self.num) <= 1

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("not a constant")
        return self.num[0] if self.num else ZERO

    def __add__(self, other):
        other = _as_rf(other)
        den = {}
        for r, m in self.den.items():
            den[r] = m
        for r, m in other.den.items():
            den[r] = max(den.get(r, 0), m)
        a = self.num
        for r, m in den.items():
            extra = m - self.den.get(r, 0)
            for _ in range(extra):
                a = _poly_mul(a, (-r, ONE))
        b = other.num
        for r, m in den.items():
            extra = m - other.den.get(r, 0)
            for _ in range(extra):
                b = _poly_mul(b, (-r, ONE))
        return RationalFunction(_poly_add(a, b), den)

    def __neg__(self):
        return RationalFunction(tuple(-c for c in self.num), self.den)

    def __sub__(self, other):
        return self + (-_as_rf(other))

    def __mul__(self, other):
        other = _as_rf(other)
        den = dict(self.den)
        for r, m in other.den.items():
            den[r] = den.get(r, 0) + m
        return RationalFunction(_poly_mul(self.num, other.num), den)

    def __eq__(self, other):
        return (self - _as_rf(other)).is_zero()

    def __hash__(self):
        return hash((self.num, tuple(sorted(self.den.items(), key=lambda kv: str(kv[0])))))

    def derivative(self):
        out = RationalFunction(_poly_derivative(self.num), self.den)
        for r, m in self.den.items():
            den2 = dict(self.den)
            den2[r] = m + 1
            out = out + RationalFunction(
                _poly_scale(self.num, GaussianRational(-m)), den2
            )
        return out

    def evaluate(self, x):
        x = as_gaussian(x)
        d = ONE
        for r, m in self.den.items():
            if x == r:
                raise ZeroDivisionError("evaluation at a pole")
            d = d * (x - r) ** m
        return _poly_eval(self.num, x) / d

    def partial_fractions(self):
        """(polynomial part coeffs, {pole: [c_1, ..., c_m]}) with
        f = poly + sum c_i / (t - pole)^i."""
        den_poly = (ONE,)
        for r, m in self.den.items():
            for _ in range(m):
                den_poly = _poly_mul(den_poly, (-r, ONE))
        poly, rem = _poly_divmod(self.num, den_poly)
        parts = {}
        for r, m in self.den.items():
            # Taylor of rem / prod_{s != r} (t-s)^{m_s} at r, orders 0..m-1
            taylor = _poly_shift(rem, r)[:m]
            taylor = list(taylor) + [ZERO] * (m - len(taylor))
            series = [ONE] + [ZERO] * (m - 1)
            for s, ms in self.den.items():
                if s == r:
                    continue
                base = r - s
                inv = ONE / base
                factor = [
                    GaussianRational((-1) ** u * comb(ms + u - 1, u))
                    * inv ** (ms + u)
                    for u in range(m)
                ]
                series = _series_mul(series, factor, m)
            g = _series_mul(taylor, series, m)
            coeffs = [g[m - i] if m - i < len(g) else ZERO for i in range(1, m + 1)]
            parts[r] = coeffs
        return list(poly), parts

    def __repr__(self):
        num = "+".join(
            "%s t^%d" % (c, i) for i, c in enumerate(self.num) if not c.is_zero()
        ) or "0"
        den = " ".join("(t-%s)^%d" % (r, m) for r, m in self.den.items())
        return "RF[%s / %s]" % (num, den or "1")


def _series_mul(a, b, order):
    out = [ZERO] * order
    for i in range(order):
        ai = a[i] if i < len(a) else ZERO
        if ai.is_zero():
            continue
        for j in range(order - i):
            bj = b[j] if j < len(b) else ZERO
            if not bj.is_zero():
                out[i + j] = out[i + j] + ai * bj
    return out


def _as_rf(x):
    if isinstance(x, RationalFunction):
        return x
    return RationalFunction.constant(as_gaussian(x))


def _normalize(num, den):
    if not num:
        return (), {}
    for r in list(den):
        while den.get(r, 0) > 0 and _poly_eval(num, r).is_zero():
            num, rem = _poly_syndiv(num, r)
            assert rem.is_zero()
            den[r] -= 1
        if den.get(r, 0) == 0:
            den.pop(r, None)
    return num, den


# -- matrices of rational functions -----------------------------------------------


class RationalMatrixFunction:
    __slots__ = ("entries",)

    def __init__(self, entries):
        rows = tuple(tuple(_as_rf(x) for x in row) for row in entries)
        object.__setattr__(self, "entries", rows)

    def __setattr__(self, name, value):
        raise AttributeError("RationalMatrixFunction is immutable")

    @property
    def rows(self):
        return len(self.entries)

    @property
    def cols(self):
        return len(self.entries[0]) if self.entries else 0

    @staticmethod
    def identity(n):
        return RationalMatrixFunction(
            [
                [RationalFunction.constant(1 if i == j else 0) for j in range(n)]
                for i in range(n)
            ]
        )

    @staticmethod
    def from_constant(m: Matrix):
        return RationalMatrixFunction(
            [[RationalFunction.constant(x) for x in row] for row in m.entries]
        )

    def __add__(self, other):
        return RationalMatrixFunction(
            [
                [self.entries[i][j] + other.entries[i][j] for j in range(self.cols)]
                for i in range(self.rows)
            ]
        )

    def __sub__(self, other):
        return RationalMatrixFunction(
            [
                [self.entries[i][j] - other.entries[i][j] for j in range(self.cols)]
                for i in range(self.rows)
            ]
        )

    def __mul__(self, other):
        if isinstance(other, RationalMatrixFunction):
            return RationalMatrixFunction(
                [
                    [
                        _rf_sum(
                            self.entries[i][k] * other.entries[k][j]
                            for k in range(self.cols)
                        )
                        for j in range(other.cols)
                    ]
                    for i in range(self.rows)
                ]
            )
        f = _as_rf(other)
        return RationalMatrixFunction(
            [[x * f for x in row] for row in self.entries]
        )

    def derivative(self):
        return RationalMatrixFunction(
            [[x.derivative() for x in row] for row in self.entries]
        )

    def evaluate(self, point) -> Matrix:
        return Matrix(
            [[x.evaluate(point) for x in row] for row in self.entries]
        )

    def det(self) -> RationalFunction:
        n = self.rows
        if n == 0:
            return RationalFunction.constant(1)
        if n == 1:
            return self.entries[0][0]
        total = RationalFunction.constant(0)
        sign = 1
        for j in range(n):
            minor = RationalMatrixFunction(
                [row[:j] + row[j + 1 :] for row in self.entries[1:]]
            )
            term = self.entries[0][j] * minor.det()
            total = total + (term if sign > 0 else -term)
            sign = -sign
        return total

    def invert_unimodular(self) -> "RationalMatrixFunction":
        """Inverse via the adjugate; requires det identically 1."""
        d = self.det()
        if not (d.is_constant() and d.constant_value() == ONE):
            raise PreconditionError("inverse needs determinant identically 1")
        n = self.rows
        cof = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                minor = RationalMatrixFunction(
                    [
                        [self.entries[r][c] for c in range(n) if c != j]
                        for r in range(n)
                        if r != i
                    ]
                )
                m = minor.det()
                cof[j][i] = m if (i + j) % 2 == 0 else -m
        return RationalMatrixFunction(cof)

    def is_zero(self):
        return all(x.is_zero() for row in self.entries for x in row)


def _rf_sum(items):
    acc = RationalFunction.constant(0)
    for x in items:
        acc = acc + x
    return acc


# -- Fuchsian systems ---------------------------------------------------------------


class FuchsianSystem:
    """Simple-pole system with zero residue sum.

    The gauge steps additionally need the last residue literally diagonal;
    its diagonal order is the declared eigenvalue order the shift
    bookkeeping refers to.
    """

    __slots__ = ("poles", "residues")

    def __init__(self, poles, residues: MatrixTuple):
        poles = tuple(as_gaussian(a) for a in poles)
        if len(set(poles)) != len(poles):
            raise PreconditionError("poles must be pairwise distinct")
        if residues.mode != ADDITIVE:
            raise PreconditionError("residue tuple must be additive")
        if len(poles) != residues.count:
            raise PreconditionError("one pole per residue")
        if not constraint_residual(residues).is_zero():
            raise PreconditionError("residues must sum to zero (no pole at infinity)")
        object.__setattr__(self, "poles", poles)
        object.__setattr__(self, "residues", residues)

    def __setattr__(self, name, value):
        raise AttributeError("FuchsianSystem is immutable")

    @property
    def size(self):
        return self.residues.size

    @property
    def count(self):
        return self.residues.count

    def last_is_diagonal(self) -> bool:
        last = self.residues.matrices[-1]
        n = self.size
        return all(
            last[i, j].is_zero() for i in range(n) for j in range(n) if i != j
        )

    def designated_eigenvalues(self):
        if not self.last_is_diagonal():
            raise PreconditionError("last residue must be diagonal")
        last = self.residues.matrices[-1]
        return tuple(last[i, i] for i in range(self.size))

    def coefficient_function(self) -> RationalMatrixFunction:
        """A(t) = sum A_j / (t - a_j)."""
        n = self.size
        grid = [[RationalFunction.constant(0)] * n for _ in range(n)]
        for a, m in zip(self.poles, self.residues.matrices):
            for i in range(n):
                for j in range(n):
                    if not m[i, j].is_zero():
                        grid[i][j] = grid[i][j] + RationalFunction.simple_pole(
                            m[i, j], a
                        )
        return RationalMatrixFunction(grid)


def laurent_constant_term(sys: FuchsianSystem) -> Matrix:
    """Constant term at the designated pole: sum A_j / (a_last - a_j)."""
    a_last = sys.poles[-1]
    total = Matrix.zero(sys.size)
    for a, m in zip(sys.poles[:-1], sys.residues.matrices[:-1]):
        total = total + (ONE / (a_last - a)) * m
    return total


def extract_residues(fn: RationalMatrixFunction, poles):
    """Residues of a matrix function with only simple poles at the given
    points and no polynomial part; raises when the shape is violated."""
    n = fn.rows
    grids = [[[ZERO] * n for _ in range(n)] for _ in poles]
    pole_index = {as_gaussian(a): k for k, a in enumerate(poles)}
    for i in range(n):
        for j in range(n):
            poly, parts = fn.entries[i][j].partial_fractions()
            if poly:
                raise DspkitError("polynomial part present; not a residue form")
            for r, coeffs in parts.items():
                if r not in pole_index:
                    raise DspkitError("unexpected pole at %s" % r)
                if any(not c.is_zero() for c in coeffs[1:]):
                    raise DspkitError("higher-order pole at %s" % r)
                grids[pole_index[r]][i][j] = coeffs[0]
    return [Matrix(g) for g in grids]


def procedure_lk(sys: FuchsianSystem, l: int, k: int, audit=None):
    """Gauge by I + W/(t - a_last) with the single entry at (k, l):
    eigenvalue at slot l drops by 1, slot k gains 1, classes below the last
    index are preserved.  Raises ProcedureBlocked when the pivot entry of
    the constant term vanishes."""
    n = sys.size
    if l == k or not (0 <= l < n and 0 <= k < n):
        raise PreconditionError("need two distinct slots")
    lam = sys.designated_eigenvalues()
    f = laurent_constant_term(sys)
    c = f[l, k]
    if c.is_zero():
        raise ProcedureBlocked("constant-term entry (%d,%d) vanishes" % (l, k))
    target = list(lam)
    target[l] = lam[l] - ONE
    target[k] = lam[k] + ONE
    w_value = (lam[k] - lam[l] + ONE) / c
    record = {
        "l": l,
        "k": k,
        "pivot": str(c),
        "w": str(w_value),
    }
    if w_value.is_zero():
        # V = I; the shifted multiset equals the old one with slots l, k
        # swapped, realized by an exact permutation conjugation
        perm = _transposition(n, l, k)
        new_res = sys.residues.conjugated(perm)
        out = FuchsianSystem(sys.poles, MatrixTuple(ADDITIVE, new_res.matrices))
        if audit is not None:
            record["identity_gauge"] = True
            audit.append(record)
        return out
    a_last = sys.poles[-1]
    w = Matrix.unit(n, k, l, w_value)
    v = RationalMatrixFunction.identity(n) + (
        RationalMatrixFunction.from_constant(w)
        * RationalFunction.simple_pole(1, a_last)
    )
    # W has a single off-diagonal entry, so det V is identically 1
    dv = v.det()
    assert dv.is_constant() and dv.constant_value() == ONE
    v_inv = v.invert_unimodular()
    gauged = v_inv * sys.coefficient_function() * v - v_inv * v.derivative()
    new_matrices = extract_residues(gauged, sys.poles)
    total = Matrix.zero(n)
    for m in new_matrices:
        total = total + m
    assert total.is_zero()
    # classes below the last index transform by the exact conjugation V(a_j)
    for j in range(sys.count - 1):
        vj = v.evaluate(sys.poles[j])
        expected = inverse(vj) * sys.residues.matrices[j] * vj
        assert new_matrices[j] == expected
    # designated residue: verify the eigenvalue shift, then re-diagonalize
    new_last = new_matrices[-1]
    groups = {}
    for t_val in target:
        groups[t_val] = groups.get(t_val, 0) + 1
    from .linalg import charpoly

    cp = charpoly(new_last)
    want = (ONE,)
    for t_val in target:
        want = _poly_mul(want, (-t_val, ONE))
    assert tuple(cp) == tuple(want), "designated eigenvalues did not shift as required"
    value_groups = [
        (val, Partition([1] * mult)) for val, mult in groups.items()
    ]
    for val, mult in groups.items():
        if rank(new_last - val * Matrix.identity(n)) != n - mult:
            raise DspkitError(
                "designated residue not diagonalizable after the shift"
            )
    q, g = jordan_decomposition(new_last, value_groups)
    # permute the frame so slot order matches the target ledger
    order = _slot_order(g, target)
    perm = Matrix(
        [[ONE if order[c] == r else ZERO for c in range(n)] for r in range(n)]
    )
    conj = inverse(q) * perm
    final = [inverse(conj) * m * conj for m in new_matrices]
    out_t = MatrixTuple(ADDITIVE, final)
    out = FuchsianSystem(sys.poles, out_t)
    assert out.designated_eigenvalues() == tuple(target)
    if audit is not None:
        record["conjugated"] = True
        audit.append(record)
    return out


def _slot_order(g: Matrix, target):
    """Column order mapping the diagonal of g onto the target sequence."""
    n = g.rows
    pool = {i: g[i, i] for i in range(n)}
    order = []
    for t_val in target:
        idx = next(i for i, v in pool.items() if v == t_val)
        order.append(idx)
        pool.pop(idx)
    return order


def _transposition(n, i, j):
    rows = [[ONE if r == c else ZERO for c in range(n)] for r in range(n)]
    rows[i][i] = ZERO
    rows[j][j] = ZERO
    rows[i][j] = ONE
    rows[j][i] = ONE
    return Matrix(rows)


def perturb_for_procedure(
    sys: FuchsianSystem, l: int, k: int, seed: int = 0, max_attempts: int = 24
):
    """Make the (l, k) pivot entry nonzero without changing any class.

    First moves the non-designated poles a little (seeded, shrinking);
    when every residue below the last has a vanishing (l, k) entry, applies
    an exact elementary conjugation to one residue and absorbs the change
    into another via an exact similarity test.  Requires an irreducible
    residue tuple.
    """
    if not is_irreducible(sys.residues):
        raise PreconditionError("perturbation needs an irreducible residue tuple")
    f = laurent_constant_term(sys)
    if not f[l, k].is_zero():
        return sys
    rng = random.Random(seed)
    p = sys.count - 1
    entries = [sys.residues.matrices[j][l, k] for j in range(p)]
    if any(not e.is_zero() for e in entries):
        for attempt in range(max_attempts):
            scale = GaussianRational(1) / GaussianRational(2 ** (attempt + 1))
            new_poles = list(sys.poles)
            for j in range(p):
                delta = scale * GaussianRational(rng.randint(1, 5), 0) / 7
                new_poles[j] = sys.poles[j] + delta
            if len(set(new_poles)) != len(new_poles):
                continue
            cand = FuchsianSystem(new_poles, sys.residues)
            if not laurent_constant_term(cand)[l, k].is_zero():
                return cand
        raise SearchFailure("pole perturbation failed to expose the pivot")
    if sys.size < 3:
        raise SearchFailure(
            "all residues vanish at the pivot in size 2: the tuple is reducible"
        )
    n = sys.size
    # systematic exact move: conjugate one residue by an elementary
    # I + a E_{r,s} and hand the difference to another residue, accepting
    # only when the receiver provably stays in its class
    values = [
        GaussianRational(1),
        GaussianRational(-1),
        GaussianRational(1) / 2,
        GaussianRational(-1) / 2,
        GaussianRational(2),
        GaussianRational(1) / 4,
    ]
    for a_val in values:
        for m1 in range(p):
            for m2 in range(p):
                if m1 == m2:
                    continue
                for r_idx in range(n):
                    for s_idx in range(n):
                        if r_idx == s_idx:
                            continue
                        y = Matrix.identity(n) + Matrix.unit(n, r_idx, s_idx, a_val)
                        a_new = inverse(y) * sys.residues.matrices[m1] * y
                        change = sys.residues.matrices[m1] - a_new
                        if change.is_zero():
                            continue
                        b_new = sys.residues.matrices[m2] + change
                        g = similarity_conjugator(
                            sys.residues.matrices[m2], b_new, seed=seed
                        )
                        if g is None:
                            continue
                        mats = list(sys.residues.matrices)
                        mats[m1] = a_new
                        mats[m2] = b_new
                        cand_res = MatrixTuple(ADDITIVE, mats)
                        cand = FuchsianSystem(sys.poles, cand_res)
                        if not laurent_constant_term(cand)[l, k].is_zero():
                            return cand
                        # a pole move on top may expose the new entries
                        for sub in range(1, 4):
                            new_poles = list(sys.poles)
                            for j in range(p):
                                new_poles[j] = sys.poles[j] + GaussianRational(
                                    rng.randint(1, 5), 0
                                ) / (11 * sub)
                            if len(set(new_poles)) != len(new_poles):
                                continue
                            cand2 = FuchsianSystem(new_poles, cand_res)
                            if not laurent_constant_term(cand2)[l, k].is_zero():
                                return cand2
    raise SearchFailure(
        "conjugation search found no class-preserving exact move; "
        "existence is not refuted"
    )


def shift_walk(sys: FuchsianSystem, v, seed: int = 0):
    """Perform the admissible eigenvalue shift v on the designated residue
    as a chain of single-step gauges; returns (system, audit list)."""
    v = [int(x) for x in v]
    if len(v) != sys.size:
        raise PreconditionError("shift vector length mismatch")
    if sum(v) != 0:
        raise PreconditionError("shift vector must have zero sum")
    audit = []
    current = sys
    remaining = list(v)
    step = 0
    while any(remaining):
        plus = max(range(len(remaining)), key=lambda i: remaining[i])
        minus = min(range(len(remaining)), key=lambda i: remaining[i])
        if remaining[plus] <= 0 or remaining[minus] >= 0:
            raise DspkitError("inconsistent remaining shift")
        current = _walk_step(current, minus, plus, seed + step, audit)
        remaining[plus] -= 1
        remaining[minus] += 1
        step += 1
    expected = [
        a + GaussianRational(x)
        for a, x in zip(sys.designated_eigenvalues(), v)
    ]
    got = list(current.designated_eigenvalues())
    assert sorted(map(str, got)) == sorted(map(str, expected))
    return current, audit


def _walk_step(current, l, k, seed, audit):
    try:
        return procedure_lk(current, l, k, audit=audit)
    except ProcedureBlocked:
        pass
    if is_irreducible(current.residues):
        fixed = perturb_for_procedure(current, l, k, seed=seed)
        audit.append({"perturbed": True, "l": l, "k": k})
        return procedure_lk(fixed, l, k, audit=audit)
    # reducible and blocked: split into diagonal blocks and walk the block
    # carrying the affected slots (coarse handling; see module docs)
    return _blocked_reducible_step(current, l, k, seed, audit)


def _blocked_reducible_step(current, l, k, seed, audit):
    from .extensions import split_direct_sum

    dim, _ = centralizer_dimension(current.residues)
    if dim == 1:
        raise SearchFailure(
            "blocked on a reducible tuple with trivial centralizer; "
            "no block decomposition is available"
        )
    res = current.residues.with_classes(None)
    last_diag = current.designated_eigenvalues()
    split = split_direct_sum(
        MatrixTuple(ADDITIVE, res.matrices), max_depth=8
    )
    if split is None:
        raise SearchFailure("centralizer vanished during the split")
    g, parts = split
    conj = current.residues.conjugated(g)
    # locate the slots of the split (the conjugated last residue is diagonal
    # with the same values, possibly permuted)
    new_diag = [conj.matrices[-1][i, i] for i in range(current.size)]
    slot_of = {}
    used = set()
    for i, val in enumerate(last_diag):
        for j, w in enumerate(new_diag):
            if j not in used and w == val:
                slot_of[i] = j
                used.add(j)
                break
    nl, nk = slot_of[l], slot_of[k]
    sizes = [p.size for p in parts]
    bounds = []
    off = 0
    for s in sizes:
        bounds.append((off, off + s))
        off += s
    block_l = next(b for b, (s, e) in enumerate(bounds) if s <= nl < e)
    block_k = next(b for b, (s, e) in enumerate(bounds) if s <= nk < e)
    if block_l != block_k:
        raise SearchFailure(
            "shift step joins different irreducible blocks; "
            "the planned step ordering should prevent this"
        )
    s, e = bounds[block_l]
    sub = FuchsianSystem(current.poles, parts[block_l])
    audit.append({"split": sizes, "block": block_l, "l": l, "k": k})
    sub_out = _walk_step(sub, nl - s, nk - s, seed, audit)
    # reassemble the block diagonal system
    mats = []
    for j in range(current.count):
        grid = []
        for bi, part in enumerate(parts):
            row = []
            for bj in range(len(parts)):
                if bi == bj:
                    row.append(
                        sub_out.residues.matrices[j]
                        if bi == block_l
                        else part.matrices[j]
                    )
                else:
                    row.append(Matrix.zero(sizes[bi], sizes[bj]))
            grid.append(row)
        mats.append(Matrix.block(grid))
    return FuchsianSystem(current.poles, MatrixTuple(ADDITIVE, mats))
