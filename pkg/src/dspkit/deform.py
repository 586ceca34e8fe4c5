"""First-order deformation of trivial-centralizer tuples, plus correction.

The first-order solve produces the epsilon-series whose order-1 total
vanishes; the corrector instantiates a concrete epsilon and restores the
constraint exactly while keeping every matrix an exact conjugate of its
deformed class representative A_j + eps N_j.  Exact correction closes by
absorbing the residual into one matrix per an exact similarity test (with
Newton conjugation steps in between); the float path is plain Newton to a
tolerance, for sizes where exact arithmetic is not wanted.
"""

from __future__ import annotations

import random

from .criteria import ClassSpec
from .errors import DivergenceError, PreconditionError, SearchFailure
from .genericity import ADDITIVE, MULTIPLICATIVE
from .jnf import JordanNormalForm, Partition, jordan_decomposition
from .linalg import charpoly, inverse, solve_linear
from .matrices import EpsilonSeries, Matrix
from .scalars import GaussianRational, as_gaussian, ONE, ZERO
from .tuples import (
    MatrixTuple,
    centralizer_dimension,
    class_membership,
    constraint_residual,
    similarity_conjugator,
)


class DeformationRequest:
    """Base tuple plus per-matrix direction matrices in each Jordan frame."""

    __slots__ = ("base", "directions", "epsilon")

    def __init__(self, base: MatrixTuple, directions, epsilon=None):
        directions = tuple(directions)
        if len(directions) != base.count:
            raise ValueError("one direction per matrix")
        n = base.size
        for v in directions:
            if v.rows != n or v.cols != n:
                raise ValueError("direction shape mismatch")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "directions", directions)
        object.__setattr__(self, "epsilon", epsilon)

    def __setattr__(self, name, value):
        raise AttributeError("DeformationRequest is immutable")


def _class_frame(t: MatrixTuple, j: int):
    """Canonical Jordan frame (Q, G) of matrix j, from its declared class."""
    if t.declared_classes is None:
        raise PreconditionError(
            "nonzero directions need declared classes for the Jordan frame"
        )
    spec = t.declared_classes[j]
    groups = [(spec.value_of(label), p) for label, p in spec.jnf.groups]
    return jordan_decomposition(t.matrices[j], groups)


def _ambient_directions(req: DeformationRequest):
    """N_j = Q_j^-1 V_j Q_j for the nonzero directions."""
    out = []
    for j, v in enumerate(req.directions):
        if v.is_zero():
            out.append(v)
            continue
        q, _g = _class_frame(req.base, j)
        out.append(inverse(q) * v * q)
    return out


def _left_partials(mats):
    out = [Matrix.identity(mats[0].rows)]
    for m in mats:
        out.append(out[-1] * m)
    return out


class FirstOrderDeformation:
    """Solved first-order data: conjugation seeds and the epsilon series."""

    def __init__(self, request, ambient, x0, series):
        self.request = request
        self.ambient = tuple(ambient)  # N_j in the ambient frame
        self.x0 = tuple(x0)
        self.series = tuple(series)

    @property
    def base(self) -> MatrixTuple:
        return self.request.base

    def instantiate(self, eps):
        """Series members at a concrete epsilon (exact)."""
        return [s.at(eps) for s in self.series]

    def conjugated_instantiation(self, eps):
        """The pre-correction point: (I+eps X_j)^-1 (A_j + eps N_j) (I+eps X_j)."""
        eps = as_gaussian(eps)
        n = self.base.size
        out = []
        for j, x in enumerate(self.x0):
            p = Matrix.identity(n) + eps * x
            k = self.base.matrices[j] + eps * self.ambient[j]
            out.append(inverse(p) * k * p)
        return out

    def pre_correction_residual(self, eps) -> Matrix:
        """Exact constraint residual at the pre-correction point; O(eps^2)."""
        t = MatrixTuple(self.base.mode, self.conjugated_instantiation(eps))
        return constraint_residual(t)

    def pre_correction_residual_norm(self, eps: float) -> float:
        """Frobenius norm of the pre-correction residual, in floats."""
        n = self.base.size
        mats = []
        for j, x in enumerate(self.x0):
            p = [
                [(1.0 if a == b else 0.0) + eps * complex(x[a, b]) for b in range(n)]
                for a in range(n)
            ]
            k = [
                [
                    complex(self.base.matrices[j][a, b])
                    + eps * complex(self.ambient[j][a, b])
                    for b in range(n)
                ]
                for a in range(n)
            ]
            mats.append(_cmat_conj(k, p))
        res = _cresidual(self.base.mode, mats, n)
        return sum(abs(x) ** 2 for row in res for x in row) ** 0.5


def _cmatmul(a, b):
    n, mid, m = len(a), len(b), len(b[0])
    return [
        [sum(a[i][k] * b[k][j] for k in range(mid)) for j in range(m)]
        for i in range(n)
    ]


def first_order_deform(req: DeformationRequest) -> FirstOrderDeformation:
    """Exact first-order solve of the deformed constraint.

    Requires a constraint-satisfying, trivial-centralizer base and a
    direction family whose first-order trace condition holds; the returned
    series sums to zero (or multiplies to identity) through order one.
    """
    base = req.base
    if not constraint_residual(base).is_zero():
        raise PreconditionError("base tuple violates its constraint")
    if centralizer_dimension(base)[0] != 1:
        raise PreconditionError("base tuple needs a trivial centralizer")
    ambient = _ambient_directions(req)
    n = base.size
    mats = base.matrices
    if base.mode == ADDITIVE:
        total = Matrix.zero(n)
        for nj in ambient:
            total = total + nj
        if not total.trace().is_zero():
            raise PreconditionError("direction traces must sum to zero")
        rhs = -total
        from .linalg import operator_matrix

        ops = [
            operator_matrix(lambda x, a=a: a * x - x * a, n, n) for a in mats
        ]
        weights = None
    else:
        # product of determinants stays 1 to first order
        cond = ZERO
        for m, nj in zip(mats, ambient):
            cond = cond + (inverse(m) * nj).trace()
        if not cond.is_zero():
            raise PreconditionError(
                "first-order determinant-product condition violated"
            )
        partials = _left_partials(mats)
        inv_partials = [inverse(p) for p in partials]
        from .linalg import operator_matrix

        ops = []
        rhs = Matrix.zero(n)
        for j, m in enumerate(mats):
            left, right = partials[j], inv_partials[j + 1]
            ops.append(
                operator_matrix(
                    lambda x, m=m, left=left, right=right: left
                    * (m * x - x * m)
                    * right,
                    n,
                    n,
                )
            )
            rhs = rhs - left * ambient[j] * right
        weights = (partials, inv_partials)
    stacked = Matrix.block([ops])
    sol = solve_linear(stacked, rhs.flatten())
    if sol is None:
        raise PreconditionError(
            "first-order system inconsistent despite trivial centralizer"
        )
    x0 = [
        Matrix.from_flat(sol[j * n * n : (j + 1) * n * n], n, n)
        for j in range(base.count)
    ]
    series = []
    for j, m in enumerate(mats):
        order1 = (m * x0[j] - x0[j] * m) + ambient[j]
        series.append(EpsilonSeries(m, order1))
    fo = FirstOrderDeformation(req, ambient, x0, series)
    # order-1 exactness of the linearized constraint
    if base.mode == ADDITIVE:
        total1 = Matrix.zero(n)
        for s in series:
            total1 = total1 + s.order1
        assert total1.is_zero()
    else:
        partials, inv_partials = weights
        total1 = Matrix.zero(n)
        for j, s in enumerate(series):
            total1 = total1 + partials[j] * s.order1 * inv_partials[j + 1]
        assert total1.is_zero()
    return fo


class FloatDeformation:
    """Float-mode correction result."""

    def __init__(self, matrices, residual_norm, iterations):
        self.matrices = matrices
        self.residual_norm = residual_norm
        self.iterations = iterations


def newton_correct(
    fo: FirstOrderDeformation,
    target_classes=None,
    eps_value=None,
    tolerance: float = 1e-10,
    float_mode: bool = False,
    max_iter: int = 16,
    seed: int = 0,
):
    """Instantiate epsilon and restore the constraint.

    Exact mode keeps every matrix an exact conjugate of K_j = A_j + eps N_j
    (class membership by construction) and terminates when the residual is
    exactly zero: either a whole-residual absorption into one matrix passes
    the exact similarity test, or conjugation Newton steps shrink the
    residual until one does.  Float mode is plain Newton on the conjugation
    parameters down to a Frobenius tolerance.
    """
    if eps_value is None:
        eps_value = fo.request.epsilon
    if eps_value is None:
        raise PreconditionError("no epsilon value supplied")
    if float_mode:
        return _newton_float(fo, complex(as_gaussian(eps_value)), tolerance, max_iter)
    eps = as_gaussian(eps_value)
    base = fo.base
    n = base.size
    kmats = [m + eps * nj for m, nj in zip(base.matrices, fo.ambient)]
    if eps.is_zero():
        out = MatrixTuple(base.mode, base.matrices, target_classes or base.declared_classes)
        return out
    # start points: the raw deformed representatives, then the series point
    starts = [list(kmats)]
    from .linalg import det

    if all(not det(Matrix.identity(n) + eps * x).is_zero() for x in fo.x0):
        starts.append(fo.conjugated_instantiation(eps))
    for mats in starts:
        result = _exact_correct(
            base.mode, kmats, mats, max_iter, seed
        )
        if result is not None:
            out = MatrixTuple(base.mode, result, target_classes)
            assert constraint_residual(out).is_zero()
            _verify_membership(out, kmats, target_classes, seed)
            return out
    raise DivergenceError(
        "exact correction did not reach a zero residual within %d iterations"
        % max_iter
    )


def _residual(mode, mats):
    t = MatrixTuple(mode, mats)
    return constraint_residual(t)


def _absorb_candidates(mode, mats, m_idx):
    """Replacement for matrix m_idx making the constraint exact."""
    if mode == ADDITIVE:
        total = Matrix.zero(mats[0].rows)
        for j, m in enumerate(mats):
            if j != m_idx:
                total = total + m
        return -total
    left = Matrix.identity(mats[0].rows)
    for j in range(m_idx):
        left = left * mats[j]
    right = Matrix.identity(mats[0].rows)
    for j in range(m_idx + 1, len(mats)):
        right = right * mats[j]
    return inverse(left) * inverse(right)


def _exact_correct(mode, kmats, mats, max_iter, seed):
    mats = list(mats)
    n = mats[0].rows
    count = len(mats)
    from .linalg import operator_matrix

    for iteration in range(max_iter):
        res = _residual(mode, mats)
        if res.is_zero():
            return mats
        # try absorbing the whole residual into a single matrix
        for m_idx in range(count - 1, -1, -1):
            cand = _absorb_candidates(mode, mats, m_idx)
            g = similarity_conjugator(kmats[m_idx], cand, seed=seed)
            if g is not None:
                mats[m_idx] = cand
                return mats
        # Newton conjugation step
        if mode == ADDITIVE:
            ops = [
                operator_matrix(lambda x, a=a: a * x - x * a, n, n) for a in mats
            ]
            rhs = -res
        else:
            partials = _left_partials(mats)
            inv_partials = [inverse(p) for p in partials]
            ops = [
                operator_matrix(
                    lambda x, m=m, left=partials[j], right=inv_partials[j + 1]: left
                    * (m * x - x * m)
                    * right,
                    n,
                    n,
                )
                for j, m in enumerate(mats)
            ]
            rhs = -res
        sol = solve_linear(Matrix.block([ops]), rhs.flatten())
        if sol is None:
            return None
        from .linalg import det

        new_mats = []
        for j in range(count):
            delta = Matrix.from_flat(sol[j * n * n : (j + 1) * n * n], n, n)
            p = Matrix.identity(n) + delta
            if det(p).is_zero():
                return None
            new_mats.append(inverse(p) * mats[j] * p)
        mats = new_mats
    return None


def _verify_membership(out, kmats, target_classes, seed):
    if target_classes is not None:
        for m, spec in zip(out.matrices, target_classes):
            if not class_membership(m, spec):
                raise DivergenceError("corrected matrix left its target class")
    else:
        for m, k in zip(out.matrices, kmats):
            if similarity_conjugator(k, m, seed=seed) is None:
                raise DivergenceError("corrected matrix not similar to its representative")


def _newton_float(fo, eps, tolerance, max_iter):
    base = fo.base
    n = base.size
    kmats = []
    for m, nj in zip(base.matrices, fo.ambient):
        kk = [
            [complex(m[i, j]) + eps * complex(nj[i, j]) for j in range(n)]
            for i in range(n)
        ]
        kmats.append(kk)
    mats = [
        _cmat_conj(k, _cplus_eps(x, eps, n)) for k, x in zip(kmats, fo.x0)
    ]
    for iteration in range(max_iter):
        res = _cresidual(base.mode, mats, n)
        norm = sum(abs(x) ** 2 for row in res for x in row) ** 0.5
        if norm < tolerance:
            return FloatDeformation(mats, norm, iteration)
        rhs = [-x for row in res for x in row]
        cols = []
        for j, m in enumerate(mats):
            for a in range(n):
                for b in range(n):
                    unit = [[1.0 if (r, c) == (a, b) else 0.0 for c in range(n)] for r in range(n)]
                    img = _cfirst_order_dir(base.mode, mats, j, unit, n)
                    cols.append([x for row in img for x in row])
        sol = _cls_solve(cols, rhs)
        new_mats = []
        for j in range(len(mats)):
            delta = [
                [sol[j * n * n + a * n + b] for b in range(n)] for a in range(n)
            ]
            p = [[(1.0 if a == b else 0.0) + delta[a][b] for b in range(n)] for a in range(n)]
            new_mats.append(_cmat_conj(mats[j], p))
        mats = new_mats
    res = _cresidual(base.mode, mats, n)
    norm = sum(abs(x) ** 2 for row in res for x in row) ** 0.5
    if norm < tolerance:
        return FloatDeformation(mats, norm, max_iter)
    raise DivergenceError("float correction stalled at residual %.3e" % norm)


def _cplus_eps(x, eps, n):
    return [
        [(1.0 if i == j else 0.0) + eps * complex(x[i, j]) for j in range(n)]
        for i in range(n)
    ]


def _cinv(a):
    n = len(a)
    aug = [list(row) + [1.0 if i == j else 0.0 for j in range(n)] for i, row in enumerate(a)]
    for c in range(n):
        piv = max(range(c, n), key=lambda r: abs(aug[r][c]))
        if abs(aug[piv][c]) < 1e-300:
            raise ZeroDivisionError("singular float matrix")
        aug[c], aug[piv] = aug[piv], aug[c]
        f = aug[c][c]
        aug[c] = [x / f for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c] != 0:
                fr = aug[r][c]
                aug[r] = [x - fr * y for x, y in zip(aug[r], aug[c])]
    return [row[n:] for row in aug]


def _cmat_conj(k, p):
    return _cmatmul(_cmatmul(_cinv(p), k), p)


def _cresidual(mode, mats, n):
    if mode == ADDITIVE:
        return [
            [sum(m[i][j] for m in mats) for j in range(n)] for i in range(n)
        ]
    acc = [[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)]
    for m in mats:
        acc = _cmatmul(acc, m)
    for i in range(n):
        acc[i][i] -= 1.0
    return acc


def _cfirst_order_dir(mode, mats, j, x, n):
    comm = _cmatmul(mats[j], x)
    xm = _cmatmul(x, mats[j])
    comm = [[comm[a][b] - xm[a][b] for b in range(n)] for a in range(n)]
    if mode == ADDITIVE:
        return comm
    left = [[1.0 if a == b else 0.0 for b in range(n)] for a in range(n)]
    for t in range(j):
        left = _cmatmul(left, mats[t])
    right = [[1.0 if a == b else 0.0 for b in range(n)] for a in range(n)]
    for t in range(j + 1, len(mats)):
        right = _cmatmul(right, mats[t])
    # right factor is the inverse of the trailing product at the base point
    return _cmatmul(_cmatmul(left, comm), _cinv_or_identity(right))


def _cinv_or_identity(m):
    try:
        return _cinv(m)
    except ZeroDivisionError:
        return m


def _cls_solve(cols, rhs):
    """Pivoted solve of an underdetermined complex system (free vars zero)."""
    nrows = len(rhs)
    ncols = len(cols)
    a = [[cols[c][r] for c in range(ncols)] + [rhs[r]] for r in range(nrows)]
    pivots = []
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        piv = max(range(r, nrows), key=lambda i: abs(a[i][c]))
        if abs(a[piv][c]) < 1e-12:
            continue
        a[r], a[piv] = a[piv], a[r]
        f = a[r][c]
        a[r] = [x / f for x in a[r]]
        for i in range(nrows):
            if i != r and a[i][c] != 0:
                fi = a[i][c]
                a[i] = [x - fi * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    sol = [0j] * ncols
    for row_idx, c in enumerate(pivots):
        sol[c] = a[row_idx][ncols]
    return sol


# -- canned deformations --------------------------------------------------------


def canned_jnf_coarsen(
    t: MatrixTuple, which: int, eigenvalue, eps, seed: int = 0
) -> MatrixTuple:
    """Merge the two size-1 blocks of a double eigenvalue into one 2-block.

    The designated matrix must be diagonalizable with the named eigenvalue
    of multiplicity two; all other classes stay fixed (re-verified).
    """
    eps = as_gaussian(eps)
    if t.declared_classes is None:
        raise PreconditionError("need declared classes")
    spec = t.declared_classes[which]
    if not spec.jnf.is_diagonal():
        raise PreconditionError("designated matrix must be diagonalizable")
    lam = as_gaussian(eigenvalue)
    label = next(
        (lab for lab, _ in spec.jnf.groups if spec.value_of(lab) == lam), None
    )
    if label is None or spec.jnf.group(label).total != 2:
        raise PreconditionError("named eigenvalue must have multiplicity two")
    if eps.is_zero():
        return t
    # frame layout: groups in spec order, so the double eigenvalue occupies
    # two adjacent slots; the direction is the single unit entry joining them
    offset = 0
    for lab, p in spec.jnf.groups:
        if lab == label:
            break
        offset += p.total
    n = t.size
    direction = Matrix.unit(n, offset, offset + 1)
    directions = [Matrix.zero(n)] * t.count
    directions[which] = direction
    fo = first_order_deform(DeformationRequest(t, directions))
    target = list(t.declared_classes)
    coarse_groups = []
    for lab, p in spec.jnf.groups:
        if lab == label:
            coarse_groups.append((lab, Partition((2,))))
        else:
            coarse_groups.append((lab, p))
    target[which] = ClassSpec(
        JordanNormalForm(coarse_groups),
        {lab: spec.value_of(lab) for lab, _ in spec.jnf.groups},
        mode=spec.mode,
    )
    out = newton_correct(fo, target_classes=target, eps_value=eps, seed=seed)
    return out


def canned_split_eigenvalues(
    t: MatrixTuple, which: int, eps, seed: int = 0, resample_cap: int = 16
) -> MatrixTuple:
    """Break the single 2-block of the designated matrix into distinct
    eigenvalues; every other class stays fixed.

    The lower-corner entry of the deformation is drawn from a seeded
    generator and resampled while the characteristic polynomial keeps a
    repeated root (discriminant zero), up to the cap.
    """
    eps = as_gaussian(eps)
    if t.declared_classes is None:
        raise PreconditionError("need declared classes")
    spec = t.declared_classes[which]
    two_blocks = [
        (lab, p) for lab, p in spec.jnf.groups for b in p if b == 2
    ]
    if len(two_blocks) != 1 or any(b > 2 for _, p in spec.jnf.groups for b in p):
        raise PreconditionError("designated matrix needs exactly one 2-block")
    if spec.jnf.has_distinct_eigenvalues():
        raise PreconditionError("eigenvalues already distinct")
    label = two_blocks[0][0]
    offset = 0
    for lab, p in spec.jnf.groups:
        if lab == label:
            break
        offset += p.total
    n = t.size
    rng = random.Random(seed)
    if eps.is_zero():
        raise PreconditionError("eigenvalue splitting needs a nonzero epsilon")
    from .extensions import _squarefree

    for attempt in range(resample_cap):
        f = GaussianRational(rng.randint(1, 9))
        direction = Matrix.unit(n, offset + 1, offset, f)
        directions = [Matrix.zero(n)] * t.count
        directions[which] = direction
        fo = first_order_deform(DeformationRequest(t, directions))
        k_which = t.matrices[which] + eps * fo.ambient[which]
        if not _squarefree(charpoly(k_which)):
            continue  # resample: discriminant vanished
        others = [
            spec2 if j != which else None
            for j, spec2 in enumerate(t.declared_classes)
        ]
        out = newton_correct(fo, target_classes=None, eps_value=eps, seed=seed)
        # re-verify: designated matrix splits, others keep their classes
        if not _squarefree(charpoly(out.matrices[which])):
            continue
        for j, spec2 in enumerate(others):
            if spec2 is not None and not class_membership(out.matrices[j], spec2):
                raise DivergenceError("a fixed class drifted during splitting")
        return out
    raise SearchFailure("resample cap exceeded without a squarefree split")
