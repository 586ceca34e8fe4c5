"""Exact verification of concrete matrix tuples.

Everything here is decision-grade: residuals, membership, centralizers,
irreducibility and tangent dimensions are computed over the field, never
numerically.
"""

from __future__ import annotations

import random

from .criteria import ClassSpec
from .errors import PreconditionError
from .genericity import ADDITIVE, MULTIPLICATIVE
from .linalg import inverse, kernel_basis, operator_matrix, rank
from .matrices import Matrix
from .scalars import GaussianRational, as_gaussian, ONE, ZERO


class MatrixTuple:
    """p+1 square matrices meant to sum to zero or multiply to identity.

    The constraint is not enforced at construction (the residual operation
    reports violations); declared classes are optional and only consulted
    by membership checks.
    """

    __slots__ = ("mode", "matrices", "declared_classes")

    def __init__(self, mode, matrices, declared_classes=None):
        if mode not in (ADDITIVE, MULTIPLICATIVE):
            raise ValueError("bad mode %r" % mode)
        matrices = tuple(matrices)
        if not matrices:
            raise ValueError("empty tuple")
        n = matrices[0].rows
        for m in matrices:
            if not m.is_square() or m.rows != n:
                raise ValueError("matrices must be square of equal size")
        if declared_classes is not None:
            declared_classes = tuple(declared_classes)
            if len(declared_classes) != len(matrices):
                raise ValueError("one declared class per matrix")
        object.__setattr__(self, "mode", mode)
        object.__setattr__(self, "matrices", matrices)
        object.__setattr__(self, "declared_classes", declared_classes)

    def __setattr__(self, name, value):
        raise AttributeError("MatrixTuple is immutable")

    @property
    def size(self) -> int:
        return self.matrices[0].rows

    @property
    def count(self) -> int:
        return len(self.matrices)

    def conjugated(self, g: Matrix) -> "MatrixTuple":
        """Simultaneous conjugation g^-1 A g of every matrix."""
        gi = inverse(g)
        return MatrixTuple(
            self.mode, [gi * m * g for m in self.matrices], self.declared_classes
        )

    def replace(self, index: int, matrix: Matrix) -> "MatrixTuple":
        mats = list(self.matrices)
        mats[index] = matrix
        return MatrixTuple(self.mode, mats, self.declared_classes)

    def with_classes(self, classes) -> "MatrixTuple":
        return MatrixTuple(self.mode, self.matrices, classes)

    def __eq__(self, other):
        return (
            isinstance(other, MatrixTuple)
            and self.mode == other.mode
            and self.matrices == other.matrices
        )

    def __repr__(self):
        return "MatrixTuple(%s, %d matrices of size %d)" % (
            self.mode,
            self.count,
            self.size,
        )


def constraint_residual(t: MatrixTuple) -> Matrix:
    """Sum of the matrices, or their product minus identity."""
    if t.mode == ADDITIVE:
        acc = Matrix.zero(t.size)
        for m in t.matrices:
            acc = acc + m
        return acc
    acc = Matrix.identity(t.size)
    for m in t.matrices:
        acc = acc * m
    return acc - Matrix.identity(t.size)


def class_membership(m: Matrix, spec: ClassSpec) -> bool:
    """Rank-ladder test of membership in the class of the given shape/values.

    For every declared eigenvalue the ranks of (M - lambda I)^s must match
    the values the block partition implies; matching ladders at all declared
    eigenvalues exhaust the spectrum since multiplicities sum to n.
    """
    if spec.exponent_form:
        raise PreconditionError(
            "membership needs concrete eigenvalues, not exponents"
        )
    n = m.rows
    if not m.is_square() or spec.size != n:
        return False
    ident = Matrix.identity(n)
    for label, partition in spec.jnf.groups:
        lam = spec.value_of(label)
        shifted = m - lam * ident
        power = ident
        for s in range(1, n + 1):
            power = power * shifted
            implied = n - sum(min(b, s) for b in partition)
            if rank(power) != implied:
                return False
    return True


def _commutator_operator(a: Matrix) -> Matrix:
    return operator_matrix(lambda x: a * x - x * a, a.rows, a.cols)


def centralizer_dimension(t: MatrixTuple):
    """Dimension and exact basis of {X : [A_j, X] = 0 for all j}."""
    n = t.size
    ops = [_commutator_operator(m) for m in t.matrices]
    stacked = Matrix.block([[op] for op in ops])
    basis_vecs = kernel_basis(stacked)
    basis = [Matrix.from_flat(v, n, n) for v in basis_vecs]
    return len(basis), basis


def is_irreducible(t: MatrixTuple) -> bool:
    """Burnside test: the unital algebra generated by the tuple must span
    all n x n matrices; computed by iterated span closure."""
    from .linalg import SpanSifter

    n = t.size
    sifter = SpanSifter(n * n)
    worklist = [Matrix.identity(n)]
    sifter.add(worklist[0].flatten())
    while worklist:
        current = worklist.pop()
        for g in t.matrices:
            prod = g * current
            if sifter.add(prod.flatten()):
                worklist.append(prod)
        if sifter.dimension == n * n:
            return True
    return sifter.dimension == n * n


def commutator_map_rank(t: MatrixTuple) -> int:
    """Rank of (X_1, ..., X_p) -> sum of [A_j, X_j] over the first p matrices.

    The image is automatically traceless, and scalar inputs are killed, so
    the rank over all inputs equals the rank restricted to traceless ones;
    surjectivity onto the traceless matrices means rank n^2 - 1.
    """
    if t.count < 2:
        return 0
    ops = [_commutator_operator(m) for m in t.matrices[:-1]]
    stacked = Matrix.block([ops])
    return rank(stacked)


def _left_partials(t: MatrixTuple):
    """P_0 = I, P_j = M_1 ... M_j for the product-constraint linearization."""
    out = [Matrix.identity(t.size)]
    for m in t.matrices:
        out.append(out[-1] * m)
    return out


def tangent_dimension(t: MatrixTuple) -> int:
    """Dimension of the solution variety's tangent space at this tuple.

    Tangent vectors are tuples (v_j) with v_j in the class-orbit direction
    [A_j, X_j], subject to the linearized constraint: zero sum, or for
    products sum of P_{j-1} [M_j, X_j] P_j^{-1} equal to zero.
    """
    if not constraint_residual(t).is_zero():
        raise PreconditionError("tangent dimension needs a constraint-satisfying tuple")
    n = t.size
    if t.mode == ADDITIVE:
        ops = [_commutator_operator(m) for m in t.matrices]
    else:
        partials = _left_partials(t)
        inv_partials = [inverse(p) for p in partials]
        ops = []
        for j, m in enumerate(t.matrices):
            left = partials[j]
            right = inv_partials[j + 1]
            ops.append(
                operator_matrix(
                    lambda x, m=m, left=left, right=right: left * (m * x - x * m) * right,
                    n,
                    n,
                )
            )
    stacked = Matrix.block([ops])
    solution_dim = len(kernel_basis(stacked))
    fibre_dim = sum(len(kernel_basis(op)) for op in (_commutator_operator(m) for m in t.matrices))
    return solution_dim - fibre_dim


def similarity_conjugator(a: Matrix, b: Matrix, seed: int = 0, attempts: int = 48):
    """Invertible g with g^-1 a g = b, or None when not found.

    Solves the linear equation a g = g b exactly, then looks for an
    invertible point of the solution space (deterministic seeded search).
    A returned conjugator is always verified; None is a best-effort answer,
    reliable in practice because a nonzero determinant polynomial on the
    solution space misses at most a hypersurface of sample points.
    """
    if a.rows != b.rows or not a.is_square() or not b.is_square():
        return None
    from .linalg import charpoly

    if charpoly(a) != charpoly(b):
        return None
    n = a.rows
    op = operator_matrix(lambda x: a * x - x * b, n, n)
    sol = kernel_basis(op)
    if not sol:
        return None
    mats = [Matrix.from_flat(v, n, n) for v in sol]
    from .linalg import det

    for g in mats:
        if not det(g).is_zero():
            return g
    rng = random.Random(seed)
    span = 1
    for k in range(attempts):
        if k and k % 8 == 0:
            span += 1
        g = Matrix.zero(n)
        for m in mats:
            g = g + GaussianRational(rng.randint(-span, span)) * m
        if not det(g).is_zero():
            return g
    return None


def verify_tuple(t: MatrixTuple):
    """Full certificate-style report used by the CLI and the solver."""
    residual = constraint_residual(t)
    cent_dim, _ = centralizer_dimension(t)
    report = {
        "size": t.size,
        "count": t.count,
        "mode": t.mode,
        "residual_zero": residual.is_zero(),
        "centralizer_dimension": cent_dim,
        "irreducible": is_irreducible(t),
    }
    if residual.is_zero():
        report["tangent_dimension"] = tangent_dimension(t)
    if t.declared_classes is not None:
        report["memberships"] = [
            class_membership(m, spec)
            for m, spec in zip(t.matrices, t.declared_classes)
        ]
    return report
