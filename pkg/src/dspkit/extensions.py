"""Extensions of matrix-tuple representations.

For two constraint-satisfying tuples P1 (size m1) and P2 (size m2) whose
last matrices have disjoint, simple spectra, the non-split block
upper-triangular combinations in the exact direct-sum classes are
classified by the quotient R/Q: R collects per-index Sylvester images with
vanishing (linearized) total, Q the simultaneous-conjugation ones.
"""

from __future__ import annotations

import itertools
import random

from .criteria import ClassSpec
from .errors import PreconditionError, SearchFailure
from .genericity import ADDITIVE, MULTIPLICATIVE
from .jnf import jnf_of_matrix
from .linalg import (
    SpanSifter,
    charpoly,
    det,
    inverse,
    kernel_basis,
    operator_matrix,
    rank,
    solve_linear,
)
from .matrices import Matrix
from .scalars import GaussianRational, ZERO, ONE
from .tuples import (
    MatrixTuple,
    centralizer_dimension,
    class_membership,
    constraint_residual,
    is_irreducible,
)


def _poly_gcd_degree(p, q):
    """Degree of gcd of two polynomials given as coefficient lists."""
    a = [c for c in p]
    b = [c for c in q]

    def deg(x):
        d = len(x) - 1
        while d >= 0 and x[d].is_zero():
            d -= 1
        return d

    while deg(b) >= 0:
        da, db = deg(a), deg(b)
        if da < db:
            a, b = b, a
            continue
        lead = b[deg(b)]
        shift = da - db
        factor = a[da] / lead
        for k in range(db + 1):
            a[k + shift] = a[k + shift] - factor * b[k]
        if deg(a) < deg(b):
            a, b = b, a
    return deg(a)


def _squarefree(p) -> bool:
    dp = [GaussianRational(k) * p[k] for k in range(1, len(p))]
    return _poly_gcd_degree(p, dp) <= 0


class RepresentationPair:
    """Ordered pair of tuples eligible for the extension calculus."""

    __slots__ = ("p1", "p2")

    def __init__(self, p1: MatrixTuple, p2: MatrixTuple):
        if p1.mode != p2.mode:
            raise PreconditionError("pair needs one mode")
        if p1.count != p2.count:
            raise PreconditionError("pair needs equal tuple lengths")
        for t, name in ((p1, "P1"), (p2, "P2")):
            if not constraint_residual(t).is_zero():
                raise PreconditionError("%s violates its constraint" % name)
        c1 = charpoly(p1.matrices[-1])
        c2 = charpoly(p2.matrices[-1])
        if not (_squarefree(c1) and _squarefree(c2)):
            raise PreconditionError("last matrices need distinct eigenvalues")
        if _poly_gcd_degree(c1, c2) > 0:
            raise PreconditionError("last matrices share an eigenvalue")
        object.__setattr__(self, "p1", p1)
        object.__setattr__(self, "p2", p2)

    def __setattr__(self, name, value):
        raise AttributeError("RepresentationPair is immutable")

    @property
    def mode(self):
        return self.p1.mode

    @property
    def sizes(self):
        return self.p1.size, self.p2.size

    @property
    def count(self):
        return self.p1.count

    def flipped(self) -> "RepresentationPair":
        return RepresentationPair(self.p2, self.p1)

    def require_trivial_centralizers(self):
        for t, name in ((self.p1, "P1"), (self.p2, "P2")):
            if centralizer_dimension(t)[0] != 1:
                raise PreconditionError("%s has a non-trivial centralizer" % name)


class ExtensionClass:
    """Representative of an extension: one m1 x m2 block per matrix index."""

    __slots__ = ("blocks",)

    def __init__(self, blocks):
        blocks = tuple(blocks)
        if not blocks:
            raise ValueError("empty extension class")
        r, c = blocks[0].rows, blocks[0].cols
        if any(b.rows != r or b.cols != c for b in blocks):
            raise ValueError("blocks must share dimensions")
        object.__setattr__(self, "blocks", blocks)

    def __setattr__(self, name, value):
        raise AttributeError("ExtensionClass is immutable")

    def is_zero(self):
        return all(b.is_zero() for b in self.blocks)

    def flatten(self):
        out = []
        for b in self.blocks:
            out.extend(b.flatten())
        return tuple(out)

    def scaled(self, factor) -> "ExtensionClass":
        return ExtensionClass([factor * b for b in self.blocks])


def _sylvester_ops(pair: RepresentationPair):
    """Per-index operators X -> A^1_j X - X A^2_j on m1 x m2 matrices."""
    m1, m2 = pair.sizes
    ops = []
    for a, b in zip(pair.p1.matrices, pair.p2.matrices):
        ops.append(operator_matrix(lambda x, a=a, b=b: a * x - x * b, m1, m2))
    return ops


def _sum_weights(pair: RepresentationPair):
    """Left/right weights turning per-index blocks into the total constraint.

    Additive: identity weights (plain sum).  Multiplicative: the block of the
    full product contributed by index j is P^1_{j-1} B_j S^2_{j+1} with
    P^1 the left partial products of the first tuple and S^2 the right
    partial products of the second.
    """
    m1, m2 = pair.sizes
    k = pair.count
    if pair.mode == ADDITIVE:
        return [Matrix.identity(m1)] * k, [Matrix.identity(m2)] * k
    lefts = [Matrix.identity(m1)]
    for m in pair.p1.matrices[:-1]:
        lefts.append(lefts[-1] * m)
    rights = [Matrix.identity(m2)] * k
    acc = Matrix.identity(m2)
    for j in range(k - 1, -1, -1):
        rights[j] = acc
        acc = pair.p2.matrices[j] * acc
    return lefts, rights


def _constraint_operator(pair: RepresentationPair):
    """Operator taking stacked (X_1..X_{p+1}) to the total linearized block."""
    m1, m2 = pair.sizes
    ops = _sylvester_ops(pair)
    lefts, rights = _sum_weights(pair)
    weighted = []
    for j, op in enumerate(ops):
        wop = operator_matrix(
            lambda x, j=j: lefts[j]
            * (pair.p1.matrices[j] * x - x * pair.p2.matrices[j])
            * rights[j],
            m1,
            m2,
        )
        weighted.append(wop)
    return Matrix.block([weighted]), ops


def _q_space_vectors(pair: RepresentationPair, ops):
    """Spanning vectors of Q: simultaneous-conjugation block tuples."""
    m1, m2 = pair.sizes
    vectors = []
    for i in range(m1):
        for j in range(m2):
            x = Matrix(
                [
                    [ONE if (r, c) == (i, j) else ZERO for c in range(m2)]
                    for r in range(m1)
                ]
            )
            blocks = [
                a * x - x * b
                for a, b in zip(pair.p1.matrices, pair.p2.matrices)
            ]
            vectors.append(ExtensionClass(blocks).flatten())
    return vectors


def _r_space(pair: RepresentationPair):
    """Exact basis of R as flattened block tuples, plus the per-index data."""
    m1, m2 = pair.sizes
    k = pair.count
    constraint_op, ops = _constraint_operator(pair)
    solutions = kernel_basis(constraint_op)
    sifter = SpanSifter(k * m1 * m2)
    basis = []
    for sol in solutions:
        blocks = []
        for j in range(k):
            x = Matrix.from_flat(sol[j * m1 * m2 : (j + 1) * m1 * m2], m1, m2)
            a, b = pair.p1.matrices[j], pair.p2.matrices[j]
            blocks.append(a * x - x * b)
        vec = ExtensionClass(blocks).flatten()
        if sifter.add(vec):
            basis.append(ExtensionClass(blocks))
    return basis, ops


def ext_dimension(pair: RepresentationPair) -> int:
    """dim of the extension space, computed two ways and cross-asserted.

    Closed form: sum over indices of (d'_j - d^1_j - d^2_j)/2 minus 2 m1 m2,
    every class dimension read off the explicit matrices; linear-algebra
    route: dim R - dim Q on the defining systems.
    """
    pair.require_trivial_centralizers()
    m1, m2 = pair.sizes
    closed = 0
    for a, b in zip(pair.p1.matrices, pair.p2.matrices):
        direct = Matrix.block(
            [[a, Matrix.zero(m1, m2)], [Matrix.zero(m2, m1), b]]
        )
        d_direct = (m1 + m2) ** 2 - _commutant_dim(direct)
        d1 = m1 * m1 - _commutant_dim(a)
        d2 = m2 * m2 - _commutant_dim(b)
        closed += (d_direct - d1 - d2) // 2
    closed -= 2 * m1 * m2

    r_basis, ops = _r_space(pair)
    # dim Q = m1 m2: the simultaneous-X map is injective because the last
    # Sylvester operator has trivial kernel (disjoint spectra); assert it.
    sim_kernel = kernel_basis(Matrix.block([[op] for op in ops]))
    assert not sim_kernel, "simultaneous Sylvester kernel should be trivial"
    dim_q = m1 * m2
    dim_r = len(r_basis)
    # per-index lower bound: dim Im(Sylvester_j) >= r_j^1 * m2 for j <= p
    if pair.p1.declared_classes is not None:
        for j in range(pair.count - 1):
            rj = pair.p1.declared_classes[j].defect_r()
            assert rank(ops[j]) >= rj * m2
    linear = dim_r - dim_q
    assert closed == linear, "extension dimension routes disagree (%d vs %d)" % (
        closed,
        linear,
    )
    return linear


def _commutant_dim(a: Matrix) -> int:
    return len(kernel_basis(operator_matrix(lambda x: a * x - x * a, a.rows, a.cols)))


def extension_space_basis(pair: RepresentationPair):
    """Representatives of a basis of R/Q, as ExtensionClass objects."""
    xi = ext_dimension(pair)
    m1, m2 = pair.sizes
    r_basis, ops = _r_space(pair)
    sifter = SpanSifter(pair.count * m1 * m2)
    for v in _q_space_vectors(pair, ops):
        sifter.add(v)
    out = []
    for e in r_basis:
        vec = e.flatten()
        if sifter.add(vec):
            out.append(e)
    assert len(out) == xi
    return out


def _splitting_witness(pair: RepresentationPair, e: ExtensionClass):
    """Simultaneous X with blocks A^1_j X - X A^2_j = B_j, if one exists."""
    ops = _sylvester_ops(pair)
    stacked = Matrix.block([[op] for op in ops])
    target = []
    for b in e.blocks:
        target.extend(b.flatten())
    return solve_linear(stacked, target)


def _parse_label_value(label):
    from .scalars import parse_scalar

    return parse_scalar(label)


def _validate_blocks(pair: RepresentationPair, e: ExtensionClass):
    m1, m2 = pair.sizes
    if len(e.blocks) != pair.count:
        raise PreconditionError("one block per matrix index required")
    if e.blocks[0].rows != m1 or e.blocks[0].cols != m2:
        raise PreconditionError("block shape must be m1 x m2")
    lefts, rights = _sum_weights(pair)
    total = Matrix.zero(m1, m2)
    for j, b in enumerate(e.blocks):
        total = total + lefts[j] * b * rights[j]
    if not total.is_zero():
        raise PreconditionError("blocks violate the total (linearized) constraint")


def build_semidirect(pair: RepresentationPair, e: ExtensionClass) -> MatrixTuple:
    """Block upper-triangular tuple over P1, P2 with the given blocks.

    The class is required to be non-split: no single conjugation may
    block-diagonalize the result.  Classes of the built matrices are
    computed from the component eigenvalues when those are declared.
    """
    _validate_blocks(pair, e)
    if _splitting_witness(pair, e) is not None:
        raise PreconditionError("extension splits: blocks are a simultaneous image")
    m1, m2 = pair.sizes
    mats = []
    for j in range(pair.count):
        mats.append(
            Matrix.block(
                [
                    [pair.p1.matrices[j], e.blocks[j]],
                    [Matrix.zero(m2, m1), pair.p2.matrices[j]],
                ]
            )
        )
    out = MatrixTuple(pair.mode, mats)
    assert constraint_residual(out).is_zero()
    classes = _built_classes(pair, mats)
    if classes is not None:
        out = out.with_classes(classes)
    return out


def _built_classes(pair: RepresentationPair, mats):
    """Exact classes of built matrices from the components' eigenvalues."""
    if pair.p1.declared_classes is None or pair.p2.declared_classes is None:
        return None
    classes = []
    for j, m in enumerate(mats):
        values = sorted(
            set(pair.p1.declared_classes[j].values.values())
            | set(pair.p2.declared_classes[j].values.values()),
            key=str,
        )
        jnf = jnf_of_matrix(m, values)
        classes.append(
            ClassSpec(
                jnf,
                {label: _parse_label_value(label) for label, _ in jnf.groups},
                mode=pair.mode,
            )
        )
    return classes


def geq3_case(pair: RepresentationPair):
    """Lowest-numbered trivial-centralizer guarantee that applies, or None.

    The six cases combine size thresholds with how much the two component
    tuples differ at indices below the last one.
    """
    pair.require_trivial_centralizers()
    m1, m2 = pair.sizes
    p = pair.count - 1
    a1, a2 = pair.p1.matrices, pair.p2.matrices
    if m1 >= 3 and m2 >= 2:
        return 1
    if m1 == 2 and m2 == 2:
        if any(not _same_class_2x2(a1[j], a2[j]) for j in range(p)):
            return 2
    if m1 == 1 and m2 == 1:
        if sum(1 for j in range(p) if a1[j] != a2[j]) >= 2:
            return 3
    if m1 == 2 and m2 == 1:
        for j in range(p):
            b = a2[j][0, 0]
            if not det(a1[j] - b * Matrix.identity(2)).is_zero():
                return 4
    if m1 > 1 and m2 == 1:
        if pair.p1.declared_classes is None:
            raise PreconditionError("case 5 needs declared classes on P1")
        r_sum = sum(
            pair.p1.declared_classes[j].defect_r() for j in range(p)
        )
        if r_sum > m1:
            return 5
    if m1 == 2 and m2 == 2:
        nonscalar = sum(
            1
            for j in range(p)
            if not a1[j].is_scalar() or not a2[j].is_scalar()
        )
        if nonscalar >= 3:
            return 6
    return None


def _same_class_2x2(a: Matrix, b: Matrix) -> bool:
    """Exact 2x2 class equality: same char poly, and scalar iff scalar."""
    if charpoly(a) != charpoly(b):
        return False
    return a.is_scalar() == b.is_scalar()


def split_direct_sum(t: MatrixTuple, max_depth: int = 16):
    """Split a non-trivial-centralizer tuple into trivial-centralizer blocks.

    Needs the last matrix to have n distinct (known) eigenvalues: any
    centralizer element is then simultaneously diagonalizable with it, and
    grouping coordinates by a non-scalar centralizer element's eigenvalues
    block-diagonalizes the tuple.  Returns (conjugator g, sub-tuples) with
    g^-1 t g block diagonal, or None when the centralizer is already trivial.
    """
    eigenvalues = _last_matrix_eigenvalues(t)
    if len(set(eigenvalues)) != t.size:
        raise PreconditionError("last matrix has repeated eigenvalues")
    dim, _ = centralizer_dimension(t)
    if dim == 1:
        return None
    g, parts = _split_rec(t, max_depth)
    return g, parts


def _last_matrix_eigenvalues(t: MatrixTuple):
    if t.declared_classes is not None:
        return list(t.declared_classes[-1].eigenvalue_multiset())
    last = t.matrices[-1]
    if all(
        last[i, j].is_zero()
        for i in range(t.size)
        for j in range(t.size)
        if i != j
    ):
        return [last[i, i] for i in range(t.size)]
    raise PreconditionError(
        "need declared classes or a literal diagonal last matrix"
    )


def _split_rec(t: MatrixTuple, depth: int):
    n = t.size
    if depth <= 0:
        raise SearchFailure("split recursion depth exceeded")
    dim, _ = centralizer_dimension(t)
    if dim == 1:
        return Matrix.identity(n), [t]
    # diagonalize the last matrix exactly
    eigenvalues = _last_matrix_eigenvalues(t)
    w_cols = []
    last = t.matrices[-1]
    for lam in eigenvalues:
        vecs = kernel_basis(last - lam * Matrix.identity(n))
        if len(vecs) != 1:
            raise PreconditionError("last matrix has repeated eigenvalues")
        w_cols.append(vecs[0])
    w = Matrix(list(zip(*w_cols)))
    conj = t.conjugated(w)
    conj = MatrixTuple(conj.mode, conj.matrices)  # declared classes lose order
    _, basis = centralizer_dimension(conj)
    z = next((zc for zc in basis if not zc.is_scalar()), None)
    if z is None:
        raise SearchFailure("no non-scalar centralizer element found")
    # commuting with the diagonal distinct last matrix makes z diagonal
    diag = [z[i, i] for i in range(n)]
    order = sorted(range(n), key=lambda i: str(diag[i]))
    perm = Matrix(
        [[ONE if order[c] == r else ZERO for c in range(n)] for r in range(n)]
    )
    conj2 = conj.conjugated(perm)
    groups = []
    for i, idx in enumerate(order):
        if i == 0 or diag[idx] != diag[order[i - 1]]:
            groups.append([i])
        else:
            groups[-1].append(i)
    total_g = w * perm
    parts = []
    block_gs = []
    offset = 0
    for grp in groups:
        sel = list(range(offset, offset + len(grp)))
        sub = MatrixTuple(
            t.mode,
            [m.submatrix(sel, sel) for m in conj2.matrices],
        )
        sub_g, sub_parts = _split_rec(sub, depth - 1)
        block_gs.append(sub_g)
        parts.extend(sub_parts)
        offset += len(grp)
    blockdiag = _block_diag(block_gs)
    return total_g * blockdiag, parts


def _block_diag(blocks):
    n = sum(b.rows for b in blocks)
    out = [[ZERO] * n for _ in range(n)]
    off = 0
    for b in blocks:
        for i in range(b.rows):
            for j in range(b.cols):
                out[off + i][off + j] = b[i, j]
        off += b.rows
    return Matrix(out)


def deform_to_irreducible(
    pair: RepresentationPair, e: ExtensionClass, seed: int = 0, tries: int = 64
) -> MatrixTuple:
    """Irreducible tuple in the same classes as the semidirect sum.

    Works in the additive mode by combining an upper extension block family
    with a lower one (from the flipped pair) supported on disjoint matrix
    indices: every matrix stays one-side bordered by a Sylvester image, so
    per-matrix classes are exactly the direct-sum ones, while the two
    borders together destroy every candidate invariant subspace.
    """
    if pair.mode != ADDITIVE:
        raise PreconditionError("irreducible deformation implemented for additive mode")
    for t, name in ((pair.p1, "P1"), (pair.p2, "P2")):
        if t.size > 1 and not is_irreducible(t):
            raise PreconditionError("%s must be irreducible or one-dimensional" % name)
    xi = ext_dimension(pair)
    if xi < 2:
        raise PreconditionError("needs extension dimension >= 2, got %d" % xi)
    semidirect = build_semidirect(pair, e)
    target_classes = semidirect.declared_classes
    flipped = pair.flipped()
    upper_basis = [x.flatten() for x in _r_space(pair)[0]]
    lower_basis = [x.flatten() for x in _r_space(flipped)[0]]
    m1, m2 = pair.sizes
    k = pair.count
    rng = random.Random(seed)
    indices = list(range(k))
    for size_b in range(2, k):
        for support_b in itertools.combinations(indices, size_b):
            rest = [j for j in indices if j not in support_b]
            for size_c in range(2, len(rest) + 1):
                for support_c in itertools.combinations(rest, size_c):
                    upper = _restricted_space(upper_basis, k, m1 * m2, support_b)
                    lower = _restricted_space(lower_basis, k, m2 * m1, support_c)
                    if not upper or not lower:
                        continue
                    built = _try_bordered(
                        pair,
                        upper,
                        lower,
                        target_classes,
                        rng,
                        tries,
                    )
                    if built is not None:
                        return built
    raise SearchFailure(
        "no disjoint-support bordered combination found; "
        "the deformation search failed (existence is not refuted)"
    )


def _restricted_space(basis_vectors, k, block_len, support):
    """Sub-basis of block-tuple vectors vanishing outside the support."""
    if not basis_vectors:
        return []
    zero_positions = [
        j * block_len + t
        for j in range(k)
        if j not in support
        for t in range(block_len)
    ]
    if not zero_positions:
        return list(basis_vectors)
    rows = []
    for pos in zero_positions:
        rows.append([v[pos] for v in basis_vectors])
    coeff_kernel = kernel_basis(Matrix(rows))
    out = []
    for coeffs in coeff_kernel:
        vec = [ZERO] * (k * block_len)
        for c, v in zip(coeffs, basis_vectors):
            if c.is_zero():
                continue
            for idx in range(len(vec)):
                vec[idx] = vec[idx] + c * v[idx]
        if any(not x.is_zero() for x in vec):
            out.append(tuple(vec))
    return out


def _try_bordered(pair, upper_space, lower_space, target_classes, rng, tries):
    m1, m2 = pair.sizes
    k = pair.count
    for attempt in range(tries):
        span = 1 + attempt // 8
        upper = _random_combo(upper_space, rng, span)
        lower = _random_combo(lower_space, rng, span)
        if upper is None or lower is None:
            return None
        mats = []
        for j in range(k):
            b = Matrix.from_flat(
                upper[j * m1 * m2 : (j + 1) * m1 * m2], m1, m2
            )
            c = Matrix.from_flat(
                lower[j * m2 * m1 : (j + 1) * m2 * m1], m2, m1
            )
            mats.append(
                Matrix.block(
                    [[pair.p1.matrices[j], b], [c, pair.p2.matrices[j]]]
                )
            )
        cand = MatrixTuple(pair.mode, mats, target_classes)
        if not constraint_residual(cand).is_zero():
            continue
        if target_classes is not None and not all(
            class_membership(m, spec)
            for m, spec in zip(cand.matrices, target_classes)
        ):
            continue
        if is_irreducible(cand):
            return cand
    return None


def _random_combo(space, rng, span):
    if not space:
        return None
    for _ in range(8):
        coeffs = [GaussianRational(rng.randint(-span, span)) for _ in space]
        vec = [ZERO] * len(space[0])
        for c, v in zip(coeffs, space):
            if c.is_zero():
                continue
            for i in range(len(vec)):
                vec[i] = vec[i] + c * v[i]
        if any(not x.is_zero() for x in vec):
            return vec
    return list(space[0])
