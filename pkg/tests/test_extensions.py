import random
from fractions import Fraction

import pytest

from helpers import one_dim_tuple, rand_trivial_rep, s_triple

from dspkit.criteria import ClassSpec
from dspkit.errors import PreconditionError, SearchFailure
from dspkit.extensions import (
    ExtensionClass,
    RepresentationPair,
    build_semidirect,
    deform_to_irreducible,
    ext_dimension,
    extension_space_basis,
    geq3_case,
    split_direct_sum,
)
from dspkit.genericity import ADDITIVE, MULTIPLICATIVE
from dspkit.linalg import inverse
from dspkit.matrices import Matrix
from dspkit.scalars import GaussianRational
from dspkit.tuples import (
    MatrixTuple,
    centralizer_dimension,
    class_membership,
    constraint_residual,
    is_irreducible,
)


def threestrata_pair():
    return RepresentationPair(
        one_dim_tuple([1, 3, -4]), one_dim_tuple([2, 5, -7])
    )


def quad_pair():
    # all four coordinate pairs distinct, both sums zero
    return RepresentationPair(
        one_dim_tuple([0, 1, 2, -3]), one_dim_tuple([4, -1, -2, -1])
    )


def rep_3dim():
    a1 = Matrix([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    a3 = Matrix.diagonal([1, 2, 3])
    t = MatrixTuple(ADDITIVE, [a1, -a1 - a3, a3])
    assert centralizer_dimension(t)[0] == 1
    return t


def rep_2dim(last=(-4, -5)):
    a1 = Matrix([[0, 1], [0, 0]])
    a3 = Matrix.diagonal(list(last))
    t = MatrixTuple(ADDITIVE, [a1, -a1 - a3, a3])
    assert centralizer_dimension(t)[0] == 1
    return t


# -- pair validation -------------------------------------------------------------


def test_pair_rejects_shared_last_eigenvalue():
    with pytest.raises(PreconditionError):
        RepresentationPair(
            one_dim_tuple([1, 2, -3]), one_dim_tuple([4, -1, -3])
        )
    # equal at all indices below the last forces equal last entries
    with pytest.raises(PreconditionError):
        RepresentationPair(
            one_dim_tuple([1, 2, -3]), one_dim_tuple([1, 2, -3])
        )


def test_pair_rejects_repeated_last_eigenvalues():
    a3 = Matrix.diagonal([1, 1])
    t = MatrixTuple(ADDITIVE, [Matrix([[0, 1], [0, 0]]), -Matrix([[0, 1], [0, 0]]) - a3, a3])
    with pytest.raises(PreconditionError):
        RepresentationPair(t, one_dim_tuple([0, 1, -1]))


def test_pair_rejects_broken_constraint():
    bad = MatrixTuple(ADDITIVE, [Matrix([[1]]), Matrix([[1]]), Matrix([[1]])])
    with pytest.raises(PreconditionError):
        RepresentationPair(bad, one_dim_tuple([2, 5, -7]))


# -- extension dimension -----------------------------------------------------------


def test_xi_threestrata_split():
    assert ext_dimension(threestrata_pair()) == 1


def test_xi_zero_for_single_difference_below_last():
    pair = RepresentationPair(
        one_dim_tuple([1, 5, -6]), one_dim_tuple([2, 5, -7])
    )
    assert ext_dimension(pair) == 0


def test_xi_two_for_quadruple():
    assert ext_dimension(quad_pair()) == 2


def test_xi_multiplicative_one_dims():
    pair = RepresentationPair(
        one_dim_tuple([2, 3, Fraction(1, 6)], mode=MULTIPLICATIVE),
        one_dim_tuple([5, 7, Fraction(1, 35)], mode=MULTIPLICATIVE),
    )
    assert ext_dimension(pair) == 1


def test_xi_symmetric_under_flip():
    for pair in (threestrata_pair(), quad_pair()):
        assert ext_dimension(pair) == ext_dimension(pair.flipped())


def test_xi_random_pairs_cross_asserted():
    # the op asserts closed form == dim R - dim Q internally on every call
    rng = random.Random(77)
    done = 0
    while done < 40:
        p = rng.randint(2, 3)
        m1 = rng.randint(1, 3)
        m2 = rng.randint(1, 3)
        eigs1 = rng.sample(range(-8, 9), m1)
        eigs2 = rng.sample(sorted(set(range(-8, 9)) - set(eigs1)), m2)
        mode = ADDITIVE if rng.random() < 0.7 else MULTIPLICATIVE
        if mode == MULTIPLICATIVE and (0 in eigs1 or 0 in eigs2):
            continue
        if m1 == 1:
            vals = [rng.randint(-5, 5) for _ in range(p)]
            if mode == ADDITIVE:
                vals.append(-sum(vals))
                p1 = one_dim_tuple(vals)
            else:
                vals = [v for v in vals if v != 0] or [1]
                while len(vals) < p:
                    vals.append(1)
                prod = 1
                for v in vals:
                    prod *= Fraction(v)
                vals.append(Fraction(1) / prod)
                p1 = one_dim_tuple(vals, mode=MULTIPLICATIVE)
            eigs1 = [p1.matrices[-1][0, 0]]
        else:
            p1 = rand_trivial_rep(rng, m1, p, eigs1, mode=mode)
        if m2 == 1:
            if mode == ADDITIVE:
                vals = [rng.randint(-5, 5) for _ in range(p)]
                vals.append(-sum(vals))
                p2 = one_dim_tuple(vals)
            else:
                vals = [rng.choice([1, 2, 3, -1]) for _ in range(p)]
                prod = 1
                for v in vals:
                    prod *= Fraction(v)
                vals.append(Fraction(1) / prod)
                p2 = one_dim_tuple(vals, mode=MULTIPLICATIVE)
            eigs2 = [p2.matrices[-1][0, 0]]
        else:
            p2 = rand_trivial_rep(rng, m2, p, eigs2, mode=mode)
        if p1 is None or p2 is None:
            continue
        try:
            pair = RepresentationPair(p1, p2)
        except PreconditionError:
            continue
        xi = ext_dimension(pair)
        assert xi >= 0
        done += 1


# -- basis -------------------------------------------------------------------------


def test_basis_empty_when_xi_zero():
    pair = RepresentationPair(
        one_dim_tuple([1, 5, -6]), one_dim_tuple([2, 5, -7])
    )
    assert extension_space_basis(pair) == []


def test_basis_threestrata_normal_form():
    pair = threestrata_pair()
    (e,) = extension_space_basis(pair)
    # normalize modulo the simultaneous direction q = (a_j - b_j) * x
    q = [GaussianRational(v) for v in (-1, -2, 3)]
    b = [blk[0, 0] for blk in e.blocks]
    t = b[0] / q[0]
    f = [b[j] - t * q[j] for j in range(3)]
    assert f[0].is_zero()
    assert f[1] == -f[2]
    assert not f[1].is_zero()


def test_basis_count_matches_xi():
    pair = quad_pair()
    basis = extension_space_basis(pair)
    assert len(basis) == 2


# -- semidirect sums -----------------------------------------------------------------


def test_semidirect_threestrata_gives_s1_form():
    pair = threestrata_pair()
    (e,) = extension_space_basis(pair)
    built = build_semidirect(pair, e)
    assert constraint_residual(built).is_zero()
    assert centralizer_dimension(built)[0] == 1
    assert not is_irreducible(built)
    # classes match those of the known stratum representative
    s1 = s_triple(1)
    for m, spec in zip(built.matrices, s1.declared_classes):
        assert class_membership(m, spec)


def test_semidirect_scaling_is_conjugation():
    pair = threestrata_pair()
    (e,) = extension_space_basis(pair)
    one = build_semidirect(pair, e)
    three = build_semidirect(pair, e.scaled(GaussianRational(3)))
    g = Matrix.diagonal([1, 3])
    conj = one.conjugated(g)
    assert conj.matrices == three.matrices


def test_semidirect_rejects_split_class():
    pair = threestrata_pair()
    q_blocks = [
        (pair.p1.matrices[j] * Matrix([[1]]) - Matrix([[1]]) * pair.p2.matrices[j])
        for j in range(3)
    ]
    with pytest.raises(PreconditionError):
        build_semidirect(pair, ExtensionClass(q_blocks))


def test_semidirect_nilpotent_direction_t1():
    # handcrafted zero-sum blocks outside R: the built first matrix coarsens
    p1 = one_dim_tuple([0, 1, -1])
    p2 = one_dim_tuple([0, 2, -2])
    pair = RepresentationPair(p1, p2)
    e = ExtensionClass([Matrix([[1]]), Matrix([[-1]]), Matrix([[0]])])
    built = build_semidirect(pair, e)
    t1 = [
        Matrix([[0, 1], [0, 0]]),
        Matrix([[1, -1], [0, 2]]),
        Matrix([[-1, 0], [0, -2]]),
    ]
    assert list(built.matrices) == t1
    assert centralizer_dimension(built)[0] == 1
    # the computed class of the first matrix is the nilpotent one
    first = built.declared_classes[0]
    assert first.jnf.shape_key() == ((2,),)


def test_semidirect_membership_in_direct_sum_classes():
    # for classes from the extension space the built matrices stay in the
    # direct-sum classes (one-sided Sylvester borders)
    rng = random.Random(15)
    pair = quad_pair()
    for e in extension_space_basis(pair):
        built = build_semidirect(pair, e)
        for j, m in enumerate(built.matrices):
            a = pair.p1.matrices[j][0, 0]
            b = pair.p2.matrices[j][0, 0]
            if a == b:
                spec = ClassSpec("{v:[1,1]}", {"v": a})
            else:
                spec = ClassSpec("{x:[1]; y:[1]}", {"x": a, "y": b})
            assert class_membership(m, spec)


def test_geq3_cases():
    assert geq3_case(RepresentationPair(rep_3dim(), rep_2dim())) == 1
    assert geq3_case(threestrata_pair()) == 3
    pair_single_diff = RepresentationPair(
        one_dim_tuple([1, 5, -6]), one_dim_tuple([2, 5, -7])
    )
    assert geq3_case(pair_single_diff) is None


def test_geq3_case_4():
    p1 = rep_2dim()
    # one-dimensional partner whose first entries avoid P1's eigenvalues
    p2 = one_dim_tuple([7, -6, -1])
    pair = RepresentationPair(p1, p2)
    case = geq3_case(pair)
    assert case == 4


def test_geq3_trivial_centralizer_guarantee():
    # whenever a case fires, the semidirect sum has trivial centralizer
    pair = quad_pair()
    assert geq3_case(pair) == 3
    for e in extension_space_basis(pair):
        built = build_semidirect(pair, e)
        assert centralizer_dimension(built)[0] == 1


# -- splitting -----------------------------------------------------------------------


def test_split_s0():
    g, parts = split_direct_sum(s_triple(0))
    assert len(parts) == 2
    values = sorted(
        (tuple(m[0, 0] for m in part.matrices) for part in parts),
        key=lambda v: str(v[0]),
    )
    assert values == [
        (GaussianRational(1), GaussianRational(3), GaussianRational(-4)),
        (GaussianRational(2), GaussianRational(5), GaussianRational(-7)),
    ]


def test_split_trivial_returns_none():
    assert split_direct_sum(s_triple(1)) is None


def test_split_three_blocks():
    cols = [(1, 3, -4), (2, 5, -7), (0, -8, 8)]
    mats = [Matrix.diagonal([cols[0][j], cols[1][j], cols[2][j]]) for j in range(3)]
    t = MatrixTuple(ADDITIVE, mats)
    g, parts = split_direct_sum(t)
    assert len(parts) == 3
    for part in parts:
        assert centralizer_dimension(part)[0] == 1
        assert constraint_residual(part).is_zero()


def test_split_conjugator_block_diagonalizes():
    rng = random.Random(2)
    base = s_triple(0)
    from helpers import rand_invertible

    h = rand_invertible(rng, 2)
    hidden = base.conjugated(h).with_classes(base.declared_classes)
    g, parts = split_direct_sum(hidden)
    conj = hidden.conjugated(g)
    for m in conj.matrices:
        assert m[0, 1].is_zero() and m[1, 0].is_zero()


def test_split_requires_distinct_last():
    t = MatrixTuple(ADDITIVE, [Matrix.zero(2)] * 3)
    with pytest.raises(PreconditionError):
        split_direct_sum(t)


# -- irreducible deformation ------------------------------------------------------------


def test_deform_refuses_xi_one():
    pair = threestrata_pair()
    (e,) = extension_space_basis(pair)
    with pytest.raises(PreconditionError):
        deform_to_irreducible(pair, e)


def test_deform_quadruple():
    pair = quad_pair()
    basis = extension_space_basis(pair)
    out = deform_to_irreducible(pair, basis[0], seed=7)
    assert constraint_residual(out).is_zero()
    assert is_irreducible(out)
    assert out.declared_classes is not None
    for m, spec in zip(out.matrices, out.declared_classes):
        assert class_membership(m, spec)


def test_deform_flipped_order_also_succeeds():
    pair = quad_pair().flipped()
    basis = extension_space_basis(pair)
    out = deform_to_irreducible(pair, basis[0], seed=3)
    assert is_irreducible(out)
    assert constraint_residual(out).is_zero()


def test_deform_deterministic_under_seed():
    pair = quad_pair()
    basis = extension_space_basis(pair)
    a = deform_to_irreducible(pair, basis[0], seed=11)
    b = deform_to_irreducible(pair, basis[0], seed=11)
    assert a.matrices == b.matrices
