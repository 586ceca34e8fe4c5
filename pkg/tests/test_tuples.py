import random

import pytest

from helpers import (
    rand_additive_tuple,
    rand_invertible,
    rand_multiplicative_tuple,
    rand_reducible_tuple,
    s_triple,
    t_triple,
)

from dspkit.criteria import ClassSpec
from dspkit.errors import PreconditionError
from dspkit.genericity import ADDITIVE, MULTIPLICATIVE
from dspkit.linalg import inverse
from dspkit.matrices import Matrix
from dspkit.scalars import GaussianRational
from dspkit.tuples import (
    MatrixTuple,
    centralizer_dimension,
    class_membership,
    commutator_map_rank,
    constraint_residual,
    is_irreducible,
    similarity_conjugator,
    tangent_dimension,
    verify_tuple,
)


# -- residuals ------------------------------------------------------------------


def test_residual_s1_zero():
    assert constraint_residual(s_triple(1)).is_zero()


def test_residual_identity_product():
    t = MatrixTuple(MULTIPLICATIVE, [Matrix.identity(2)] * 3)
    assert constraint_residual(t).is_zero()


def test_residual_additive_violation():
    t = MatrixTuple(ADDITIVE, [Matrix.identity(2)] * 3)
    assert constraint_residual(t) == 3 * Matrix.identity(2)


# -- membership -----------------------------------------------------------------


def test_membership_diagonal():
    spec = ClassSpec("{x:[1]; y:[1]}", {"x": 1, "y": 2})
    assert class_membership(Matrix.diagonal([1, 2]), spec)
    assert class_membership(Matrix.diagonal([2, 1]), spec)
    assert not class_membership(Matrix.diagonal([1, 3]), spec)


def test_membership_nilpotent_block():
    spec = ClassSpec("{z:[2]}", {"z": 0})
    assert class_membership(Matrix([[0, 1], [0, 0]]), spec)
    assert not class_membership(Matrix.zero(2), spec)


def test_membership_scalar_vs_nilpotent():
    spec = ClassSpec("{z:[1,1]}", {"z": 0})
    assert not class_membership(Matrix([[0, 1], [0, 0]]), spec)
    assert class_membership(Matrix.zero(2), spec)


def test_membership_conjugation_invariant():
    rng = random.Random(6)
    spec = ClassSpec("{z:[2,1]}", {"z": 3})
    from dspkit.jnf import jordan_matrix

    base = jordan_matrix(spec.jnf, {"z": GaussianRational(3)})
    for _ in range(20):
        g = rand_invertible(rng, 3)
        assert class_membership(inverse(g) * base * g, spec)


# -- centralizer ------------------------------------------------------------------


def test_centralizer_s0():
    dim, basis = centralizer_dimension(s_triple(0))
    assert dim == 2
    assert all(b.is_square() for b in basis)


def test_centralizer_s1_trivial():
    assert centralizer_dimension(s_triple(1))[0] == 1


def test_centralizer_scalars():
    t = MatrixTuple(ADDITIVE, [Matrix.identity(3), Matrix.identity(3), -2 * Matrix.identity(3)])
    assert centralizer_dimension(t)[0] == 9


def test_centralizer_t1_trivial():
    assert centralizer_dimension(t_triple(1))[0] == 1
    assert centralizer_dimension(t_triple(2))[0] == 1


# -- irreducibility -----------------------------------------------------------------


def test_s1_reducible_despite_trivial_centralizer():
    t = s_triple(1)
    assert centralizer_dimension(t)[0] == 1
    assert not is_irreducible(t)


def test_irreducible_pair_padded():
    a1 = Matrix.diagonal([1, -1])
    a2 = Matrix([[0, 1], [1, 0]])
    t = MatrixTuple(ADDITIVE, [a1, a2, -a1 - a2])
    assert is_irreducible(t)


def test_single_matrix_not_irreducible():
    t = MatrixTuple(ADDITIVE, [Matrix.zero(2)])
    assert not is_irreducible(t)


def test_schur_direction():
    rng = random.Random(44)
    for _ in range(40):
        n = rng.randint(2, 4)
        t = rand_additive_tuple(rng, n, rng.randint(2, 3))
        if is_irreducible(t):
            assert centralizer_dimension(t)[0] == 1


# -- commutator map rank ---------------------------------------------------------------


def test_commutator_rank_s1():
    assert commutator_map_rank(s_triple(1)) == 3


def test_commutator_rank_scalars():
    t = MatrixTuple(ADDITIVE, [Matrix.identity(2), Matrix.identity(2), -2 * Matrix.identity(2)])
    assert commutator_map_rank(t) == 0


def test_commutator_rank_s0():
    assert commutator_map_rank(s_triple(0)) == 2


def test_equivalence_trivial_centralizer_iff_surjective():
    rng = random.Random(10)
    checked = 0
    for _ in range(60):
        n = rng.randint(2, 4)
        p = rng.randint(2, 3)
        kind = rng.random()
        if kind < 0.4:
            t = rand_additive_tuple(rng, n, p)
        elif kind < 0.7:
            t = rand_multiplicative_tuple(rng, n, p)
        else:
            t = rand_reducible_tuple(rng, n, p)
        assert constraint_residual(t).is_zero()
        trivial = centralizer_dimension(t)[0] == 1
        surjective = commutator_map_rank(t) == n * n - 1
        assert trivial == surjective
        checked += 1
    assert checked == 60


# -- tangent dimension ---------------------------------------------------------------


def test_tangent_s1():
    assert tangent_dimension(s_triple(1)) == 3


def test_tangent_zero_tuple():
    t = MatrixTuple(ADDITIVE, [Matrix.zero(2)] * 3)
    assert tangent_dimension(t) == 0


def test_tangent_requires_constraint():
    t = MatrixTuple(ADDITIVE, [Matrix.identity(2)] * 3)
    with pytest.raises(PreconditionError):
        tangent_dimension(t)


def matrix_class_dim(m):
    from dspkit.jnf import centralizer_dimension_of_matrix

    return m.rows ** 2 - centralizer_dimension_of_matrix(m)


def test_tangent_formula_trivial_centralizer():
    rng = random.Random(23)
    hits = 0
    for _ in range(40):
        n = rng.randint(2, 3)
        p = rng.randint(2, 3)
        t = (
            rand_additive_tuple(rng, n, p)
            if rng.random() < 0.5
            else rand_multiplicative_tuple(rng, n, p)
        )
        if centralizer_dimension(t)[0] != 1:
            continue
        hits += 1
        expected = sum(matrix_class_dim(m) for m in t.matrices) - n * n + 1
        assert tangent_dimension(t) == expected
    assert hits >= 20


# -- similarity helper ---------------------------------------------------------------


def test_similarity_conjugator():
    rng = random.Random(3)
    a = Matrix([[1, 1], [0, 2]])
    for _ in range(10):
        g0 = rand_invertible(rng, 2)
        b = inverse(g0) * a * g0
        g = similarity_conjugator(a, b)
        assert g is not None
        assert inverse(g) * a * g == b
    assert similarity_conjugator(a, Matrix.diagonal([1, 3])) is None
    # same charpoly, different class: scalar vs nilpotent
    assert similarity_conjugator(Matrix.zero(2), Matrix([[0, 1], [0, 0]])) is None


# -- report ------------------------------------------------------------------------


def test_verify_report_s1():
    rep = verify_tuple(s_triple(1))
    assert rep["residual_zero"] and rep["centralizer_dimension"] == 1
    assert rep["irreducible"] is False
    assert rep["tangent_dimension"] == 3
    assert rep["memberships"] == [True, True, True]
