import itertools
import random

import pytest

from dspkit.errors import PreconditionError
from dspkit.jnf import (
    JordanNormalForm,
    Partition,
    all_jnfs,
    centralizer_dimension_of_matrix,
    class_defect_r,
    class_dimension,
    corresponding_diagonal_jnf,
    degeneration_witness,
    is_subordinate,
    jnf_of_matrix,
    jordan_matrix,
    parse_jnf,
)
from dspkit.linalg import rank
from dspkit.matrices import Matrix
from dspkit.scalars import GaussianRational


def J(text):
    return parse_jnf(text)


def d_oracle(j):
    """n^2 minus the commutant dimension of an explicit Jordan matrix."""
    m = jordan_matrix(j)
    return j.size ** 2 - centralizer_dimension_of_matrix(m)


def r_oracle(j):
    """min over the shape's eigenvalues of rank(J - lambda I)."""
    m = jordan_matrix(j)
    n = j.size
    vals = [GaussianRational(k) for k in range(len(j.groups))]
    return min(rank(m - v * Matrix.identity(n)) for v in vals)


def bfs_subordinate(j1, j2):
    """Reachability oracle over merge moves (l,s) -> (l+1, s-1)."""

    def key(j):
        return tuple(sorted((lab, p.parts) for lab, p in j.groups))

    def moves(state):
        state = dict(state)
        for lab, parts in state.items():
            parts = list(parts)
            for i, k in itertools.permutations(range(len(parts)), 2):
                l, s = parts[i], parts[k]
                if l < s:
                    continue
                new = [p for t, p in enumerate(parts) if t not in (i, k)]
                new.append(l + 1)
                if s - 1 > 0:
                    new.append(s - 1)
                out = dict(state)
                out[lab] = tuple(sorted(new, reverse=True))
                yield tuple(sorted(out.items()))

    start = tuple(sorted((lab, p.parts) for lab, p in j1.groups))
    goal = tuple(sorted((lab, p.parts) for lab, p in j2.groups))
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for st in frontier:
            if st == goal:
                return True
            for mv in moves(st):
                if mv not in seen:
                    seen.add(mv)
                    nxt.append(mv)
        frontier = nxt
    return goal in seen


def rand_jnf(rng, n):
    shapes = list(all_jnfs(n))
    return rng.choice(shapes)


# -- partition basics -----------------------------------------------------------


def test_partition_validation():
    with pytest.raises(ValueError):
        Partition((1, 2))
    with pytest.raises(ValueError):
        Partition((0,))


def test_dual():
    assert Partition((3,)).dual() == Partition((1, 1, 1))
    assert Partition((2, 1)).dual() == Partition((2, 1))
    assert Partition((1, 1)).dual() == Partition((2,))
    assert Partition(()).dual() == Partition(())


def test_jnf_text_roundtrip():
    j = J("{l1:[2,1]; l2:[1]}")
    assert j.size == 4
    assert parse_jnf(str(j)) == j
    with pytest.raises(ValueError):
        parse_jnf("l1:[1]")
    with pytest.raises(ValueError):
        J("{x:[1]; x:[2]}")


# -- class dimension ------------------------------------------------------------


def test_dimension_distinct_eigenvalues():
    for n in range(1, 6):
        j = JordanNormalForm([("a%d" % k, Partition((1,))) for k in range(n)])
        assert class_dimension(j) == n * n - n


def test_dimension_scalar():
    assert class_dimension(J("{a:[1]}")) == 0
    assert class_dimension(J("{a:[1,1,1]}")) == 0


def test_dimension_blocks_2_1():
    j = J("{a:[2,1]}")
    assert class_dimension(j) == 4
    assert d_oracle(j) == 4


def test_defect_distinct():
    for n in range(2, 6):
        j = JordanNormalForm([("a%d" % k, Partition((1,))) for k in range(n)])
        assert class_defect_r(j) == n - 1


def test_defect_scalar():
    assert class_defect_r(J("{a:[1,1,1,1]}")) == 0


def test_defect_blocks_2_1():
    j = J("{a:[2,1]}")
    assert class_defect_r(j) == 1
    assert r_oracle(j) == 1


def test_d_r_oracles_exhaustive_small():
    for n in range(1, 5):
        for j in all_jnfs(n):
            assert class_dimension(j) == d_oracle(j), str(j)
            assert class_defect_r(j) == r_oracle(j), str(j)


# -- corresponding diagonal form -------------------------------------------------


def test_corresponding_diagonal_fixed_point():
    j = J("{a:[1,1]; b:[1]}")
    out = corresponding_diagonal_jnf(j)
    assert out.is_diagonal()
    assert out.multiplicities() == j.multiplicities()


def test_corresponding_2_1():
    out = corresponding_diagonal_jnf(J("{a:[2,1]}"))
    assert out.is_diagonal()
    assert out.multiplicities() == (2, 1)


def test_corresponding_mixed():
    out = corresponding_diagonal_jnf(J("{l1:[3]; l2:[1,1]}"))
    assert out.multiplicities() == (2, 1, 1, 1)


def test_duality_involution():
    rng = random.Random(3)
    for _ in range(60):
        j = rand_jnf(rng, rng.randint(1, 6))
        once = corresponding_diagonal_jnf(j)
        twice = corresponding_diagonal_jnf(once)
        assert once.shape_key() == twice.shape_key()


def test_samedr_300_random():
    rng = random.Random(11)
    for _ in range(300):
        j = rand_jnf(rng, rng.randint(1, 6))
        c = corresponding_diagonal_jnf(j)
        assert class_dimension(j) == class_dimension(c)
        assert class_defect_r(j) == class_defect_r(c)


# -- subordination ----------------------------------------------------------------


def test_subordinate_reflexive():
    j = J("{a:[2,1]; b:[1]}")
    assert is_subordinate(j, j)


def test_subordinate_merge_step():
    assert is_subordinate(J("{a:[2,1]}"), J("{a:[3]}"))


def test_subordinate_direction():
    assert not is_subordinate(J("{a:[2,2]}"), J("{a:[1,1,1,1]}"))
    assert is_subordinate(J("{a:[1,1,1,1]}"), J("{a:[2,2]}"))


def test_subordinate_preconditions():
    with pytest.raises(PreconditionError):
        is_subordinate(J("{a:[1]}"), J("{a:[1,1]}"))
    with pytest.raises(PreconditionError):
        is_subordinate(J("{a:[1]; b:[1]}"), J("{a:[2]}"))
    with pytest.raises(PreconditionError):
        is_subordinate(J("{a:[2]; b:[1]}"), J("{a:[1]; b:[2]}"))


def test_subordinate_bfs_cross_validation():
    shapes = [j for n in range(2, 6) for j in all_jnfs(n)]
    rng = random.Random(5)
    pairs = 0
    while pairs < 150:
        j1 = rng.choice(shapes)
        j2 = rng.choice(shapes)
        if j1.size != j2.size or sorted(j1.labels) != sorted(j2.labels):
            continue
        try:
            {lab: j1.group(lab).total for lab in j1.labels}
            if any(
                j1.group(lab).total != j2.group(lab).total for lab in j1.labels
            ):
                continue
        except KeyError:
            continue
        assert is_subordinate(j1, j2) == bfs_subordinate(j1, j2), (str(j1), str(j2))
        pairs += 1


# -- degeneration witness ----------------------------------------------------------


def test_witness_2_1():
    w = degeneration_witness((2, 1), 0)
    a = w.matrix(1)
    assert rank(a) == 2 and rank(a * a) == 1
    assert w.jnf(1).shape_key() == (((3,),))


def test_witness_1_2():
    w = degeneration_witness((1, 2), 0)
    a = w.matrix(1)
    assert rank(a) == 2 and rank(a * a) == 1
    assert w.merged_blocks() == (3,)


def test_witness_eps_zero():
    w = degeneration_witness((3, 2), 5)
    a = w.matrix(0)
    got = jnf_of_matrix(a, [GaussianRational(5)])
    assert got.shape_key() == ((3, 2),)


def test_witness_rank_checks_general():
    rng = random.Random(9)
    for _ in range(25):
        s1, s2 = rng.randint(1, 3), rng.randint(1, 3)
        lam = GaussianRational(rng.randint(-3, 3))
        w = degeneration_witness((s1, s2), lam)
        a = w.matrix(GaussianRational(rng.randint(1, 5)))
        got = jnf_of_matrix(a, [lam])
        assert got.shape_key() == (tuple(sorted(w.merged_blocks(), reverse=True)),)
        base = JordanNormalForm([("a", Partition(sorted((s1, s2), reverse=True)))])
        merged = JordanNormalForm([("a", Partition(w.merged_blocks()))])
        assert class_dimension(merged) > class_dimension(base)
        assert is_subordinate(base, merged)


# -- recognition -------------------------------------------------------------------


def test_jnf_of_matrix_roundtrip():
    rng = random.Random(21)
    for _ in range(40):
        n = rng.randint(1, 5)
        shapes = list(all_jnfs(n))
        j = rng.choice(shapes)
        m = jordan_matrix(j)
        values = [GaussianRational(k) for k in range(len(j.groups))]
        got = jnf_of_matrix(m, values)
        assert got.shape_key() == j.shape_key()


def test_jnf_of_matrix_requires_full_spectrum():
    with pytest.raises(ValueError):
        jnf_of_matrix(Matrix.diagonal([1, 2]), [GaussianRational(1)])
