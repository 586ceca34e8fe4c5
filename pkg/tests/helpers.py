"""Shared fixtures and generators for the test suite."""

import random
from fractions import Fraction

from dspkit.criteria import ClassSpec
from dspkit.genericity import ADDITIVE, MULTIPLICATIVE
from dspkit.jnf import all_jnfs
from dspkit.linalg import det, inverse
from dspkit.matrices import Matrix
from dspkit.scalars import GaussianRational
from dspkit.tuples import MatrixTuple


# Worked 2x2 stratification witnesses: three diagonalizable classes with the
# two index-wise eigenvalue sums vanishing (rigid), and the nilpotent variant.
S_VALUES = dict(a=1, b=2, c=3, d=5, g=-4, h=-7)


def s_classes():
    v = S_VALUES
    return [
        ClassSpec("{x:[1]; y:[1]}", {"x": v["a"], "y": v["b"]}),
        ClassSpec("{x:[1]; y:[1]}", {"x": v["c"], "y": v["d"]}),
        ClassSpec("{x:[1]; y:[1]}", {"x": v["g"], "y": v["h"]}),
    ]


def s_triple(i):
    """Strata representatives: i = 0 diagonal, 1 upper unit, 2 lower unit."""
    v = S_VALUES
    eps = 1 if i == 1 else 0
    eta = 1 if i == 2 else 0
    a1 = Matrix.diagonal([v["a"], v["b"]])
    a2 = Matrix([[v["c"], eps], [eta, v["d"]]])
    a3 = Matrix([[v["g"], -eps], [-eta, v["h"]]])
    return MatrixTuple(ADDITIVE, [a1, a2, a3], s_classes())


def t_classes():
    return [
        ClassSpec("{z:[2]}", {"z": 0}),
        ClassSpec("{x:[1]; y:[1]}", {"x": 1, "y": 2}),
        ClassSpec("{x:[1]; y:[1]}", {"x": -1, "y": -2}),
    ]


def t_triple(i):
    """i = 0 diagonal stratum, 1 and 2 the two nilpotent-extension strata."""
    if i == 0:
        mats = [
            Matrix.diagonal([0, 0]),
            Matrix.diagonal([1, 2]),
            Matrix.diagonal([-1, -2]),
        ]
    else:
        a1 = Matrix([[0, 1], [0, 0]])
        a2 = Matrix([[1, -1], [0, 2]]) if i == 1 else Matrix([[2, -1], [0, 1]])
        a3 = -a1 - a2
        mats = [a1, a2, a3]
    classes = t_classes()
    if i == 0:
        classes = [
            ClassSpec("{z:[1,1]}", {"z": 0}),
            classes[1],
            classes[2],
        ]
    return MatrixTuple(ADDITIVE, mats, classes)


def rand_class(rng, n, mode=ADDITIVE, span=6):
    """Random ClassSpec of size n with small integer eigenvalues."""
    shapes = list(all_jnfs(n))
    jnf = rng.choice(shapes)
    pool = [x for x in range(-span, span + 1) if mode == ADDITIVE or x != 0]
    rng.shuffle(pool)
    values = {}
    for k, (label, _) in enumerate(jnf.groups):
        values[label] = GaussianRational(pool[k])
    return ClassSpec(jnf, values, mode=mode)


def rand_class_list(rng, n, count, mode=ADDITIVE, neutral=False):
    """Random class list; optionally force the neutrality condition by
    retrying the last class's value assignment."""
    classes = [rand_class(rng, n, mode) for _ in range(count)]
    if not neutral:
        return classes
    for _ in range(200):
        total = GaussianRational(0) if mode == ADDITIVE else GaussianRational(1)
        for c in classes:
            for v in c.eigenvalue_multiset():
                total = total + v if mode == ADDITIVE else total * v
        if (mode == ADDITIVE and total.is_zero()) or (
            mode == MULTIPLICATIVE and total == GaussianRational(1)
        ):
            return classes
        classes[-1] = rand_class(rng, n, mode)
    # fall back: adjust a simple-eigenvalue class or give up un-neutral
    return classes


def rand_int_matrix(rng, n, span=3):
    return Matrix(
        [[GaussianRational(rng.randint(-span, span)) for _ in range(n)] for _ in range(n)]
    )


def rand_invertible(rng, n, span=3):
    while True:
        g = rand_int_matrix(rng, n, span)
        if not det(g).is_zero():
            return g


def rand_unimodular(rng, n, span=2):
    """Random integer matrix with determinant +-1 (product of elementary ops)."""
    m = Matrix.identity(n)
    for _ in range(2 * n):
        i, j = rng.randrange(n), rng.randrange(n)
        if i == j:
            continue
        e = Matrix.identity(n) + Matrix.unit(n, i, j, rng.randint(-span, span))
        m = m * e
    return m


def rand_additive_tuple(rng, n, p, span=3):
    """Random exact zero-sum tuple of p+1 matrices."""
    mats = [rand_int_matrix(rng, n, span) for _ in range(p)]
    last = Matrix.zero(n)
    for m in mats:
        last = last - m
    mats.append(last)
    return MatrixTuple("additive", mats)


def rand_multiplicative_tuple(rng, n, p, span=2):
    """Random exact product-identity tuple of p+1 invertible matrices."""
    mats = [rand_unimodular(rng, n, span) for _ in range(p)]
    prod = Matrix.identity(n)
    for m in mats:
        prod = prod * m
    mats.append(inverse(prod))
    return MatrixTuple("multiplicative", mats)


def one_dim_tuple(values, mode=ADDITIVE):
    """1x1 tuple from scalar values (zero sum or unit product), with classes."""
    mats = [Matrix([[v]]) for v in values]
    classes = [
        ClassSpec("{v:[1]}", {"v": v}, mode=mode) for v in values
    ]
    return MatrixTuple(mode, mats, classes)


def rand_trivial_rep(rng, m, p, last_eigs, mode=ADDITIVE, span=2, tries=60):
    """Random constraint-satisfying tuple with trivial centralizer whose last
    matrix is diagonal with the given distinct eigenvalues; None on failure."""
    from dspkit.tuples import centralizer_dimension, constraint_residual

    last = Matrix.diagonal(last_eigs)
    for _ in range(tries):
        if mode == ADDITIVE:
            mids = [rand_int_matrix(rng, m, span) for _ in range(p - 1)]
            closer = Matrix.zero(m)
            for x in mids:
                closer = closer - x
            closer = closer - last
            mats = mids + [closer, last]
        else:
            mids = [rand_unimodular(rng, m, span) for _ in range(p - 1)]
            prod = Matrix.identity(m)
            for x in mids:
                prod = prod * x
            closer = inverse(prod) * inverse(last)
            mats = mids + [closer, last]
        t = MatrixTuple(mode, mats)
        assert constraint_residual(t).is_zero()
        if centralizer_dimension(t)[0] == 1:
            return t
    return None


def rand_reducible_tuple(rng, n, p, mode="additive"):
    """Block upper-triangular tuple: guaranteed common invariant subspace."""
    split = rng.randint(1, n - 1)
    mats = []
    for _ in range(p):
        top = rand_int_matrix(rng, split) if mode == "additive" else rand_unimodular(rng, split)
        bot = rand_int_matrix(rng, n - split) if mode == "additive" else rand_unimodular(rng, n - split)
        off = Matrix(
            [
                [GaussianRational(rng.randint(-2, 2)) for _ in range(n - split)]
                for _ in range(split)
            ]
        )
        mats.append(Matrix.block([[top, off], [Matrix.zero(n - split, split), bot]]))
    if mode == "additive":
        last = Matrix.zero(n)
        for m in mats:
            last = last - m
        mats.append(last)
    else:
        prod = Matrix.identity(n)
        for m in mats:
            prod = prod * m
        mats.append(inverse(prod))
    return MatrixTuple(mode, mats)
