"""Partition and Jordan-form calculus.

Eigenvalue labels are abstract strings: class dimension, defect and the
corresponding diagonal form depend only on the shape, never on values.
"""

from __future__ import annotations

import itertools
import re as _re

from .errors import PreconditionError
from .linalg import kernel_basis, operator_matrix, rank
from .matrices import Matrix
from .scalars import GaussianRational, as_gaussian, ZERO, ONE


class Partition:
    """Non-increasing tuple of positive integers."""

    __slots__ = ("parts",)

    def __init__(self, parts):
        parts = tuple(int(p) for p in parts)
        if any(p <= 0 for p in parts):
            raise ValueError("partition parts must be positive")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise ValueError("partition parts must be non-increasing")
        object.__setattr__(self, "parts", parts)

    def __setattr__(self, name, value):
        raise AttributeError("Partition is immutable")

    @property
    def total(self) -> int:
        return sum(self.parts)

    def dual(self) -> "Partition":
        """Conjugate partition (transpose of the Young diagram)."""
        if not self.parts:
            return Partition(())
        return Partition(
            tuple(
                sum(1 for p in self.parts if p > i) for i in range(self.parts[0])
            )
        )

    def dominates(self, other: "Partition") -> bool:
        """Prefix sums of self >= prefix sums of other (same total)."""
        if self.total != other.total:
            raise ValueError("dominance needs equal totals")
        a = list(itertools.accumulate(self.parts))
        b = list(itertools.accumulate(other.parts))
        for k in range(max(len(a), len(b))):
            sa = a[k] if k < len(a) else a[-1]
            sb = b[k] if k < len(b) else b[-1]
            if sa < sb:
                return False
        return True

    def __eq__(self, other):
        return isinstance(other, Partition) and self.parts == other.parts

    def __hash__(self):
        return hash(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __len__(self):
        return len(self.parts)

    def __repr__(self):
        return "Partition(%r)" % (self.parts,)


class JordanNormalForm:
    """Jordan block sizes grouped by (abstract) eigenvalue label."""

    __slots__ = ("groups",)

    def __init__(self, groups):
        norm = []
        seen = set()
        for label, parts in groups:
            label = str(label)
            if label in seen:
                raise ValueError("duplicate eigenvalue label %r" % label)
            seen.add(label)
            norm.append((label, parts if isinstance(parts, Partition) else Partition(parts)))
        object.__setattr__(self, "groups", tuple(norm))

    def __setattr__(self, name, value):
        raise AttributeError("JordanNormalForm is immutable")

    @property
    def size(self) -> int:
        return sum(p.total for _, p in self.groups)

    @property
    def labels(self):
        return tuple(label for label, _ in self.groups)

    def group(self, label: str) -> Partition:
        for lab, p in self.groups:
            if lab == label:
                return p
        raise KeyError(label)

    def multiplicity(self, label: str) -> int:
        return self.group(label).total

    def multiplicities(self):
        """Eigenvalue multiplicity multiset, sorted descending."""
        return tuple(sorted((p.total for _, p in self.groups), reverse=True))

    def shape_key(self):
        """Label-free canonical key: the multiset of block partitions."""
        return tuple(sorted((p.parts for _, p in self.groups), reverse=True))

    def is_diagonal(self) -> bool:
        return all(all(b == 1 for b in p) for _, p in self.groups)

    def is_scalar(self) -> bool:
        return len(self.groups) == 1 and self.is_diagonal()

    def has_distinct_eigenvalues(self) -> bool:
        return all(p.total == 1 for _, p in self.groups)

    def __eq__(self, other):
        return isinstance(other, JordanNormalForm) and self.groups == other.groups

    def __hash__(self):
        return hash(self.groups)

    def __str__(self):
        return (
            "{"
            + "; ".join(
                "%s:[%s]" % (label, ",".join(str(b) for b in p))
                for label, p in self.groups
            )
            + "}"
        )

    def __repr__(self):
        return "JordanNormalForm(%s)" % str(self)


_GROUP_RE = _re.compile(r"^\s*([^:;\[\]{}]+?)\s*:\s*\[([0-9,\s]*)\]\s*$")


def parse_jnf(text: str) -> JordanNormalForm:
    """Parse the text form "{l1:[2,1]; l2:[1]}"."""
    s = text.strip()
    if not (s.startswith("{") and s.endswith("}")):
        raise ValueError("JNF text must be wrapped in braces")
    body = s[1:-1].strip()
    groups = []
    if body:
        for part in body.split(";"):
            m = _GROUP_RE.match(part)
            if not m:
                raise ValueError("bad JNF group %r" % part)
            label = m.group(1)
            blocks = [int(b) for b in m.group(2).split(",") if b.strip()]
            groups.append((label, Partition(sorted(blocks, reverse=True))))
    return JordanNormalForm(groups)


# -- core quantities -----------------------------------------------------------


def class_dimension(j: JordanNormalForm) -> int:
    """Dimension of the conjugacy class with this Jordan shape.

    n^2 minus the centralizer dimension sum(min(b_i, b_i')) over block pairs
    sharing an eigenvalue; the explicit commutator-kernel oracle in the test
    suite gates this closed form.
    """
    n = j.size
    cent = 0
    for _, p in j.groups:
        for a in p:
            for b in p:
                cent += min(a, b)
    return n * n - cent


def class_defect_r(j: JordanNormalForm) -> int:
    """n minus the maximal number of Jordan blocks at one eigenvalue."""
    n = j.size
    if not j.groups:
        return 0
    return n - max(len(p) for _, p in j.groups)


def corresponding_diagonal_jnf(j: JordanNormalForm) -> JordanNormalForm:
    """Diagonal form whose multiplicities are the union of the dual partitions.

    Fresh labels e1, e2, ... are assigned in decreasing multiplicity order.
    """
    mults = []
    for _, p in j.groups:
        mults.extend(p.dual().parts)
    mults.sort(reverse=True)
    return JordanNormalForm(
        [("e%d" % (k + 1), Partition([1] * m)) for k, m in enumerate(mults)]
    )


def is_subordinate(j1: JordanNormalForm, j2: JordanNormalForm) -> bool:
    """True iff the class of j1 lies in the closure of the class of j2.

    Groups are matched by label; equivalently j2 is reachable from j1 by
    merge moves (l, s) -> (l+1, s-1) on same-label blocks, which is dominance
    order per group (the BFS oracle in the tests cross-validates this).
    """
    if j1.size != j2.size:
        raise PreconditionError("subordination needs equal sizes")
    if sorted(j1.labels) != sorted(j2.labels):
        raise PreconditionError("subordination needs matching eigenvalue labels")
    for label in j1.labels:
        p1, p2 = j1.group(label), j2.group(label)
        if p1.total != p2.total:
            raise PreconditionError("multiplicity mismatch at label %r" % label)
        if not p2.dominates(p1):
            return False
    return True


class DegenerationWitness:
    """One-parameter family [[J', eps*D], [0, J'']] merging two same-eigenvalue
    blocks; at eps != 0 the shape coarsens to (max+1, min-1)."""

    def __init__(self, sizes, eigenvalue):
        s1, s2 = int(sizes[0]), int(sizes[1])
        if s1 < 1 or s2 < 1:
            raise PreconditionError("block sizes must be >= 1")
        self.sizes = (s1, s2)
        self.eigenvalue = as_gaussian(eigenvalue)
        n = s1 + s2
        # paper's two placements, 1-based: (s', n) if s' >= s'', else (1, s'+1)
        self.position = (s1 - 1, n - 1) if s1 >= s2 else (0, s1)

    @property
    def size(self) -> int:
        return sum(self.sizes)

    def matrix(self, eps) -> Matrix:
        s1, s2 = self.sizes
        lam = self.eigenvalue
        m = [[ZERO] * (s1 + s2) for _ in range(s1 + s2)]
        for blk, base in ((s1, 0), (s2, s1)):
            for k in range(blk):
                m[base + k][base + k] = lam
                if k + 1 < blk:
                    m[base + k][base + k + 1] = ONE
        i, k = self.position
        m[i][k] = m[i][k] + as_gaussian(eps)
        return Matrix(m)

    def merged_blocks(self):
        """Block sizes of the family member at eps != 0."""
        hi, lo = max(self.sizes), min(self.sizes)
        return tuple(b for b in (hi + 1, lo - 1) if b > 0)

    def jnf(self, eps) -> JordanNormalForm:
        blocks = (
            self.merged_blocks()
            if not as_gaussian(eps).is_zero()
            else tuple(sorted(self.sizes, reverse=True))
        )
        return JordanNormalForm([("a", Partition(blocks))])


def degeneration_witness(sizes, eigenvalue) -> DegenerationWitness:
    return DegenerationWitness(sizes, eigenvalue)


# -- explicit matrices and recognition ------------------------------------------


def assign_values(j: JordanNormalForm, values=None):
    """Map label -> concrete value; defaults to 0, 1, 2, ... in group order."""
    if values is None:
        return {label: GaussianRational(k) for k, (label, _) in enumerate(j.groups)}
    out = {}
    for label, _ in j.groups:
        if label not in values:
            raise KeyError("no value for label %r" % label)
        out[label] = as_gaussian(values[label])
    if len(set(out.values())) != len(out):
        raise ValueError("distinct labels need distinct values")
    return out


def jordan_matrix(j: JordanNormalForm, values=None) -> Matrix:
    """Explicit upper Jordan matrix realizing the shape with given values."""
    vals = assign_values(j, values)
    n = j.size
    m = [[ZERO] * n for _ in range(n)]
    base = 0
    for label, p in j.groups:
        lam = vals[label]
        for blk in p:
            for k in range(blk):
                m[base + k][base + k] = lam
                if k + 1 < blk:
                    m[base + k][base + k + 1] = ONE
            base += blk
    return Matrix(m)


def jnf_of_matrix(m: Matrix, eigenvalues) -> JordanNormalForm:
    """Jordan shape of a matrix from its (supplied, exact) eigenvalues.

    Block sizes at lambda come from the rank ladder of (M - lambda I)^s; the
    supplied eigenvalue set must exhaust the spectrum.
    """
    if not m.is_square():
        raise ValueError("JNF of a non-square matrix")
    n = m.rows
    groups = []
    total = 0
    distinct = []
    for v in eigenvalues:
        v = as_gaussian(v)
        if v not in distinct:
            distinct.append(v)
    for idx, lam in enumerate(distinct):
        shifted = m - lam * Matrix.identity(n)
        ranks = [n]
        power = Matrix.identity(n)
        for _ in range(n):
            power = power * shifted
            ranks.append(rank(power))
            if ranks[-1] == ranks[-2]:
                break
        # number of blocks of size >= s is rank((M-l)^{s-1}) - rank((M-l)^s)
        sizes = []
        for s in range(1, len(ranks)):
            count_ge_s = ranks[s - 1] - ranks[s]
            sizes.append(count_ge_s)
        blocks = []
        for s, c in enumerate(sizes, start=1):
            nxt = sizes[s] if s < len(sizes) else 0
            blocks.extend([s] * (c - nxt))
        blocks = [b for b in blocks if b > 0]
        if blocks:
            groups.append((str(lam), Partition(sorted(blocks, reverse=True))))
            total += sum(blocks)
    if total != n:
        raise ValueError(
            "supplied eigenvalues do not exhaust the spectrum (%d of %d)"
            % (total, n)
        )
    return JordanNormalForm(groups)


def centralizer_dimension_of_matrix(a: Matrix) -> int:
    """dim of the commutant {X : [A, X] = 0}; oracle for class_dimension."""
    op = operator_matrix(lambda x: a * x - x * a, a.rows, a.cols)
    return len(kernel_basis(op))


def _matvec(m: Matrix, v):
    return tuple(
        sum((m[i, j] * v[j] for j in range(m.cols)), ZERO) for i in range(m.rows)
    )


def jordan_decomposition(m: Matrix, value_groups):
    """Exact Jordan frame: (Q, G) with m = Q^-1 G Q.

    ``value_groups`` is an ordered list of (eigenvalue, Partition) pairs that
    must describe m exactly; G lays out groups in the given order with block
    sizes descending inside each group (the canonical frame every
    deformation direction refers to).
    """
    from .linalg import SpanSifter, inverse

    n = m.rows
    columns = []
    g_rows = [[ZERO] * n for _ in range(n)]
    base = 0
    for value, partition in value_groups:
        lam = as_gaussian(value)
        shifted = m - lam * Matrix.identity(n)
        smax = partition.parts[0] if len(partition) else 0
        powers = [Matrix.identity(n)]
        for _ in range(smax):
            powers.append(powers[-1] * shifted)
        kernels = {s: kernel_basis(powers[s]) for s in range(smax + 1)}
        tops = []  # (vector, length)
        for s in range(smax, 0, -1):
            needed = sum(1 for b in partition if b == s)
            if needed == 0:
                continue
            sifter = SpanSifter(n)
            for v in kernels[s - 1]:
                sifter.add(v)
            for w, length in tops:
                sifter.add(_matvec(powers[length - s], w))
            found = 0
            for v in kernels[s]:
                if found == needed:
                    break
                if sifter.add(v):
                    tops.append((v, s))
                    found += 1
            if found != needed:
                raise ValueError(
                    "shape mismatch: matrix does not realize the given blocks"
                )
        # partition order: longest chains first
        tops.sort(key=lambda t: -t[1])
        for w, length in tops:
            chain = [_matvec(powers[length - 1 - k], w) for k in range(length)]
            for k, vec in enumerate(chain):
                columns.append(vec)
                idx = base + k
                g_rows[idx][idx] = lam
                if k + 1 < length:
                    g_rows[idx][idx + 1] = ONE
            base += length
    if base != n:
        raise ValueError("value groups do not exhaust the matrix size")
    b = Matrix(list(zip(*columns)))
    g = Matrix(g_rows)
    q = inverse(b)
    # m = B G B^-1, so Q = B^-1 gives m = Q^-1 G Q
    assert b * g * q == m
    return q, g


def all_partitions(n: int):
    """All partitions of n, lexicographically largest first."""
    if n == 0:
        yield ()
        return

    def rec(remaining, cap):
        if remaining == 0:
            yield ()
            return
        for first in range(min(remaining, cap), 0, -1):
            for rest in rec(remaining - first, first):
                yield (first,) + rest

    yield from rec(n, n)


def all_jnfs(n: int):
    """Every Jordan shape of size n (labels a1, a2, ...), canonically ordered."""
    def splits(remaining, cap_key):
        # multisets of partitions with given total, non-increasing by key
        if remaining == 0:
            yield ()
            return
        for total in range(remaining, 0, -1):
            for p in all_partitions(total):
                key = (total, p)
                if cap_key is not None and key > cap_key:
                    continue
                for rest in splits(remaining - total, key):
                    yield (p,) + rest

    for combo in splits(n, None):
        yield JordanNormalForm(
            [("a%d" % (k + 1), Partition(p)) for k, p in enumerate(combo)]
        )
