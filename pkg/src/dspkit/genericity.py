"""Exact genericity analysis of eigenvalue collections.

A collection is one multiset of n eigenvalues per class.  Non-genericity
relations pick equally-sized proper sub-multisets, one per class, whose
total sum is 0 (additive) or total product is 1 (multiplicative).  The
enumeration is exhaustive below a size cap, deduplicated by value multiset.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import floor

from .errors import CapExceededError, PreconditionError, SearchFailure
from .scalars import GaussianRational, as_gaussian, ONE, ZERO

DEFAULT_CAP = 8

ADDITIVE = "additive"
MULTIPLICATIVE = "multiplicative"


class EigenvalueSystem:
    """Eigenvalues with multiplicities, one class per position.

    Multiplicative classes either carry concrete nonzero values or rational
    exponents theta (meaning e^{2 pi i theta}); mixing the two forms within
    one system is rejected rather than coerced.
    """

    __slots__ = ("mode", "classes", "exponent_form")

    def __init__(self, mode, classes, exponent_form=False):
        if mode not in (ADDITIVE, MULTIPLICATIVE):
            raise ValueError("mode must be additive or multiplicative")
        if exponent_form and mode != MULTIPLICATIVE:
            raise ValueError("exponent form only applies to multiplicative mode")
        conv = []
        for cls in classes:
            if exponent_form:
                vals = tuple(Fraction(v) if not isinstance(v, Fraction) else v for v in cls)
            else:
                vals = tuple(as_gaussian(v) for v in cls)
                if mode == MULTIPLICATIVE and any(v.is_zero() for v in vals):
                    raise ValueError("multiplicative eigenvalues must be nonzero")
            conv.append(vals)
        sizes = {len(c) for c in conv}
        if len(sizes) > 1:
            raise ValueError("all classes must share one size")
        object.__setattr__(self, "mode", mode)
        object.__setattr__(self, "classes", tuple(conv))
        object.__setattr__(self, "exponent_form", bool(exponent_form))

    def __setattr__(self, name, value):
        raise AttributeError("EigenvalueSystem is immutable")

    @property
    def n(self) -> int:
        return len(self.classes[0]) if self.classes else 0

    @property
    def num_classes(self) -> int:
        return len(self.classes)

    def shifted(self, class_index: int, vector) -> "EigenvalueSystem":
        """Shift one class's eigenvalues slot-wise by integers."""
        vector = tuple(int(x) for x in vector)
        if len(vector) != self.n:
            raise ValueError("shift vector length mismatch")
        if self.mode != ADDITIVE:
            raise PreconditionError("integer shifts act on additive systems")
        new = []
        for j, cls in enumerate(self.classes):
            if j == class_index:
                new.append(tuple(v + GaussianRational(k) for v, k in zip(cls, vector)))
            else:
                new.append(cls)
        return EigenvalueSystem(self.mode, new)

    def scaled(self, factor) -> "EigenvalueSystem":
        f = as_gaussian(factor)
        if f.is_zero():
            raise ValueError("scale factor must be nonzero")
        if self.mode != ADDITIVE:
            raise PreconditionError("scaling acts on additive systems")
        return EigenvalueSystem(
            self.mode, [tuple(f * v for v in cls) for cls in self.classes]
        )

    def __eq__(self, other):
        return (
            isinstance(other, EigenvalueSystem)
            and self.mode == other.mode
            and self.exponent_form == other.exponent_form
            and self.classes == other.classes
        )

    def __repr__(self):
        return "EigenvalueSystem(%s, %s)" % (
            self.mode,
            [[str(v) for v in cls] for cls in self.classes],
        )


@dataclass(frozen=True)
class NonGenericityRelation:
    """One relation: per class a slot-index subset of common size m."""

    m: int
    phi: tuple  # tuple of per-class sorted index tuples
    value: str  # neutral value the relation attains, canonical text
    modulo_integers: bool = False

    def to_json(self):
        return {
            "m": self.m,
            "phi": [list(p) for p in self.phi],
            "value": self.value,
            **({"modulo_integers": True} if self.modulo_integers else {}),
        }


def _combine_id(mode, exponent_form):
    if mode == ADDITIVE or exponent_form:
        return ZERO if not exponent_form else Fraction(0)
    return ONE


def _combine(mode, exponent_form, a, b):
    if mode == MULTIPLICATIVE and not exponent_form:
        return a * b
    return a + b


def _is_neutral(mode, exponent_form, value) -> bool:
    if mode == ADDITIVE:
        return value.is_zero()
    if exponent_form:
        return value.denominator == 1
    return value == ONE


def check_neutrality(sys: EigenvalueSystem) -> bool:
    """Total sum is 0 / total product is 1 / total exponent is an integer."""
    total = _combine_id(sys.mode, sys.exponent_form)
    for cls in sys.classes:
        for v in cls:
            total = _combine(sys.mode, sys.exponent_form, total, v)
    return _is_neutral(sys.mode, sys.exponent_form, total)


def find_relations(sys: EigenvalueSystem, modulo_integers: bool = False, cap: int = DEFAULT_CAP):
    """Exhaustive list of non-genericity relations (m < n), deduplicated.

    With ``modulo_integers`` (additive mode only) a relation holds when its
    sum lies in Z instead of being exactly 0; these are the relation shapes
    an integer eigenvalue shift can ever create or destroy.
    """
    n = sys.n
    if n > cap:
        raise CapExceededError("class size %d exceeds cap %d" % (n, cap))
    if modulo_integers and sys.mode != ADDITIVE:
        raise PreconditionError("modulo-Z relations only exist in additive mode")
    mode, expo = sys.mode, sys.exponent_form
    classes = sys.classes
    k = len(classes)
    relations = []
    for m in range(1, n):
        per_class = []
        for cls in classes:
            combos = []
            seen = set()
            for idx in itertools.combinations(range(n), m):
                key = tuple(sorted(str(cls[i]) for i in idx))
                if key in seen:
                    continue
                seen.add(key)
                total = cls[idx[0]]
                for i in idx[1:]:
                    total = _combine(mode, expo, total, cls[i])
                combos.append((idx, total))
            per_class.append(combos)
        # index the last class by the lookup key a prefix needs
        last = {}
        for idx, total in per_class[-1]:
            for key in _match_keys(mode, expo, modulo_integers, total):
                last.setdefault(key, []).append((idx, total))

        def walk(j, prefix_idx, prefix_total):
            if j == k - 1:
                key = _needed_key(mode, expo, modulo_integers, prefix_total)
                for idx, total in last.get(key, []):
                    value = _combine(mode, expo, prefix_total, total)
                    if not _exactly_neutral_or_mod(mode, expo, modulo_integers, value):
                        continue
                    relations.append(
                        NonGenericityRelation(
                            m,
                            tuple(prefix_idx) + (idx,),
                            _value_text(expo, value),
                            modulo_integers
                            and not _is_neutral(mode, expo, value),
                        )
                    )
                return
            for idx, total in per_class[j]:
                walk(
                    j + 1,
                    prefix_idx + [idx],
                    _combine(mode, expo, prefix_total, total),
                )

        walk(0, [], _combine_id(mode, expo))
    return relations


def _exactly_neutral_or_mod(mode, expo, modulo_integers, value):
    if _is_neutral(mode, expo, value):
        return True
    if mode == ADDITIVE and modulo_integers:
        return value.is_integer()
    return False


def _needed_key(mode, expo, modulo_integers, prefix_total):
    """Lookup key for the last-class total that completes a relation."""
    if mode == MULTIPLICATIVE and not expo:
        return str(ONE / prefix_total)
    if expo:
        return str(-prefix_total % 1)
    if modulo_integers:
        t = -prefix_total
        return str(GaussianRational(t.re - floor(t.re), t.im))
    return str(-prefix_total)


def _match_keys(mode, expo, modulo_integers, total):
    """Keys under which a last-class subset total is findable."""
    if mode == MULTIPLICATIVE and not expo:
        return (str(total),)
    if expo:
        return (str(total % 1),)
    if modulo_integers:
        return (str(GaussianRational(total.re - floor(total.re), total.im)),)
    return (str(total),)


def _value_text(expo, value):
    if expo:
        f = Fraction(value)
        return str(f.numerator) if f.denominator == 1 else "%d/%d" % (f.numerator, f.denominator)
    return str(value)


def is_generic(sys: EigenvalueSystem, cap: int = DEFAULT_CAP) -> bool:
    """No relation over proper equal-size sub-multisets holds exactly."""
    return not find_relations(sys, modulo_integers=False, cap=cap)


@dataclass(frozen=True)
class ShiftPlan:
    """Integer shift of one class plus a relation-monotone step ordering.

    ``steps`` applied in order walk the original system to the shifted one;
    each step adds +1 at ``steps[i][0]`` and -1 at ``steps[i][1]`` in the
    designated class.  Along that walk the set of exactly-satisfied relation
    shapes never grows, so the reversed walk (shifted back to original) only
    ever gains relations and keeps every one it has gained.
    """

    class_index: int
    vector: tuple
    steps: tuple

    def reversed_steps(self):
        """Steps for walking from the shifted system back to the original."""
        return tuple((b, a) for (a, b) in reversed(self.steps))


def _satisfied_shapes(sys, shapes):
    out = set()
    for rel in shapes:
        total = _combine_id(sys.mode, sys.exponent_form)
        for j, idx in enumerate(rel.phi):
            for i in idx:
                total = _combine(sys.mode, sys.exponent_form, total, sys.classes[j][i])
        if _is_neutral(sys.mode, sys.exponent_form, total):
            out.add(rel.phi)
    return frozenset(out)


def _order_steps(sys, class_index, vector, shapes):
    """Order elementary (+1,-1) moves so satisfied shapes only shrink.

    Depth-first over all decompositions, visiting candidate moves that
    destroy the most relations first; returns None when no ordering works.
    """
    n = sys.n
    start = sys
    target = tuple(vector)
    dead = set()

    def rec(current, remaining, sat, acc):
        if all(x == 0 for x in remaining):
            return acc
        state_key = remaining
        if state_key in dead:
            return None
        options = []
        for a in range(n):
            if remaining[a] <= 0:
                continue
            for b in range(n):
                if remaining[b] >= 0:
                    continue
                w = [0] * n
                w[a], w[b] = 1, -1
                nxt = current.shifted(class_index, w)
                nsat = _satisfied_shapes(nxt, shapes)
                if nsat <= sat:
                    options.append((len(nsat), a, b, nxt, nsat))
        options.sort(key=lambda t: (t[0], t[1], t[2]))
        for _, a, b, nxt, nsat in options:
            rem = list(remaining)
            rem[a] -= 1
            rem[b] += 1
            out = rec(nxt, tuple(rem), nsat, acc + [(a, b)])
            if out is not None:
                return out
        dead.add(state_key)
        return None

    sat0 = _satisfied_shapes(start, shapes)
    return rec(start, target, sat0, [])


def find_generic_shift(
    sys: EigenvalueSystem,
    shift_class: int,
    bound: int = 3,
    cap: int = DEFAULT_CAP,
):
    """Smallest integer zero-sum shift of one class that makes the system
    generic, with a step ordering honoring the relation-monotonicity
    condition; max-norm shells first, lexicographic inside a shell."""
    if sys.mode != ADDITIVE:
        raise PreconditionError("shift search needs additive mode")
    if not 0 <= shift_class < sys.num_classes:
        raise PreconditionError("shift_class out of range")
    n = sys.n
    shapes = find_relations(sys, modulo_integers=True, cap=cap)
    for radius in range(bound + 1):
        for v in _zero_sum_vectors(n, radius):
            shifted = sys.shifted(shift_class, v)
            if not is_generic(shifted, cap=cap):
                continue
            steps = _order_steps(sys, shift_class, v, shapes)
            if steps is None:
                continue
            return ShiftPlan(shift_class, tuple(v), tuple(steps))
    raise SearchFailure("no generic shift with max-norm <= %d" % bound)


def _zero_sum_vectors(n, radius):
    """Zero-sum integer vectors with max-norm exactly ``radius``, ascending."""
    if radius == 0:
        yield (0,) * n
        return
    span = range(-radius, radius + 1)
    for v in itertools.product(span, repeat=n):
        if sum(v) == 0 and max(abs(x) for x in v) == radius:
            yield v
