"""Solvability verdicts from the class data alone.

The two inequalities checked here are necessary for the existence of
irreducible tuples; together they are also sufficient exactly under the
hypotheses "one class has n distinct eigenvalues" plus (for irreducible
tuples) generic eigenvalues.  The verdicts below only ever claim
solvable/unsolvable inside those hypotheses.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import CapExceededError, PreconditionError
from .genericity import (
    ADDITIVE,
    MULTIPLICATIVE,
    EigenvalueSystem,
    check_neutrality,
    is_generic,
)
from .jnf import JordanNormalForm, class_defect_r, class_dimension, parse_jnf
from .scalars import GaussianRational, as_gaussian


class ClassSpec:
    """A conjugacy class: Jordan shape plus concrete eigenvalue values."""

    __slots__ = ("jnf", "values", "mode", "exponent_form")

    def __init__(self, jnf, values, mode=ADDITIVE, exponent_form=False):
        if isinstance(jnf, str):
            jnf = parse_jnf(jnf)
        if mode not in (ADDITIVE, MULTIPLICATIVE):
            raise ValueError("bad mode %r" % mode)
        if exponent_form and mode != MULTIPLICATIVE:
            raise ValueError("exponent form needs multiplicative mode")
        assigned = {}
        for label, _ in jnf.groups:
            if label not in values:
                raise ValueError("no eigenvalue for label %r" % label)
            v = values[label]
            assigned[label] = Fraction(v) if exponent_form else as_gaussian(v)
        if len(set(assigned.values())) != len(assigned):
            raise ValueError("distinct labels need distinct eigenvalues")
        if mode == MULTIPLICATIVE and not exponent_form:
            if any(v.is_zero() for v in assigned.values()):
                raise ValueError("multiplicative eigenvalues must be nonzero")
        object.__setattr__(self, "jnf", jnf)
        object.__setattr__(self, "values", assigned)
        object.__setattr__(self, "mode", mode)
        object.__setattr__(self, "exponent_form", bool(exponent_form))

    def __setattr__(self, name, value):
        raise AttributeError("ClassSpec is immutable")

    @property
    def size(self) -> int:
        return self.jnf.size

    def eigenvalue_multiset(self):
        """Values repeated with multiplicity, in group order."""
        out = []
        for label, p in self.jnf.groups:
            out.extend([self.values[label]] * p.total)
        return tuple(out)

    def dimension(self) -> int:
        return class_dimension(self.jnf)

    def defect_r(self) -> int:
        return class_defect_r(self.jnf)

    def has_distinct_eigenvalues(self) -> bool:
        return self.jnf.has_distinct_eigenvalues()

    def value_of(self, label: str):
        return self.values[label]

    def __eq__(self, other):
        return (
            isinstance(other, ClassSpec)
            and self.jnf == other.jnf
            and self.values == other.values
            and self.mode == other.mode
            and self.exponent_form == other.exponent_form
        )

    def __repr__(self):
        pairs = ", ".join(
            "%s=%s" % (label, self.values[label]) for label, _ in self.jnf.groups
        )
        return "ClassSpec(%s; %s; %s)" % (self.jnf, pairs, self.mode)


def eigenvalue_system(classes) -> EigenvalueSystem:
    """Assemble the EigenvalueSystem for a list of same-mode ClassSpecs."""
    if not classes:
        raise PreconditionError("need at least one class")
    mode = classes[0].mode
    expo = classes[0].exponent_form
    if any(c.mode != mode or c.exponent_form != expo for c in classes):
        raise PreconditionError("all classes must share one mode and value form")
    return EigenvalueSystem(
        mode, [c.eigenvalue_multiset() for c in classes], exponent_form=expo
    )


def _check_sizes(classes):
    sizes = {c.size for c in classes}
    if len(sizes) != 1:
        raise PreconditionError("classes must share one size")
    return sizes.pop()


def check_alpha(classes):
    """Sum of class dimensions against 2n^2 - 2; (holds, lhs, rhs)."""
    n = _check_sizes(classes)
    lhs = sum(c.dimension() for c in classes)
    rhs = 2 * n * n - 2
    return lhs >= rhs, lhs, rhs


def check_beta(classes):
    """Leave-one-out defect sums against n; (holds, per-class margins)."""
    n = _check_sizes(classes)
    r = [c.defect_r() for c in classes]
    total = sum(r)
    margins = tuple(total - rj - n for rj in r)
    return all(m >= 0 for m in margins), margins


_STATUSES = (
    "solvable",
    "unsolvable",
    "necessary-conditions-hold",
    "necessary-conditions-fail",
    "inapplicable",
)


@dataclass(frozen=True)
class Verdict:
    status: str
    reasons: tuple

    def __post_init__(self):
        if self.status not in _STATUSES:
            raise ValueError("bad verdict status %r" % self.status)

    def reason_names(self):
        return [r["name"] for r in self.reasons]

    def to_json(self):
        return {"status": self.status, "reasons": [dict(r) for r in self.reasons]}


def _base_reasons(classes):
    a_ok, lhs, rhs = check_alpha(classes)
    b_ok, margins = check_beta(classes)
    reasons = [
        {"kind": "condition", "name": "alpha", "holds": a_ok, "lhs": lhs, "rhs": rhs},
        {
            "kind": "condition",
            "name": "beta",
            "holds": b_ok,
            "margins": list(margins),
        },
    ]
    return a_ok and b_ok, reasons


def dsp_verdict(classes) -> Verdict:
    """Existence of irreducible tuples, decided only where the
    distinct-eigenvalue + generic criterion applies."""
    n = _check_sizes(classes)
    sysv = eigenvalue_system(classes)
    if not check_neutrality(sysv):
        return Verdict(
            "unsolvable",
            (
                {
                    "kind": "condition",
                    "name": "neutrality",
                    "holds": False,
                    "note": "trace sum / determinant product is not neutral; no tuples exist",
                },
            ),
        )
    ab, reasons = _base_reasons(classes)
    if n == 1:
        reasons.append(
            {"kind": "criterion", "name": "rank-one-case", "holds": True}
        )
        return Verdict("solvable", tuple(reasons))
    distinct = any(c.has_distinct_eigenvalues() for c in classes)
    generic = None
    try:
        generic = is_generic(sysv)
        reasons.append(
            {"kind": "condition", "name": "genericity", "holds": generic}
        )
    except CapExceededError:
        reasons.append(
            {"kind": "condition", "name": "genericity", "holds": None, "note": "size cap"}
        )
    reasons.append(
        {"kind": "condition", "name": "distinct-eigenvalue-class", "holds": distinct}
    )
    if distinct and generic:
        reasons.append(
            {"kind": "criterion", "name": "distinct-generic-criterion", "holds": ab}
        )
        return Verdict("solvable" if ab else "unsolvable", tuple(reasons))
    return Verdict(
        "necessary-conditions-hold" if ab else "necessary-conditions-fail",
        tuple(reasons),
    )


def weak_dsp_verdict(classes) -> Verdict:
    """Existence of trivial-centralizer tuples; decided only when some class
    has n distinct eigenvalues (without that hypothesis the inequalities are
    not sufficient: a triple of nonzero nilpotent 2x2 classes satisfies both
    yet admits no trivial-centralizer triple)."""
    n = _check_sizes(classes)
    sysv = eigenvalue_system(classes)
    if not check_neutrality(sysv):
        return Verdict(
            "unsolvable",
            (
                {
                    "kind": "condition",
                    "name": "neutrality",
                    "holds": False,
                    "note": "trace sum / determinant product is not neutral; no tuples exist",
                },
            ),
        )
    ab, reasons = _base_reasons(classes)
    if n == 1:
        reasons.append({"kind": "criterion", "name": "rank-one-case", "holds": True})
        return Verdict("solvable", tuple(reasons))
    distinct = any(c.has_distinct_eigenvalues() for c in classes)
    reasons.append(
        {"kind": "condition", "name": "distinct-eigenvalue-class", "holds": distinct}
    )
    if distinct:
        reasons.append(
            {"kind": "criterion", "name": "weak-distinct-criterion", "holds": ab}
        )
        return Verdict("solvable" if ab else "unsolvable", tuple(reasons))
    reasons.append(
        {
            "kind": "caveat",
            "name": "nilpotent-triple-counterexample",
            "note": "without a distinct-eigenvalue class the inequalities are not sufficient",
        }
    )
    return Verdict("inapplicable", tuple(reasons))
