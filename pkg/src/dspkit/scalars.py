"""Exact Gaussian-rational scalars: the base field for everything else.

A value is a + b*i with rational a, b kept in canonical (reduced,
positive-denominator) form, so equality and hashing are structural.
"""

from __future__ import annotations

import re as _re
from fractions import Fraction


class GaussianRational:
    """Exact complex number with rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, GaussianRational):
            if im != 0:
                raise ValueError("cannot add an imaginary part twice")
            re, im = re.re, re.im
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return as_gaussian(other) - self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = as_gaussian(other)
        n = other.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero GaussianRational")
        return GaussianRational(
            (self.re * other.re + self.im * other.im) / n,
            (self.im * other.re - self.re * other.im) / n,
        )

    def __rtruediv__(self, other):
        return as_gaussian(other) / self

    def __pow__(self, k: int):
        if k < 0:
            return GaussianRational(1) / self ** (-k)
        out = GaussianRational(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def norm(self) -> Fraction:
        """|z|^2 as an exact rational."""
        return self.re * self.re + self.im * self.im

    # -- predicates and structure -------------------------------------------

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def is_integer(self) -> bool:
        return self.im == 0 and self.re.denominator == 1

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = GaussianRational(other)
        if not isinstance(other, GaussianRational):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    # -- text form ----------------------------------------------------------

    def __str__(self):
        if self.im == 0:
            return _frac_str(self.re)
        if self.re == 0:
            return _frac_str(self.im) + "i"
        sign = "+" if self.im > 0 else "-"
        return "%s%s%si" % (_frac_str(self.re), sign, _frac_str(abs(self.im)))

    def __repr__(self):
        return "GaussianRational(%r, %r)" % (str(self.re), str(self.im))

    def __complex__(self):
        return complex(self.re, self.im)


def _frac_str(f: Fraction) -> str:
    if f.denominator == 1:
        return str(f.numerator)
    return "%d/%d" % (f.numerator, f.denominator)


def _coerce(value):
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, (int, Fraction)):
        return GaussianRational(value)
    return None


def as_gaussian(value) -> GaussianRational:
    """Coerce int/Fraction/str into a GaussianRational."""
    if isinstance(value, str):
        return parse_scalar(value)
    out = _coerce(value)
    if out is None:
        raise TypeError("cannot coerce %r to GaussianRational" % (value,))
    return out


# Text grammar: "p/q", "p/q+r/s i", "-r/s i"; whitespace around the
# imaginary unit optional, printed form omits denominator 1.
_TERM = _re.compile(r"^([+-]?\d+(?:/\d+)?)(i?)$")


def parse_scalar(text: str) -> GaussianRational:
    """Parse the canonical scalar text form, bit-exactly."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty scalar")
    # split into signed terms
    terms = []
    start = 0
    for k in range(1, len(s)):
        if s[k] in "+-" and s[k - 1] not in "+-/":
            terms.append(s[start:k])
            start = k
    terms.append(s[start:])
    re_part = Fraction(0)
    im_part = Fraction(0)
    seen_re = seen_im = False
    for term in terms:
        if term in ("i", "+i", "-i"):
            term = term[:-1] + "1i"
        m = _TERM.match(term)
        if not m:
            raise ValueError("bad scalar %r" % text)
        value = Fraction(m.group(1))
        if m.group(2):
            if seen_im:
                raise ValueError("bad scalar %r" % text)
            im_part, seen_im = value, True
        else:
            if seen_re:
                raise ValueError("bad scalar %r" % text)
            re_part, seen_re = value, True
    return GaussianRational(re_part, im_part)


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
IMAG = GaussianRational(0, 1)
