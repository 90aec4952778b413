# Copyright 2024 Google LLC
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""
Exact arithmetic over the dyadic rationals Z[1/2].

Every coordinate in the package (breakpoints, flow times, interval endpoints) is a `Dyadic`. The ring is
closed under addition, subtraction and multiplication, and division is only ever by powers of two, so the
whole library stays exact without general rationals or floating point.

Classes:
    Dyadic: numerator / 2^exponent in lowest terms.
    DyInterval: an interval with dyadic endpoints and per-endpoint openness.

Functions:
    dyadic_arith(a, b, op) -> Dyadic | int: add, sub, mul or cmp.
    doubling_map(x0, x, power) -> Dyadic: the n-th power of h_{x0}(x) = 2(x - x0) + x0.
    random_dyadic(rng, lo, hi, depth) -> Dyadic: uniform sample on the 2^-depth lattice of [lo, hi].

Text form is "p/2^k" (or "p" when k = 0); `Dyadic.parse` also accepts "p/q" with q a power of two.
"""

from fractions import Fraction
from typing import Union

DyadicLike = Union["Dyadic", int, str, Fraction]


class Dyadic:
    """An element of Z[1/2] stored as numerator / 2^exponent.

    Normal form: exponent == 0 or numerator is odd. Instances are immutable and hashable; ints compare
    and hash equal to the corresponding integral Dyadic.
    """

    __slots__ = ("numerator", "exponent")

    def __init__(self, numerator: int = 0, exponent: int = 0):
        if exponent < 0:
            numerator <<= -exponent
            exponent = 0
        if numerator == 0:
            exponent = 0
        else:
            trailing = (numerator & -numerator).bit_length() - 1
            shift = min(trailing, exponent)
            numerator >>= shift
            exponent -= shift
        object.__setattr__(self, "numerator", numerator)
        object.__setattr__(self, "exponent", exponent)

    def __setattr__(self, name, value):
        raise AttributeError("Dyadic is immutable")

    def __reduce__(self):
        return (Dyadic, (self.numerator, self.exponent))

    @classmethod
    def of(cls, value: DyadicLike) -> "Dyadic":
        if isinstance(value, Dyadic):
            return value
        if isinstance(value, bool):
            raise TypeError("booleans are not dyadic numbers")
        if isinstance(value, int):
            return cls(value, 0)
        if isinstance(value, Fraction):
            den = value.denominator
            if den & (den - 1):
                raise ValueError(f"{value} is not a dyadic rational")
            return cls(value.numerator, den.bit_length() - 1)
        if isinstance(value, str):
            return cls.parse(value)
        raise TypeError(f"cannot convert {type(value).__name__} to Dyadic")

    @classmethod
    def parse(cls, text: str) -> "Dyadic":
        """Parses "p", "p/2^k", "p/q" (q a power of two) or a finite binary-exact decimal like "0.375"."""
        s = str(text).strip().replace(" ", "")
        if not s:
            raise ValueError("empty dyadic literal")
        try:
            if "/" in s:
                num, den = s.split("/", 1)
                if den.startswith("2^"):
                    return cls(int(num), int(den[2:]))
                return cls.of(Fraction(int(num), int(den)))
            if "." in s:
                return cls.of(Fraction(s))
            return cls(int(s), 0)
        except ZeroDivisionError as e:
            raise ValueError(f"invalid dyadic literal {text!r}") from e
        except ValueError as e:
            raise ValueError(f"invalid dyadic literal {text!r}: {e}") from e

    def _aligned(self, other: "Dyadic") -> tuple[int, int, int]:
        e = max(self.exponent, other.exponent)
        return self.numerator << (e - self.exponent), other.numerator << (e - other.exponent), e

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        a, b, e = self._aligned(other)
        return Dyadic(a + b, e)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        a, b, e = self._aligned(other)
        return Dyadic(a - b, e)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return Dyadic(self.numerator * other.numerator, self.exponent + other.exponent)

    __rmul__ = __mul__

    def __neg__(self):
        return Dyadic(-self.numerator, self.exponent)

    def __pos__(self):
        return self

    def __abs__(self):
        return self if self.numerator >= 0 else -self

    def mul_pow2(self, k: int) -> "Dyadic":
        """Returns self * 2^k for any integer k."""
        return Dyadic(self.numerator, self.exponent - k)

    def half(self) -> "Dyadic":
        return self.mul_pow2(-1)

    def floor(self) -> int:
        return self.numerator >> self.exponent

    def ceil(self) -> int:
        return -((-self.numerator) >> self.exponent)

    def frac(self) -> "Dyadic":
        return self - self.floor()

    def is_integer(self) -> bool:
        return self.exponent == 0

    def log2_exact(self) -> int | None:
        """Returns k when self == 2^k, otherwise None."""
        if self.numerator > 0 and self.numerator & (self.numerator - 1) == 0:
            return self.numerator.bit_length() - 1 - self.exponent
        return None

    def to_fraction(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.exponent)

    def sign(self) -> int:
        return (self.numerator > 0) - (self.numerator < 0)

    def cmp(self, other) -> int:
        a, b, _ = self._aligned(_coerce_strict(other))
        return (a > b) - (a < b)

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self.numerator == other.numerator and self.exponent == other.exponent

    def __hash__(self):
        if self.exponent == 0:
            return hash(self.numerator)
        return hash((self.numerator, self.exponent))

    def __lt__(self, other):
        return self.cmp(other) < 0

    def __le__(self, other):
        return self.cmp(other) <= 0

    def __gt__(self, other):
        return self.cmp(other) > 0

    def __ge__(self, other):
        return self.cmp(other) >= 0

    def __bool__(self):
        return self.numerator != 0

    def __str__(self):
        if self.exponent == 0:
            return str(self.numerator)
        return f"{self.numerator}/2^{self.exponent}"

    def __repr__(self):
        return f"Dyadic('{self}')"


def _coerce(value):
    if isinstance(value, Dyadic):
        return value
    if isinstance(value, int) and not isinstance(value, bool):
        return Dyadic(value, 0)
    return NotImplemented


def _coerce_strict(value) -> Dyadic:
    result = _coerce(value)
    if result is NotImplemented:
        return Dyadic.of(value)
    return result


ZERO = Dyadic(0)
ONE = Dyadic(1)
HALF = Dyadic(1, 1)


def dy(value: DyadicLike) -> Dyadic:
    """Shorthand constructor used throughout the package and its tests."""
    return Dyadic.of(value)


def dyadic_arith(a: Dyadic, b: Dyadic, op: str):
    """Applies one of add, sub, mul or cmp to two dyadics.

    Args:
        a: Left operand.
        b: Right operand.
        op: One of "add", "sub", "mul", "cmp".

    Returns:
        Dyadic for the ring operations; -1, 0 or 1 for "cmp".

    Raises:
        ValueError: For an unknown operation name.
    """
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "cmp":
        return a.cmp(b)
    raise ValueError(f"Not implemented dyadic operation: {op}")


def doubling_map(x0: Dyadic, x: Dyadic, power: int = 1) -> Dyadic:
    """Returns h_{x0}^power(x) = 2^power (x - x0) + x0, exactly, for any integer power."""
    return (x - x0).mul_pow2(power) + x0


def random_dyadic(rng, lo: DyadicLike, hi: DyadicLike, depth: int = 12, open_ends: bool = True) -> Dyadic:
    """Samples a dyadic uniformly from the 2^-depth lattice points of [lo, hi] (or of (lo, hi))."""
    lo, hi = dy(lo), dy(hi)
    scale = 1 << depth
    a = (lo * scale).ceil()
    b = (hi * scale).floor()
    if open_ends:
        if Dyadic(a, depth) == lo:
            a += 1
        if Dyadic(b, depth) == hi:
            b -= 1
    if a > b:
        return (lo + hi).half()
    return Dyadic(rng.randint(a, b), depth)


class DyInterval:
    """An interval with dyadic endpoints lo < hi and per-endpoint openness.

    The default is the open interval (lo, hi), which is what charts and fiber domains use; half-open
    intervals appear as the fundamental domains of atlas pieces.
    """

    __slots__ = ("lo", "hi", "lo_closed", "hi_closed")

    def __init__(self, lo: DyadicLike, hi: DyadicLike, lo_closed: bool = False, hi_closed: bool = False):
        lo, hi = dy(lo), dy(hi)
        if not lo < hi:
            raise ValueError(f"empty interval: lo={lo} must be below hi={hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "lo_closed", lo_closed)
        object.__setattr__(self, "hi_closed", hi_closed)

    def __setattr__(self, name, value):
        raise AttributeError("DyInterval is immutable")

    @classmethod
    def closed(cls, lo: DyadicLike, hi: DyadicLike) -> "DyInterval":
        return cls(lo, hi, True, True)

    @classmethod
    def half_open(cls, lo: DyadicLike, hi: DyadicLike) -> "DyInterval":
        return cls(lo, hi, True, False)

    @classmethod
    def parse(cls, text) -> "DyInterval":
        """Parses "(a, b)", "[a, b)", "[a, b]" or a two-element list (read as open)."""
        if isinstance(text, (list, tuple)):
            lo, hi = text
            return cls(dy(lo), dy(hi))
        s = str(text).strip()
        if len(s) < 5 or s[0] not in "([" or s[-1] not in ")]" or "," not in s:
            raise ValueError(f"invalid interval literal {text!r}")
        lo, hi = s[1:-1].split(",", 1)
        return cls(Dyadic.parse(lo), Dyadic.parse(hi), s[0] == "[", s[-1] == "]")

    @property
    def length(self) -> Dyadic:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Dyadic:
        return (self.lo + self.hi).half()

    def contains(self, x: DyadicLike) -> bool:
        x = dy(x)
        above = self.lo <= x if self.lo_closed else self.lo < x
        below = x <= self.hi if self.hi_closed else x < self.hi
        return above and below

    __contains__ = contains

    def closure(self) -> "DyInterval":
        return DyInterval(self.lo, self.hi, True, True)

    def interior(self) -> "DyInterval":
        return DyInterval(self.lo, self.hi)

    def translate(self, s: DyadicLike) -> "DyInterval":
        s = dy(s)
        return DyInterval(self.lo + s, self.hi + s, self.lo_closed, self.hi_closed)

    def negate(self) -> "DyInterval":
        return DyInterval(-self.hi, -self.lo, self.hi_closed, self.lo_closed)

    def intersect(self, other: "DyInterval") -> "DyInterval | None":
        if self.lo > other.lo or (self.lo == other.lo and not self.lo_closed):
            lo, lo_closed = self.lo, self.lo_closed
        else:
            lo, lo_closed = other.lo, other.lo_closed
        if self.hi < other.hi or (self.hi == other.hi and not self.hi_closed):
            hi, hi_closed = self.hi, self.hi_closed
        else:
            hi, hi_closed = other.hi, other.hi_closed
        if lo < hi:
            return DyInterval(lo, hi, lo_closed, hi_closed)
        return None

    def is_subset(self, other: "DyInterval") -> bool:
        lo_ok = other.lo < self.lo or (other.lo == self.lo and (other.lo_closed or not self.lo_closed))
        hi_ok = self.hi < other.hi or (other.hi == self.hi and (other.hi_closed or not self.hi_closed))
        return lo_ok and hi_ok

    def compactly_inside(self, other: "DyInterval") -> bool:
        """True when the closure of self lies in the interior of other."""
        return other.lo < self.lo and self.hi < other.hi

    def _key(self):
        return (self.lo, self.hi, self.lo_closed, self.hi_closed)

    def __eq__(self, other):
        if not isinstance(other, DyInterval):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __str__(self):
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{self.lo}, {self.hi}{right}"

    def __repr__(self):
        return f"DyInterval('{self}')"
