"""Overflow-proof reals: sign * mantissa * 2**exp2 with an unbounded exponent.

Long three-term recurrences grow or shrink the iterates far past the double
range while only the *relative* values matter for zero locations and Sturm
counts.  ScaledReal keeps a double mantissa normalized into [1, 2) and moves
all dynamic range into a Python integer exponent, so rescaling is exact
(powers of two never touch mantissa bits) and the exponent never saturates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["ScaledReal"]

# Mantissas this far apart no longer interact under double addition.
_ALIGN_LIMIT = 64


@dataclass(frozen=True)
class ScaledReal:
    sign: int        # -1, 0, +1
    mantissa: float  # in [1, 2); 0.0 iff sign == 0
    exp2: int        # unbounded base-2 exponent

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or +1, got {self.sign!r}")
        if self.sign == 0:
            if self.mantissa != 0.0:
                raise ValueError("zero value must have mantissa 0.0")
        elif not (1.0 <= self.mantissa < 2.0):
            raise ValueError(f"mantissa {self.mantissa!r} not in [1, 2)")

    # -- construction ------------------------------------------------------

    @classmethod
    def zero(cls) -> "ScaledReal":
        return cls(0, 0.0, 0)

    @classmethod
    def one(cls) -> "ScaledReal":
        return cls(1, 1.0, 0)

    @classmethod
    def from_float(cls, v: float, exp2: int = 0) -> "ScaledReal":
        """Exact conversion of a finite float, optionally pre-scaled by 2**exp2."""
        v = float(v)
        if math.isnan(v) or math.isinf(v):
            raise ValueError(f"cannot represent {v!r}")
        if v == 0.0:
            return cls(0, 0.0, 0)
        m, e = math.frexp(abs(v))  # abs(v) == m * 2**e, m in [0.5, 1)
        return cls(1 if v > 0 else -1, 2.0 * m, e - 1 + exp2)

    # -- conversion --------------------------------------------------------

    def to_float(self) -> float:
        """Nearest double; overflows to +-inf and underflows to 0.0 outside
        the double range.  Exact whenever the exponent fits."""
        try:
            return self.sign * math.ldexp(self.mantissa, self.exp2)
        except OverflowError:
            return self.sign * math.inf

    def __float__(self) -> float:
        return self.to_float()

    def log2_abs(self) -> float:
        """log2(|value|); -inf for zero."""
        if self.sign == 0:
            return -math.inf
        return self.exp2 + math.log2(self.mantissa)

    # -- arithmetic --------------------------------------------------------

    def ldexp(self, k: int) -> "ScaledReal":
        """Exact scaling by 2**k."""
        if self.sign == 0:
            return self
        return ScaledReal(self.sign, self.mantissa, self.exp2 + k)

    def __neg__(self) -> "ScaledReal":
        return ScaledReal(-self.sign, self.mantissa, self.exp2)

    def __abs__(self) -> "ScaledReal":
        return ScaledReal(abs(self.sign), self.mantissa, self.exp2)

    def __mul__(self, other) -> "ScaledReal":
        other = _coerce(other)
        if self.sign == 0 or other.sign == 0:
            return ScaledReal.zero()
        m = self.mantissa * other.mantissa  # in [1, 4)
        e = self.exp2 + other.exp2
        if m >= 2.0:
            m *= 0.5
            e += 1
        return ScaledReal(self.sign * other.sign, m, e)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "ScaledReal":
        other = _coerce(other)
        if other.sign == 0:
            raise ZeroDivisionError("ScaledReal division by zero")
        if self.sign == 0:
            return ScaledReal.zero()
        m = self.mantissa / other.mantissa  # in (1/2, 2)
        e = self.exp2 - other.exp2
        if m < 1.0:
            m *= 2.0
            e -= 1
        return ScaledReal(self.sign * other.sign, m, e)

    def __add__(self, other) -> "ScaledReal":
        other = _coerce(other)
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        hi, lo = (self, other) if self.exp2 >= other.exp2 else (other, self)
        shift = hi.exp2 - lo.exp2
        if shift > _ALIGN_LIMIT:
            return hi  # lo is below one ulp of hi
        s = hi.sign * hi.mantissa + lo.sign * math.ldexp(lo.mantissa, -shift)
        return ScaledReal.from_float(s, hi.exp2)

    __radd__ = __add__

    def __sub__(self, other) -> "ScaledReal":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "ScaledReal":
        return _coerce(other) + (-self)

    # -- comparison --------------------------------------------------------

    def _cmp(self, other) -> int:
        other = _coerce(other)
        if self.sign != other.sign:
            return -1 if self.sign < other.sign else 1
        if self.sign == 0:
            return 0
        # same nonzero sign: normalized mantissa makes (exp2, mantissa) ordered
        key_s = (self.exp2, self.mantissa)
        key_o = (other.exp2, other.mantissa)
        if key_s == key_o:
            return 0
        mag = -1 if key_s < key_o else 1
        return mag * self.sign

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        try:
            other = _coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return (self.sign, self.mantissa, self.exp2) == (
            other.sign,
            other.mantissa,
            other.exp2,
        )

    def __hash__(self):
        return hash((self.sign, self.mantissa, self.exp2))

    def __repr__(self):
        if self.sign == 0:
            return "ScaledReal(0)"
        return f"ScaledReal({self.sign * self.mantissa!r} * 2**{self.exp2})"


def _coerce(v) -> ScaledReal:
    if isinstance(v, ScaledReal):
        return v
    if isinstance(v, (int, float)):
        return ScaledReal.from_float(float(v))
    raise TypeError(f"cannot mix ScaledReal with {type(v).__name__}")
