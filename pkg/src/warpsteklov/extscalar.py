"""Extended-exponent real scalars.

A value is stored as ``sign * significand * 2**exponent`` with the
significand in [1, 2) and an unbounded integer exponent.  This keeps
quantities that grow or decay like exp(+-sqrt(mu)) representable far beyond
the native double range while costing only one extra rounding per
operation.  Zero is canonical: ``(sign=0, significand=0.0, exponent=0)``.
"""

from __future__ import annotations

import math

_LN2 = math.log(2.0)
# largest/smallest binary exponents that still convert to a finite,
# non-zero double (subnormals included)
_MAX_NATIVE_EXP = 1023
_MIN_NATIVE_EXP = -1074


class ExtScalar:
    __slots__ = ("sign", "significand", "exponent")

    def __init__(self, sign: int, significand: float, exponent: int):
        if sign == 0 or significand == 0.0:
            self.sign = 0
            self.significand = 0.0
            self.exponent = 0
        else:
            self.sign = 1 if sign > 0 else -1
            self.significand = significand
            self.exponent = exponent

    # ------------------------------------------------------------------
    # constructors

    @staticmethod
    def from_float(x: float) -> "ExtScalar":
        if x == 0.0:
            return _ZERO
        if not math.isfinite(x):
            raise ValueError(f"cannot represent non-finite value {x!r}")
        m, e = math.frexp(abs(x))  # m in [0.5, 1)
        return ExtScalar(1 if x > 0 else -1, 2.0 * m, e - 1)

    @staticmethod
    def from_log(sign: int, ln_magnitude: float) -> "ExtScalar":
        """Build sign * exp(ln_magnitude); accurate to ~|ln_magnitude|*eps."""
        if sign == 0:
            return _ZERO
        e = math.floor(ln_magnitude / _LN2)
        m = math.exp(ln_magnitude - e * _LN2)
        # guard rounding at the binade edge
        if m >= 2.0:
            m *= 0.5
            e += 1
        elif m < 1.0:
            m *= 2.0
            e -= 1
        return ExtScalar(sign, m, e)

    @staticmethod
    def exp(t: float) -> "ExtScalar":
        """exp(t) for arbitrary real t, never overflowing."""
        return ExtScalar.from_log(1, t)

    # ------------------------------------------------------------------
    # queries

    @property
    def is_zero(self) -> bool:
        return self.sign == 0

    @property
    def ln_mag(self) -> float:
        """Natural log of |value|; -inf for zero."""
        if self.sign == 0:
            return -math.inf
        return self.exponent * _LN2 + math.log(self.significand)

    def to_float(self) -> float:
        """Convert to a native double; raise if the exponent does not fit."""
        if self.sign == 0:
            return 0.0
        if self.exponent > _MAX_NATIVE_EXP:
            raise OverflowError(f"ExtScalar exponent {self.exponent} exceeds native range")
        if self.exponent < _MIN_NATIVE_EXP:
            raise OverflowError(f"ExtScalar exponent {self.exponent} underflows native range")
        return self.sign * math.ldexp(self.significand, self.exponent)

    def to_float_or_zero(self) -> float:
        """Lossy conversion: native underflow maps to 0.0, overflow raises."""
        if self.sign == 0 or self.exponent < _MIN_NATIVE_EXP:
            return 0.0
        if self.exponent > _MAX_NATIVE_EXP:
            raise OverflowError(f"ExtScalar exponent {self.exponent} exceeds native range")
        return self.sign * math.ldexp(self.significand, self.exponent)

    def __float__(self) -> float:
        return self.to_float()

    # ------------------------------------------------------------------
    # arithmetic

    @staticmethod
    def _normalized(sign: int, mag: float, exponent: int) -> "ExtScalar":
        if mag == 0.0:
            return _ZERO
        m, e = math.frexp(mag)
        return ExtScalar(sign, 2.0 * m, exponent + e - 1)

    def __neg__(self) -> "ExtScalar":
        if self.sign == 0:
            return _ZERO
        return ExtScalar(-self.sign, self.significand, self.exponent)

    def __abs__(self) -> "ExtScalar":
        if self.sign == 0:
            return _ZERO
        return ExtScalar(1, self.significand, self.exponent)

    def __mul__(self, other) -> "ExtScalar":
        other = _coerce(other)
        if self.sign == 0 or other.sign == 0:
            return _ZERO
        return self._normalized(
            self.sign * other.sign,
            self.significand * other.significand,
            self.exponent + other.exponent,
        )

    __rmul__ = __mul__

    def __truediv__(self, other) -> "ExtScalar":
        other = _coerce(other)
        if other.sign == 0:
            raise ZeroDivisionError("ExtScalar division by zero")
        if self.sign == 0:
            return _ZERO
        return self._normalized(
            self.sign * other.sign,
            self.significand / other.significand,
            self.exponent - other.exponent,
        )

    def __rtruediv__(self, other) -> "ExtScalar":
        return _coerce(other) / self

    def __add__(self, other) -> "ExtScalar":
        other = _coerce(other)
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        big, small = (self, other) if self.exponent >= other.exponent else (other, self)
        shift = big.exponent - small.exponent
        if shift > 54:
            return big  # the smaller operand is below one ulp of the larger
        total = big.sign * math.ldexp(big.significand, shift) + small.sign * small.significand
        if total == 0.0:
            return _ZERO
        return self._normalized(1 if total > 0 else -1, abs(total), small.exponent)

    __radd__ = __add__

    def __sub__(self, other) -> "ExtScalar":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "ExtScalar":
        return _coerce(other) + (-self)

    def sqrt(self) -> "ExtScalar":
        if self.sign == 0:
            return _ZERO
        if self.sign < 0:
            raise ValueError("sqrt of negative ExtScalar")
        m, e = self.significand, self.exponent
        if e % 2:
            m *= 2.0
            e -= 1
        return self._normalized(1, math.sqrt(m), e // 2)

    # ------------------------------------------------------------------
    # comparisons (total order on represented values)

    def _cmp(self, other) -> int:
        other = _coerce(other)
        if self.sign != other.sign:
            return -1 if self.sign < other.sign else 1
        if self.sign == 0:
            return 0
        # same nonzero sign: compare magnitudes
        if self.exponent != other.exponent:
            mag = -1 if self.exponent < other.exponent else 1
        elif self.significand != other.significand:
            mag = -1 if self.significand < other.significand else 1
        else:
            mag = 0
        return mag * self.sign

    def __eq__(self, other) -> bool:
        try:
            return self._cmp(other) == 0
        except TypeError:
            return NotImplemented

    def __lt__(self, other) -> bool:
        return self._cmp(other) < 0

    def __le__(self, other) -> bool:
        return self._cmp(other) <= 0

    def __gt__(self, other) -> bool:
        return self._cmp(other) > 0

    def __ge__(self, other) -> bool:
        return self._cmp(other) >= 0

    def __hash__(self):
        return hash((self.sign, self.significand, self.exponent))

    def __repr__(self) -> str:
        if self.sign == 0:
            return "ExtScalar(0)"
        return f"ExtScalar({'-' if self.sign < 0 else ''}{self.significand!r}*2**{self.exponent})"


def _coerce(x) -> ExtScalar:
    if isinstance(x, ExtScalar):
        return x
    if isinstance(x, (int, float)):
        return ExtScalar.from_float(float(x))
    raise TypeError(f"cannot coerce {type(x).__name__} to ExtScalar")


_ZERO = ExtScalar(0, 0.0, 0)

ZERO = _ZERO
ONE = ExtScalar(1, 1.0, 0)
