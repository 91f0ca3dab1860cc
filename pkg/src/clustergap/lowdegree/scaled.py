"""Exact values of the form ``q * eps**d``."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational


@dataclass(frozen=True)
class ScaledRational:
    """``q * eps**d`` with rational ``q`` and symbolic ``eps``.

    Sums are only defined between equal ``d``; a zero of any degree is
    absorbed. Products add degrees.
    """

    d: int
    q: Fraction

    def __post_init__(self):
        object.__setattr__(self, "q", Fraction(self.q))

    @classmethod
    def zero(cls, d: int) -> "ScaledRational":
        return cls(d, Fraction(0))

    def _check(self, other: "ScaledRational") -> "ScaledRational":
        if not isinstance(other, ScaledRational):
            return NotImplemented
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        if self.d != other.d:
            if other.q == 0:
                return self
            if self.q == 0:
                return other
            raise ValueError(f"cannot add eps-degree {self.d} and {other.d}")
        return ScaledRational(self.d, self.q + other.q)

    def __neg__(self):
        return ScaledRational(self.d, -self.q)

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, ScaledRational):
            return ScaledRational(self.d + other.d, self.q * other.q)
        if isinstance(other, (int, Rational)):
            return ScaledRational(self.d, self.q * other)
        return NotImplemented

    __rmul__ = __mul__

    def __abs__(self):
        return ScaledRational(self.d, abs(self.q))

    def is_zero(self) -> bool:
        return self.q == 0

    def squared_at(self, eps_sq) -> Fraction:
        """``(q eps^d)^2`` with ``eps^2`` substituted; always rational."""
        return self.q**2 * Fraction(eps_sq) ** self.d

    def at(self, eps_sq) -> Fraction:
        """Substitute ``eps^2``; needs even ``d`` unless the value is zero."""
        if self.q == 0:
            return Fraction(0)
        if self.d % 2:
            raise ValueError("odd eps-degree has no rational value for rational eps^2")
        return self.q * Fraction(eps_sq) ** (self.d // 2)

    def to_float(self, eps: float) -> float:
        return float(self.q) * eps**self.d

    def __repr__(self) -> str:
        return f"{self.q} * eps^{self.d}"
