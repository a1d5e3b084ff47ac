"""Exact truncated power series in one formal variable.

A :class:`Series` is a dense vector of rational coefficients c[0..K] for the
powers x^0..x^K of the formal variable, together with its truncation order K.
All arithmetic is exact (``fractions.Fraction``); floats are rejected.

Truncation-order rules
----------------------
* Binary operations return a result truncated to the *minimum* of the two
  operand orders: coefficients beyond that are not fully determined, so they
  are dropped rather than silently kept.
* ``derivative`` drops the order by one for the same reason.
* Reading a coefficient beyond the order raises ``IndexError`` — a truncated
  series does not know those coefficients, and pretending they are zero is a
  classic source of silent wrong answers.

Serialization
-------------
``to_json_dict`` / ``from_json_dict`` use ``{"order": K, "coeffs":
["num/den", ...]}`` with ``len(coeffs) == K + 1`` and every rational written
in lowest terms with an explicit denominator.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Union

Rational = Union[int, Fraction]

__all__ = ["Series", "Rational"]


def _as_fraction(value: Rational) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"exact rational required, got {type(value).__name__}")


class Series:
    """An exactly-truncated formal power series."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Iterable[Rational], order: int | None = None):
        """Build a series from coefficients c0, c1, ...; pad with zeros to `order`.

        When `order` is given it must be >= len(coeffs) - 1.
        """
        cs = [_as_fraction(c) for c in coeffs]
        if order is not None:
            if order < 0:
                raise ValueError("order must be non-negative")
            if order < len(cs) - 1:
                raise ValueError(
                    f"{len(cs)} coefficients exceed requested order {order}"
                )
            cs.extend(Fraction(0) for _ in range(order + 1 - len(cs)))
        if not cs:
            raise ValueError("a series needs at least the constant coefficient")
        self._coeffs = tuple(cs)

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, order: int) -> "Series":
        return cls([], order=order) if order >= 0 else cls([0])

    @classmethod
    def one(cls, order: int) -> "Series":
        return cls([1], order=order)

    @classmethod
    def monomial(cls, coeff: Rational, power: int, order: int) -> "Series":
        """coeff * x^power, truncated at `order` (power must be <= order)."""
        if power < 0:
            raise ValueError("monomial power must be non-negative")
        if power > order:
            raise ValueError(f"monomial power {power} exceeds order {order}")
        cs = [Fraction(0)] * (power + 1)
        cs[power] = _as_fraction(coeff)
        return cls(cs, order=order)

    # -- basic queries -----------------------------------------------------

    @property
    def order(self) -> int:
        return len(self._coeffs) - 1

    @property
    def coefficients(self) -> tuple[Fraction, ...]:
        return self._coeffs

    def coefficient(self, power: int) -> Fraction:
        """The coefficient of x^power; power must lie in 0..order."""
        if not 0 <= power <= self.order:
            raise IndexError(
                f"coefficient of x^{power} requested, but series is only "
                f"known to order {self.order}"
            )
        return self._coeffs[power]

    def __getitem__(self, power: int) -> Fraction:
        return self.coefficient(power)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self._coeffs)

    def truncate(self, order: int) -> "Series":
        """The same series cut down to a lower (or equal) order."""
        if order > self.order:
            raise ValueError(
                f"cannot extend a series of order {self.order} to order {order}"
            )
        if order < 0:
            raise ValueError("order must be non-negative")
        return Series(self._coeffs[: order + 1])

    def shifted(self, powers: int) -> "Series":
        """Multiply by x^powers (powers >= 0).  Exact, so the order rises too."""
        if powers < 0:
            raise ValueError("shift must be non-negative")
        return Series((Fraction(0),) * powers + self._coeffs)

    # -- ring operations ---------------------------------------------------

    def _binary_orders(self, other: "Series") -> int:
        return min(self.order, other.order)

    def __add__(self, other):
        if isinstance(other, Series):
            k = self._binary_orders(other)
            return Series(
                [self._coeffs[i] + other._coeffs[i] for i in range(k + 1)]
            )
        try:
            c = _as_fraction(other)
        except TypeError:
            return NotImplemented
        return Series((self._coeffs[0] + c,) + self._coeffs[1:])

    __radd__ = __add__

    def __neg__(self):
        return Series([-c for c in self._coeffs])

    def __sub__(self, other):
        if isinstance(other, Series):
            k = self._binary_orders(other)
            return Series(
                [self._coeffs[i] - other._coeffs[i] for i in range(k + 1)]
            )
        try:
            c = _as_fraction(other)
        except TypeError:
            return NotImplemented
        return Series((self._coeffs[0] - c,) + self._coeffs[1:])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Series):
            k = self._binary_orders(other)
            out = [Fraction(0)] * (k + 1)
            for i, ci in enumerate(self._coeffs[: k + 1]):
                if ci == 0:
                    continue
                for j in range(0, k + 1 - i):
                    cj = other._coeffs[j]
                    if cj != 0:
                        out[i + j] += ci * cj
            return Series(out)
        try:
            c = _as_fraction(other)
        except TypeError:
            return NotImplemented
        return Series([c * ci for ci in self._coeffs])

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("series exponent must be a non-negative integer")
        result = Series.one(self.order)
        for _ in range(exponent):
            result = result * self
        return result

    def invert(self) -> "Series":
        """The multiplicative inverse; requires a non-zero constant term."""
        a = self._coeffs
        if a[0] == 0:
            raise ValueError("cannot invert a series with zero constant term")
        k = self.order
        out = [Fraction(0)] * (k + 1)
        out[0] = 1 / a[0]
        for p in range(1, k + 1):
            acc = Fraction(0)
            for i in range(1, p + 1):
                if a[i] != 0:
                    acc += a[i] * out[p - i]
            out[p] = -acc / a[0]
        return Series(out)

    def __truediv__(self, other):
        if isinstance(other, Series):
            return self * other.invert()
        try:
            c = _as_fraction(other)
        except TypeError:
            return NotImplemented
        if c == 0:
            raise ZeroDivisionError("division of a series by zero")
        return self * (Fraction(1) / c)

    # -- calculus-flavoured operations --------------------------------------

    def derivative(self) -> "Series":
        """Formal derivative; the order drops by one."""
        if self.order == 0:
            raise ValueError(
                "cannot differentiate a series known only to order 0"
            )
        return Series(
            [i * self._coeffs[i] for i in range(1, self.order + 1)]
        )

    def x_derivative(self) -> "Series":
        """x * d/dx, which keeps the order (coefficient p maps to p*c_p)."""
        return Series([i * c for i, c in enumerate(self._coeffs)])

    def log(self) -> "Series":
        """Formal logarithm; requires constant term exactly 1.

        Solved coefficientwise from log(a)' = a'/a, which preserves the order.
        """
        a = self._coeffs
        if a[0] != 1:
            raise ValueError("log requires a series with constant term 1")
        k = self.order
        out = [Fraction(0)] * (k + 1)
        for p in range(1, k + 1):
            acc = p * a[p]
            for i in range(1, p):
                acc -= i * out[i] * a[p - i]
            out[p] = acc / p
        return Series(out)

    def exp(self) -> "Series":
        """Formal exponential; requires constant term exactly 0."""
        a = self._coeffs
        if a[0] != 0:
            raise ValueError("exp requires a series with constant term 0")
        k = self.order
        out = [Fraction(0)] * (k + 1)
        out[0] = Fraction(1)
        for p in range(1, k + 1):
            acc = Fraction(0)
            for i in range(1, p + 1):
                if a[i] != 0:
                    acc += i * a[i] * out[p - i]
            out[p] = acc / p
        return Series(out)

    # -- equality / hashing / display ---------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self):
        return hash(self._coeffs)

    def __repr__(self):
        return f"Series(order={self.order}, {self.format_terms()})"

    def format_terms(self, variable: str = "λ") -> str:
        """Human-readable sum of non-zero terms, e.g. ``1 + 2*λ^2 + 10*λ^4``."""
        terms = []
        for p, c in enumerate(self._coeffs):
            if c == 0:
                continue
            if p == 0:
                terms.append(str(c))
            elif p == 1:
                terms.append(f"{c}*{variable}")
            else:
                terms.append(f"{c}*{variable}^{p}")
        return " + ".join(terms) if terms else "0"

    # -- serialization -------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "order": self.order,
            "coeffs": [f"{c.numerator}/{c.denominator}" for c in self._coeffs],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "Series":
        try:
            order = data["order"]
            coeffs = data["coeffs"]
        except (TypeError, KeyError) as exc:
            raise ValueError(f"series JSON needs 'order' and 'coeffs': {exc}") from exc
        if not isinstance(order, int) or order < 0:
            raise ValueError(f"invalid series order: {order!r}")
        if not isinstance(coeffs, list) or len(coeffs) != order + 1:
            raise ValueError(
                f"series of order {order} needs exactly {order + 1} coefficients"
            )
        parsed = []
        for entry in coeffs:
            if not isinstance(entry, str):
                raise ValueError(f"coefficient must be a 'num/den' string: {entry!r}")
            try:
                parsed.append(Fraction(entry))
            except (ValueError, ZeroDivisionError) as exc:
                raise ValueError(f"bad rational {entry!r}: {exc}") from exc
        return cls(parsed)
