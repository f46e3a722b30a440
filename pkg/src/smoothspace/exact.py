from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Union

Scalar = Union["ExactComplex", int, Fraction, float, complex]

# (pi_degree, real part, imaginary part)
Term = tuple[int, Fraction, Fraction]


def _normalize(parts: dict[int, tuple[Fraction, Fraction]]) -> tuple[Term, ...]:
    return tuple(
        (deg, re, im) for deg, (re, im) in sorted(parts.items()) if re != 0 or im != 0
    )


def fraction_json(value: Fraction) -> dict[str, int]:
    return {"num": value.numerator, "den": value.denominator}


@dataclass(frozen=True, slots=True, eq=False)
class ExactComplex:
    """An element of Q(i)[pi, 1/pi], or a float approximation of a complex number.

    Exact values are Laurent polynomials in pi with Gaussian rational coefficients, so the
    symbols (2*pi*i*m)^k stay exact. Inexact values are kept as a single pi-free term built
    from a float and are re-rounded to float precision after every operation.
    """

    terms: tuple[Term, ...] = ()
    exact: bool = True

    @classmethod
    def of(cls, re: int | Fraction = 0, im: int | Fraction = 0, pi: int = 0) -> ExactComplex:
        return cls(_normalize({pi: (Fraction(re), Fraction(im))}), True)

    @classmethod
    def from_complex(cls, value: complex | float) -> ExactComplex:
        z = complex(value)
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise ValueError(f"Non-finite coefficient: {value!r}")
        return cls(_normalize({0: (Fraction(z.real), Fraction(z.imag))}), False)

    @classmethod
    def coerce(cls, value: Scalar) -> ExactComplex:
        if isinstance(value, ExactComplex):
            return value
        if isinstance(value, bool):
            return cls.of(int(value))
        if isinstance(value, (int, Fraction)):
            return cls.of(value)
        if isinstance(value, (float, complex)):
            return cls.from_complex(value)
        raise TypeError(f"Cannot interpret {value!r} as a coefficient")

    # -- inspection -------------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    @property
    def pi_free(self) -> bool:
        return all(deg == 0 for deg, _, _ in self.terms)

    @property
    def re(self) -> Fraction:
        if not self.pi_free:
            raise ValueError(f"{self} is not a Gaussian rational")
        return self.terms[0][1] if self.terms else Fraction(0)

    @property
    def im(self) -> Fraction:
        if not self.pi_free:
            raise ValueError(f"{self} is not a Gaussian rational")
        return self.terms[0][2] if self.terms else Fraction(0)

    def is_unit(self) -> bool:
        """True when division by this value keeps the result in the same ring."""
        if not self.exact:
            return bool(self.terms)
        return len(self.terms) == 1

    def components(self) -> dict[tuple[int, str], Fraction]:
        """Rational coordinates over the basis pi^d, i*pi^d."""
        out: dict[tuple[int, str], Fraction] = {}
        for deg, re, im in self.terms:
            if re:
                out[(deg, "re")] = re
            if im:
                out[(deg, "im")] = im
        return out

    def to_complex(self) -> complex:
        total = 0j
        for deg, re, im in self.terms:
            total += complex(float(re), float(im)) * math.pi**deg
        return total

    def __complex__(self) -> complex:
        return self.to_complex()

    def __abs__(self) -> float:
        return abs(self.to_complex())

    # -- arithmetic -------------------------------------------------------------------

    def _inexact(self, value: complex) -> ExactComplex:
        return ExactComplex.from_complex(value)

    def __add__(self, other: Scalar) -> ExactComplex:
        try:
            rhs = ExactComplex.coerce(other)
        except TypeError:
            return NotImplemented
        if not (self.exact and rhs.exact):
            return self._inexact(self.to_complex() + rhs.to_complex())
        parts: dict[int, tuple[Fraction, Fraction]] = {}
        for deg, re, im in (*self.terms, *rhs.terms):
            old_re, old_im = parts.get(deg, (Fraction(0), Fraction(0)))
            parts[deg] = (old_re + re, old_im + im)
        return ExactComplex(_normalize(parts), True)

    __radd__ = __add__

    def __neg__(self) -> ExactComplex:
        return ExactComplex(tuple((deg, -re, -im) for deg, re, im in self.terms), self.exact)

    def __sub__(self, other: Scalar) -> ExactComplex:
        try:
            rhs = ExactComplex.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-rhs)

    def __rsub__(self, other: Scalar) -> ExactComplex:
        return ExactComplex.coerce(other) - self

    def __mul__(self, other: Scalar) -> ExactComplex:
        try:
            rhs = ExactComplex.coerce(other)
        except TypeError:
            return NotImplemented
        if not (self.exact and rhs.exact):
            return self._inexact(self.to_complex() * rhs.to_complex())
        parts: dict[int, tuple[Fraction, Fraction]] = {}
        for d1, a, b in self.terms:
            for d2, c, d in rhs.terms:
                old_re, old_im = parts.get(d1 + d2, (Fraction(0), Fraction(0)))
                parts[d1 + d2] = (old_re + a * c - b * d, old_im + a * d + b * c)
        return ExactComplex(_normalize(parts), True)

    __rmul__ = __mul__

    def conjugate(self) -> ExactComplex:
        return ExactComplex(tuple((deg, re, -im) for deg, re, im in self.terms), self.exact)

    def inverse(self) -> ExactComplex:
        if not self.terms:
            raise ZeroDivisionError("division by an exact zero")
        if not self.exact:
            return self._inexact(1 / self.to_complex())
        if len(self.terms) != 1:
            raise ValueError(f"{self} is not invertible in Q(i)[pi, 1/pi]")
        deg, re, im = self.terms[0]
        norm = re * re + im * im
        return ExactComplex(((-deg, re / norm, -im / norm),), True)

    def __truediv__(self, other: Scalar) -> ExactComplex:
        try:
            rhs = ExactComplex.coerce(other)
        except TypeError:
            return NotImplemented
        if not (self.exact and rhs.exact):
            if rhs.is_zero():
                raise ZeroDivisionError("division by zero")
            return self._inexact(self.to_complex() / rhs.to_complex())
        return self * rhs.inverse()

    def __rtruediv__(self, other: Scalar) -> ExactComplex:
        return ExactComplex.coerce(other) / self

    def __pow__(self, exponent: int) -> ExactComplex:
        if not isinstance(exponent, int):
            return NotImplemented
        base = self if exponent >= 0 else self.inverse()
        result = ONE if base.exact else ExactComplex.from_complex(1.0)
        for _ in range(abs(exponent)):
            result = result * base
        return result

    # -- comparison -------------------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction, float, complex)) and not isinstance(other, bool):
            other = ExactComplex.coerce(other)
        if not isinstance(other, ExactComplex):
            return NotImplemented
        if self.exact and other.exact:
            return self.terms == other.terms
        return self.to_complex() == other.to_complex()

    def __hash__(self) -> int:
        if self.pi_free and self.im == 0:
            return hash(self.re)
        return hash(self.terms)

    def isclose(self, other: Scalar, rel_tol: float = 1e-12, abs_tol: float = 0.0) -> bool:
        rhs = ExactComplex.coerce(other)
        if self.exact and rhs.exact:
            return self == rhs
        return cmath.isclose(self.to_complex(), rhs.to_complex(), rel_tol=rel_tol, abs_tol=abs_tol)

    # -- output -----------------------------------------------------------------------

    def as_dict(self) -> dict[str, Any]:
        if not self.exact:
            z = self.to_complex()
            return {"exact": False, "re": z.real, "im": z.imag}
        return {
            "exact": True,
            "terms": [
                {"pi": deg, "re": fraction_json(re), "im": fraction_json(im)}
                for deg, re, im in self.terms
            ],
        }

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> ExactComplex:
        if not payload.get("exact", True):
            return cls.from_complex(complex(payload["re"], payload["im"]))
        value = ZERO
        for term in payload.get("terms", []):
            value = value + cls.of(
                Fraction(term["re"]["num"], term["re"]["den"]),
                Fraction(term["im"]["num"], term["im"]["den"]),
                int(term["pi"]),
            )
        return value

    def __str__(self) -> str:
        if not self.exact:
            return repr(self.to_complex())
        if not self.terms:
            return "0"
        chunks = []
        for deg, re, im in self.terms:
            base = f"({re}+{im}i)" if re and im else (f"{re}" if re else f"{im}i")
            chunks.append(base if deg == 0 else f"{base}*pi^{deg}")
        return " + ".join(chunks)

    def __repr__(self) -> str:
        return f"ExactComplex({self})"


ZERO = ExactComplex()
ONE = ExactComplex.of(1)
I = ExactComplex.of(0, 1)
PI = ExactComplex.of(1, 0, 1)

_I_POWERS = ((1, 0), (0, 1), (-1, 0), (0, -1))


def i_power(e: int) -> ExactComplex:
    re, im = _I_POWERS[e % 4]
    return ExactComplex.of(re, im)


def two_pi_i_power(x: int | Fraction, e: int) -> ExactComplex:
    """(2*pi*i*x)^e as an exact value."""
    if e == 0:
        return ONE
    scale = Fraction(2 * x) ** e
    re, im = _I_POWERS[e % 4]
    return ExactComplex.of(scale * re, scale * im, e)


def all_exact(values: Iterable[ExactComplex]) -> bool:
    return all(v.exact for v in values)
