from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence

import numpy as np
import sympy

from smoothspace.errors import DegenerateOperator, NotUnimodular
from smoothspace.exact import ONE, ZERO, ExactComplex, Scalar, two_pi_i_power

logger = logging.getLogger(__name__)

X, Y = sympy.symbols("X Y")


@dataclass(frozen=True, slots=True)
class MultiIndex:
    alpha1: int
    alpha2: int

    def __post_init__(self) -> None:
        if self.alpha1 < 0 or self.alpha2 < 0:
            raise ValueError(f"Multiindex entries must be nonnegative: {self.as_tuple()}")

    @property
    def x(self) -> int:
        return self.alpha1

    @property
    def y(self) -> int:
        return self.alpha2

    @property
    def order(self) -> int:
        return self.alpha1 + self.alpha2

    def as_tuple(self) -> tuple[int, int]:
        return (self.alpha1, self.alpha2)

    def dominates(self, other: MultiIndex) -> bool:
        return self.alpha1 >= other.alpha1 and self.alpha2 >= other.alpha2

    # Componentwise partial order; incomparable pairs compare False both ways.
    def __le__(self, other: MultiIndex) -> bool:
        return other.dominates(self)

    def __lt__(self, other: MultiIndex) -> bool:
        return other.dominates(self) and self != other

    def __ge__(self, other: MultiIndex) -> bool:
        return self.dominates(other)

    def __gt__(self, other: MultiIndex) -> bool:
        return self.dominates(other) and self != other

    def __str__(self) -> str:
        return f"({self.alpha1},{self.alpha2})"


def monomial_key(mi: MultiIndex) -> tuple[int, int]:
    """Canonical display order: higher total order first, then larger alpha1."""
    return (-mi.order, -mi.alpha1)


@dataclass(frozen=True, slots=True)
class DiffOperator:
    """Constant-coefficient operator sum a_k d1^{alpha_k} d2^{beta_k} in canonical form."""

    terms: tuple[tuple[MultiIndex, ExactComplex], ...] = ()

    @classmethod
    def from_terms(
        cls, mapping: Mapping[MultiIndex | tuple[int, int], Scalar] | Iterable[Any]
    ) -> DiffOperator:
        items = mapping.items() if isinstance(mapping, Mapping) else mapping
        acc: dict[MultiIndex, ExactComplex] = {}
        for key, value in items:
            mi = key if isinstance(key, MultiIndex) else MultiIndex(*key)
            acc[mi] = acc.get(mi, ZERO) + ExactComplex.coerce(value)
        kept = [(mi, c) for mi, c in acc.items() if not c.is_zero()]
        kept.sort(key=lambda item: monomial_key(item[0]))
        return cls(tuple(kept))

    @classmethod
    def monomial(cls, alpha1: int, alpha2: int, coeff: Scalar = 1) -> DiffOperator:
        return cls.from_terms({MultiIndex(alpha1, alpha2): coeff})

    @classmethod
    def identity(cls) -> DiffOperator:
        return cls.monomial(0, 0)

    @classmethod
    def zero(cls) -> DiffOperator:
        return cls(())

    # -- inspection -------------------------------------------------------------------

    @property
    def coeffs(self) -> dict[MultiIndex, ExactComplex]:
        return dict(self.terms)

    def coefficient(self, mi: MultiIndex | tuple[int, int]) -> ExactComplex:
        key = mi if isinstance(mi, MultiIndex) else MultiIndex(*mi)
        return self.coeffs.get(key, ZERO)

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def exact(self) -> bool:
        return all(c.exact for _, c in self.terms)

    @property
    def points(self) -> frozenset[MultiIndex]:
        return frozenset(mi for mi, _ in self.terms)

    def order(self) -> int:
        if not self.terms:
            raise DegenerateOperator("The zero operator has no order")
        return max(mi.order for mi, _ in self.terms)

    def is_homogeneous(self) -> bool:
        return bool(self.terms) and len({mi.order for mi, _ in self.terms}) == 1

    # -- algebra ----------------------------------------------------------------------

    def __add__(self, other: DiffOperator) -> DiffOperator:
        return DiffOperator.from_terms([*self.terms, *other.terms])

    def __neg__(self) -> DiffOperator:
        return DiffOperator(tuple((mi, -c) for mi, c in self.terms))

    def __sub__(self, other: DiffOperator) -> DiffOperator:
        return self + (-other)

    def scale(self, factor: Scalar) -> DiffOperator:
        c = ExactComplex.coerce(factor)
        return DiffOperator.from_terms([(mi, v * c) for mi, v in self.terms])

    def __mul__(self, other: DiffOperator) -> DiffOperator:
        """Composition, i.e. the product of characteristic polynomials."""
        products = []
        for m1, c1 in self.terms:
            for m2, c2 in other.terms:
                products.append(
                    (MultiIndex(m1.alpha1 + m2.alpha1, m1.alpha2 + m2.alpha2), c1 * c2)
                )
        return DiffOperator.from_terms(products)

    def __pow__(self, exponent: int) -> DiffOperator:
        result = DiffOperator.identity()
        for _ in range(exponent):
            result = result * self
        return result

    def restrict(self, keep: Iterable[MultiIndex]) -> DiffOperator:
        wanted = set(keep)
        return DiffOperator(tuple((mi, c) for mi, c in self.terms if mi in wanted))

    def homogeneous_part(self, degree: int) -> DiffOperator:
        return DiffOperator(tuple((mi, c) for mi, c in self.terms if mi.order == degree))

    def chop(self, tol: float, scale: float | None = None) -> DiffOperator:
        """Drop inexact coefficients whose modulus is at most ``tol * scale``.

        ``scale`` defaults to the largest coefficient modulus.
        """
        if self.exact or not self.terms:
            return self
        if scale is None:
            scale = max(abs(c) for _, c in self.terms)
        return DiffOperator(tuple((mi, c) for mi, c in self.terms if abs(c) > tol * scale))

    def binary_form(self) -> sympy.Expr:
        """Sum of a_k X^alpha Y^beta with the coefficients carried as sympy numbers."""
        expr = sympy.Integer(0)
        for mi, c in self.terms:
            expr += _sympy_coefficient(c) * X**mi.alpha1 * Y**mi.alpha2
        return sympy.expand(expr)

    def component_forms(self) -> list[sympy.Poly]:
        """Rational binary forms whose common zeros are the rational zeros of the operator.

        An exact coefficient is a combination of pi^d and i*pi^d with rational weights; the
        operator splits into one rational binary form per basis element.
        """
        if not self.exact:
            raise ValueError("component forms need exact coefficients")
        grouped: dict[tuple[int, str], sympy.Expr] = {}
        for mi, c in self.terms:
            for key, value in c.components().items():
                grouped[key] = grouped.get(key, sympy.Integer(0)) + sympy.Rational(
                    value.numerator, value.denominator
                ) * X**mi.alpha1 * Y**mi.alpha2
        return [sympy.Poly(grouped[key], X, Y, domain="QQ") for key in sorted(grouped)]

    def as_dict(self) -> dict[str, Any]:
        return {
            "terms": [
                {"alpha": [mi.alpha1, mi.alpha2], "coeff": c.as_dict()} for mi, c in self.terms
            ]
        }

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> DiffOperator:
        return cls.from_terms(
            [
                (tuple(term["alpha"]), ExactComplex.from_dict(term["coeff"]))
                for term in payload.get("terms", [])
            ]
        )

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"[{c}]*d1^{mi.alpha1}*d2^{mi.alpha2}" for mi, c in self.terms)


def _sympy_coefficient(c: ExactComplex) -> sympy.Expr:
    if not c.exact:
        z = c.to_complex()
        return sympy.Float(z.real) + sympy.I * sympy.Float(z.imag)
    total = sympy.Integer(0)
    for deg, re, im in c.terms:
        total += (
            sympy.Rational(re.numerator, re.denominator)
            + sympy.I * sympy.Rational(im.numerator, im.denominator)
        ) * sympy.pi**deg
    return total


# -- characteristic polynomial ---------------------------------------------------------


def charpoly_exact(op: DiffOperator, m: int | Fraction, n: int | Fraction) -> ExactComplex:
    if op.is_zero():
        raise DegenerateOperator("Characteristic polynomial of the zero operator")
    total = ZERO
    for mi, c in op.terms:
        total = total + c * two_pi_i_power(m, mi.alpha1) * two_pi_i_power(n, mi.alpha2)
    return total


def eval_charpoly(op: DiffOperator, x: Scalar, y: Scalar) -> complex:
    """P(x, y) = sum a_k (2 pi i x)^alpha_k (2 pi i y)^beta_k."""
    if op.is_zero():
        raise DegenerateOperator("Characteristic polynomial of the zero operator")
    if (
        op.exact
        and isinstance(x, (int, Fraction))
        and isinstance(y, (int, Fraction))
        and op.order() <= 64
    ):
        return charpoly_exact(op, x, y).to_complex()
    u = 2j * math.pi * complex(x)
    v = 2j * math.pi * complex(y)
    return complex(sum(c.to_complex() * u**mi.alpha1 * v**mi.alpha2 for mi, c in op.terms))


def charpoly_values(op: DiffOperator, m: np.ndarray, n: np.ndarray) -> np.ndarray:
    """Vectorized P(m, n) in complex floating point."""
    if op.is_zero():
        raise DegenerateOperator("Characteristic polynomial of the zero operator")
    u = 2j * np.pi * np.asarray(m, dtype=float)
    v = 2j * np.pi * np.asarray(n, dtype=float)
    out = np.zeros(np.broadcast(u, v).shape, dtype=complex)
    for mi, c in op.terms:
        out += c.to_complex() * u**mi.alpha1 * v**mi.alpha2
    return out


# -- linear algebra --------------------------------------------------------------------


def monomial_columns(ops: Sequence[DiffOperator]) -> list[MultiIndex]:
    return sorted({mi for op in ops for mi in op.points}, key=monomial_key)


def _row_from_op(op: DiffOperator, columns: Sequence[MultiIndex]) -> list[ExactComplex]:
    coeffs = op.coeffs
    return [coeffs.get(mi, ZERO) for mi in columns]


def _op_from_row(row: Sequence[ExactComplex], columns: Sequence[MultiIndex]) -> DiffOperator:
    return DiffOperator.from_terms(zip(columns, row))


def _exact_rref(
    rows: list[list[ExactComplex]], aug: list[list[ExactComplex]]
) -> list[int]:
    """In-place Gauss-Jordan over Q(i)[pi, 1/pi]; returns the pivot row count.

    Pivots that are units are scaled to one. Otherwise rows are combined fraction-free,
    row_r <- piv * row_r - c * row_p, which keeps every entry in the ring.
    """
    n_rows = len(rows)
    n_cols = len(rows[0]) if rows else 0
    piv_r = 0
    for piv_c in range(n_cols):
        candidates = [r for r in range(piv_r, n_rows) if not rows[r][piv_c].is_zero()]
        if not candidates:
            continue
        units = [r for r in candidates if rows[r][piv_c].is_unit()]
        i_row = units[0] if units else candidates[0]
        if i_row != piv_r:
            rows[piv_r], rows[i_row] = rows[i_row], rows[piv_r]
            aug[piv_r], aug[i_row] = aug[i_row], aug[piv_r]
        pivot = rows[piv_r][piv_c]
        if pivot.is_unit():
            inv = pivot.inverse()
            rows[piv_r] = [v * inv for v in rows[piv_r]]
            aug[piv_r] = [v * inv for v in aug[piv_r]]
            pivot = ONE
        for r in range(n_rows):
            if r == piv_r:
                continue
            fr = rows[r][piv_c]
            if fr.is_zero():
                continue
            rows[r] = [pivot * a - fr * b for a, b in zip(rows[r], rows[piv_r])]
            aug[r] = [pivot * a - fr * b for a, b in zip(aug[r], aug[piv_r])]
        piv_r += 1
        if piv_r == n_rows:
            break
    return piv_r


def _float_rref(
    rows: np.ndarray, aug: np.ndarray, tol: float
) -> tuple[np.ndarray, np.ndarray, int]:
    n_rows, n_cols = rows.shape
    scale = float(np.max(np.abs(rows))) if rows.size else 0.0
    threshold = tol * scale
    piv_r = 0
    for piv_c in range(n_cols):
        if piv_r == n_rows:
            break
        column = np.abs(rows[piv_r:, piv_c])
        best = int(np.argmax(column))
        if column[best] <= threshold:
            rows[piv_r:, piv_c] = 0
            continue
        i_row = piv_r + best
        rows[[piv_r, i_row]] = rows[[i_row, piv_r]]
        aug[[piv_r, i_row]] = aug[[i_row, piv_r]]
        pivot = rows[piv_r, piv_c]
        rows[piv_r] /= pivot
        aug[piv_r] /= pivot
        for r in range(n_rows):
            if r != piv_r and rows[r, piv_c] != 0:
                factor = rows[r, piv_c]
                rows[r] -= factor * rows[piv_r]
                aug[r] -= factor * aug[piv_r]
        rows[np.abs(rows) <= threshold] = 0
        piv_r += 1
    return rows, aug, piv_r


def span_basis(
    ops: Sequence[DiffOperator], tol: float = 1e-10
) -> tuple[list[DiffOperator], int, list[list[ExactComplex]]]:
    """Row-echelon basis of the span, its rank, and the change-of-basis matrix.

    ``transform[i][j]`` is the weight of ``ops[j]`` in ``basis[i]``.
    """
    if not ops:
        raise ValueError("span_basis needs at least one operator")
    columns = monomial_columns(ops)
    count = len(ops)
    if not columns:
        return [], 0, []
    if all(op.exact for op in ops):
        rows = [_row_from_op(op, columns) for op in ops]
        aug = [[ONE if i == j else ZERO for j in range(count)] for i in range(count)]
        rank = _exact_rref(rows, aug)
        basis = [_op_from_row(rows[i], columns) for i in range(rank)]
        return basis, rank, [aug[i] for i in range(rank)]

    mat = np.array(
        [[c.to_complex() for c in _row_from_op(op, columns)] for op in ops], dtype=complex
    )
    ident = np.eye(count, dtype=complex)
    mat, ident, rank = _float_rref(mat, ident, tol)
    basis = [
        DiffOperator.from_terms(
            [(mi, ExactComplex.from_complex(v)) for mi, v in zip(columns, mat[i]) if v != 0]
        )
        for i in range(rank)
    ]
    transform = [[ExactComplex.from_complex(v) for v in ident[i]] for i in range(rank)]
    logger.debug("inexact span of %d operators has rank %d", count, rank)
    return basis, rank, transform


def span_rank(ops: Sequence[DiffOperator], tol: float = 1e-10) -> int:
    nonzero = [op for op in ops if not op.is_zero()]
    if not nonzero:
        return 0
    return span_basis(nonzero, tol)[1]


# -- substitutions ---------------------------------------------------------------------

Matrix2 = tuple[tuple[int, int], tuple[int, int]]


def _linear(c1: int, c2: int) -> DiffOperator:
    return DiffOperator.from_terms({(1, 0): c1, (0, 1): c2})


def substitute(op: DiffOperator, m11: int, m12: int, m21: int, m22: int) -> DiffOperator:
    """Rewrite ``op`` in the angular variables t where theta = M t.

    With theta_i = sum_j M_ij t_j the derivations transform by the inverse transpose:
    d/dtheta_i = sum_j (M^-1)_ji d/dt_j. For M = ((1, 1), (0, 1)) this sends
    d1^2 + 2 d1 d2 + d2^2 to (d/dt2)^2.
    """
    det = m11 * m22 - m12 * m21
    if abs(det) != 1:
        raise NotUnimodular(f"Substitution matrix has determinant {det}")
    inv = ((m22 * det, -m12 * det), (-m21 * det, m11 * det))
    images = (_linear(inv[0][0], inv[1][0]), _linear(inv[0][1], inv[1][1]))
    result = DiffOperator.zero()
    for mi, c in op.terms:
        result = result + (images[0] ** mi.alpha1 * images[1] ** mi.alpha2).scale(c)
    return result


def substitute_all(ops: Sequence[DiffOperator], matrix: Matrix2) -> list[DiffOperator]:
    (m11, m12), (m21, m22) = matrix
    return [substitute(op, m11, m12, m21, m22) for op in ops]


def matrix_inverse(matrix: Matrix2) -> Matrix2:
    (m11, m12), (m21, m22) = matrix
    det = m11 * m22 - m12 * m21
    if abs(det) != 1:
        raise NotUnimodular(f"Substitution matrix has determinant {det}")
    return ((m22 * det, -m12 * det), (-m21 * det, m11 * det))


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    if b == 0:
        return (abs(a), 1 if a >= 0 else -1, 0)
    g, x, y = _egcd(b, a % b)
    return (g, y, x - (a // b) * y)


def unimodular_completion(r: int, s: int) -> Matrix2:
    """Angular substitution turning the derivation s*d2 - r*d1 into d/dt2.

    (r, s) is a primitive direction (the projective root r/s of the binary form). The
    derivation matrix N has rows (s, B) and (r, D) with s*D - r*B = 1; the returned matrix is
    the one ``substitute`` expects, M = (N^-1)^T. For s = 1 it is ((1, -r), (0, 1)).
    """
    if math.gcd(r, s) != 1:
        raise ValueError(f"Direction ({r}, {s}) is not primitive")
    if s == 1:
        x, y = 1, 0
    else:
        _, x, y = _egcd(s, r)
    # s*x + r*y = 1, so D = x and B = -y
    n11, n12, n21, n22 = s, -y, r, x
    inv = matrix_inverse(((n11, n12), (n21, n22)))
    return ((inv[0][0], inv[1][0]), (inv[0][1], inv[1][1]))


# -- rational linear factors -----------------------------------------------------------


def _primitive_direction(a: Fraction, b: Fraction) -> tuple[int, int]:
    """Direction (r, s) of the factor a*X + b*Y, written as s*Y - r*X."""
    s, r = b, -a
    den = math.lcm(s.denominator, r.denominator)
    s_int, r_int = int(s * den), int(r * den)
    g = math.gcd(s_int, r_int)
    s_int, r_int = s_int // g, r_int // g
    if s_int < 0 or (s_int == 0 and r_int < 0):
        s_int, r_int = -s_int, -r_int
    return (r_int, s_int)


def common_form(op: DiffOperator) -> sympy.Poly | None:
    """GCD over Q of the component forms; None for the zero operator."""
    forms = [f for f in op.component_forms() if not f.is_zero]
    if not forms:
        return None
    g = forms[0]
    for f in forms[1:]:
        g = sympy.gcd(g, f)
    return g


def rational_directions(op: DiffOperator) -> list[tuple[tuple[int, int], int]]:
    """Rational linear factors s*d2 - r*d1 of a homogeneous exact operator.

    Returns ((r, s), multiplicity) pairs sorted by direction.
    """
    g = common_form(op)
    if g is None or g.total_degree() == 0:
        return []
    _, factors = sympy.factor_list(g.as_expr(), X, Y)
    found: list[tuple[tuple[int, int], int]] = []
    for factor, mult in factors:
        poly = sympy.Poly(factor, X, Y)
        if poly.total_degree() != 1:
            continue
        a = Fraction(str(poly.coeff_monomial(X)))
        b = Fraction(str(poly.coeff_monomial(Y)))
        if poly.coeff_monomial(1) != 0:
            continue
        found.append((_primitive_direction(a, b), int(mult)))
    return sorted(found)


def direction_multiplicity(op: DiffOperator, direction: tuple[int, int]) -> int:
    """Multiplicity of the factor s*d2 - r*d1 in an exact operator."""
    g = common_form(op)
    if g is None:
        return 0
    r, s = direction
    factor = sympy.Poly(s * Y - r * X, X, Y, domain="QQ")
    count = 0
    while g.total_degree() > 0:
        quotient, remainder = sympy.div(g, factor)
        if not remainder.is_zero:
            break
        g = quotient
        count += 1
    return count


def directional_operator(direction: tuple[int, int]) -> DiffOperator:
    r, s = direction
    return DiffOperator.from_terms({(1, 0): -r, (0, 1): s})
