from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping

import numpy as np

from smoothspace.errors import NotProper, ParseError
from smoothspace.exact import ZERO, ExactComplex, Scalar
from smoothspace.operators import DiffOperator, charpoly_exact, eval_charpoly

Freq = tuple[int, int]


@dataclass(slots=True)
class TrigPoly:
    """Finite Fourier series sum c(m, n) z1^m z2^n on the torus, without stored zeros."""

    coeffs: dict[Freq, ExactComplex] = field(default_factory=dict)

    def __post_init__(self) -> None:
        clean: dict[Freq, ExactComplex] = {}
        for (m, n), value in self.coeffs.items():
            c = ExactComplex.coerce(value)
            if not c.is_zero():
                clean[(int(m), int(n))] = c
        self.coeffs = dict(sorted(clean.items()))

    @classmethod
    def from_terms(cls, terms: Mapping[Freq, Scalar] | Iterable[tuple[Freq, Scalar]]) -> TrigPoly:
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Freq, ExactComplex] = {}
        for key, value in items:
            acc[key] = acc.get(key, ZERO) + ExactComplex.coerce(value)
        return cls(acc)

    @classmethod
    def monomial(cls, m: int, n: int, coeff: Scalar = 1) -> TrigPoly:
        return cls({(m, n): ExactComplex.coerce(coeff)})

    @property
    def support(self) -> list[Freq]:
        return list(self.coeffs)

    @property
    def exact(self) -> bool:
        return all(c.exact for c in self.coeffs.values())

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_proper(self) -> bool:
        return all(m != 0 and n != 0 for m, n in self.coeffs)

    def coefficient(self, m: int, n: int) -> ExactComplex:
        return self.coeffs.get((m, n), ZERO)

    def radius(self) -> tuple[int, int]:
        if not self.coeffs:
            return (0, 0)
        return (max(abs(m) for m, _ in self.coeffs), max(abs(n) for _, n in self.coeffs))

    def __add__(self, other: TrigPoly) -> TrigPoly:
        return TrigPoly.from_terms([*self.coeffs.items(), *other.coeffs.items()])

    def __neg__(self) -> TrigPoly:
        return TrigPoly({k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other: TrigPoly) -> TrigPoly:
        return self + (-other)

    def scale(self, factor: Scalar) -> TrigPoly:
        c = ExactComplex.coerce(factor)
        return TrigPoly({k: v * c for k, v in self.coeffs.items()})

    def as_rows(self) -> list[dict[str, Any]]:
        rows = []
        for (m, n), c in self.coeffs.items():
            z = c.to_complex()
            row: dict[str, Any] = {"m": m, "n": n, "re": z.real, "im": z.imag}
            if c.exact:
                row["exact"] = c.as_dict()
            rows.append(row)
        return rows

    @classmethod
    def from_rows(cls, rows: Iterable[Mapping[str, Any]]) -> TrigPoly:
        terms = []
        for row in rows:
            if "exact" in row:
                c = ExactComplex.from_dict(row["exact"])
            else:
                c = ExactComplex.from_complex(complex(row.get("re", 0.0), row.get("im", 0.0)))
            terms.append(((int(row["m"]), int(row["n"])), c))
        return cls.from_terms(terms)


def apply_operator(op: DiffOperator, f: TrigPoly) -> TrigPoly:
    if op.exact and f.exact:
        return TrigPoly({(m, n): c * charpoly_exact(op, m, n) for (m, n), c in f.coeffs.items()})
    return TrigPoly(
        {
            (m, n): ExactComplex.from_complex(c.to_complex() * eval_charpoly(op, m, n))
            for (m, n), c in f.coeffs.items()
        }
    )


def proper_part(f: TrigPoly) -> TrigPoly:
    return TrigPoly({(m, n): c for (m, n), c in f.coeffs.items() if m != 0 and n != 0})


def sobolev_norm(f: TrigPoly, alpha: float, beta: float) -> float:
    """l2 norm of |m|^alpha |n|^beta |f(m, n)|; needs a proper f when a weight is active."""
    if (alpha or beta) and not f.is_proper():
        raise NotProper("Homogeneous Sobolev norm with nonzero weights needs a proper function")
    total = 0.0
    for (m, n), c in f.coeffs.items():
        weight = (abs(m) ** alpha if alpha else 1.0) * (abs(n) ** beta if beta else 1.0)
        total += (weight * abs(c)) ** 2
    return math.sqrt(total)


def sobolev_norm_inhomogeneous(f: TrigPoly, alpha: float, beta: float) -> float:
    total = 0.0
    for (m, n), c in f.coeffs.items():
        weight = (1 + m * m) ** (alpha / 2) * (1 + n * n) ** (beta / 2)
        total += (weight * abs(c)) ** 2
    return math.sqrt(total)


def synthesize(f: TrigPoly, oversample: int = 8) -> np.ndarray:
    """Values of f on the uniform grid x_j = j/Gx, y_l = l/Gy."""
    rm, rn = f.radius()
    gx = oversample * (2 * rm + 1)
    gy = oversample * (2 * rn + 1)
    spectrum = np.zeros((gx, gy), dtype=complex)
    for (m, n), c in f.coeffs.items():
        spectrum[m % gx, n % gy] += c.to_complex()
    return np.fft.ifft2(spectrum) * (gx * gy)


def l1_norm(f: TrigPoly, oversample: int = 8) -> float:
    if oversample < 4:
        raise ValueError(f"oversample must be at least 4, got {oversample}")
    if f.is_zero():
        return 0.0
    return float(np.mean(np.abs(synthesize(f, oversample))))


def read_trigpoly(path: Path) -> TrigPoly:
    """JSON lines, one ``{m, n, re, im}`` record per nonzero coefficient."""
    rows = []
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not raw.strip():
            continue
        try:
            rows.append(json.loads(raw))
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}:{lineno}: {exc.msg}", exc.pos) from exc
    return TrigPoly.from_rows(rows)


def write_trigpoly(path: Path, f: TrigPoly) -> None:
    lines = [json.dumps(row, sort_keys=True) for row in f.as_rows()]
    path.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
