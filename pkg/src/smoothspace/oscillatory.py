from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from smoothspace.errors import QuadratureFailure, RealArgument

logger = logging.getLogger(__name__)

SUBDIVISION_LIMITS = (50, 200, 800)


def _check_nonreal(z: complex) -> None:
    if complex(z).imag == 0:
        raise RealArgument(f"{z} is real")


def halfplane_root_count(z: complex, k: int) -> int:
    """Number of k-th roots of z in the open upper half plane."""
    _check_nonreal(z)
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    if k % 2 == 0:
        return k // 2
    return (k + 1) // 2 if complex(z).imag > 0 else (k - 1) // 2


def upper_roots(z: complex, k: int) -> list[complex]:
    """Roots of w^k - z with positive imaginary part, from the companion matrix."""
    _check_nonreal(z)
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    coeffs = np.zeros(k + 1, dtype=complex)
    coeffs[0] = 1
    coeffs[-1] = -complex(z)
    roots = np.roots(coeffs)
    return sorted((complex(w) for w in roots if w.imag > 0), key=lambda w: (w.real, w.imag))


def halfplane_root_count_brute(z: complex, k: int) -> int:
    return len(upper_roots(z, k))


def _quad(
    func: Callable[[float], float],
    a: float,
    b: float,
    tol: float,
    limit: int,
    freq: float | None = None,
    weight: str | None = None,
) -> float:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", IntegrationWarning)
        if weight is None:
            value, _ = quad(func, a, b, epsabs=tol * 1e-2, epsrel=tol, limit=limit)
        else:
            value, _ = quad(
                func, a, b, weight=weight, wvar=freq, epsabs=tol * 1e-2, epsrel=tol, limit=limit
            )
    problems = [w for w in caught if issubclass(w.category, IntegrationWarning)]
    if problems:
        raise QuadratureFailure(f"quad on [{a}, {b}] with limit {limit}: {problems[0].message}")
    return float(value)


def _piece(
    u: complex, v: complex, ratio: float, b: float, lo: float, hi: float, tol: float, limit: int
) -> complex:
    def h(eta: float) -> complex:
        s = eta**ratio
        return (np.exp(1j * u * s) - np.exp(1j * v * s)) / eta

    def hr(eta: float) -> float:
        return h(eta).real

    def hi_(eta: float) -> float:
        return h(eta).imag

    if abs(b) >= 1:
        # oscillatory weights let quad use its Fourier-integral rule
        cr = _quad(hr, lo, hi, tol, limit, b, "cos")
        sr = _quad(hr, lo, hi, tol, limit, b, "sin")
        ci = _quad(hi_, lo, hi, tol, limit, b, "cos")
        si = _quad(hi_, lo, hi, tol, limit, b, "sin")
        return complex(cr - si, sr + ci)

    def fr(eta: float) -> float:
        return (np.exp(1j * b * eta) * h(eta)).real

    def fi(eta: float) -> float:
        return (np.exp(1j * b * eta) * h(eta)).imag

    return complex(_quad(fr, lo, hi, tol, limit), _quad(fi, lo, hi, tol, limit))


def oscillatory_probe(
    u: complex,
    v: complex,
    k: int,
    l: int,
    b: float,
    eps: float,
    R: float,
    tol: float = 1e-6,
) -> complex:
    """int_eps^R e^{i b eta} (e^{i u eta^{l/k}} - e^{i v eta^{l/k}}) / eta d eta."""
    if complex(u).imag <= 0 or complex(v).imag <= 0:
        raise ValueError("u and v must lie in the upper half plane")
    if not 0 < eps < R:
        raise ValueError(f"Need 0 < eps < R, got eps={eps}, R={R}")
    if u == v:
        return 0j
    ratio = l / k
    cuts = [eps, *([1.0] if eps < 1.0 < R else []), R]
    value = 0j
    for attempt in Retrying(
        stop=stop_after_attempt(len(SUBDIVISION_LIMITS)),
        retry=retry_if_exception_type(QuadratureFailure),
        reraise=True,
    ):
        with attempt:
            limit = SUBDIVISION_LIMITS[attempt.retry_state.attempt_number - 1]
            if attempt.retry_state.attempt_number > 1:
                logger.debug("retrying quadrature with limit %d", limit)
            value = sum(
                (_piece(u, v, ratio, b, lo, hi, tol, limit) for lo, hi in zip(cuts, cuts[1:])),
                0j,
            )
    return value


@dataclass(slots=True)
class SweepResult:
    sup: float
    argmax: tuple[float, float, float]
    values: list[dict[str, Any]]

    def as_dict(self) -> dict[str, Any]:
        return {"sup": self.sup, "argmax": list(self.argmax), "values": self.values}


def oscillatory_sweep(
    u: complex,
    v: complex,
    k: int,
    l: int,
    bs: Sequence[float],
    epss: Sequence[float],
    Rs: Sequence[float],
    tol: float = 1e-6,
) -> SweepResult:
    best = -math.inf
    argmax = (math.nan, math.nan, math.nan)
    values = []
    for b in bs:
        for eps in epss:
            for R in Rs:
                if eps >= R:
                    continue
                z = oscillatory_probe(u, v, k, l, b, eps, R, tol)
                values.append({"b": b, "eps": eps, "R": R, "abs": abs(z)})
                if abs(z) > best:
                    best, argmax = abs(z), (b, eps, R)
    if not values:
        raise ValueError("The (b, eps, R) grid has no point with eps < R")
    return SweepResult(sup=best, argmax=argmax, values=values)
