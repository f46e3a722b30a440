from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Literal, Sequence

import numpy as np
import sympy

from smoothspace.errors import NeedLargerC, NoIndices

logger = logging.getLogger(__name__)

JuniorModel = Callable[[np.ndarray, np.ndarray], np.ndarray]
Window = Literal["auto", "small_t", "literal"]
JUNIOR_NAMES = ("xi", "eta", "rho", "kappa")

_T = sympy.Symbol("t")
_C = sympy.Symbol("c")
_JUNIOR = sympy.symbols("xi eta rho kappa")


def decay_model(c: complex, eps: float) -> JuniorModel:
    """Junior coefficient model (p, q) -> c * p^(-eps)."""

    def model(p: np.ndarray, q: np.ndarray) -> np.ndarray:
        return c * np.asarray(p, dtype=float) ** (-eps) + 0 * np.asarray(q, dtype=float)

    return model


def _zero_model(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    return np.zeros(np.broadcast(p, q).shape)


@dataclass(slots=True)
class CounterexampleConfig:
    k: int
    l: int
    N: int
    j0: int = 0
    j1: int | None = None
    a1: Sequence[complex | Fraction | int] | None = None
    a2: Sequence[complex | Fraction | int] | None = None
    delta: Fraction = Fraction(1, 4)
    cmin: int = 1
    pmax: int = 4096
    window: Window = "auto"
    ladder: Sequence[int] | None = None
    junior: dict[str, JuniorModel] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.j1 is None:
            self.j1 = self.N
        self.delta = Fraction(self.delta)
        if self.k < 1 or self.l < 1 or self.N < 1:
            raise ValueError(f"k, l, N must be positive, got {(self.k, self.l, self.N)}")
        if not 0 <= self.j0 < self.j1 <= self.N:
            raise ValueError(f"Need 0 <= j0 < j1 <= N, got j0={self.j0}, j1={self.j1}")
        if not 0 < self.delta <= 1:
            raise ValueError(f"delta must lie in (0, 1], got {self.delta}")
        if self.cmin < 1 or self.pmax < self.cmin:
            raise ValueError(f"Need 1 <= Cmin <= Pmax, got {self.cmin}, {self.pmax}")
        for name, table in (("a1", self.a1), ("a2", self.a2)):
            if table is not None and len(table) != self.N + 1:
                raise ValueError(f"{name} must have N+1={self.N + 1} entries")
        unknown = set(self.junior) - set(JUNIOR_NAMES)
        if unknown:
            raise ValueError(f"Unknown junior coefficients: {sorted(unknown)}")

    @property
    def case(self) -> str:
        if self.j0 == 0 and self.j1 == self.N:
            return "case-1"
        if self.j0 > 0 and self.j1 < self.N:
            return "case-2"
        return "intermediate"

    @property
    def resolved_window(self) -> str:
        if self.window != "auto":
            return self.window
        return "small_t" if self.case == "case-1" else "literal"

    def p_ladder(self) -> list[int]:
        if self.ladder is not None:
            return sorted(set(int(v) for v in self.ladder))
        out = []
        value = 1
        while value <= self.pmax:
            if value >= self.cmin:
                out.append(value)
            value *= 2
        if not out or out[-1] != self.pmax:
            out.append(self.pmax)
        return out


@dataclass(slots=True)
class CounterexampleReport:
    case: str
    window: str
    indices: int
    cpq_max: float
    gamma_min: float
    coef_min: float
    ladder: list[int]
    partial_sums: list[float]
    parity_verified: bool

    def as_dict(self) -> dict[str, Any]:
        return {
            "case": self.case,
            "window": self.window,
            "indices": self.indices,
            "cpqMax": self.cpq_max,
            "gammaMin": self.gamma_min,
            "coefMin": self.coef_min,
            "P": self.ladder,
            "partialSums": self.partial_sums,
            "parityVerified": self.parity_verified,
        }


def _table(cfg: CounterexampleConfig, values: Sequence[Any] | None) -> list[sympy.Expr]:
    if values is None:
        return [sympy.Integer(0)] * (cfg.N + 1)
    out = []
    for v in values:
        if isinstance(v, complex):
            out.append(sympy.Float(v.real) + sympy.I * sympy.Float(v.imag))
        else:
            f = Fraction(v)
            out.append(sympy.Rational(f.numerator, f.denominator))
    return out


def right_hand_sides(cfg: CounterexampleConfig) -> list[sympy.Expr]:
    """mu_j as affine expressions in the unknown c (and the junior symbols)."""
    a1 = _table(cfg, cfg.a1)
    a2 = _table(cfg, cfg.a2)
    xi, eta, rho, kappa = _JUNIOR
    mus: list[sympy.Expr] = []
    for j in range(cfg.N + 1):
        if j < cfg.j0:
            mu = sympy.Integer(0)
        elif j == cfg.j0:
            mu = sympy.Integer(1)
        elif j < cfg.j1:
            mu = a1[j]
        elif j == cfg.j1:
            mu = a1[j] + _C
        else:
            mu = a1[j] + a2[j] * _C
        mus.append(mu)
    mus[0] += xi + eta * _C
    mus[cfg.N] += rho + kappa * _C
    return mus


def _compiled(cfg: CounterexampleConfig) -> tuple[Callable[..., Any], ...]:
    """Vectorized c, the normalized coefficient of c, and gamma as functions of (t, juniors)."""
    mus = right_hand_sides(cfg)
    relation = sympy.expand(sum(_T ** (cfg.N - j) * mu for j, mu in enumerate(mus)))
    slope = relation.coeff(_C, 1)
    intercept = relation.coeff(_C, 0)
    c_expr = -intercept / slope
    coef_expr = sympy.expand(slope * _T ** (cfg.j1 - cfg.N))
    gamma_expr = sum(_T ** (cfg.j0 - j) * mus[j] for j in range(cfg.j0 + 1))
    args = (_T, *_JUNIOR)
    to_numpy = {"modules": "numpy"}
    return (
        sympy.lambdify(args, c_expr, **to_numpy),
        sympy.lambdify(args, coef_expr, **to_numpy),
        sympy.lambdify((_T, _C, *_JUNIOR), gamma_expr, **to_numpy),
    )


def _root_floor(x: Fraction, n: int) -> int:
    if x < 0:
        raise ValueError("negative radicand")
    root, _ = sympy.integer_nthroot(x.numerator // x.denominator, n)
    return int(root)


def _root_ceil(x: Fraction, n: int) -> int:
    root = _root_floor(x, n)
    return root if root**n >= x else root + 1


def q_range(cfg: CounterexampleConfig, p: int) -> tuple[int, int]:
    """Inclusive range of q >= 1 admitted by the index window for this p."""
    pk = Fraction(p**cfg.k)
    if cfg.resolved_window == "small_t":
        low, high = cfg.delta * pk / 2, cfg.delta * pk
    else:
        low, high = pk / cfg.delta, 2 * pk / cfg.delta
    return max(1, _root_ceil(low, cfg.l)), _root_floor(high, cfg.l)


def index_set(cfg: CounterexampleConfig) -> tuple[np.ndarray, np.ndarray]:
    ps: list[np.ndarray] = []
    qs: list[np.ndarray] = []
    for p in range(cfg.cmin, cfg.pmax + 1):
        lo, hi = q_range(cfg, p)
        if lo <= hi:
            q = np.arange(lo, hi + 1, dtype=np.int64)
            ps.append(np.full(q.shape, p, dtype=np.int64))
            qs.append(q)
    if not ps:
        raise NoIndices(
            f"No (p, q) with {cfg.cmin} <= p <= {cfg.pmax} in the {cfg.resolved_window} window"
        )
    return np.concatenate(ps), np.concatenate(qs)


def _as_array(value: Any, shape: tuple[int, ...]) -> np.ndarray:
    return np.broadcast_to(np.asarray(value, dtype=complex), shape)


def counterexample_run(cfg: CounterexampleConfig) -> CounterexampleReport:
    p, q = index_set(cfg)
    pf, qf = p.astype(float), q.astype(float)
    phase = 1j ** ((cfg.l - cfg.k) % 4)
    t = phase * qf**cfg.l / pf**cfg.k
    juniors = [
        np.asarray(cfg.junior.get(name, _zero_model)(pf, qf), dtype=complex)
        for name in JUNIOR_NAMES
    ]
    c_fn, coef_fn, gamma_fn = _compiled(cfg)
    with np.errstate(divide="ignore", invalid="ignore"):
        coef = _as_array(coef_fn(t, *juniors), t.shape)
        bad = np.flatnonzero(~(np.abs(coef) >= 0.5))
        if bad.size:
            i = int(bad[0])
            raise NeedLargerC(
                f"Coefficient of c is {abs(coef[i]):.3g} < 1/2 at (p, q)={(int(p[i]), int(q[i]))}"
            )
        c = _as_array(c_fn(t, *juniors), t.shape)
        gamma = _as_array(gamma_fn(t, c, *juniors), t.shape)
    weak = np.flatnonzero(~(np.abs(gamma) >= 0.5))
    if weak.size:
        i = int(weak[0])
        raise NeedLargerC(f"|gamma| = {abs(gamma[i]):.3g} < 1/2 at (p, q)={(int(p[i]), int(q[i]))}")
    terms = pf ** (cfg.k - 1) * qf ** (cfg.l - 1) * np.abs(gamma) ** 2 * pf ** (-2.0 * cfg.k)
    cumulative = np.cumsum(terms)
    ladder = cfg.p_ladder()
    sums = []
    for big_p in ladder:
        upto = int(np.searchsorted(p, big_p, side="right"))
        sums.append(float(cumulative[upto - 1]) if upto else 0.0)
    report = CounterexampleReport(
        case=cfg.case,
        window=cfg.resolved_window,
        indices=int(p.size),
        cpq_max=float(np.abs(c).max()),
        gamma_min=float(np.abs(gamma).min()),
        coef_min=float(np.abs(coef).min()),
        ladder=ladder,
        partial_sums=sums,
        parity_verified=cfg.k % 2 == 1 or cfg.l % 2 == 1,
    )
    logger.info(
        "counterexample %s: %d indices, |c| <= %.4g, |gamma| >= %.4g",
        report.case,
        report.indices,
        report.cpq_max,
        report.gamma_min,
    )
    return report
