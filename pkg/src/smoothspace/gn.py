from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from smoothspace.errors import NotCompactlySupported


@dataclass(frozen=True, slots=True)
class GNResult:
    lhs: float
    rhs: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs

    def as_dict(self) -> dict[str, float]:
        return {"lhs": self.lhs, "rhs": self.rhs}


def gn_check(values: np.ndarray, spacing: float | None = None) -> GNResult:
    """Discrete ||f||_2^2 against ||d1 f||_1 ||d2 f||_1 for a grid function vanishing on the
    boundary, with forward differences on a uniform square grid."""
    f = np.asarray(values, dtype=float)
    if f.ndim != 2 or f.shape[0] != f.shape[1] or f.shape[0] < 3:
        raise ValueError(f"Expected a square grid of side >= 3, got shape {f.shape}")
    edge = np.concatenate([f[0], f[-1], f[:, 0], f[:, -1]])
    if np.any(edge != 0):
        raise NotCompactlySupported("Grid function does not vanish on the boundary")
    h = spacing if spacing is not None else 1.0 / (f.shape[0] - 1)
    lhs = h * h * float(np.sum(f * f))
    d1 = np.abs(np.diff(f, axis=0)).sum()
    d2 = np.abs(np.diff(f, axis=1)).sum()
    return GNResult(lhs=lhs, rhs=h * h * float(d1) * float(d2))


def random_bump(rng: np.random.Generator, size: int) -> np.ndarray:
    """Sum of a few smooth bumps, zeroed on the boundary of a size x size grid."""
    x = np.linspace(0.0, 1.0, size)
    xx, yy = np.meshgrid(x, x, indexing="ij")
    f = np.zeros((size, size))
    for _ in range(int(rng.integers(1, 5))):
        cx, cy = rng.uniform(0.2, 0.8, size=2)
        width = rng.uniform(0.03, 0.2)
        f += rng.normal() * np.exp(-((xx - cx) ** 2 + (yy - cy) ** 2) / (2 * width**2))
    f *= np.sin(np.pi * xx) * np.sin(np.pi * yy)
    f[0, :] = f[-1, :] = f[:, 0] = f[:, -1] = 0.0
    return f
