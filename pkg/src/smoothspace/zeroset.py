from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from smoothspace.operators import DiffOperator, charpoly_values

logger = logging.getLogger(__name__)

BOX_LADDER = (16, 32, 64, 128)


@dataclass(frozen=True, slots=True)
class LatticeLine:
    """{(m, n) : dy*m - dx*n = c} for a primitive direction (dx, dy)."""

    dx: int
    dy: int
    c: int

    def contains(self, m: np.ndarray, n: np.ndarray) -> np.ndarray:
        return self.dy * m - self.dx * n == self.c

    def as_dict(self) -> dict[str, Any]:
        return {"direction": [self.dx, self.dy], "offset": self.c}


@dataclass(slots=True)
class ZeroSet:
    points: np.ndarray
    box: int
    lines: list[LatticeLine] = field(default_factory=list)
    remainder_counts: dict[int, int] = field(default_factory=dict)

    def remainder(self) -> np.ndarray:
        if not len(self.points):
            return self.points
        mask = np.ones(len(self.points), dtype=bool)
        for line in self.lines:
            mask &= ~line.contains(self.points[:, 0], self.points[:, 1])
        return self.points[mask]


def _grid(box: int) -> tuple[np.ndarray, np.ndarray]:
    axis = np.arange(-box, box + 1)
    return np.meshgrid(axis, axis, indexing="ij")


def _exact_zero_mask(op: DiffOperator, m: np.ndarray, n: np.ndarray) -> np.ndarray:
    """P(m, n) == 0 decided exactly, one rational component at a time.

    A term c (2 pi i m)^a (2 pi i n)^b contributes to the component of pi^(deg c + a + b);
    the value vanishes iff every component vanishes.
    """
    components: dict[tuple[int, str], list[tuple[Fraction, int, int]]] = {}
    for mi, c in op.terms:
        order = mi.order
        scale = Fraction(2) ** order
        # (re + i im) * i^order
        rot = ((1, 0), (0, 1), (-1, 0), (0, -1))[order % 4]
        for deg, re, im in c.terms:
            real = (re * rot[0] - im * rot[1]) * scale
            imag = (re * rot[1] + im * rot[0]) * scale
            for part, value in (("re", real), ("im", imag)):
                if value:
                    components.setdefault((deg + order, part), []).append(
                        (value, mi.alpha1, mi.alpha2)
                    )
    mo = m.astype(object)
    no = n.astype(object)
    mask = np.ones(m.shape, dtype=bool)
    for terms in components.values():
        den = math.lcm(*(v.denominator for v, _, _ in terms))
        total = np.zeros(m.shape, dtype=object)
        for value, a, b in terms:
            total = total + int(value * den) * mo**a * no**b
        mask &= total == 0
    return mask


def zero_points(op: DiffOperator, box: int, tol: float = 1e-9) -> np.ndarray:
    """Lattice zeros of the characteristic polynomial in [-box, box]^2, shape (K, 2)."""
    m, n = _grid(box)
    if op.exact:
        mask = _exact_zero_mask(op, m, n)
    else:
        values = charpoly_values(op, m, n)
        u = 2 * np.pi * np.abs(m.astype(float))
        v = 2 * np.pi * np.abs(n.astype(float))
        magnitude = np.zeros(m.shape)
        for mi, c in op.terms:
            magnitude += abs(c) * u**mi.alpha1 * v**mi.alpha2
        mask = np.abs(values) <= tol * magnitude
    return np.stack([m[mask], n[mask]], axis=1).astype(np.int64)


def _count_on_line(line: LatticeLine, box: int) -> int:
    # particular solution of dy*m - dx*n = c
    g, x, y = _egcd(line.dy, -line.dx)
    m0, n0 = line.c * x * g, line.c * y * g
    lo, hi = -math.inf, math.inf
    for start, step in ((m0, line.dx), (n0, line.dy)):
        if step == 0:
            if not -box <= start <= box:
                return 0
            continue
        a = Fraction(-box - start, step)
        b = Fraction(box - start, step)
        lo = max(lo, math.ceil(min(a, b)))
        hi = min(hi, math.floor(max(a, b)))
    return max(0, int(hi - lo + 1))


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    if b == 0:
        return (abs(a), 1 if a >= 0 else -1, 0)
    g, x, y = _egcd(b, a % b)
    return (g, y, x - (a // b) * y)


def _canonical_directions(diffs: np.ndarray) -> np.ndarray:
    g = np.gcd(diffs[:, 0], diffs[:, 1])
    dirs = diffs // g[:, None]
    flip = (dirs[:, 0] < 0) | ((dirs[:, 0] == 0) & (dirs[:, 1] < 0))
    dirs[flip] *= -1
    return dirs


def full_lines(points: np.ndarray, box: int, anchors: int = 64) -> list[LatticeLine]:
    """Lattice lines with at least three box points, all of which lie in ``points``.

    Candidate directions come from anchors (the points nearest the origin): a direction seen
    twice from the same anchor is a collinear triple through it.
    """
    if len(points) < 3:
        return []
    order = np.argsort(np.abs(points).sum(axis=1), kind="stable")
    candidates: set[tuple[int, int]] = set()
    for idx in order[:anchors]:
        diffs = points - points[idx]
        diffs = diffs[np.any(diffs != 0, axis=1)]
        dirs = _canonical_directions(diffs)
        uniq, counts = np.unique(dirs, axis=0, return_counts=True)
        for (dx, dy), count in zip(uniq, counts):
            if count >= 2 and max(abs(int(dx)), abs(int(dy))) <= box:
                candidates.add((int(dx), int(dy)))
    lines: list[LatticeLine] = []
    for dx, dy in sorted(candidates):
        keys = dy * points[:, 0] - dx * points[:, 1]
        values, counts = np.unique(keys, return_counts=True)
        for c, count in zip(values, counts):
            if count < 3:
                continue
            line = LatticeLine(dx, dy, int(c))
            if _count_on_line(line, box) == int(count):
                lines.append(line)
    return lines


def analyze_zero_set(op: DiffOperator, box: int = 128, tol: float = 1e-9) -> ZeroSet:
    points = zero_points(op, box, tol)
    zs = ZeroSet(points=points, box=box, lines=full_lines(points, box))
    rest = zs.remainder()
    ladder = [b for b in BOX_LADDER if b < box] + [box]
    for b in ladder:
        inside = np.all(np.abs(rest) <= b, axis=1) if len(rest) else np.zeros(0, dtype=bool)
        zs.remainder_counts[b] = int(inside.sum())
    logger.debug(
        "zero set: %d points, %d full lines, remainder ladder %s",
        len(points),
        len(zs.lines),
        zs.remainder_counts,
    )
    return zs
