from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from smoothspace.errors import AboveDiagram, AboveLine, EmptyCollection, InternalInconsistency
from smoothspace.exact import fraction_json
from smoothspace.operators import DiffOperator, MultiIndex


@dataclass(frozen=True, slots=True)
class AdmissibleLine:
    """The line x/a + y/b = 1 through the nodes ``nodes[0]`` (larger x) and ``nodes[1]``."""

    a: Fraction
    b: Fraction
    nodes: tuple[MultiIndex, MultiIndex]

    def level(self, mi: MultiIndex) -> Fraction:
        return Fraction(mi.x) / self.a + Fraction(mi.y) / self.b

    @property
    def is_antidiagonal(self) -> bool:
        return self.a == self.b

    def as_dict(self) -> dict[str, Any]:
        return {
            "a": fraction_json(self.a),
            "b": fraction_json(self.b),
            "nodes": [list(n.as_tuple()) for n in self.nodes],
        }


@dataclass(frozen=True, slots=True)
class NewtonDiagram:
    points: frozenset[MultiIndex]
    core_nodes: tuple[MultiIndex, ...]
    extended_nodes: tuple[MultiIndex, MultiIndex]
    lines: tuple[AdmissibleLine, ...]
    kappas: tuple[int, ...] = field(default=())

    @property
    def segments(self) -> list[tuple[MultiIndex, MultiIndex]]:
        return list(zip(self.core_nodes, self.core_nodes[1:]))

    def core_points(self) -> frozenset[MultiIndex]:
        """Nodes together with every lattice point on a core segment."""
        out = set(self.core_nodes)
        for (z0, z1), kappa in zip(self.segments, self.kappas):
            dx, dy = (z1.x - z0.x) // kappa, (z1.y - z0.y) // kappa
            out.update(MultiIndex(z0.x + s * dx, z0.y + s * dy) for s in range(kappa + 1))
        return frozenset(out)

    def in_region(self, mi: MultiIndex) -> bool:
        """Closed region bounded by the extended broken line and the axes."""
        x1 = self.core_nodes[0].x
        y_k = self.core_nodes[-1].y
        if mi.x > x1 or mi.y > y_k:
            return False
        return all(line.level(mi) <= 1 for line in self.lines)

    def on_core(self, mi: MultiIndex) -> bool:
        if not self.lines:
            return mi == self.core_nodes[0]
        return self.in_region(mi) and any(line.level(mi) == 1 for line in self.lines)

    def as_dict(self) -> dict[str, Any]:
        return {
            "points": [list(p.as_tuple()) for p in sorted(self.points, key=MultiIndex.as_tuple)],
            "coreNodes": [list(n.as_tuple()) for n in self.core_nodes],
            "extendedNodes": [list(n.as_tuple()) for n in self.extended_nodes],
            "lines": [line.as_dict() for line in self.lines],
            "kappas": list(self.kappas),
        }


def _fraction(payload: dict[str, int]) -> Fraction:
    return Fraction(payload["num"], payload["den"])


def diagram_from_dict(payload: dict[str, Any]) -> NewtonDiagram:
    return NewtonDiagram(
        points=frozenset(MultiIndex(*p) for p in payload["points"]),
        core_nodes=tuple(MultiIndex(*p) for p in payload["coreNodes"]),
        extended_nodes=(
            MultiIndex(*payload["extendedNodes"][0]),
            MultiIndex(*payload["extendedNodes"][1]),
        ),
        lines=tuple(
            AdmissibleLine(
                a=_fraction(row["a"]),
                b=_fraction(row["b"]),
                nodes=(MultiIndex(*row["nodes"][0]), MultiIndex(*row["nodes"][1])),
            )
            for row in payload["lines"]
        ),
        kappas=tuple(payload["kappas"]),
    )


def _line_through(p: MultiIndex, q: MultiIndex) -> tuple[Fraction, Fraction]:
    slope = Fraction(q.y - p.y, q.x - p.x)
    b = Fraction(p.y) - slope * p.x
    a = -b / slope
    return a, b


def admissible_lines(points: frozenset[MultiIndex]) -> list[AdmissibleLine]:
    """Every line through two points of the set, crossing both positive semiaxes, with no
    point strictly above it. Collinear duplicates are merged by intercepts."""
    pts = sorted(points, key=MultiIndex.as_tuple)
    found: dict[tuple[Fraction, Fraction], list[MultiIndex]] = {}
    for p in pts:
        for q in pts:
            if not (p.x > q.x and p.y < q.y):
                continue
            a, b = _line_through(p, q)
            if a <= 0 or b <= 0 or (a, b) in found:
                continue
            if all(Fraction(m.x) / a + Fraction(m.y) / b <= 1 for m in pts):
                found[(a, b)] = [m for m in pts if Fraction(m.x) / a + Fraction(m.y) / b == 1]
    lines = []
    for (a, b), on_line in found.items():
        left = max(on_line, key=lambda m: m.x)
        right = min(on_line, key=lambda m: m.x)
        lines.append(AdmissibleLine(a=a, b=b, nodes=(left, right)))
    lines.sort(key=lambda line: -line.nodes[0].x)
    return lines


def build_diagram(ops: Sequence[DiffOperator]) -> NewtonDiagram:
    points = frozenset(mi for op in ops for mi in op.points)
    if not points:
        raise EmptyCollection("Every operator in the collection is zero")
    lines = admissible_lines(points)
    if not lines:
        # a chain under the coordinatewise order: its top element dominates everything
        top = max(points, key=lambda m: (m.x, m.y))
        return NewtonDiagram(
            points=points,
            core_nodes=(top,),
            extended_nodes=(MultiIndex(top.x, 0), MultiIndex(0, top.y)),
            lines=(),
            kappas=(),
        )
    nodes = sorted({n for line in lines for n in line.nodes}, key=lambda m: -m.x)
    by_nodes = {line.nodes: line for line in lines}
    ordered: list[AdmissibleLine] = []
    kappas: list[int] = []
    for z0, z1 in zip(nodes, nodes[1:]):
        line = by_nodes.get((z0, z1))
        if line is None:
            raise InternalInconsistency(
                f"No admissible line joins consecutive nodes {z0} and {z1}"
            )
        ordered.append(line)
        kappas.append(math.gcd(abs(z1.x - z0.x), abs(z1.y - z0.y)))
    return NewtonDiagram(
        points=points,
        core_nodes=tuple(nodes),
        extended_nodes=(MultiIndex(nodes[0].x, 0), MultiIndex(0, nodes[-1].y)),
        lines=tuple(ordered),
        kappas=tuple(kappas),
    )


def senior_part(op: DiffOperator, line: AdmissibleLine) -> DiffOperator:
    kept = []
    for mi, c in op.terms:
        level = line.level(mi)
        if level > 1:
            raise AboveLine(f"Monomial {mi} lies above the line x/{line.a} + y/{line.b} = 1")
        if level == 1:
            kept.append(mi)
    return op.restrict(kept)


def segment_senior_part(op: DiffOperator, diagram: NewtonDiagram, index: int) -> DiffOperator:
    return senior_part(op, diagram.lines[index])


def principal_part(op: DiffOperator, diagram: NewtonDiagram) -> DiffOperator:
    for mi in op.points:
        if not diagram.in_region(mi):
            raise AboveDiagram(f"Monomial {mi} lies outside the Newton diagram")
    return op.restrict(mi for mi in op.points if diagram.on_core(mi))


def is_subordinate(mi: MultiIndex, diagram: NewtonDiagram) -> bool:
    return diagram.in_region(mi) and not diagram.on_core(mi)


def is_concave(diagram: NewtonDiagram) -> bool:
    """Slopes strictly flatten from the x-axis node toward the y-axis node.

    Walking the nodes in that order every turn is counterclockwise, so the integer cross
    products are positive.
    """
    nodes = diagram.core_nodes
    for z0, z1, z2 in zip(nodes, nodes[1:], nodes[2:]):
        cross = (z1.x - z0.x) * (z2.y - z1.y) - (z1.y - z0.y) * (z2.x - z1.x)
        if cross <= 0:
            return False
    return True
