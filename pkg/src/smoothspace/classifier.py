from __future__ import annotations

import logging
from dataclasses import dataclass, field
try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):
        __str__ = str.__str__
        __format__ = str.__format__
from typing import Any, Sequence

import numpy as np
import sympy

from smoothspace.config import ToleranceConfig
from smoothspace.errors import EmptyCollection, InternalInconsistency, NotHomogeneous
from smoothspace.exact import ExactComplex, i_power
from smoothspace.newton import (
    AdmissibleLine,
    NewtonDiagram,
    build_diagram,
    principal_part,
    senior_part,
)
from smoothspace.operators import (
    DiffOperator,
    Matrix2,
    MultiIndex,
    common_form,
    direction_multiplicity,
    rational_directions,
    span_basis,
    span_rank,
    substitute_all,
    unimodular_completion,
)
from smoothspace.parser import format_operator
from smoothspace.zeroset import analyze_zero_set

logger = logging.getLogger(__name__)

S = sympy.Symbol("s")


class Outcome(StrEnum):
    NOT_COMPLEMENTED = "NotComplemented"
    ISOMORPHIC_CK = "IsomorphicCK"
    UNDECIDED = "Undecided"


POSITIVE_RULES = frozenset(
    {
        "ellipticity",
        "no-admissible-lines",
        "directional-factorization",
        "single-operator-coset-ring",
    }
)


@dataclass(slots=True)
class Verdict:
    outcome: Outcome
    rule: str | None
    witnesses: dict[str, Any] = field(default_factory=dict)
    inexact: bool = False

    def as_dict(self) -> dict[str, Any]:
        return {
            "outcome": str(self.outcome),
            "rule": self.rule,
            "inexact": self.inexact,
            "witnesses": self.witnesses,
        }


@dataclass(frozen=True, slots=True)
class ClassifyOptions:
    substitution_bound: int = 12
    zero_set_box: int = 128
    tolerances: ToleranceConfig = field(default_factory=ToleranceConfig)


@dataclass(frozen=True, slots=True)
class MainWitness:
    line: AdmissibleLine
    parts: tuple[DiffOperator, DiffOperator]
    indices: tuple[int, int]

    def as_dict(self) -> dict[str, Any]:
        return {
            "line": self.line.as_dict(),
            "seniorParts": [format_operator(p) for p in self.parts],
            "operatorIndices": list(self.indices),
        }


def _complex_json(z: complex) -> dict[str, float]:
    return {"re": float(z.real), "im": float(z.imag)}


def _matrix_json(matrix: Matrix2) -> list[list[int]]:
    return [list(row) for row in matrix]


# -- Theorem-style obstruction ---------------------------------------------------------


def check_theorem_main(
    ops: Sequence[DiffOperator], diagram: NewtonDiagram, tol: float = 1e-10
) -> MainWitness | None:
    """First admissible line whose senior parts span a space of dimension at least two."""
    for line in diagram.lines:
        parts = [senior_part(op, line) for op in ops]
        nonzero = [(i, p) for i, p in enumerate(parts) if not p.is_zero()]
        if len(nonzero) < 2 or span_rank([p for _, p in nonzero], tol) < 2:
            continue
        first_index, first = nonzero[0]
        for index, part in nonzero[1:]:
            if span_rank([first, part], tol) == 2:
                return MainWitness(line=line, parts=(first, part), indices=(first_index, index))
        raise InternalInconsistency("Senior parts have rank 2 but no independent pair")
    return None


# -- normalization and ellipticity -----------------------------------------------------


def normalize_collection(
    ops: Sequence[DiffOperator], diagram: NewtonDiagram, tol: float = 1e-10
) -> list[DiffOperator]:
    """Span-equivalent collection in which only the first operator has a principal part."""
    parts = [principal_part(op, diagram) for op in ops]
    holders = [i for i, p in enumerate(parts) if not p.is_zero()]
    if not holders:
        raise InternalInconsistency("No operator carries a principal part")
    if span_rank([parts[i] for i in holders], tol) != 1:
        raise InternalInconsistency("Principal parts are not proportional")
    lead = holders[0]
    lead_op = ops[lead]
    pivot, c0 = parts[lead].terms[0]
    scale = max(abs(c) for op in ops for _, c in op.terms)
    out = [lead_op]
    for i, op in enumerate(ops):
        if i == lead:
            continue
        if parts[i].is_zero():
            out.append(op)
            continue
        ci = parts[i].coefficient(pivot)
        if c0.is_unit():
            reduced = op - lead_op.scale(ci / c0)
        else:
            reduced = op.scale(c0) - lead_op.scale(ci)
        reduced = reduced.chop(tol, scale)
        if not principal_part(reduced, diagram).is_zero():
            raise InternalInconsistency(f"Operator {i} keeps a principal part after elimination")
        if not reduced.is_zero():
            out.append(reduced)
    return out


def _segment_coefficients(
    seg_senior: DiffOperator, segment: tuple[MultiIndex, MultiIndex], kappa: int
) -> tuple[list[ExactComplex], int, int]:
    z0, z1 = sorted(segment, key=lambda m: -m.x)
    dx, dy = z0.x - z1.x, z1.y - z0.y
    if dx <= 0 or dy <= 0 or dx % kappa or dy % kappa:
        raise NotHomogeneous(f"Segment {z0}-{z1} is not a descending lattice segment")
    u, w = dx // kappa, dy // kappa
    nodes = [MultiIndex(z0.x - k * u, z0.y + k * w) for k in range(kappa + 1)]
    stray = seg_senior.points - set(nodes)
    if stray:
        raise NotHomogeneous(f"Monomials {sorted(map(str, stray))} are off the segment")
    return [seg_senior.coefficient(node) for node in nodes], u, w


def _quadrant_units(u: int, w: int) -> list[ExactComplex]:
    units = []
    for s1 in (1, -1):
        for s2 in (1, -1):
            eps = i_power(w - u) * (s1**u * s2**w)
            if eps not in units:
                units.append(eps)
    return units


def _exact_positive_root(coeffs: list[ExactComplex], eps: ExactComplex) -> float | None:
    """A positive real s with sum c_k (eps s)^k = 0 that every rational component shares."""
    grouped: dict[tuple[int, str], sympy.Expr] = {}
    for k, c in enumerate(coeffs):
        for key, value in (c * eps**k).components().items():
            grouped[key] = grouped.get(key, sympy.Integer(0)) + sympy.Rational(
                value.numerator, value.denominator
            ) * S**k
    polys = [sympy.Poly(expr, S, domain="QQ") for expr in grouped.values()]
    polys = [p for p in polys if not p.is_zero]
    if not polys:
        return None
    g = polys[0]
    for p in polys[1:]:
        g = sympy.gcd(g, p)
    if g.degree() <= 0:
        return None
    for root in g.real_roots():
        if root > 0:
            return float(root)
    return None


def ellipticity_check(
    seg_senior: DiffOperator,
    segment: tuple[MultiIndex, MultiIndex],
    kappa: int,
    tol: float = 1e-9,
) -> tuple[bool, list[complex]]:
    """Whether the segment senior part's symbol avoids zeros off the coordinate axes.

    On a segment with steps (u, w) the symbol factors as a monomial times Q(z) with
    z = (i n)^w / (i m)^u up to positive constants, so a zero off the axes is a root of Q
    lying on one of the rays eps * (0, inf) reachable from the four sign quadrants.
    """
    if segment[0] == segment[1] or kappa == 0:
        return True, []
    coeffs, u, w = _segment_coefficients(seg_senior, segment, kappa)
    units = _quadrant_units(u, w)
    if all(c.exact for c in coeffs):
        for eps in units:
            s = _exact_positive_root(coeffs, eps)
            if s is not None:
                root = complex(eps) * s
                logger.debug("exact positive root %s in quadrant %s", s, eps)
                return False, [root]
    values = np.array([complex(c) for c in reversed(coeffs)], dtype=complex)
    roots = sorted(np.roots(values).tolist(), key=lambda z: (round(z.real, 12), round(z.imag, 12)))
    for z in roots:
        if z == 0:
            continue
        for eps in units:
            s = z / complex(eps)
            if abs(s.imag) <= tol * max(1.0, abs(s)) and s.real > 0:
                return False, roots
    return True, roots


# -- rules -----------------------------------------------------------------------------


def _top_parts(ops: Sequence[DiffOperator]) -> tuple[int, list[DiffOperator]]:
    n = max(op.order() for op in ops)
    return n, [op.homogeneous_part(n) for op in ops]


def directional_rule(ops: Sequence[DiffOperator], tol: float = 1e-10) -> Verdict | None:
    """Some combination of the operators has top part a product of n distinct rational
    directional derivatives while the rest of the span has order below n."""
    ops = [op for op in ops if not op.is_zero()]
    if not ops or not all(op.exact for op in ops):
        return None
    n, tops = _top_parts(ops)
    holders = [i for i, t in enumerate(tops) if not t.is_zero()]
    if span_rank([tops[i] for i in holders], tol) != 1:
        return None
    lead = holders[0]
    top = tops[lead]
    g = common_form(top)
    if g is None or g.total_degree() != n:
        return None
    directions = rational_directions(top)
    if len(directions) != n or any(mult != 1 for _, mult in directions):
        return None
    pivot, c0 = top.terms[0]
    others = []
    for i, op in enumerate(ops):
        if i == lead:
            continue
        if tops[i].is_zero():
            others.append(op)
            continue
        reduced = op.scale(c0) - ops[lead].scale(tops[i].coefficient(pivot))
        if not reduced.homogeneous_part(n).is_zero():
            return None
        if not reduced.is_zero():
            others.append(reduced)
    lower = ops[lead] - top
    if not lower.is_zero():
        others_rank = span_rank(others, tol) if others else 0
        if span_rank([*others, lower], tol) != others_rank:
            return None
    return Verdict(
        outcome=Outcome.ISOMORPHIC_CK,
        rule="directional-factorization",
        witnesses={
            "directions": [list(d) for d, _ in directions],
            "divisorRank": n,
            "seniorParts": [format_operator(top)],
        },
    )


def _single_antidiagonal(diagram: NewtonDiagram) -> AdmissibleLine | None:
    if len(diagram.lines) != 1 or not diagram.lines[0].is_antidiagonal:
        return None
    return diagram.lines[0]


def _prepared(
    ops: Sequence[DiffOperator], tol: float
) -> tuple[list[DiffOperator], AdmissibleLine, DiffOperator] | None:
    """Normalized collection, its line and the senior part L of its first operator, when the
    collection is exact, pure homogeneous and has a single nonzero senior direction."""
    if not all(op.exact for op in ops):
        return None
    diagram = build_diagram(ops)
    line = _single_antidiagonal(diagram)
    if line is None:
        return None
    seniors = [senior_part(op, line) for op in ops]
    if span_rank(seniors, tol) != 1:
        return None
    normalized = normalize_collection(ops, diagram, tol)
    return normalized, line, senior_part(normalized[0], line)


def try_substitution(
    ops: Sequence[DiffOperator], bound: int = 12, tol: float = 1e-10
) -> tuple[Matrix2, Verdict] | None:
    """Angular substitution that moves a multiple rational root of L onto a coordinate axis,
    after which two senior parts become independent."""
    prepared = _prepared(ops, tol)
    if prepared is None:
        return None
    normalized, _, lead = prepared
    mu = lead.order()
    rest = [normalized[0] - lead, *normalized[1:]]
    orders = [mi.order for op in rest for mi in op.points]
    if not orders:
        return None
    top = max(orders)
    p = mu - top
    layers = [op.homogeneous_part(top) for op in normalized[1:]]
    layers = [layer for layer in layers if not layer.is_zero()]
    if not layers:
        return None
    for direction, alpha in rational_directions(lead):
        r, s = direction
        if max(abs(r), s) > bound:
            continue
        beta = min(direction_multiplicity(layer, direction) for layer in layers)
        if alpha <= beta + p:
            logger.debug("root %s: alpha=%d beta=%d p=%d does not fire", direction, alpha, beta, p)
            continue
        matrix = unimodular_completion(r, s)
        moved, _, _ = span_basis(substitute_all(normalized, matrix), tol)
        witness = check_theorem_main(moved, build_diagram(moved), tol)
        if witness is None:
            continue
        verdict = Verdict(
            outcome=Outcome.NOT_COMPLEMENTED,
            rule="substitution",
            witnesses={
                "substitution": {
                    "matrix": _matrix_json(matrix),
                    "root": {"r": r, "s": s},
                    "denominator": s,
                    "alpha": alpha,
                    "beta": beta,
                    "p": p,
                },
                **witness.as_dict(),
            },
        )
        return matrix, verdict
    return None


def _positive_rules(ops: list[DiffOperator], tol: ToleranceConfig) -> Verdict | None:
    diagram = build_diagram(ops)
    if not diagram.lines:
        return Verdict(Outcome.ISOMORPHIC_CK, "no-admissible-lines", {"diagram": diagram.as_dict()})
    normalized = normalize_collection(ops, diagram, tol.rank)
    verdict = _ellipticity_verdict(normalized[0], diagram, tol.root_imag)
    if verdict is not None:
        return verdict
    return directional_rule(ops, tol.rank)


def _ellipticity_verdict(
    lead: DiffOperator, diagram: NewtonDiagram, tol: float
) -> Verdict | None:
    roots: list[dict[str, float]] = []
    for index, ((z0, z1), kappa) in enumerate(zip(diagram.segments, diagram.kappas)):
        part = senior_part(lead, diagram.lines[index])
        elliptic, found = ellipticity_check(part, (z0, z1), kappa, tol)
        if not elliptic:
            return None
        roots.extend(_complex_json(z) for z in found)
    return Verdict(Outcome.ISOMORPHIC_CK, "ellipticity", {"roots": roots})


def substitution_rescue(
    ops: Sequence[DiffOperator], options: ClassifyOptions | None = None
) -> Verdict | None:
    """Re-run the structural rules after moving each rational direction of L to an axis."""
    options = options or ClassifyOptions()
    tol = options.tolerances
    prepared = _prepared(ops, tol.rank)
    if prepared is None:
        return None
    normalized, _, lead = prepared
    for (r, s), _ in rational_directions(lead):
        if max(abs(r), s) > options.substitution_bound:
            continue
        matrix = unimodular_completion(r, s)
        moved, _, _ = span_basis(substitute_all(normalized, matrix), tol.rank)
        witness = check_theorem_main(moved, build_diagram(moved), tol.rank)
        if witness is not None:
            verdict = Verdict(Outcome.NOT_COMPLEMENTED, "substitution", witness.as_dict())
        else:
            verdict = _positive_rules(moved, tol)
        if verdict is None:
            continue
        verdict.witnesses["substitution"] = {
            "matrix": _matrix_json(matrix),
            "root": {"r": r, "s": s},
            "denominator": s,
        }
        return verdict
    return None


def zero_set_rule(op: DiffOperator, box: int = 128, tol: float = 1e-9) -> Verdict:
    """Coset-ring test on the lattice zeros of a single operator's symbol."""
    zs = analyze_zero_set(op, box, tol)
    rest = zs.remainder()
    counts = list(zs.remainder_counts.values())
    inexact = not op.exact
    sample = [list(map(int, p)) for p in rest[np.argsort(np.abs(rest).sum(axis=1))][:16]]
    witnesses: dict[str, Any] = {
        "zeroSetLines": [line.as_dict() for line in zs.lines],
        "zeroSetCounts": {str(b): c for b, c in zs.remainder_counts.items()},
        "zeroSetSample": sample,
    }
    if len(set(counts)) <= 1:
        return Verdict(Outcome.ISOMORPHIC_CK, "single-operator-coset-ring", witnesses, inexact)
    if len(rest) >= 3 and np.linalg.matrix_rank(rest[1:] - rest[0]) >= 2:
        witnesses["heuristic"] = True
        return Verdict(Outcome.NOT_COMPLEMENTED, "single-operator-zero-set", witnesses, inexact)
    witnesses["reasons"] = ["zero set grows along a partial line"]
    return Verdict(Outcome.UNDECIDED, None, witnesses, inexact)


# -- pipeline --------------------------------------------------------------------------


def classify(ops: Sequence[DiffOperator], options: ClassifyOptions | None = None) -> Verdict:
    options = options or ClassifyOptions()
    tol = options.tolerances
    if not ops:
        raise EmptyCollection("Cannot classify an empty collection")
    inexact = not all(op.exact for op in ops)
    basis, rank, _ = span_basis(list(ops), tol.rank)
    if rank == 0:
        raise EmptyCollection("Every operator in the collection is zero")
    verdict = _classify_basis(basis, options)
    verdict.inexact = inexact
    logger.info(
        "classified %d operators (rank %d): %s/%s", len(ops), rank, verdict.outcome, verdict.rule
    )
    return verdict


def _classify_basis(basis: list[DiffOperator], options: ClassifyOptions) -> Verdict:
    tol = options.tolerances
    reasons: list[str] = []
    diagram = build_diagram(basis)
    witness = check_theorem_main(basis, diagram, tol.rank)
    if witness is not None:
        return Verdict(Outcome.NOT_COMPLEMENTED, "theorem-main", witness.as_dict())
    if not diagram.lines:
        return Verdict(Outcome.ISOMORPHIC_CK, "no-admissible-lines", {"diagram": diagram.as_dict()})

    exact = all(op.exact for op in basis)
    try:
        normalized = normalize_collection(basis, diagram, tol.rank)
    except InternalInconsistency as exc:
        if exact:
            raise
        reasons.append(f"normalization failed under inexact rank decisions: {exc}")
        normalized = None
    if normalized is not None:
        verdict = _ellipticity_verdict(normalized[0], diagram, tol.root_imag)
        if verdict is not None:
            return verdict
        reasons.append("a segment senior part is not elliptic")

    if exact:
        verdict = directional_rule(basis, tol.rank)
        if verdict is not None:
            return verdict
        reasons.append("no factorization into distinct rational directional derivatives")
        found = try_substitution(basis, options.substitution_bound, tol.rank)
        if found is not None:
            return found[1]
        rescued = substitution_rescue(basis, options)
        if rescued is not None:
            return rescued
        if _single_antidiagonal(diagram) is not None:
            reasons.append("no rational substitution decides the collection")
    else:
        reasons.append("inexact coefficients disable the directional and substitution rules")

    if len(basis) == 1:
        verdict = zero_set_rule(basis[0], options.zero_set_box, tol.zero_set)
        if verdict.outcome is not Outcome.UNDECIDED:
            return verdict
        reasons.extend(verdict.witnesses.get("reasons", []))
    return Verdict(Outcome.UNDECIDED, None, {"reasons": reasons})


def verdict_to_json(verdict: Verdict) -> dict[str, Any]:
    return verdict.as_dict()
