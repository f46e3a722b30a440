from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, PositiveInt, ValidationError, field_validator

from smoothspace.counterexample import CounterexampleConfig, decay_model
from smoothspace.embedding import EmbeddingProblem
from smoothspace.errors import ParseError
from smoothspace.exact import ExactComplex
from smoothspace.trig import TrigPoly


class FractionModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    num: int
    den: int = 1

    @field_validator("den")
    @classmethod
    def _nonzero(cls, value: int) -> int:
        if value == 0:
            raise ValueError("denominator must be nonzero")
        return value

    def value(self) -> Fraction:
        return Fraction(self.num, self.den)


Number = int | float | FractionModel


def _part(value: Number) -> tuple[Fraction | float, bool]:
    if isinstance(value, FractionModel):
        return value.value(), True
    if isinstance(value, int):
        return Fraction(value), True
    return float(value), False


class CoefficientRow(BaseModel):
    """One Fourier coefficient; integer or {num, den} parts are exact, floats are not."""

    model_config = ConfigDict(extra="ignore")

    m: int
    n: int
    re: Number = 0
    im: Number = 0
    exact: dict[str, Any] | None = None

    def coefficient(self) -> ExactComplex:
        if self.exact is not None:
            return ExactComplex.from_dict(self.exact)
        re, re_exact = _part(self.re)
        im, im_exact = _part(self.im)
        if re_exact and im_exact:
            return ExactComplex.of(re, im)
        return ExactComplex.from_complex(complex(float(re), float(im)))


class EmbeddingProblemModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    k: PositiveInt
    l: PositiveInt
    N: PositiveInt
    mus: list[list[CoefficientRow]]

    def to_problem(self) -> EmbeddingProblem:
        mus = [
            TrigPoly.from_terms([((row.m, row.n), row.coefficient()) for row in rows])
            for rows in self.mus
        ]
        return EmbeddingProblem(k=self.k, l=self.l, N=self.N, mus=mus)


class DecayModelSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    c: float
    eps: float = Field(gt=0)


class CounterexampleModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    k: PositiveInt
    l: PositiveInt
    N: PositiveInt
    j0: int = 0
    j1: int | None = None
    a1: list[Number] | None = None
    a2: list[Number] | None = None
    delta: str | float = "1/4"
    cmin: PositiveInt = 1
    pmax: PositiveInt = 4096
    window: Literal["auto", "small_t", "literal"] = "auto"
    ladder: list[PositiveInt] | None = None
    junior: dict[Literal["xi", "eta", "rho", "kappa"], DecayModelSpec] = Field(default_factory=dict)

    def to_config(self) -> CounterexampleConfig:
        def table(values: list[Number] | None) -> list[Fraction | float] | None:
            return None if values is None else [_part(v)[0] for v in values]

        try:
            delta = Fraction(str(self.delta))
        except ValueError as exc:
            raise ParseError(f"delta is not a number: {self.delta!r}") from exc
        return CounterexampleConfig(
            k=self.k,
            l=self.l,
            N=self.N,
            j0=self.j0,
            j1=self.j1,
            a1=table(self.a1),
            a2=table(self.a2),
            delta=delta,
            cmin=self.cmin,
            pmax=self.pmax,
            window=self.window,
            ladder=self.ladder,
            junior={name: decay_model(spec.c, spec.eps) for name, spec in self.junior.items()},
        )


def _load(path: Path) -> object:
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc.msg}", exc.pos) from exc


def load_embedding_problem(path: Path) -> EmbeddingProblem:
    try:
        model = EmbeddingProblemModel.model_validate(_load(path))
    except ValidationError as exc:
        raise ParseError(f"{path}: {exc.errors()[0]['msg']}") from exc
    return model.to_problem()


def load_counterexample_config(path: Path) -> CounterexampleConfig:
    try:
        model = CounterexampleModel.model_validate(_load(path))
    except ValidationError as exc:
        raise ParseError(f"{path}: {exc.errors()[0]['msg']}") from exc
    return model.to_config()
