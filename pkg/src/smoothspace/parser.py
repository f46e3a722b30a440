from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from smoothspace.errors import ParseError
from smoothspace.exact import PI, ExactComplex, I
from smoothspace.operators import DiffOperator, MultiIndex, monomial_key

MAX_EXPONENT = 64

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<word>pi|id|i|d1|d2)
  | (?P<op>[\^*/+\-])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True, slots=True)
class Token:
    kind: str
    text: str
    position: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise ParseError(f"Unexpected character {text[pos]!r}", pos)
        kind = match.lastgroup or ""
        if kind != "ws":
            value = match.group()
            tokens.append(Token(value if kind in ("word", "op") else kind, value, pos))
        pos = match.end()
    tokens.append(Token("eof", "", len(text)))
    return tokens


class _Parser:
    """Recursive descent over the token list; one method per grammar rule.

    expr   := sign? term (('+' | '-') term)*
    term   := (coeff | factor) (('*')? (coeff | factor) | '/' coeff)*
    coeff  := (NUMBER | 'i' | 'pi') ('^' UINT)?
    factor := ('d1' | 'd2' | 'id') ('^' UINT)?
    """

    def __init__(self, text: str) -> None:
        self.text = text
        self.tokens = tokenize(text)
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        token = self.current
        self.index += 1
        return token

    def expect_end(self) -> None:
        if self.current.kind != "eof":
            raise ParseError(f"Unexpected token {self.current.text!r}", self.current.position)

    def parse_expr(self) -> DiffOperator:
        if self.current.kind == "eof":
            raise ParseError("Empty expression", self.current.position)
        sign = 1
        if self.current.kind in ("+", "-"):
            sign = -1 if self.advance().kind == "-" else 1
        terms = [self.parse_term(sign)]
        while self.current.kind in ("+", "-"):
            sign = -1 if self.advance().kind == "-" else 1
            terms.append(self.parse_term(sign))
        self.expect_end()
        return DiffOperator.from_terms(terms)

    def _starts_atom(self) -> bool:
        return self.current.kind in ("number", "i", "pi", "d1", "d2", "id")

    def parse_term(self, sign: int) -> tuple[MultiIndex, ExactComplex]:
        if not self._starts_atom():
            raise ParseError(f"Expected a term, found {self.current.text!r}", self.current.position)
        coeff = ExactComplex.of(sign)
        alpha = [0, 0]
        first = True
        while True:
            if self.current.kind == "/":
                if first:
                    raise ParseError("Term cannot start with '/'", self.current.position)
                self.advance()
                if self.current.kind not in ("number", "i", "pi"):
                    raise ParseError("Only coefficients may follow '/'", self.current.position)
                divisor = self.parse_coeff()
                if divisor.is_zero():
                    raise ParseError("Division by zero", self.current.position)
                coeff = coeff / divisor
                continue
            if self.current.kind == "*":
                if first:
                    raise ParseError("Term cannot start with '*'", self.current.position)
                self.advance()
                if not self._starts_atom():
                    raise ParseError("Expected a factor after '*'", self.current.position)
            if not self._starts_atom():
                break
            first = False
            if self.current.kind in ("d1", "d2", "id"):
                name = self.advance().kind
                power = self.parse_exponent()
                if name == "d1":
                    alpha[0] += power
                elif name == "d2":
                    alpha[1] += power
            else:
                coeff = coeff * self.parse_coeff()
        if alpha[0] > MAX_EXPONENT or alpha[1] > MAX_EXPONENT:
            raise ParseError(f"Total exponent exceeds {MAX_EXPONENT}", self.current.position)
        return (MultiIndex(alpha[0], alpha[1]), coeff)

    def parse_coeff(self) -> ExactComplex:
        token = self.advance()
        if token.kind == "number":
            if any(ch in token.text for ch in ".eE"):
                base = ExactComplex.from_complex(float(token.text))
            else:
                base = ExactComplex.of(int(token.text))
        elif token.kind == "i":
            base = I
        else:
            base = PI
        power = self.parse_exponent()
        return base**power if power != 1 else base

    def parse_exponent(self) -> int:
        if self.current.kind != "^":
            return 1
        self.advance()
        token = self.current
        if token.kind != "number" or not token.text.isdigit():
            raise ParseError("Exponent must be a nonnegative integer", token.position)
        self.advance()
        value = int(token.text)
        if value > MAX_EXPONENT:
            raise ParseError(f"Exponent {value} exceeds {MAX_EXPONENT}", token.position)
        return value


def parse_operator(text: str) -> DiffOperator:
    return _Parser(text).parse_expr()


def read_operator_file(path: Path) -> list[DiffOperator]:
    """One expression per line; blank lines and '#' comments are skipped."""
    ops: list[DiffOperator] = []
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            ops.append(parse_operator(line))
        except ParseError as exc:
            raise ParseError(f"{path}:{lineno}: {exc.message}", exc.position) from exc
    return ops


def _power(name: str, exponent: int) -> str:
    return name if exponent == 1 else f"{name}^{exponent}"


def _factors(mi: MultiIndex) -> list[str]:
    out = []
    if mi.alpha1:
        out.append(_power("d1", mi.alpha1))
    if mi.alpha2:
        out.append(_power("d2", mi.alpha2))
    return out


def _exact_chunks(mi: MultiIndex, c: ExactComplex) -> list[tuple[bool, str]]:
    chunks = []
    for deg, re_part, im_part in c.terms:
        for value, imaginary in ((re_part, False), (im_part, True)):
            if not value:
                continue
            atoms: list[str] = []
            magnitude = abs(value)
            head = ""
            if magnitude != 1 or (deg <= 0 and not imaginary and not mi.order):
                head = str(magnitude)
            if deg < 0:
                head = f"{head or '1'}/{_power('pi', -deg)}"
            if head:
                atoms.append(head)
            if deg > 0:
                atoms.append(_power("pi", deg))
            if imaginary:
                atoms.append("i")
            atoms.extend(_factors(mi))
            chunks.append((value < 0, "*".join(atoms)))
    return chunks


def _inexact_chunks(mi: MultiIndex, c: ExactComplex) -> list[tuple[bool, str]]:
    z = c.to_complex()
    chunks = []
    for value, imaginary in ((z.real, False), (z.imag, True)):
        if value == 0.0:
            continue
        atoms = [repr(abs(value))]
        if imaginary:
            atoms.append("i")
        atoms.extend(_factors(mi))
        chunks.append((value < 0, "*".join(atoms)))
    return chunks


def format_operator(op: DiffOperator) -> str:
    """Canonical text form; parse_operator(format_operator(op)) == op."""
    if op.is_zero():
        return "0"
    chunks: list[tuple[bool, str]] = []
    for mi, c in sorted(op.terms, key=lambda item: monomial_key(item[0])):
        chunks.extend(_exact_chunks(mi, c) if c.exact else _inexact_chunks(mi, c))
    out = []
    for index, (negative, text) in enumerate(chunks):
        if index == 0:
            out.append(f"-{text}" if negative else text)
        else:
            out.append(f" - {text}" if negative else f" + {text}")
    return "".join(out)
