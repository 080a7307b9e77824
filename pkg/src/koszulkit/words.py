"""Words over an ordered alphabet and homogeneous polynomials.

A word is a tuple of letter indices into an :class:`Alphabet`.  Words of equal
length are ordered lexicographically by letter index, which is exactly the
ordering Python already uses for tuples, so ``max`` over a set of equal-length
words gives the leading word.

Coefficients are exact rationals (``gmpy2.mpq``).
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from gmpy2 import mpq

Word = tuple
Vector = dict  # sparse {Word: mpq}, all words of one length

Q = mpq
ZERO = mpq(0)
ONE = mpq(1)

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class ParseError(ValueError):
    """Malformed relation expression; ``column`` is 1-based."""

    def __init__(self, message: str, column: int):
        super().__init__(f"{message} (column {column})")
        self.message = message
        self.column = column


@dataclass(frozen=True)
class Alphabet:
    """Ordered generator names; list position is the letter order."""

    symbols: tuple[str, ...]

    def __post_init__(self):
        symbols = tuple(self.symbols)
        object.__setattr__(self, "symbols", symbols)
        for name in symbols:
            if not isinstance(name, str) or not _NAME.match(name):
                raise ValueError(f"invalid generator name {name!r}")
        if len(set(symbols)) != len(symbols):
            raise ValueError("generator names must be pairwise distinct")

    def __len__(self) -> int:
        return len(self.symbols)

    def index(self, name: str) -> int:
        try:
            return self.symbols.index(name)
        except ValueError:
            raise KeyError(f"unknown generator {name!r}") from None

    def word(self, text: str | Iterable[str]) -> Word:
        """``alphabet.word("x2*x1")`` or ``alphabet.word(["x2", "x1"])``."""
        if isinstance(text, str):
            text = [t.strip() for t in text.split("*")] if text.strip() else []
        return tuple(self.index(t) for t in text)

    def format_word(self, w: Word) -> str:
        return "*".join(self.symbols[i] for i in w) if w else "1"

    def words(self, m: int) -> Iterator[Word]:
        """All words of length ``m`` in ascending order."""
        return itertools.product(range(len(self.symbols)), repeat=m)


def compare_words(a: Word, b: Word) -> int:
    if len(a) != len(b):
        raise ValueError("incomparable lengths")
    return (a > b) - (a < b)


def split(w: Word, k: int) -> tuple[Word, Word]:
    if not 0 <= k <= len(w):
        raise ValueError(f"split position {k} outside 0..{len(w)}")
    return w[:k], w[k:]


def concat(u: Word, v: Word) -> Word:
    return u + v


def all_words(nletters: int, m: int) -> Iterator[Word]:
    return itertools.product(range(nletters), repeat=m)


# -- sparse vector helpers used throughout the engine -------------------------


def add_into(target: Vector, vec: Mapping, c=ONE) -> None:
    """``target += c * vec`` in place, dropping cancelled terms."""
    for w, a in vec.items():
        b = target.get(w, ZERO) + c * a
        if b:
            target[w] = b
        else:
            target.pop(w, None)


def lin_comb(pairs: Iterable[tuple[object, Mapping]]) -> Vector:
    out: Vector = {}
    for c, vec in pairs:
        if c:
            add_into(out, vec, c)
    return out


def tensor_vectors(u: Mapping, v: Mapping) -> Vector:
    return {a + b: c * d for a, c in u.items() for b, d in v.items()}


class HomogPoly:
    """An immutable rational combination of words of one length."""

    __slots__ = ("degree", "_terms")

    def __init__(self, terms: Mapping | Iterable = (), degree: int | None = None):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: Vector = {}
        for w, c in items:
            w = tuple(w)
            c = mpq(c)
            if degree is None:
                degree = len(w)
            elif len(w) != degree:
                raise ValueError("all words of a homogeneous polynomial must share one length")
            acc[w] = acc.get(w, ZERO) + c
        if degree is None:
            raise ValueError("degree of the zero polynomial must be given")
        self.degree = degree
        self._terms = tuple(sorted(((w, c) for w, c in acc.items() if c), reverse=True))

    @classmethod
    def from_word(cls, w: Word, coeff=1) -> HomogPoly:
        return cls({tuple(w): coeff})

    @classmethod
    def zero(cls, degree: int) -> HomogPoly:
        return cls((), degree)

    def vector(self) -> Vector:
        return dict(self._terms)

    def items(self):
        return self._terms

    def words(self) -> list[Word]:
        return [w for w, _ in self._terms]

    def coefficient(self, w: Word):
        return dict(self._terms).get(tuple(w), ZERO)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def leading(self) -> tuple[Word, mpq]:
        if not self._terms:
            raise ValueError("no leading term")
        return self._terms[0]

    @property
    def lm(self) -> Word:
        return self.leading()[0]

    @property
    def lc(self) -> mpq:
        return self.leading()[1]

    def monic(self) -> HomogPoly:
        return self * (1 / self.lc)

    def _check(self, other: HomogPoly) -> None:
        if self.degree != other.degree:
            raise ValueError("degree mismatch")

    def __add__(self, other: HomogPoly) -> HomogPoly:
        self._check(other)
        v = self.vector()
        add_into(v, dict(other._terms))
        return HomogPoly(v, self.degree)

    def __sub__(self, other: HomogPoly) -> HomogPoly:
        self._check(other)
        v = self.vector()
        add_into(v, dict(other._terms), -ONE)
        return HomogPoly(v, self.degree)

    def __neg__(self) -> HomogPoly:
        return self * -1

    def __mul__(self, c) -> HomogPoly:
        if isinstance(c, HomogPoly):
            return tensor_expand(self, c)
        return HomogPoly(((w, a * c) for w, a in self._terms), self.degree)

    def __rmul__(self, c) -> HomogPoly:
        return self * c

    def __eq__(self, other) -> bool:
        return isinstance(other, HomogPoly) and self.degree == other.degree and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.degree, self._terms))

    def format(self, alphabet: Alphabet) -> str:
        if not self._terms:
            return "0"
        parts = []
        for w, c in self._terms:
            sign = "-" if c < 0 else "+"
            a = abs(c)
            body = alphabet.format_word(w)
            if a != 1:
                body = str(a) if not w else f"{a!s}*{body}"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self) -> str:
        return f"HomogPoly({dict(self._terms)!r}, degree={self.degree})"


def leading(f: HomogPoly) -> tuple[Word, mpq]:
    return f.leading()


def tensor_expand(u: HomogPoly, v: HomogPoly) -> HomogPoly:
    return HomogPoly(tensor_vectors(dict(u.items()), dict(v.items())), u.degree + v.degree)


# -- relation-expression grammar ---------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\s*/\s*\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*]))"
)


def _tokens(text: str):
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            return
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            col = pos + len(text[pos:]) - len(text[pos:].lstrip()) + 1
            raise ParseError(f"unexpected character {text[col - 1]!r}", col)
        kind = m.lastgroup
        col = m.start(kind) + 1
        yield kind, m.group(kind), col
        pos = m.end()


def parse_expression(text: str, alphabet: Alphabet) -> HomogPoly:
    """Parse ``c*g1*...*gk`` terms joined by ``+``/``-`` into a polynomial."""
    toks = list(_tokens(text))
    if not toks:
        raise ParseError("empty expression", 1)
    terms: list[tuple[Word, mpq]] = []
    i = 0
    expect_term = True
    sign = 1
    while i < len(toks):
        kind, val, col = toks[i]
        if expect_term:
            if kind == "op" and val in "+-":
                if val == "-":
                    sign = -sign
                i += 1
                continue
            coeff = mpq(1)
            letters: list[int] = []
            if kind == "num":
                num, _, den = val.partition("/")
                if den and int(den) == 0:
                    raise ParseError("zero denominator", col)
                coeff = mpq(int(num), int(den) if den else 1)
                i += 1
                need_factor = False
            elif kind == "name":
                need_factor = True
            else:
                raise ParseError(f"expected a term, found {val!r}", col)
            while i < len(toks):
                kind, val, col = toks[i]
                if need_factor:
                    if kind != "name":
                        raise ParseError(f"expected a generator, found {val!r}", col)
                    if val not in alphabet.symbols:
                        raise ParseError(f"unknown generator {val!r}", col)
                    letters.append(alphabet.index(val))
                    need_factor = False
                    i += 1
                elif kind == "op" and val == "*":
                    need_factor = True
                    i += 1
                else:
                    break
            if need_factor:
                raise ParseError("expression ends after '*'", len(text) + 1)
            terms.append((tuple(letters), sign * coeff))
            sign = 1
            expect_term = False
        else:
            if kind == "op" and val in "+-":
                sign = -1 if val == "-" else 1
                expect_term = True
                i += 1
            else:
                raise ParseError(f"expected '+' or '-', found {val!r}", col)
    if expect_term:
        raise ParseError("expression ends with an operator", len(text) + 1)
    lengths = {len(w) for w, _ in terms}
    if len(lengths) > 1:
        raise ParseError("expression is not homogeneous", 1)
    return HomogPoly(terms, lengths.pop())
