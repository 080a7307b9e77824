"""Reduction operators, their lattice, confluence, and confluence-algebra images.

Endomorphisms of span(X^(m)) are stored column-wise and only for the words
they move: a word without a stored column is implicitly fixed.  This keeps the
operators met in practice (which move few words) cheap to compose.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping

from . import linalg
from .linalg import Subspace
from .words import ONE, HomogPoly, Vector, Word, add_into, all_words


class OperatorError(ValueError):
    pass


class UndeterminedError(RuntimeError):
    """Confluence search hit ``k_max`` before deciding."""

    def __init__(self, k_max: int):
        super().__init__(f"undetermined at k_max={k_max}; raise the confluence cap")
        self.k_max = k_max


class RepresentationError(ArithmeticError):
    pass


class InvariantError(AssertionError):
    pass


def _is_identity_column(w: Word, col: Mapping) -> bool:
    return len(col) == 1 and col.get(w) == 1


class Endomorphism:
    """A linear endomorphism of span(X^(m)), identity on unstored columns."""

    __slots__ = ("nletters", "degree", "_cols", "_ker")

    def __init__(self, nletters: int, degree: int, cols: Mapping[Word, Vector] = ()):
        self.nletters = nletters
        self.degree = degree
        self._cols = {w: c for w, c in dict(cols).items() if not _is_identity_column(w, c)}
        self._ker = None

    @classmethod
    def identity(cls, nletters: int, degree: int):
        return cls(nletters, degree)

    @classmethod
    def zero(cls, nletters: int, degree: int):
        return cls(nletters, degree, {w: {} for w in all_words(nletters, degree)})

    @classmethod
    def from_function(cls, nletters: int, degree: int, f: Callable[[Word], Mapping]):
        return cls(nletters, degree, {w: dict(f(w)) for w in all_words(nletters, degree)})

    def words(self) -> Iterator[Word]:
        return all_words(self.nletters, self.degree)

    def nontrivial(self) -> dict[Word, Vector]:
        """Columns of the words that are not fixed; treat as read-only."""
        return self._cols

    def column(self, w: Word) -> Vector:
        col = self._cols.get(w)
        return {w: ONE} if col is None else col

    def apply(self, vec: Mapping) -> Vector:
        out: Vector = {}
        cols = self._cols
        for w, c in vec.items():
            col = cols.get(w)
            if col is None:
                add_into(out, {w: ONE}, c)
            else:
                add_into(out, col, c)
        return out

    def __call__(self, x):
        if isinstance(x, HomogPoly):
            return HomogPoly(self.apply(x.vector()), x.degree)
        if isinstance(x, tuple):
            return HomogPoly(self.column(x), len(x))
        return self.apply(x)

    def _check(self, other: Endomorphism) -> None:
        if (self.nletters, self.degree) != (other.nletters, other.degree):
            raise OperatorError("operators act on different spaces")

    def __matmul__(self, other: Endomorphism) -> Endomorphism:
        """Composition: ``(A @ B)(v) = A(B(v))``."""
        self._check(other)
        cols = {w: self.apply(c) for w, c in other._cols.items()}
        for w, c in self._cols.items():
            if w not in other._cols:
                cols[w] = c
        return Endomorphism(self.nletters, self.degree, cols)

    def _combine(self, other: Endomorphism, a, b) -> Endomorphism:
        self._check(other)
        cols = {}
        for w in self.words():
            v: Vector = {}
            add_into(v, self.column(w), a)
            add_into(v, other.column(w), b)
            cols[w] = v
        return Endomorphism(self.nletters, self.degree, cols)

    def __add__(self, other: Endomorphism) -> Endomorphism:
        return self._combine(other, ONE, ONE)

    def __sub__(self, other: Endomorphism) -> Endomorphism:
        return self._combine(other, ONE, -ONE)

    def __neg__(self) -> Endomorphism:
        return self * -1

    def __mul__(self, c) -> Endomorphism:
        cols = {}
        for w in self.words():
            cols[w] = {u: a * c for u, a in self.column(w).items()} if c else {}
        return Endomorphism(self.nletters, self.degree, cols)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, Endomorphism):
            return NotImplemented
        if (self.nletters, self.degree) != (other.nletters, other.degree):
            return False
        for w in self._cols.keys() | other._cols.keys():
            if self.column(w) != other.column(w):
                return False
        return True

    __hash__ = None  # type: ignore[assignment]

    def is_identity(self) -> bool:
        return not self._cols

    def is_zero(self) -> bool:
        return all(not self.column(w) for w in self.words())

    def commutes_with(self, other: Endomorphism) -> bool:
        return self @ other == other @ self

    def is_projector(self) -> bool:
        return all(self.apply(c) == c for c in self._cols.values())

    def is_reduction_operator(self) -> bool:
        """Projector sending each word to itself or to something strictly smaller."""
        for w, c in self._cols.items():
            if c and max(c) >= w:
                return False
        return self.is_projector()

    def tensor(self, left: int, right: int) -> Endomorphism:
        """id^{left} (x) self (x) id^{right}."""
        lefts = list(all_words(self.nletters, left))
        rights = list(all_words(self.nletters, right))
        cols = {}
        for w, c in self._cols.items():
            for a in lefts:
                for b in rights:
                    cols[a + w + b] = {a + u + b: x for u, x in c.items()}
        cls = type(self) if isinstance(self, ReductionOperator) else Endomorphism
        return cls(self.nletters, left + self.degree + right, cols)

    def kernel(self) -> Subspace:
        if self._ker is None:
            self._ker = linalg.kernel({w: self.column(w) for w in self.words()}, self.degree)
        return self._ker

    def image_dim(self) -> int:
        return self.nletters**self.degree - self.kernel().dim

    def format_rows(self, alphabet) -> list[str]:
        out = []
        for w in sorted(self._cols, reverse=True):
            out.append(f"{alphabet.format_word(w)} -> {HomogPoly(self._cols[w], self.degree).format(alphabet)}")
        return out

    def __repr__(self) -> str:
        return f"{type(self).__name__}(degree={self.degree}, moved={len(self._cols)})"


class ReductionOperator(Endomorphism):
    """A projector T with T(w) = w or lm(T(w)) < w for every word w."""

    __slots__ = ()

    def kernel(self) -> Subspace:
        if self._ker is None:
            # ker T is spanned by the w - T(w); T(w) only involves fixed words,
            # so these vectors already form the reduced echelon basis
            rows = {}
            for w, c in self._cols.items():
                v = {w: ONE}
                add_into(v, c, -ONE)
                rows[w] = v
            self._ker = Subspace(self.degree, rows)
        return self._ker


def identity(nletters: int, degree: int) -> ReductionOperator:
    return ReductionOperator(nletters, degree)


def zero_operator(nletters: int, degree: int) -> ReductionOperator:
    return ReductionOperator(nletters, degree, {w: {} for w in all_words(nletters, degree)})


def theta_inv(W: Subspace, nletters: int) -> ReductionOperator:
    """The unique reduction operator whose kernel is W."""
    cols = {}
    for p, row in W.rows.items():
        cols[p] = {w: -c for w, c in row.items() if w != p}
    T = ReductionOperator(nletters, W.degree, cols)
    T._ker = W
    return T


def theta(T: Endomorphism) -> Subspace:
    return T.kernel()


def _same_space(T1: Endomorphism, T2: Endomorphism) -> None:
    if (T1.nletters, T1.degree) != (T2.nletters, T2.degree):
        raise OperatorError(f"degree mismatch: {T1.degree} != {T2.degree}")


def meet(T1: Endomorphism, T2: Endomorphism) -> ReductionOperator:
    _same_space(T1, T2)
    return theta_inv(linalg.sum_spaces(theta(T1), theta(T2)), T1.nletters)


def join(T1: Endomorphism, T2: Endomorphism) -> ReductionOperator:
    _same_space(T1, T2)
    return theta_inv(linalg.intersect(theta(T1), theta(T2)), T1.nletters)


def meet_all(ops) -> ReductionOperator:
    ops = list(ops)
    K = theta(ops[0])
    for T in ops[1:]:
        K = linalg.sum_spaces(K, theta(T))
    return theta_inv(K, ops[0].nletters)


def join_all(ops) -> ReductionOperator:
    ops = list(ops)
    K = theta(ops[0])
    for T in ops[1:]:
        K = linalg.intersect(K, theta(T))
    return theta_inv(K, ops[0].nletters)


def leq(T1: Endomorphism, T2: Endomorphism) -> bool:
    """T1 <= T2 iff ker T2 is included in ker T1."""
    _same_space(T1, T2)
    return linalg.includes(theta(T1), theta(T2))


def alternating_product(Ta: Endomorphism, Tb: Endomorphism, k: int) -> Endomorphism:
    """<Ta, Tb>^k: k alternating factors, the rightmost one being Tb."""
    if k < 1:
        raise ValueError("alternating product needs k >= 1")
    _same_space(Ta, Tb)
    out = Tb
    for i in range(2, k + 1):
        out = (Ta if i % 2 == 0 else Tb) @ out
    return out


@dataclass
class ConfluenceWitness:
    k: int
    confluent: bool
    limit: Endomorphism | None = field(default=None, repr=False)


def confluence(T1: Endomorphism, T2: Endomorphism, k_max: int = 64) -> ConfluenceWitness:
    """Smallest k with <T1,T2>^k == <T2,T1>^k.

    Reports non-confluence only once both alternating sequences have stopped
    moving (two consecutive unchanged steps each); raises UndeterminedError
    when ``k_max`` is reached first.
    """
    _same_space(T1, T2)
    a, b = T2, T1  # <T1,T2>^1, <T2,T1>^1
    still_a = still_b = 0
    k = 1
    while True:
        if a == b:
            return ConfluenceWitness(k, True, a)
        if still_a >= 2 and still_b >= 2:
            return ConfluenceWitness(k, False, None)
        if k >= k_max:
            raise UndeterminedError(k_max)
        na = (T1 if k % 2 else T2) @ a
        nb = (T2 if k % 2 else T1) @ b
        still_a = still_a + 1 if na == a else 0
        still_b = still_b + 1 if nb == b else 0
        a, b = na, nb
        k += 1


@dataclass
class Representation:
    """Images of sigma, gamma1, gamma2, lambda under s1 -> T1, s2 -> T2."""

    t1: Endomorphism
    t2: Endomorphism
    k: int
    sigma: Endomorphism
    gamma1: Endomorphism
    gamma2: Endomorphism
    lam: Endomorphism

    @property
    def left_bound(self) -> Endomorphism:
        return self.gamma1

    @property
    def right_bound(self) -> Endomorphism:
        return self.gamma2


def _odd_sum(first: Endomorphism, second: Endomorphism, k: int) -> Endomorphism:
    """Sum of <first, second>^i over odd i in [1, k-1] (rightmost factor ``second``)."""
    total = Endomorphism.zero(first.nletters, first.degree)
    prod = second
    for i in range(1, k):
        if i > 1:
            prod = (first if i % 2 == 0 else second) @ prod
        if i % 2:
            total = total + prod
    return total


def _images(T1: Endomorphism, T2: Endomorphism, k: int) -> Representation:
    ident = Endomorphism.identity(T1.nletters, T1.degree)
    sigma = alternating_product(T1, T2, k)
    gamma1 = (ident - T2) @ _odd_sum(T2, T1, k)
    gamma2 = (ident - T1) @ _odd_sum(T1, T2, k)
    lam = ident - (sigma + gamma1 + gamma2)
    return Representation(T1, T2, k, sigma, gamma1, gamma2, lam)


def represent(
    T1: Endomorphism,
    T2: Endomorphism,
    witness: ConfluenceWitness | None = None,
    *,
    check: bool = True,
    k_max: int = 64,
) -> Representation:
    """Evaluate the distinguished confluence-algebra elements on a confluent pair.

    With ``check`` the images are verified against the lattice bounds
    (sigma -> T1 meet T2, 1 - lambda -> T1 join T2); on failure k is raised by
    one, at most twice, before giving up.
    """
    if witness is None:
        witness = confluence(T1, T2, k_max)
    if not witness.confluent:
        raise OperatorError("pair is not confluent")
    if not check:
        return _images(T1, T2, witness.k)
    lower, upper = meet(T1, T2), join(T1, T2)
    ident = Endomorphism.identity(T1.nletters, T1.degree)
    for k in range(witness.k, witness.k + 3):
        rep = _images(T1, T2, k)
        if rep.sigma == lower and ident - rep.lam == upper:
            return rep
    raise RepresentationError(f"representation identities violated for k={witness.k}..{witness.k + 2}")


def eval_sigma(T1, T2, witness=None, **kw) -> Endomorphism:
    return represent(T1, T2, witness, **kw).sigma


def eval_gamma1(T1, T2, witness=None, **kw) -> Endomorphism:
    return represent(T1, T2, witness, **kw).gamma1


def eval_gamma2(T1, T2, witness=None, **kw) -> Endomorphism:
    return represent(T1, T2, witness, **kw).gamma2


def eval_lambda(T1, T2, witness=None, **kw) -> Endomorphism:
    return represent(T1, T2, witness, **kw).lam


def complemented_alternating(T1: Endomorphism, T2: Endomorphism, k: int) -> Endomorphism:
    """<id - T2, id - T1>^k, checked against the other bracket order and its expansion."""
    ident = Endomorphism.identity(T1.nletters, T1.degree)
    c1, c2 = ident - T1, ident - T2
    lam = alternating_product(c2, c1, k)
    if lam != alternating_product(c1, c2, k):
        raise InvariantError(f"complemented products disagree at k={k}")
    expansion = ident
    for i in range(1, k):
        term = alternating_product(T2, T1, i) + alternating_product(T1, T2, i)
        expansion = expansion + term if i % 2 == 0 else expansion - term
    last = alternating_product(T2, T1, k)
    expansion = expansion + last if k % 2 == 0 else expansion - last
    if expansion != lam:
        raise InvariantError("expansion identity for the complemented product fails")
    return lam
