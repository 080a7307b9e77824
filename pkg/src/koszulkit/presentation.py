"""N-homogeneous presentations <X | R> and their rewriting data."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import linalg
from .linalg import Subspace
from .operators import ConfluenceWitness, ReductionOperator, confluence, theta_inv
from .words import ONE, Alphabet, HomogPoly, Vector, Word, add_into, all_words, parse_expression


class PresentationError(ValueError):
    pass


class PreconditionError(RuntimeError):
    pass


@dataclass(frozen=True)
class CriticalBranching:
    w1: Word
    w2: Word
    w3: Word
    f: int
    g: int

    @property
    def source(self) -> Word:
        return self.w1 + self.w2 + self.w3


@dataclass
class ConfluenceReport:
    side_confluent: bool
    witnesses: dict[int, ConfluenceWitness]  # keyed by total degree N+1..2N-1
    extra_condition: bool | None = None
    failing_degree: int | None = None

    def summary(self) -> str:
        ks = ", ".join(f"k={w.k} @deg{d}" for d, w in self.witnesses.items() if w.confluent)
        head = "side-confluent" if self.side_confluent else "NOT side-confluent"
        if self.side_confluent and ks:
            head += f" ({ks})"
        if not self.side_confluent:
            head += f" (fails @deg{self.failing_degree})"
        if self.extra_condition is not None:
            head += "; extra-condition: " + ("HOLDS" if self.extra_condition else "FAILS")
        return head


class Presentation:
    """A reduced N-homogeneous presentation; build with :func:`load_and_interreduce`."""

    def __init__(self, alphabet: Alphabet, N: int, relations: Sequence[HomogPoly]):
        if N < 2:
            raise PresentationError("N must be at least 2")
        self.alphabet = alphabet
        self.N = N
        self.relations = tuple(relations)
        self.nletters = len(alphabet)
        lms = [f.lm for f in self.relations]
        if len(set(lms)) != len(lms):
            raise PresentationError("relations must have distinct leading words")
        self.relation_space: Subspace = linalg.span(self.relations, N)
        self.S: ReductionOperator = theta_inv(self.relation_space, self.nletters)
        # rewriting rule lm(f) -> lm(f) - f, one per relation
        self.rules: dict[Word, Vector] = dict(self.S.nontrivial())
        self._nf_words: dict[Word, Vector] = {}
        self._ideal: dict[int, Subspace] = {}
        self._normal_words: dict[int, list[Word]] = {}
        self._report: ConfluenceReport | None = None
        self._report_kmax = 0
        self._ec: bool | None = None
        self.caches: dict = {}  # scratch space for the Koszul layer

    # -- rewriting ---------------------------------------------------------

    def window(self, w: Word) -> int | None:
        """Leftmost position of a relation leading word inside ``w``."""
        N, rules = self.N, self.rules
        for i in range(len(w) - N + 1):
            if w[i : i + N] in rules:
                return i
        return None

    def is_normal(self, w: Word) -> bool:
        return self.window(w) is None

    def apply_reduction(self, vec: Vector, w: Word, i: int) -> Vector:
        """Apply the reduction r_{u f v} at position ``i`` of the term ``w``."""
        key = w[i : i + self.N]
        if key not in self.rules or w not in vec:
            raise PresentationError("no reduction at that site")
        c = vec[w]
        out = dict(vec)
        out.pop(w)
        left, right = w[:i], w[i + self.N :]
        add_into(out, {left + u + right: a for u, a in self.rules[key].items()}, c)
        return out

    def reduction_sites(self, vec: Vector) -> list[tuple[Word, int]]:
        N, rules = self.N, self.rules
        return [(w, i) for w in vec for i in range(len(w) - N + 1) if w[i : i + N] in rules]

    def nf_word(self, w: Word) -> Vector:
        """Normal form of a word, memoized; treat the result as read-only."""
        memo = self._nf_words
        if w in memo:
            return memo[w]
        stack = [w]
        while stack:
            u = stack[-1]
            if u in memo:
                stack.pop()
                continue
            i = self.window(u)
            if i is None:
                memo[u] = {u: ONE}
                stack.pop()
                continue
            left, right = u[:i], u[i + self.N :]
            terms = [(left + t + right, a) for t, a in self.rules[u[i : i + self.N]].items()]
            missing = [t for t, _ in terms if t not in memo]
            if missing:
                stack.extend(missing)
                continue
            out: Vector = {}
            for t, a in terms:
                add_into(out, memo[t], a)
            memo[u] = out
            stack.pop()
        return memo[w]

    def nf_vector(self, vec: Vector) -> Vector:
        out: Vector = {}
        for w, c in vec.items():
            add_into(out, self.nf_word(w), c)
        return out

    def normal_words(self, m: int) -> list[Word]:
        """Normal words of length ``m``, descending."""
        if m not in self._normal_words:
            ws = [w for w in all_words(self.nletters, m) if self.is_normal(w)]
            ws.reverse()
            self._normal_words[m] = ws
        return self._normal_words[m]

    def prefix_normalizer(self, m: int, suffix: int) -> ReductionOperator:
        """phi on the first ``m - suffix`` letters, identity on the last ``suffix``."""
        key = ("prefix", m, suffix)
        if key not in self.caches:
            p = m - suffix
            cols = {}
            for w in all_words(self.nletters, m):
                head, tail = w[:p], w[p:]
                if self.window(head) is not None:
                    cols[w] = {u + tail: c for u, c in self.nf_word(head).items()}
            self.caches[key] = ReductionOperator(self.nletters, m, cols)
        return self.caches[key]

    # -- spaces and operators ------------------------------------------------

    def s_operator(self, i: int, m: int) -> ReductionOperator:
        """S_i^(m) = id^i (x) S (x) id^(m-N-i)."""
        if not 0 <= i <= m - self.N:
            raise ValueError(f"S_{i} undefined in degree {m}")
        key = ("S", i, m)
        if key not in self.caches:
            self.caches[key] = self.S.tensor(i, m - self.N - i)
        return self.caches[key]

    def ideal_component(self, m: int) -> Subspace:
        """I(R)_m, the sum of the shifted copies of R-bar in degree m."""
        if m in self._ideal:
            return self._ideal[m]
        N = self.N
        if m < N:
            I = linalg.zero_space(m)
        else:
            # w - nf(w) always lies in I(R)_m and the rows are reduced echelon;
            # it is all of I(R)_m exactly when every shifted relation reduces to 0
            rows = {}
            for w in all_words(self.nletters, m):
                if self.window(w) is not None:
                    r = {w: ONE}
                    add_into(r, self.nf_word(w), -ONE)
                    rows[w] = r
            I = Subspace(m, rows)
            if not self._generators_reduce(I, m):
                I = linalg.zero_space(m)
                for i in range(m - N + 1):
                    I = linalg.sum_spaces(I, linalg.tensor_shift(self.relation_space, i, m - N - i, self.nletters))
        self._ideal[m] = I
        return I

    def _generators_reduce(self, I: Subspace, m: int) -> bool:
        N = self.N
        for i in range(m - N + 1):
            for a in all_words(self.nletters, i):
                for b in all_words(self.nletters, m - N - i):
                    for row in self.relation_space.rows.values():
                        if I.reduce({a + u + b: c for u, c in row.items()}):
                            return False
        return True

    # -- decisions -------------------------------------------------------------

    def side_confluence(self, k_max: int = 64) -> ConfluenceReport:
        if self._report is None or self._report_kmax < k_max and not self._report.side_confluent:
            self._report = check_side_confluence(self, k_max)
            self._report_kmax = k_max
        return self._report

    def extra_condition(self) -> bool:
        if self._ec is None:
            self._ec = check_extra_condition(self)
        return self._ec

    def format(self, f) -> str:
        if isinstance(f, tuple):
            return self.alphabet.format_word(f)
        if isinstance(f, dict):
            f = HomogPoly(f, len(next(iter(f))) if f else 0)
        return f.format(self.alphabet)

    def __repr__(self) -> str:
        rels = ", ".join(self.format(f) for f in self.relations)
        return f"Presentation(<{', '.join(self.alphabet.symbols)} | {rels}>, N={self.N})"


def _reduce_by(f: Vector, rules: dict[Word, Vector]) -> Vector:
    """Rewrite every term of a degree-N vector that is a leading word in ``rules``."""
    f = dict(f)
    while True:
        hits = [w for w in f if w in rules]
        if not hits:
            return f
        w = max(hits)
        c = f.pop(w)
        add_into(f, rules[w], c)


def load_and_interreduce(
    alphabet: Alphabet | Sequence[str], N: int, relations: Iterable[HomogPoly | str]
) -> Presentation:
    """Scale relations monic and interreduce them to a reduced presentation."""
    if not isinstance(alphabet, Alphabet):
        alphabet = Alphabet(tuple(alphabet))
    if N < 2:
        raise PresentationError("N must be at least 2")
    rels: list[Vector] = []
    for k, f in enumerate(relations):
        if isinstance(f, str):
            f = parse_expression(f, alphabet)
        if f.degree != N:
            raise PresentationError(f"relation {k + 1} has degree {f.degree}, expected {N}")
        if not f:
            raise PresentationError(f"relation {k + 1} is zero")
        rels.append(f.monic().vector())
    changed = True
    while changed:
        changed = False
        i = 0
        while i < len(rels):
            rules = {}
            for j, g in enumerate(rels):
                if j != i:
                    p = max(g)
                    rules.setdefault(p, {w: -c for w, c in g.items() if w != p})
            f = _reduce_by(rels[i], rules)
            if not f:
                del rels[i]
                changed = True
                continue
            lead = f[max(f)]
            if lead != 1:
                f = {w: c / lead for w, c in f.items()}
            if f != rels[i]:
                rels[i] = f
                changed = True
            i += 1
    return Presentation(alphabet, N, [HomogPoly(f, N) for f in rels])


def normal_form(P: Presentation, f: HomogPoly) -> HomogPoly:
    """A normal form of ``f``; unique when P is side-confluent."""
    return HomogPoly(P.nf_vector(f.vector()), f.degree)


def critical_branchings(P: Presentation) -> list[CriticalBranching]:
    N = P.N
    lms = [f.lm for f in P.relations]
    out = []
    for fi, a in enumerate(lms):
        for gi, b in enumerate(lms):
            for L in range(1, N):
                if a[N - L :] == b[:L]:
                    out.append(CriticalBranching(a[: N - L], a[N - L :], b[L:], fi, gi))
    out.sort(key=lambda c: (c.f, c.g, len(c.w1)))
    out.sort(key=lambda c: c.source, reverse=True)
    return out


def check_side_confluence(P: Presentation, k_max: int = 64) -> ConfluenceReport:
    """Confluence of (S (x) id^m, id^m (x) S) on X^(N+m) for m = 1..N-1."""
    N = P.N
    witnesses = {}
    failing = None
    for m in range(1, N):
        w = confluence(P.s_operator(0, N + m), P.s_operator(m, N + m), k_max)
        witnesses[N + m] = w
        if not w.confluent and failing is None:
            failing = N + m
    return ConfluenceReport(failing is None, witnesses, None, failing)


def check_extra_condition(P: Presentation) -> bool:
    N, R, n = P.N, P.relation_space, P.nletters
    for m in range(2, N):
        lhs = linalg.intersect(linalg.tensor_shift(R, m, 0, n), linalg.tensor_shift(R, 0, m, n))
        if not linalg.includes(linalg.tensor_shift(R, m - 1, 1, n), lhs):
            return False
    return True


@dataclass
class SuffixVerdict:
    branching: CriticalBranching
    window: Word
    reducible: bool = field(default=True)


def branching_suffix_property(P: Presentation, k_max: int = 64) -> list[SuffixVerdict]:
    """For every critical branching x_1...x_m, test that x_{m-N}...x_{m-1} is reducible."""
    if not P.side_confluence(k_max).side_confluent or not P.extra_condition():
        raise PreconditionError("presentation is not extra-confluent")
    out = []
    for c in critical_branchings(P):
        src = c.source
        m = len(src)
        win = src[m - P.N - 1 : m - 1]
        out.append(SuffixVerdict(c, win, win in P.rules))
    bad = [v for v in out if not v.reducible]
    if bad:
        raise AssertionError(f"normal suffix window {P.format(bad[0].window)} under the extra-condition")
    return out
