"""The normalised Koszul complex, reduction pairs, and the left-bound homotopy.

Everything lives on word spaces.  The graded piece K_n^(m) has the basis
``u (x) e_j`` with ``u`` running over the normal words of length m - l(n)
(descending) and ``e_j`` over the echelon basis of J_n (descending pivots);
all matrices are relative to these bases.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import linalg
from .linalg import Echelon, Subspace
from .operators import (
    ConfluenceWitness,
    Endomorphism,
    InvariantError,
    ReductionOperator,
    Representation,
    confluence,
    identity,
    join,
    join_all,
    meet,
    meet_all,
    represent,
    theta_inv,
)
from .presentation import Presentation, PreconditionError
from .words import ONE, Vector, Word, add_into


class TheoremViolation(AssertionError):
    """A computed object contradicts a structural guarantee of the construction."""


def l_N(N: int, n: int) -> int:
    if n < 0:
        raise ValueError("n must be non-negative")
    k, r = divmod(n, 2)
    return k * N + r


def j_space(P: Presentation, n: int) -> Subspace:
    """J_n, the intersection of the shifted copies of R-bar in degree l_N(n)."""
    key = ("J", n)
    if key in P.caches:
        return P.caches[key]
    if n == 0:
        J = Subspace(0, {(): {(): ONE}})
    elif n == 1:
        J = linalg.full_space(P.nletters, 1)
    else:
        d = l_N(P.N, n)
        R, N = P.relation_space, P.N
        J = linalg.tensor_shift(R, 0, d - N, P.nletters)
        for i in range(1, d - N + 1):
            if J.dim == 0:
                break
            J = linalg.intersect(J, linalg.tensor_shift(R, i, d - N - i, P.nletters))
    P.caches[key] = J
    return J


@dataclass
class GradedMap:
    """Sparse matrix of a map K_a^(m) -> K_b^(m); ``columns[i]`` maps target index -> coefficient."""

    name: str
    source: tuple[int, int]
    target: tuple[int, int]
    source_dim: int
    target_dim: int
    columns: list[dict[int, object]]

    def apply(self, coords: dict[int, object]) -> dict[int, object]:
        out: dict = {}
        for i, c in coords.items():
            add_into(out, self.columns[i], c)
        return out

    def __matmul__(self, other: GradedMap) -> GradedMap:
        if other.target_dim != self.source_dim:
            raise ValueError("dimension mismatch in composition")
        cols = [self.apply(c) for c in other.columns]
        return GradedMap(f"{self.name}*{other.name}", other.source, self.target, other.source_dim, self.target_dim, cols)

    def __add__(self, other: GradedMap) -> GradedMap:
        if (self.source_dim, self.target_dim) != (other.source_dim, other.target_dim):
            raise ValueError("dimension mismatch in sum")
        cols = []
        for a, b in zip(self.columns, other.columns):
            c = dict(a)
            add_into(c, b)
            cols.append(c)
        return GradedMap(f"{self.name}+{other.name}", self.source, self.target, self.source_dim, self.target_dim, cols)

    def is_zero(self) -> bool:
        return not any(self.columns)

    def rank(self) -> int:
        ech = Echelon()
        for c in self.columns:
            ech.insert(c)
        return len(ech.rows)

    def dense(self) -> list[list[str]]:
        rows = [["0"] * self.source_dim for _ in range(self.target_dim)]
        for j, col in enumerate(self.columns):
            for i, c in col.items():
                rows[i][j] = str(c)
        return rows


@dataclass
class ReductionPair:
    n: int
    m: int
    F1: ReductionOperator
    F2: ReductionOperator
    witness: ConfluenceWitness


class KoszulComplex:
    """Memoized graded pieces, differentials and homotopies of the normalised complex."""

    def __init__(self, P: Presentation, k_max: int = 64):
        self.P = P
        self.N = P.N
        self.k_max = k_max
        self._bases: dict = {}
        self._maps: dict = {}
        self._pairs: dict = {}
        self._reps: dict = {}

    def l(self, n: int) -> int:
        return l_N(self.N, n)

    def J(self, n: int) -> Subspace:
        return j_space(self.P, n)

    # -- graded pieces -----------------------------------------------------------

    def basis(self, n: int, m: int) -> list[tuple[Word, int]]:
        """Basis of K_n^(m) as (normal prefix, index into J_n.basis); n = -1 is K in degree 0."""
        key = (n, m)
        if key not in self._bases:
            if n == -1:
                b = [((), 0)] if m == 0 else []
            elif m < self.l(n):
                b = []
            else:
                dim = self.J(n).dim
                b = [(u, j) for u in self.P.normal_words(m - self.l(n)) for j in range(dim)]
            self._bases[key] = b
        return self._bases[key]

    def dim(self, n: int, m: int) -> int:
        return len(self.basis(n, m))

    def flatten(self, n: int, m: int, coords: dict[int, object]) -> Vector:
        if n == -1:
            return {(): coords[0]} if coords.get(0) else {}
        basis = self.basis(n, m)
        pivots = self.J(n).pivots
        rows = self.J(n).rows
        out: Vector = {}
        for i, c in coords.items():
            u, j = basis[i]
            add_into(out, {u + w: a for w, a in rows[pivots[j]].items()}, c)
        return out

    def express(self, n: int, m: int, vec: Vector) -> dict[int, object]:
        """Coordinates of a vector of span(X^(m)) in the basis of K_n^(m).

        Raises TheoremViolation when ``vec`` does not lie in K_n^(m).
        """
        if not vec:
            return {}
        if n == -1:
            if m != 0:
                raise TheoremViolation("nonzero vector in an empty piece")
            return {0: vec[()]}
        p = m - self.l(n)
        if p < 0:
            raise TheoremViolation(f"nonzero vector in the empty piece K_{n}^({m})")
        groups: dict[Word, Vector] = {}
        for w, c in vec.items():
            groups.setdefault(w[:p], {})[w[p:]] = c
        J = self.J(n)
        index = self._prefix_index(n, m)
        out = {}
        dimJ = J.dim
        for u, s in groups.items():
            if u not in index:
                raise TheoremViolation(f"prefix {self.P.format(u)} is not a normal word")
            try:
                coords = linalg.solve_in_basis(J, s)
            except ValueError:
                raise TheoremViolation(f"suffix component after {self.P.format(u)} is not in J_{n}") from None
            base = index[u] * dimJ
            for j, c in enumerate(coords):
                if c:
                    out[base + j] = c
        return out

    def _prefix_index(self, n: int, m: int) -> dict[Word, int]:
        key = ("index", n, m)
        if key not in self._bases:
            self._bases[key] = {u: i for i, u in enumerate(self.P.normal_words(m - self.l(n)))}
        return self._bases[key]

    # -- maps ----------------------------------------------------------------------

    def differential(self, n: int, m: int) -> GradedMap:
        """d'_n : K_n^(m) -> K_{n-1}^(m); for n = 0 this is the augmentation."""
        key = ("d", n, m)
        if key in self._maps:
            return self._maps[key]
        src, tgt = self.dim(n, m), self.dim(n - 1, m)
        if n == 0:
            cols = [{0: ONE}] if m == 0 else [{} for _ in range(src)]
        else:
            p = m - self.l(n - 1)
            cols = []
            P = self.P
            for i in range(src):
                vec = self.flatten(n, m, {i: ONE})
                out: Vector = {}
                for w, c in vec.items():
                    tail = w[p:]
                    add_into(out, {u + tail: a for u, a in P.nf_word(w[:p]).items()}, c)
                cols.append(self.express(n - 1, m, out))
        g = GradedMap(f"d{n}", (n, m), (n - 1, m), src, tgt, cols)
        self._maps[key] = g
        return g

    def pair(self, n: int, m: int, *, lattice_check: bool = False) -> ReductionPair:
        key = (n, m)
        if key not in self._pairs or lattice_check:
            self._pairs[key] = reduction_pair(self.P, n, m, k_max=self.k_max, lattice_check=lattice_check)
        return self._pairs[key]

    def representation(self, n: int, m: int) -> Representation:
        key = (n, m)
        if key not in self._reps:
            pr = self.pair(n, m)
            self._reps[key] = represent(pr.F1, pr.F2, pr.witness, k_max=self.k_max)
        return self._reps[key]

    def homotopy(self, n: int, m: int) -> GradedMap:
        """h'_n : K_n^(m) -> K_{n+1}^(m); n = -1 gives h_{-1}."""
        key = ("h", n, m)
        if key in self._maps:
            return self._maps[key]
        src, tgt = self.dim(n, m), self.dim(n + 1, m)
        if n == -1:
            cols = [{0: ONE}] if m == 0 else []
        elif tgt == 0:
            cols = [{} for _ in range(src)]
        else:
            g1 = self.representation(n, m).gamma1
            cols = []
            for i in range(src):
                vec = g1.apply(self.flatten(n, m, {i: ONE}))
                cols.append(self.express(n + 1, m, vec))
        g = GradedMap(f"h{n}", (n, m), (n + 1, m), src, tgt, cols)
        self._maps[key] = g
        return g

    def homotopy_defect(self, n: int, m: int) -> GradedMap:
        """d'_{n+1} h'_n + h'_{n-1} d'_n - id on K_n^(m)."""
        a = self.differential(n + 1, m) @ self.homotopy(n, m)
        b = self.homotopy(n - 1, m) @ self.differential(n, m)
        total = a + b
        cols = []
        for i, c in enumerate(total.columns):
            c = dict(c)
            add_into(c, {i: ONE}, -ONE)
            cols.append(c)
        return GradedMap(f"defect{n}", (n, m), (n, m), total.source_dim, total.target_dim, cols)


def koszul_differential(P: Presentation, n: int, m: int) -> GradedMap:
    return _complex(P).differential(n, m)


def left_bound(P: Presentation, n: int, m: int) -> GradedMap:
    return _complex(P).homotopy(n, m)


def _complex(P: Presentation, k_max: int = 64) -> KoszulComplex:
    C = P.caches.get("complex")
    if C is None:
        C = P.caches["complex"] = KoszulComplex(P, k_max)
    return C


def reduction_pair(
    P: Presentation, n: int, m: int, *, k_max: int = 64, lattice_check: bool = False
) -> ReductionPair:
    """The pair (F1^{n,m}, F2^{n,m}) with its confluence witness.

    F1 is built as prefix normalization and compared against the theta-inverse
    of I(R)_{m-l(n)} (x) V^{l(n)}.  With ``lattice_check`` both operators are
    also compared against meets/joins of the S_i^(m) where those expressions apply.
    """
    N, nl = P.N, P.nletters
    ln, ln1, ln2 = l_N(N, n), l_N(N, n + 1), l_N(N, n + 2)
    if m < ln:
        raise ValueError(f"reduction pair needs m >= l_N(n) = {ln}")
    F1 = P.prefix_normalizer(m, ln)
    ker1 = linalg.tensor_shift(P.ideal_component(m - ln), 0, ln, nl)
    if theta_inv(ker1, nl) != F1:
        raise TheoremViolation(f"prefix normalization differs from F1 at ({n},{m})")
    if m < ln1:
        F2 = identity(nl, m)
    else:
        F2 = theta_inv(linalg.tensor_shift(j_space(P, n + 1), m - ln1, 0, nl), nl)
    if lattice_check:
        if m >= ln2 and F1 != meet_all(P.s_operator(i, m) for i in range(m - ln2 + 1)):
            raise TheoremViolation(f"F1 is not the meet of the S_i at ({n},{m})")
        if n >= 1 and m >= ln1 and F2 != join_all(P.s_operator(i, m) for i in range(m - ln1, m - N + 1)):
            raise TheoremViolation(f"F2 is not the join of the S_i at ({n},{m})")
    witness = confluence(F1, F2, k_max)
    if not witness.confluent:
        raise TheoremViolation(f"reduction pair ({n},{m}) is not confluent; is the presentation side-confluent?")
    return ReductionPair(n, m, F1, F2, witness)


# -- verification ---------------------------------------------------------------


@dataclass
class Cell:
    n: int
    m: int
    dim: int
    passed: bool
    witness: dict | None = None

    def to_json(self) -> dict:
        d = {"n": self.n, "m": self.m, "dim": self.dim, "pass": self.passed}
        if self.witness is not None:
            d["witness"] = self.witness
        return d


@dataclass
class HomotopyReport:
    n_max: int
    m_max: int
    cells: list[Cell]
    confluence: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cells)

    @property
    def first_failure(self) -> Cell | None:
        return next((c for c in self.cells if not c.passed), None)

    def grid(self) -> str:
        lines = ["n\\m " + " ".join(f"{m:>4}" for m in range(self.m_max + 1))]
        verdict = {(c.n, c.m): ("pass" if c.passed else "FAIL") for c in self.cells}
        for n in range(self.n_max + 1):
            row = [f"{verdict.get((n, m), '.'):>4}" for m in range(self.m_max + 1)]
            lines.append(f"{n:>3} " + " ".join(row))
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "n_max": self.n_max,
            "m_max": self.m_max,
            "pass": self.passed,
            "confluence": self.confluence,
            "cells": [c.to_json() for c in self.cells],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def _terms(P: Presentation, vec: Vector) -> list[list[str]]:
    return [[str(c), P.format(w)] for w, c in sorted(vec.items(), reverse=True)]


def default_n_max(P: Presentation, m_max: int) -> int:
    """Smallest n with J_n = 0, capped at the largest n with l_N(n) <= m_max."""
    n = 0
    while l_N(P.N, n + 1) <= m_max:
        if j_space(P, n).dim == 0:
            return n
        n += 1
    return n


def verify_homotopy(
    P: Presentation,
    n_max: int | None = None,
    m_max: int | None = None,
    *,
    jobs: int = 1,
    k_max: int = 64,
) -> HomotopyReport:
    """Check d'h' + h'd' = id exactly on every K_n^(m) with n <= n_max, l_N(n) <= m <= m_max."""
    t0 = time.perf_counter()
    report = P.side_confluence(k_max)
    if not report.side_confluent:
        raise PreconditionError("presentation is not side-confluent")
    if m_max is None:
        m_max = 2 * P.N + 3
    if n_max is None:
        n_max = default_n_max(P, m_max)
    C = _complex(P, k_max)
    cells = [(n, m) for n in range(n_max + 1) for m in range(l_N(P.N, n), m_max + 1)]

    # shared caches first, single-threaded; afterwards workers only read them
    for m in range(m_max + 1):
        P.ideal_component(m)
        for n in range(-1, n_max + 2):
            C.basis(n, m)
            if n >= 0 and m >= C.l(n):
                C._prefix_index(n, m)
                P.prefix_normalizer(m, C.l(n))
                j_space(P, n + 1)
    needed = sorted({(n, m) for n, m in cells} | {(n - 1, m) for n, m in cells if n >= 1})

    def build(nm):
        n, m = nm
        pr = reduction_pair(P, n, m, k_max=k_max)
        rep = represent(pr.F1, pr.F2, pr.witness, k_max=k_max)
        return nm, pr, rep

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            built = list(ex.map(build, needed))
    else:
        built = [build(nm) for nm in needed]
    for nm, pr, rep in built:
        C._pairs[nm] = pr
        C._reps[nm] = rep

    out = []
    for n, m in cells:
        defect = C.homotopy_defect(n, m)
        bad = next((i for i, c in enumerate(defect.columns) if c), None)
        witness = None
        if bad is not None:
            src = C.flatten(n, m, {bad: ONE})
            err = C.flatten(n, m, defect.columns[bad])
            witness = {"vector": _terms(P, src), "defect": _terms(P, err)}
        out.append(Cell(n, m, C.dim(n, m), bad is None, witness))
    conf = {
        "side_confluent": report.side_confluent,
        "witnesses": {str(d): w.k for d, w in report.witnesses.items()},
        "extra_condition": P.extra_condition(),
    }
    return HomotopyReport(n_max, m_max, out, conf, time.perf_counter() - t0)


def homology_dims(P: Presentation, n: int, m: int) -> tuple[int, int]:
    """(dim ker d'_n, dim im d'_{n+1}) on K_n^(m)."""
    C = _complex(P)
    d = C.differential(n, m)
    ker = d.source_dim - d.rank()
    im = C.differential(n + 1, m).rank() if C.dim(n + 1, m) else 0
    return ker, im


# -- reduction relations and lattice identities -----------------------------------


@dataclass
class RelationCheck:
    n: int
    m: int
    holds: bool
    prop: bool | None = None  # F1^{n} meet (F1^{n-1} join F2^{n-1}) == F1^{n} meet F2^{n}
    commute: bool | None = None  # F1^{n} commutes with F1^{n-1} join F2^{n-1}


def reduction_relation_check(P: Presentation, n: int, m: int, k_max: int = 64) -> RelationCheck:
    """(r_{n,m}): F1 meet F2 at n and F1 join F2 at n-1 agree on K_n^(m)."""
    if n < 1:
        raise ValueError("reduction relations are indexed by n >= 1")
    C = _complex(P, k_max)
    cur, prev = C.pair(n, m), C.pair(n - 1, m)
    lower = meet(cur.F1, cur.F2)
    upper = join(prev.F1, prev.F2)
    holds = all(
        lower.apply(v) == upper.apply(v) for v in (C.flatten(n, m, {i: ONE}) for i in range(C.dim(n, m)))
    )
    prop = meet(cur.F1, upper) == lower if m >= C.l(n + 1) else None
    return RelationCheck(n, m, holds, prop, cur.F1.commutes_with(upper))


@dataclass
class LatticeVerdict:
    name: str
    params: dict
    holds: bool


def extra_condition_lattice_checks(P: Presentation, m: int, k_max: int = 64) -> list[LatticeVerdict]:
    """The lattice identities behind the extra-condition argument, in degree m."""
    N = P.N
    S = lambda i: P.s_operator(i, m)  # noqa: E731
    L = lambda n: l_N(N, n)  # noqa: E731
    out = []
    if m >= N + 2:
        for k in range(2, N):
            for r in range(0, m - N - k + 1):
                lhs = join(S(r), S(r + k))
                out.append(LatticeVerdict("join-chain", {"r": r, "k": k}, lhs == join_all(S(i) for i in range(r, r + k + 1))))
                lhs = join(meet_all(S(i) for i in range(r, r + k)), S(r + k))
                out.append(LatticeVerdict("meet-then-join", {"r": r, "k": k}, lhs == join(S(r + k - 1), S(r + k))))
    C = _complex(P, k_max)
    n = 1
    while L(n + 1) <= m:
        if n >= 2 and m < L(n + 2):
            lhs = join(meet_all(S(i) for i in range(m - L(n + 1) + 1)), S(m - L(n)))
            rhs = join_all(S(i) for i in range(m - L(n + 1), m - L(n) + 1))
            out.append(LatticeVerdict("prefix-meet-join", {"n": n}, lhs == rhs))
        if n >= 2 and m >= L(n + 2):
            T = meet_all(S(i) for i in range(m - L(n + 2) + 1, m - L(n + 1) + 1))
            out.append(LatticeVerdict("T-join-F2", {"n": n}, join(T, C.pair(n - 1, m).F2) == C.pair(n, m).F2))
        cur, prev = C.pair(n, m), C.pair(n - 1, m)
        lhs = meet(cur.F1, join(prev.F1, prev.F2))
        out.append(LatticeVerdict("pair-meet", {"n": n}, lhs == meet(cur.F1, cur.F2)))
        n += 1
    return out


def flatten_element(P: Presentation, prefix: Word, j_vec: Vector) -> Vector:
    """prefix (x) j as a vector of span(X^(m))."""
    return {prefix + w: c for w, c in j_vec.items()}


__all__ = [
    "GradedMap",
    "HomotopyReport",
    "KoszulComplex",
    "ReductionPair",
    "RelationCheck",
    "TheoremViolation",
    "default_n_max",
    "extra_condition_lattice_checks",
    "homology_dims",
    "j_space",
    "koszul_differential",
    "l_N",
    "left_bound",
    "reduction_pair",
    "reduction_relation_check",
    "verify_homotopy",
]
