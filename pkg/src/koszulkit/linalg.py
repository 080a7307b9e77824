"""Exact subspaces of span(X^(m)) kept in reduced echelon form.

Pivots are the GREATEST word of each basis vector.  Reducedness means no pivot
word occurs in another basis vector, which is what makes :func:`reduce` a single
pass and lets the reduction operator with a given kernel be read straight off
the basis (see ``operators.theta_inv``).
"""

from __future__ import annotations

from collections import defaultdict
from typing import Iterable, Mapping

from .words import ONE, HomogPoly, Vector, Word, add_into, all_words

_HI, _LO = 1, 0  # tags for the doubled coordinates used in kernel computations


class Echelon:
    """Incremental sparse reduced row echelon form (pivot = max key)."""

    __slots__ = ("rows", "_occ")

    def __init__(self, rows: Mapping | None = None):
        self.rows: dict = {}
        self._occ: defaultdict = defaultdict(set)
        if rows:
            for p, r in rows.items():
                r = dict(r)
                self.rows[p] = r
                for w in r:
                    if w != p:
                        self._occ[w].add(p)

    def reduce(self, vec: Mapping) -> dict:
        v = dict(vec)
        rows = self.rows
        for w in [w for w in v if w in rows]:
            c = v.get(w)
            if c:
                add_into(v, rows[w], -c)
        return v

    def insert(self, vec: Mapping) -> bool:
        r = self.reduce(vec)
        if not r:
            return False
        p = max(r)
        c = r[p]
        if c != 1:
            inv = ONE / c
            r = {w: a * inv for w, a in r.items()}
        occ = self._occ
        for q in occ.pop(p, ()):
            row = self.rows[q]
            add_into(row, r, -row[p])
            for w in r:
                if w == p:
                    continue
                if w in row:
                    occ[w].add(q)
                else:
                    occ[w].discard(q)
        self.rows[p] = r
        for w in r:
            if w != p:
                occ[w].add(p)
        return True


class Subspace:
    """A subspace of span(X^(m)) with its canonical reduced echelon basis."""

    __slots__ = ("degree", "_rows")

    def __init__(self, degree: int, rows: Mapping[Word, Vector]):
        # rows must already be reduced echelon; use span() otherwise
        self.degree = degree
        self._rows = dict(rows)

    @property
    def dim(self) -> int:
        return len(self._rows)

    @property
    def pivots(self) -> list[Word]:
        return sorted(self._rows, reverse=True)

    @property
    def basis(self) -> list[HomogPoly]:
        return [HomogPoly(self._rows[p], self.degree) for p in self.pivots]

    @property
    def rows(self) -> dict[Word, Vector]:
        """Pivot -> basis vector; treat as read-only."""
        return self._rows

    def echelon(self) -> Echelon:
        return Echelon(self._rows)

    def reduce(self, v: Mapping) -> Vector:
        """Remainder of ``v`` modulo the subspace (contains no pivot word)."""
        rows = self._rows
        out = dict(v)
        for w in [w for w in out if w in rows]:
            c = out.get(w)
            if c:
                add_into(out, rows[w], -c)
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, Subspace) and self.degree == other.degree and self._rows == other._rows

    def __hash__(self) -> int:
        return hash((self.degree, tuple(sorted(self._rows))))

    def __repr__(self) -> str:
        return f"Subspace(degree={self.degree}, dim={self.dim})"


def _vec(v, degree: int | None) -> tuple[Vector, int | None]:
    if isinstance(v, HomogPoly):
        d = v.degree
        vec = v.vector()
    else:
        vec = dict(v)
        d = len(next(iter(vec))) if vec else degree
    if degree is not None and d is not None and d != degree:
        raise ValueError(f"mixed degrees: {d} != {degree}")
    return vec, d if d is not None else degree


def span(vectors: Iterable, degree: int | None = None) -> Subspace:
    ech = Echelon()
    for v in vectors:
        vec, degree = _vec(v, degree)
        ech.insert(vec)
    if degree is None:
        raise ValueError("degree required for an empty span")
    return Subspace(degree, ech.rows)


def zero_space(degree: int) -> Subspace:
    return Subspace(degree, {})


def full_space(nletters: int, degree: int) -> Subspace:
    return Subspace(degree, {w: {w: ONE} for w in all_words(nletters, degree)})


def _same_degree(U: Subspace, W: Subspace) -> None:
    if U.degree != W.degree:
        raise ValueError(f"degree mismatch: {U.degree} != {W.degree}")


def sum_spaces(U: Subspace, W: Subspace) -> Subspace:
    _same_degree(U, W)
    if U.dim < W.dim:
        U, W = W, U
    ech = U.echelon()
    for r in W._rows.values():
        ech.insert(r)
    return Subspace(U.degree, ech.rows)


def _kernel_rows(pairs: Iterable[tuple[Mapping, Mapping]]) -> list[Vector]:
    """Given pairs (image, source) return a basis of the sources of zero images.

    Rows are (image | source) with image coordinates ranked above source
    coordinates, so after elimination the rows pivoting in the source half have
    an identically zero image half.
    """
    ech = Echelon()
    for image, source in pairs:
        row = {(_HI, w): c for w, c in image.items()}
        row.update({(_LO, w): c for w, c in source.items()})
        ech.insert(row)
    return [{w: c for (_, w), c in r.items()} for p, r in ech.rows.items() if p[0] == _LO]


def intersect(U: Subspace, W: Subspace) -> Subspace:
    _same_degree(U, W)
    if U.dim > W.dim:
        U, W = W, U
    if U.dim == 0:
        return zero_space(U.degree)
    pairs = ((W.reduce(r), r) for r in U._rows.values())
    return span(_kernel_rows(pairs), U.degree)


def kernel(images: Mapping[Word, Mapping], degree: int) -> Subspace:
    """Kernel of the linear map sending each word ``w`` to ``images[w]``.

    ``images`` must list every basis word of the source (zero images included).
    """
    return span(_kernel_rows((img, {w: ONE}) for w, img in images.items()), degree)


def contains(U: Subspace, v) -> bool:
    vec, _ = _vec(v, U.degree)
    return not U.reduce(vec)


def includes(U: Subspace, W: Subspace) -> bool:
    """True iff W is a subspace of U."""
    _same_degree(U, W)
    return all(not U.reduce(r) for r in W._rows.values())


def solve_in_basis(U: Subspace, v) -> list:
    """Coordinates of ``v`` in ``U.basis`` (descending pivot order)."""
    vec, _ = _vec(v, U.degree)
    if U.reduce(vec):
        raise ValueError("not in subspace")
    return [vec.get(p, 0) * ONE for p in U.pivots]


def tensor_shift(U: Subspace, left: int, right: int, nletters: int) -> Subspace:
    """V^{left} (x) U (x) V^{right}; the shifted basis is already reduced echelon."""
    lefts = list(all_words(nletters, left))
    rights = list(all_words(nletters, right))
    rows = {}
    for p, r in U._rows.items():
        for a in lefts:
            for b in rights:
                rows[a + p + b] = {a + w + b: c for w, c in r.items()}
    return Subspace(left + U.degree + right, rows)
