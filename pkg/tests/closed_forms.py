"""Hand-written homotopy formulas for the shipped fixtures, for comparison with the general construction."""

from __future__ import annotations

from koszulkit import linalg
from koszulkit.koszul import KoszulComplex
from koszulkit.words import ONE, Q, Vector, parse_expression


def poly(P, text: str) -> Vector:
    return parse_expression(text, P.alphabet).vector()


def prefixed(u, vec: Vector) -> Vector:
    return {u + w: c for w, c in vec.items()}


def mismatches(C: KoszulComplex, n: int, m: int, formula) -> list[tuple]:
    """Basis elements of K_n^(m) where the computed h'_n differs from ``formula(u, j_vector)``."""
    h = C.homotopy(n, m)
    J = C.J(n)
    bad = []
    for i, (u, j) in enumerate(C.basis(n, m)):
        got = C.flatten(n + 1, m, h.columns[i])
        want = formula(u, J.rows[J.pivots[j]])
        if got != want:
            bad.append((u, J.pivots[j], got, want))
    return bad


# -- Yang-Mills over two generators ------------------------------------------------


def ym_h1(P, corrected: bool = False):
    """h1(w (x) x1) for w = w'x2x1 or w'x2x2; zero on w (x) x2.

    The stated values are S(x2x1x1) and S(x2x2x1); ``corrected`` uses f1 and f2 instead.
    """
    x1, x2 = P.alphabet.index("x1"), P.alphabet.index("x2")
    if corrected:
        vals = {(x2, x1): poly(P, "x2*x1*x1 - 2*x1*x2*x1 + x1*x1*x2"), (x2, x2): poly(P, "x2*x2*x1 - 2*x2*x1*x2 + x1*x2*x2")}
    else:
        vals = {(x2, x1): poly(P, "2*x1*x2*x1 - x1*x1*x2"), (x2, x2): poly(P, "2*x2*x1*x2 - x1*x2*x2")}

    def h(u, jvec):
        (x,) = jvec  # J_1 = V, basis vectors are single letters
        if x != (x1,) or len(u) < 2 or u[-2:] not in vals:
            return {}
        return prefixed(u[:-2], vals[u[-2:]])

    return h


def ym_h2(P):
    x2 = P.alphabet.index("x2")
    f1 = poly(P, "x2*x1*x1 - 2*x1*x2*x1 + x1*x1*x2")
    v = poly(P, "x2*x2*x1*x1 - 2*x2*x1*x2*x1 + x2*x1*x1*x2 + x1*x2*x2*x1 - 2*x1*x2*x1*x2 + x1*x1*x2*x2")

    def h(u, jvec):
        if jvec == f1 and u and u[-1] == x2:
            return prefixed(u[:-1], v)
        return {}

    return h


# -- symmetric algebra ------------------------------------------------------------------


def sym_h1(P, stated: bool = True):
    """h1(w (x) x_{i1}) = w' (x) (x_{i2}x_{i1} - x_{i1}x_{i2}) with w = w'x_{i2}.

    ``stated`` applies it when i2 < i1; otherwise when i2 > i1.
    """

    def h(u, jvec):
        ((x,),) = jvec
        if not u:
            return {}
        i2, i1 = u[-1], x
        if (i2 < i1) if stated else (i2 > i1):
            return prefixed(u[:-1], {(i2, i1): ONE, (i1, i2): -ONE})
        return {}

    return h


# -- monomial algebras with the overlap property -------------------------------------


def monomial_hn(C: KoszulComplex, n: int, m: int):
    """h_n(w (x) s) = w' (x) t when the length-l(n+1) suffix t of ws spans a word of J_{n+1}."""
    L = C.l(n + 1)
    J = C.J(n + 1)
    words = {p for p, row in J.rows.items() if len(row) == 1}

    def h(u, jvec):
        ((s, c),) = jvec.items()
        w = u + s
        if m < L:
            return {}
        t = w[m - L :]
        return {w: Q(c)} if t in words else {}

    return h


def is_monomial_space(J: linalg.Subspace) -> bool:
    return all(len(row) == 1 for row in J.rows.values())
