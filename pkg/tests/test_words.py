import pytest
from hypothesis import given
from hypothesis import strategies as st

from koszulkit.words import (
    Alphabet,
    HomogPoly,
    ParseError,
    Q,
    compare_words,
    concat,
    leading,
    parse_expression,
    split,
    tensor_expand,
)

X2 = Alphabet(("x1", "x2"))
X3 = Alphabet(("x1", "x2", "x3"))

F1 = "x2*x1*x1 - 2*x1*x2*x1 + x1*x1*x2"
F2 = "x2*x2*x1 - 2*x2*x1*x2 + x1*x2*x2"


def p(text, alphabet=X2):
    return parse_expression(text, alphabet)


def test_compare_examples():
    assert compare_words(X2.word("x2*x1*x1"), X2.word("x1*x2*x2")) == 1
    w = X2.word("x2*x1")
    assert compare_words(w, w) == 0
    assert compare_words(X3.word("x3*x1"), X3.word("x2*x3")) == 1


def test_compare_rejects_mixed_lengths():
    with pytest.raises(ValueError, match="incomparable lengths"):
        compare_words((0,), (0, 1))


def test_leading_examples():
    assert leading(p(F1)) == (X2.word("x2*x1*x1"), 1)
    assert leading(p("5*x1*x2")) == (X2.word("x1*x2"), 5)
    assert leading(p(F2)) == (X2.word("x2*x2*x1"), 1)


def test_leading_of_zero_fails():
    with pytest.raises(ValueError, match="no leading term"):
        leading(HomogPoly.zero(3))


def test_split_and_tensor_expand():
    assert split(X2.word("x2*x2*x1*x1"), 1) == ((1,), (1, 0, 0))
    assert split((), 0) == ((), ())
    assert tensor_expand(p("x2"), p(F1)) == p("x2*x2*x1*x1 - 2*x2*x1*x2*x1 + x2*x1*x1*x2")


def test_terms_are_sorted_descending():
    f = p("x1*x1*x2 + x2*x1*x1 - 2*x1*x2*x1")
    assert f.words() == sorted(f.words(), reverse=True)
    assert f.format(X2) == "x2*x1*x1 - 2*x1*x2*x1 + x1*x1*x2"


def test_parse_rationals_and_cancellation():
    f = p("1/2*x1*x2 + 3/2*x1*x2 - x2*x1")
    assert f.coefficient((0, 1)) == 2
    assert f.coefficient((1, 0)) == -1
    assert p("x1*x2 - x1*x2").is_zero()


@pytest.mark.parametrize(
    "text, column",
    [("x1*x2 + ", 9), ("x1 * y", 6), ("x1*x2 # x1", 7), ("x1 x2", 4), ("x1*", 4)],
)
def test_parse_errors_report_column(text, column):
    with pytest.raises(ParseError) as info:
        p(text)
    assert info.value.column == column


def test_mixed_degree_rejected():
    with pytest.raises(ValueError):
        p("x1*x2 + x1")


words_ = st.integers(1, 3).flatmap(
    lambda n: st.integers(0, 6).flatmap(
        lambda m: st.tuples(*[st.lists(st.integers(0, n - 1), min_size=m, max_size=m).map(tuple) for _ in range(3)])
    )
)


@given(words_)
def test_compare_is_a_total_order(triple):
    a, b, c = triple
    assert compare_words(a, b) == -compare_words(b, a)
    assert (compare_words(a, b) == 0) == (a == b)
    if compare_words(a, b) <= 0 and compare_words(b, c) <= 0:
        assert compare_words(a, c) <= 0


@st.composite
def polys(draw, degree):
    terms = draw(
        st.dictionaries(
            st.lists(st.integers(0, 2), min_size=degree, max_size=degree).map(tuple),
            st.integers(-4, 4).filter(bool).map(Q),
            min_size=1,
            max_size=4,
        )
    )
    return HomogPoly(terms, degree)


@given(st.integers(0, 3).flatmap(lambda d: st.tuples(polys(d), polys(d), polys(3 - d), st.integers(-3, 3))))
def test_tensor_expand_bilinear_and_leading(data):
    u, u2, v, c = data
    assert tensor_expand(u + u2 * c, v) == tensor_expand(u, v) + tensor_expand(u2, v) * c
    uv = tensor_expand(u, v)
    assert uv.degree == u.degree + v.degree
    assert leading(uv) == (concat(u.lm, v.lm), u.lc * v.lc)
