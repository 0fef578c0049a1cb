from fractions import Fraction

import pytest
import sympy
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from pencillab.errors import MalformedPencil, ParseError
from pencillab.exact import (
    Signature,
    SymMat,
    det,
    format_rat,
    inverse,
    kernel,
    matmul,
    rank,
    rat,
    signature_of,
)
from pencillab.poly import (
    BinaryForm,
    NotSquarefree,
    binary_det,
    count_real_roots,
    is_squarefree,
    isolate_real_roots,
)

small = st.integers(-6, 6)


def sym_matrices(n):
    return st.lists(small, min_size=n * (n + 1) // 2, max_size=n * (n + 1) // 2).map(lambda v: _fill(n, v))


def _fill(n, values):
    m = [[0] * n for _ in range(n)]
    it = iter(values)
    for i in range(n):
        for j in range(i, n):
            m[i][j] = m[j][i] = next(it)
    return m


def test_rat_parsing():
    assert rat("3/6") == mpq(1, 2)
    assert rat(" -4 ") == -4
    assert rat(Fraction(2, 3)) == mpq(2, 3)
    assert format_rat(mpq(-3, 9)) == "-1/3"
    assert format_rat(mpq(8, 4)) == "2"
    for bad in ("1/0", "x", "1.5", True, 1.5, None):
        with pytest.raises(ParseError):
            rat(bad)


def test_symmat_rejects_asymmetric():
    with pytest.raises(MalformedPencil):
        SymMat(((1, 2), (3, 4)))
    with pytest.raises(MalformedPencil):
        SymMat(((1, 2),))


def test_signature_known_cases():
    assert signature_of([[0, 1], [1, 0]]) == Signature(1, 1, 0)
    assert signature_of([[0, 0], [0, 0]]) == Signature(0, 0, 2)
    assert signature_of(SymMat.diag([3, -1, 0, 2])) == Signature(2, 1, 1)
    assert signature_of([[1, 2], [2, 4]]) == Signature(1, 0, 1)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5).flatmap(sym_matrices))
def test_signature_matches_sympy_eigenvalues(m):
    sm = sympy.Matrix(m)
    n = sm.shape[0]
    charpoly = sm.charpoly()
    roots = sympy.Poly(charpoly.as_expr(), charpoly.gen).real_roots()
    pos = sum(1 for x in roots if x > 0)
    neg = sum(1 for x in roots if x < 0)
    assert signature_of(m) == Signature(pos, neg, n - pos - neg)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5).flatmap(lambda n: st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)))
def test_det_rank_kernel_match_sympy(m):
    sm = sympy.Matrix(m)
    assert det(m) == int(sm.det())
    assert rank(m) == sm.rank()
    ker = kernel(m)
    assert len(ker) == len(m) - sm.rank()
    for v in ker:
        assert all(x == 0 for x in (sum(a * b for a, b in zip(row, v)) for row in m))
    if det(m) != 0:
        prod = matmul(m, inverse(m))
        assert prod == [[1 if i == j else 0 for j in range(len(m))] for i in range(len(m))]


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.tuples(sym_matrices(n), sym_matrices(n))))
def test_binary_det_matches_sympy(pair):
    a, b = pair
    s, t = sympy.symbols("s t")
    expected = sympy.Poly((s * sympy.Matrix(a) + t * sympy.Matrix(b)).det(), s, t)
    form = binary_det(SymMat(tuple(map(tuple, a))), SymMat(tuple(map(tuple, b))))
    d = form.degree
    for i, c in enumerate(form.coeffs):
        assert c == expected.coeff_monomial(s ** (d - i) * t**i)


def test_binary_form_factors_and_squarefree():
    f = BinaryForm.from_linear_factors([(1, -1), (1, 2), (0, 1)])  # roots 1, -2 and [1:0]
    assert is_squarefree(f)
    iso = isolate_real_roots(f)
    assert iso.count == 3 and iso.at_infinity
    g = BinaryForm.from_linear_factors([(1, -1), (1, -1), (1, 3)])
    assert not is_squarefree(g)
    with pytest.raises(NotSquarefree):
        isolate_real_roots(g)


def _as_fraction(pq):
    return Fraction(*pq)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.integers(-9, 9), st.integers(1, 5)), min_size=1, max_size=6, unique_by=_as_fraction))
def test_root_isolation_separates_rational_roots(roots):
    # (q s - p t) vanishes at [p:q] when written as f(s, 1) with s = p/q
    f = BinaryForm.from_linear_factors([(q, -p) for p, q in roots])
    iso = isolate_real_roots(f)
    assert iso.count == len(roots) == count_real_roots(f.dehomogenize())
    values = sorted(Fraction(p, q) for p, q in roots)
    for (lo, hi), x in zip(iso.intervals, values):
        assert Fraction(int(lo.numerator), int(lo.denominator)) < x < Fraction(int(hi.numerator), int(hi.denominator))
    narrow = iso.refine(mpq(1, 1000))
    assert all(hi - lo <= mpq(1, 1000) for lo, hi in narrow.intervals)


def test_isolation_matches_sympy_on_irrational_roots():
    # (s^2 - 2 t^2)(s^2 + t^2)(s - 3 t)
    s = sympy.symbols("s")
    poly = sympy.Poly((s**2 - 2) * (s**2 + 1) * (s - 3), s)
    coeffs = [int(c) for c in reversed(poly.all_coeffs())]  # ascending in s
    form = BinaryForm(len(coeffs) - 1, tuple(reversed(coeffs)))
    iso = isolate_real_roots(form)
    assert iso.count == len(poly.real_roots()) == 3
