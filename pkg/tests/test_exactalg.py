import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from logsteiner.exactalg import (
    GF,
    QQ,
    FieldElem,
    FieldMismatchError,
    FieldSpecError,
    Mat,
    cokernel_projection,
    det,
    kernel_basis,
    parse_field,
    random_matrix,
    rank,
    rref,
)
from oracles import leibniz_det, minor_rank, vandermonde_det

F31 = GF(31)


def test_field_parsing():
    assert parse_field("Q") is QQ
    assert parse_field("p=31") is F31
    assert parse_field("GF(31)") is F31
    assert F31.descriptor == "p=31"
    with pytest.raises(FieldSpecError):
        parse_field("p=32")


def test_elements_normalized():
    a = FieldElem(QQ, Fraction(4, -6))
    assert a.value == Fraction(-2, 3) and a.value.denominator > 0
    b = FieldElem(F31, -1)
    assert b.value == 30
    assert str(FieldElem(QQ, Fraction(1, 3))) == "1/3"


def test_mixed_fields_rejected():
    with pytest.raises(FieldMismatchError):
        FieldElem(F31, 1) + FieldElem(GF(7), 1)


@given(st.fractions(), st.fractions())
def test_rational_arithmetic_exact(a, b):
    x, y = FieldElem(QQ, a), FieldElem(QQ, b)
    assert ((x + y) - y).value == a
    if b:
        assert ((x / y) * y).value == a


@given(st.integers(), st.integers(min_value=1))
def test_prime_arithmetic_exact(a, b):
    x, y = FieldElem(F31, a), FieldElem(F31, b)
    assert 0 <= x.value < 31
    assert (x + y) - y == x
    if b % 31:
        assert (x / y) * y == x


def test_rref_trivial_cases():
    R, piv = rref(Mat.identity(QQ, 2))
    assert R == Mat.identity(QQ, 2) and piv == [0, 1]
    R, piv = rref(Mat.from_rows(QQ, [[1, 2], [2, 4]]))
    assert R == Mat.from_rows(QQ, [[1, 2], [0, 0]]) and piv == [0]


def test_rank_trivial_cases():
    assert rank(Mat.zeros(QQ, 3, 3)) == 0
    assert rank(Mat.from_rows(QQ, [[1, 2], [2, 4]])) == 1


def test_rref_pivots_against_minor_oracle():
    rng = random.Random(5)
    for _ in range(10):
        # rank <= 3 by construction, so 3x3 minors decide the rank
        A = random_matrix(F31, 5, 3, rng, 30)
        B = random_matrix(F31, 3, 7, rng, 30)
        M = A @ B
        rows = [[int(x) for x in M.row(i)] for i in range(5)]
        _, piv = rref(M)
        assert piv == sorted(set(piv))
        assert len(piv) == minor_rank(rows, 31)
    full = random_matrix(F31, 5, 7, rng, 30)
    assert rank(full) == minor_rank([[int(x) for x in full.row(i)] for i in range(5)], 31)


def test_rref_is_reduced():
    rng = random.Random(9)
    M = random_matrix(QQ, 4, 6, rng)
    R, piv = rref(M)
    for i, c in enumerate(piv):
        assert [R[k, c] for k in range(R.rows)] == [1 if k == i else 0 for k in range(R.rows)]


def test_vandermonde_rank():
    xs = [2, 5, 11, 17]
    V = Mat.from_rows(F31, [[x ** j for j in range(4)] for x in xs])
    assert vandermonde_det(xs, 31) != 0
    assert det(V) == vandermonde_det(xs, 31)
    assert rank(V) == 4


def test_det_against_leibniz():
    rng = random.Random(13)
    for n in (1, 2, 3, 4):
        rows = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(n)]
        assert det(Mat.from_rows(QQ, rows)) == leibniz_det(rows)
        assert det(Mat.from_rows(F31, rows)) == leibniz_det(rows, 31)


def test_kernel_examples():
    K = kernel_basis(Mat.from_rows(QQ, [[1, 1]]))
    assert K.cols == 1 and K[0, 0] == -K[1, 0] != 0
    assert kernel_basis(Mat.identity(QQ, 3)).cols == 0


def test_kernel_random_rational():
    rng = random.Random(1)
    M = random_matrix(QQ, 4, 6, rng)
    K = kernel_basis(M)
    assert K.cols == 6 - rank(M)
    assert (M @ K).is_zero()


def test_cokernel_examples():
    pi, sel = cokernel_projection(Mat.from_rows(QQ, [[1], [0]]))
    assert pi == Mat.from_rows(QQ, [[0, 1]]) and sel == [1]
    pi, sel = cokernel_projection(Mat.from_rows(QQ, [[1, 2], [3, 4]]))
    assert pi.rows == 0 and sel == []


def test_cokernel_random_rational():
    rng = random.Random(2)
    A = random_matrix(QQ, 6, 2, rng)
    M = A.hstack(Mat.from_columns(QQ, [[a + b for a, b in zip(A.col(0), A.col(1))]]))
    pi, sel = cokernel_projection(M)
    assert (pi @ M).is_zero()
    assert pi.rows == 6 - rank(M) == len(sel)
    R, piv = rref(M.T)
    assert rank(pi.vstack(R.submatrix(range(len(piv)), range(6)))) == 6
    # selected unit vectors map to the identity on the cokernel
    assert pi.submatrix(range(pi.rows), sel) == Mat.identity(QQ, pi.rows)


def test_cokernel_deterministic():
    rng = random.Random(4)
    M = random_matrix(F31, 7, 3, rng)
    assert cokernel_projection(M) == cokernel_projection(Mat.from_rows(F31, M.to_rows()))


def test_row_permutation_exactness():
    rng = random.Random(100)
    for _ in range(100):
        r, c = rng.randint(1, 6), rng.randint(1, 6)
        M = random_matrix(QQ, r, c, rng, 5)
        if rng.random() < 0.5 and r > 1:
            rows = M.to_rows()
            rows[-1] = [x + y for x, y in zip(rows[0], rows[-1])]
            M = Mat.from_rows(QQ, rows)
        perm = list(range(r))
        rng.shuffle(perm)
        Mp = M.submatrix(perm, range(c))
        assert rank(M) == rank(Mp)
        assert kernel_basis(M).cols == kernel_basis(Mp).cols


def test_bad_prime_agreement():
    rng = random.Random(1009)
    F = GF(1009)
    equal = 0
    for _ in range(200):
        r, c = rng.randint(2, 6), rng.randint(2, 6)
        rows = [[rng.randint(-5, 5) for _ in range(c)] for _ in range(r)]
        rq, rp = rank(Mat.from_rows(QQ, rows)), rank(Mat.from_rows(F, rows))
        assert rq >= rp
        equal += rq == rp
    assert equal >= 0.95 * 200


small = st.integers(min_value=-4, max_value=4)


@st.composite
def int_matrices(draw, max_side=5):
    r = draw(st.integers(1, max_side))
    c = draw(st.integers(1, max_side))
    return draw(st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r))


@settings(max_examples=60, deadline=None)
@given(int_matrices())
def test_rank_transpose_and_duality(rows):
    for F in (QQ, F31):
        M = Mat.from_rows(F, rows)
        k = rank(M)
        assert k == rank(M.T)
        assert k + kernel_basis(M).cols == M.cols
        pi, _ = cokernel_projection(M)
        assert k + pi.rows == M.rows


@settings(max_examples=40, deadline=None)
@given(int_matrices(max_side=4))
def test_inverse_roundtrip(rows):
    n = min(len(rows), len(rows[0]))
    M = Mat.from_rows(QQ, [r[:n] for r in rows[:n]])
    if M.is_invertible():
        assert M @ M.inverse() == Mat.identity(QQ, n)
    else:
        assert det(M) == 0


def test_string_roundtrip():
    M = Mat.from_rows(QQ, [[Fraction(1, 3), -2], [0, Fraction(-7, 5)]])
    assert Mat.from_strings(QQ, M.to_strings()) == M
    assert M.to_strings()[1][1] == "-7/5"
