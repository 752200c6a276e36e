from fractions import Fraction

import pytest

from g12calc.linalg import (DEFAULT_MAX_MAGNITUDE, PolyMatrix, _Lcg,
                            invert_rational, linsolve,
                            matrix_det, matrix_rank_kernel,
                            random_rational_point, solve_sparse)
from g12calc.poly import Poly, parse_poly


def rand_const_matrix(rng, n):
    return PolyMatrix([[Fraction(rng.next_int(11) - 5) for _ in range(n)]
                       for _ in range(n)])


def test_det_diag_and_repeated_rows():
    m = PolyMatrix([[Poly.var("p"), Poly.zero()],
                    [Poly.zero(), Poly.var("q")]])
    assert matrix_det(m) == parse_poly("p*q")
    m2 = PolyMatrix([[1, 2, 3], [1, 2, 3], [0, 1, 4]])
    assert matrix_det(m2).is_zero()


def test_det_requires_square():
    with pytest.raises(ValueError):
        matrix_det(PolyMatrix.zero(2, 3))


def test_det_multiplicative_on_random_matrices():
    rng = _Lcg(99)
    for _ in range(10):
        a = rand_const_matrix(rng, 4)
        b = rand_const_matrix(rng, 4)
        lhs = matrix_det(a.matmul(b)).constant_value()
        rhs = (matrix_det(a).constant_value()
               * matrix_det(b).constant_value())
        assert lhs == rhs


def test_det_polynomial_entries_bareiss():
    t = Poly.var("t")
    m = PolyMatrix([[t, 1 + t, 2], [t ** 2, t, 1], [1, 0, t]])
    # brute-force cofactor expansion for the oracle
    def det3(e):
        return (e[0][0] * (e[1][1] * e[2][2] - e[1][2] * e[2][1])
                - e[0][1] * (e[1][0] * e[2][2] - e[1][2] * e[2][0])
                + e[0][2] * (e[1][0] * e[2][1] - e[1][1] * e[2][0]))
    assert matrix_det(m) == det3(m.entries)


def test_rank_kernel_relation_random():
    rng = _Lcg(5)
    for _ in range(10):
        m = rand_const_matrix(rng, 5)
        rank, ker = matrix_rank_kernel(m)
        assert rank + len(ker) == 5
        rows = m.constant_rows()
        for v in ker:
            assert all(sum(rows[i][j] * v[j] for j in range(5)) == 0
                       for i in range(5))
        assert (rank == 5) == (not matrix_det(m).is_zero())


def test_identity_and_zero():
    assert matrix_rank_kernel(PolyMatrix.identity(3)) == (3, [])
    rank, ker = matrix_rank_kernel(PolyMatrix.zero(2, 2))
    assert rank == 0 and len(ker) == 2


def test_linsolve_unique_and_inconsistent():
    sol = linsolve(PolyMatrix.identity(3),
                   [Fraction(1), Fraction(2), Fraction(3)])
    assert sol[0] == [Fraction(1), Fraction(2), Fraction(3)]
    assert sol[1] == []
    assert linsolve(PolyMatrix.zero(2, 2), [Fraction(1), Fraction(0)]) is None


def test_linsolve_underdetermined():
    m = PolyMatrix([[1, 1, 1]])
    part, ker = linsolve(m, [Fraction(6)])
    assert sum(part) == 6
    assert len(ker) == 2


def test_solve_sparse_matches_dense():
    rng = _Lcg(17)
    for _ in range(10):
        m = rand_const_matrix(rng, 4)
        x = [Fraction(rng.next_int(7) - 3) for _ in range(4)]
        rows_d = m.constant_rows()
        rhs = [sum(rows_d[i][j] * x[j] for j in range(4)) for i in range(4)]
        rows = []
        for i in range(4):
            row = {j: rows_d[i][j] for j in range(4) if rows_d[i][j]}
            if rhs[i]:
                row[4] = -rhs[i]
            if row:
                rows.append(row)
        part, ker = solve_sparse(rows, 4)
        # the particular solution must reproduce the right-hand side
        for i in range(4):
            assert sum(rows_d[i][j] * part[j] for j in range(4)) == rhs[i]
        rank, dense_ker = matrix_rank_kernel(m)
        assert len(ker) == len(dense_ker)


def test_solve_sparse_inconsistent():
    assert solve_sparse([{0: 1, 2: -1}, {0: 1, 2: -2}], 2) is None


def test_invert_rational():
    rng = _Lcg(31)
    m = rand_const_matrix(rng, 4)
    while matrix_det(m).is_zero():
        m = rand_const_matrix(rng, 4)
    inv = invert_rational(m.constant_rows())
    rows = m.constant_rows()
    prod = [[sum(rows[i][k] * inv[k][j] for k in range(4))
             for j in range(4)] for i in range(4)]
    assert prod == [[Fraction(1 if i == j else 0) for j in range(4)]
                    for i in range(4)]


def test_random_point_determinism_and_bounds():
    p1 = random_rational_point(["t", "u"], 7)
    p2 = random_rational_point(["t", "u"], 7)
    p3 = random_rational_point(["t", "u"], 8)
    assert p1 == p2
    assert p1 != p3
    for v in p1.values():
        assert 1 <= abs(v.numerator) <= DEFAULT_MAX_MAGNITUDE
        assert 1 <= v.denominator <= DEFAULT_MAX_MAGNITUDE


def test_random_point_respects_magnitude_config():
    p = random_rational_point(["t"], 3, max_magnitude=5)
    assert abs(p["t"].numerator) <= 5 and p["t"].denominator <= 5
