from fractions import Fraction

import pytest

from g12calc import binforms as bf
from g12calc.binforms import rep_matrices
from g12calc.linalg import PolyMatrix, matrix_rank_kernel, random_rational_point
from g12calc.poly import Poly
from g12calc.spencer import (LinearLieAlgebra, PhiCoords, TorsionCoords,
                             contact_restriction_identity, decode_torsion,
                             encode_torsion,
                             g12_algebra, g12_spencer_report, gk1_algebra,
                             gl2_algebra, intrinsic_adjustment,
                             prolongation_and_h02, so3_algebra,
                             spencer_coords_match, spencer_equivariance_ok,
                             spencer_in_coords,
                             splitting_correction_vanishes,
                             torsion_criterion_s16_pair,
                             torsion_criterion_solve, torsion_encode_rank)

TORSION_OFFSETS = {"s12": (0, 6), "s14": (6, 16), "s16": (16, 30),
                   "s10": (30, 32), "s12p": (32, 38), "s14p": (38, 48),
                   "s30": (48, 52), "s32": (52, 64), "s34": (64, 84),
                   "s12pp": (84, 90)}


def test_closure_check_rejects_non_algebra():
    LinearLieAlgebra("e-line", 2, [[[0, 1], [0, 0]]])  # abelian, fine
    with pytest.raises(ValueError):
        # span{e, f} is not closed: [e, f] = h lies outside
        LinearLieAlgebra("broken", 2,
                         [[[0, 1], [0, 0]], [[0, 0], [1, 0]]])


def test_so3_spencer_isomorphism():
    rep = prolongation_and_h02(so3_algebra())
    assert rep["rank"] == 9
    assert rep["dim_g1"] == 0 and rep["dim_h02"] == 0


def test_gl2_prolongation_matches_symmetric_tensors():
    rep = prolongation_and_h02(gl2_algebra())
    assert rep["dim_g1"] == 6  # dim S^2 V* (x) V for dim V = 2


def test_spencer_dimension_bookkeeping_all_algebras():
    for g in (so3_algebra(), gl2_algebra(), g12_algebra(), gk1_algebra(2)):
        rep = prolongation_and_h02(g)
        assert rep["dim_domain"] == rep["dim_g1"] + rep["rank"]
        assert rep["rank"] + rep["dim_h02"] == rep["dim_target"]


def test_g12_report_matches_expected_structure():
    rep = g12_spencer_report()
    assert rep["dim_domain"] == 42
    assert rep["dim_target"] == 90
    assert rep["dim_g1"] == 0
    assert rep["dim_h02"] == 48
    assert rep["domain_isotypic"] == {(1, 0): 1, (1, 2): 3, (1, 4): 1,
                                      (3, 2): 1}
    assert rep["target_isotypic"] == {(1, 0): 1, (1, 2): 3, (1, 4): 2,
                                      (1, 6): 1, (3, 0): 1, (3, 2): 1,
                                      (3, 4): 1}
    assert rep["cokernel_isotypic"] == {(1, 4): 1, (1, 6): 1, (3, 0): 1,
                                        (3, 4): 1}


def test_restricted_algebra_prolongation_vanishes():
    for k in (2, 3):
        rep = prolongation_and_h02(gk1_algebra(k))
        assert rep["dim_g1"] == 0


def test_restricted_algebra_isotypic_report():
    from g12calc.spencer import gk1_spencer_report
    rep = gk1_spencer_report(2)
    assert rep["dim_domain"] == 16 and rep["dim_target"] == 24
    assert rep["dim_h02"] == 8
    # the torsion space of the restricted structure is irreducible of
    # highest weight 7
    assert rep["cokernel_isotypic"] == {(7, 0): 1}


def test_module_family_prolongation_vanishes_for_k3():
    from g12calc.spencer import g1k_algebra
    rep = prolongation_and_h02(g1k_algebra(3))
    assert rep["dim_g1"] == 0
    assert rep["dim_domain"] == 56 and rep["dim_target"] == 224


def test_spencer_equivariance_exact():
    assert spencer_equivariance_ok()


def test_codec_bijection_and_roundtrip():
    assert torsion_encode_rank() == 90
    vec = [Fraction(3 * k - 40, 7) for k in range(90)]
    s = TorsionCoords.from_vector(vec)
    back = decode_torsion(encode_torsion(s))
    assert [p.constant_value() for p in back.vector()] == vec


def test_decode_encode_on_basis_coordinates():
    for k in (0, 17, 47, 89):
        vec = [Fraction(0)] * 90
        vec[k] = Fraction(1)
        back = decode_torsion(encode_torsion(TorsionCoords.from_vector(vec)))
        assert [p.constant_value() for p in back.vector()] == vec


def test_coordinate_formula_fully_symbolic():
    assert spencer_coords_match()


def test_coordinate_formula_zero_map():
    out = spencer_in_coords(PhiCoords.zero())
    assert all(p.is_zero() for p in out.vector())


def test_coordinate_formula_single_block():
    # only the r32 block: only s32 responds, with factor -1/4
    vec = [Fraction(0)] * 42
    vec[6] = Fraction(1)   # r32 block starts after r12 (6 coords)
    phi = PhiCoords.from_vector(vec)
    out = spencer_in_coords(phi)
    assert (out.s32 - Fraction(-1, 4) * phi.r32).is_zero()
    for name in ("s12", "s14", "s16", "s10", "s12p", "s14p", "s30", "s34",
                 "s12pp"):
        assert getattr(out, name).is_zero()


def test_coordinate_formula_mutation_fails():
    assert not spencer_coords_match({"s32_r32": Fraction(1, 4)})
    assert not spencer_coords_match({"s14_r14": Fraction(1, 2)})


def test_torsion_criterion_solution_space():
    rep = torsion_criterion_solve()
    assert rep["solution_dim"] == 30
    assert rep["matches_closed_form"]
    assert rep["free_s30_dim"] == 4


def test_torsion_criterion_invariant_under_action():
    # the constraint set is a submodule: the generator actions map the
    # solution space into itself
    rep = torsion_criterion_solve()
    kernel = rep["kernel"]
    blocks = [("s12", 1, 2), ("s14", 1, 4), ("s16", 1, 6), ("s10", 1, 0),
              ("s12p", 1, 2), ("s14p", 1, 4), ("s30", 3, 0), ("s32", 3, 2),
              ("s34", 3, 4), ("s12pp", 1, 2)]
    kmat = PolyMatrix(kernel)
    base_rank = matrix_rank_kernel(kmat.transpose())[0]
    for gen_idx in range(6):
        acted = []
        for v in kernel:
            out = [Fraction(0)] * 90
            for name, n, m in blocks:
                a, bnd = TORSION_OFFSETS[name]
                mat = rep_matrices(n, m)[gen_idx]
                for i in range(bnd - a):
                    acc = Fraction(0)
                    for j in range(bnd - a):
                        if mat[i][j]:
                            acc += mat[i][j] * v[a + j]
                    out[a + i] = acc
            acted.append(out)
        both = PolyMatrix(kernel + acted)
        assert matrix_rank_kernel(both.transpose())[0] == base_rank


def test_s16_forced_by_single_pair():
    rep = torsion_criterion_s16_pair()
    assert rep["only_s16_block"] and rep["s16_forced_zero"]


def test_torsion_criterion_numeric_divisor_cross_check():
    # independent route: instead of symbolic divisor coefficients, impose
    # the conditions for finitely many concrete divisors; with enough of
    # them the joint solution space equals the symbolic one
    from itertools import combinations
    from g12calc.poly import Poly
    from g12calc.binforms import BiForm, symbol_names
    from g12calc.spencer import _TORSION_SHAPE, torsion_tensor
    from g12calc.linalg import solve_sparse
    sym_names = []
    for name, (n, m) in _TORSION_SHAPE:
        sym_names.extend(symbol_names(n, m, name))
    col = {s: i for i, s in enumerate(sym_names)}
    s = TorsionCoords.symbolic()
    tensor = torsion_tensor(s)
    rows = []
    x1, y1 = Poly.var("x1"), Poly.var("y1")
    x2, y2 = Poly.var("x2"), Poly.var("y2")
    for al, be in ((1, 0), (0, 1), (1, 1), (1, -1), (2, 1), (1, 3)):
        r = al * x2 + be * y2
        divisible = [BiForm(1, 2, a * r * l)
                     for a in (x1, y1) for l in (x2, y2)]
        for i, j in combinations(range(4), 2):
            val = tensor(divisible[i], divisible[j])
            root = val.poly.subs({"x2": Poly.const(-be), "y2": Poly.const(al)})
            for _mono, coeff in root.coefficients_in(("x1", "y1")).items():
                row = {}
                for e, c in coeff.terms.items():
                    picked = [v for v, k in zip(coeff.vars, e) if k][0]
                    row[col[picked]] = row.get(col[picked], Fraction(0)) + c
                if row:
                    rows.append(row)
    _part, numeric_kernel = solve_sparse(rows, 90)
    symbolic_kernel = torsion_criterion_solve()["kernel"]
    assert len(numeric_kernel) == 30
    combined = PolyMatrix(numeric_kernel + symbolic_kernel)
    assert matrix_rank_kernel(combined.transpose())[0] == 30


def _admissible_torsion(seed):
    vec = [Fraction(0)] * 90
    pt = random_rational_point([f"w{k}" for k in range(30)], seed)
    vals = list(pt.values())
    at = 0
    for blk in ("s12", "s10", "s12p", "s30", "s32"):
        a, bnd = TORSION_OFFSETS[blk]
        for i in range(a, bnd):
            vec[i] = vals[at]
            at += 1
    for t in range(6):
        vec[TORSION_OFFSETS["s12pp"][0] + t] = 2 * vec[t]
    return vec


def test_intrinsic_adjustment_roundtrip():
    vec = _admissible_torsion(5)
    phi = intrinsic_adjustment(TorsionCoords.from_vector(vec))
    assert phi.r14.is_zero() and phi.r12pp.is_zero()
    got = [p.constant_value() for p in spencer_in_coords(phi).vector()]
    want = list(vec)
    for i in range(*TORSION_OFFSETS["s30"]):
        want[i] = Fraction(0)
    assert got == want


def test_intrinsic_adjustment_pure_s30_is_zero():
    vec = [Fraction(0)] * 90
    vec[TORSION_OFFSETS["s30"][0] + 2] = Fraction(5)
    phi = intrinsic_adjustment(TorsionCoords.from_vector(vec))
    assert all(p.is_zero() for p in phi.vector())


def test_intrinsic_adjustment_rejects_outside_subspace():
    vec = [Fraction(0)] * 90
    vec[TORSION_OFFSETS["s16"][0]] = Fraction(1)
    with pytest.raises(ValueError):
        intrinsic_adjustment(TorsionCoords.from_vector(vec))


def test_contact_restriction_identity():
    assert contact_restriction_identity()
    # explicit cubic instance
    assert contact_restriction_identity(
        s3=bf.slot2_form(Poly.var("x2") ** 3, 3))


def test_contact_restriction_identity_mutation():
    assert not contact_restriction_identity(
        coeffs=(Fraction(1), Fraction(-1, 2), Fraction(2, 3), Fraction(5, 3)))


def test_splitting_correction_vanishes():
    for k in (2, 3, 4):
        rep = splitting_correction_vanishes(k)
        assert rep["forced_zero"], rep
    assert splitting_correction_vanishes(2)["single_r_check"]
