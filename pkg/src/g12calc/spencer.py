"""Spencer maps, prolongations and the intrinsic-torsion calculus.

The first Spencer map Sp: V* (x) g -> Lambda^2 V* (x) V sends alpha to
Sp(alpha)(u, v) = alpha(u) v - alpha(v) u.  Its kernel is the first
prolongation g^(1), its cokernel the intrinsic-torsion space H^{0,2}.

For the algebra acting on V_{1,2} everything is also expressed in pairing
coordinates: maps V_{1,2} -> g are encoded by six forms (r12, r32, r12p,
r14, r12pp, r10), alternating V_{1,2}-valued 2-tensors by the ten forms
(s12, s14, s16, s10, s12p, s14p, s30, s32, s34, s12pp).  The codecs below
translate between those coordinates and raw tensors exactly, and
spencer_in_coords expresses Sp itself in them, as a polynomial identity
in 42 symbolic parameters.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from . import binforms as bf
from .binforms import (BiForm, LieElt, Rep, basis, dim_v, from_coords,
                       isotypic_decompose, rep_matrices, symbolic,
                       transvectant2)
from .linalg import (PolyMatrix, invert_rational, linsolve,
                     matrix_rank_kernel, solve_sparse)
from .poly import Poly


class LinearLieAlgebra:
    """A concrete matrix Lie algebra: ambient dim n and a basis of n x n
    matrices, checked to be closed under commutators on construction."""

    def __init__(self, name: str, n: int, basis_mats: Sequence, check: bool = True):
        self.name = name
        self.n = n
        self.basis_mats = [[[Fraction(x) for x in row] for row in m]
                           for m in basis_mats]
        self.dim = len(self.basis_mats)
        if check:
            self._check_closure()

    def _mat_mul(self, a, b):
        n = self.n
        return [[sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)]
                for i in range(n)]

    def _check_closure(self):
        n = self.n
        span_rows = [[m[i][j] for i in range(n) for j in range(n)]
                     for m in self.basis_mats]
        for a in range(self.dim):
            for b in range(a + 1, self.dim):
                ab = self._mat_mul(self.basis_mats[a], self.basis_mats[b])
                ba = self._mat_mul(self.basis_mats[b], self.basis_mats[a])
                comm = [ab[i][j] - ba[i][j] for i in range(n) for j in range(n)]
                mat = PolyMatrix([list(col) for col in
                                  zip(*(span_rows + [comm]))])
                if matrix_rank_kernel(mat)[0] != matrix_rank_kernel(
                        PolyMatrix(list(zip(*span_rows))))[0]:
                    raise ValueError(
                        f"{self.name}: basis is not closed under brackets")

def spencer_matrix(g: LinearLieAlgebra) -> PolyMatrix:
    """Matrix of Sp: V* (x) g -> Lambda^2 V* (x) V in canonical bases.

    Domain column (i, a) = i * dim(g) + a; target row (pair (p,q), r) =
    pair_index * n + r with pairs ordered lexicographically.
    """
    n, ng = g.n, g.dim
    pairs = list(combinations(range(n), 2))
    rows = [[Fraction(0)] * (n * ng) for _ in range(len(pairs) * n)]
    for i in range(n):
        for a, mat in enumerate(g.basis_mats):
            col = i * ng + a
            for pi, (p, q) in enumerate(pairs):
                if i == p:
                    for r in range(n):
                        if mat[r][q]:
                            rows[pi * n + r][col] += mat[r][q]
                if i == q:
                    for r in range(n):
                        if mat[r][p]:
                            rows[pi * n + r][col] -= mat[r][p]
    return PolyMatrix(rows)


def prolongation_and_h02(g: LinearLieAlgebra) -> dict:
    """Dimensions of the Spencer sequence for g, all exact."""
    sp = spencer_matrix(g)
    rank, ker = matrix_rank_kernel(sp)
    return {
        "algebra": g.name,
        "dim_V": g.n,
        "dim_g": g.dim,
        "dim_domain": sp.cols,
        "dim_target": sp.rows,
        "rank": rank,
        "dim_g1": sp.cols - rank,
        "dim_h02": sp.rows - rank,
        "kernel": ker,
    }


# -- standard algebras -----------------------------------------------------


def so3_algebra() -> LinearLieAlgebra:
    l1 = [[0, 0, 0], [0, 0, -1], [0, 1, 0]]
    l2 = [[0, 0, 1], [0, 0, 0], [-1, 0, 0]]
    l3 = [[0, -1, 0], [1, 0, 0], [0, 0, 0]]
    return LinearLieAlgebra("so(3)", 3, [l1, l2, l3])

def gl2_algebra() -> LinearLieAlgebra:
    mats = [[[1, 0], [0, 0]], [[0, 1], [0, 0]],
            [[0, 0], [1, 0]], [[0, 0], [0, 1]]]
    return LinearLieAlgebra("gl(2)", 2, mats)


def g1k_algebra(k: int = 2) -> LinearLieAlgebra:
    """The 7-dimensional algebra acting on V_{1,k}, in the weight basis
    (identity, V_{2,0} components, V_{0,2} components)."""
    return LinearLieAlgebra(f"g_{{1,{k}}}", 2 * (k + 1),
                            [list(map(list, m)) for m in bf.g1k_matrices(k)])


def g12_algebra() -> LinearLieAlgebra:
    return g1k_algebra(2)


def gk1_algebra(k: int = 2) -> LinearLieAlgebra:
    """Image of gl(2) on the binary forms of degree k+1 (the restricted
    structure algebra of the submoduli space)."""
    mats = rep_matrices(k + 1, 0)
    e1, f1, h1 = mats[0], mats[1], mats[2]
    d = k + 2
    ident = [[Fraction(1 if i == j else 0) for j in range(d)] for i in range(d)]
    return LinearLieAlgebra(f"g_{k+1}", d,
                            [list(map(list, e1)), list(map(list, f1)),
                             list(map(list, h1)), ident])


# -- representation structure of the g_{1,2} Spencer sequence -------------


def _adjoint_rep(g: LinearLieAlgebra, module_mats) -> Rep:
    """Action of the six generators on the algebra by brackets with their
    module matrices, in the algebra's own basis."""
    n = g.n
    cols_flat = [[m[i][j] for i in range(n) for j in range(n)]
                 for m in g.basis_mats]
    coord_mat = PolyMatrix(list(map(list, zip(*cols_flat))))
    mats = []
    for gm in module_mats:
        x = [list(row) for row in gm]
        cols = []
        for bmat in g.basis_mats:
            xa = [[sum(x[i][k] * bmat[k][j] for k in range(n)) -
                   sum(bmat[i][k] * x[k][j] for k in range(n))
                   for j in range(n)] for i in range(n)]
            flat = [xa[i][j] for i in range(n) for j in range(n)]
            sol = linsolve(coord_mat, flat)
            if sol is None:
                raise ValueError("adjoint action left the algebra")
            cols.append(sol[0])
        mats.append([[cols[j][i] for j in range(g.dim)]
                     for i in range(g.dim)])
    return Rep(g.dim, mats)


def _adjoint_rep_g12() -> Rep:
    return _adjoint_rep(g12_algebra(), rep_matrices(1, 2))


def spencer_domain_rep(g: Optional[LinearLieAlgebra] = None,
                       module: Optional[Rep] = None) -> Rep:
    if g is None:
        g = g12_algebra()
        module = Rep.space(1, 2)
    return module.dual().tensor(_adjoint_rep(g, [module.mat(n) for n in
                                                 bf.GENERATOR_NAMES]))


def spencer_target_rep(module: Optional[Rep] = None) -> Rep:
    if module is None:
        module = Rep.space(1, 2)
    return module.dual().wedge2().tensor(module)


def spencer_equivariance_ok(g: Optional[LinearLieAlgebra] = None,
                            module: Optional[Rep] = None) -> bool:
    """Exact matrix identity T(X) Sp = Sp D(X) for all six generators."""
    if g is None:
        g = g12_algebra()
        module = Rep.space(1, 2)
    sp = spencer_matrix(g)
    dom = spencer_domain_rep(g, module)
    tgt = spencer_target_rep(module)
    for name in bf.GENERATOR_NAMES:
        left = PolyMatrix(tgt.mat(name)).matmul(sp)
        right = sp.matmul(PolyMatrix(dom.mat(name)))
        if left != right:
            return False
    return True


def spencer_isotypic_report(g: LinearLieAlgebra, module: Rep) -> dict:
    """Dimension and isotypic data for the Spencer sequence of g.

    The cokernel type is the multiset difference target - domain, valid
    when the kernel is zero and Sp is equivariant (both certified here).
    """
    rep = prolongation_and_h02(g)
    dom_iso = isotypic_decompose(spencer_domain_rep(g, module))
    tgt_iso = isotypic_decompose(spencer_target_rep(module))
    if rep["dim_g1"] != 0:
        raise ValueError("expected zero prolongation")
    if not spencer_equivariance_ok(g, module):
        raise ValueError("Spencer map failed equivariance")
    coker = {}
    for key, mult in tgt_iso.items():
        diff = mult - dom_iso.get(key, 0)
        if diff < 0:
            raise ValueError("domain does not embed in target")
        if diff:
            coker[key] = diff
    rep["domain_isotypic"] = dom_iso
    rep["target_isotypic"] = tgt_iso
    rep["cokernel_isotypic"] = coker
    return rep


def g12_spencer_report() -> dict:
    return spencer_isotypic_report(g12_algebra(), Rep.space(1, 2))


def gk1_spencer_report(k: int = 2) -> dict:
    """Spencer report for the restricted algebra on degree-(k+1) forms."""
    return spencer_isotypic_report(gk1_algebra(k), Rep.space(k + 1, 0))


# -- pairing coordinates ---------------------------------------------------


_PHI_SHAPE = (("r12", (1, 2)), ("r32", (3, 2)), ("r12p", (1, 2)),
              ("r14", (1, 4)), ("r12pp", (1, 2)), ("r10", (1, 0)))

_TORSION_SHAPE = (("s12", (1, 2)), ("s14", (1, 4)), ("s16", (1, 6)),
                  ("s10", (1, 0)), ("s12p", (1, 2)), ("s14p", (1, 4)),
                  ("s30", (3, 0)), ("s32", (3, 2)), ("s34", (3, 4)),
                  ("s12pp", (1, 2)))


@dataclass
class PhiCoords:
    """Pairing coordinates of a linear map V_{1,2} -> g; 42 in total."""
    r12: BiForm
    r32: BiForm
    r12p: BiForm
    r14: BiForm
    r12pp: BiForm
    r10: BiForm

    @staticmethod
    def zero() -> "PhiCoords":
        return PhiCoords(*(from_coords(n, m, [0] * dim_v(n, m))
                           for _, (n, m) in _PHI_SHAPE))

    @staticmethod
    def symbolic(prefix: str = "r") -> "PhiCoords":
        return PhiCoords(*(symbolic(n, m, f"{prefix}{name[1:]}")
                           for name, (n, m) in _PHI_SHAPE))

    @staticmethod
    def from_vector(vec: Sequence) -> "PhiCoords":
        comps = []
        at = 0
        for _, (n, m) in _PHI_SHAPE:
            d = dim_v(n, m)
            comps.append(from_coords(n, m, vec[at:at + d]))
            at += d
        return PhiCoords(*comps)

    def vector(self) -> List[Poly]:
        out = []
        for name, _ in _PHI_SHAPE:
            out.extend(getattr(self, name).coords())
        return out


@dataclass
class TorsionCoords:
    """Pairing coordinates of an alternating V_{1,2}-valued 2-tensor; 90
    in total, component dims 6+10+14+2+6+10+4+12+20+6."""
    s12: BiForm
    s14: BiForm
    s16: BiForm
    s10: BiForm
    s12p: BiForm
    s14p: BiForm
    s30: BiForm
    s32: BiForm
    s34: BiForm
    s12pp: BiForm

    @staticmethod
    def zero() -> "TorsionCoords":
        return TorsionCoords(*(from_coords(n, m, [0] * dim_v(n, m))
                               for _, (n, m) in _TORSION_SHAPE))

    @staticmethod
    def symbolic(prefix: str = "s") -> "TorsionCoords":
        return TorsionCoords(*(symbolic(n, m, f"{prefix}{name[1:]}")
                               for name, (n, m) in _TORSION_SHAPE))

    @staticmethod
    def from_vector(vec: Sequence) -> "TorsionCoords":
        comps = []
        at = 0
        for _, (n, m) in _TORSION_SHAPE:
            d = dim_v(n, m)
            comps.append(from_coords(n, m, vec[at:at + d]))
            at += d
        return TorsionCoords(*comps)

    def vector(self) -> List[Poly]:
        out = []
        for name, _ in _TORSION_SHAPE:
            out.extend(getattr(self, name).coords())
        return out

    def component_names(self) -> List[str]:
        return [name for name, _ in _TORSION_SHAPE]


def phi_to_map(phi: PhiCoords) -> Callable[[BiForm], LieElt]:
    """The linear map V_{1,2} -> g determined by pairing coordinates."""

    def apply(p: BiForm) -> LieElt:
        p00 = transvectant2(phi.r12, p, 1, 2)
        p20 = (transvectant2(phi.r32, p, 1, 2)
               + transvectant2(phi.r12p, p, 0, 2))
        p02 = (transvectant2(phi.r14, p, 1, 2)
               + transvectant2(phi.r12pp, p, 1, 1)
               + transvectant2(phi.r10, p, 1, 0))
        return LieElt(p00, p20, p02)

    return apply


def torsion_tensor(s: TorsionCoords) -> Callable[[BiForm, BiForm], BiForm]:
    """The alternating tensor determined by torsion coordinates."""

    def apply(p: BiForm, q: BiForm) -> BiForm:
        pq10 = transvectant2(p, q, 1, 0)
        pq01 = transvectant2(p, q, 0, 1)
        pq12 = transvectant2(p, q, 1, 2)
        return (transvectant2(s.s12, pq10, 0, 2)
                + transvectant2(s.s14, pq10, 0, 3)
                + transvectant2(s.s16, pq10, 0, 4)
                + transvectant2(s.s10, pq01, 1, 0)
                + transvectant2(s.s12p, pq01, 1, 1)
                + transvectant2(s.s14p, pq01, 1, 2)
                + transvectant2(s.s30, pq01, 2, 0)
                + transvectant2(s.s32, pq01, 2, 1)
                + transvectant2(s.s34, pq01, 2, 2)
                + transvectant2(s.s12pp, pq12, 0, 0))

    return apply


def tensor_values(t: Callable[[BiForm, BiForm], BiForm]) -> List[Poly]:
    """Evaluate an alternating tensor on all basis pairs: 15 x 6 = 90
    coordinates, pairs ordered lexicographically."""
    bas = basis(1, 2)
    out: List[Poly] = []
    for i, j in combinations(range(6), 2):
        out.extend(t(bas[i], bas[j]).coords())
    return out


@lru_cache(maxsize=None)
def _torsion_encode_matrix() -> tuple:
    """90 x 90 matrix taking torsion coordinates to tensor values."""
    cols = []
    for k in range(90):
        vec = [Fraction(0)] * 90
        vec[k] = Fraction(1)
        s = TorsionCoords.from_vector(vec)
        vals = tensor_values(torsion_tensor(s))
        cols.append([v.constant_value() for v in vals])
    return tuple(tuple(cols[j][i] for j in range(90)) for i in range(90))


@lru_cache(maxsize=None)
def _torsion_decode_matrix() -> tuple:
    rows = [list(r) for r in _torsion_encode_matrix()]
    return tuple(tuple(r) for r in invert_rational(rows))


def encode_torsion(s: TorsionCoords) -> List[Poly]:
    return tensor_values(torsion_tensor(s))


def decode_torsion(values: Sequence[Poly]) -> TorsionCoords:
    """Exact inverse of encode_torsion on 90 tensor values.

    Tensors are represented by their values on ordered basis pairs, so
    the alternating property is structural; a non-alternating input is
    unrepresentable rather than an error case.
    """
    dec = _torsion_decode_matrix()
    vals = [v if isinstance(v, Poly) else Poly.const(v) for v in values]
    out = []
    for i in range(90):
        acc = Poly.zero()
        for j in range(90):
            c = dec[i][j]
            if c:
                acc = acc + vals[j] * c
        out.append(acc)
    return TorsionCoords.from_vector(out)


def torsion_encode_rank() -> int:
    return matrix_rank_kernel(
        PolyMatrix([list(r) for r in _torsion_encode_matrix()]))[0]


def spencer_of_phi(phi: PhiCoords) -> Callable[[BiForm, BiForm], BiForm]:
    """Sp(phi)(p, q) = phi(p).q - phi(q).p as a tensor."""
    fmap = phi_to_map(phi)

    def apply(p: BiForm, q: BiForm) -> BiForm:
        return fmap(p).act(q) - fmap(q).act(p)

    return apply


def spencer_in_coords(phi: PhiCoords) -> TorsionCoords:
    """Torsion coordinates of Sp(phi), computed by exact decoding."""
    return decode_torsion(tensor_values(spencer_of_phi(phi)))


def expected_spencer_coords(phi: PhiCoords,
                            overrides: Optional[dict] = None) -> TorsionCoords:
    """The closed-form coordinate expression of Sp(phi).

    Coefficients frozen from the exact computation (they reproduce the
    displayed coordinate formula); `overrides` lets negative-control
    tests perturb a single coefficient.
    """
    c: Dict[str, Fraction] = {
        "s12_r12": Fraction(-1, 6), "s12_r12p": Fraction(1, 2),
        "s12_r12pp": Fraction(-2, 3),
        "s14_r14": Fraction(-1, 2),
        "s14p_r14": Fraction(-1, 2),
        "s12p_r12": Fraction(-1, 8), "s12p_r12p": Fraction(-1, 8),
        "s12p_r12pp": Fraction(1, 2),
        "s32_r32": Fraction(-1, 4),
        "s10_r10": Fraction(1),
        "s12pp_r12": Fraction(-1, 3), "s12pp_r12p": Fraction(1),
        "s12pp_r12pp": Fraction(8, 3),
    }
    if overrides:
        c.update(overrides)
    zero12 = from_coords(1, 2, [0] * 6)
    zero16 = from_coords(1, 6, [0] * 14)
    zero30 = from_coords(3, 0, [0] * 4)
    zero34 = from_coords(3, 4, [0] * 20)
    return TorsionCoords(
        s12=(c["s12_r12"] * phi.r12 + c["s12_r12p"] * phi.r12p
             + c["s12_r12pp"] * phi.r12pp),
        s14=c["s14_r14"] * phi.r14,
        s16=zero16,
        s10=c["s10_r10"] * phi.r10,
        s12p=(c["s12p_r12"] * phi.r12 + c["s12p_r12p"] * phi.r12p
              + c["s12p_r12pp"] * phi.r12pp),
        s14p=c["s14p_r14"] * phi.r14,
        s30=zero30,
        s32=c["s32_r32"] * phi.r32,
        s34=zero34,
        s12pp=(c["s12pp_r12"] * phi.r12 + c["s12pp_r12p"] * phi.r12p
               + c["s12pp_r12pp"] * phi.r12pp),
    )


def spencer_coords_match(overrides: Optional[dict] = None) -> bool:
    """Does the exact Sp(phi) agree with the closed-form coordinates for
    fully symbolic phi?  (42 free parameters, exact.)"""
    phi = PhiCoords.symbolic()
    got = spencer_in_coords(phi)
    want = expected_spencer_coords(phi, overrides)
    return all((g - w).is_zero()
               for g, w in zip(got.vector(), want.vector()))


def _torsion_offsets() -> Dict[str, Tuple[int, int]]:
    out = {}
    at = 0
    for name, (n, m) in _TORSION_SHAPE:
        d = dim_v(n, m)
        out[name] = (at, at + d)
        at += d
    return out


def _divisible_basis() -> List[BiForm]:
    """Spanning set of {p in V_{1,2} : r | p} for r = al*x2 + be*y2."""
    r = Poly.var("al") * Poly.var("x2") + Poly.var("be") * Poly.var("y2")
    x1, y1 = Poly.var("x1"), Poly.var("y1")
    x2, y2 = Poly.var("x2"), Poly.var("y2")
    return [BiForm(1, 2, a * r * l)
            for a in (x1, y1) for l in (x2, y2)]


def _divisibility_rows(tensor, sym_names: List[str], pairs=None) -> List[dict]:
    """Linear constraints on the listed symbols expressing that
    r = al*x2 + be*y2 divides tensor(p, q) for all divisible p, q and all
    (al, be).

    Divisibility of a second-slot form by r is the vanishing of the
    substitution x2 -> -be, y2 -> al; every coefficient of a monomial in
    (x1, y1, al, be) must vanish, each giving one row.
    """
    col = {s: i for i, s in enumerate(sym_names)}
    dbas = _divisible_basis()
    if pairs is None:
        pairs = list(combinations(range(len(dbas)), 2))
    rows = []
    for i, j in pairs:
        val = tensor(dbas[i], dbas[j])
        root = val.poly.subs({"x2": Poly.const(0) - Poly.var("be"),
                              "y2": Poly.var("al")})
        for _mono, coeff in root.coefficients_in(
                ("x1", "y1", "al", "be")).items():
            row = {}
            for e, c in coeff.terms.items():
                picked = [v for v, k in zip(coeff.vars, e) if k]
                if len(picked) != 1 or sum(e) != 1:
                    raise ValueError("constraint is not linear in the symbols")
                row[col[picked[0]]] = row.get(col[picked[0]], Fraction(0)) + c
            if row:
                rows.append(row)
    return rows


def torsion_criterion_solve() -> dict:
    """Exact solution space of the divisibility criterion on torsion
    coordinates.

    Quantification over all r in V_1 and all r-divisible pairs is reduced
    to finitely many linear conditions by keeping r's coefficients
    symbolic; the conditions are polynomial in them, so requiring every
    (al, be)-coefficient to vanish is sound and complete.  Certifies that
    the solution space is exactly {s14 = s14p = s16 = s34 = 0,
    s12pp = 2 s12} of dimension 30, with a free s30 block of dimension 4.
    """
    s = TorsionCoords.symbolic()
    sym_names = []
    for name, (n, m) in _TORSION_SHAPE:
        sym_names.extend(bf.symbol_names(n, m, name))
    rows = _divisibility_rows(torsion_tensor(s), sym_names)
    sol = solve_sparse(rows, 90)
    assert sol is not None  # homogeneous system
    _part, kernel = sol
    off = _torsion_offsets()
    zero_blocks = ("s14", "s14p", "s16", "s34")
    expected_ok = True
    for v in kernel:
        for blk in zero_blocks:
            a, b = off[blk]
            if any(v[i] != 0 for i in range(a, b)):
                expected_ok = False
        a12, _ = off["s12"]
        app, _ = off["s12pp"]
        for t in range(6):
            if v[app + t] != 2 * v[a12 + t]:
                expected_ok = False
    expected_dim = 90 - sum(off[b][1] - off[b][0] for b in zero_blocks) - 6
    s30_dim = off["s30"][1] - off["s30"][0]
    return {
        "solution_dim": len(kernel),
        "expected_dim": expected_dim,
        "matches_closed_form": expected_ok and len(kernel) == expected_dim,
        "free_s30_dim": s30_dim,
        "kernel": kernel,
        "constraint_rows": len(rows),
    }


def torsion_criterion_s16_pair() -> dict:
    """The single pair p = x (x) r^2, q = y (x) r^2 already forces the s16
    block to vanish, and touches no other block."""
    s = TorsionCoords.symbolic()
    sym_names = []
    for name, (n, m) in _TORSION_SHAPE:
        sym_names.extend(bf.symbol_names(n, m, name))
    r = Poly.var("al") * Poly.var("x2") + Poly.var("be") * Poly.var("y2")
    p = BiForm(1, 2, Poly.var("x1") * r * r)
    q = BiForm(1, 2, Poly.var("y1") * r * r)
    tensor = torsion_tensor(s)
    col = {sname: i for i, sname in enumerate(sym_names)}
    rows = []
    val = tensor(p, q)
    root = val.poly.subs({"x2": Poly.const(0) - Poly.var("be"),
                          "y2": Poly.var("al")})
    touched = set()
    for _mono, coeff in root.coefficients_in(("x1", "y1", "al", "be")).items():
        row = {}
        for e, c in coeff.terms.items():
            picked = [v for v, k in zip(coeff.vars, e) if k][0]
            row[col[picked]] = row.get(col[picked], Fraction(0)) + c
            touched.add(picked)
        if row:
            rows.append(row)
    off = _torsion_offsets()
    a, b = off["s16"]
    only_s16 = all(name.startswith("s16_") for name in touched)
    sol = solve_sparse(rows, 90)
    _p, kernel = sol
    s16_killed = all(all(v[i] == 0 for i in range(a, b)) for v in kernel)
    return {"only_s16_block": only_s16, "s16_forced_zero": s16_killed,
            "free_dim": len(kernel)}


@lru_cache(maxsize=None)
def _spencer_coordinate_matrix() -> tuple:
    """90 x 42 matrix of Sp in pairing coordinates (torsion coords of
    Sp(unit phi) per phi coordinate)."""
    cols = []
    for k in range(42):
        vec = [Fraction(0)] * 42
        vec[k] = Fraction(1)
        phi = PhiCoords.from_vector(vec)
        out = spencer_in_coords(phi).vector()
        cols.append([p.constant_value() for p in out])
    return tuple(tuple(cols[j][i] for j in range(42)) for i in range(90))


def intrinsic_adjustment(t: TorsionCoords) -> PhiCoords:
    """Solve Sp(phi) = t minus its s30 part with the r14 and r12pp blocks
    of phi pinned to zero; exact, unique, raises if t lies outside the
    admissible subspace."""
    rhs_coords = list(t.vector())
    off = _torsion_offsets()
    a30, b30 = off["s30"]
    for i in range(a30, b30):
        rhs_coords[i] = Poly.zero()
    rhs = [c.constant_value() if isinstance(c, Poly) else Fraction(c)
           for c in rhs_coords]
    sp = _spencer_coordinate_matrix()
    phi_off = {}
    at = 0
    for name, (n, m) in _PHI_SHAPE:
        d = dim_v(n, m)
        phi_off[name] = (at, at + d)
        at += d
    allowed = [k for name, (a, b) in phi_off.items() if name not in ("r14", "r12pp")
               for k in range(a, b)]
    allowed.sort()
    mat = PolyMatrix([[sp[i][k] for k in allowed] for i in range(90)])
    sol = linsolve(mat, rhs)
    if sol is None:
        raise ValueError("torsion lies outside the admissible subspace")
    x, ker = sol
    if ker:
        raise ValueError("adjustment is not unique (unexpected kernel)")
    full = [Fraction(0)] * 42
    for k, v in zip(allowed, x):
        full[k] = v
    return PhiCoords.from_vector(full)


def contact_restriction_identity(coeffs: Tuple = (Fraction(1), Fraction(-1, 2),
                                                  Fraction(2, 3), Fraction(4, 3)),
                                 s3: Optional[BiForm] = None) -> bool:
    """The projected torsion of the adjusted connection vanishes.

    With a second-slot cubic s3, s30 the same cubic moved to the first
    slot, and s12 = x (x) ds3/dx2 + y (x) ds3/dy2, the tensor

        c0 <s30, <p,q>_{0,1}>_{2,0} + c1 <s12, <p,q>_{0,1}>_{1,1}
        + c2 <s12, <p,q>_{1,0}>_{0,2} + c3 s12 <p,q>_{1,2}

    composed with the slot-merging projection V_{1,2} -> V_3 vanishes
    identically on arguments from the contact subspace V' (the theta
    range along the restricted bundle).  Exact in the cubic's 4 symbolic
    coefficients.
    """
    if s3 is None:
        s3 = symbolic(0, 3, "s3c")
    c0, c1, c2, c3 = coeffs
    s30 = from_coords(3, 0, s3.coords())
    x1, y1 = Poly.var("x1"), Poly.var("y1")
    s12 = BiForm(1, 2, x1 * s3.poly.diff("x2") + y1 * s3.poly.diff("y2"))

    def tensor(p: BiForm, q: BiForm) -> BiForm:
        pq01 = transvectant2(p, q, 0, 1)
        pq10 = transvectant2(p, q, 1, 0)
        pq12 = transvectant2(p, q, 1, 2)
        return (c0 * transvectant2(s30, pq01, 2, 0)
                + c1 * transvectant2(s12, pq01, 1, 1)
                + c2 * transvectant2(s12, pq10, 0, 2)
                + c3 * BiForm(1, 2, s12.poly * pq12.poly))

    vb = bf.vprime_basis(2)
    for i, j in combinations(range(len(vb)), 2):
        if not bf.pr_map(tensor(vb[i], vb[j])).is_zero():
            return False
    return True


def splitting_correction_vanishes(k: int) -> dict:
    """The divisibility condition forces the correction map to vanish.

    A candidate correction V_{k+1} -> V_{k-1} is a sum of pairings with
    unknown forms v_{2i} in V_{2i}, i = 1..k.  Requiring r | delta(u)
    whenever r^2 | u (r symbolic linear) forces every v_{2i} = 0; run as
    an exact homogeneous solve.
    """
    if k < 2:
        raise ValueError("needs k >= 2")
    vs = [symbolic(0, 2 * i, f"vv{2 * i}") for i in range(1, k + 1)]
    sym_names = []
    for i in range(1, k + 1):
        sym_names.extend(bf.symbol_names(0, 2 * i, f"vv{2 * i}"))
    col = {s: i for i, s in enumerate(sym_names)}

    def delta(u: BiForm) -> BiForm:
        acc = None
        for i, v in enumerate(vs, start=1):
            term = transvectant2(u, v, 0, i + 1)
            acc = term if acc is None else acc + term
        return acc

    r = Poly.var("al") * Poly.var("x2") + Poly.var("be") * Poly.var("y2")
    rows = []
    for w in basis(0, k - 1):
        u = BiForm(0, k + 1, r * r * w.poly)
        du = delta(u)
        root = du.poly.subs({"x2": Poly.const(0) - Poly.var("be"),
                             "y2": Poly.var("al")})
        for _mono, coeff in root.coefficients_in(
                ("x1", "y1", "al", "be")).items():
            row = {}
            for e, c in coeff.terms.items():
                picked = [v for v, kk in zip(coeff.vars, e) if kk][0]
                row[col[picked]] = row.get(col[picked], Fraction(0)) + c
            if row:
                rows.append(row)
    nvars = len(sym_names)
    _part, kernel = solve_sparse(rows, nvars)
    # the single-r cross-check: for r = x2, divisibility of delta(r^{k+1})
    # is equivalent to r | v_{2k}
    u = BiForm(0, k + 1, Poly.var("x2") ** (k + 1))
    du = delta(u)
    lead = du.poly.subs({"x2": Poly.const(0)})
    v2k_lead = vs[-1].poly.subs({"x2": Poly.const(0)})
    lead_syms = {v for v, _ in zip(lead.vars, range(len(lead.vars)))
                 if v.startswith(f"vv{2 * k}_")}
    single_r_ok = (not lead.is_zero()) and all(
        v.startswith(f"vv{2 * k}_") or not v.startswith("vv")
        for v in lead.vars) and not v2k_lead.is_zero()
    return {"k": k, "unknowns": nvars, "forced_zero": len(kernel) == 0,
            "kernel_dim": len(kernel), "single_r_check": single_r_ok}
