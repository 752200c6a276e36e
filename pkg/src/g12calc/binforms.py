"""Binary forms, transvectant pairings and SL(2) x SL(2) representation
calculus.

V_{n,m} is realized as bihomogeneous polynomials of degree n in (x1, y1)
and degree m in (x2, y2); coefficients may involve parameter variables.
The monomials x1^(n-i) y1^i * x2^(m-j) y2^j, ordered by (i, j), form the
canonical weight basis; basis vector (i, j) has weight (n-2i, m-2j).

The transvectant convention is frozen so that the first transvectant is
the Jacobian with positive sign:

    <u, v>_1 = u_x v_y - u_y v_x.

Equivalently, <u, v>_p = (1/p!) sum_k (-1)^k C(p,k) d^p u / dx^(p-k) dy^k
* d^p v / dx^k dy^(p-k).  This sign choice validates all displayed
coordinate identities downstream (the structure-equation suite solves for
the constants rather than assuming them, so a convention mismatch would
surface there as a solver inconsistency, not as a silent wrong value).
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Dict, List, Sequence, Tuple

from .linalg import PolyMatrix, _Lcg, matrix_rank_kernel
from .poly import Poly, Scalar

SLOT_VARS = (("x1", "y1"), ("x2", "y2"))
ALL_FORM_VARS = ("x1", "y1", "x2", "y2")


class DegreeError(ValueError):
    pass


class BiForm:
    """Element of V_{n,m}: a bihomogeneous polynomial of bidegree (n, m)."""

    __slots__ = ("n", "m", "poly")

    def __init__(self, n: int, m: int, poly: Poly):
        if n < 0 or m < 0:
            raise DegreeError("negative bidegree")
        for (e_x1, e_y1, e_x2, e_y2), _c in _form_terms(poly):
            if e_x1 + e_y1 != n or e_x2 + e_y2 != m:
                raise DegreeError(
                    f"polynomial is not bihomogeneous of bidegree ({n}, {m}): {poly}"
                )
        self.n = n
        self.m = m
        self.poly = poly

    @property
    def bidegree(self) -> Tuple[int, int]:
        return (self.n, self.m)

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def __add__(self, other: "BiForm") -> "BiForm":
        if self.is_zero():
            return other
        if other.is_zero():
            return BiForm(self.n, self.m, self.poly)
        if self.bidegree != other.bidegree:
            raise DegreeError("bidegree mismatch in sum")
        return BiForm(self.n, self.m, self.poly + other.poly)

    def __sub__(self, other: "BiForm") -> "BiForm":
        return self + (-1) * other

    def __mul__(self, c) -> "BiForm":
        if isinstance(c, BiForm):
            return BiForm(self.n + c.n, self.m + c.m, self.poly * c.poly)
        return BiForm(self.n, self.m, self.poly * c)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, BiForm):
            return NotImplemented
        return self.poly == other.poly and (
            self.is_zero() or self.bidegree == other.bidegree)

    def __repr__(self) -> str:
        return f"BiForm({self.n},{self.m}; {self.poly})"

    def coords(self) -> List[Poly]:
        """Coefficients in the canonical weight basis (length (n+1)(m+1))."""
        out = [Poly.zero()] * dim_v(self.n, self.m)
        by_mono = self.poly.coefficients_in(ALL_FORM_VARS)
        for (e_x1, e_y1, e_x2, e_y2), coeff in by_mono.items():
            i, j = e_y1, e_y2
            out[i * (self.m + 1) + j] = coeff
        return out


def _form_terms(poly: Poly):
    """Yield ((e_x1, e_y1, e_x2, e_y2), coeff Poly) for each form monomial."""
    for exps, coeff in poly.coefficients_in(ALL_FORM_VARS).items():
        yield exps, coeff


def dim_v(n: int, m: int) -> int:
    return (n + 1) * (m + 1)


@lru_cache(maxsize=None)
def basis_monomial(n: int, m: int, i: int, j: int) -> Poly:
    """x1^(n-i) y1^i x2^(m-j) y2^j."""
    return Poly.monomial({"x1": n - i, "y1": i, "x2": m - j, "y2": j})


def basis(n: int, m: int) -> List[BiForm]:
    return [BiForm(n, m, basis_monomial(n, m, i, j))
            for i in range(n + 1) for j in range(m + 1)]


def basis_weights(n: int, m: int) -> List[Tuple[int, int]]:
    return [(n - 2 * i, m - 2 * j)
            for i in range(n + 1) for j in range(m + 1)]


def from_coords(n: int, m: int, coeffs: Sequence) -> BiForm:
    total = Poly.zero()
    for idx, c in enumerate(coeffs):
        if isinstance(c, (int, Fraction)):
            c = Poly.const(c)
        if c.is_zero():
            continue
        i, j = divmod(idx, m + 1)
        total = total + c * basis_monomial(n, m, i, j)
    return BiForm(n, m, total)


def symbolic(n: int, m: int, prefix: str) -> BiForm:
    """BiForm with fresh parameter coefficients prefix_0 ... in basis order."""
    return from_coords(
        n, m, [Poly.var(f"{prefix}_{k}") for k in range(dim_v(n, m))])


def symbol_names(n: int, m: int, prefix: str) -> List[str]:
    return [f"{prefix}_{k}" for k in range(dim_v(n, m))]


# -- transvectants --------------------------------------------------------


def transvectant2(u: BiForm, v: BiForm, p1: int, p2: int) -> BiForm:
    """Slotwise pairing <u, v>_{p1, p2} in the frozen convention."""
    if p1 < 0 or p2 < 0 or p1 > min(u.n, v.n) or p2 > min(u.m, v.m):
        raise DegreeError(
            f"pairing orders ({p1},{p2}) out of range for bidegrees "
            f"{u.bidegree} x {v.bidegree}")
    total = Poly.zero()
    for k1 in range(p1 + 1):
        for k2 in range(p2 + 1):
            sign = -1 if (k1 + k2) % 2 else 1
            c = sign * comb(p1, k1) * comb(p2, k2)
            du = (u.poly.diff("x1", p1 - k1).diff("y1", k1)
                  .diff("x2", p2 - k2).diff("y2", k2))
            if du.is_zero():
                continue
            dv = (v.poly.diff("x1", k1).diff("y1", p1 - k1)
                  .diff("x2", k2).diff("y2", p2 - k2))
            if dv.is_zero():
                continue
            total = total + c * du * dv
    total = total * Fraction(1, factorial(p1) * factorial(p2))
    return BiForm(u.n + v.n - 2 * p1, u.m + v.m - 2 * p2, total)


def transvectant(u: BiForm, v: BiForm, p: int) -> BiForm:
    """First-slot pairing <u, v>_p on V_n x V_m (second slot untouched)."""
    return transvectant2(u, v, p, 0)


def transvectant_slot2(u: BiForm, v: BiForm, p: int) -> BiForm:
    """Second-slot pairing, for forms living in (x2, y2)."""
    return transvectant2(u, v, 0, p)


def transvectant2_omega(u: BiForm, v: BiForm, p1: int, p2: int) -> BiForm:
    """Independent oracle for transvectant2 via the Cayley Omega process.

    Form u(x, y) * v(z, w) in doubled variables, apply the operator
    (dx dw - dy dz)^{p} per slot, then restrict to the diagonal z = x,
    w = y.  Shares no code path with the alternating-sum implementation.
    """
    if p1 < 0 or p2 < 0 or p1 > min(u.n, v.n) or p2 > min(u.m, v.m):
        raise DegreeError("pairing orders out of range")
    ren = {"x1": Poly.var("z1"), "y1": Poly.var("w1"),
           "x2": Poly.var("z2"), "y2": Poly.var("w2")}
    prod = u.poly * v.poly.subs(ren)

    def omega(poly: Poly, xa: str, ya: str, xb: str, yb: str) -> Poly:
        return (poly.diff(xa).diff(yb) - poly.diff(ya).diff(xb))

    for _ in range(p1):
        prod = omega(prod, "x1", "y1", "z1", "w1")
    for _ in range(p2):
        prod = omega(prod, "x2", "y2", "z2", "w2")
    prod = prod.subs({"z1": Poly.var("x1"), "w1": Poly.var("y1"),
                      "z2": Poly.var("x2"), "w2": Poly.var("y2")})
    prod = prod * Fraction(1, factorial(p1) * factorial(p2))
    return BiForm(u.n + v.n - 2 * p1, u.m + v.m - 2 * p2, prod)


@lru_cache(maxsize=None)
def pairing_table(n1: int, m1: int, n2: int, m2: int, p1: int, p2: int):
    """Structure constants of <.,.>_{p1,p2} on basis monomials.

    Returns a dict {(idx1, idx2): (target_idx, Fraction)} with zero
    entries omitted; the transvectant of two basis monomials is a single
    monomial.
    """
    out = {}
    b1 = basis(n1, m1)
    b2 = basis(n2, m2)
    tm, tn = n1 + n2 - 2 * p1, m1 + m2 - 2 * p2
    for i1, u in enumerate(b1):
        for i2, v in enumerate(b2):
            w = transvectant2(u, v, p1, p2)
            if w.is_zero():
                continue
            cs = w.coords()
            nz = [(t, c.constant_value()) for t, c in enumerate(cs)
                  if not c.is_zero()]
            assert len(nz) == 1, (tm, tn, nz)
            out[(i1, i2)] = nz[0]
    return out


# -- infinitesimal actions -------------------------------------------------


GENERATOR_NAMES = ("e1", "f1", "h1", "e2", "f2", "h2")

_SL2_MATS = {
    "e": ((0, 1), (0, 0)),
    "f": ((0, 0), (1, 0)),
    "h": ((1, 0), (0, -1)),
    "id": ((1, 0), (0, 1)),
}


def sl2_action(mat, slot: int, p: BiForm) -> BiForm:
    """Infinitesimal transposed action of a 2x2 matrix on one slot.

    For X = [[a, b], [c, d]] the action is (a x + c y) d/dx +
    (b x + d y) d/dy in the chosen slot's variables; e acts as x d/dy,
    f as y d/dx, h as x d/dx - y d/dy.
    """
    (a, b), (c, d) = mat
    xv, yv = SLOT_VARS[slot - 1]
    x = Poly.var(xv)
    y = Poly.var(yv)
    res = ((a * x + c * y) * p.poly.diff(xv)
           + (b * x + d * y) * p.poly.diff(yv))
    return BiForm(p.n, p.m, res)


def generator_action(name: str, p: BiForm) -> BiForm:
    """Action of one of e1, f1, h1, e2, f2, h2 (or id1, id2)."""
    slot = int(name[-1])
    return sl2_action(_SL2_MATS[name[:-1]], slot, p)


@lru_cache(maxsize=None)
def rep_matrices(n: int, m: int) -> Tuple[Tuple[Tuple[Scalar, ...], ...], ...]:
    """Matrices of the 6 generators on V_{n,m}, columns = basis action."""
    bas = basis(n, m)
    d = dim_v(n, m)
    mats = []
    for name in GENERATOR_NAMES:
        cols = []
        for v in bas:
            w = generator_action(name, v)
            cols.append([c.constant_value() for c in w.coords()])
        mats.append(tuple(tuple(cols[j][i] for j in range(d))
                          for i in range(d)))
    return tuple(mats)


class Rep:
    """A concrete module: dim + the six generator matrices (rows of Fractions)."""

    def __init__(self, dim: int, mats: Sequence):
        self.dim = dim
        self.mats = {name: [list(row) for row in mat]
                     for name, mat in zip(GENERATOR_NAMES, mats)}

    @staticmethod
    def space(n: int, m: int) -> "Rep":
        return Rep(dim_v(n, m), rep_matrices(n, m))

    def mat(self, name: str):
        return self.mats[name]

    def dual(self) -> "Rep":
        mats = []
        for name in GENERATOR_NAMES:
            m = self.mats[name]
            mats.append([[-m[j][i] for j in range(self.dim)]
                         for i in range(self.dim)])
        return Rep(self.dim, mats)

    def tensor(self, other: "Rep") -> "Rep":
        d1, d2 = self.dim, other.dim
        mats = []
        for name in GENERATOR_NAMES:
            a, b = self.mats[name], other.mats[name]
            m = [[Fraction(0)] * (d1 * d2) for _ in range(d1 * d2)]
            for i1 in range(d1):
                for j1 in range(d1):
                    if a[i1][j1]:
                        for k in range(d2):
                            m[i1 * d2 + k][j1 * d2 + k] += a[i1][j1]
            for k in range(d1):
                for i2 in range(d2):
                    for j2 in range(d2):
                        if b[i2][j2]:
                            m[k * d2 + i2][k * d2 + j2] += b[i2][j2]
            mats.append(m)
        return Rep(d1 * d2, mats)

    def wedge2(self) -> "Rep":
        d = self.dim
        pairs = [(i, j) for i in range(d) for j in range(i + 1, d)]
        index = {p: k for k, p in enumerate(pairs)}
        mats = []
        for name in GENERATOR_NAMES:
            a = self.mats[name]
            m = [[Fraction(0)] * len(pairs) for _ in range(len(pairs))]
            for (i, j), col in index.items():
                # X(ei ^ ej) = (X ei) ^ ej + ei ^ (X ej)
                for r in range(d):
                    if a[r][i]:
                        if r == j:
                            continue
                        key = (r, j) if r < j else (j, r)
                        sign = 1 if r < j else -1
                        m[index[key]][col] += sign * a[r][i]
                    if a[r][j]:
                        if r == i:
                            continue
                        key = (i, r) if i < r else (r, i)
                        sign = 1 if i < r else -1
                        m[index[key]][col] += sign * a[r][j]
            mats.append(m)
        return Rep(len(pairs), mats)


def isotypic_decompose(rep: Rep) -> Dict[Tuple[int, int], int]:
    """Multiplicities of V_{i,j} by highest-weight-vector counting.

    Requires h1 and h2 to act diagonally with integer entries (true for
    every module built from weight bases).  The multiplicity of V_{i,j}
    is the dimension of the joint kernel of both raising operators on the
    weight-(i,j) subspace.
    """
    h1, h2 = rep.mats["h1"], rep.mats["h2"]
    d = rep.dim
    for h in (h1, h2):
        for i in range(d):
            for j in range(d):
                if i != j and h[i][j] != 0:
                    raise ValueError("h-action is not diagonal in this basis")
                if i == j and h[i][j].denominator != 1:
                    raise ValueError("non-integer weight")
    weights = [(int(h1[i][i]), int(h2[i][i])) for i in range(d)]
    e1, e2 = rep.mats["e1"], rep.mats["e2"]
    out: Dict[Tuple[int, int], int] = {}
    for w in sorted(set(weights), reverse=True):
        if w[0] < 0 or w[1] < 0:
            continue
        idxs = [i for i, wi in enumerate(weights) if wi == w]
        rows = []
        for e in (e1, e2):
            for r in range(d):
                row = [e[r][c] for c in idxs]
                if any(row):
                    rows.append(row)
        if rows:
            mult = len(idxs) - matrix_rank_kernel(PolyMatrix(rows))[0]
        else:
            mult = len(idxs)
        if mult:
            out[w] = mult
    total = sum(mult * dim_v(*w) for w, mult in out.items())
    if total != d:
        raise ValueError(
            f"isotypic decomposition does not fill the space: {total} != {d}")
    return out


def clebsch_gordan(n: int, m: int) -> Dict[Tuple[int, int], int]:
    """Decomposition of V_n (x) V_m for single-slot forms: sum V_{n+m-2p}."""
    out: Dict[Tuple[int, int], int] = {}
    for p in range(min(n, m) + 1):
        key = (n + m - 2 * p, 0)
        out[key] = out.get(key, 0) + 1
    return out


def clebsch_gordan2(bideg1: Tuple[int, int],
                    bideg2: Tuple[int, int]) -> Dict[Tuple[int, int], int]:
    """Decomposition of V_{i1,i2} (x) V_{j1,j2} by the double sum formula."""
    (i1, i2), (j1, j2) = bideg1, bideg2
    out: Dict[Tuple[int, int], int] = {}
    for p1 in range(min(i1, j1) + 1):
        for p2 in range(min(i2, j2) + 1):
            key = (i1 + j1 - 2 * p1, i2 + j2 - 2 * p2)
            out[key] = out.get(key, 0) + 1
    return out


# -- the Lie algebra g_{1,2} ----------------------------------------------


class LieElt:
    """Element of the 7-dimensional algebra acting on V_{1,2}.

    Stored as (p00, p20, p02) with p00 in V_{0,0}, p20 in V_{2,0} and p02
    in V_{0,2}; acts on q by p00*q + <p20, q>_{1,0} + <p02, q>_{0,1},
    pairings dropped when out of range for q's bidegree.
    """

    __slots__ = ("p00", "p20", "p02")

    def __init__(self, p00: BiForm, p20: BiForm, p02: BiForm):
        if p00.bidegree != (0, 0) and not p00.is_zero():
            raise DegreeError("p00 must lie in V_{0,0}")
        if p20.bidegree != (2, 0) and not p20.is_zero():
            raise DegreeError("p20 must lie in V_{2,0}")
        if p02.bidegree != (0, 2) and not p02.is_zero():
            raise DegreeError("p02 must lie in V_{0,2}")
        self.p00 = p00
        self.p20 = p20
        self.p02 = p02

    @staticmethod
    def from_coords(coeffs: Sequence) -> "LieElt":
        """7 coordinates: [p00, p20 (3), p02 (3)] in weight-basis order."""
        return LieElt(from_coords(0, 0, coeffs[0:1]),
                      from_coords(2, 0, coeffs[1:4]),
                      from_coords(0, 2, coeffs[4:7]))

    def coords(self) -> List[Poly]:
        return (self.p00.coords() + self.p20.coords() + self.p02.coords())

    def act(self, q: BiForm) -> BiForm:
        res = BiForm(q.n, q.m, self.p00.poly * q.poly)
        if q.n >= 1 and not self.p20.is_zero():
            res = res + transvectant2(self.p20, q, 1, 0)
        if q.m >= 1 and not self.p02.is_zero():
            res = res + transvectant2(self.p02, q, 0, 1)
        return res

    def action_matrix(self, n: int = 1, m: int = 2) -> PolyMatrix:
        cols = [self.act(v).coords() for v in basis(n, m)]
        d = dim_v(n, m)
        return PolyMatrix([[cols[j][i] for j in range(d)] for i in range(d)])


def double_bracket(w: LieElt, q: BiForm, k) -> BiForm:
    """<<p00 + p20 + p02, q>>_k = k <p00,q>_{0,0} + <p20,q>_{1,0} + <p02,q>_{0,1}."""
    res = BiForm(q.n, q.m, k * w.p00.poly * q.poly)
    if not w.p20.is_zero():
        if q.n < 1:
            if not transvectant_applicable(w.p20, q, 1, 0):
                raise DegreeError("p20 pairing out of range for this bidegree")
        res = res + transvectant2(w.p20, q, 1, 0)
    if not w.p02.is_zero():
        if q.m < 1:
            if not transvectant_applicable(w.p02, q, 0, 1):
                raise DegreeError("p02 pairing out of range for this bidegree")
        res = res + transvectant2(w.p02, q, 0, 1)
    return res


def transvectant_applicable(u: BiForm, v: BiForm, p1: int, p2: int) -> bool:
    return p1 <= min(u.n, v.n) and p2 <= min(u.m, v.m)


def g12_basis_elts() -> List[LieElt]:
    """The 7 weight-basis elements of the algebra: id, V_{2,0}, V_{0,2}."""
    elts = []
    one = Poly.const(1)
    for k in range(7):
        coeffs = [one * 0] * 7
        coeffs[k] = Poly.const(1)
        elts.append(LieElt.from_coords(coeffs))
    return elts


@lru_cache(maxsize=None)
def g1k_matrices(k: int = 2) -> Tuple:
    """Action matrices of the 7 algebra basis elements on V_{1,k}."""
    return tuple(
        tuple(tuple(e.constant_value() for e in row)
              for row in elt.action_matrix(1, k).entries)
        for elt in g12_basis_elts())


def g12_matrices() -> Tuple:
    """6x6 rational action matrices of the 7 basis elements on V_{1,2}."""
    return g1k_matrices(2)


# -- exact sequence 0 -> V_{k-1} -> V_{1,k} -> V_{k+1} -> 0 ---------------


def slot2_form(poly_or_coeffs, deg: int) -> BiForm:
    if isinstance(poly_or_coeffs, Poly):
        return BiForm(0, deg, poly_or_coeffs)
    return from_coords(0, deg, poly_or_coeffs)


def iota_map(u: BiForm, k: int) -> BiForm:
    """V_{k-1} -> V_{1,k}: u -> x (x) (y u) - y (x) (x u)."""
    if u.bidegree != (0, k - 1) and not u.is_zero():
        raise DegreeError("iota expects a second-slot form of degree k-1")
    x1, y1 = Poly.var("x1"), Poly.var("y1")
    x2, y2 = Poly.var("x2"), Poly.var("y2")
    return BiForm(1, k, x1 * y2 * u.poly - y1 * x2 * u.poly)


def pr_map(p: BiForm) -> BiForm:
    """V_{1,k} -> V_{k+1}: u1 (x) vk -> u1 * vk (slots merged into slot 2)."""
    if p.n != 1 and not p.is_zero():
        raise DegreeError("pr expects first-slot degree 1")
    merged = p.poly.subs({"x1": Poly.var("x2"), "y1": Poly.var("y2")})
    return BiForm(0, p.m + 1, merged)


def eta_map(u: BiForm, k: int) -> BiForm:
    """Splitting V_{k+1} -> V_{1,k}: u -> (x (x) u_x + y (x) u_y)/(k+1)."""
    if u.bidegree != (0, k + 1) and not u.is_zero():
        raise DegreeError("eta expects a second-slot form of degree k+1")
    x1, y1 = Poly.var("x1"), Poly.var("y1")
    res = x1 * u.poly.diff("x2") + y1 * u.poly.diff("y2")
    return BiForm(1, k, res * Fraction(1, k + 1))


def seq_maps(k: int):
    """(iota, pr, eta) for the exact sequence at level k >= 1."""
    if k < 1:
        raise DegreeError("k must be >= 1")
    return (lambda u: iota_map(u, k), pr_map, lambda u: eta_map(u, k))


def vprime_basis(k: int) -> List[BiForm]:
    """Basis of V' = {x (x) u_x + y (x) u_y : u in V_{k+1}}."""
    return [eta_map(u, k) * (k + 1) for u in basis(0, k + 1)]


def vsecond_basis(k: int) -> List[BiForm]:
    """Basis of V'' = iota(V_{k-1})."""
    return [iota_map(u, k) for u in basis(0, k - 1)]


def vprime_split(k: int):
    """(V' basis, V'' basis, dims, certified direct-sum flag)."""
    vp = vprime_basis(k)
    vs = vsecond_basis(k)
    cols = [f.coords() for f in vp + vs]
    mat = PolyMatrix([[cols[j][i] for j in range(len(cols))]
                      for i in range(dim_v(1, k))])
    rk, ker = matrix_rank_kernel(mat)
    direct = (rk == len(vp) + len(vs) == dim_v(1, k))
    return vp, vs, (len(vp), len(vs)), direct


def divides(r: BiForm, p: BiForm) -> bool:
    """Does the second-slot linear form r divide p = x (x) p1 + y (x) p2?

    True iff r divides both second-slot components exactly.
    """
    if r.is_zero():
        raise ValueError("zero divisor candidate")
    if r.bidegree != (0, 1):
        raise DegreeError("divisor must be linear in the second slot")
    if p.is_zero():
        return True
    comps = [p.poly.diff("x1"), p.poly.diff("y1")]
    for comp in comps:
        if comp.is_zero():
            continue
        try:
            comp / r.poly
        except (ValueError, ZeroDivisionError):
            return False
    return True


# -- property checks -------------------------------------------------------


def random_biform(n: int, m: int, rng: _Lcg, max_mag: int = 9) -> BiForm:
    coeffs = []
    for _ in range(dim_v(n, m)):
        num = rng.next_int(2 * max_mag + 1) - max_mag
        coeffs.append(Fraction(num))
    return from_coords(n, m, coeffs)


def equivariance_check(p1: int, p2: int, bideg1: Tuple[int, int],
                       bideg2: Tuple[int, int], trials: int, seed: int,
                       mutate: bool = False) -> dict:
    """Verify X<u,v> = <Xu,v> + <u,Xv> for all 6 generators, exactly.

    With mutate=True a wrong sign is injected to demonstrate the check is
    not vacuous.
    """
    rng = _Lcg(seed)
    failures = 0
    for _ in range(trials):
        u = random_biform(*bideg1, rng)
        v = random_biform(*bideg2, rng)
        for name in GENERATOR_NAMES:
            lhs = generator_action(name, transvectant2(u, v, p1, p2))
            rhs = (transvectant2(generator_action(name, u), v, p1, p2)
                   + transvectant2(u, generator_action(name, v), p1, p2))
            if mutate:
                rhs = (transvectant2(generator_action(name, u), v, p1, p2)
                       - transvectant2(u, generator_action(name, v), p1, p2))
            if not (lhs - rhs).is_zero():
                failures += 1
    return {"trials": trials, "generators": len(GENERATOR_NAMES),
            "failures": failures, "ok": failures == 0}
