"""Exact sparse multivariate polynomials over the rationals.

A polynomial is stored as a map from exponent tuples to nonzero Fraction
coefficients, together with an ordered tuple of variable names.  The
representation is canonical: variables that appear in no term are dropped,
zero coefficients are never stored, and the variable order is the fixed
global one (form variables x1, y1, x2, y2 first, then parameter names
sorted).  Two polynomials are equal iff their canonical forms are equal,
so identity testing is a dict comparison.

The zero polynomial has no variables and no terms.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Union

Scalar = Fraction

# Form variables come first in every merged context, in this order.
_FORM_VARS = ("x1", "y1", "x2", "y2")
_FORM_INDEX = {v: i for i, v in enumerate(_FORM_VARS)}


def _var_key(name: str):
    if name in _FORM_INDEX:
        return (0, _FORM_INDEX[name], "")
    return (1, 0, name)


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"not an exact scalar: {c!r}")


class Poly:
    """Immutable sparse polynomial with exact rational coefficients."""

    __slots__ = ("vars", "terms")

    def __init__(self, vars: Iterable[str] = (), terms: Mapping[tuple, Scalar] = None):
        vs = tuple(vars)
        tm = {} if terms is None else dict(terms)
        # drop zero coefficients
        tm = {e: _as_fraction(c) for e, c in tm.items() if c != 0}
        # drop unused variables and sort the rest into the global order
        if vs:
            used = [i for i in range(len(vs)) if any(e[i] for e in tm)]
            order = sorted(used, key=lambda i: _var_key(vs[i]))
            vs2 = tuple(vs[i] for i in order)
            tm = {tuple(e[i] for i in order): c for e, c in tm.items()}
            vs, tm = vs2, tm
        object.__setattr__(self, "vars", vs)
        object.__setattr__(self, "terms", tm)

    def __setattr__(self, *a):
        raise AttributeError("Poly is immutable")

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero() -> "Poly":
        return Poly()

    @staticmethod
    def const(c) -> "Poly":
        c = _as_fraction(c)
        if c == 0:
            return Poly()
        return Poly((), {(): c})

    @staticmethod
    def var(name: str, power: int = 1, coeff=1) -> "Poly":
        if power < 0:
            raise ValueError("negative power")
        if power == 0:
            return Poly.const(coeff)
        return Poly((name,), {(power,): _as_fraction(coeff)})

    @staticmethod
    def monomial(assignment: Mapping[str, int], coeff=1) -> "Poly":
        names = tuple(assignment)
        exps = tuple(assignment[n] for n in names)
        return Poly(names, {exps: _as_fraction(coeff)})

    # -- basic queries -------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(all(x == 0 for x in e) for e in self.terms)

    def constant_value(self) -> Scalar:
        if not self.terms:
            return Fraction(0)
        if not self.is_constant():
            raise ValueError(f"not a constant: {self}")
        return next(iter(self.terms.values()))

    def degree(self, var: str = None) -> int:
        """Total degree, or degree in one variable; zero poly has degree 0."""
        if not self.terms:
            return 0
        if var is None:
            return max(sum(e) for e in self.terms)
        if var not in self.vars:
            return 0
        i = self.vars.index(var)
        return max(e[i] for e in self.terms)

    # -- arithmetic ----------------------------------------------------

    def _aligned(self, other: "Poly"):
        """Common variable tuple and re-keyed term dicts for self, other."""
        if self.vars == other.vars:
            return self.vars, self.terms, other.terms
        merged = sorted(set(self.vars) | set(other.vars), key=_var_key)
        merged = tuple(merged)

        def remap(p: "Poly"):
            pos = [merged.index(v) for v in p.vars]
            out = {}
            for e, c in p.terms.items():
                ne = [0] * len(merged)
                for i, x in zip(pos, e):
                    ne[i] = x
                out[tuple(ne)] = c
            return out

        return merged, remap(self), remap(other)

    def __add__(self, other) -> "Poly":
        other = _coerce(other)
        vs, a, b = self._aligned(other)
        out = dict(a)
        for e, c in b.items():
            s = out.get(e, Fraction(0)) + c
            if s == 0:
                out.pop(e, None)
            else:
                out[e] = s
        return Poly(vs, out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "Poly":
        return _coerce(other) + (-self)

    def __mul__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)):
            c = _as_fraction(other)
            if c == 0:
                return Poly()
            return Poly(self.vars, {e: k * c for e, k in self.terms.items()})
        other = _coerce(other)
        vs, a, b = self._aligned(other)
        out = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                s = out.get(e, Fraction(0)) + c1 * c2
                if s == 0:
                    out.pop(e, None)
                else:
                    out[e] = s
        return Poly(vs, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative int")
        result = Poly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __truediv__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)):
            c = _as_fraction(other)
            if c == 0:
                raise ZeroDivisionError("division by zero scalar")
            return self * (Fraction(1) / c)
        return divexact(self, _coerce(other))

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.vars == other.vars and self.terms == other.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    # -- calculus ------------------------------------------------------

    def diff(self, var: str, order: int = 1) -> "Poly":
        """Iterated formal partial derivative."""
        if order < 0:
            raise ValueError("negative order")
        p = self
        for _ in range(order):
            if var not in p.vars:
                return Poly()
            i = p.vars.index(var)
            out = {}
            for e, c in p.terms.items():
                if e[i] == 0:
                    continue
                ne = e[:i] + (e[i] - 1,) + e[i + 1:]
                out[ne] = out.get(ne, Fraction(0)) + c * e[i]
            p = Poly(p.vars, out)
        return p

    def subs(self, assignment: Mapping[str, Union["Poly", Scalar, int]]) -> "Poly":
        """Simultaneous substitution; unassigned variables stay."""
        if not any(v in self.vars for v in assignment):
            return self
        repl = {}
        for v, val in assignment.items():
            repl[v] = val if isinstance(val, Poly) else Poly.const(val)
        total = Poly()
        pow_cache = {}
        for e, c in self.terms.items():
            factor = Poly.const(c)
            for v, k in zip(self.vars, e):
                if k == 0:
                    continue
                if v in repl:
                    key = (v, k)
                    if key not in pow_cache:
                        pow_cache[key] = repl[v] ** k
                    factor = factor * pow_cache[key]
                else:
                    factor = factor * Poly.var(v, k)
            total = total + factor
        return total

    def eval(self, assignment: Mapping[str, Scalar]) -> Scalar:
        """Evaluate at a full rational point."""
        missing = [v for v in self.vars if v not in assignment]
        if missing:
            raise ValueError(f"unassigned variables: {missing}")
        total = Fraction(0)
        for e, c in self.terms.items():
            val = c
            for v, k in zip(self.vars, e):
                if k:
                    val *= _as_fraction(assignment[v]) ** k
            total += val
        return total

    def coefficients_in(self, vars: Iterable[str]) -> dict:
        """Collect by exponents of the given variables.

        Returns {exponent tuple over `vars`: Poly in the remaining
        variables}.
        """
        vs = tuple(vars)
        pos = {v: i for i, v in enumerate(vs)}
        rest = [v for v in self.vars if v not in pos]
        out = {}
        for e, c in self.terms.items():
            key = [0] * len(vs)
            rexp = []
            for v, k in zip(self.vars, e):
                if v in pos:
                    key[pos[v]] = k
                else:
                    rexp.append(k)
            key = tuple(key)
            part = out.setdefault(key, {})
            re = tuple(rexp)
            part[re] = part.get(re, Fraction(0)) + c
        return {k: Poly(rest, tm) for k, tm in out.items()}

    # -- presentation ---------------------------------------------------

    def __repr__(self) -> str:
        return f"Poly({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = "*".join(
                v if k == 1 else f"{v}^{k}"
                for v, k in zip(self.vars, e) if k
            )
            if not mono:
                bits.append(str(c))
            elif c == 1:
                bits.append(mono)
            elif c == -1:
                bits.append(f"-{mono}")
            else:
                bits.append(f"{c}*{mono}")
        s = " + ".join(bits)
        return s.replace("+ -", "- ")

    # -- serialization --------------------------------------------------

    def to_json(self) -> dict:
        terms = [
            {"coeff": f"{c.numerator}/{c.denominator}", "exps": list(e)}
            for e, c in sorted(self.terms.items())
        ]
        return {"vars": list(self.vars), "terms": terms}

    @staticmethod
    def from_json(data: dict) -> "Poly":
        vs = tuple(data["vars"])
        tm = {tuple(t["exps"]): Fraction(t["coeff"]) for t in data["terms"]}
        return Poly(vs, tm)


def _coerce(x) -> Poly:
    if isinstance(x, Poly):
        return x
    if isinstance(x, (int, Fraction)):
        return Poly.const(x)
    raise TypeError(f"cannot coerce {x!r} to Poly")


def divexact(p: Poly, q: Poly) -> Poly:
    """Exact polynomial division; raises if q does not divide p.

    Leading-term elimination in lexicographic order.  Used by the
    fraction-free determinant, where divisibility is guaranteed.
    """
    if q.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    if p.is_zero():
        return Poly()
    if q.is_constant():
        return p * (Fraction(1) / q.constant_value())
    vs, a, b = p._aligned(q)
    qlead = max(b)
    qc = b[qlead]
    quot = {}
    rem = dict(a)
    while rem:
        lead = max(rem)
        e = tuple(x - y for x, y in zip(lead, qlead))
        if any(x < 0 for x in e):
            raise ValueError("inexact polynomial division")
        c = rem[lead] / qc
        quot[e] = c
        for eb, cb in b.items():
            key = tuple(x + y for x, y in zip(e, eb))
            s = rem.get(key, Fraction(0)) - c * cb
            if s == 0:
                rem.pop(key, None)
            else:
                rem[key] = s
    return Poly(vs, quot)


# -- parsing of polynomial literals -------------------------------------


class ParseError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class _Parser:
    """Recursive-descent parser for literals like `3/2*x1^2*y2 - x2*y2`."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def _skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self):
        self._skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self) -> Poly:
        p = self._expr()
        self._skip()
        if self.pos != len(self.text):
            raise ParseError("trailing input", self.pos)
        return p

    def _expr(self) -> Poly:
        sign = 1
        while self._peek() and self._peek() in "+-":
            if self._peek() == "-":
                sign = -sign
            self.pos += 1
        total = self._term() * sign
        while self._peek() and self._peek() in "+-":
            op = self._peek()
            self.pos += 1
            t = self._term()
            total = total + t if op == "+" else total - t
        return total

    def _term(self) -> Poly:
        p = self._power()
        while True:
            ch = self._peek()
            if ch == "*":
                self.pos += 1
                p = p * self._power()
            elif ch == "/":
                self.pos += 1
                d = self._power()
                if not d.is_constant():
                    raise ParseError("can only divide by constants", self.pos)
                p = p / d.constant_value()
            elif ch == "(" or ch.isalpha():
                p = p * self._power()  # implicit multiplication
            else:
                return p

    def _power(self) -> Poly:
        base = self._atom()
        if self._peek() == "^":
            self.pos += 1
            return base ** self._int()
        if self.text[self.pos:self.pos + 2] == "**":
            self.pos += 2
            return base ** self._int()
        return base

    def _int(self) -> int:
        self._skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            raise ParseError("expected integer", self.pos)
        return int(self.text[start:self.pos])

    def _atom(self) -> Poly:
        ch = self._peek()
        if ch == "(":
            self.pos += 1
            p = self._expr()
            if self._peek() != ")":
                raise ParseError("expected ')'", self.pos)
            self.pos += 1
            return p
        if ch == "-":
            self.pos += 1
            return -self._atom()
        if ch.isdigit():
            return Poly.const(self._int())
        if ch.isalpha() or ch == "_":
            start = self.pos
            while self.pos < len(self.text) and (
                self.text[self.pos].isalnum() or self.text[self.pos] == "_"
            ):
                self.pos += 1
            return Poly.var(self.text[start:self.pos])
        raise ParseError("unexpected character", self.pos)


def parse_poly(text: str) -> Poly:
    return _Parser(text).parse()
