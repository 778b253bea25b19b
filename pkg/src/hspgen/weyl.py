"""Polynomial-coefficient differential operators in normal order.

An operator is stored as a commutative :class:`Polynomial` in which every
``xi[i,j]`` stands for the derivation ``d[i,j]`` written to the right of all
coefficients.  Normal ordering is therefore built into the representation,
the full symbol is the stored polynomial itself, and composition is

    (f d^a) o (g d^b) = f * sum_c binom(a, c) (d^c g) d^(a - c + b).

Coefficients may involve ``s`` (and any other non-``z`` variable), which
the derivations treat as constants.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import comb
from typing import Iterable, Mapping

from hspgen.ring import ONE, ZERO, XI, Z, Polynomial, Scalar, VariableId


class WeylError(ValueError):
    pass


def _partner(v: VariableId) -> VariableId:
    if v.kind != "xi":
        raise WeylError(f"{v} is not a derivation variable")
    return VariableId("z", v.indices)


class WeylOperator:
    """Normally ordered element of the Weyl algebra."""

    __slots__ = ("poly",)

    def __init__(self, poly: Polynomial | Scalar = ZERO):
        if not isinstance(poly, Polynomial):
            poly = Polynomial.constant(poly)
        self.poly = poly

    @classmethod
    def mult(cls, p: Polynomial | VariableId) -> "WeylOperator":
        """Multiplication operator by a coefficient polynomial."""
        if isinstance(p, VariableId):
            p = Polynomial.variable(p)
        if any(v.kind == "xi" for v in p.variables()):
            raise WeylError("coefficient contains a derivation variable")
        return cls(p)

    @classmethod
    def d(cls, i: int, j: int) -> "WeylOperator":
        """The derivation with respect to ``z[i,j]``."""
        return cls(Polynomial.variable(XI(i, j)))

    @classmethod
    def z(cls, i: int, j: int) -> "WeylOperator":
        return cls(Polynomial.variable(Z(i, j)))

    # arithmetic
    def __add__(self, other) -> "WeylOperator":
        return WeylOperator(self.poly + _lift(other).poly)

    __radd__ = __add__

    def __sub__(self, other) -> "WeylOperator":
        return WeylOperator(self.poly - _lift(other).poly)

    def __rsub__(self, other) -> "WeylOperator":
        return WeylOperator(_lift(other).poly - self.poly)

    def __neg__(self) -> "WeylOperator":
        return WeylOperator(-self.poly)

    def __mul__(self, other) -> "WeylOperator":
        """Composition for operators; scaling for scalars and coefficient
        polynomials placed on the left."""
        if isinstance(other, WeylOperator):
            return weyl_compose(self, other)
        if isinstance(other, (int, Fraction)):
            return WeylOperator(self.poly * other)
        if isinstance(other, Polynomial):
            return weyl_compose(self, WeylOperator.mult(other))
        return NotImplemented

    def __rmul__(self, other) -> "WeylOperator":
        if isinstance(other, (int, Fraction)):
            return WeylOperator(self.poly * other)
        if isinstance(other, Polynomial):
            return WeylOperator(WeylOperator.mult(other).poly * self.poly)
        return NotImplemented

    __matmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, WeylOperator):
            return self.poly == other.poly
        if isinstance(other, (int, Fraction, Polynomial)):
            return self.poly == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash(("weyl", self.poly))

    def __bool__(self) -> bool:
        return bool(self.poly)

    def order(self) -> int:
        """Highest total derivation order (-1 for the zero operator)."""
        return self.poly.degree_in(v for v in self.poly.variables() if v.kind == "xi")

    def derivation_variables(self) -> set[VariableId]:
        return {_partner(v) for v in self.poly.variables() if v.kind == "xi"}

    def substitute(self, bindings: Mapping[VariableId, Polynomial | Scalar]) -> "WeylOperator":
        """Substitute coefficient variables (not ``z`` or derivations)."""
        bad = [v for v in bindings if v.kind in ("z", "xi")]
        if bad:
            raise WeylError(f"cannot substitute coordinate variables {bad}")
        return WeylOperator(self.poly.substitute(bindings))

    def to_text(self) -> str:
        if not self.poly:
            return "0"
        parts = []
        for ex, c in self.poly.terms():
            coeff = [v for v in ex if v[0].kind != "xi"]
            ders = [v for v in ex if v[0].kind == "xi"]
            bits = [str(c)]
            for v, e in coeff:
                bits.append(str(v) if e == 1 else f"{v}^{e}")
            for v, e in ders:
                name = "d[" + ",".join(map(str, v.indices)) + "]"
                bits.append(name if e == 1 else f"{name}^{e}")
            parts.append(" * ".join(bits))
        return " + ".join(parts)

    __str__ = to_text

    def __repr__(self) -> str:
        return f"WeylOperator({self.to_text()!r})"


def _lift(x) -> WeylOperator:
    if isinstance(x, WeylOperator):
        return x
    if isinstance(x, (int, Fraction)):
        return WeylOperator(Polynomial.constant(x))
    if isinstance(x, Polynomial):
        return WeylOperator.mult(x)
    raise TypeError(f"cannot use {x!r} as an operator")


ZERO_OP = WeylOperator(ZERO)
ONE_OP = WeylOperator(ONE)


def _split(term_exps) -> tuple[dict[VariableId, int], tuple[tuple[VariableId, int], ...]]:
    coeff = {}
    ders = []
    for v, e in term_exps:
        if v.kind == "xi":
            ders.append((v, e))
        else:
            coeff[v] = e
    return coeff, tuple(ders)


def _derivative(p: Polynomial, ders: Iterable[tuple[VariableId, int]]) -> Polynomial:
    for xv, e in ders:
        p = p.diff(_partner(xv), e)
        if not p:
            break
    return p


def weyl_compose(a: WeylOperator, b: WeylOperator) -> WeylOperator:
    """The product ``a o b`` in normal order."""
    acc = ZERO
    dcache: dict[tuple, Polynomial] = {}
    for exps, c in a.poly.terms():
        coeff, ders = _split(exps)
        left = Polynomial.from_terms([(coeff, c)])
        if not ders:
            acc = acc + left * b.poly
            continue
        ranges = [range(e + 1) for _, e in ders]
        inner = ZERO
        for gamma in itertools.product(*ranges):
            key = tuple((xv, g) for (xv, _), g in zip(ders, gamma) if g)
            db = dcache.get(key)
            if db is None:
                db = dcache[key] = _derivative(b.poly, key)
            if not db:
                continue
            mult = 1
            rest = {}
            for (xv, e), g in zip(ders, gamma):
                mult *= comb(e, g)
                if e - g:
                    rest[xv] = e - g
            inner = inner + db * Polynomial.from_terms([(rest, mult)])
        acc = acc + left * inner
    return WeylOperator(acc)


def weyl_commutator(a: WeylOperator, b: WeylOperator) -> WeylOperator:
    return WeylOperator(weyl_compose(a, b).poly - weyl_compose(b, a).poly)


def weyl_apply(a: WeylOperator, p: Polynomial) -> Polynomial:
    """Apply ``a`` to a polynomial in the ``z`` variables."""
    bad = [v for v in p.variables() if v.kind != "z"]
    if bad:
        raise WeylError(f"operand must only involve z variables, found {sorted(bad)}")
    out = ZERO
    for exps, c in a.poly.terms():
        coeff, ders = _split(exps)
        dp = _derivative(p, ders)
        if dp:
            out = out + Polynomial.from_terms([(coeff, c)]) * dp
    return out


def weyl_symbol(a: WeylOperator) -> Polynomial:
    """Full symbol: every ``d[i,j]`` replaced by ``xi[i,j]``, all orders kept."""
    return a.poly


def from_symbol(p: Polynomial) -> WeylOperator:
    """Operator whose normal form has full symbol ``p``."""
    return WeylOperator(p)
