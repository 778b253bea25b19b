"""Exact sparse multivariate polynomials over the rationals.

Variables are :class:`VariableId` values (``z[i,j]``, ``xi[i,j]``, ``u``,
``s`` plus free-form names for generic test matrices).  Each variable owns a
16-bit field in a process-wide registry, and a monomial is stored as a single
Python int packing all its exponents, so monomial multiplication is integer
addition.  Field positions depend on registration order and therefore never
leak out: text serialization, ordering and pickling all go through
:class:`VariableId`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, total_ordering
from typing import Iterable, Mapping, Union

from hspgen import kernels
from hspgen.kernels import NotDivisible

Coeff = Union[int, Fraction]
Scalar = Union[int, Fraction]

BITS = 16
_MASK = (1 << BITS) - 1
MAX_EXPONENT = (1 << (BITS - 1)) - 1

_KIND_RANK = {"z": 0, "xi": 1, "u": 2, "s": 3}


@total_ordering
@dataclass(frozen=True)
class VariableId:
    """A ring variable: a kind name plus an index tuple (possibly empty).

    Ordering is deterministic: ``z < xi < u < s < other kinds`` (other kinds
    alphabetically), then lexicographic on the indices.
    """

    kind: str
    indices: tuple[int, ...] = ()

    def sort_key(self) -> tuple:
        return (_KIND_RANK.get(self.kind, len(_KIND_RANK)), self.kind, self.indices)

    def __lt__(self, other: "VariableId") -> bool:
        if not isinstance(other, VariableId):
            return NotImplemented
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        if not self.indices:
            return self.kind
        return f"{self.kind}[{','.join(map(str, self.indices))}]"


def Z(i: int, j: int) -> VariableId:
    return VariableId("z", (i, j))


def XI(i: int, j: int) -> VariableId:
    return VariableId("xi", (i, j))


U = VariableId("u")
S = VariableId("s")


# -- registry -----------------------------------------------------------------

_slots: dict[VariableId, int] = {}
_vars: list[VariableId] = []
_guard = 0


def slot_of(v: VariableId) -> int:
    global _guard
    k = _slots.get(v)
    if k is None:
        k = len(_vars)
        _slots[v] = k
        _vars.append(v)
        _guard |= 1 << (k * BITS + BITS - 1)
    return k


def pack(exps: Mapping[VariableId, int]) -> int:
    m = 0
    for v, e in exps.items():
        if e < 0 or e > MAX_EXPONENT:
            raise ValueError(f"exponent {e} out of range for {v}")
        if e:
            m += e << (slot_of(v) * BITS)
    return m


@lru_cache(maxsize=1 << 17)
def unpack(m: int) -> tuple[tuple[VariableId, int], ...]:
    """Exponent list of a packed monomial, sorted by variable order."""
    out = []
    k = 0
    while m:
        e = m & _MASK
        if e:
            out.append((_vars[k], e))
        m >>= BITS
        k += 1
    out.sort(key=lambda ve: ve[0].sort_key())
    return tuple(out)


def exponent(m: int, v: VariableId) -> int:
    k = _slots.get(v)
    if k is None:
        return 0
    return (m >> (k * BITS)) & _MASK


def _mono_key(m: int) -> tuple:
    """Sort key putting monomials in descending graded-lex order."""
    ex = unpack(m)
    return (-sum(e for _, e in ex), tuple((v.sort_key(), -e) for v, e in ex))


def _coerce_coeff(c) -> Coeff:
    if isinstance(c, bool):
        c = int(c)
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    raise TypeError(f"unsupported coefficient {c!r}")


# -- polynomial ---------------------------------------------------------------


class Polynomial:
    """Immutable polynomial; equality is exact term-map equality."""

    __slots__ = ("_t", "_hash")

    def __init__(self, terms: Mapping[int, Coeff] | None = None):
        # ``terms`` is the packed internal form and must already be clean.
        self._t: dict[int, Coeff] = dict(terms) if terms else {}
        self._hash = None

    @classmethod
    def _wrap(cls, d: dict) -> "Polynomial":
        p = cls.__new__(cls)
        p._t = d
        p._hash = None
        return p

    # constructors
    @classmethod
    def constant(cls, c: Scalar) -> "Polynomial":
        c = _coerce_coeff(c)
        return cls._wrap({0: c} if c else {})

    @classmethod
    def variable(cls, v: VariableId, power: int = 1) -> "Polynomial":
        return cls._wrap({pack({v: power}): 1})

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[Mapping[VariableId, int], Scalar]]) -> "Polynomial":
        d: dict[int, Coeff] = {}
        for exps, c in terms:
            m = pack(exps)
            d[m] = d.get(m, 0) + _coerce_coeff(c)
        return cls._wrap(kernels.clean(d))

    # inspection
    def __bool__(self) -> bool:
        return bool(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def is_constant(self) -> bool:
        return not self._t or (len(self._t) == 1 and 0 in self._t)

    def constant_term(self) -> Coeff:
        return self._t.get(0, 0)

    def __len__(self) -> int:
        return len(self._t)

    def terms(self) -> list[tuple[tuple[tuple[VariableId, int], ...], Coeff]]:
        """Terms in canonical (descending graded-lex) order."""
        return [(unpack(m), self._t[m]) for m in sorted(self._t, key=_mono_key)]

    def variables(self) -> set[VariableId]:
        out: set[VariableId] = set()
        for m in self._t:
            out.update(v for v, _ in unpack(m))
        return out

    def total_degree(self) -> int:
        if not self._t:
            return -1
        return max(sum(e for _, e in unpack(m)) for m in self._t)

    def degree_in(self, vs: VariableId | Iterable[VariableId]) -> int:
        """Total degree in the given variable(s); -1 for the zero polynomial."""
        if isinstance(vs, VariableId):
            vs = (vs,)
        vs = tuple(vs)
        if not self._t:
            return -1
        return max(sum(exponent(m, v) for v in vs) for m in self._t)

    # arithmetic
    @staticmethod
    def _lift(x) -> "Polynomial":
        if isinstance(x, Polynomial):
            return x
        return Polynomial.constant(x)

    def __add__(self, other) -> "Polynomial":
        if not isinstance(other, (Polynomial, int, Fraction)):
            return NotImplemented
        return Polynomial._wrap(kernels.add(self._t, Polynomial._lift(other)._t))

    __radd__ = __add__

    def __sub__(self, other) -> "Polynomial":
        if not isinstance(other, (Polynomial, int, Fraction)):
            return NotImplemented
        return Polynomial._wrap(kernels.add(self._t, Polynomial._lift(other)._t, -1))

    def __rsub__(self, other) -> "Polynomial":
        if not isinstance(other, (Polynomial, int, Fraction)):
            return NotImplemented
        return Polynomial._lift(other) - self

    def __neg__(self) -> "Polynomial":
        return Polynomial._wrap({m: -c for m, c in self._t.items()})

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return Polynomial._wrap(kernels.mul(self._t, other._t))
        if isinstance(other, (int, Fraction)):
            return Polynomial._wrap(kernels.scale(self._t, _coerce_coeff(other)))
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative power")
        result = Polynomial.constant(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __truediv__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("polynomial division by zero")
            return Polynomial._wrap(kernels.scale(self._t, Fraction(1) / other))
        return NotImplemented

    def exact_div(self, other: "Polynomial | Scalar") -> "Polynomial":
        """Exact quotient; raises :class:`NotDivisible` on a remainder."""
        other = Polynomial._lift(other)
        return Polynomial._wrap(kernels.exact_div(self._t, other._t, _guard))

    # comparison
    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self._t == other._t
        if isinstance(other, (int, Fraction)):
            return self._t == Polynomial.constant(other)._t
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset((unpack(m), c) for m, c in self._t.items()))
        return self._hash

    # transformations
    def coeff_of(self, v: VariableId, degree: int) -> "Polynomial":
        """Coefficient of ``v**degree``, with ``v`` eliminated."""
        k = slot_of(v)
        sh = k * BITS
        drop = degree << sh
        out = {m - drop: c for m, c in self._t.items() if (m >> sh) & _MASK == degree}
        return Polynomial._wrap(out)

    def diff(self, v: VariableId, order: int = 1) -> "Polynomial":
        k = _slots.get(v)
        if k is None or order == 0:
            return self if order == 0 else Polynomial()
        sh = k * BITS
        out = {}
        for m, c in self._t.items():
            e = (m >> sh) & _MASK
            if e >= order:
                f = 1
                for t in range(e - order + 1, e + 1):
                    f *= t
                out[m - (order << sh)] = c * f
        return Polynomial._wrap(kernels.clean(out))

    def substitute(self, bindings: Mapping[VariableId, "Polynomial | Scalar"]) -> "Polynomial":
        """Simultaneous substitution; unbound variables are left alone."""
        binds = {v: Polynomial._lift(p) for v, p in bindings.items() if v in _slots}
        if not binds:
            return self
        fields = {v: _slots[v] * BITS for v in binds}
        powers: dict[tuple[VariableId, int], Polynomial] = {}
        acc: dict[int, Coeff] = {}
        for m, c in self._t.items():
            kept = m
            factor: dict[int, Coeff] = {0: c}
            for v, sh in fields.items():
                e = (m >> sh) & _MASK
                if e:
                    kept -= e << sh
                    key = (v, e)
                    pw = powers.get(key)
                    if pw is None:
                        pw = powers[key] = binds[v] ** e
                    factor = kernels.mul(factor, pw._t)
            if factor:
                kernels.addmul(acc, {kept: 1}, factor)
        return Polynomial._wrap(kernels.clean(acc))

    # text
    def to_text(self) -> str:
        if not self._t:
            return "0"
        parts = []
        for ex, c in self.terms():
            bits = [str(c)]
            for v, e in ex:
                bits.append(str(v) if e == 1 else f"{v}^{e}")
            parts.append(" * ".join(bits))
        return " + ".join(parts)

    __str__ = to_text

    def __repr__(self) -> str:
        return f"Polynomial({self.to_text()!r})"

    def __reduce__(self):
        return (parse_poly, (self.to_text(),))


# -- module-level API ---------------------------------------------------------

ZERO = Polynomial()
ONE = Polynomial.constant(1)


def var(v: VariableId) -> Polynomial:
    return Polynomial.variable(v)


def const(c: Scalar) -> Polynomial:
    return Polynomial.constant(c)


def poly_add(a: Polynomial, b: Polynomial) -> Polynomial:
    return a + b


def poly_mul(a: Polynomial, b: Polynomial) -> Polynomial:
    return a * b


def poly_exact_div(a: Polynomial, b: Polynomial) -> Polynomial:
    return a.exact_div(b)


def poly_substitute(p: Polynomial, bindings: Mapping[VariableId, Polynomial | Scalar]) -> Polynomial:
    return p.substitute(bindings)


def poly_coeff_of(p: Polynomial, v: VariableId, degree: int) -> Polynomial:
    return p.coeff_of(v, degree)


_FACTOR = re.compile(r"^([A-Za-z_][A-Za-z_0-9]*)(?:\[(\d+(?:,\d+)*)\])?(?:\^(\d+))?$")


def parse_variable(text: str) -> VariableId:
    m = _FACTOR.match(text.strip())
    if not m or m.group(3):
        raise ValueError(f"not a variable: {text!r}")
    idx = tuple(int(x) for x in m.group(2).split(",")) if m.group(2) else ()
    return VariableId(m.group(1), idx)


def parse_poly(text: str) -> Polynomial:
    """Inverse of :meth:`Polynomial.to_text`."""
    text = text.strip()
    if text == "0":
        return Polynomial()
    d: dict[int, Coeff] = {}
    for term in text.split(" + "):
        factors = [f.strip() for f in term.split("*")]
        try:
            c = _coerce_coeff(Fraction(factors[0]))
            factors = factors[1:]
        except ValueError:
            c = 1
        exps: dict[VariableId, int] = {}
        for f in factors:
            m = _FACTOR.match(f)
            if not m:
                raise ValueError(f"cannot parse factor {f!r} in {term!r}")
            idx = tuple(int(x) for x in m.group(2).split(",")) if m.group(2) else ()
            v = VariableId(m.group(1), idx)
            exps[v] = exps.get(v, 0) + int(m.group(3) or 1)
        key = pack(exps)
        d[key] = d.get(key, 0) + c
    return Polynomial._wrap(kernels.clean(d))


__all__ = [
    "MAX_EXPONENT",
    "NotDivisible",
    "ONE",
    "Polynomial",
    "S",
    "U",
    "VariableId",
    "XI",
    "Z",
    "ZERO",
    "const",
    "parse_poly",
    "parse_variable",
    "poly_add",
    "poly_coeff_of",
    "poly_exact_div",
    "poly_mul",
    "poly_substitute",
    "var",
]
