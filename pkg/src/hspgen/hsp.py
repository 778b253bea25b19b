"""Lie-algebra data and symbol matrices for the three classical families.

``SOstar`` (alternating coordinates ``z[i,j]``, i<j), ``Sp`` (symmetric,
i<=j) and ``SU`` (rectangular p x q).  Everything is exact: basis matrices
carry ``Fraction`` entries and every symbol is a :class:`Polynomial`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from hspgen.matrix import (
    PolyMatrix,
    det_bareiss,
    det_leibniz,
    pfaffian_expansion,
    pfaffian_matchings,
    submatrix,
    subsets,
)
from hspgen.ring import ONE, S, U, XI, ZERO, Z, Polynomial, var
from hspgen.weyl import ONE_OP, ZERO_OP, WeylOperator, weyl_compose, weyl_symbol

SparseMatrix = dict  # {(row, col): Fraction}, 0-based


class FamilyKind(str, enum.Enum):
    SOSTAR = "sostar"
    SP = "sp"
    SU = "su"


class SigmaMode(str, enum.Enum):
    """How the u-deformation is spread over the symbol matrix.

    ``BLOCK`` adds tau * [[-1, z], [0, 1]] (the block form used to prove the
    conjugation theorem); ``LITERAL`` deforms the individual dual-basis
    symbols.  They agree except for SU with p != q, where only ``BLOCK``
    reproduces the stated diagonal.
    """

    BLOCK = "block"
    LITERAL = "literal"


@dataclass(frozen=True)
class PairFamily:
    kind: FamilyKind
    n: int = 0
    p: int = 0
    q: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", FamilyKind(self.kind))
        if self.kind is FamilyKind.SU:
            if self.q < 1 or self.p < self.q:
                raise ValueError(f"SU needs p >= q >= 1, got p={self.p}, q={self.q}")
            object.__setattr__(self, "n", 0)
        else:
            if self.n < 1:
                raise ValueError(f"{self.kind.value} needs n >= 1, got {self.n}")
            object.__setattr__(self, "p", 0)
            object.__setattr__(self, "q", 0)

    @classmethod
    def sostar(cls, n: int) -> "PairFamily":
        return cls(FamilyKind.SOSTAR, n=n)

    @classmethod
    def sp(cls, n: int) -> "PairFamily":
        return cls(FamilyKind.SP, n=n)

    @classmethod
    def su(cls, p: int, q: int) -> "PairFamily":
        return cls(FamilyKind.SU, p=p, q=q)

    @property
    def N(self) -> int:
        return self.p + self.q if self.kind is FamilyKind.SU else 2 * self.n

    @property
    def rank(self) -> int:
        if self.kind is FamilyKind.SOSTAR:
            return self.n // 2
        return self.q if self.kind is FamilyKind.SU else self.n

    @property
    def symmetry(self) -> str:
        return {FamilyKind.SOSTAR: "alternating", FamilyKind.SP: "symmetric", FamilyKind.SU: "rectangular"}[self.kind]

    @property
    def split(self) -> int:
        """Size of the upper-left block."""
        return self.p if self.kind is FamilyKind.SU else self.n

    @property
    def coord_shape(self) -> tuple[int, int]:
        return (self.p, self.q) if self.kind is FamilyKind.SU else (self.n, self.n)

    def variable_keys(self) -> list[tuple[int, int]]:
        r, c = self.coord_shape
        if self.kind is FamilyKind.SOSTAR:
            return [(i, j) for i in range(1, r + 1) for j in range(i + 1, r + 1)]
        if self.kind is FamilyKind.SP:
            return [(i, j) for i in range(1, r + 1) for j in range(i, r + 1)]
        return [(i, j) for i in range(1, r + 1) for j in range(1, c + 1)]

    @property
    def dimension(self) -> int:
        """Dimension of the Lie algebra."""
        N = self.N
        if self.kind is FamilyKind.SOSTAR:
            return N * (N - 1) // 2
        if self.kind is FamilyKind.SP:
            return self.n * (2 * self.n + 1)
        return N * N - 1

    def canonical(self, i: int, j: int) -> tuple[int, tuple[int, int] | None]:
        """Sign and stored key for the coordinate at position (i, j)."""
        r, c = self.coord_shape
        if not (1 <= i <= r and 1 <= j <= c):
            raise IndexError(f"coordinate ({i},{j}) outside {r}x{c}")
        if self.kind is FamilyKind.SOSTAR:
            if i == j:
                return 0, None
            return (1, (i, j)) if i < j else (-1, (j, i))
        if self.kind is FamilyKind.SP:
            return 1, (min(i, j), max(i, j))
        return 1, (i, j)

    def params(self) -> dict[str, int]:
        if self.kind is FamilyKind.SU:
            return {"p": self.p, "q": self.q}
        return {"n": self.n}

    @property
    def name(self) -> str:
        label = {FamilyKind.SOSTAR: "SOstar", FamilyKind.SP: "Sp", FamilyKind.SU: "SU"}[self.kind]
        return label + "(" + ",".join(f"{k}={v}" for k, v in self.params().items()) + ")"

    def __str__(self) -> str:
        return self.name


# -- coordinates --------------------------------------------------------------


def z_entry(f: PairFamily, i: int, j: int) -> Polynomial:
    sign, key = f.canonical(i, j)
    if not sign:
        return ZERO
    v = var(Z(*key))
    return v if sign > 0 else -v


def xi_entry(f: PairFamily, i: int, j: int) -> Polynomial:
    sign, key = f.canonical(i, j)
    if not sign:
        return ZERO
    v = var(XI(*key))
    return v if sign > 0 else -v


def xi_tilde(f: PairFamily, i: int, j: int) -> Polynomial:
    """xi with the diagonal doubled for the symmetric family."""
    x = xi_entry(f, i, j)
    return x * 2 if f.kind is FamilyKind.SP and i == j else x


def d_entry(f: PairFamily, i: int, j: int) -> WeylOperator:
    return WeylOperator(xi_entry(f, i, j))


def d_tilde(f: PairFamily, i: int, j: int) -> WeylOperator:
    return WeylOperator(xi_tilde(f, i, j))


def z_matrix(f: PairFamily) -> PolyMatrix:
    r, c = f.coord_shape
    return PolyMatrix.build(r, c, lambda i, j: z_entry(f, i + 1, j + 1))


def xi_matrix(f: PairFamily, tilde: bool = False) -> PolyMatrix:
    r, c = f.coord_shape
    get = xi_tilde if tilde else xi_entry
    return PolyMatrix.build(r, c, lambda i, j: get(f, i + 1, j + 1))


def z_block(f: PairFamily) -> PolyMatrix:
    """Upper-right block of u(z): z~ J_n for SOstar/Sp, z for SU."""
    m = z_matrix(f)
    if f.kind is FamilyKind.SU:
        return m
    n = f.n
    return PolyMatrix.build(n, n, lambda i, j: m[i, n - 1 - j])


def gamma1(f: PairFamily) -> Polynomial:
    return gamma_k(f, 1) if f.rank >= 1 else ZERO


# -- sparse rational matrices -------------------------------------------------


def _smul(a: SparseMatrix, b: SparseMatrix) -> SparseMatrix:
    rows: dict[int, list] = {}
    for (k, j), v in b.items():
        rows.setdefault(k, []).append((j, v))
    out: SparseMatrix = {}
    for (i, k), va in a.items():
        for j, vb in rows.get(k, ()):
            out[i, j] = out.get((i, j), 0) + va * vb
    return {k: v for k, v in out.items() if v}


def _sadd(a: SparseMatrix, b: SparseMatrix, scale=1) -> SparseMatrix:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + scale * v
    return {k: v for k, v in out.items() if v}


def bracket(a: SparseMatrix, b: SparseMatrix) -> SparseMatrix:
    return _sadd(_smul(a, b), _smul(b, a), -1)


def _trace_product(a: SparseMatrix, b: SparseMatrix) -> Fraction:
    return sum((v * b.get((j, i), 0) for (i, j), v in a.items()), Fraction(0))


def sparse_to_polymatrix(m: SparseMatrix, size: int) -> PolyMatrix:
    return PolyMatrix.build(size, size, lambda i, j: Polynomial.constant(m.get((i, j), 0)))


# -- basis --------------------------------------------------------------------


@dataclass(frozen=True)
class BasisElement:
    """A labelled Lie algebra element; ``label`` is e.g. ``("X0", 1, 2)``."""

    label: tuple
    size: int
    entries: tuple[tuple[tuple[int, int], Fraction], ...] = field(compare=False)

    @property
    def matrix(self) -> SparseMatrix:
        return dict(self.entries)

    @property
    def name(self) -> str:
        kind, *idx = self.label
        return f"{kind}[{','.join(map(str, idx))}]"

    def to_polymatrix(self) -> PolyMatrix:
        return sparse_to_polymatrix(self.matrix, self.size)

    def __str__(self) -> str:
        return self.name


def _element(label: tuple, size: int, m: SparseMatrix) -> BasisElement:
    m = {k: Fraction(v) for k, v in m.items() if v}
    return BasisElement(label, size, tuple(sorted(m.items())))


def _unit(N: int, terms: Iterable[tuple[int, int, int]]) -> SparseMatrix:
    """Sparse matrix from 1-based (row, col, coeff) triples."""
    out: SparseMatrix = {}
    for i, j, c in terms:
        out[i - 1, j - 1] = out.get((i - 1, j - 1), 0) + c
    return {k: v for k, v in out.items() if v}


def neg_index(f: PairFamily, i: int) -> int:
    """The index written -i, i.e. 2n+1-i."""
    return 2 * f.n + 1 - i


@lru_cache(maxsize=None)
def build_basis(f: PairFamily) -> tuple[BasisElement, ...]:
    N = f.N
    out: list[BasisElement] = []
    if f.kind is FamilyKind.SU:
        p, q = f.p, f.q
        for i in range(1, N):
            out.append(_element(("H", i), N, _unit(N, [(i, i, 1), (N, N, -1)])))
        for i in range(1, p + 1):
            for j in range(1, p + 1):
                if i != j:
                    out.append(_element(("E+", i, j), N, _unit(N, [(i, j, 1)])))
        for i in range(1, q + 1):
            for j in range(1, q + 1):
                if i != j:
                    out.append(_element(("E-", i, j), N, _unit(N, [(p + i, p + j, 1)])))
        for i in range(1, p + 1):
            for j in range(1, q + 1):
                out.append(_element(("X+", i, j), N, _unit(N, [(i, p + j, 1)])))
        for i in range(1, p + 1):
            for j in range(1, q + 1):
                out.append(_element(("X-", i, j), N, _unit(N, [(p + j, i, 1)])))
        return tuple(out)

    n = f.n
    sg = -1 if f.kind is FamilyKind.SOSTAR else 1
    ng = lambda i: neg_index(f, i)  # noqa: E731
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            out.append(_element(("X0", i, j), N, _unit(N, [(i, j, 1), (ng(j), ng(i), -1)])))
    keys = f.variable_keys()
    for i, j in keys:
        out.append(_element(("X+", i, j), N, _unit(N, [(i, ng(j), 1), (j, ng(i), sg)])))
    for i, j in keys:
        out.append(_element(("X-", i, j), N, _unit(N, [(ng(j), i, 1), (ng(i), j, sg)])))
    return tuple(out)


def basis_index(f: PairFamily) -> dict[tuple, int]:
    return {b.label: k for k, b in enumerate(build_basis(f))}


def form_matrix(f: PairFamily) -> SparseMatrix | None:
    """The matrix J of the defining relation  X^T J + J X = 0  (None for SU)."""
    N, n = f.N, f.n
    if f.kind is FamilyKind.SOSTAR:
        return {(i, N - 1 - i): Fraction(1) for i in range(N)}
    if f.kind is FamilyKind.SP:
        out = {}
        for i in range(n):
            out[i, N - 1 - i] = Fraction(1)
            out[n + i, n - 1 - i] = Fraction(-1)
        return out
    return None


def _transpose(m: SparseMatrix) -> SparseMatrix:
    return {(j, i): v for (i, j), v in m.items()}


def satisfies_relation(f: PairFamily, m: SparseMatrix) -> bool:
    """Whether ``m`` lies in the complexified Lie algebra of ``f``."""
    J = form_matrix(f)
    if J is None:
        return sum((v for (i, j), v in m.items() if i == j), Fraction(0)) == 0
    return not _sadd(_smul(_transpose(m), J), _smul(J, m))


def bilinear_form(f: PairFamily, X: SparseMatrix | BasisElement, Y: SparseMatrix | BasisElement) -> Fraction:
    """tr(XY) for SU, tr(XY)/2 for SOstar and Sp."""
    X = X.matrix if isinstance(X, BasisElement) else X
    Y = Y.matrix if isinstance(Y, BasisElement) else Y
    for m in (X, Y):
        if any(i >= f.N or j >= f.N for i, j in m):
            raise ValueError(f"matrix larger than {f.N}x{f.N}")
    t = _trace_product(X, Y)
    return t if f.kind is FamilyKind.SU else t / 2


def _invert(rows: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(rows)
    a = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            raise ZeroDivisionError("Gram matrix is singular")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                c = a[r][col]
                a[r] = [x - c * y for x, y in zip(a[r], a[col])]
    return [r[n:] for r in a]


@lru_cache(maxsize=None)
def _gram_inverse(f: PairFamily) -> tuple[tuple[Fraction, ...], ...]:
    basis = build_basis(f)
    gram = [[bilinear_form(f, a, b) for b in basis] for a in basis]
    return tuple(tuple(r) for r in _invert(gram))


@lru_cache(maxsize=None)
def dual_basis(f: PairFamily) -> tuple[BasisElement, ...]:
    """Elements X_i^v with B(X_i, X_j^v) = delta_ij, by Gram inversion."""
    basis = build_basis(f)
    ginv = _gram_inverse(f)
    out = []
    for a, row in zip(basis, ginv):
        m: SparseMatrix = {}
        for c, b in zip(row, basis):
            if c:
                m = _sadd(m, b.matrix, c)
        out.append(_element(a.label, f.N, m))
    return tuple(out)


def closed_form_dual(f: PairFamily, b: BasisElement) -> SparseMatrix:
    """Dual element from the explicit formulas (independent of the Gram route)."""
    idx = {x.label: x for x in build_basis(f)}
    kind, *ij = b.label
    if kind == "X0":
        return idx[("X0", ij[1], ij[0])].matrix
    if kind in ("X+", "X-"):
        other = idx[("X-" if kind == "X+" else "X+", *ij)].matrix
        if f.kind is FamilyKind.SP and ij[0] == ij[1]:
            return {k: v / 2 for k, v in other.items()}
        return other
    if kind in ("E+", "E-"):
        return idx[(kind, ij[1], ij[0])].matrix
    if kind == "H":
        m = dict(b.matrix)
        for k in range(1, f.N):
            m = _sadd(m, idx[("H", k)].matrix, Fraction(-1, f.N))
        return m
    raise ValueError(f"unknown basis label {b.label}")


def coordinates(f: PairFamily, m: SparseMatrix) -> list[Fraction]:
    """Coefficients of ``m`` in :func:`build_basis`."""
    return [bilinear_form(f, m, d) for d in dual_basis(f)]


def combination(f: PairFamily, coeffs: Sequence[Fraction]) -> SparseMatrix:
    out: SparseMatrix = {}
    for c, b in zip(coeffs, build_basis(f)):
        if c:
            out = _sadd(out, b.matrix, c)
    return out


# -- the representation operators --------------------------------------------


def _z(f, i, j):
    return WeylOperator.mult(z_entry(f, i, j)) if z_entry(f, i, j) else ZERO_OP


def dpi(f: PairFamily, b: BasisElement | tuple) -> WeylOperator:
    """Closed-form differential operator of a basis element."""
    label = b.label if isinstance(b, BasisElement) else tuple(b)
    if label not in basis_index(f):
        raise ValueError(f"unknown basis label {label} for {f}")
    kind, *ij = label
    s = var(S)
    if f.kind is FamilyKind.SU:
        return _dpi_su(f, kind, ij, s)
    n = f.n
    tilde = f.kind is FamilyKind.SP
    dd = d_tilde if tilde else d_entry
    if kind == "X0":
        i, j = ij
        acc = ZERO
        for k in range(1, n + 1):
            if tilde:
                acc = acc - z_entry(f, j, k) * xi_tilde(f, i, k)
            else:
                acc = acc - z_entry(f, k, j) * xi_entry(f, k, i)
        if i == j:
            acc = acc + s
        return WeylOperator(acc)
    if kind == "X+":
        return -dd(f, *ij)
    i, j = ij
    acc = z_entry(f, i, j) * s * -2
    if tilde:
        for k in range(1, n + 1):
            for l in range(1, n + 1):
                acc = acc + z_entry(f, k, i) * z_entry(f, j, l) * xi_tilde(f, k, l)
    else:
        for k, l in f.variable_keys():
            acc = acc - (z_entry(f, k, i) * z_entry(f, j, l) - z_entry(f, k, j) * z_entry(f, i, l)) * xi_entry(f, k, l)
    return WeylOperator(acc)


def _dpi_su(f: PairFamily, kind: str, ij: list, s: Polynomial) -> WeylOperator:
    p, q = f.p, f.q
    zx = lambda a, b, c, d: z_entry(f, a, b) * xi_entry(f, c, d)  # noqa: E731
    acc = ZERO
    if kind == "H":
        (i,) = ij
        if i <= p:
            acc = s
            for l in range(1, q + 1):
                acc = acc - zx(i, l, i, l)
            for k in range(1, p + 1):
                acc = acc - zx(k, q, k, q)
        else:
            j = i - p
            for k in range(1, p + 1):
                acc = acc + zx(k, j, k, j) - zx(k, q, k, q)
    elif kind == "E+":
        i, j = ij
        for l in range(1, q + 1):
            acc = acc - zx(j, l, i, l)
    elif kind == "E-":
        i, j = ij
        for k in range(1, p + 1):
            acc = acc + zx(k, i, k, j)
    elif kind == "X+":
        acc = -xi_entry(f, *ij)
    else:
        i, j = ij
        acc = -s * z_entry(f, i, j)
        for k in range(1, p + 1):
            for l in range(1, q + 1):
                acc = acc + z_entry(f, k, j) * z_entry(f, i, l) * xi_entry(f, k, l)
    return WeylOperator(acc)


def _const_block(m: SparseMatrix, r0: int, r1: int, c0: int, c1: int) -> PolyMatrix:
    return PolyMatrix.build(r1 - r0, c1 - c0, lambda i, j: Polynomial.constant(m.get((r0 + i, c0 + j), 0)))


def dpi_from_action(f: PairFamily, m: SparseMatrix | BasisElement) -> WeylOperator:
    """Operator of an arbitrary algebra element derived from the
    linear-fractional action  z -> (a z + b)(c z + d)^-1  of exp(-tX).

    With blocks X = [[Xa, Xb], [Xc, Xd]] the velocity of z is
    z Xc z + z Xd - Xa z - Xb and the character contributes
    -s tr(Xc z + Xd).  This is an oracle for :func:`dpi`.
    """
    m = m.matrix if isinstance(m, BasisElement) else m
    N, k = f.N, f.split
    xa = _const_block(m, 0, k, 0, k)
    xb = _const_block(m, 0, k, k, N)
    xc = _const_block(m, k, N, 0, k)
    xd = _const_block(m, k, N, k, N)
    zb = z_block(f)
    vel = zb @ xc @ zb + zb @ xd - xa @ zb - xb
    czd = xc @ zb + xd
    trace = sum((czd[i, i] for i in range(czd.rows)), ZERO)
    acc = -trace * var(S)
    if f.kind is not FamilyKind.SU:
        n = f.n
        vel = PolyMatrix.build(n, n, lambda i, j: vel[i, n - 1 - j])
    for i, j in f.variable_keys():
        acc = acc + vel[i - 1, j - 1] * var(XI(i, j))
    return WeylOperator(acc)


def dpi_of(f: PairFamily, m: SparseMatrix) -> WeylOperator:
    """Linear extension of :func:`dpi` to an arbitrary algebra element."""
    acc = ZERO_OP
    for c, b in zip(coordinates(f, m), build_basis(f)):
        if c:
            acc = acc + dpi(f, b) * c
    return acc


def k_part(f: PairFamily) -> list[BasisElement]:
    """Basis elements of the block-diagonal subalgebra."""
    kinds = ("H", "E+", "E-") if f.kind is FamilyKind.SU else ("X0",)
    return [b for b in build_basis(f) if b.label[0] in kinds]


# -- symbol matrices ----------------------------------------------------------


@lru_cache(maxsize=None)
def symbols(f: PairFamily) -> tuple[Polynomial, ...]:
    return tuple(weyl_symbol(dpi(f, b)) for b in build_basis(f))


def _accumulate(f: PairFamily, weights: Iterable[tuple[Polynomial, SparseMatrix]]) -> PolyMatrix:
    N = f.N
    acc: dict[tuple[int, int], Polynomial] = {}
    for w, m in weights:
        if not w:
            continue
        for pos, c in m.items():
            acc[pos] = acc.get(pos, ZERO) + w * c
    return PolyMatrix.build(N, N, lambda i, j: acc.get((i, j), ZERO))


def tau(f: PairFamily) -> Polynomial:
    return var(S) - var(U) - gamma1(f)


def deformation_matrix(f: PairFamily, mode: SigmaMode | str = SigmaMode.BLOCK) -> PolyMatrix:
    """The matrix D with sigma~(X) = sigma(X) + tau * D."""
    mode = SigmaMode(mode)
    N, k = f.N, f.split
    if mode is SigmaMode.BLOCK:
        zb = z_block(f)

        def entry(i: int, j: int) -> Polynomial:
            if i < k and j >= k:
                return zb[i, j - k]
            if i == j:
                return -ONE if i < k else ONE
            return ZERO

        return PolyMatrix.build(N, N, entry)
    basis = build_basis(f)
    if f.kind is FamilyKind.SU:
        # the shifts are attached to the dual elements H_i^v, (X+_ij)^v = X-_ij
        weights = []
        for b in basis:
            kind, *ij = b.label
            if kind == "H":
                weights.append((-ONE if ij[0] <= f.p else ONE, b.matrix))
            elif kind == "X+":
                weights.append((z_entry(f, *ij), b.matrix))
        return _accumulate(f, weights)
    weights = []
    for b, d in zip(basis, dual_basis(f)):
        kind, *ij = b.label
        if kind == "X0" and ij[0] == ij[1]:
            weights.append((-ONE, d.matrix))
        elif kind == "X-":
            weights.append((z_entry(f, *ij), d.matrix))
    return _accumulate(f, weights)


def build_sigma(f: PairFamily, deformed: bool = False, mode: SigmaMode | str = SigmaMode.BLOCK) -> PolyMatrix:
    """sigma(X) = sum_i sigma(X_i) X_i^v, optionally u-deformed."""
    sig = _sigma(f)
    if not deformed:
        return sig
    return sig + deformation_matrix(f, mode).scale(tau(f))


@lru_cache(maxsize=None)
def _sigma(f: PairFamily) -> PolyMatrix:
    return _accumulate(f, ((s, d.matrix) for s, d in zip(symbols(f), dual_basis(f))))


def symbol_of(f: PairFamily, m: PolyMatrix, element: SparseMatrix | BasisElement) -> Polynomial:
    """B(m, Y): recovers sigma(Y) from a symbol matrix."""
    y = element.matrix if isinstance(element, BasisElement) else element
    t = ZERO
    for (i, j), c in y.items():
        e = m[j, i]
        if e:
            t = t + e * c
    return t if f.kind is FamilyKind.SU else t / 2


def u_of_z(f: PairFamily, inverse: bool = False) -> PolyMatrix:
    """The block unipotent [[1, z], [0, 1]] (or its inverse)."""
    N, k = f.N, f.split
    zb = z_block(f)
    if inverse:
        zb = -zb
    return PolyMatrix.build(
        N, N, lambda i, j: zb[i, j - k] if (i < k <= j) else (ONE if i == j else ZERO)
    )


def satisfies_group_relation(f: PairFamily, g: PolyMatrix) -> bool:
    """g^T J g = J for SOstar/Sp, det g = 1 for SU."""
    J = form_matrix(f)
    if J is None:
        return det_bareiss(g) == ONE
    jm = sparse_to_polymatrix(J, f.N)
    return g.T @ jm @ g == jm


def conjugate_sigma(f: PairFamily, m: PolyMatrix) -> PolyMatrix:
    """u(z)^-1 m u(z)."""
    if m.shape != (f.N, f.N):
        raise ValueError(f"expected {f.N}x{f.N}, got {m.shape}")
    return u_of_z(f, inverse=True) @ m @ u_of_z(f)


def lower_left_target(f: PairFamily) -> PolyMatrix:
    """-sum xi_ij (lower-left block of X-_ij) over the coordinates."""
    N, k = f.N, f.split
    weights = [(-xi_entry(f, *b.label[1:]), b.matrix) for b in build_basis(f) if b.label[0] == "X-"]
    full = _accumulate(f, weights)
    return full.block(k, N, 0, k)


def nilpotent_target(f: PairFamily) -> PolyMatrix:
    """Expected conjugate of the undeformed symbol matrix."""
    s = var(S)
    if f.kind is FamilyKind.SU:
        top = s * Fraction(f.q, f.N)
        bottom = -s * Fraction(f.p, f.N)
    else:
        top, bottom = s, -s
    return _block_target(f, top, bottom, ZERO)


def deformed_target(f: PairFamily) -> PolyMatrix:
    """Expected conjugate of the deformed symbol matrix."""
    s, u, g = var(S), var(U), gamma1(f)
    if f.kind is FamilyKind.SU:
        top = u + g - s * Fraction(f.p, f.N)
        bottom = -u - g + s * Fraction(f.q, f.N)
    else:
        top, bottom = u + g, -u - g
    return _block_target(f, top, bottom, -tau(f))


def _block_target(f: PairFamily, top: Polynomial, bottom: Polynomial, upper: Polynomial) -> PolyMatrix:
    N, k = f.N, f.split
    zb = z_block(f)
    c = lower_left_target(f)

    def entry(i: int, j: int) -> Polynomial:
        if i < k and j < k:
            return top if i == j else ZERO
        if i >= k and j >= k:
            return bottom if i == j else ZERO
        if i < k:
            return zb[i, j - k] * upper if upper else ZERO
        return c[i - k, j]

    return PolyMatrix.build(N, N, entry)


# -- invariants gamma_k / Gamma_k ----------------------------------------------


def _check_k(f: PairFamily, k: int) -> None:
    if not 0 <= k <= f.rank:
        raise ValueError(f"k={k} outside [0, {f.rank}] for {f}")


def _minor_pairs(f: PairFamily, k: int):
    """Index subsets (I, J) contributing to the k-th invariant."""
    r, c = f.coord_shape
    if f.kind is FamilyKind.SOSTAR:
        for I in subsets(r, 2 * k):
            yield I, I
    else:
        for I in subsets(r, k):
            for J in subsets(c, k):
                yield I, J


def gamma_k(f: PairFamily, k: int) -> Polynomial:
    """Symbol of the k-th invariant operator."""
    _check_k(f, k)
    zm = z_matrix(f)
    xm = xi_matrix(f, tilde=f.kind is FamilyKind.SP)
    total = ZERO
    for I, J in _minor_pairs(f, k):
        if f.kind is FamilyKind.SOSTAR:
            a = pfaffian_expansion(submatrix(zm, I, I), check=False)
            b = pfaffian_expansion(submatrix(xm, I, I), check=False) if a else ZERO
        else:
            a = det_bareiss(submatrix(zm, I, J))
            b = det_bareiss(submatrix(xm, I, J)) if a else ZERO
        if a and b:
            total = total + a * b
    return total


class _Grid:
    """Minimal matrix view accepted by the generic oracle kernels."""

    def __init__(self, rows: int, cols: int, fn):
        self.rows, self.cols = rows, cols
        self._fn = fn

    def __getitem__(self, ij):
        return self._fn(*ij)


def Gamma_k(f: PairFamily, k: int) -> WeylOperator:
    """The k-th invariant differential operator, composed as
    (minor of z) o (minor of d), with minors taken by permutation or
    matching expansion over operator entries."""
    _check_k(f, k)
    dd = d_tilde if f.kind is FamilyKind.SP else d_entry
    total = ZERO_OP
    for I, J in _minor_pairs(f, k):
        zg = _Grid(len(I), len(J), lambda a, b: _z(f, I[a], J[b]))
        dg = _Grid(len(I), len(J), lambda a, b: dd(f, I[a], J[b]))
        if f.kind is FamilyKind.SOSTAR:
            left = pfaffian_matchings(zg, one=ONE_OP, check=False)
            right = pfaffian_matchings(dg, one=ONE_OP, check=False)
        else:
            left = det_leibniz(zg, one=ONE_OP)
            right = det_leibniz(dg, one=ONE_OP)
        if left and right:
            total = total + weyl_compose(left, right)
    return total


def euler_operator(f: PairFamily) -> WeylOperator:
    acc = ZERO
    for i, j in f.variable_keys():
        acc = acc + var(Z(i, j)) * var(XI(i, j))
    return WeylOperator(acc)


# -- generating functions -----------------------------------------------------


def generating_function_rhs(f: PairFamily) -> Polynomial:
    """Closed form of Pf / det of the deformed symbol matrix."""
    s, u = var(S), var(U)
    g1 = gamma1(f)
    t = tau(f)
    ug = u + g1
    total = ZERO
    if f.kind is FamilyKind.SOSTAR:
        for k in range(f.rank + 1):
            total = total + ug ** (f.n - 2 * k) * t**k * gamma_k(f, k)
        return total
    if f.kind is FamilyKind.SP:
        for k in range(f.n + 1):
            total = total + ug ** (2 * f.n - 2 * k) * t**k * gamma_k(f, k)
        return -total if f.n % 2 else total
    p, q = f.p, f.q
    a = ug - s * Fraction(p, p + q)
    b = ug - s * Fraction(q, p + q)
    for k in range(q + 1):
        total = total + a ** (p - k) * b ** (q - k) * t**k * gamma_k(f, k)
    return -total if q % 2 else total


def build_phi(n: int, u_val: Polynomial | None = None, symbol: bool = True):
    """The alternating 2n x 2n matrix with z in the upper-left block, the
    reflected derivatives in the lower-right block and ``u`` on the
    antidiagonal.  ``symbol=False`` returns a list of operator rows."""
    if n < 1:
        raise ValueError("n must be >= 1")
    f = PairFamily.sostar(n)
    u_val = var(U) if u_val is None else u_val
    N = 2 * n

    def entry(r: int, c: int) -> Polynomial:
        if r < n and c < n:
            return z_entry(f, r + 1, c + 1)
        if r >= n and c >= n:
            rr, cc = r - n, c - n
            return xi_entry(f, n - cc, n - rr)
        if r + c == N - 1:
            return u_val if r < n else -u_val
        return ZERO

    m = PolyMatrix.build(N, N, entry)
    if symbol:
        return m
    return [[WeylOperator(m[i, j]) for j in range(N)] for i in range(N)]
