"""Exact linear algebra over the polynomial ring.

Determinants and Pfaffians come in two backends each: a production one
(Bareiss elimination, first-row Pfaffian expansion with memoised minors) and
a brute-force oracle (Leibniz permutation sum, perfect-matching sum).  The
oracles only use ``+``, ``*`` and unary ``-`` on the entries, so they also
work for any commutative ring-like entry type.

Index subsets follow the mathematical convention and are 1-based; matrix
entries are addressed 0-based, ``m[i, j]``.
"""

from __future__ import annotations

import enum
import itertools
from typing import Callable, Iterable, Sequence

from hspgen.ring import ONE, ZERO, Polynomial, Scalar

LEIBNIZ_MAX = 6
MATCHINGS_MAX = 12


class ShapeError(ValueError):
    pass


class PolyMatrix:
    """Rectangular matrix with :class:`Polynomial` entries (row-major)."""

    __slots__ = ("rows", "cols", "_e")

    def __init__(self, rows: int, cols: int, entries: Sequence[Polynomial]):
        if len(entries) != rows * cols:
            raise ShapeError(f"expected {rows * cols} entries, got {len(entries)}")
        self.rows = rows
        self.cols = cols
        self._e = tuple(e if isinstance(e, Polynomial) else Polynomial.constant(e) for e in entries)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Polynomial | Scalar]]) -> "PolyMatrix":
        r = len(rows)
        c = len(rows[0]) if r else 0
        if any(len(row) != c for row in rows):
            raise ShapeError("ragged rows")
        return cls(r, c, [x for row in rows for x in row])

    @classmethod
    def build(cls, rows: int, cols: int, fn: Callable[[int, int], Polynomial | Scalar]) -> "PolyMatrix":
        return cls(rows, cols, [fn(i, j) for i in range(rows) for j in range(cols)])

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> "PolyMatrix":
        cols = rows if cols is None else cols
        return cls(rows, cols, [ZERO] * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "PolyMatrix":
        return cls.build(n, n, lambda i, j: ONE if i == j else ZERO)

    @classmethod
    def antidiagonal(cls, n: int) -> "PolyMatrix":
        """The matrix J_n with ones on the antidiagonal."""
        return cls.build(n, n, lambda i, j: ONE if i + j == n - 1 else ZERO)

    @classmethod
    def blocks(cls, grid: Sequence[Sequence["PolyMatrix"]]) -> "PolyMatrix":
        rows = []
        for brow in grid:
            h = brow[0].rows
            for i in range(h):
                rows.append([x for b in brow for x in b.row(i)])
        return cls.from_rows(rows)

    # access
    def __getitem__(self, ij: tuple[int, int]) -> Polynomial:
        i, j = ij
        return self._e[i * self.cols + j]

    def row(self, i: int) -> tuple[Polynomial, ...]:
        return self._e[i * self.cols:(i + 1) * self.cols]

    def entries(self) -> tuple[Polynomial, ...]:
        return self._e

    def to_lists(self) -> list[list[Polynomial]]:
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def block(self, r0: int, r1: int, c0: int, c1: int) -> "PolyMatrix":
        """0-based half-open slice ``[r0:r1, c0:c1]``."""
        return PolyMatrix.build(r1 - r0, c1 - c0, lambda i, j: self[r0 + i, c0 + j])

    # arithmetic
    def _check_same(self, other: "PolyMatrix") -> None:
        if self.shape != other.shape:
            raise ShapeError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        self._check_same(other)
        return PolyMatrix(self.rows, self.cols, [a + b for a, b in zip(self._e, other._e)])

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        self._check_same(other)
        return PolyMatrix(self.rows, self.cols, [a - b for a, b in zip(self._e, other._e)])

    def __neg__(self) -> "PolyMatrix":
        return PolyMatrix(self.rows, self.cols, [-a for a in self._e])

    def scale(self, c: Polynomial | Scalar) -> "PolyMatrix":
        return PolyMatrix(self.rows, self.cols, [a * c for a in self._e])

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.cols != other.rows:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        out = []
        for i in range(self.rows):
            r = self.row(i)
            for j in range(other.cols):
                acc = ZERO
                for k in range(self.cols):
                    a = r[k]
                    if a:
                        b = other[k, j]
                        if b:
                            acc = acc + a * b
                out.append(acc)
        return PolyMatrix(self.rows, other.cols, out)

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix.build(self.cols, self.rows, lambda i, j: self[j, i])

    @property
    def T(self) -> "PolyMatrix":
        return self.transpose()

    def map(self, fn: Callable[[Polynomial], Polynomial]) -> "PolyMatrix":
        return PolyMatrix(self.rows, self.cols, [fn(a) for a in self._e])

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self.shape == other.shape and self._e == other._e

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self._e))

    def is_alternating(self) -> bool:
        if not self.is_square():
            return False
        n = self.rows
        return all(self[i, j] == -self[j, i] for i in range(n) for j in range(i, n))

    def to_text(self) -> list[list[str]]:
        return [[p.to_text() for p in self.row(i)] for i in range(self.rows)]

    def __repr__(self) -> str:
        return f"PolyMatrix({self.rows}x{self.cols})"


# -- subsets and signs --------------------------------------------------------


def check_subset(elements: Iterable[int], n: int | None = None) -> tuple[int, ...]:
    """Validate an IndexSubset: strictly increasing positive ints within [n]."""
    t = tuple(elements)
    if any(b <= a for a, b in zip(t, t[1:])):
        raise ValueError(f"index subset {t} is not strictly increasing")
    if t and t[0] < 1:
        raise IndexError(f"index subset {t} has non-positive element")
    if n is not None and t and t[-1] > n:
        raise IndexError(f"index subset {t} exceeds [{n}]")
    return t


def complement(subset: Sequence[int], n: int) -> tuple[int, ...]:
    s = set(subset)
    return tuple(i for i in range(1, n + 1) if i not in s)


def subsets(n: int, k: int) -> Iterable[tuple[int, ...]]:
    return itertools.combinations(range(1, n + 1), k)


def permutation_sign(seq: Sequence[int]) -> int:
    sign = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def perm_sign(first: Sequence[int], second: Sequence[int]) -> int:
    """Sign of the permutation sending (1..n) to ``first`` followed by ``second``."""
    first = check_subset(first)
    second = check_subset(second)
    n = len(first) + len(second)
    if sorted(first + second) != list(range(1, n + 1)):
        raise ValueError(f"{first} and {second} do not partition [{n}]")
    return permutation_sign(first + second)


def submatrix(m: PolyMatrix, rows: Sequence[int], cols: Sequence[int]) -> PolyMatrix:
    """Entries ``m[i, j]`` for 1-based ``i`` in rows and ``j`` in cols."""
    rows = check_subset(rows, m.rows)
    cols = check_subset(cols, m.cols)
    return PolyMatrix.build(len(rows), len(cols), lambda a, b: m[rows[a] - 1, cols[b] - 1])


# -- determinants -------------------------------------------------------------


def _require_square(m: PolyMatrix) -> None:
    if not m.is_square():
        raise ShapeError(f"determinant of non-square {m.shape} matrix")


def det_leibniz(m, *, one=ONE, guard: int = LEIBNIZ_MAX):
    """Full permutation expansion.  Works for any commutative entry type
    given a suitable ``one``; ``m`` needs ``rows`` and ``m[i, j]``."""
    n = m.rows
    if m.cols != n:
        raise ShapeError("determinant of non-square matrix")
    if n > guard:
        raise ValueError(f"det_leibniz limited to dimension {guard}, got {n}")
    total = None
    for perm in itertools.permutations(range(n)):
        term = one
        for i, j in enumerate(perm):
            term = term * m[i, j]
        if permutation_sign(perm) < 0:
            term = -term
        total = term if total is None else total + term
    return one if total is None else total


def det_bareiss(m: PolyMatrix) -> Polynomial:
    """Fraction-free single-step elimination; divisions are exact."""
    _require_square(m)
    n = m.rows
    if n == 0:
        return ONE
    a = m.to_lists()
    sign = 1
    prev = ONE
    for k in range(n - 1):
        if not a[k][k]:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return ZERO
        pivot = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            for j in range(k + 1, n):
                num = pivot * a[i][j]
                if aik and a[k][j]:
                    num = num - aik * a[k][j]
                a[i][j] = num.exact_div(prev) if prev != ONE else num
            a[i][k] = ZERO
        prev = pivot
    d = a[n - 1][n - 1]
    return -d if sign < 0 else d


def det_minors(m: PolyMatrix) -> Polynomial:
    """Row-by-row Laplace expansion over column subsets (2^n minors, no
    division).  Much cheaper than elimination on sparse symbolic input."""
    _require_square(m)
    n = m.rows
    layer: dict[int, Polynomial] = {0: ONE}
    for k in range(n):
        nxt: dict[int, Polynomial] = {}
        for mask, minor in layer.items():
            for c in range(n):
                if mask >> c & 1:
                    continue
                e = m[k, c]
                if not e:
                    continue
                term = e * minor
                # sign (-1)^(number of chosen columns to the right of c)
                if bin(mask >> c).count("1") % 2:
                    term = -term
                t = mask | 1 << c
                nxt[t] = nxt[t] + term if t in nxt else term
        layer = {k2: v for k2, v in nxt.items() if v}
        if not layer:
            return ZERO
    return layer.get((1 << n) - 1, ZERO)


# -- Pfaffians ----------------------------------------------------------------


def _require_alternating(m: PolyMatrix) -> None:
    if not m.is_square():
        raise ShapeError("Pfaffian of non-square matrix")
    if m.rows % 2:
        raise ShapeError(f"Pfaffian of odd dimension {m.rows}")
    if not m.is_alternating():
        raise ValueError("matrix is not alternating")


def perfect_matchings(points: Sequence[int]):
    """Yield (pairs, sign) for every perfect matching of ``points``.

    The sign is (-1)^(number of crossings), so the matching sum of
    [[0, a], [-a, 0]] is ``a``.
    """
    if not points:
        yield (), 1
        return
    first = points[0]
    for idx in range(1, len(points)):
        partner = points[idx]
        rest = points[1:idx] + points[idx + 1:]
        # pairing first with the idx-th point crosses idx-1 interior points
        s = -1 if (idx - 1) % 2 else 1
        for pairs, sub in perfect_matchings(rest):
            yield ((first, partner),) + pairs, s * sub


def pfaffian_matchings(m, *, one=ONE, guard: int = MATCHINGS_MAX, check: bool = True):
    """Brute-force sum over perfect matchings (oracle backend)."""
    if check:
        _require_alternating(m)
    n = m.rows
    if n > guard:
        raise ValueError(f"pfaffian_matchings limited to dimension {guard}, got {n}")
    total = None
    for pairs, sign in perfect_matchings(tuple(range(n))):
        term = one
        for i, j in pairs:
            term = term * m[i, j]
        if sign < 0:
            term = -term
        total = term if total is None else total + term
    return one if total is None else total


def pfaffian_expansion(m: PolyMatrix, *, check: bool = True) -> Polynomial:
    """Expansion along the first remaining row, memoised on index sets."""
    if check:
        _require_alternating(m)
    n = m.rows
    memo: dict[int, Polynomial] = {0: ONE}

    def pf(mask: int) -> Polynomial:
        got = memo.get(mask)
        if got is not None:
            return got
        idx = [i for i in range(n) if mask >> i & 1]
        i0 = idx[0]
        acc = ZERO
        for pos in range(1, len(idx)):
            j = idx[pos]
            a = m[i0, j]
            if not a:
                continue
            sub = pf(mask & ~(1 << i0) & ~(1 << j))
            if not sub:
                continue
            term = a * sub
            acc = acc - term if pos % 2 == 0 else acc + term
        memo[mask] = acc
        return acc

    return pf((1 << n) - 1)


def times_antidiagonal(m: PolyMatrix) -> PolyMatrix:
    """``m @ J`` computed by reversing columns."""
    c = m.cols
    return PolyMatrix.build(m.rows, c, lambda i, j: m[i, c - 1 - j])


def pf_antidiag(m: PolyMatrix, *, backend: str = "expansion") -> Polynomial:
    """Pfaffian of ``m @ J`` for a matrix alternating along the antidiagonal."""
    if not m.is_square() or m.rows % 2:
        raise ShapeError("pf_antidiag needs an even square matrix")
    mj = times_antidiagonal(m)
    if not mj.is_alternating():
        raise ValueError("matrix is not alternating along the antidiagonal")
    if backend == "matchings":
        return pfaffian_matchings(mj, check=False)
    return pfaffian_expansion(mj, check=False)


# -- minor summation formulae -------------------------------------------------


class SignMode(str, enum.Enum):
    """Sign convention for the block-determinant minor expansion.

    ``PRINTED`` omits any sign, ``CORRECTED`` inserts (-1)^k, and
    ``SIGNATURE`` inserts sgn(Ibar, I) sgn(Jbar, J) (-1)^k, the other
    candidate correction.
    """

    PRINTED = "printed"
    CORRECTED = "corrected"
    SIGNATURE = "signature"


def _det(m: PolyMatrix) -> Polynomial:
    return det_bareiss(m)


def msf_pf_blocks(m: PolyMatrix) -> tuple[PolyMatrix, PolyMatrix, PolyMatrix]:
    """Split ``[[a, b], [c, -J a^T J]]`` and unfold ``b``, ``c``.

    Returns ``(a, bhat, chat)`` where ``bhat`` and ``chat`` are the
    alternating n x n matrices carrying the parameters ``b[i,j]``,
    ``c[i,j]`` of the antidiagonal layout: ``b = bhat J`` and
    ``c[r, col] = chat[col, n+1-r]`` (1-based).
    """
    if not m.is_square() or m.rows % 2:
        raise ShapeError("msf_pf_rhs needs a 2n x 2n matrix")
    n = m.rows // 2
    a = m.block(0, n, 0, n)
    b = m.block(0, n, n, 2 * n)
    c = m.block(n, 2 * n, 0, n)
    bhat = PolyMatrix.build(n, n, lambda i, j: b[i, n - 1 - j])
    chat = PolyMatrix.build(n, n, lambda i, j: c[n - 1 - j, i])
    return a, bhat, chat


def msf_pf_rhs(m: PolyMatrix, n: int | None = None) -> Polynomial:
    """Right-hand side of the Pfaffian minor summation formula."""
    a, bhat, chat = msf_pf_blocks(m)
    if n is not None and n != a.rows:
        raise ShapeError(f"matrix is {m.rows}x{m.cols}, expected n={n}")
    n = a.rows
    if not times_antidiagonal(m).is_alternating():
        raise ValueError("matrix is not alternating along the antidiagonal")
    total = ZERO
    for k in range(n // 2 + 1):
        for I in subsets(n, 2 * k):
            pb = pfaffian_expansion(submatrix(bhat, I, I), check=False)
            if not pb:
                continue
            Ibar = complement(I, n)
            sI = perm_sign(Ibar, I)
            for J in subsets(n, 2 * k):
                pc = pfaffian_expansion(submatrix(chat, J, J), check=False)
                if not pc:
                    continue
                Jbar = complement(J, n)
                da = _det(submatrix(a, Ibar, Jbar))
                if not da:
                    continue
                term = da * pb * pc
                total = total + term if sI * perm_sign(Jbar, J) > 0 else total - term
    return total


def msf_det_assemble(b: PolyMatrix, c: PolyMatrix, u: Polynomial, v: Polynomial) -> PolyMatrix:
    """The block matrix [[u 1_p, b], [c^T, v 1_q]] for p x q ``b`` and ``c``.

    ``c`` is given in its p x q parameter layout: ``c[i, j]`` sits at row
    p+j, column i of the assembled matrix.
    """
    p, q = b.rows, b.cols
    if c.shape != (p, q):
        raise ShapeError(f"b is {b.shape} but c is {c.shape}; both must be p x q")

    def entry(i: int, j: int) -> Polynomial:
        if i < p and j < p:
            return u if i == j else ZERO
        if i < p:
            return b[i, j - p]
        if j < p:
            return c[j, i - p]
        return v if i == j else ZERO

    return PolyMatrix.build(p + q, p + q, entry)


def msf_det_rhs(
    b: PolyMatrix,
    c: PolyMatrix,
    u: Polynomial,
    v: Polynomial,
    sign_mode: SignMode | str = SignMode.CORRECTED,
) -> Polynomial:
    """Minor expansion of det [[u 1_p, b], [c^T, v 1_q]] (``c`` in p x q layout)."""
    sign_mode = SignMode(sign_mode)
    p, q = b.rows, b.cols
    if c.shape != (p, q):
        raise ShapeError(f"b is {b.shape} but c is {c.shape}; both must be p x q")
    total = ZERO
    for k in range(min(p, q) + 1):
        scalar = u ** (p - k) * v ** (q - k)
        for I in subsets(p, k):
            for J in subsets(q, k):
                db = _det(submatrix(b, I, J))
                if not db:
                    continue
                dc = _det(submatrix(c, I, J))
                if not dc:
                    continue
                sign = 1
                if sign_mode is not SignMode.PRINTED and k % 2:
                    sign = -1
                if sign_mode is SignMode.SIGNATURE:
                    sign *= perm_sign(complement(I, p), I) * perm_sign(complement(J, q), J)
                term = scalar * db * dc
                total = total + term if sign > 0 else total - term
    return total
