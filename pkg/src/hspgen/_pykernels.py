"""Pure Python sparse-polynomial kernels.

Polynomials are dicts mapping a packed monomial (a Python int holding one
exponent per bit field) to a nonzero rational coefficient.  Coefficients are
``int`` whenever they are integral and ``Fraction`` otherwise.  Monomial
multiplication is integer addition of the packed keys.

The compiled module ``_ckernels`` implements the same functions with the
same signatures; ``hspgen.kernels`` picks one at import time.
"""

from fractions import Fraction
from heapq import heapify, heappop, heappush


class NotDivisible(ArithmeticError):
    """Raised when an exact polynomial division leaves a remainder."""


def _norm(c):
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def clean(d):
    """Drop zero coefficients and demote integral fractions, in place."""
    dead = []
    for m, c in d.items():
        if not c:
            dead.append(m)
        elif type(c) is Fraction and c.denominator == 1:
            d[m] = c.numerator
    for m in dead:
        del d[m]
    return d


def add(a, b, scale=1):
    """Return ``a + scale * b``."""
    out = dict(a)
    get = out.get
    if scale == 1:
        for m, c in b.items():
            out[m] = get(m, 0) + c
    else:
        for m, c in b.items():
            out[m] = get(m, 0) + scale * c
    return clean(out)


def scale(a, c):
    if not c:
        return {}
    return {m: _norm(v * c) for m, v in a.items()}


def shift(a, mono):
    """Multiply every term of ``a`` by the monomial ``mono``."""
    return {m + mono: c for m, c in a.items()}


def mul(a, b):
    if len(a) > len(b):
        a, b = b, a
    out = {}
    get = out.get
    bitems = list(b.items())
    for ma, ca in a.items():
        for mb, cb in bitems:
            m = ma + mb
            out[m] = get(m, 0) + ca * cb
    return clean(out)


def addmul(acc, a, b, scale=1):
    """In place ``acc += scale * a * b``; returns ``acc``."""
    if len(a) > len(b):
        a, b = b, a
    get = acc.get
    bitems = list(b.items())
    for ma, ca in a.items():
        if scale != 1:
            ca = ca * scale
        for mb, cb in bitems:
            m = ma + mb
            acc[m] = get(m, 0) + ca * cb
    return clean(acc)


def exact_div(a, b, guard):
    """Quotient ``q`` with ``q * b == a``.

    ``guard`` has the top bit of every exponent field set; it is used to
    test monomial divisibility without unpacking.  Division runs in the lex
    order given by the packed integer value, so the leading monomial of the
    remainder must always be divisible by the leading monomial of ``b``.
    """
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    lm = max(b)
    lc = b[lm]
    rest = [(mb, cb) for mb, cb in b.items() if mb != lm]
    r = dict(a)
    heap = [-m for m in r]
    heapify(heap)
    q = {}
    while heap:
        m = -heappop(heap)
        c = r.pop(m, 0)
        if not c:
            continue
        d = (m | guard) - lm
        if d & guard != guard:
            raise NotDivisible("remainder term is not divisible by the leading term")
        qm = d - guard
        if type(lc) is int and type(c) is int and c % lc == 0:
            qc = c // lc
        else:
            qc = _norm(Fraction(c) / lc)
        q[qm] = qc
        for mb, cb in rest:
            t = qm + mb
            old = r.get(t)
            if old is None:
                r[t] = -qc * cb
                heappush(heap, -t)
            else:
                r[t] = old - qc * cb
    return q
