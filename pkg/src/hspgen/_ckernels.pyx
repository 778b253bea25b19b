# cython: language_level=3
"""Compiled sparse-polynomial kernels (same contract as ``_pykernels``)."""

from fractions import Fraction
from heapq import heapify, heappop, heappush

from cpython.dict cimport PyDict_GetItem
from cpython.object cimport PyObject

from hspgen._pykernels import NotDivisible


cdef inline object _norm(object c):
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


cpdef dict clean(dict d):
    cdef list dead = []
    cdef object m, c
    for m, c in d.items():
        if not c:
            dead.append(m)
        elif type(c) is Fraction and c.denominator == 1:
            d[m] = c.numerator
    for m in dead:
        del d[m]
    return d


cpdef dict add(dict a, dict b, object scale=1):
    cdef dict out = dict(a)
    cdef object m, c
    cdef PyObject* old
    cdef bint unit = scale == 1
    for m, c in b.items():
        if not unit:
            c = scale * c
        old = PyDict_GetItem(out, m)
        if old is NULL:
            out[m] = c
        else:
            out[m] = <object>old + c
    return clean(out)


cpdef dict scale(dict a, object c):
    if not c:
        return {}
    cdef object m, v
    return {m: _norm(v * c) for m, v in a.items()}


cpdef dict shift(dict a, object mono):
    cdef object m, c
    return {m + mono: c for m, c in a.items()}


cdef void _accumulate(dict acc, dict a, dict b, object scale):
    cdef list bkeys = list(b.keys())
    cdef list bvals = list(b.values())
    cdef Py_ssize_t nb = len(bkeys)
    cdef Py_ssize_t j
    cdef object ma, ca, m, cb, prod
    cdef PyObject* old
    cdef bint unit = scale == 1
    for ma, ca in a.items():
        if not unit:
            ca = ca * scale
        for j in range(nb):
            m = ma + bkeys[j]
            prod = ca * bvals[j]
            old = PyDict_GetItem(acc, m)
            if old is NULL:
                acc[m] = prod
            else:
                acc[m] = <object>old + prod


cpdef dict mul(dict a, dict b):
    if len(a) > len(b):
        a, b = b, a
    cdef dict out = {}
    _accumulate(out, a, b, 1)
    return clean(out)


cpdef dict addmul(dict acc, dict a, dict b, object scale=1):
    if len(a) > len(b):
        a, b = b, a
    _accumulate(acc, a, b, scale)
    return clean(acc)


cpdef dict exact_div(dict a, dict b, object guard):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    cdef object lm = max(b)
    cdef object lc = b[lm]
    cdef list rest = [(mb, cb) for mb, cb in b.items() if mb != lm]
    cdef dict r = dict(a)
    cdef list heap = [-m for m in r]
    heapify(heap)
    cdef dict q = {}
    cdef object m, c, d, qm, qc, mb, cb, t
    cdef PyObject* old
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
            old = PyDict_GetItem(r, t)
            if old is NULL:
                r[t] = -qc * cb
                heappush(heap, -t)
            else:
                r[t] = <object>old - qc * cb
    return q
