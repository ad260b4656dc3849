# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the sparse polynomial core.

Same contract as ``_kernels_py``. ``mul_terms`` accumulates into an open
addressing table keyed by the packed monomial; coefficients that fit in a
signed 64-bit word take a pure C path with overflow checks, anything larger
(or any overflow during accumulation) falls back to Python integers.
"""
from libc.stdint cimport uint64_t, int64_t
from libc.stdlib cimport malloc, calloc, free
from libc.string cimport memset

cdef extern from *:
    """
    static inline int sm_mul_ovf(long long a, long long b, long long *out) {
        return __builtin_mul_overflow(a, b, out);
    }
    static inline int sm_add_ovf(long long a, long long b, long long *out) {
        return __builtin_add_overflow(a, b, out);
    }
    """
    bint sm_mul_ovf(long long a, long long b, long long *out) nogil
    bint sm_add_ovf(long long a, long long b, long long *out) nogil


cdef struct Table:
    uint64_t *keys
    Py_ssize_t *slots      # index into the output arrays, -1 when empty
    Py_ssize_t cap
    Py_ssize_t size


cdef inline uint64_t _hash(uint64_t k) nogil:
    k *= <uint64_t>0x9E3779B97F4A7C15ULL
    return k ^ (k >> 29)


cdef int _table_init(Table *t, Py_ssize_t cap) except -1:
    cdef Py_ssize_t i
    t.cap = cap
    t.size = 0
    t.keys = <uint64_t *>malloc(cap * sizeof(uint64_t))
    t.slots = <Py_ssize_t *>malloc(cap * sizeof(Py_ssize_t))
    if t.keys == NULL or t.slots == NULL:
        free(t.keys)
        free(t.slots)
        raise MemoryError()
    for i in range(cap):
        t.slots[i] = -1
    return 0


cdef void _table_free(Table *t):
    free(t.keys)
    free(t.slots)
    t.keys = NULL
    t.slots = NULL


cdef int _table_grow(Table *t) except -1:
    cdef Table bigger
    cdef Py_ssize_t i, pos, mask
    _table_init(&bigger, t.cap * 2)
    mask = bigger.cap - 1
    for i in range(t.cap):
        if t.slots[i] >= 0:
            pos = <Py_ssize_t>(_hash(t.keys[i]) & <uint64_t>mask)
            while bigger.slots[pos] >= 0:
                pos = (pos + 1) & mask
            bigger.keys[pos] = t.keys[i]
            bigger.slots[pos] = t.slots[i]
    bigger.size = t.size
    _table_free(t)
    t[0] = bigger
    return 0


cdef inline Py_ssize_t _lookup(Table *t, uint64_t key, bint *fresh) nogil:
    # returns the table position; fresh is set when the key was absent
    cdef Py_ssize_t mask = t.cap - 1
    cdef Py_ssize_t pos = <Py_ssize_t>(_hash(key) & <uint64_t>mask)
    while t.slots[pos] >= 0:
        if t.keys[pos] == key:
            fresh[0] = False
            return pos
        pos = (pos + 1) & mask
    fresh[0] = True
    return pos


cdef Py_ssize_t _initial_cap(Py_ssize_t n1, Py_ssize_t n2):
    cdef Py_ssize_t want = 4 * (n1 + n2) + 16
    cdef Py_ssize_t cap = 16
    while cap < want:
        cap <<= 1
    return cap


def mul_terms(dict lhs, dict rhs):
    """Sparse product of two integer term maps, zero entries dropped."""
    cdef Py_ssize_t n1 = len(lhs), n2 = len(rhs)
    if n1 == 0 or n2 == 0:
        return {}
    if n1 > n2:
        lhs, rhs = rhs, lhs
        n1, n2 = n2, n1
    cdef list items1 = list(lhs.items())
    cdef list items2 = list(rhs.items())
    cdef uint64_t *k1 = <uint64_t *>malloc(n1 * sizeof(uint64_t))
    cdef uint64_t *k2 = <uint64_t *>malloc(n2 * sizeof(uint64_t))
    cdef long long *v1 = <long long *>malloc(n1 * sizeof(long long))
    cdef long long *v2 = <long long *>malloc(n2 * sizeof(long long))
    cdef bint small = True
    cdef Py_ssize_t i, j
    cdef int bits = 0
    try:
        if k1 == NULL or k2 == NULL or v1 == NULL or v2 == NULL:
            raise MemoryError()
        for i in range(n1):
            key, c = items1[i]
            k1[i] = <uint64_t>key
            if small and c.bit_length() < 63:
                v1[i] = c
            else:
                small = False
        for j in range(n2):
            key, c = items2[j]
            k2[j] = <uint64_t>key
            if small and c.bit_length() < 63:
                v2[j] = c
            else:
                small = False
        if small:
            result = _mul_small(k1, v1, n1, k2, v2, n2)
            if result is not None:
                return result
        return _mul_big(k1, items1, n1, k2, items2, n2)
    finally:
        free(k1)
        free(k2)
        free(v1)
        free(v2)


cdef object _mul_small(uint64_t *k1, long long *v1, Py_ssize_t n1,
                       uint64_t *k2, long long *v2, Py_ssize_t n2):
    # None signals an int64 overflow; the caller redoes the product in Python ints
    cdef Table t
    cdef Py_ssize_t cap_out = n1 * n2
    cdef uint64_t *out_keys = <uint64_t *>malloc(cap_out * sizeof(uint64_t))
    cdef long long *out_vals = <long long *>malloc(cap_out * sizeof(long long))
    cdef Py_ssize_t i, j, pos, n_out = 0
    cdef uint64_t key
    cdef long long prod, acc
    cdef bint fresh, overflow = False
    if out_keys == NULL or out_vals == NULL:
        free(out_keys)
        free(out_vals)
        raise MemoryError()
    _table_init(&t, _initial_cap(n1, n2))
    try:
        for i in range(n1):
            for j in range(n2):
                key = k1[i] + k2[j]
                if sm_mul_ovf(v1[i], v2[j], &prod):
                    overflow = True
                    break
                pos = _lookup(&t, key, &fresh)
                if fresh:
                    t.keys[pos] = key
                    t.slots[pos] = n_out
                    out_keys[n_out] = key
                    out_vals[n_out] = prod
                    n_out += 1
                    t.size += 1
                    if 2 * t.size > t.cap:
                        _table_grow(&t)
                else:
                    if sm_add_ovf(out_vals[t.slots[pos]], prod, &acc):
                        overflow = True
                        break
                    out_vals[t.slots[pos]] = acc
            if overflow:
                break
        if overflow:
            return None
        out = {}
        for i in range(n_out):
            if out_vals[i] != 0:
                out[out_keys[i]] = out_vals[i]
        return out
    finally:
        _table_free(&t)
        free(out_keys)
        free(out_vals)


cdef object _mul_big(uint64_t *k1, list items1, Py_ssize_t n1,
                     uint64_t *k2, list items2, Py_ssize_t n2):
    cdef Table t
    cdef Py_ssize_t i, j, pos, n_out = 0
    cdef uint64_t key
    cdef bint fresh
    cdef list vals1 = [item[1] for item in items1]
    cdef list vals2 = [item[1] for item in items2]
    cdef list acc = []
    cdef list keys_out = []
    cdef object c1
    _table_init(&t, _initial_cap(n1, n2))
    try:
        for i in range(n1):
            c1 = vals1[i]
            for j in range(n2):
                key = k1[i] + k2[j]
                pos = _lookup(&t, key, &fresh)
                if fresh:
                    t.keys[pos] = key
                    t.slots[pos] = n_out
                    keys_out.append(key)
                    acc.append(c1 * vals2[j])
                    n_out += 1
                    t.size += 1
                    if 2 * t.size > t.cap:
                        _table_grow(&t)
                else:
                    acc[t.slots[pos]] = acc[t.slots[pos]] + c1 * vals2[j]
        return {k: v for k, v in zip(keys_out, acc) if v}
    finally:
        _table_free(&t)


def eval_float(keys, coeffs, point):
    """Evaluate ``sum(c * monomial(point))`` in double precision."""
    cdef double powers[6][256]
    cdef int top[6]
    cdef Py_ssize_t n = len(keys), idx
    cdef int i, e
    cdef uint64_t k
    cdef double v, total = 0.0, term
    cdef list key_list = list(keys)
    cdef list coeff_list = list(coeffs)
    if len(coeff_list) != n:
        raise ValueError("keys and coeffs differ in length")
    for i in range(6):
        top[i] = 0
    for idx in range(n):
        k = <uint64_t>key_list[idx]
        for i in range(6):
            e = <int>((k >> (8 * i)) & 0xFF)
            if e > top[i]:
                top[i] = e
    for i in range(6):
        v = float(point[i])
        powers[i][0] = 1.0
        for e in range(1, top[i] + 1):
            powers[i][e] = powers[i][e - 1] * v
    for idx in range(n):
        k = <uint64_t>key_list[idx]
        term = <double>coeff_list[idx]
        term = term * powers[0][k & 0xFF]
        term = term * powers[1][(k >> 8) & 0xFF]
        term = term * powers[2][(k >> 16) & 0xFF]
        term = term * powers[3][(k >> 24) & 0xFF]
        term = term * powers[4][(k >> 32) & 0xFF]
        term = term * powers[5][(k >> 40) & 0xFF]
        total += term
    return total
