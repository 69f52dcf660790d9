# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels for Bowen-metric neighbourhood queries.

Both kernels take orbit tables of shape (N, T, d) and a cell index built from
the time-0 coordinates with cell side >= eps, so every pair with d_T < eps
lies in neighbouring cells.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, floor

cnp.import_array()


cdef inline double _bowen(const double[:, :, ::1] A, Py_ssize_t a,
                          const double[:, :, ::1] B, Py_ssize_t b,
                          const unsigned char[::1] circ, double eps) noexcept nogil:
    # max over time and coordinates; returns early once the value reaches eps
    cdef Py_ssize_t t, k
    cdef Py_ssize_t T = A.shape[1]
    cdef Py_ssize_t d = A.shape[2]
    cdef double m = 0.0, v
    for t in range(T):
        for k in range(d):
            v = fabs(A[a, t, k] - B[b, t, k])
            if circ[k]:
                v = v - floor(v)
                if 1.0 - v < v:
                    v = 1.0 - v
            if v > m:
                m = v
                if m >= eps:
                    return m
    return m


cdef inline Py_ssize_t _find(const long long[::1] keys, long long key) noexcept nogil:
    cdef Py_ssize_t lo = 0, hi = keys.shape[0], mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if keys[mid] < key:
            lo = mid + 1
        else:
            hi = mid
    if lo < keys.shape[0] and keys[lo] == key:
        return lo
    return -1


cdef Py_ssize_t _neighbour_cells(const long long[:, ::1] cells, Py_ssize_t p,
                                 const long long[::1] shape,
                                 const unsigned char[::1] circ,
                                 const long long[::1] keys,
                                 long long[::1] out) noexcept nogil:
    # compact ids of the distinct existing cells adjacent to point p's cell
    cdef Py_ssize_t d = cells.shape[1]
    cdef Py_ssize_t n_off = 1, combo, k, j, found = 0
    cdef long long lin, c, digit, rest
    cdef bint ok, dup
    for k in range(d):
        n_off *= 3
    for combo in range(n_off):
        rest = combo
        lin = 0
        ok = True
        for k in range(d):
            digit = rest % 3 - 1
            rest = rest // 3
            c = cells[p, k] + digit
            if circ[k]:
                c = (c % shape[k] + shape[k]) % shape[k]
            elif c < 0 or c >= shape[k]:
                ok = False
                break
            lin = lin * shape[k] + c
        if not ok:
            continue
        j = _find(keys, lin)
        if j < 0:
            continue
        dup = False
        for k in range(found):
            if out[k] == j:
                dup = True
                break
        if not dup:
            out[found] = j
            found += 1
    return found


def greedy_separated(const double[:, :, ::1] orbits, double eps,
                     const unsigned char[::1] circ,
                     const long long[:, ::1] cells, const long long[::1] shape,
                     const long long[::1] keys, const long long[::1] cell_of,
                     const long long[::1] cell_start):
    """Scan points in order, keep each point at Bowen distance >= eps from all kept ones."""
    cdef Py_ssize_t N = orbits.shape[0]
    cdef Py_ssize_t d = orbits.shape[2]
    cdef Py_ssize_t n_off = 1, k
    for k in range(d):
        n_off *= 3
    kept_arr = np.zeros(N, dtype=np.uint8)
    slots_arr = np.empty(N, dtype=np.int64)
    count_arr = np.zeros(keys.shape[0], dtype=np.int64)
    nb_arr = np.empty(n_off, dtype=np.int64)
    cdef unsigned char[::1] kept = kept_arr
    cdef long long[::1] slots = slots_arr
    cdef long long[::1] count = count_arr
    cdef long long[::1] nb = nb_arr
    cdef Py_ssize_t p, q, c, s, nn, ci
    cdef bint close
    with nogil:
        for p in range(N):
            nn = _neighbour_cells(cells, p, shape, circ, keys, nb)
            close = False
            for ci in range(nn):
                c = nb[ci]
                for s in range(cell_start[c], cell_start[c] + count[c]):
                    q = slots[s]
                    if _bowen(orbits, p, orbits, q, circ, eps) < eps:
                        close = True
                        break
                if close:
                    break
            if not close:
                kept[p] = 1
                c = cell_of[p]
                slots[cell_start[c] + count[c]] = p
                count[c] += 1
    return kept_arr


def bowen_neighbours(const double[:, :, ::1] src, const double[:, :, ::1] dst, double eps,
                     const unsigned char[::1] circ,
                     const long long[:, ::1] src_cells, const long long[::1] shape,
                     const long long[::1] keys, const long long[::1] cell_start,
                     const long long[::1] members):
    """CSR lists: for each source point, the destination points at Bowen distance < eps."""
    cdef Py_ssize_t Ns = src.shape[0]
    cdef Py_ssize_t d = src.shape[2]
    cdef Py_ssize_t n_off = 1, k
    for k in range(d):
        n_off *= 3
    nb_arr = np.empty(n_off, dtype=np.int64)
    indptr_arr = np.zeros(Ns + 1, dtype=np.int64)
    cdef long long[::1] nb = nb_arr
    cdef long long[::1] indptr = indptr_arr
    cdef Py_ssize_t a, c, s, nn, ci, pos
    with nogil:
        for a in range(Ns):
            nn = _neighbour_cells(src_cells, a, shape, circ, keys, nb)
            pos = 0
            for ci in range(nn):
                c = nb[ci]
                for s in range(cell_start[c], cell_start[c + 1]):
                    if _bowen(src, a, dst, members[s], circ, eps) < eps:
                        pos += 1
            indptr[a + 1] = indptr[a] + pos
    indices_arr = np.empty(indptr[Ns], dtype=np.int64)
    cdef long long[::1] indices = indices_arr
    with nogil:
        for a in range(Ns):
            nn = _neighbour_cells(src_cells, a, shape, circ, keys, nb)
            pos = indptr[a]
            for ci in range(nn):
                c = nb[ci]
                for s in range(cell_start[c], cell_start[c + 1]):
                    if _bowen(src, a, dst, members[s], circ, eps) < eps:
                        indices[pos] = members[s]
                        pos += 1
    return indptr_arr, indices_arr
