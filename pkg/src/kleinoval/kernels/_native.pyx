"""Compiled twins of the kernels in `pure`; same signatures, same results.

The inner loops work on the same uint8 coordinate rows, int32 index rows
and packed-code masks as the numpy fallback.  The conic plane scan gains
the most here: it can reject a plane on the first conic point that falls
outside the membership mask instead of materializing every candidate.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def linear_form_values(const unsigned char[:, ::1] coords,
                       const unsigned char[::1] form,
                       const unsigned char[:, ::1] mul):
    cdef Py_ssize_t n = coords.shape[0], m = coords.shape[1], i, k
    out = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] o = out
    cdef unsigned char acc
    for i in range(n):
        acc = 0
        for k in range(m):
            acc ^= mul[form[k], coords[i, k]]
        o[i] = acc
    return out


def quadratic_form_values(const unsigned char[:, ::1] coords,
                          const long long[:, ::1] terms,
                          const unsigned char[:, ::1] mul):
    cdef Py_ssize_t n = coords.shape[0], t = terms.shape[0], i, k
    out = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] o = out
    cdef unsigned char acc, a
    cdef Py_ssize_t ti, tj
    for i in range(n):
        acc = 0
        for k in range(t):
            ti = terms[k, 0]
            tj = terms[k, 1]
            a = <unsigned char> terms[k, 2]
            acc ^= mul[mul[a, coords[i, ti]], coords[i, tj]]
        o[i] = acc
    return out


def incidence_counts(const int[:, ::1] rows,
                     const unsigned char[::1] member):
    cdef Py_ssize_t n = rows.shape[0], w = rows.shape[1], i, k
    out = np.empty(n, dtype=np.int64)
    cdef long long[::1] o = out
    cdef long long acc
    for i in range(n):
        acc = 0
        for k in range(w):
            acc += member[rows[i, k]]
        o[i] = acc
    return out


def conic_plane_scan(const unsigned char[:, :, ::1] bases,
                     const unsigned char[:, ::1] mus,
                     const unsigned char[:, ::1] mul,
                     const unsigned char[::1] inv,
                     const unsigned char[::1] hmask,
                     int h):
    cdef Py_ssize_t P = bases.shape[0], M = mus.shape[0]
    cdef int q = mul.shape[0]
    in_u = np.zeros(P, dtype=np.uint8)
    nuc = np.zeros((P, 6), dtype=np.uint8)
    cdef unsigned char[::1] u_view = in_u
    cdef unsigned char[:, ::1] n_view = nuc
    cdef Py_ssize_t p, i, k, j
    cdef unsigned char a, b, c, d, e, f, sn, s, m0, m1, m2, lead, sc
    cdef unsigned char v[6]
    cdef unsigned char r0[6]
    cdef unsigned char r1[6]
    cdef unsigned char r2[6]
    cdef long long code
    cdef int hits, failed

    for p in range(P):
        for k in range(6):
            r0[k] = bases[p, 0, k]
            r1[k] = bases[p, 1, k]
            r2[k] = bases[p, 2, k]
        a = mul[r0[0], r0[1]] ^ mul[r0[2], r0[3]] ^ mul[r0[4], r0[5]]
        b = mul[r1[0], r1[1]] ^ mul[r1[2], r1[3]] ^ mul[r1[4], r1[5]]
        c = mul[r2[0], r2[1]] ^ mul[r2[2], r2[3]] ^ mul[r2[4], r2[5]]
        d = (mul[r0[0], r1[1]] ^ mul[r0[1], r1[0]] ^ mul[r0[2], r1[3]]
             ^ mul[r0[3], r1[2]] ^ mul[r0[4], r1[5]] ^ mul[r0[5], r1[4]])
        e = (mul[r0[0], r2[1]] ^ mul[r0[1], r2[0]] ^ mul[r0[2], r2[3]]
             ^ mul[r0[3], r2[2]] ^ mul[r0[4], r2[5]] ^ mul[r0[5], r2[4]])
        f = (mul[r1[0], r2[1]] ^ mul[r1[1], r2[0]] ^ mul[r1[2], r2[3]]
             ^ mul[r1[3], r2[2]] ^ mul[r1[4], r2[5]] ^ mul[r1[5], r2[4]])
        if d == 0 and e == 0 and f == 0:
            continue
        sn = (mul[a, mul[f, f]] ^ mul[b, mul[e, e]]
              ^ mul[c, mul[d, d]] ^ mul[mul[d, e], f])
        if sn == 0:
            continue
        hits = 0
        failed = 0
        for i in range(M):
            m0 = mus[i, 0]
            m1 = mus[i, 1]
            m2 = mus[i, 2]
            s = (mul[a, mul[m0, m0]] ^ mul[b, mul[m1, m1]] ^ mul[c, mul[m2, m2]]
                 ^ mul[d, mul[m0, m1]] ^ mul[e, mul[m0, m2]] ^ mul[f, mul[m1, m2]])
            if s != 0:
                continue
            hits += 1
            code = 0
            for k in range(6):
                v[k] = mul[m0, r0[k]] ^ mul[m1, r1[k]] ^ mul[m2, r2[k]]
                code = (code << h) | v[k]
            if hmask[code] == 0:
                failed = 1
                break
        if failed or hits != q + 1:
            continue
        # nucleus: local coordinates (f, e, d) mapped out and normalized
        lead = 0
        for k in range(6):
            v[k] = mul[f, r0[k]] ^ mul[e, r1[k]] ^ mul[d, r2[k]]
            if lead == 0 and v[k] != 0:
                lead = v[k]
        sc = inv[lead]
        for k in range(6):
            n_view[p, k] = mul[sc, v[k]]
        u_view[p] = 1
    return in_u, nuc
