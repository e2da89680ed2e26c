"""Compiled kernels for the hot loops.

Arithmetic is kept bit-identical to ``pure.py``: same expression order,
same IEEE-754 double operations (no fast-math). Any edit must be mirrored
there.
"""

from libc.stdint cimport int64_t

import numpy as np


def walk_pair_paths(double alpha1, double alpha2, int x1, int x2,
                    const double[:, :, ::1] u,
                    int64_t[:, ::1] s1_out, int64_t[:, ::1] s2_out):
    cdef Py_ssize_t nrep = u.shape[0]
    cdef Py_ssize_t m = u.shape[1]
    cdef Py_ssize_t r, k
    cdef int64_t cs1, cs2
    cdef double twok, pu1, pu2
    with nogil:
        for r in range(nrep):
            cs1 = x1
            cs2 = x2
            s1_out[r, 0] = cs1
            s2_out[r, 0] = cs2
            for k in range(1, m + 1):
                twok = 2.0 * k
                pu1 = 0.5 + (alpha1 * cs2) / twok
                pu2 = 0.5 + (alpha2 * cs1) / twok
                if u[r, k - 1, 0] < pu1:
                    cs1 = cs1 + 1
                else:
                    cs1 = cs1 - 1
                if u[r, k - 1, 1] < pu2:
                    cs2 = cs2 + 1
                else:
                    cs2 = cs2 - 1
                s1_out[r, k] = cs1
                s2_out[r, k] = cs2


def dp_joint_table(double alpha1, double alpha2, int x1, int x2, Py_ssize_t n):
    cdef Py_ssize_t k, a, b
    cdef double twok, t, tu, td
    table_obj = np.zeros((1, 1))
    table_obj[0, 0] = 1.0
    cdef double[:, ::1] table = table_obj
    cdef double[:, ::1] nxt
    cdef double[::1] pu1, pu2, pm1, pm2
    for k in range(1, n):
        pu1_obj = np.empty(k)
        pu2_obj = np.empty(k)
        pm1_obj = np.empty(k)
        pm2_obj = np.empty(k)
        pu1 = pu1_obj
        pu2 = pu2_obj
        pm1 = pm1_obj
        pm2 = pm2_obj
        nxt_obj = np.zeros((k + 1, k + 1))
        nxt = nxt_obj
        twok = 2.0 * k
        with nogil:
            for b in range(k):
                pu1[b] = 0.5 + (alpha1 * <double>(x2 + 2 * b - (k - 1))) / twok
                pm1[b] = 1.0 - pu1[b]
            for a in range(k):
                pu2[a] = 0.5 + (alpha2 * <double>(x1 + 2 * a - (k - 1))) / twok
                pm2[a] = 1.0 - pu2[a]
            for a in range(k):
                for b in range(k):
                    t = table[a, b]
                    tu = t * pu1[b]
                    td = t * pm1[b]
                    nxt[a + 1, b + 1] += tu * pu2[a]
                    nxt[a + 1, b] += tu * pm2[a]
                    nxt[a, b + 1] += td * pu2[a]
                    nxt[a, b] += td * pm2[a]
        table_obj = nxt_obj
        table = table_obj
    return table_obj


def moment_recursion_arrays(double alpha1, double alpha2, int x1, int x2,
                            Py_ssize_t n_max):
    m1_obj = np.empty(n_max)
    m2_obj = np.empty(n_max)
    q1_obj = np.empty(n_max)
    q2_obj = np.empty(n_max)
    c_obj = np.empty(n_max)
    cdef double[::1] m1 = m1_obj
    cdef double[::1] m2 = m2_obj
    cdef double[::1] q1 = q1_obj
    cdef double[::1] q2 = q2_obj
    cdef double[::1] c = c_obj
    cdef Py_ssize_t k
    cdef double a, b, v1, v2, cc, fn, na, nb, nv1, nv2, ncc
    a = <double>x1
    b = <double>x2
    v1 = 1.0
    v2 = 1.0
    cc = <double>(x1 * x2)
    m1[0] = a
    m2[0] = b
    q1[0] = v1
    q2[0] = v2
    c[0] = cc
    with nogil:
        for k in range(1, n_max):
            fn = <double>k
            na = a + (alpha1 * b) / fn
            nb = b + (alpha2 * a) / fn
            nv1 = v1 + (2.0 * alpha1 * cc) / fn + 1.0
            nv2 = v2 + (2.0 * alpha2 * cc) / fn + 1.0
            ncc = cc + (alpha2 * v1) / fn + (alpha1 * v2) / fn \
                + (alpha1 * alpha2 * cc) / (fn * fn)
            a = na
            b = nb
            v1 = nv1
            v2 = nv2
            cc = ncc
            m1[k] = a
            m2[k] = b
            q1[k] = v1
            q2[k] = v2
            c[k] = cc
    return m1_obj, m2_obj, q1_obj, q2_obj, c_obj
