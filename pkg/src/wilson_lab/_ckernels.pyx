# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled core for the interaction functionals.

Same contract as ``_pykernels.y_accumulate``; see that module for shapes.
"""
import numpy as np
cimport numpy as cnp

cdef int[3] PAIR_I
cdef int[3] PAIR_J
PAIR_I[:] = [0, 0, 1]
PAIR_J[:] = [1, 2, 2]


def y_accumulate(double complex[:, :, :, ::1] pi_w,
                 double complex[:, :, :, ::1] pi_wb,
                 double complex[:, :, :, ::1] xi_w,
                 double complex[:, :, :, ::1] xi_wb,
                 double[:, :, ::1] c,
                 double[::1] weights,
                 double kappa):
    cdef Py_ssize_t n_s = pi_w.shape[0]
    cdef Py_ssize_t n_lie = pi_w.shape[2]
    cdef Py_ssize_t n_nodes = pi_w.shape[3]
    cdef Py_ssize_t s, p, g, a, b, k, i, j
    cdef double cab, wt
    cdef double complex kx, kxb, sw, swb, t, pa, pab

    y1_arr = np.zeros(n_s, dtype=np.complex128)
    y2_arr = np.zeros(n_s, dtype=np.complex128)
    y3_arr = np.zeros(n_s, dtype=np.complex128)
    comb_arr = np.zeros(n_s, dtype=np.float64)
    cdef double complex[::1] y1 = y1_arr
    cdef double complex[::1] y2 = y2_arr
    cdef double complex[::1] y3 = y3_arr
    cdef double[::1] comb = comb_arr

    s_w_arr = np.empty(n_nodes, dtype=np.complex128)
    s_wb_arr = np.empty(n_nodes, dtype=np.complex128)
    cdef double complex[::1] s_w = s_w_arr
    cdef double complex[::1] s_wb = s_wb_arr

    cdef double complex acc1, acc2, acc3
    cdef double accc

    for s in range(n_s):
        acc1 = 0
        acc2 = 0
        acc3 = 0
        accc = 0
        for p in range(3):
            i = PAIR_I[p]
            j = PAIR_J[p]
            for g in range(n_lie):
                for k in range(n_nodes):
                    s_w[k] = 0
                    s_wb[k] = 0
                for a in range(n_lie):
                    for b in range(n_lie):
                        cab = c[g, a, b]
                        if cab == 0.0:
                            continue
                        for k in range(n_nodes):
                            s_w[k] = s_w[k] + cab * pi_w[s, i, a, k] * pi_w[s, j, b, k]
                            s_wb[k] = s_wb[k] + cab * pi_wb[s, i, a, k] * pi_wb[s, j, b, k]
                for k in range(n_nodes):
                    wt = weights[k]
                    kx = kappa * xi_w[s, p, g, k]
                    kxb = kappa * xi_wb[s, p, g, k]
                    sw = s_w[k]
                    swb = s_wb[k]
                    acc1 = acc1 + wt * kx * swb
                    acc2 = acc2 + wt * sw * kxb
                    acc3 = acc3 + wt * sw * swb
                    t = kx + sw
                    accc = accc + wt * ((t.real * t.real + t.imag * t.imag)
                                        - (kx.real * kx.real + kx.imag * kx.imag))
        y1[s] = acc1
        y2[s] = acc2
        y3[s] = acc3
        comb[s] = accc
    return y1_arr, y2_arr, y3_arr, comb_arr
