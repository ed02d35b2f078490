# cython: boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled element-loop stiffness apply (same contract as kernels.pure)."""

import numpy as np


def apply_stiffness(const long long[:, ::1] edofs, const double[:, ::1] ke,
                    const double[::1] u, double[::1] out):
    cdef Py_ssize_t ne = edofs.shape[0]
    cdef Py_ssize_t n = out.shape[0]
    cdef Py_ssize_t e, i, j
    cdef double ue[8]
    cdef double fe
    for i in range(n):
        out[i] = 0.0
    for e in range(ne):
        for i in range(8):
            ue[i] = u[edofs[e, i]]
        for i in range(8):
            fe = 0.0
            for j in range(8):
                fe += ke[i, j] * ue[j]
            out[edofs[e, i]] += fe
