# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled walk kernel; mirrors :mod:`renewal_lab._walk_py` bit for bit."""
from libc.stdint cimport int64_t, uint64_t


def walk_hits(const uint64_t[:, ::1] draws, const uint64_t[::1] thresholds,
              Py_ssize_t n_max, int64_t[::1] counts):
    cdef Py_ssize_t walks = draws.shape[0]
    cdef Py_ssize_t steps = draws.shape[1]
    cdef Py_ssize_t n_thr = thresholds.shape[0]
    cdef Py_ssize_t w, i, j, s, step
    cdef uint64_t x
    with nogil:
        for w in range(walks):
            counts[0] += 1
            s = 0
            for i in range(steps):
                x = draws[w, i]
                step = 1
                for j in range(n_thr):
                    if x >= thresholds[j]:
                        step += 1
                    else:
                        break
                s += step
                if s > n_max:
                    break
                counts[s] += 1


def draw_steps(const uint64_t[::1] draws, const uint64_t[::1] thresholds, int64_t[::1] out):
    cdef Py_ssize_t n = draws.shape[0]
    cdef Py_ssize_t n_thr = thresholds.shape[0]
    cdef Py_ssize_t i, j, step
    with nogil:
        for i in range(n):
            step = 1
            for j in range(n_thr):
                if draws[i] >= thresholds[j]:
                    step += 1
                else:
                    break
            out[i] = step
