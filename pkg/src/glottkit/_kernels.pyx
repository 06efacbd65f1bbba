# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled numerical kernels (see ``_kernels_py`` for the reference versions)."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def levinson(r, Py_ssize_t order):
    cdef double[::1] rv = np.ascontiguousarray(r, dtype=np.float64)
    a_arr = np.zeros(order + 1)
    k_arr = np.zeros(order)
    tmp_arr = np.zeros(order + 1)
    cdef double[::1] a = a_arr
    cdef double[::1] k = k_arr
    cdef double[::1] tmp = tmp_arr
    cdef double err = rv[0]
    cdef double acc, ki
    cdef Py_ssize_t i, j
    a[0] = 1.0
    if err <= 0.0:
        raise FloatingPointError("non-positive zero-lag autocorrelation")
    for i in range(1, order + 1):
        acc = rv[i]
        for j in range(1, i):
            acc += a[j] * rv[i - j]
        ki = -acc / err
        k[i - 1] = ki
        for j in range(1, i):
            tmp[j] = a[j]
        for j in range(1, i):
            a[j] = tmp[j] + ki * tmp[i - j]
        a[i] = ki
        err *= 1.0 - ki * ki
        if err <= 0.0:
            raise FloatingPointError("prediction error vanished at order %d" % i)
    return a_arr, err, k_arr


def allpole(x, a, double gain):
    # transposed direct form: only z[0] sits on the recursive path
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    an = np.ascontiguousarray(a, dtype=np.float64)
    an = an / an[0]
    cdef double[::1] av = an
    cdef double g = gain / np.ascontiguousarray(a, dtype=np.float64)[0]
    cdef Py_ssize_t n = xv.shape[0], p = av.shape[0] - 1, i, j
    out = np.empty(n)
    cdef double[::1] y = out
    zarr = np.zeros(p + 1)
    cdef double[::1] z = zarr
    cdef double yi
    for i in range(n):
        yi = g * xv[i] + z[0]
        y[i] = yi
        for j in range(p - 1):
            z[j] = z[j + 1] - av[j + 1] * yi
        if p:
            z[p - 1] = -av[p] * yi
    return out


def allzero(x, a, double gain):
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0], p = av.shape[0] - 1, i, j, lim
    out = np.empty(n)
    cdef double[::1] y = out
    cdef double acc
    for i in range(n):
        acc = 0.0
        lim = p if p < i else i
        for j in range(lim + 1):
            acc += av[j] * xv[i - j]
        y[i] = acc / gain
    return out


def leaky_integrate(x, double leak):
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0], i
    out = np.empty(n)
    cdef double[::1] y = out
    cdef double state = 0.0
    for i in range(n):
        state = leak * state + xv[i]
        y[i] = state
    return out


def root_power_sums(roots, Py_ssize_t nmax):
    cdef double complex[::1] z = np.ascontiguousarray(roots, dtype=np.complex128)
    cdef Py_ssize_t m = z.shape[0], i, n
    out = np.zeros(nmax)
    cdef double[::1] o = out
    cdef double complex p
    for i in range(m):
        p = 1.0
        for n in range(nmax):
            p = p * z[i]
            o[n] += p.real
    return out


def run_lengths_circular(mask):
    cdef cnp.uint8_t[::1] mv = np.ascontiguousarray(mask, dtype=np.uint8)
    cdef Py_ssize_t n = mv.shape[0], i, step, start = -1
    lab_arr = -np.ones(n, dtype=np.int64)
    cdef cnp.int64_t[::1] lab = lab_arr
    lengths = []
    cdef cnp.int64_t cur = -1
    for i in range(n):
        if not mv[i]:
            start = i
            break
    if start < 0:
        if n:
            lab_arr[:] = 0
            return lab_arr, [n]
        return lab_arr, []
    for step in range(1, n + 1):
        i = (start + step) % n
        if mv[i]:
            if cur < 0:
                cur = len(lengths)
                lengths.append(0)
            lab[i] = cur
            lengths[cur] += 1
        else:
            cur = -1
    return lab_arr, lengths
