# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: p-norm power iteration and the 2x2 grid oracle."""
import numpy as np
cimport numpy as cnp
from libc.math cimport pow, fabs, sqrt, cos, sin, exp

cnp.import_array()


cdef inline double cabs2(double complex z) nogil:
    return sqrt(z.real * z.real + z.imag * z.imag)


cdef double pnorm(double complex[::1] v, double p) nogil:
    cdef Py_ssize_t i, n = v.shape[0]
    cdef double m = 0.0, s = 0.0, t
    for i in range(n):
        t = cabs2(v[i])
        if t > m:
            m = t
    if m == 0.0:
        return 0.0
    for i in range(n):
        s += pow(cabs2(v[i]) / m, p)
    return m * pow(s, 1.0 / p)


cdef void duality(double complex[::1] z, double p, double complex[::1] out) nogil:
    cdef Py_ssize_t i, n = z.shape[0]
    cdef double m = 0.0, t
    for i in range(n):
        t = cabs2(z[i])
        if t > m:
            m = t
    for i in range(n):
        t = cabs2(z[i])
        if m == 0.0 or t == 0.0:
            out[i] = 0.0
        else:
            out[i] = pow(t / m, p - 1.0) * (z[i] / t)


cdef void matvec(double complex[:, ::1] a, double complex[::1] x,
                 double complex[::1] y) nogil:
    cdef Py_ssize_t i, j, n = a.shape[0], k = a.shape[1]
    cdef double complex acc
    for i in range(n):
        acc = 0.0
        for j in range(k):
            acc = acc + a[i, j] * x[j]
        y[i] = acc


cdef void matvec_h(double complex[:, ::1] a, double complex[::1] y,
                   double complex[::1] z) nogil:
    cdef Py_ssize_t i, j, n = a.shape[0], k = a.shape[1]
    cdef double complex acc
    for j in range(k):
        acc = 0.0
        for i in range(n):
            acc = acc + a[i, j].conjugate() * y[i]
        z[j] = acc


def power_iterate(a_in, x0, double p, int max_iter, double tol):
    cdef double complex[:, ::1] a = np.ascontiguousarray(a_in, dtype=np.complex128)
    cdef Py_ssize_t n = a.shape[0], k = a.shape[1], i
    x_arr = np.array(x0, dtype=np.complex128)
    cdef double complex[::1] x = x_arr
    y_arr = np.zeros(n, dtype=np.complex128)
    cdef double complex[::1] y = y_arr
    cdef double complex[::1] jy = np.zeros(n, dtype=np.complex128)
    cdef double complex[::1] z = np.zeros(k, dtype=np.complex128)
    best_arr = np.zeros(k, dtype=np.complex128)
    cdef double complex[::1] best_x = best_arr
    cdef double q = p / (p - 1.0)
    cdef double nx, ratio, best, new, zmax
    cdef int it = 0
    cdef bint converged = False

    nx = pnorm(x, p)
    if nx == 0.0:
        return 0.0, x_arr, 0, False
    with nogil:
        for i in range(k):
            x[i] = x[i] / nx
        matvec(a, x, y)
        ratio = pnorm(y, p)
        best = ratio
        best_x[:] = x
        while it < max_iter:
            it += 1
            duality(y, p, jy)
            matvec_h(a, jy, z)
            zmax = 0.0
            for i in range(k):
                if cabs2(z[i]) > zmax:
                    zmax = cabs2(z[i])
            if zmax == 0.0:
                converged = True
                break
            duality(z, q, x)
            nx = pnorm(x, p)
            for i in range(k):
                x[i] = x[i] / nx
            matvec(a, x, y)
            new = pnorm(y, p)
            if new > best:
                best = new
                best_x[:] = x
            if fabs(new - ratio) <= tol * (new if new > 1.0 else 1.0):
                converged = True
                ratio = new
                break
            ratio = new
    return best, best_arr, it, converged


def grid_max_2x2(a_in, double p, double r_lo, double r_hi, int nr,
                 double t_lo, double t_hi, int nt):
    cdef double complex[:, ::1] a = np.ascontiguousarray(a_in, dtype=np.complex128)
    cdef double complex a00 = a[0, 0], a01 = a[0, 1], a10 = a[1, 0], a11 = a[1, 1]
    cdef int i, j
    cdef double r, t, w, val, best = -1.0, br = 0.0, bt = 0.0
    cdef double complex x2, y1, y2
    cdef double dr = (r_hi - r_lo) / (nr - 1) if nr > 1 else 0.0
    cdef double dt = (t_hi - t_lo) / (nt - 1) if nt > 1 else 0.0
    with nogil:
        for i in range(nr):
            r = r_lo + i * dr if i < nr - 1 else r_hi
            w = 1.0 - pow(r, p)
            if w < 0.0:
                w = 0.0
            w = pow(w, 1.0 / p)
            for j in range(nt):
                t = t_lo + j * dt if j < nt - 1 else t_hi
                x2 = w * (cos(t) + 1j * sin(t))
                y1 = a00 * r + a01 * x2
                y2 = a10 * r + a11 * x2
                val = pow(pow(cabs2(y1), p) + pow(cabs2(y2), p), 1.0 / p)
                if val > best:
                    best = val
                    br = r
                    bt = t
    return best, br, bt
