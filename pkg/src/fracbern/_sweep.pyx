# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled grid sweep; same operations in the same order as ``_sweep_py``."""
from libc.math cimport pow, fabs, isfinite, INFINITY, NAN

cdef double _EPS = 2.220446049250313e-16


cdef inline double powr(double y, double n, int parity) nogil:
    cdef double r
    if n == 0.0:
        return 1.0
    if y > 0.0:
        return pow(y, n)
    if y == 0.0:
        if n > 0.0:
            return 0.0
        return INFINITY
    if parity == 0:
        return NAN
    r = pow(-y, n)
    return r if parity > 0 else -r


cdef inline double dpowr(double y, double n, int parity) nogil:
    if n == 0.0:
        return 0.0
    return n * powr(y, n - 1.0, -parity)


def powr_py(double y, double n, int parity):
    return powr(y, n, parity)


def sweep(double[::1] y, const double[::1] W, const double[::1] P, const double[::1] Q,
          const signed char[::1] code, double n, int parity, double b3coef,
          Py_ssize_t start, Py_ssize_t stop, double tol, int maxit):
    cdef Py_ssize_t i, j
    cdef int c, it
    cdef bint done
    cdef double yj, f, v, a0, r, w, p, q, x, g, gp, dx
    for i in range(start, stop):
        c = code[i]
        if c == 1 or c == 3:
            j = i - 1
            yj = y[j]
            f = -P[j] * yj + Q[j] * powr(yj, n, parity)
            if c == 1:
                v = yj + W[j] * f
            else:
                v = y[i - 2] + 2.0 * W[j] * f
            y[i] = v
            if not isfinite(v):
                return i, 2
            continue
        if c == 2:
            a0 = 1.0
            r = -y[i - 1]
            w = W[i]
        elif c == 4:
            a0 = 3.0
            r = -4.0 * y[i - 1] + y[i - 2]
            w = b3coef * W[i]
        else:
            a0 = 25.0
            r = -48.0 * y[i - 1] + 36.0 * y[i - 2] - 16.0 * y[i - 3] + 3.0 * y[i - 4]
            w = 12.0 * W[i]
        p = P[i]
        q = Q[i]
        x = y[i - 1]
        done = False
        for it in range(maxit):
            g = a0 * x + r + w * (p * x - q * powr(x, n, parity))
            if fabs(g) <= tol:
                done = True
                break
            gp = a0 + w * (p - q * dpowr(x, n, parity))
            if gp == 0.0 or not isfinite(gp) or not isfinite(g):
                break
            dx = g / gp
            x = x - dx
            if fabs(dx) <= 2.0 * _EPS * fabs(x):
                done = True
                break
        if not done:
            return i, 1
        y[i] = x
    return stop, 0
