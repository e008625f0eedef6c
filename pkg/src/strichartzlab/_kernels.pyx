# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Bessel kernels.

Hot path of the whole package: synthesis of fields on (t, r) grids needs
J_nu(r*rho) on dense product grids for many orders nu = k + (n-2)/2.  The
pure-numpy twin of this module is ``_kernels_py``; both implement the same
regime split so that results agree to ~1e-13:

  * power series for y <= max(12, nu + 2)
  * Hankel large-argument expansion (13 terms) for orders < 2
  * Hankel seeds at fractional order + forward recurrence otherwise

The forward recurrence is only used while the order stays well below the
argument (y >= nu + 2), where both Bessel solutions are oscillatory and the
recurrence is stable.  The series threshold keeps the alternating-series
cancellation below ~1e-10 absolute in double precision.
"""

from libc.math cimport cos, exp, fabs, floor, lgamma, log, sin, sqrt, M_PI

import numpy as np

cimport numpy as cnp

cnp.import_array()

DEF SERIES_MIN = 12.0
DEF SERIES_PAD = 2.0
DEF HANKEL_TERMS = 13
DEF SERIES_CAP = 200


cdef inline double _series_threshold(double nu) nogil:
    cdef double t = nu + SERIES_PAD
    return t if t > SERIES_MIN else SERIES_MIN


cdef double _series_j(double nu, double y) nogil:
    cdef double q = 0.25 * y * y
    cdef double term = exp(nu * log(0.5 * y) - lgamma(nu + 1.0))
    cdef double total = term
    cdef double amax = fabs(term)
    cdef int m
    for m in range(1, SERIES_CAP):
        term *= -q / (m * (nu + m))
        total += term
        if fabs(term) > amax:
            amax = fabs(term)
        elif fabs(term) < 1e-17 * amax:
            break
    return total


cdef double _hankel_j(double nu, double y) nogil:
    # J_nu(y) = sqrt(2/(pi y)) [cos(w) P - sin(w) Q], w = y - nu pi/2 - pi/4,
    # P/Q the even/odd Hankel coefficient sums.  Terminates exactly for
    # half-integer nu; for integer nu the truncation floor is ~exp(-2y).
    cdef double fournu2 = 4.0 * nu * nu
    cdef double a = 1.0
    cdef double p = 1.0
    cdef double qs = 0.0
    cdef double ypow = 1.0
    cdef int k
    cdef int sign = 1
    for k in range(1, HANKEL_TERMS):
        a *= (fournu2 - (2 * k - 1) * (2 * k - 1)) / (8.0 * k)
        ypow /= y
        if k % 2 == 1:
            # odd index -> Q, sign (-1)^((k-1)/2)
            sign = 1 if ((k - 1) // 2) % 2 == 0 else -1
            qs += sign * a * ypow
        else:
            sign = 1 if (k // 2) % 2 == 0 else -1
            p += sign * a * ypow
    cdef double w = y - 0.5 * nu * M_PI - 0.25 * M_PI
    return sqrt(2.0 / (M_PI * y)) * (cos(w) * p - sin(w) * qs)


cdef double _bessel_one(double nu, double y) nogil:
    cdef double mu0, jm, j0, jp, mu
    cdef int steps, i
    if y == 0.0:
        return 1.0 if nu == 0.0 else 0.0
    if y <= _series_threshold(nu):
        return _series_j(nu, y)
    if nu < 2.0:
        return _hankel_j(nu, y)
    mu0 = nu - floor(nu)
    jm = _hankel_j(mu0, y)
    j0 = _hankel_j(mu0 + 1.0, y)
    steps = <int> floor(nu - mu0 - 1.0 + 0.5)
    mu = mu0 + 1.0
    for i in range(steps):
        jp = (2.0 * mu / y) * j0 - jm
        jm = j0
        j0 = jp
        mu += 1.0
    return j0


def series_peak_log(double nu, double y):
    """log of the largest power-series term; cancellation diagnostic."""
    if y <= 0.0:
        return 0.0
    mstar = 0.5 * (-nu + sqrt(nu * nu + y * y))
    if mstar < 1.0:
        return nu * log(0.5 * y) - lgamma(nu + 1.0)
    return ((nu + 2.0 * mstar) * log(0.5 * y)
            - lgamma(mstar + 1.0) - lgamma(nu + mstar + 1.0))


def bessel_j_scalar(double nu, double y):
    return _bessel_one(nu, y)


def bessel_j_array(double nu, cnp.ndarray[double, ndim=1] y):
    cdef Py_ssize_t n = y.shape[0]
    cdef cnp.ndarray[double, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t i
    cdef double[::1] yv = y
    cdef double[::1] ov = out
    with nogil:
        for i in range(n):
            ov[i] = _bessel_one(nu, yv[i])
    return out


BACKEND = "compiled"
