"""Pure-numpy twin of the compiled Bessel kernels.

Selected at import time by :mod:`strichartzlab.backend` when the compiled
extension is unavailable (or when ``STRICHARTZLAB_PURE_PYTHON=1``).  Same
regime split and term counts as ``_kernels.pyx`` so the two backends agree
to roundoff; see ``benchmarks/bench_backends.py`` for the speed comparison.
"""

import math

import numpy as np

SERIES_MIN = 12.0
SERIES_PAD = 2.0
HANKEL_TERMS = 13
SERIES_CAP = 200

BACKEND = "python"


def _series_threshold(nu):
    return max(SERIES_MIN, nu + SERIES_PAD)


def _series_j(nu, y):
    """Alternating power series, vectorized over y."""
    y = np.asarray(y, dtype=np.float64)
    q = 0.25 * y * y
    with np.errstate(divide="ignore"):
        logy = np.where(y > 0, np.log(0.5 * np.maximum(y, 1e-300)), -np.inf)
    term = np.exp(nu * logy - math.lgamma(nu + 1.0))
    if nu == 0.0:
        term = np.where(y == 0.0, 1.0, term)
    total = term.copy()
    amax = np.abs(term)
    for m in range(1, SERIES_CAP):
        term = term * (-q / (m * (nu + m)))
        total += term
        at = np.abs(term)
        np.maximum(amax, at, out=amax)
        if np.all(at <= 1e-17 * amax):
            break
    return total


def _hankel_j(nu, y):
    fournu2 = 4.0 * nu * nu
    a = 1.0
    p = np.ones_like(y)
    qs = np.zeros_like(y)
    ypow = np.ones_like(y)
    for k in range(1, HANKEL_TERMS):
        a *= (fournu2 - (2 * k - 1) ** 2) / (8.0 * k)
        ypow = ypow / y
        if k % 2 == 1:
            sign = 1.0 if ((k - 1) // 2) % 2 == 0 else -1.0
            qs = qs + sign * a * ypow
        else:
            sign = 1.0 if (k // 2) % 2 == 0 else -1.0
            p = p + sign * a * ypow
    w = y - 0.5 * nu * np.pi - 0.25 * np.pi
    return np.sqrt(2.0 / (np.pi * y)) * (np.cos(w) * p - np.sin(w) * qs)


def _large_j(nu, y):
    if nu < 2.0:
        return _hankel_j(nu, y)
    mu0 = nu - math.floor(nu)
    jm = _hankel_j(mu0, y)
    j0 = _hankel_j(mu0 + 1.0, y)
    steps = int(round(nu - mu0 - 1.0))
    mu = mu0 + 1.0
    for _ in range(steps):
        jp = (2.0 * mu / y) * j0 - jm
        jm, j0 = j0, jp
        mu += 1.0
    return j0


def series_peak_log(nu, y):
    if y <= 0.0:
        return 0.0
    mstar = 0.5 * (-nu + math.sqrt(nu * nu + y * y))
    if mstar < 1.0:
        return nu * math.log(0.5 * y) - math.lgamma(nu + 1.0)
    return ((nu + 2.0 * mstar) * math.log(0.5 * y)
            - math.lgamma(mstar + 1.0) - math.lgamma(nu + mstar + 1.0))


def bessel_j_scalar(nu, y):
    return float(bessel_j_array(nu, np.array([y], dtype=np.float64))[0])


def bessel_j_array(nu, y):
    y = np.ascontiguousarray(y, dtype=np.float64)
    out = np.empty_like(y)
    thr = _series_threshold(nu)
    small = y <= thr
    if small.any():
        out[small] = _series_j(nu, y[small])
    big = ~small
    if big.any():
        out[big] = _large_j(nu, y[big])
    zero = y == 0.0
    if zero.any():
        out[zero] = 1.0 if nu == 0.0 else 0.0
    return out
