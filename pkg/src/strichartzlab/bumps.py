"""Smooth compactly supported cutoffs used across the package.

All cutoffs are built from the C^infty transition

    g(s)  = exp(-BETA / s)            for s > 0, else 0
    S(s)  = g(s) / (g(s) + g(1 - s))  (0 for s <= 0, 1 for s >= 1)

with BETA = 2.  The closed forms are part of the package contract (results
are bit-reproducible); BETA = 2 makes the Fourier transforms of the
windows decay like exp(-c sqrt(BETA |s|)), fast enough for the kernel
decay fits downstream.

``phi_cutoff``      radial low-pass: 1 on [0, 1], 0 outside [0, 2).
``eta_window``      annular window: 1 on [1/2, 1], supported in [1/4, 2].
``unit_bump``       bump on (lo, hi) vanishing to all orders at both ends.
``lp_multiplier``   phi(x/2^j) - phi(x/2^(j-1)), the dyadic shell j.
"""

import numpy as np

BETA = 2.0


def _g(s):
    s = np.asarray(s, dtype=np.float64)
    out = np.zeros_like(s)
    pos = s > 0
    out[pos] = np.exp(-BETA / s[pos])
    return out


def smoothstep(s):
    """C^infty step: 0 for s <= 0, 1 for s >= 1."""
    s = np.asarray(s, dtype=np.float64)
    a = _g(s)
    b = _g(1.0 - s)
    with np.errstate(invalid="ignore"):
        out = np.where(a + b > 0, a / np.where(a + b > 0, a + b, 1.0), 0.0)
    return out


def phi_cutoff(x):
    """Radial cutoff: 1 on |x| <= 1, 0 for |x| >= 2, smooth between."""
    x = np.abs(np.asarray(x, dtype=np.float64))
    return 1.0 - smoothstep(x - 1.0)


def lp_multiplier(x, j):
    """Dyadic shell multiplier phi(x/2^j) - phi(x/2^(j-1))."""
    x = np.asarray(x, dtype=np.float64)
    return phi_cutoff(x / 2.0 ** j) - phi_cutoff(x / 2.0 ** (j - 1))


def eta_window(rho):
    """Annular window: 1 on [1/2, 1], supported in [1/4, 2]."""
    rho = np.asarray(rho, dtype=np.float64)
    rise = smoothstep((rho - 0.25) / 0.25)
    fall = 1.0 - smoothstep(rho - 1.0)
    return rise * fall


def unit_bump(x, lo=0.0, hi=1.0):
    """exp-type bump supported on (lo, hi), peak value 1 at the midpoint."""
    x = np.asarray(x, dtype=np.float64)
    s = (x - lo) / (hi - lo)
    out = np.zeros_like(s)
    inside = (s > 0) & (s < 1)
    si = s[inside]
    # normalized so the midpoint value is exactly 1
    out[inside] = np.exp(-BETA * (1.0 / si + 1.0 / (1.0 - si)) + 4.0 * BETA)
    return out
