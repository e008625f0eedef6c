"""Deterministic initial-data families.

Every family is unit-frequency by default (radial support inside
[1/2, 1]) before any rescaling; randomness flows from one 64-bit seed
through numpy's counter-based Philox generator, so identical
(family, seed) pairs produce identical bytes.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .bumps import unit_bump
from .decompose import RadialProfile, SpectralField, field_from_profile, rescale
from .errors import ConfigurationError
from .sphere import dim_harmonic

KINDS = ("single-harmonic", "random-band", "fourier-series-radial",
         "gaussian-radial", "concentration")


@dataclass(frozen=True)
class DataFamily:
    kind: str
    n: int
    k: int = 0
    l: int = 1
    kmax: int = 2
    decay: float = 1.5
    h: float = 1.0
    modes: int = 5
    sigma: float = 6.0
    n_rho: int = 257
    amplitude: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown data family kind {self.kind!r}")


def _unit_grid(n_rho):
    return np.linspace(0.5, 1.0, n_rho)


def _rng(seed):
    return np.random.Generator(np.random.Philox(np.uint64(seed)))


def generate(family, seed=0):
    """Realize a family as a SpectralField; deterministic per (family, seed)."""
    n = family.n
    if family.kind == "single-harmonic":
        rho = _unit_grid(family.n_rho)
        vals = family.amplitude * unit_bump(rho, 0.5, 1.0).astype(np.complex128)
        prof = RadialProfile(rho, vals, (0.5, 1.0))
        return SpectralField(n, {(0, family.k, family.l): prof})
    if family.kind == "random-band":
        rng = _rng(seed)
        rho = _unit_grid(family.n_rho)
        bump = unit_bump(rho, 0.5, 1.0)
        wiggle = np.polynomial.polynomial.polyvander(2.0 * rho - 1.5, 3)
        blocks = {}
        for k in range(family.kmax + 1):
            for l in range(1, dim_harmonic(n, k) + 1):
                z = rng.standard_normal(4) + 1j * rng.standard_normal(4)
                z *= (1.0 + k) ** (-family.decay)
                vals = family.amplitude * bump * (wiggle @ z)
                blocks[(0, k, l)] = RadialProfile(rho, vals, (0.5, 1.0))
        return SpectralField(n, blocks)
    if family.kind == "fourier-series-radial":
        rng = _rng(seed)
        rho = _unit_grid(family.n_rho)
        bump = unit_bump(rho, 0.5, 1.0)
        idx = np.arange(-family.modes, family.modes + 1)
        c = (rng.standard_normal(idx.size) + 1j * rng.standard_normal(idx.size))
        c *= (1.0 + np.abs(idx)) ** (-family.decay)
        vals = family.amplitude * bump * (np.exp(1j * np.outer(rho, idx)) @ c)
        return SpectralField(n, {(0, family.k, family.l): RadialProfile(
            rho, vals, (0.5, 1.0))})
    if family.kind == "gaussian-radial":
        return gaussian_radial_field(n, sigma=family.sigma,
                                     amplitude=family.amplitude,
                                     n_rho=family.n_rho)
    if family.kind == "concentration":
        base = DataFamily("gaussian-radial", n, sigma=family.sigma,
                          amplitude=family.amplitude, n_rho=family.n_rho)
        return rescale(generate(base, seed), 1.0 / family.h)
    raise ConfigurationError(family.kind)


def fourier_mode_field(n, mode, n_rho=257, amplitude=1.0):
    """Single e^{i mode rho} windowed to unit frequency (L^2 independent
    of the mode index)."""
    rho = _unit_grid(n_rho)
    vals = amplitude * unit_bump(rho, 0.5, 1.0) * np.exp(1j * mode * rho)
    return SpectralField(n, {(0, 0, 1): RadialProfile(rho, vals, (0.5, 1.0))})


def gaussian_radial_field(n, sigma=6.0, amplitude=1.0, n_rho=1200):
    """Spectral data of the Gaussian amplitude * exp(-|x|^2 / (2 sigma^2)).

    n = 3: the exact profile is c(rho) = sqrt(4 pi) A sigma^3 rho
    exp(-sigma^2 rho^2 / 2); the Gaussian tail is cut at the 1e-14 level
    and the remainder split into dyadic blocks.  Used by the d'Alembert
    oracle tests, which compare against the closed-form solution.
    """
    if n != 3:
        raise ConfigurationError("closed-form gaussian data implemented for n = 3")
    rho_hi = math.sqrt(2.0 * 34.5) / sigma  # exp(-s^2 rho^2/2) ~ 1e-15
    rho_lo = rho_hi * 2.0 ** (-12)          # linear low end: mass below is ~1e-12
    rho = np.geomspace(rho_lo, rho_hi, n_rho)
    vals = (math.sqrt(4.0 * math.pi) * amplitude * sigma ** 3
            * rho * np.exp(-0.5 * (sigma * rho) ** 2)).astype(np.complex128)
    return field_from_profile(n, 0, 1, rho, vals)


def gaussian_position_series(radii, times, sigma, amplitude):
    """Closed-form cos(tD) Gaussian: u(t,r) = [(r+t) G(r+t) + (r-t) G(r-t)]/(2r)
    with G(s) = A exp(-s^2/(2 sigma^2)); the r -> 0 limit is filled in."""
    r = np.asarray(radii)[None, :]
    t = np.asarray(times)[:, None]

    def g(s):
        return amplitude * np.exp(-0.5 * (s / sigma) ** 2)

    num = (r + t) * g(r + t) + (r - t) * g(r - t)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = num / (2.0 * r)
    small = np.broadcast_to(r, out.shape) < 1e-9
    if small.any():
        tt = np.broadcast_to(t, out.shape)[small]
        out[small] = (1.0 - tt ** 2 / sigma ** 2) * g(tt)
    return out


def gaussian_velocity_series(radii, times, sigma, amplitude):
    """Closed-form D^{-1} sin(tD) applied to the same Gaussian:
    u(t,r) = (A sigma^2 / (2 r)) [G0(r-t) - G0(r+t)], G0(s) = exp(-s^2/(2 s^2))."""
    r = np.asarray(radii)[None, :]
    t = np.asarray(times)[:, None]

    def g0(s):
        return np.exp(-0.5 * (s / sigma) ** 2)

    with np.errstate(invalid="ignore", divide="ignore"):
        out = amplitude * sigma ** 2 * (g0(r - t) - g0(r + t)) / (2.0 * r)
    small = np.broadcast_to(r, out.shape) < 1e-9
    if small.any():
        tt = np.broadcast_to(t, out.shape)[small]
        out[small] = amplitude * tt * g0(tt)
    return out
