"""Semilinear radial wave equation: Picard iteration and lifespan fits.

Solves Box u = F_p(u), F_p(u) = coeff * sign(u)|u|^p, with radial data by
iterating u_{m+1} = (linear evolution) + Duhamel(F_p(u_m)).  The Duhamel
integral int_0^t sin((t-s)D)/D h(s) ds is evaluated spectrally: each time
slice of the nonlinearity is re-analyzed onto a padded frequency grid
(dealias factor 2 over the unit-frequency data) and the s-integral is
reduced to cumulative sums via sin((t-s)rho) = sin(t rho)cos(s rho) -
cos(t rho)sin(s rho).

The numerical lifespan is the largest horizon T at which the Picard map
still contracts inside a fixed multiple of the linear solution's norm.
This mirrors the contraction-mapping existence mechanism, not the true
blow-up time; fitted lifespan exponents are compared against the same
mechanism's prediction.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.fft import dst

from . import norms as nm
from . import propagator as pg
from .decompose import sobolev_norm, trapezoid_weights
from .errors import DomainError, ResourceBudgetError
from .families import DataFamily, generate

OMEGA = {2: 2.0 * math.pi, 3: 4.0 * math.pi}


@dataclass(frozen=True)
class CriticalExponents:
    s_c: float
    s_d: float
    p_conf: float
    p_c: float


def exponents(n, p):
    """Critical regularity s_c, the 1D-trace index s_d, the conformal and
    critical powers; p_c solves s_c = s_d via (n-1)p^2 - (n+1)p - 2 = 0."""
    if n not in (2, 3) or p <= 1:
        raise DomainError("need n in {2, 3} and p > 1")
    s_c = 0.5 * n - 2.0 / (p - 1.0)
    s_d = 0.5 - 1.0 / p
    p_conf = 1.0 + 4.0 / (n - 1.0)
    disc = (n + 1.0) ** 2 + 8.0 * (n - 1.0)
    p_c = ((n + 1.0) + math.sqrt(disc)) / (2.0 * (n - 1.0))
    return CriticalExponents(s_c, s_d, p_conf, p_c)


def solution_exponent(n, p):
    """1/q per the two lifespan branches; q p is the time exponent of the
    solution space S = L^{qp}_t L^p_{|x|} L^inf_omega."""
    ex = exponents(n, p)
    if p > ex.p_c:
        inv_q = 2.0 / (p - 1.0) - (n - 2.0)
    else:
        inv_q = 1.0 / p + 0.5 * (3.0 - n)
    if inv_q <= 0:
        raise DomainError(f"1/q = {inv_q} not positive for (n, p) = ({n}, {p})")
    return 1.0 / inv_q


@dataclass(frozen=True)
class StraussConfig:
    n: int
    p: float
    forcing_coeff: float = 1.0
    iter_cap: int = 30
    contraction_tol: float = 1e-4
    blowup_factor: float = 25.0
    amplitude: float = 8.0      # data-size calibration, see lifespan()
    time_step: float = 0.4
    min_times: int = 65
    rho_pad: float = 2.0
    n_rho_min: int = 192
    tail_width: float = 60.0

    def s_space(self, T):
        q = solution_exponent(self.n, self.p)
        return nm.NormSpec(q=q * self.p, r=self.p, angular=math.inf, T=T)


@dataclass
class PicardResult:
    converged: bool
    s_norm: float
    iterations: int
    trace: tuple
    linear_norm: float
    field: object = field(default=None, repr=False)


def unit_radial_pair(n, eps, s_norm_index, seed=0, n_rho=257):
    """Radial unit-frequency data (f, 0) scaled so ||f||_{H^{s}} = eps."""
    f = generate(DataFamily("single-harmonic", n, k=0, n_rho=n_rho), seed)
    base = sobolev_norm(f, s_norm_index)
    return f.scaled(eps / base), None


def _cumtrapz(rows, dt):
    """Cumulative trapezoid along axis 0."""
    c = np.cumsum(rows, axis=0) * dt
    c -= 0.5 * dt * (rows + rows[0])
    return c


def _sine_cross_terms(times, rho, h_hat):
    """Common Duhamel reduction: int_0^t sin((t-s)rho)/rho h(s) ds via
    sin((t-s)r) = sin(tr)cos(sr) - cos(tr)sin(sr) and cumulative sums."""
    dt = times[1] - times[0]
    srho = np.sin(np.outer(times, rho))
    crho = np.cos(np.outer(times, rho))
    a_cum = _cumtrapz(crho * h_hat, dt)
    b_cum = _cumtrapz(srho * h_hat, dt)
    return (srho * a_cum - crho * b_cum) / rho


class _SineSolver:
    """n = 3 radial wave on [0, R] with w = r u: exact discrete-sine
    spectral evolution (Dirichlet wall at R, harmless behind the data
    tail), O(nt N log N) per Picard iteration."""

    def __init__(self, cfg, T):
        self.cfg = cfg
        n_t = max(cfg.min_times, int(math.ceil(T / cfg.time_step)) + 1)
        self.times = np.linspace(0.0, T, n_t)
        dr = 0.35
        n_r = int(math.ceil((T + cfg.tail_width) / dr))
        if n_t * n_r > 4e8:
            raise ResourceBudgetError(f"picard grids too large at T = {T}")
        self.radii = dr * np.arange(1, n_r + 1)
        self.big_r = dr * (n_r + 1)
        self.grid = pg.RadialGrid(self.radii, np.full(n_r, dr))
        self.rho_all = math.pi * np.arange(1, n_r + 1) / self.big_r
        self.kpad = int(np.searchsorted(self.rho_all, cfg.rho_pad))
        self.dst_norm = 1.0 / (2.0 * (n_r + 1))

    def linear(self, f, g):
        """cos(tD) f + D^{-1} sin(tD) g as the (nt, nr) coefficient a_0."""
        out = np.zeros((self.times.size, self.radii.size))
        for part, mult in ((f, "cos"), (g, "sinc")):
            if part is None or not part.blocks:
                continue
            for (_, _, _), p in part.blocks.items():
                sin_rk = np.sin(np.outer(self.radii, p.rho))
                if mult == "cos":
                    tm = np.cos(np.outer(self.times, p.rho))
                else:
                    tm = np.sin(np.outer(self.times, p.rho)) / p.rho
                w = math.sqrt(2.0 / math.pi) * (
                    (tm * (p.weights * p.values.real)) @ sin_rk.T)
                out += w
        return out / self.radii

    def duhamel(self, h_coeff):
        big_h = dst(h_coeff * self.radii, type=1, axis=1)
        big_h[:, self.kpad:] = 0.0  # dealias: spectral pad cutoff
        rho = self.rho_all[: self.kpad]
        w_hat = _sine_cross_terms(self.times, rho, big_h[:, : self.kpad])
        full = np.zeros_like(big_h)
        full[:, : self.kpad] = w_hat
        w = dst(full, type=1, axis=1) * self.dst_norm
        return w / self.radii


class _HankelSolver:
    """n = 2 radial wave via the Fourier-Bessel quadrature kernels; used
    for the short horizons of the endpoint (log-lifespan) branch."""

    def __init__(self, cfg, T):
        self.cfg = cfg
        n_t = max(cfg.min_times, int(math.ceil(T / cfg.time_step)) + 1)
        self.times = np.linspace(0.0, T, n_t)
        r_max = T + cfg.tail_width
        self.grid = pg.radial_grid(r_max, cfg.rho_pad)
        self.radii = self.grid.radii
        rate = T + r_max
        n_rho = max(cfg.n_rho_min,
                    math.ceil(cfg.rho_pad * 4.0 * rate / math.pi) + 2)
        if self.times.size * self.radii.size * n_rho > 4e9:
            raise ResourceBudgetError(f"picard grids too large at T = {T}")
        rho_lo = min(2e-3 * cfg.rho_pad, 0.2 / T)
        self.rho = np.linspace(rho_lo, cfg.rho_pad, n_rho)

    def linear(self, f, g):
        vh = pg.wave_cauchy(f, g, self.times, self.grid,
                            check_resolution=False)
        return vh.coeffs[(0, 1)].real

    def duhamel(self, h_coeff):
        kern = pg.hankel_kernel(self.cfg.n, 0, self.radii, self.rho)
        meas = self.grid.weights * self.radii ** (self.cfg.n - 1)
        h_hat = (h_coeff * meas) @ kern * np.sqrt(self.rho)
        c_duh = _sine_cross_terms(self.times, self.rho, h_hat)
        return (c_duh * (np.sqrt(self.rho) * trapezoid_weights(self.rho))) \
            @ kern.T


def _s_norm(cfg, times, grid, coeff, T):
    u = pg.PhysicalField(cfg.n, times, grid, {(0, 1): coeff})
    return nm.mixed_norm(u, cfg.s_space(T)).value


def picard_solve(cfg, data, T, seed=0):
    """Iterate the Duhamel fixed point on [0, T].

    `data` is an (f, g) pair of radial SpectralFields (g may be None).
    Convergence: successive S-norm differences contract below
    contraction_tol x (linear norm).  Divergence: the S-norm exceeds
    blowup_factor x (linear norm), or differences grow twice in a row.
    """
    f, g = data
    for part in (f, g):
        if part is not None and not part.is_radial():
            raise DomainError("picard_solve works on radial data")
    solver = _SineSolver(cfg, T) if cfg.n == 3 else _HankelSolver(cfg, T)
    times, grid = solver.times, solver.grid
    vh_coeff = solver.linear(f, g)
    lin_norm = _s_norm(cfg, times, grid, vh_coeff, T)
    if cfg.forcing_coeff == 0.0 or lin_norm == 0.0:
        return PicardResult(True, lin_norm, 1, (0.0,), lin_norm,
                            pg.PhysicalField(cfg.n, times, grid,
                                             {(0, 1): vh_coeff + 0j}))
    sqrt_omega = math.sqrt(OMEGA[cfg.n])
    u = vh_coeff
    prev_diff = None
    grew = 0
    trace = []
    for it in range(1, cfg.iter_cap + 1):
        phys = u / sqrt_omega
        forcing = cfg.forcing_coeff * np.sign(phys) * np.abs(phys) ** cfg.p
        u_new = vh_coeff + solver.duhamel(sqrt_omega * forcing)
        diff = _s_norm(cfg, times, grid, (u_new - u) + 0j, T)
        s_now = _s_norm(cfg, times, grid, u_new + 0j, T)
        trace.append(s_now)
        if not np.isfinite(s_now) or s_now > cfg.blowup_factor * lin_norm:
            return PicardResult(False, s_now, it, tuple(trace), lin_norm)
        if diff <= cfg.contraction_tol * max(lin_norm, 1e-300):
            return PicardResult(True, s_now, it, tuple(trace), lin_norm,
                                pg.PhysicalField(cfg.n, times, grid,
                                                 {(0, 1): u_new + 0j}))
        if prev_diff is not None and diff > prev_diff:
            grew += 1
            if grew >= 2:
                return PicardResult(False, s_now, it, tuple(trace), lin_norm)
        else:
            grew = 0
        prev_diff = diff
        u = u_new
    return PicardResult(False, trace[-1], cfg.iter_cap, tuple(trace), lin_norm)


def lifespan(cfg, eps, seed=0, t_init=0.02, t_cap=4096.0, rel_tol=0.05):
    """Largest T where the Picard map contracts, bracketed to rel_tol.

    Data: unit-frequency radial pair scaled so the relevant data norm is
    amplitude * eps (the amplitude constant shifts the lifespan law's
    constant, not its fitted exponent).
    """
    ex = exponents(cfg.n, cfg.p)
    s_idx = ex.s_d if cfg.p <= ex.p_c else ex.s_c
    data = unit_radial_pair(cfg.n, cfg.amplitude * eps, s_idx, seed=seed)

    def converges(T):
        return picard_solve(cfg, data, T, seed=seed).converged

    t_lo = None
    t = t_init
    while t <= t_cap:
        if converges(t):
            t_lo = t
            break
        t /= 4.0
        if t < 1e-4:
            raise ResourceBudgetError("no converged bracket above T = 1e-4")
    t_hi = None
    t = t_lo * 2.0
    while t <= t_cap:
        if not converges(t):
            t_hi = t
            break
        t_lo = t
        t *= 2.0
    if t_hi is None:
        raise ResourceBudgetError(
            f"no divergence bracket below the T budget {t_cap} "
            f"(last converged T = {t_lo})")
    while t_hi / t_lo > 1.0 + rel_tol:
        mid = math.sqrt(t_lo * t_hi)
        if converges(mid):
            t_lo = mid
        else:
            t_hi = mid
    return math.sqrt(t_lo * t_hi)
