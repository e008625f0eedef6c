"""Real spherical harmonics on S^{n-1} for n = 2, 3.

Basis layout (real-valued, orthonormal in L^2 of the sphere):

  n = 2:  Y_{0,1} = 1/sqrt(2 pi);  Y_{k,1} = cos(k t)/sqrt(pi),
          Y_{k,2} = sin(k t)/sqrt(pi) for k >= 1.
  n = 3:  l = 1 is the zonal m = 0 harmonic; l = 2m / 2m+1 are the
          sqrt(2) P-bar_k^m(cos t) {cos, sin}(m p) pair, m = 1..k,
          with P-bar the fully normalized associated Legendre functions
          (stable three-term recurrence, good to degree ~10^3).

Quadrature grids: n = 2 uniform (exact for trig degree < M); n = 3
Gauss-Legendre in cos(theta) x uniform in phi (product exactness).
Dimension formulas accept any n >= 2; grids and synthesis only n = 2, 3.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DomainError, ResolutionError

_TWO_PI = 2.0 * math.pi


def dim_harmonic(n, k):
    """Dimension d(k) of the degree-k spherical harmonics on S^{n-1}."""
    if n < 2 or k < 0:
        raise DomainError(f"need n >= 2, k >= 0, got n={n}, k={k}")
    if k == 0:
        return 1
    return (2 * k + n - 2) * math.comb(n + k - 3, k - 1) // k


def laplace_eigenvalue(n, k):
    """Eigenvalue of -Delta_omega on degree-k harmonics: k(k+n-2)."""
    return k * (k + n - 2)


def index_set(n, kmax):
    """All (k, l) with k <= kmax, 1 <= l <= d(k), in lexicographic order."""
    return [(k, l) for k in range(kmax + 1) for l in range(1, dim_harmonic(n, k) + 1)]


def _legendre_normalized(kmax, m, x):
    """P-bar_k^m(x) for k = m..kmax; rows indexed by k - m.

    Normalized so that the complex harmonics P-bar e^{im phi} have unit
    L^2(S^2) norm; stable forward recurrence in k.
    """
    x = np.asarray(x, dtype=np.float64)
    sin_t = np.sqrt(np.maximum(0.0, 1.0 - x * x))
    out = np.empty((kmax - m + 1, x.size), dtype=np.float64)
    # seed P-bar_m^m
    p = np.full(x.size, 1.0 / math.sqrt(4.0 * math.pi))
    for i in range(1, m + 1):
        p = p * sin_t * math.sqrt((2.0 * i + 1.0) / (2.0 * i))
    out[0] = p
    if kmax == m:
        return out
    out[1] = x * math.sqrt(2.0 * m + 3.0) * p
    for k in range(m + 2, kmax + 1):
        a = math.sqrt((4.0 * k * k - 1.0) / (k * k - m * m))
        b = math.sqrt(((k - 1.0) ** 2 - m * m) / (4.0 * (k - 1.0) ** 2 - 1.0))
        out[k - m] = a * (x * out[k - m - 1] - b * out[k - m - 2])
    return out


@dataclass(frozen=True)
class AngularGrid:
    """Quadrature nodes on S^{n-1} with a declared product exactness."""

    n: int
    points: np.ndarray        # (m, n) unit vectors
    weights: np.ndarray       # (m,)
    exactness: int
    # internal angle coordinates, kept to evaluate bases without arccos
    _angles: tuple = field(default=(), repr=False)

    @property
    def size(self):
        return self.weights.size


def build_angular_grid(n, exactness):
    """Grid integrating products of harmonics with total degree <= exactness."""
    if exactness < 0:
        raise ConfigurationError("exactness must be >= 0")
    if n == 2:
        m = max(8, exactness + 1)
        theta = _TWO_PI * np.arange(m) / m
        pts = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        w = np.full(m, _TWO_PI / m)
        return AngularGrid(2, pts, w, exactness, _angles=(theta,))
    if n == 3:
        nl = exactness // 2 + 1
        x, wx = np.polynomial.legendre.leggauss(nl)
        mphi = max(8, exactness + 1)
        phi = _TWO_PI * np.arange(mphi) / mphi
        wphi = _TWO_PI / mphi
        sin_t = np.sqrt(1.0 - x * x)
        ct = np.repeat(x, mphi)
        st = np.repeat(sin_t, mphi)
        ph = np.tile(phi, nl)
        pts = np.stack([st * np.cos(ph), st * np.sin(ph), ct], axis=1)
        w = np.repeat(wx, mphi) * wphi
        return AngularGrid(3, pts, w, exactness, _angles=(x, phi))
    raise ConfigurationError(f"angular grids implemented for n in {{2, 3}}, got n={n}")


def _degree_block_on_grid(grid, k):
    """Values of the degree-k orthonormal basis at the grid nodes: (m, d(k))."""
    if grid.n == 2:
        (theta,) = grid._angles
        if k == 0:
            return np.full((theta.size, 1), 1.0 / math.sqrt(_TWO_PI))
        return np.stack([np.cos(k * theta), np.sin(k * theta)],
                        axis=1) / math.sqrt(math.pi)
    x, phi = grid._angles
    nl, mphi = x.size, phi.size
    cols = []
    zonal = _legendre_normalized(k, 0, x)[-1]
    cols.append(np.repeat(zonal, mphi))
    for m in range(1, k + 1):
        pb = _legendre_normalized(k, m, x)[-1]
        rad = np.repeat(pb, mphi) * math.sqrt(2.0)
        ang_c = np.tile(np.cos(m * phi), nl)
        ang_s = np.tile(np.sin(m * phi), nl)
        cols.append(rad * ang_c)
        cols.append(rad * ang_s)
    return np.stack(cols, axis=1)


_BASIS_CACHE = {}


def basis_on_grid(grid, kmax):
    """(m, N) matrix of all harmonics with degree <= kmax at the grid nodes."""
    key = (id(grid), grid.n, grid.exactness, grid.size, kmax)
    hit = _BASIS_CACHE.get(key)
    if hit is None:
        hit = np.concatenate(
            [_degree_block_on_grid(grid, k) for k in range(kmax + 1)], axis=1)
        if len(_BASIS_CACHE) > 32:
            _BASIS_CACHE.clear()
        _BASIS_CACHE[key] = hit
    return hit


def sph_harmonic(n, k, l, omega):
    """Y_{k,l} evaluated at unit vectors omega of shape (..., n)."""
    if not 1 <= l <= dim_harmonic(n, k):
        raise DomainError(f"l must lie in 1..d(k)={dim_harmonic(n, k)}, got {l}")
    omega = np.asarray(omega, dtype=np.float64)
    if omega.shape[-1] != n:
        raise DomainError(f"points must have {n} components")
    norms = np.sqrt((omega ** 2).sum(axis=-1))
    if not np.allclose(norms, 1.0, atol=1e-12):
        raise DomainError("points must lie on the unit sphere (|omega| = 1)")
    if n == 2:
        theta = np.arctan2(omega[..., 1], omega[..., 0])
        if k == 0:
            return np.full(theta.shape, 1.0 / math.sqrt(_TWO_PI))
        fn = np.cos if l == 1 else np.sin
        return fn(k * theta) / math.sqrt(math.pi)
    if n == 3:
        x = np.clip(omega[..., 2], -1.0, 1.0)
        phi = np.arctan2(omega[..., 1], omega[..., 0])
        if l == 1:
            m = 0
        else:
            m = (l - 2) // 2 + 1
        pb = _legendre_normalized(k, m, np.ravel(x))[-1].reshape(x.shape)
        if m == 0:
            return pb
        ang = np.cos(m * phi) if l % 2 == 0 else np.sin(m * phi)
        return math.sqrt(2.0) * pb * ang
    raise ConfigurationError("synthesis implemented for n in {2, 3}")


@dataclass
class AngularSpectrum:
    """Coefficients on the (k, l) basis, truncated at degree kmax."""

    n: int
    kmax: int
    coeffs: np.ndarray  # complex or real, aligned with index_set(n, kmax)

    def degree_slices(self):
        out = []
        start = 0
        for k in range(self.kmax + 1):
            d = dim_harmonic(self.n, k)
            out.append((k, slice(start, start + d)))
            start += d
        return out

    def copy(self):
        return AngularSpectrum(self.n, self.kmax, self.coeffs.copy())


def analyze_angular(samples, grid, kmax):
    """Project grid samples onto harmonics of degree <= kmax."""
    if grid.exactness < 2 * kmax:
        raise ResolutionError(
            "angular grid too coarse for requested degree",
            required=f"exactness >= {2 * kmax}")
    basis = basis_on_grid(grid, kmax)
    coeffs = basis.T @ (grid.weights * np.asarray(samples))
    return AngularSpectrum(grid.n, kmax, coeffs)


def synthesize_angular(spectrum, grid):
    """Evaluate the spectrum's harmonic expansion at the grid nodes."""
    basis = basis_on_grid(grid, spectrum.kmax)
    return basis @ spectrum.coeffs


def lambda_omega_pow(spectrum, b):
    """Apply (1 - Delta_omega)^{b/2}: factor (1 + k(k+n-2))^{b/2} per degree."""
    out = spectrum.copy()
    for k, sl in out.degree_slices():
        out.coeffs[sl] = out.coeffs[sl] * (
            (1.0 + laplace_eigenvalue(out.n, k)) ** (0.5 * b))
    return out


def sphere_lq_norm(grid, values, q):
    """L^q norm of grid samples; q = inf gives the grid max."""
    if q == math.inf:
        return float(np.abs(values).max())
    return float((grid.weights @ np.abs(values) ** q) ** (1.0 / q))


def spectral_cluster_ratio(n, k, q):
    """max_l ||Y_{k,l}||_q / (1 + lambda_k)^{sigma(q)/2}, sigma = (n-1)(1/2 - 1/q)."""
    if q < 2:
        raise DomainError("cluster ratio defined for q >= 2")
    sigma = (n - 1) * (0.5 - 1.0 / q)
    if q == math.inf or q != int(q) or int(q) % 2:
        exactness = max(2 * k + 8, 4 * k)
    else:
        exactness = int(q) * max(k, 1) + 4
    grid = build_angular_grid(n, exactness)
    block = _degree_block_on_grid(grid, k)
    best = 0.0
    for col in block.T:
        best = max(best, sphere_lq_norm(grid, col, q))
    return best / (1.0 + laplace_eigenvalue(n, k)) ** (0.5 * sigma)


_HARMONIC_LQ_CACHE = {}


def harmonic_lq_norm(n, k, l, q):
    """|| Y_{k,l} ||_{L^q(S^{n-1})} (grid max for q = inf); cached."""
    key = (n, k, l, q)
    hit = _HARMONIC_LQ_CACHE.get(key)
    if hit is None:
        if q == math.inf or q != int(q) or int(q) % 2:
            exactness = max(2 * k + 8, 4 * k)
        else:
            exactness = int(q) * max(k, 1) + 4
        grid = build_angular_grid(n, min(exactness, 520))
        block = _degree_block_on_grid(grid, k)
        hit = sphere_lq_norm(grid, block[:, l - 1], q)
        _HARMONIC_LQ_CACHE[key] = hit
    return hit


def band_project(spectrum, lo, hi):
    """Zero all degrees outside [lo, hi]."""
    out = spectrum.copy()
    for k, sl in out.degree_slices():
        if not lo <= k <= hi:
            out.coeffs[sl] = 0.0
    return out


def lp_bernstein_ratio(n, lam, p, trials=8, seed=0):
    """Empirical sup of ||S_lam f||_inf / ((1+lam)^{(n-1)/p} ||f||_p).

    S_lam projects onto degrees [lam, 2 lam]; the test family is the
    constant, each zonal harmonic in the band, and seeded random
    band-limited draws of degree <= 2 lam.
    """
    if p < 2:
        raise DomainError("p >= 2 required")
    lam = int(lam)
    kmax = 2 * lam
    grid = build_angular_grid(n, max(4 * kmax, 2 * kmax + 8))
    basis = basis_on_grid(grid, kmax)
    rng = np.random.Generator(np.random.Philox(seed))
    nb = basis.shape[1]
    fams = [np.concatenate([[1.0], np.zeros(nb - 1)])]
    for k in range(max(1, lam), kmax + 1, max(1, lam // 2)):
        c = np.zeros(nb)
        c[sum(dim_harmonic(n, j) for j in range(k))] = 1.0
        fams.append(c)
    for _ in range(trials):
        fams.append(rng.standard_normal(nb))
    best = 0.0
    scale = (1.0 + lam) ** ((n - 1.0) / p)
    for c in fams:
        f = basis @ c
        spec = AngularSpectrum(n, kmax, c)
        proj = synthesize_angular(band_project(spec, lam, kmax), grid)
        denom = scale * sphere_lq_norm(grid, f, p)
        if denom > 0:
            best = max(best, np.abs(proj).max() / denom)
    return best
