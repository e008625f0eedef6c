"""Estimate families: admissibility, scaling exponents, ratios, sweeps.

Each family encodes one space-time estimate as (admissibility predicate,
left norm chain, right data norm, localization factor).  Ratios are
lhs / rhs with both sides evaluated on scale-adapted measurement windows:
a field at frequency scale lam is measured over |t| <= T_ref / lam^a and
r <= speed * t_max + tail / lam, which makes the per-theorem scaling
identities exact up to quadrature and keeps grid sizes scale-independent.

Sharpness probes instead freeze the window at unit scale and push a
concentration parameter, so a violated exponent condition shows up as
power-law ratio growth.
"""

import dataclasses
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from . import families as fam
from . import norms as nm
from . import propagator as pg
from .decompose import hsb_norm, rescale, sobolev_norm
from .errors import ConfigurationError, DomainError, ResourceBudgetError
from .sphere import build_angular_grid

INF = math.inf

T_REF = 64.0          # truncation horizon for global norms at unit frequency
TAIL_WIDTH = 80.0     # spatial tail allowance at unit frequency
N_TIMES = 257
WORK_BUDGET = 4e9     # rough flop guard per ratio evaluation

FAMILIES = ("thm1.1", "cor1.3", "thm1.2", "thm1.2-endpoint", "thm1.2-power",
            "thm1.4", "thm1.4-power", "thm1.4-log", "thm1.5", "thm1.6",
            "thm1.7", "thm1.8", "kss")

ROMAN_ALIASES = {
    "I": "classic", "II": "thm1.1", "III": "thm1.4", "IV": "thm1.2-power",
    "V": "thm1.4-power", "VI": "kss", "VII": "thm1.7", "VIII": "thm1.6",
}


@dataclass(frozen=True)
class EstimateSpec:
    family: str
    n: int
    a: float = 1.0
    q: float = 2.0
    r: float = 2.0
    alpha: float = 0.0
    mu: float = 0.0
    b: float = None
    s: float = None
    T: float = None
    eps: float = 0.1
    delta: float = 0.1
    radial: bool = False

    def __post_init__(self):
        name = ROMAN_ALIASES.get(self.family, self.family)
        object.__setattr__(self, "family", name)
        if name not in FAMILIES and name != "classic":
            raise ConfigurationError(f"unknown estimate family {self.family!r}")
        if name in ("thm1.2", "thm1.2-endpoint", "thm1.2-power", "thm1.4",
                    "thm1.4-power", "thm1.4-log", "thm1.5", "thm1.8",
                    "classic") and self.a != 1.0:
            raise ConfigurationError(f"family {name} is a wave (a = 1) estimate")

    def localized(self):
        return self.family in ("thm1.2", "thm1.2-endpoint", "thm1.2-power",
                               "thm1.4-power", "thm1.4-log", "thm1.8", "kss")


@dataclass(frozen=True)
class Verdict:
    ok: bool
    violations: tuple

    def __bool__(self):
        return self.ok


def _fr(x):
    if x == INF:
        return INF
    return Fraction(x).limit_denominator(10 ** 12)


def _inv(x):
    return Fraction(0) if x == INF else 1 / _fr(x)


def admissible(spec):
    """Exact predicate evaluation; names every violated condition."""
    n = Fraction(spec.n)
    q, r = spec.q, spec.r
    iq, ir = _inv(q), _inv(r)
    half = Fraction(1, 2)
    knapp = (n - 1) * (half - ir)
    bad = []

    def need(cond, name):
        if not cond:
            bad.append(name)

    if spec.family != "thm1.8":
        need(q >= 2, "q >= 2")
        need(r >= 2, "r >= 2")

    f = spec.family
    if f == "thm1.1":
        need(r < INF, "r < inf")
        need(iq < knapp or (q, r) == (INF, 2.0),
             "1/q < (n-1)(1/2-1/r) or (q,r)=(inf,2)")
    elif f == "classic":
        need(iq <= min(half, knapp / 2), "1/q <= min(1/2, (n-1)/2 (1/2-1/r))")
        need((q, r) != (max(2.0, 4.0 / (spec.n - 1)), INF), "knapp endpoint excluded")
        need((q, r) != (INF, INF), "(inf,inf) excluded")
    elif f == "cor1.3":
        need(knapp / 2 < iq < knapp, "(n-1)/2 (1/2-1/r) < 1/q < (n-1)(1/2-1/r)")
        s_kn = 2 * iq - knapp
        if spec.b is not None:
            need(_fr(spec.b) > s_kn, "b > s_kn")
    elif f == "thm1.2":
        need(r < INF, "r < inf")
        need(iq == knapp, "1/q = (n-1)(1/2-1/r)")
        need(iq <= half, "1/q <= 1/2")
    elif f == "thm1.2-endpoint":
        need((q, r, spec.n) == (2.0, INF, 2), "(q,r,n) = (2,inf,2)")
        need(spec.eps > 0, "eps > 0")
    elif f == "thm1.2-power":
        need(knapp < iq <= half, "(n-1)(1/2-1/r) < 1/q <= 1/2")
    elif f == "thm1.4":
        need(iq < knapp or (q, r) == (INF, 2.0),
             "1/q < (n-1)(1/2-1/r) or (q,r)=(inf,2)")
        need((q, r) != (2.0, INF), "(2,inf) excluded")
        need((q, r) != (INF, INF), "(inf,inf) excluded")
    elif f == "thm1.4-power":
        need(iq > knapp, "1/q > (n-1)(1/2-1/r)")
    elif f == "thm1.4-log":
        need(iq == knapp, "1/q = (n-1)(1/2-1/r)")
        need(spec.delta > 0, "delta > 0")
    elif f == "thm1.5":
        al = _fr(spec.alpha)
        if q < INF and r < INF:
            need(iq - knapp < al < n * ir, "1/q-(n-1)(1/2-1/r) < alpha < n/r")
        elif q == INF and r < INF:
            need(-knapp <= al < n * ir, "-(n-1)(1/2-1/r) <= alpha < n/r")
        elif r == INF and q < INF:
            need(q > 2, "q > 2 when r = inf")
            need(iq - (n - 1) * half < al <= 0, "1/q-(n-1)/2 < alpha <= 0")
        else:
            need(False, "(q,r) = (inf,inf) not covered")
        need(spec.radial, "radial data")
    elif f == "thm1.6":
        al = _fr(spec.alpha)
        need(2 <= q <= r < INF, "2 <= q <= r < inf")
        need(iq - (n - 1) * half + (n - 1) * ir < al < n * ir,
             "1/q-(n-1)/2+(n-1)/r < alpha < n/r")
    elif f == "thm1.7":
        al = _fr(spec.alpha)
        need(2 <= r <= q, "2 <= r <= q <= inf")
        need(iq - (n - 1) * half + (n - 1) * ir < al < n * ir,
             "1/q-(n-1)/2+(n-1)/r < alpha < n/r")
        if spec.b is not None:
            bb = _fr(spec.b)
            if al < n * iq:
                need(bb >= -al + iq - knapp, "b >= -alpha+1/q-(n-1)(1/2-1/r)")
            else:
                need(bb > -(n - 1) * iq - knapp, "b > -(n-1)/q-(n-1)(1/2-1/r)")
    elif f == "thm1.8":
        need(q == r, "p = q = r")
        need(2 <= q < INF, "2 <= p < inf")
        al = _fr(spec.alpha)
        need((n - 1) * (iq - half) < al < n * iq - (n - 1) * half,
             "(n-1)(1/p-1/2) < alpha < n/p-(n-1)/2")
    elif f == "kss":
        need(spec.mu >= 0, "mu >= 0")
        need(spec.T is None or spec.T > 0, "T > 0")
    else:
        raise ConfigurationError(f"unknown family {f!r}")
    return Verdict(not bad, tuple(bad))


def scaling_exponent(spec):
    """The (s, b) closing the family's scaling identity."""
    n, a = spec.n, spec.a
    iq = 0.0 if spec.q == INF else 1.0 / spec.q
    ir = 0.0 if spec.r == INF else 1.0 / spec.r
    knapp = (n - 1) * (0.5 - ir)
    f = spec.family
    if f in ("thm1.1", "classic"):
        return n * (0.5 - ir) - a * iq, iq
    if f == "cor1.3":
        s_kn = 2 * iq - knapp
        return n * (0.5 - ir) - iq, (spec.b if spec.b is not None else s_kn + 0.05)
    if f in ("thm1.2", "thm1.4-log"):
        return 0.5 - ir, iq
    if f == "thm1.2-endpoint":
        return 0.5 + spec.eps, 0.5 + spec.eps
    if f in ("thm1.2-power", "thm1.4-power"):
        return 0.5 - ir, knapp
    if f == "thm1.4":
        return 0.5 * n - n * ir - iq, 0.0
    if f == "thm1.5":
        return spec.alpha + n * (0.5 - ir) - iq, 0.0
    if f in ("thm1.6", "thm1.7"):
        s = 0.5 * n - n * ir + spec.alpha - a * iq
        if f == "thm1.6":
            return s, iq - spec.alpha
        if spec.b is not None:
            return s, spec.b
        if spec.alpha < n * iq:
            return s, -spec.alpha + iq - knapp + 0.05
        return s, -(n - 1) * iq - knapp + 0.05
    if f == "thm1.8":
        return 0.5 - iq, 0.0
    if f == "kss":
        return 0.0, 0.0
    raise ConfigurationError(f)


def measurement_window(spec, field, t_ref=T_REF, n_times=N_TIMES,
                       unit_scale=False):
    """Scale-adapted (times, radial grid) for evaluating spec on field."""
    lam = 1.0 if unit_scale else field.freq_scale()
    lo = min(p.support[0] for p in field.blocks.values())
    hi = field.freq_scale()
    a = spec.a
    if spec.localized():
        t_max = spec.T if spec.T is not None else t_ref
        times = np.linspace(0.0, t_max, n_times)
    else:
        t_max = t_ref / lam ** a
        times = np.linspace(-t_max, t_max, n_times)
    speed = a * (hi ** (a - 1.0) if a >= 1 else lo ** (a - 1.0))
    r_max = speed * t_max + TAIL_WIDTH / (lo if not unit_scale else min(lo, 1.0))
    if unit_scale:
        r_max = speed * t_max + TAIL_WIDTH
    grid = pg.radial_grid(r_max, hi)
    est = times.size * grid.radii.size * sum(
        p.rho.size for p in field.blocks.values())
    if est > WORK_BUDGET:
        raise ResourceBudgetError(
            f"ratio evaluation would need ~{est:.1e} kernel entries")
    return times, grid


def _lhs_norm_spec(spec):
    f = spec.family
    if f in ("thm1.1", "classic", "cor1.3", "thm1.2", "thm1.2-endpoint",
             "thm1.2-power", "thm1.5", "thm1.6"):
        structure = "full"
        alpha = spec.alpha if f in ("thm1.5", "thm1.6") else 0.0
        return nm.NormSpec(alpha=alpha, q=spec.q, r=spec.r,
                           structure=structure, T=spec.T)
    if f in ("thm1.4", "thm1.4-power", "thm1.4-log"):
        return nm.NormSpec(q=spec.q, r=spec.r, T=spec.T)
    if f == "thm1.7":
        return nm.NormSpec(alpha=spec.alpha, q=spec.q, r=spec.r, T=spec.T)
    if f == "thm1.8":
        return nm.NormSpec(alpha=spec.alpha, q=spec.q, r=spec.q, T=spec.T)
    if f == "kss":
        return nm.NormSpec(alpha=spec.mu, bracket=True, q=2, r=2, T=spec.T)
    raise ConfigurationError(f)


def _t_factor(spec):
    """Localization factor folded into the rhs."""
    if spec.T is None:
        return 1.0
    iq = 0.0 if spec.q == INF else 1.0 / spec.q
    ir = 0.0 if spec.r == INF else 1.0 / spec.r
    knapp = (spec.n - 1) * (0.5 - ir)
    f = spec.family
    if f in ("thm1.2", "thm1.4-log"):
        return math.log(2.0 + spec.T) ** iq
    if f == "thm1.2-endpoint":
        return math.sqrt(math.log(2.0 + spec.T))
    if f in ("thm1.2-power", "thm1.4-power"):
        return spec.T ** (iq - knapp)
    if f == "thm1.8":
        return spec.T ** (-spec.alpha - 0.5 * (spec.n - 1) + spec.n * iq)
    if f == "kss":
        return nm.kss_budget(spec.mu, spec.T)
    return 1.0


def rhs_norm(spec, field):
    s, b = scaling_exponent(spec)
    if spec.s is not None:
        s = spec.s
    f = spec.family
    factor = _t_factor(spec)
    iq = 0.0 if spec.q == INF else 1.0 / spec.q
    if f in ("thm1.1", "classic", "cor1.3", "thm1.6", "thm1.7"):
        return factor * hsb_norm(field, s, b)
    if f == "thm1.2":
        return factor * hsb_norm(field, s, b, log_power=iq)
    if f == "thm1.2-endpoint":
        return factor * hsb_norm(field, s, b, inhomogeneous=True)
    if f == "thm1.2-power":
        return factor * hsb_norm(field, s, b)
    if f in ("thm1.4", "thm1.5", "thm1.8"):
        return factor * sobolev_norm(field, s)
    if f == "thm1.4-log":
        return factor * sobolev_norm(field, s + spec.delta, inhomogeneous=True)
    if f == "kss":
        return factor * sobolev_norm(field, 0.0)
    raise ConfigurationError(f)


@dataclass
class RatioResult:
    lhs: float
    rhs: float
    ratio: float
    tail_error: float
    meta: dict = dc_field(default_factory=dict)


def _angular_grid_for(spec, field):
    lhs_spec = _lhs_norm_spec(spec)
    if lhs_spec.structure == "factorized" and lhs_spec.angular == 2.0:
        return None
    channels = {(k, l) for (_, k, l) in field.blocks}
    if len(channels) == 1:
        return None  # single-harmonic norms factorize exactly
    kmax = field.kmax()
    rq = 4 if lhs_spec.r == INF else max(2, math.ceil(lhs_spec.r))
    return build_angular_grid(field.n, min(rq * max(kmax, 1) + 4, 520))


def ratio(spec, field, window=None, enforce_admissible=False):
    """Estimate ratio lhs/rhs for one field; 0/0 reports 0."""
    if enforce_admissible and not admissible(spec):
        raise DomainError(
            f"spec violates: {', '.join(admissible(spec).violations)}")
    rhs = rhs_norm(spec, field)
    if rhs == 0.0:
        return RatioResult(0.0, 0.0, 0.0, 0.0)
    if window is None:
        times, grid = measurement_window(spec, field)
    else:
        times, grid = window
    law = pg.DispersionLaw(spec.a)
    u = pg.evolve(field, times, grid, law)
    agrid = _angular_grid_for(spec, field)
    res = nm.mixed_norm(u, _lhs_norm_spec(spec), agrid)
    out = RatioResult(res.value, rhs, res.value / rhs, res.tail_error,
                      {"self_error": u.self_error, **res.meta})
    return out


@dataclass(frozen=True)
class SweepRow:
    family: str
    n: int
    a: float
    q: float
    r: float
    alpha: float
    b: float
    s: float
    lam: float
    k: int
    lhs: float
    rhs: float
    ratio: float
    tail_err: float
    error: str = ""


CSV_COLUMNS = ("family", "n", "a", "q", "r", "alpha", "b", "s",
               "lambda", "k", "lhs", "rhs", "ratio", "tail_err")


@dataclass
class SweepReport:
    rows: tuple

    def summary(self):
        ok = [r for r in self.rows if not r.error and np.isfinite(r.ratio)]
        if not ok:
            return {"sup_ratio": math.nan, "slope_lambda": math.nan,
                    "slope_k": math.nan, "n_rows": len(self.rows)}
        sup = max(r.ratio for r in ok)
        lam_ax = _axis_slope([(r.lam, r.ratio) for r in ok if r.ratio > 0])
        k_ax = _axis_slope([(1.0 + r.k, r.ratio) for r in ok if r.ratio > 0])
        return {"sup_ratio": sup, "slope_lambda": lam_ax, "slope_k": k_ax,
                "n_rows": len(self.rows)}

    def to_csv_lines(self):
        yield ",".join(CSV_COLUMNS)
        for r in sorted(self.rows, key=lambda x: (x.lam, x.k)):
            yield ",".join([
                r.family, str(r.n), _fmt(r.a), _fmt(r.q), _fmt(r.r),
                _fmt(r.alpha), _fmt(r.b), _fmt(r.s), _fmt(r.lam), str(r.k),
                _fmt(r.lhs), _fmt(r.rhs), _fmt(r.ratio), _fmt(r.tail_err)])


def _fmt(x):
    if x is None:
        return ""
    if x == INF:
        return "inf"
    return f"{x:.12g}"


def _axis_slope(pairs):
    """log-log least-squares slope along one axis, averaging over the other."""
    agg = {}
    for x, y in pairs:
        agg.setdefault(x, []).append(y)
    if len(agg) < 2:
        return 0.0
    xs = np.array(sorted(agg))
    ys = np.array([np.exp(np.mean(np.log(agg[x]))) for x in xs])
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def generate(family, seed=0):
    return fam.generate(family, seed)


def sweep(spec, family, lambdas, ks, seed=0):
    """Cross-product ratio sweep; per-row failures are recorded, not fatal.

    Empty axis lists yield an empty report; pass [1.0] / [family.k] to pin
    an axis."""
    rows = []
    s_val, b_val = scaling_exponent(spec)
    lam_list = list(lambdas)
    k_list = list(ks)
    for k in k_list:
        base = dataclasses.replace(family, k=k) if family.kind in (
            "single-harmonic",) else family
        f0 = fam.generate(base, seed)
        for lam in lam_list:
            try:
                fl = rescale(f0, lam) if lam != 1.0 else f0
                res = ratio(spec, fl)
                rows.append(SweepRow(
                    spec.family, spec.n, spec.a, spec.q, spec.r, spec.alpha,
                    b_val, s_val, lam, k, res.lhs, res.rhs, res.ratio,
                    res.tail_error))
            except Exception as exc:  # per-row failure policy
                rows.append(SweepRow(
                    spec.family, spec.n, spec.a, spec.q, spec.r, spec.alpha,
                    b_val, s_val, lam, k, math.nan, math.nan, math.nan,
                    math.nan, error=str(exc)))
    return SweepReport(tuple(rows))


def sharpness_probe(spec, family, axis, values=None, seed=0, t_ref=8.0,
                    n_times=129):
    """Ratio growth along a probe axis for a boundary-violating spec.

    The measurement window is frozen at unit scale, so concentration
    (axis 'h': data rescaled to frequency 1/h) exposes the violated
    weight/exponent condition as power growth.  Returns (growth_factor,
    per_decade, rows).
    """
    verdict = admissible(spec)
    if verdict.ok:
        raise DomainError("sharpness probe requires a violated spec")
    if axis == "h":
        hs = values if values is not None else [2.0 ** -i for i in range(6)]
        times = np.linspace(-t_ref, t_ref, n_times)
        rho_top = 1.0 / min(hs)
        grid = pg.radial_grid(spec.a * t_ref + TAIL_WIDTH, rho_top)
        rate = spec.a * t_ref * rho_top ** (spec.a - 1) + grid.radii.max()
        rows = []
        for h in hs:
            # concentrated data: unit bump rescaled to frequency 1/h, with
            # the node count keeping the fixed window Nyquist-resolved
            n_rho = max(257, math.ceil(0.5 / h * 4.0 * rate / math.pi) + 8)
            base = fam.generate(dataclasses.replace(
                family, kind="single-harmonic", k=0, l=1, n_rho=n_rho), seed)
            fh = rescale(base, 1.0 / h) if h != 1.0 else base
            res = ratio(spec, fh, window=(times, grid))
            rows.append((h, res.ratio))
        vals = [v for _, v in rows]
        decades = abs(math.log10(max(hs) / min(hs)))
    elif axis == "lambda":
        lams = values if values is not None else [2.0 ** i for i in range(6)]
        base = fam.generate(family, seed)
        times = np.linspace(-t_ref, t_ref, n_times)
        grid = pg.radial_grid(spec.a * t_ref * max(lams) ** (spec.a - 1)
                              + TAIL_WIDTH, max(lams))
        rows = []
        for lam in lams:
            fl = rescale(base, lam) if lam != 1.0 else base
            res = ratio(spec, fl, window=(times, grid))
            rows.append((lam, res.ratio))
        vals = [v for _, v in rows]
        decades = abs(math.log10(max(lams) / min(lams)))
    elif axis == "T":
        ts = values if values is not None else [4.0, 16.0, 64.0, 256.0]
        base = fam.generate(family, seed)
        rows = []
        for T in ts:
            sp = dataclasses.replace(spec, T=T)
            res = ratio(sp, base)
            rows.append((T, res.ratio))
        vals = [v for _, v in rows]
        decades = abs(math.log10(max(ts) / min(ts)))
    else:
        raise ConfigurationError(f"unknown probe axis {axis!r}")
    growth = max(vals) / min(vals) if min(vals) > 0 else INF
    per_decade = growth ** (1.0 / decades) if decades > 0 else growth
    return growth, per_decade, rows
