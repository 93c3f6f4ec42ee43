"""One-sample t-test Bayes factors.

Jeffreys's 1938 approximate K and its table, the default Cauchy-prior
Bayes factor computed two independent ways (marginal likelihood over delta
and the Savage-Dickey ordinate ratio through the normal/inverse-gamma
mixture), posterior direction masses, and the construction of (t, n)
pairs with a fixed posterior direction mass but a prescribed BF10.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .numcore import (
    DomainError,
    EvidenceRatio,
    SearchBudgetError,
    eval_budget,
    find_root,
    integrate,
    log_gamma,
    student_t_logpdf,
    student_t_quantile,
    student_t_sf,
)

TABLE3_SIZES = (5, 6, 7, 8, 9, 10, 20, 30)

# the likelihood in delta is dropped beyond this many of its scale units
_LIK_SPAN = 30.0
_INNER_PANELS_MAX = 80


@dataclass(frozen=True)
class TTestSpec:
    t: float
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise DomainError(f"n must be >= 2, got {self.n}")
        if not math.isfinite(self.t):
            raise DomainError("t must be finite")

    @property
    def df(self) -> int:
        return self.n - 1


@dataclass(frozen=True)
class CauchyPrior:
    scale: float = 1.0 / math.sqrt(2.0)
    location: float = field(default=0.0)

    def __post_init__(self):
        if not self.scale > 0:
            raise DomainError(f"scale must be > 0, got {self.scale}")
        if self.location != 0.0:
            raise DomainError("only the zero-centred Cauchy prior is supported")

    def density(self, delta):
        r = self.scale
        return 1.0 / (math.pi * r * (1.0 + np.square(np.asarray(delta, float) / r)))

    @property
    def ordinate_at_zero(self) -> float:
        return 1.0 / (math.pi * self.scale)


@dataclass(frozen=True)
class DirectionalEvidence:
    mass_negative: float
    bf_plus_minus: float

    def __post_init__(self):
        m = self.mass_negative
        if not 0 < m < 1:
            raise DomainError(f"mass_negative must lie in (0, 1), got {m}")
        expected = (1 - m) / m
        if abs(self.bf_plus_minus - expected) > 1e-9 * expected:
            raise DomainError("bf_plus_minus disagrees with (1 - m)/m")

    @classmethod
    def from_mass(cls, mass_negative: float) -> "DirectionalEvidence":
        return cls(mass_negative, (1 - mass_negative) / mass_negative)


# ---------------------------------------------------------------------------
# Jeffreys's approximate K
# ---------------------------------------------------------------------------


def jeffreys1938_t_bf(spec: TTestSpec) -> EvidenceRatio:
    """K = sqrt(2n/pi) (1 + t^2/(n-1))^{-(n-3)/2}."""
    n, t = spec.n, spec.t
    log_k = 0.5 * math.log(2 * n / math.pi) - 0.5 * (n - 3) * math.log1p(t * t / (n - 1))
    notes: tuple[str, ...] = ()
    if n < 4:
        notes = (f"n={n} < 4: the exponent no longer penalises large t",)
    return EvidenceRatio(log_k, "01", notes)


def fisher_t_5pct(n: int) -> float:
    """Two-sided 5% point of t with n-1 degrees of freedom."""
    return student_t_quantile(0.975, n - 1)


def jeffreys1938t_table(sizes: Iterable[int] = TABLE3_SIZES) -> list[tuple[int, float, float]]:
    """(n, t at Fisher's 5% point, K) rows."""
    rows = []
    for n in sizes:
        t = fisher_t_5pct(n)
        rows.append((n, t, jeffreys1938_t_bf(TTestSpec(t, n)).value))
    return rows


def critical_t_for_unit_bf(n: int) -> tuple[float, float]:
    """(exact root of K(t) = 1, asymptote sqrt(ln(2n/pi)))."""
    if n < 4:
        raise DomainError(f"n must be >= 4 for K(t) to cross 1, got {n}")
    g = lambda t: jeffreys1938_t_bf(TTestSpec(t, n)).log_value
    if g(0.0) <= 0:
        raise DomainError(f"K < 1 already at t = 0 for n = {n}")
    hi = 1.0
    while g(hi) > 0:
        hi *= 2.0
    return find_root(g, 0.0, hi, x_tol=1e-12), math.sqrt(math.log(2 * n / math.pi))


# ---------------------------------------------------------------------------
# Noncentral t through its scale-mixture representation
# ---------------------------------------------------------------------------


def _log_chi_scale_pdf(s, df):
    """Density of S = sqrt(chi^2_df / df) on s > 0."""
    h = 0.5 * df
    with np.errstate(divide="ignore"):
        return (math.log(2.0) + h * math.log(h) - log_gamma(h)
                + (df - 1) * np.log(s) - h * np.square(s))


def nct_pdf(t: float, df: float, ncp) -> np.ndarray:
    """Noncentral t density at ``t`` for an array of noncentralities.

    Uses f(t; df, mu) = int_0^inf s phi(t s - mu) f_S(s) ds with
    S = sqrt(chi^2_df / df), integrated by :func:`numcore.integrate` with
    all ``ncp`` values as components of one vector-valued integral.
    """
    if not df > 0:
        raise DomainError(f"df must be > 0, got {df}")
    mu = np.atleast_1d(np.asarray(ncp, float))
    out_shape = np.shape(ncp)
    # Gaussian sketch of the integrand in s: S ~ N(1, 1/2df) and t S - mu ~ N(0, 1)
    prec = 2.0 * df + t * t
    centres = (2.0 * df + t * mu) / prec
    width = 1.0 / math.sqrt(prec)
    lo = max(float(centres.min()) - 8.0 * width, 0.0)
    hi = max(float(centres.max()) + 8.0 * width, lo + width)
    k = int(min(_INNER_PANELS_MAX, max(4, math.ceil((hi - lo) / width))))
    points = np.linspace(lo, hi, k + 1)
    log_c = -0.5 * math.log(2 * math.pi)

    def f(s):
        s = np.maximum(s, 0.0)
        with np.errstate(divide="ignore"):
            log_s = np.log(s)
        log_base = _log_chi_scale_pdf(s, df) + log_s + log_c
        z = t * s[None, :] - mu[:, None]
        val = np.exp(log_base[None, :] - 0.5 * z * z)
        return np.where(s[None, :] > 0, val, 0.0)

    res = integrate(f, 0.0, math.inf, abs_tol=1e-15, rel_tol=1e-11, points=points[points > 0])
    return np.asarray(res.value).reshape(out_shape)


# ---------------------------------------------------------------------------
# Cauchy-prior Bayes factor: marginal likelihood route
# ---------------------------------------------------------------------------


def _delta_window(spec: TTestSpec) -> tuple[float, float, float]:
    """(delta_hat, likelihood scale in delta, half-width of the integration window)."""
    n, df, t = spec.n, spec.df, spec.t
    # the log likelihood in mu = delta sqrt(n) falls off at least as fast as
    # -mu^2 df / 2(t^2 + df) in the tails
    scale = math.sqrt((t * t + df) / df) / math.sqrt(n)
    return t / math.sqrt(n), scale, _LIK_SPAN * scale


@dataclass(frozen=True)
class _SplitMarginal:
    negative: float
    positive: float

    @property
    def total(self) -> float:
        return self.negative + self.positive


def _split_marginal(spec: TTestSpec, prior: CauchyPrior) -> _SplitMarginal:
    """int f_nct(t; df, delta sqrt(n)) cauchy(delta) d delta over delta < 0 and delta > 0.

    The delta axis is split at 0, at delta_hat = t/sqrt(n) and at
    delta_hat +- k * scale for k in (1, 2, 4, 8).
    """
    root_n = math.sqrt(spec.n)
    d_hat, scale, half = _delta_window(spec)
    lo, hi = d_hat - half, d_hat + half
    marks = [d_hat + k * scale for k in (-8, -4, -2, -1, 0, 1, 2, 4, 8)]

    def f(delta):
        return nct_pdf(spec.t, spec.df, delta * root_n) * prior.density(delta)

    def piece(a, b):
        if b <= a:
            return 0.0
        pts = [p for p in marks if a < p < b]
        return float(integrate(f, a, b, abs_tol=1e-300, rel_tol=1e-10, points=pts).value)

    return _SplitMarginal(piece(lo, min(hi, 0.0)), piece(max(lo, 0.0), hi))


def cauchy_t_bf10(spec: TTestSpec, prior: CauchyPrior = CauchyPrior()) -> EvidenceRatio:
    """BF10 = [int f_nct(t; n-1, delta sqrt(n)) cauchy(delta; 0, r) d delta] / f_t(t; n-1)."""
    z = _split_marginal(spec, prior).total
    return EvidenceRatio(math.log(z) - float(student_t_logpdf(spec.t, spec.df)), "10")


def posterior_direction_masses(spec: TTestSpec, prior: CauchyPrior = CauchyPrior()) -> DirectionalEvidence:
    """Posterior P(delta < 0 | t, H1) and the implied BF+- = (1-m)/m."""
    if spec.t == 0:
        return DirectionalEvidence.from_mass(0.5)
    split = _split_marginal(spec, prior)
    return DirectionalEvidence.from_mass(split.negative / split.total)


# ---------------------------------------------------------------------------
# Savage-Dickey route through the g-mixture
# ---------------------------------------------------------------------------


def _mixture_marginal(spec: TTestSpec, prior: CauchyPrior) -> float:
    """Marginal density of t under H1 using delta | g ~ N(0, r^2 g), g ~ IG(1/2, 1/2).

    Given g, t is a scaled central t: f(t | g) = f_t(t / v; df) / v with
    v = sqrt(1 + n r^2 g).  The g integral runs over w = ln g.
    """
    nr2 = spec.n * prior.scale ** 2
    df, t = spec.df, spec.t

    def f(w):
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            g = np.exp(w)
            v = np.sqrt(1.0 + nr2 * g)
            log_ig = -0.5 * math.log(2 * math.pi) - 0.5 * w - 0.5 / g
            out = np.exp(student_t_logpdf(t / v, df) - np.log(v) + log_ig)
        return np.where(np.isfinite(w), out, 0.0)

    w_peak = math.log(max(t * t - 1.0, 1.0) / nr2)
    pts = sorted({-1.0, 0.0, w_peak - 4, w_peak - 2, w_peak, w_peak + 2, w_peak + 4})
    return float(integrate(f, -math.inf, math.inf, abs_tol=1e-300, rel_tol=1e-11, points=pts).value)


def savage_dickey_ordinates(spec: TTestSpec, prior: CauchyPrior = CauchyPrior()) -> tuple[float, float]:
    """(prior density of delta at 0, posterior density of delta at 0 under H1).

    The posterior ordinate is f_nct(t; df, 0) p(0) / m(t), with the
    noncentral density from its integral form and m(t) from the g-mixture.
    """
    likelihood_at_zero = float(nct_pdf(spec.t, spec.df, 0.0))
    return prior.ordinate_at_zero, likelihood_at_zero * prior.ordinate_at_zero / _mixture_marginal(spec, prior)


def savage_dickey_bf10(spec: TTestSpec, prior: CauchyPrior = CauchyPrior()) -> EvidenceRatio:
    prior_ord, post_ord = savage_dickey_ordinates(spec, prior)
    return EvidenceRatio(math.log(prior_ord) - math.log(post_ord), "10")


# ---------------------------------------------------------------------------
# One-sided p and the paradox triples
# ---------------------------------------------------------------------------


def one_sided_p(spec: TTestSpec) -> float:
    """Upper-tail p of t with n-1 degrees of freedom."""
    return float(student_t_sf(spec.t, spec.df))


def one_sided_p_odds(p: float) -> float:
    if not 0 < p < 1:
        raise DomainError(f"p must lie in (0, 1), got {p}")
    return (1 - p) / p


def t_for_direction_mass(n: int, target_mass_negative: float, prior: CauchyPrior = CauchyPrior()) -> float:
    """t > 0 giving posterior P(delta < 0) equal to the target; mass falls as t grows."""
    if not 0 < target_mass_negative < 0.5:
        raise DomainError(f"target mass must lie in (0, 0.5), got {target_mass_negative}")
    g = lambda t: posterior_direction_masses(TTestSpec(t, n), prior).mass_negative - target_mass_negative
    # the one-sided p of t is close to the mass, so start from its t
    guess = student_t_quantile(1.0 - target_mass_negative, n - 1)
    lo, hi = 0.9 * guess, 1.1 * guess
    while g(lo) < 0:
        lo, hi = 0.5 * lo, lo
    while g(hi) > 0:
        lo, hi = hi, hi * 2.0
    return find_root(g, lo, hi, x_tol=1e-9)


@dataclass(frozen=True)
class ParadoxTriple:
    t: float
    n: int
    bf10: float
    mass_negative: float
    log_bf10_gap: float  # ln(achieved BF10 / target)


def paradox_triple_construct(
    target_mass_negative: float,
    target_bf10: float,
    prior: CauchyPrior = CauchyPrior(),
    *,
    n_max: int | None = None,
    tolerance: float = 0.05,
) -> ParadoxTriple:
    """Find n (and its t) whose BF10 is closest to the target at fixed direction mass.

    BF10 along the fixed-mass curve falls as n grows, so the crossing is
    located by doubling n from 4 (n = 2 is tried only when the target lies
    above BF10 at 4), then integer bisection, and the closer neighbour in
    log BF10 is returned.  Raises :class:`SearchBudgetError` when the
    best candidate misses the target by more than ``tolerance`` (relative).
    """
    if not target_bf10 > 0:
        raise DomainError(f"target_bf10 must be > 0, got {target_bf10}")
    limit = n_max if n_max is not None else eval_budget(100_000)
    cache: dict[int, tuple[float, float]] = {}

    def at(n):
        if n not in cache:
            t = t_for_direction_mass(n, target_mass_negative, prior)
            cache[n] = (t, cauchy_t_bf10(TTestSpec(t, n), prior).log_value)
        return cache[n]

    log_target = math.log(target_bf10)
    gap = lambda n: at(n)[1] - log_target
    # n = 2 is costly (t runs into the thousands), so it is only visited
    # when the crossing lies below n = 4
    lo, hi = 2, min(4, limit)
    while gap(hi) > 0 and hi < limit:
        lo, hi = hi, min(2 * hi, limit)
    if gap(hi) > 0:
        raise SearchBudgetError(f"BF10 stays above {target_bf10} for n <= {limit}")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if gap(mid) > 0:
            lo = mid
        else:
            hi = mid
    best = lo if gap(lo) <= 0 or abs(gap(lo)) <= abs(gap(hi)) else hi
    t, log_bf = at(best)
    if abs(math.expm1(log_bf - log_target)) > tolerance:
        raise SearchBudgetError(
            f"closest n = {best} gives BF10 = {math.exp(log_bf):.6g}, target {target_bf10}"
        )
    mass = posterior_direction_masses(TTestSpec(t, best), prior).mass_negative
    return ParadoxTriple(t, best, math.exp(log_bf), mass, log_bf - log_target)
