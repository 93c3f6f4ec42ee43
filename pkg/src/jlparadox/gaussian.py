"""Normal-theory Bayes factors.

Point-null K for a normal mean with a uniform alternative, the generic
sqrt(A n) form, Jeffreys's least-squares critical ratios and uniformity
test, the peri-null Bayes factor with its Bartlett-scaled variant, and
Lindley's construction of a significant result with high posterior
probability for the null.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .numcore import (
    DomainError,
    EvidenceRatio,
    SearchBudgetError,
    eval_budget,
    find_root,
    normal_quantile,
)

LOG_2PI = math.log(2.0 * math.pi)

# c = K / sqrt(n / 2 pi), geometric mean over the a0 = 0 columns of the
# historical uniformity table; close to 2/sqrt(3) and sqrt(3)
UNIFORMITY_C_FIRST = 1.1555
UNIFORMITY_C_SECOND = 1.7339

TABLE2_SIZES = (5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10_000, 20_000, 50_000, 100_000)
TABLE4_SIZES = (5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10_000)


@dataclass(frozen=True)
class GaussianTestSpec:
    """Estimate ``a`` with standard error ``s`` from ``n`` observations; H1 range ``m``."""

    a: float
    s: float
    n: int
    m: float

    def __post_init__(self):
        if not self.s > 0:
            raise DomainError(f"s must be > 0, got {self.s}")
        if self.n < 1:
            raise DomainError(f"n must be >= 1, got {self.n}")
        if not self.m > 0:
            raise DomainError(f"m must be > 0, got {self.m}")


@dataclass(frozen=True)
class PeriNullSpec:
    z: float
    n: int
    g0: float
    g1: float

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"n must be >= 1, got {self.n}")
        if self.g0 < 0 or not self.g1 > 0:
            raise DomainError(f"need g0 >= 0 and g1 > 0, got g0={self.g0}, g1={self.g1}")


@dataclass(frozen=True)
class UniformitySpec:
    n: int
    a0: float
    c: float = UNIFORMITY_C_FIRST

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"n must be >= 1, got {self.n}")
        if not self.c > 0:
            raise DomainError(f"c must be > 0, got {self.c}")


def point_null_gaussian_bf(spec: GaussianTestSpec) -> EvidenceRatio:
    """K = m / (sqrt(2 pi) s) * exp(-a^2 / 2 s^2).

    The form assumes the prior range is wide compared with the standard
    error; a warning is attached when s > m/10.
    """
    log_k = math.log(spec.m) - 0.5 * LOG_2PI - math.log(spec.s) - spec.a ** 2 / (2 * spec.s ** 2)
    notes: tuple[str, ...] = ()
    if spec.s > spec.m / 10:
        notes = (f"s={spec.s} is not small against m={spec.m}; approximation is rough",)
    return EvidenceRatio(log_k, "01", notes)


def generic_sqrt_n_bf(a: float, s_a: float, n: int, A: float = 1.0) -> EvidenceRatio:
    """K = sqrt(A n) exp(-a^2 / 2 s_a^2)."""
    if not (A > 0 and s_a > 0 and n >= 1):
        raise DomainError("need A > 0, s_a > 0 and n >= 1")
    return EvidenceRatio(0.5 * math.log(A * n) - a * a / (2 * s_a * s_a), "01")


def generic_critical_ratio(n: int, A: float = 1.0) -> float:
    """a/s_a at which the generic form gives K = 1."""
    if A * n <= 1:
        raise DomainError(f"A*n must exceed 1, got {A * n}")
    return math.sqrt(math.log(A * n))


def least_squares_critical_ratio(n: int) -> float:
    """b/sigma_b making the least-squares K equal 1: sqrt(ln(2n/pi))."""
    if n < 2 or 2 * n / math.pi <= 1:
        raise DomainError(f"n must be >= 2, got {n}")
    return math.sqrt(math.log(2 * n / math.pi))


def jeffreys1936_table(sizes: Iterable[int] = TABLE2_SIZES) -> list[tuple[int, float]]:
    return [(n, least_squares_critical_ratio(n)) for n in sizes]


# ---------------------------------------------------------------------------
# Uniformity test
# ---------------------------------------------------------------------------


def uniformity_bf(spec: UniformitySpec) -> EvidenceRatio:
    """K = sqrt(n / 2 pi) c exp(-chi^2 / 2) with chi^2 = n a0^2."""
    chi2 = spec.n * spec.a0 ** 2
    return EvidenceRatio(0.5 * (math.log(spec.n) - LOG_2PI) + math.log(spec.c) - 0.5 * chi2, "01")


def uniformity_chi2(spec: UniformitySpec) -> float:
    return spec.n * spec.a0 ** 2


def uniformity_critical(n: int, c: float = UNIFORMITY_C_FIRST) -> tuple[float, float]:
    """(a0 sqrt(n), chi^2) at which the uniformity K equals 1.

    Solved with find_root on a0 sqrt(n); returns zeros when K < 1 already
    at a0 = 0.
    """
    log_k0 = uniformity_bf(UniformitySpec(n, 0.0, c)).log_value
    if log_k0 <= 0:
        return 0.0, 0.0
    g = lambda r: uniformity_bf(UniformitySpec(n, r / math.sqrt(n), c)).log_value
    r = find_root(g, 0.0, math.sqrt(2 * log_k0) + 1.0, x_tol=1e-12)
    return r, r * r


def infer_uniformity_c(sizes: Sequence[int], k_at_zero: Sequence[float]) -> float:
    """Geometric-mean fit of c from tabled K values at a0 = 0."""
    if len(sizes) != len(k_at_zero) or not sizes:
        raise DomainError("need matching, nonempty sizes and K values")
    logs = [math.log(k) - 0.5 * (math.log(n) - LOG_2PI) for n, k in zip(sizes, k_at_zero)]
    return math.exp(sum(logs) / len(logs))


@dataclass(frozen=True)
class Table4Row:
    n: int
    k: tuple[float, float]
    a0_root_n: tuple[float, float]
    chi2: tuple[float, float]


def jeffreys1938chi2_table(
    sizes: Iterable[int] = TABLE4_SIZES,
    c_values: tuple[float, float] = (UNIFORMITY_C_FIRST, UNIFORMITY_C_SECOND),
) -> list[Table4Row]:
    rows = []
    for n in sizes:
        ks, roots, chis = [], [], []
        for c in c_values:
            ks.append(uniformity_bf(UniformitySpec(n, 0.0, c)).value)
            r, chi2 = uniformity_critical(n, c)
            roots.append(r)
            chis.append(chi2)
        rows.append(Table4Row(n, tuple(ks), tuple(roots), tuple(chis)))
    return rows


# ---------------------------------------------------------------------------
# Peri-null and point-null z tests
# ---------------------------------------------------------------------------


def perinull_bf(spec: PeriNullSpec) -> EvidenceRatio:
    """BF of delta ~ N(0, g0) against delta ~ N(0, g1) given z from n observations.

    g0 = 0 gives the point null.  g0 >= g1 is accepted (the identity
    BF(g0, g1) = 1 / BF(g1, g0) relies on it) but no longer describes a
    peri-null comparison.
    """
    n, g0, g1, z = spec.n, spec.g0, spec.g1, spec.z
    a0, a1 = 1 + n * g0, 1 + n * g1
    log_bf = 0.5 * (math.log(a1) - math.log(a0)) + (g0 - g1) * n * z * z / (2 * a0 * a1)
    return EvidenceRatio(log_bf, "01")


def perinull_bound(g0: float, g1: float) -> float:
    """Limit of the peri-null BF as n grows with z fixed: sqrt(g1/g0)."""
    if not 0 < g0 < g1:
        raise DomainError(f"need 0 < g0 < g1, got g0={g0}, g1={g1}")
    return math.sqrt(g1 / g0)


def z_for_alpha(alpha: float, sidedness: str = "one") -> float:
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if sidedness == "one":
        return normal_quantile(1 - alpha)
    if sidedness == "two":
        return normal_quantile(1 - alpha / 2)
    raise DomainError(f"sidedness must be 'one' or 'two', got {sidedness!r}")


def perinull_curve(
    g0: float,
    g1: float,
    alpha: float,
    n_grid: Iterable[int],
    sidedness: str = "one",
) -> list[tuple[int, float]]:
    """(n, BF01) with z held at the alpha point.

    The default z = Phi^{-1}(1 - alpha) follows the printed convention for
    the peri-null figure; ``sidedness="two"`` uses Phi^{-1}(1 - alpha/2).
    """
    if not 0 < g0 < g1:
        raise DomainError(f"need 0 < g0 < g1, got g0={g0}, g1={g1}")
    z = z_for_alpha(alpha, sidedness)
    return [(n, perinull_bf(PeriNullSpec(z, n, g0, g1)).value) for n in n_grid]


def point_null_z_bf(z: float, n: int, g: float = 1.0) -> EvidenceRatio:
    """Point null against delta ~ N(0, g): sqrt(1+ng) exp(-n g z^2 / 2(1+ng))."""
    return perinull_bf(PeriNullSpec(z, n, 0.0, g))


def critical_z_for_unit_bf(n: int, g: float = 1.0) -> float:
    """|z| at which :func:`point_null_z_bf` equals 1, in closed form."""
    if n < 1 or not g > 0:
        raise DomainError("need n >= 1 and g > 0")
    ng = n * g
    return math.sqrt((1 + ng) / ng * math.log1p(ng))


def bartlett_scaled_bf(z: float, n: int, g0: float, c_over_n: float) -> EvidenceRatio:
    """Peri-null BF with the alternative's variance shrinking as c/n.

    With g0 = 0 the result tends to a constant in n, so evidence for the
    null stays bounded.
    """
    if not c_over_n > 0 or g0 < 0:
        raise DomainError("need c_over_n > 0 and g0 >= 0")
    g1 = c_over_n / n
    if g1 < g0:
        raise DomainError(f"g1 = c/n = {g1} fell below g0 = {g0} at n = {n}")
    if g1 == g0:
        return EvidenceRatio(0.0, "01")
    return perinull_bf(PeriNullSpec(z, n, g0, g1))


# ---------------------------------------------------------------------------
# Lindley's construction
# ---------------------------------------------------------------------------


def lindley_bf(n: int, z: float, I: float, sigma: float) -> EvidenceRatio:
    """K = I sqrt(n) / (sigma sqrt(2 pi)) exp(-z^2/2), prior uniform over width I."""
    return EvidenceRatio(math.log(I) + 0.5 * math.log(n) - math.log(sigma) - 0.5 * LOG_2PI - 0.5 * z * z, "01")


def lindley_posterior_h0(n: int, z: float, I: float, sigma: float, prior_mass_h0: float) -> float:
    rho = prior_mass_h0 / (1 - prior_mass_h0)
    log_odds = lindley_bf(n, z, I, sigma).log_value + math.log(rho)
    return 1.0 / (1.0 + math.exp(-log_odds))


def lindley_construct(
    alpha: float,
    target_posterior_h0: float,
    I: float = 1.0,
    sigma: float = 1.0,
    prior_mass_h0: float = 0.5,
    *,
    max_n: int | None = None,
) -> int:
    """Smallest n at which a result exactly at the two-sided alpha boundary
    leaves the null with posterior probability >= target."""
    for name, v in (("alpha", alpha), ("target_posterior_h0", target_posterior_h0),
                    ("prior_mass_h0", prior_mass_h0)):
        if not 0 < v < 1:
            raise DomainError(f"{name} must lie in (0, 1), got {v}")
    if not (I > 0 and sigma > 0):
        raise DomainError("I and sigma must be > 0")
    limit = max_n if max_n is not None else eval_budget(10 ** 15)
    z = normal_quantile(1 - alpha / 2)
    ok = lambda n: lindley_posterior_h0(n, z, I, sigma, prior_mass_h0) >= target_posterior_h0
    if ok(1):
        return 1
    hi = 2
    while not ok(hi):
        if hi >= limit:
            raise SearchBudgetError(f"target not reached for n <= {limit}")
        hi = min(hi * 2, limit)
    lo = hi // 2  # ok(lo) is False
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi

