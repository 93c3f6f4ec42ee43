"""Binomial and two-proportion tests.

Covers Jeffreys's 1935 comparison of two sampling ratios (exact posterior
odds and the large-sample form), the regeneration of his table of
critical differences, and Good's coin and bag constructions, which hinge
on two-sided binomial tail areas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .numcore import (
    DomainError,
    EvidenceRatio,
    SearchBudgetError,
    eval_budget,
    find_root,
    log_gamma,
    regularized_incomplete_beta,
)

# below this many trials per sample the large-sample form is not trusted
APPROX_MIN_SAMPLE = 20


@dataclass(frozen=True)
class TwoProportionCounts:
    """Counts with (x) and without (y) the property in two samples."""

    x: int
    y: int
    x2: int
    y2: int

    def __post_init__(self):
        for name in ("x", "y", "x2", "y2"):
            v = getattr(self, name)
            if v < 0:
                raise DomainError(f"{name} must be >= 0, got {v}")
        if self.x + self.y < 1 or self.x2 + self.y2 < 1:
            raise DomainError("each sample needs at least one specimen")


@dataclass(frozen=True)
class BinomialOutcome:
    n: int
    s: int
    theta0: float = 0.5

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"n must be >= 1, got {self.n}")
        if not 0 <= self.s <= self.n:
            raise DomainError(f"s must lie in [0, n], got {self.s}")
        if not 0 < self.theta0 < 1:
            raise DomainError(f"theta0 must lie in (0, 1), got {self.theta0}")


def _log_factorial(k: float) -> float:
    return log_gamma(k + 1.0)


def exact_two_proportion_odds(counts: TwoProportionCounts) -> EvidenceRatio:
    """Posterior odds of equal population ratios, Jeffreys's exact form.

    (x+x')! (y+y')! (x+y+1)! (x'+y'+1)! / [x! y! x'! y'! (x+x'+y+y'+1)!],
    evaluated with log-gamma so counts in the millions do not overflow.
    Non-integer counts are accepted (continuous relaxation).
    """
    x, y, x2, y2 = counts.x, counts.y, counts.x2, counts.y2
    lf = _log_factorial
    log_k = (
        lf(x + x2) + lf(y + y2) + lf(x + y + 1) + lf(x2 + y2 + 1)
        - lf(x) - lf(y) - lf(x2) - lf(y2) - lf(x + x2 + y + y2 + 1)
    )
    return EvidenceRatio(log_k, "01")


def approx_two_proportion_odds(
    counts: TwoProportionCounts, *, min_sample: int = APPROX_MIN_SAMPLE
) -> EvidenceRatio:
    """Large-sample approximation to :func:`exact_two_proportion_odds`.

    Samples smaller than ``min_sample`` still get a value, tagged with a
    warning.
    """
    x, y, x2, y2 = (float(v) for v in (counts.x, counts.y, counts.x2, counts.y2))
    total = x + x2 + y + y2
    with_prop, without_prop = x + x2, y + y2
    n1, n2 = x + y, x2 + y2
    if with_prop == 0 or without_prop == 0:
        raise DomainError("the approximation needs both outcomes present in the pooled sample")
    log_outside = 0.5 * (math.log(total) + math.log(n1) + math.log(n2)
                         - math.log(2 * math.pi) - math.log(with_prop) - math.log(without_prop))
    exponent = -0.5 * total * (x * y2 - x2 * y) ** 2 / (with_prop * without_prop * n1 * n2)
    warnings: tuple[str, ...] = ()
    if n1 < min_sample or n2 < min_sample:
        warnings = (f"sample sizes below {min_sample}: large-sample approximation unreliable",)
    return EvidenceRatio(log_outside + exponent, "01", warnings)


@dataclass(frozen=True)
class Table1Row:
    size: int
    max_odds: float
    critical_difference: float
    ratio: float
    exact_max_odds: float


def _balanced_log_odds(size: float, diff: float, method: str) -> float:
    half = size / 2.0
    x2, y2 = (size + diff) / 2.0, (size - diff) / 2.0
    if method == "exact":
        return exact_two_proportion_odds(TwoProportionCounts(half, half, x2, y2)).log_value
    if method == "full":
        return approx_two_proportion_odds(TwoProportionCounts(half, half, x2, y2)).log_value
    # leading order: outside factor and exponent denominators held at x'=y'
    return 0.5 * math.log(size / math.pi) - diff * diff / (4.0 * size)


TABLE1_METHODS = ("leading", "full", "exact")


def critical_difference(size: int, method: str = "leading") -> float:
    """x'-y' at which the odds for equal ratios fall to 1 (x=y, x'+y'=x+y).

    ``method`` picks the odds used: ``"leading"`` is the large-sample form
    with its slowly varying factors frozen at the balanced design, the way
    the historical table was computed; ``"full"`` uses the large-sample
    expression as written; ``"exact"`` the factorial form.  Counts are
    relaxed to real numbers.
    """
    if method not in TABLE1_METHODS:
        raise DomainError(f"unknown method {method!r}")
    g = lambda d: _balanced_log_odds(size, d, method)
    return find_root(g, 0.0, size * (1 - 1e-9), x_tol=1e-10)


def jeffreys1935_table(
    sizes: Iterable[int] = (40, 100, 200, 400, 1000, 10_000, 100_000),
    method: str = "leading",
) -> list[Table1Row]:
    """Regenerate the table of maximum odds and critical x'-y'.

    Each row has x = y = size/2 and x' + y' = size.  The maximum odds use
    the large-sample form at x' = y'; the exact value is reported alongside.
    """
    rows = []
    for size in sizes:
        if size < 2 or size % 2:
            raise DomainError(f"table sizes must be even and >= 2, got {size}")
        half = size // 2
        balanced = TwoProportionCounts(half, half, half, half)
        max_odds = approx_two_proportion_odds(balanced).value
        exact = exact_two_proportion_odds(balanced).value
        d = critical_difference(size, method)
        rows.append(Table1Row(size, max_odds, d, d / math.sqrt(size), exact))
    return rows


# ---------------------------------------------------------------------------
# Binomial tails and Good's examples
# ---------------------------------------------------------------------------


def _binomial_tails(n, s, theta0):
    n = np.asarray(n, float)
    s = np.asarray(s, float)
    # P(X >= s) = I_theta(s, n-s+1); P(X <= s) = I_{1-theta}(n-s, s+1)
    upper = np.where(s <= 0, 1.0, regularized_incomplete_beta(theta0, np.maximum(s, 1e-300), n - s + 1))
    lower = np.where(s >= n, 1.0,
                     regularized_incomplete_beta(1 - theta0, np.maximum(n - s, 1e-300), s + 1))
    return lower, upper


def binomial_two_sided_p(outcome: BinomialOutcome) -> float:
    """Two-sided binomial p-value, doubling the smaller tail (capped at 1)."""
    lower, upper = _binomial_tails(outcome.n, outcome.s, outcome.theta0)
    return float(min(1.0, 2.0 * min(float(lower), float(upper))))


def binomial_log_likelihood(outcome: BinomialOutcome, theta: float) -> float:
    """Kernel s ln(theta) + (n-s) ln(1-theta); the binomial coefficient is dropped."""
    if not 0 < theta < 1:
        raise DomainError(f"theta must lie in (0, 1), got {theta}")
    return outcome.s * math.log(theta) + (outcome.n - outcome.s) * math.log1p(-theta)


def bag_likelihood_comparison(outcome: BinomialOutcome, candidate_thetas: Sequence[float]) -> list[float]:
    """log L(theta0) - log L(theta_c) per candidate; positive favours theta0."""
    base = binomial_log_likelihood(outcome, outcome.theta0)
    out = []
    for theta in candidate_thetas:
        out.append(0.0 if theta == outcome.theta0 else base - binomial_log_likelihood(outcome, theta))
    return out


@dataclass(frozen=True)
class SimplissimusResult:
    n: int
    s: int
    p_value: float
    proportion: float
    log_likelihood_ratio: float  # log L(0.5) - log L(0.5 + epsilon)


def simplissimus_construct(epsilon: float, target_p: float, *, max_n: int | None = None) -> SimplissimusResult:
    """Smallest n whose near-null outcome is already 'significant'.

    For each n the number of heads is s = round(n (0.5 + epsilon/7)); the
    scan returns the first n whose two-sided p-value is at most
    ``target_p``, together with the likelihood ratio of p = 0.5 against
    Simplissimus's rival p = 0.5 + epsilon.
    """
    if not 0 < epsilon < 0.5:
        raise DomainError(f"epsilon must lie in (0, 0.5), got {epsilon}")
    if not 0 < target_p < 1:
        raise DomainError(f"target_p must lie in (0, 1), got {target_p}")
    limit = max_n if max_n is not None else eval_budget(10_000_000)
    frac = 0.5 + epsilon / 7.0
    block = 20_000
    start = 1
    while start <= limit:
        n = np.arange(start, min(start + block, limit + 1), dtype=float)
        s = np.floor(n * frac + 0.5)
        lower, upper = _binomial_tails(n, s, 0.5)
        p = np.minimum(1.0, 2.0 * np.minimum(lower, upper))
        hits = np.nonzero(p <= target_p)[0]
        if hits.size:
            i = hits[0]
            outcome = BinomialOutcome(int(n[i]), int(s[i]), 0.5)
            llr = bag_likelihood_comparison(outcome, [0.5 + epsilon])[0]
            return SimplissimusResult(outcome.n, outcome.s, float(p[i]), outcome.s / outcome.n, llr)
        start += block
    raise SearchBudgetError(f"no n <= {limit} reaches p <= {target_p}")
