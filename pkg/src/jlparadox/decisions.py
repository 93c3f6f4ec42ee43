"""Type I / Type II trade-offs for the two-sided z rule.

Error rates averaged over a prior on the standardized effect, the
lambda*alpha + beta optimum and its link to the K = 1 threshold, and a
seeded Monte Carlo harness that counts mistakes of each kind.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from .gaussian import critical_z_for_unit_bf
from .numcore import (
    ConvergenceError,
    DomainError,
    golden_section_minimize,
    integrate,
    normal_cdf,
    normal_quantile,
    normal_sf,
)

C_MAX = 10.0
_SCAN_POINTS = 201
_CHUNK = 1 << 16


@dataclass(frozen=True)
class ErrorTradeoff:
    critical_value: float
    alpha: float
    beta: float
    lam: float | None = None

    @property
    def objective(self) -> float:
        return (self.lam if self.lam is not None else 1.0) * self.alpha + self.beta


@dataclass(frozen=True)
class TrialConfig:
    n: int
    prior_variance_g: float = 1.0
    prior_prob_h0: float = 0.5
    trials: int = 100_000
    seed: int = 0
    h1_prior: str = "normal"  # or "uniform": delta ~ U(-sqrt(3g), sqrt(3g)), same variance

    def __post_init__(self):
        if self.trials < 1:
            raise DomainError(f"trials must be >= 1, got {self.trials}")
        if self.n < 1 or not self.prior_variance_g > 0:
            raise DomainError("need n >= 1 and g > 0")
        if not 0 < self.prior_prob_h0 < 1:
            raise DomainError("prior_prob_h0 must lie in (0, 1)")
        if self.seed < 0:
            raise DomainError("seed must be nonnegative")
        if self.h1_prior not in ("normal", "uniform"):
            raise DomainError(f"unknown h1_prior {self.h1_prior!r}")


# ---------------------------------------------------------------------------
# Error rates
# ---------------------------------------------------------------------------


def alpha_of(c: float) -> float:
    return 2.0 * float(normal_sf(c))


def error_rates(c: float, n: int, g: float) -> ErrorTradeoff:
    """alpha = 2(1 - Phi(c)); beta = P(|Z| < c) with Z ~ N(delta sqrt(n), 1), delta ~ N(0, g).

    beta is computed by quadrature over delta.
    """
    if not c > 0:
        raise DomainError(f"c must be > 0, got {c}")
    if n < 1 or not g > 0:
        raise DomainError("need n >= 1 and g > 0")
    sd = math.sqrt(g)
    root_n = math.sqrt(n)

    def f(delta):
        shift = delta * root_n
        accept = normal_cdf(c - shift) - normal_cdf(-c - shift)
        return accept * np.exp(-0.5 * delta * delta / g) / (sd * math.sqrt(2 * math.pi))

    # acceptance region in delta has half-width about c/sqrt(n)
    w = (c + 8.0) / root_n
    pts = [-w, -c / root_n, 0.0, c / root_n, w]
    beta = float(integrate(f, -math.inf, math.inf, abs_tol=1e-13, rel_tol=1e-10, points=pts).value)
    return ErrorTradeoff(c, alpha_of(c), beta)


def minimize_weighted_errors(lam: float, n: int, g: float, *, x_tol: float = 1e-6) -> ErrorTradeoff:
    """c* minimizing lam*alpha + beta over c in (0, C_MAX].

    A coarse scan checks the objective has a single interior dip before a
    golden-section search runs on the bracket around the best scan point.
    """
    if not lam > 0:
        raise DomainError(f"lambda must be > 0, got {lam}")
    grid = np.linspace(C_MAX / _SCAN_POINTS, C_MAX, _SCAN_POINTS)
    obj = np.array([lam * alpha_of(c) + error_rates(c, n, g).beta for c in grid])
    steps = np.sign(np.diff(obj))
    steps = steps[steps != 0]
    if np.count_nonzero(np.diff(steps) != 0) > 1:
        raise ConvergenceError("objective is not unimodal on the scanned range")
    i = int(np.argmin(obj))
    lo = grid[i - 1] if i > 0 else 1e-9
    hi = grid[i + 1] if i + 1 < grid.size else C_MAX
    h = lambda c: lam * alpha_of(c) + error_rates(c, n, g).beta
    c_star, _ = golden_section_minimize(h, lo, hi, x_tol=x_tol)
    res = error_rates(c_star, n, g)
    return ErrorTradeoff(c_star, res.alpha, res.beta, lam)


def pearson_alpha_schedule(n_grid: Iterable[int], g: float) -> list[tuple[int, float]]:
    """(n, alpha*) at the lambda = 1 optimum."""
    grid = list(n_grid)
    if not grid:
        raise DomainError("n_grid must be nonempty")
    return [(n, minimize_weighted_errors(1.0, n, g).alpha) for n in grid]


# ---------------------------------------------------------------------------
# Decision rules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FixedAlpha:
    alpha: float

    def critical_value(self, n: int) -> float:
        if not 0 < self.alpha < 1:
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha}")
        return normal_quantile(1 - self.alpha / 2)


@dataclass(frozen=True)
class BFThreshold:
    """Reject when BF01 of the point null against N(0, g_model) drops below k_crit."""

    k_crit: float = 1.0
    g_model: float = 1.0

    def critical_value(self, n: int) -> float:
        if not (self.k_crit > 0 and self.g_model > 0):
            raise DomainError("k_crit and g_model must be > 0")
        ng = n * self.g_model
        # BF01 = sqrt(1+ng) exp(-ng z^2 / 2(1+ng)) < k  <=>  z^2 > (1+ng)/ng (ln(1+ng) - 2 ln k)
        if self.k_crit == 1.0:
            return critical_z_for_unit_bf(n, self.g_model)
        q = (1 + ng) / ng * (math.log1p(ng) - 2 * math.log(self.k_crit))
        return math.sqrt(q) if q > 0 else 0.0


@dataclass(frozen=True)
class Weighted:
    lam: float
    g: float = 1.0

    def critical_value(self, n: int) -> float:
        return minimize_weighted_errors(self.lam, n, self.g).critical_value


Rule = Union[FixedAlpha, BFThreshold, Weighted]


def parse_rule(text: str, g: float = 1.0) -> Rule:
    """``alpha:.05``, ``bf:1`` (optionally ``bf:1:g``) or ``lambda:2``."""
    kind, _, rest = text.partition(":")
    parts = rest.split(":") if rest else []
    try:
        if kind == "alpha" and len(parts) == 1:
            return FixedAlpha(float(parts[0]))
        if kind == "bf" and len(parts) in (1, 2):
            return BFThreshold(float(parts[0]), float(parts[1]) if len(parts) == 2 else g)
        if kind in ("lambda", "weighted") and len(parts) == 1:
            return Weighted(float(parts[0]), g)
    except ValueError as exc:
        raise DomainError(f"bad rule {text!r}: {exc}") from None
    raise DomainError(f"bad rule {text!r}; expected alpha:A, bf:K[:g] or lambda:L")


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MistakeTally:
    type1: int
    type2: int
    h0_trials: int
    h1_trials: int
    critical_value: float

    @property
    def total(self) -> int:
        return self.type1 + self.type2

    @property
    def trials(self) -> int:
        return self.h0_trials + self.h1_trials


def _uniforms(raw: np.ndarray) -> np.ndarray:
    # 53-bit mantissa, centred in its cell so 0 and 1 never occur
    return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * (1.0 / 9007199254740992.0)


def _run_chunk(config: TrialConfig, c: float, start: int, stop: int) -> tuple[int, int, int]:
    """Trial i draws its four uniforms from Philox(key=seed) at counter i."""
    bit_gen = np.random.Philox(key=config.seed)
    bit_gen.advance(start)
    raw = bit_gen.random_raw((stop - start) * 4).reshape(-1, 4)
    u = _uniforms(raw)
    is_h0 = u[:, 0] < config.prior_prob_h0
    g = config.prior_variance_g
    if config.h1_prior == "normal":
        delta = math.sqrt(g) * normal_quantile(u[:, 1])
    else:
        half = math.sqrt(3 * g)
        delta = (2 * u[:, 1] - 1) * half
    delta = np.where(is_h0, 0.0, delta)
    z = delta * math.sqrt(config.n) + normal_quantile(u[:, 2])
    reject = np.abs(z) > c
    type1 = int(np.count_nonzero(is_h0 & reject))
    type2 = int(np.count_nonzero(~is_h0 & ~reject))
    return type1, type2, int(np.count_nonzero(is_h0))


def run_mistake_count(config: TrialConfig, rule: Rule, *, workers: int = 1) -> MistakeTally:
    """Tally wrong decisions of ``rule`` over seeded simulated experiments.

    Each trial consumes one Philox counter block keyed by the seed, so the
    tally depends only on (seed, trials) and not on ``workers``.
    """
    if workers < 1:
        raise DomainError("workers must be >= 1")
    c = rule.critical_value(config.n)
    bounds = [(s, min(s + _CHUNK, config.trials)) for s in range(0, config.trials, _CHUNK)]
    if workers == 1:
        parts = [_run_chunk(config, c, a, b) for a, b in bounds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda ab: _run_chunk(config, c, *ab), bounds))
    type1 = sum(p[0] for p in parts)
    type2 = sum(p[1] for p in parts)
    h0 = sum(p[2] for p in parts)
    return MistakeTally(type1, type2, h0, config.trials - h0, c)


def expected_mistake_rate(rule: Rule, n: int, g: float, prior_prob_h0: float = 0.5) -> float:
    """pi0 * alpha + (1 - pi0) * beta for the rule's critical value."""
    c = rule.critical_value(n)
    res = error_rates(c, n, g)
    return prior_prob_h0 * res.alpha + (1 - prior_prob_h0) * res.beta
