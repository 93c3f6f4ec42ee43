"""Numerical plumbing shared by every test module.

Special functions (log-gamma, regularized incomplete beta, normal and
Student-t distributions), an adaptive Gauss-Kronrod integrator with a
documented change of variables for infinite domains, bracketed root
finding, golden-section minimisation, and the small value types used to
carry Bayes factors around on the log scale.

Everything here is a pure function of its arguments.  The only ambient
input is the ``JLP_EVAL_BUDGET`` environment variable, which raises or
lowers the evaluation budgets of the iterative routines.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import optimize, special

__all__ = [
    "DomainError",
    "QuadratureError",
    "BracketError",
    "ConvergenceError",
    "SearchBudgetError",
    "LogValue",
    "EvidenceRatio",
    "ModelOdds",
    "QuadratureResult",
    "eval_budget",
    "log_gamma",
    "regularized_incomplete_beta",
    "normal_pdf",
    "normal_cdf",
    "normal_sf",
    "normal_quantile",
    "student_t_logpdf",
    "student_t_pdf",
    "student_t_cdf",
    "student_t_sf",
    "student_t_quantile",
    "integrate",
    "find_root",
    "golden_section_minimize",
    "posterior_model_odds",
]

BUDGET_ENV = "JLP_EVAL_BUDGET"


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class BracketError(ValueError):
    """A root bracket does not straddle a sign change."""


class ConvergenceError(RuntimeError):
    """An iterative routine ran out of budget before converging."""


class SearchBudgetError(ConvergenceError):
    """A discrete search exhausted its candidate range."""


class QuadratureError(ConvergenceError):
    """Adaptive quadrature failed to reach its tolerance.

    The best estimate so far is kept on the exception so callers can decide
    whether it is good enough.
    """

    def __init__(self, message: str, value, abs_error_estimate: float, evaluations: int):
        super().__init__(message)
        self.value = value
        self.abs_error_estimate = abs_error_estimate
        self.evaluations = evaluations


def eval_budget(default: int) -> int:
    """Evaluation budget, overridable through ``JLP_EVAL_BUDGET``."""
    raw = os.environ.get(BUDGET_ENV)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(float(raw))
    except ValueError as exc:
        raise DomainError(f"{BUDGET_ENV} must be a positive integer, got {raw!r}") from exc
    if value <= 0:
        raise DomainError(f"{BUDGET_ENV} must be a positive integer, got {raw!r}")
    return value


# ---------------------------------------------------------------------------
# Value types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LogValue:
    """A real number stored as ``sign * exp(log_magnitude)``.

    ``sign == 0`` means exactly zero; ``log_magnitude`` is then ignored.
    """

    log_magnitude: float
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise DomainError(f"sign must be -1, 0 or +1, got {self.sign}")
        if self.sign != 0 and math.isnan(self.log_magnitude):
            raise DomainError("log_magnitude is NaN")

    @classmethod
    def from_float(cls, x: float) -> "LogValue":
        if x == 0:
            return cls(-math.inf, 0)
        return cls(math.log(abs(x)), 1 if x > 0 else -1)

    def to_float(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_magnitude)

    def __mul__(self, other: "LogValue") -> "LogValue":
        if self.sign == 0 or other.sign == 0:
            return LogValue(-math.inf, 0)
        return LogValue(self.log_magnitude + other.log_magnitude, self.sign * other.sign)

    def __truediv__(self, other: "LogValue") -> "LogValue":
        if other.sign == 0:
            raise ZeroDivisionError("division by a zero LogValue")
        if self.sign == 0:
            return LogValue(-math.inf, 0)
        return LogValue(self.log_magnitude - other.log_magnitude, self.sign * other.sign)


_ORIENTATIONS = {"01": "10", "10": "01", "+-": "-+", "-+": "+-"}


@dataclass(frozen=True)
class EvidenceRatio:
    """A Bayes factor kept on the natural-log scale.

    ``orientation`` names numerator then denominator: ``"01"`` is the null
    over the alternative (Jeffreys's K), ``"10"`` the reverse, ``"+-"``
    positive-effect over negative-effect.  ``warnings`` collects validity
    guards that fired without being fatal.
    """

    log_value: float
    orientation: str = "01"
    warnings: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.orientation not in _ORIENTATIONS:
            raise DomainError(f"unknown orientation {self.orientation!r}")
        if math.isnan(self.log_value):
            raise DomainError("log Bayes factor is NaN")

    @property
    def value(self) -> float:
        return math.exp(self.log_value)

    def flip(self) -> "EvidenceRatio":
        return EvidenceRatio(-self.log_value, _ORIENTATIONS[self.orientation], self.warnings)

    def oriented(self, orientation: str) -> "EvidenceRatio":
        if orientation == self.orientation:
            return self
        if _ORIENTATIONS[self.orientation] == orientation:
            return self.flip()
        raise DomainError(f"cannot reorient {self.orientation} as {orientation}")

    @property
    def log_bf01(self) -> float:
        return self.oriented("01").log_value

    @property
    def bf01(self) -> float:
        return math.exp(self.log_bf01)

    @property
    def bf10(self) -> float:
        return math.exp(-self.log_bf01)


@dataclass(frozen=True)
class ModelOdds:
    prior_odds: float
    bayes_factor_10: float
    posterior_odds: float


@dataclass(frozen=True)
class QuadratureResult:
    """Outcome of :func:`integrate`.

    ``value`` is a float for scalar integrands and an ndarray for
    vector-valued ones; ``abs_error_estimate`` is then the largest
    component error.
    """

    value: float | np.ndarray
    abs_error_estimate: float
    evaluations: int


def posterior_model_odds(prior_odds: float, bf10: float) -> ModelOdds:
    """Posterior odds P(M1|y)/P(M0|y) = BF10 * P(M1)/P(M0)."""
    for name, v in (("prior_odds", prior_odds), ("bf10", bf10)):
        if not (v > 0 and math.isfinite(v)):
            raise DomainError(f"{name} must be positive and finite, got {v}")
    return ModelOdds(prior_odds, bf10, bf10 * prior_odds)


# ---------------------------------------------------------------------------
# Special functions
# ---------------------------------------------------------------------------


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0."""
    if not x > 0:
        raise DomainError(f"log_gamma needs x > 0, got {x}")
    return math.lgamma(x)


def regularized_incomplete_beta(x, a, b):
    """I_x(a, b), the regularized incomplete beta function.

    Works elementwise on arrays.  Raises :class:`DomainError` unless
    0 <= x <= 1, a > 0 and b > 0 everywhere.
    """
    xa, aa, ba = np.asarray(x, float), np.asarray(a, float), np.asarray(b, float)
    if np.any(~(xa >= 0)) or np.any(~(xa <= 1)):
        raise DomainError("incomplete beta needs 0 <= x <= 1")
    if np.any(~(aa > 0)) or np.any(~(ba > 0)):
        raise DomainError("incomplete beta needs a > 0 and b > 0")
    out = special.betainc(aa, ba, xa)
    return float(out) if np.ndim(out) == 0 else out


_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def normal_pdf(z):
    out = np.exp(-0.5 * np.square(z) - _LOG_SQRT_2PI)
    return float(out) if np.ndim(out) == 0 else out


def normal_cdf(z):
    out = special.ndtr(z)
    return float(out) if np.ndim(out) == 0 else out


def normal_sf(z):
    out = special.ndtr(-np.asarray(z, float))
    return float(out) if np.ndim(out) == 0 else out


def normal_quantile(p):
    pa = np.asarray(p, float)
    if np.any(~(pa > 0)) or np.any(~(pa < 1)):
        raise DomainError("normal_quantile needs 0 < p < 1")
    out = special.ndtri(pa)
    return float(out) if np.ndim(out) == 0 else out


def _check_df(df) -> None:
    if np.any(~(np.asarray(df, float) > 0)):
        raise DomainError("degrees of freedom must be positive")


def student_t_logpdf(t, df):
    _check_df(df)
    t = np.asarray(t, float)
    out = (
        special.gammaln((df + 1) / 2)
        - special.gammaln(df / 2)
        - 0.5 * np.log(df * math.pi)
        - (df + 1) / 2 * np.log1p(t * t / df)
    )
    return float(out) if np.ndim(out) == 0 else out


def student_t_pdf(t, df):
    out = np.exp(student_t_logpdf(t, df))
    return float(out) if np.ndim(out) == 0 else out


def _t_tail(t, df):
    # P(T > |t|) = 0.5 * I_{df/(df+t^2)}(df/2, 1/2)
    t = np.asarray(t, float)
    x = df / (df + t * t)
    return 0.5 * special.betainc(df / 2.0, 0.5, x)


def student_t_cdf(t, df):
    """P(T <= t) for Student's t, computed through the incomplete beta."""
    _check_df(df)
    t = np.asarray(t, float)
    tail = _t_tail(t, df)
    out = np.where(t > 0, 1.0 - tail, tail)
    return float(out) if np.ndim(out) == 0 else out


def student_t_sf(t, df):
    """P(T > t); accurate in the upper tail."""
    _check_df(df)
    t = np.asarray(t, float)
    tail = _t_tail(t, df)
    out = np.where(t > 0, tail, 1.0 - tail)
    return float(out) if np.ndim(out) == 0 else out


def student_t_quantile(p: float, df: float) -> float:
    """Inverse of :func:`student_t_cdf` by bracketed root finding."""
    _check_df(df)
    if not 0 < p < 1:
        raise DomainError(f"student_t_quantile needs 0 < p < 1, got {p}")
    if p == 0.5:
        return 0.0
    # solve in the tail that keeps the most precision
    q = min(p, 1 - p)
    sign = -1.0 if p < 0.5 else 1.0
    hi = max(1.0, abs(float(normal_quantile(q))))
    while _t_tail(hi, df) > q:
        hi *= 2.0
        if hi > 1e300:
            raise ConvergenceError("could not bracket the t quantile")
    g = lambda t: float(_t_tail(t, df)) - q
    root = find_root(g, 0.0, hi, x_tol=1e-13 * max(1.0, hi))
    return sign * root


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

# 15-point Kronrod rule with its embedded 7-point Gauss rule (QUADPACK qk15).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])  # 15 abscissae on [-1, 1]
_KRONROD_W = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS_W = np.zeros(15)
_GAUSS_W[[1, 3, 5]] = _WG[:3]
_GAUSS_W[[9, 11, 13]] = _WG[2::-1]
_GAUSS_W[7] = _WG[3]

_EPS = np.finfo(float).eps


def _domain_map(a: float, b: float):
    """Map the integration domain onto a finite u-interval.

    Infinite ends use u = x/(1+|x|) about the finite end (or the origin for
    the full line), i.e. x = u/(1-|u|) with dx/du = 1/(1-|u|)^2.
    Returns (u_lo, u_hi, x_of_u, jac, u_of_x).
    """
    if math.isfinite(a) and math.isfinite(b):
        return a, b, (lambda u: u), (lambda u: np.ones_like(u)), (lambda x: x)
    if math.isfinite(a):  # [a, inf)
        return (
            0.0, 1.0,
            lambda u: a + u / (1.0 - u),
            lambda u: 1.0 / np.square(1.0 - u),
            lambda x: (x - a) / (1.0 + (x - a)),
        )
    if math.isfinite(b):  # (-inf, b]
        return (
            -1.0, 0.0,
            lambda u: b + u / (1.0 + u),
            lambda u: 1.0 / np.square(1.0 + u),
            lambda x: (x - b) / (1.0 - (x - b)),
        )
    return (
        -1.0, 1.0,
        lambda u: u / (1.0 - np.abs(u)),
        lambda u: 1.0 / np.square(1.0 - np.abs(u)),
        lambda x: x / (1.0 + abs(x)),
    )


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    *,
    abs_tol: float = 1e-10,
    rel_tol: float = 1e-8,
    points: Sequence[float] = (),
    max_evals: int | None = None,
) -> QuadratureResult:
    """Adaptive Gauss-Kronrod (G7/K15) quadrature of ``f`` over ``[a, b]``.

    ``f`` is called with a 1-D array of abscissae and must return an array
    whose last axis matches it; extra leading axes make the integrand
    vector-valued and every component is driven to tolerance.  ``a`` and
    ``b`` may be infinite, see :func:`_domain_map` for the substitution.
    ``points`` are interior breakpoints used to seed the initial partition.
    A feature much narrower than its panel can be missed entirely, so
    sharp peaks should be bracketed by several points at their own scale,
    not marked by a single point at the centre.

    Converges when every component satisfies
    ``err <= max(abs_tol, rel_tol * |value|)``.  Running out of the
    evaluation budget raises :class:`QuadratureError` carrying the best
    estimate.
    """
    if not (abs_tol > 0 and rel_tol > 0):
        raise DomainError("quadrature tolerances must be positive")
    if math.isnan(a) or math.isnan(b):
        raise DomainError("integration limits are NaN")
    if a == b:
        return QuadratureResult(0.0, 0.0, 1)
    sign = 1.0
    if a > b:
        a, b, sign = b, a, -1.0
    budget = max_evals if max_evals is not None else eval_budget(2_000_000)

    u_lo, u_hi, x_of_u, jac, u_of_x = _domain_map(a, b)
    cuts = sorted({float(u_of_x(p)) for p in points if a < p < b})
    edges = np.array([u_lo] + [c for c in cuts if u_lo < c < u_hi] + [u_hi])

    def evaluate(lo: np.ndarray, hi: np.ndarray):
        half = 0.5 * (hi - lo)
        centre = 0.5 * (hi + lo)
        u = centre[:, None] + half[:, None] * _NODES[None, :]
        with np.errstate(over="ignore", invalid="ignore", divide="ignore", under="ignore"):
            x = x_of_u(u)
            fx = np.asarray(f(x.ravel()), dtype=float)
            fx = fx.reshape(fx.shape[:-1] + u.shape) * jac(u)
        if not np.all(np.isfinite(fx)):
            raise QuadratureError("integrand is not finite on the transformed domain",
                                  math.nan, math.inf, 0)
        kron = np.einsum("...j,j->...", fx, _KRONROD_W) * half
        gauss = np.einsum("...j,j->...", fx, _GAUSS_W) * half
        resabs = np.einsum("...j,j->...", np.abs(fx), _KRONROD_W) * half
        mean = np.einsum("...j,j->...", fx, _KRONROD_W) / 2.0
        resasc = np.einsum("...j,j->...", np.abs(fx - mean[..., None]), _KRONROD_W) * half
        err = np.abs(kron - gauss)
        # QUADPACK's error scaling
        with np.errstate(divide="ignore", invalid="ignore"):
            scaled = resasc * np.minimum(1.0, np.power(200.0 * err / resasc, 1.5))
        err = np.where((resasc != 0) & (err != 0), scaled, err)
        err = np.maximum(err, 50.0 * _EPS * resabs)
        return kron, err

    lo, hi = edges[:-1], edges[1:]
    vals, errs = evaluate(lo, hi)
    evals = 15 * lo.size
    done_val = np.zeros(vals.shape[:-1])
    done_err = np.zeros(vals.shape[:-1])
    while True:
        total = done_val + vals.sum(axis=-1)
        total_err = done_err + errs.sum(axis=-1)
        tol = np.maximum(abs_tol, rel_tol * np.abs(total))
        if np.all(total_err <= tol):
            break
        if evals >= budget or lo.size == 0:
            raise QuadratureError(
                f"quadrature did not converge within {evals} evaluations",
                sign * total, float(np.max(total_err)), evals)
        # per-interval error in units of the tolerance, worst component
        score = (errs / np.asarray(tol)[..., None]).reshape(-1, lo.size).max(axis=0)
        order = np.argsort(score)[::-1]
        cum = np.cumsum(score[order])
        n_split = int(np.searchsorted(cum, score.sum() - 0.5)) + 1
        split = np.zeros(lo.size, dtype=bool)
        split[order[:n_split]] = True
        # intervals already at floating-point resolution are retired as they are
        tiny = (hi - lo) <= 64 * _EPS * np.maximum(np.abs(lo), np.abs(hi))
        retire = split & tiny
        if np.any(retire):
            done_val = done_val + vals[..., retire].sum(axis=-1)
            done_err = done_err + errs[..., retire].sum(axis=-1)
            split &= ~retire
        keep = ~split & ~retire
        mid = 0.5 * (lo[split] + hi[split])
        new_lo = np.concatenate([lo[split], mid])
        new_hi = np.concatenate([mid, hi[split]])
        if new_lo.size:
            nv, ne = evaluate(new_lo, new_hi)
            evals += 15 * new_lo.size
        else:
            nv = np.zeros(vals.shape[:-1] + (0,))
            ne = nv
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        vals = np.concatenate([vals[..., keep], nv], axis=-1)
        errs = np.concatenate([errs[..., keep], ne], axis=-1)

    value = sign * total
    if np.ndim(value) == 0:
        value = float(value)
    return QuadratureResult(value, float(np.max(total_err)), evals)


# ---------------------------------------------------------------------------
# Root finding and minimisation
# ---------------------------------------------------------------------------


def find_root(
    g: Callable[[float], float],
    lo: float,
    hi: float,
    x_tol: float = 1e-10,
    max_iter: int | None = None,
) -> float:
    """Root of ``g`` on ``[lo, hi]`` by Brent's method.

    Bisection safeguarded by inverse quadratic interpolation, so the
    bracket always shrinks.  ``g(lo)`` and ``g(hi)`` must not share a sign.
    """
    if not lo < hi:
        raise BracketError(f"empty bracket [{lo}, {hi}]")
    glo, ghi = g(lo), g(hi)
    if math.isnan(glo) or math.isnan(ghi):
        raise BracketError("function is NaN at a bracket end")
    if glo == 0:
        return float(lo)
    if ghi == 0:
        return float(hi)
    if glo * ghi > 0:
        raise BracketError(
            f"bracket does not straddle a root: g({lo})={glo:.6g}, g({hi})={ghi:.6g}")
    maxiter = max_iter if max_iter is not None else min(eval_budget(500), 10_000)
    root, info = optimize.brentq(g, lo, hi, xtol=x_tol, rtol=4 * _EPS,
                                 maxiter=maxiter, full_output=True, disp=False)
    if not info.converged:
        raise ConvergenceError(f"root finding did not converge in {maxiter} iterations")
    return float(root)


_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_minimize(
    h: Callable[[float], float],
    lo: float,
    hi: float,
    x_tol: float = 1e-6,
    max_iter: int = 200,
) -> tuple[float, float]:
    """Minimise a unimodal ``h`` on ``[lo, hi]``; returns (argmin, min)."""
    if not lo < hi:
        raise DomainError(f"empty interval [{lo}, {hi}]")
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    hc, hd = h(c), h(d)
    for _ in range(max_iter):
        if b - a <= x_tol:
            break
        if hc <= hd:
            b, d, hd = d, c, hc
            c = b - _INV_PHI * (b - a)
            hc = h(c)
        else:
            a, c, hc = c, d, hd
            d = a + _INV_PHI * (b - a)
            hd = h(d)
    else:
        raise ConvergenceError("golden-section search did not converge")
    # the interval ends may beat the interior probes when the minimum sits on a boundary
    candidates = [(hc, c), (hd, d), (h(a), a), (h(b), b)]
    best_h, best_x = min(candidates)
    return best_x, best_h
