"""Acceptance suite: one test per criterion, at the stated tolerance and time budget.

Every test prints a ``criterion N: PASS|FAIL`` line, and the session
summary repeats them in order.
"""
from __future__ import annotations

import math
import time

import numpy as np
import pytest

from jlparadox import cli, decisions, gaussian, proportions, reproduce, student
from jlparadox.numcore import EvidenceRatio

FIXTURES = reproduce.load_fixtures()["rows"]
MASS = 0.02041783
LN2_HALF = math.log(2) / 2


def fixtures_for(table_id):
    return [fx for fx in FIXTURES if fx["table_id"] == table_id]


class Outcome:
    def __init__(self, number, budget):
        self.number, self.budget = number, budget
        self.failures: list[str] = []
        self.start = time.perf_counter()

    def check(self, ok, label):
        if not ok:
            self.failures.append(label)

    def close(self, log):
        elapsed = time.perf_counter() - self.start
        self.check(elapsed < self.budget, f"runtime {elapsed:.3f}s >= {self.budget}s")
        status = "PASS" if not self.failures else "FAIL"
        line = f"criterion {self.number}: {status} ({elapsed:.3f}s)"
        if self.failures:
            line += " | " + "; ".join(self.failures)
        print(line)
        log[self.number] = line
        assert not self.failures, line


def compare_rows(out, table_id, values, skip=()):
    for fx in fixtures_for(table_id):
        if fx["row_key"] in skip:
            continue
        got = values[fx["row_key"]]
        ok = reproduce.within(got, fx["paper_value"], fx["tolerance"], fx["mode"])
        out.check(ok, f"{fx['row_key']} computed {got:.6g} vs {fx['paper_value']}")


def test_criterion_01_two_proportion_table(acceptance_log):
    out = Outcome(1, 1.0)
    values = {}
    for row in proportions.jeffreys1935_table():
        values[f"{row.size}/max_odds"] = row.max_odds
        values[f"{row.size}/critical_difference"] = row.critical_difference
        values[f"{row.size}/ratio"] = row.ratio
    out.check(len(values) == 21, "seven rows expected")
    compare_rows(out, "table1", values)
    out.close(acceptance_log)


def test_criterion_02_least_squares_table(acceptance_log):
    out = Outcome(2, 0.1)
    rows = gaussian.jeffreys1936_table()
    for n, ratio in rows:
        out.check(ratio == math.sqrt(math.log(2 * n / math.pi)), f"{n} formula")
    compare_rows(out, "table2", {str(n): r for n, r in rows})
    out.close(acceptance_log)


def test_criterion_03_t_test_table(acceptance_log):
    # rows 5, 6 and 7 carry the looser band in the fixtures
    out = Outcome(3, 0.1)
    compare_rows(out, "table3", {str(n): k for n, _t, k in student.jeffreys1938t_table()})
    out.close(acceptance_log)


def test_criterion_04_uniformity_table(acceptance_log):
    out = Outcome(4, 1.0)
    values = {}
    for row in gaussian.jeffreys1938chi2_table():
        for j in (0, 1):
            values[f"{row.n}/K/{j + 1}"] = row.k[j]
            values[f"{row.n}/a0_root_n/{j + 1}"] = row.a0_root_n[j]
            values[f"{row.n}/chi2/{j + 1}"] = row.chi2[j]
    compare_rows(out, "table4", values, skip={"5000/a0_root_n/1"})
    out.close(acceptance_log)


def test_criterion_05_figure1_triples(acceptance_log):
    out = Outcome(5, 10.0)
    prior = student.CauchyPrior()
    for (t, n), target in zip(((2.321, 20), (2.113, 82), (2.062, 332)), (2.0, 1.0, 0.5)):
        spec = student.TTestSpec(t, n)
        bf = student.cauchy_t_bf10(spec, prior).value
        mass = student.posterior_direction_masses(spec, prior).mass_negative
        out.check(abs(bf / target - 1) <= 0.02, f"bf10({t},{n})={bf:.5f}")
        out.check(abs(mass - MASS) <= 1e-4, f"mass({t},{n})={mass:.7f}")
    bpm = student.posterior_direction_masses(student.TTestSpec(2.321, 20), prior).bf_plus_minus
    out.check(abs(bpm - 47.9768) <= 0.05, f"bf+-={bpm:.4f}")
    out.close(acceptance_log)


def test_criterion_06_perinull_curves(acceptance_log):
    out = Outcome(6, 1.0)
    grid = sorted({int(10 ** (k / 8)) for k in range(0, 65)})
    for g0, bound in ((0.1, 3.1623), (0.05, 4.4721)):
        for alpha in (0.05, 0.01):
            curve = [bf for _, bf in gaussian.perinull_curve(g0, 1.0, alpha, grid)]
            i = int(np.argmin(curve))
            out.check(all(b >= a for a, b in zip(curve[i:], curve[i + 1:])), f"monotone g0={g0} a={alpha}")
            out.check(abs(curve[-1] - bound) <= 1e-3, f"limit g0={g0} a={alpha} {curve[-1]:.5f}")
    out.close(acceptance_log)


def test_criterion_07_good_constructions(acceptance_log):
    out = Outcome(7, 1.0)
    res = proportions.simplissimus_construct(0.07, 0.01)
    out.check(abs(res.n - 16700) <= 100, f"n={res.n}")
    out.check(round(res.proportion, 2) == 0.51, f"proportion={res.proportion:.4f}")
    outcome = proportions.BinomialOutcome(res.n, res.s)
    ll = lambda th: proportions.binomial_log_likelihood(outcome, th)
    out.check(ll(0.5) > ll(0.57), "L(0.5) > L(0.57)")
    for n, s in ((200, 120), (780, 429), (19000, 9690)):
        p = proportions.binomial_two_sided_p(proportions.BinomialOutcome(n, s))
        out.check(0.004 <= p <= 0.008, f"bag {s}/{n} p={p:.5f}")
    out.close(acceptance_log)


def test_criterion_08_savage_dickey_agreement(acceptance_log):
    out = Outcome(8, 30.0)
    ts = (-1.5, 0.0, 0.8, 2.1, 3.7)
    ns = (5, 30, 300, 5000)
    for t in ts:
        for n in ns:
            spec = student.TTestSpec(t, n)
            sd = student.savage_dickey_bf10(spec).value
            ml = student.cauchy_t_bf10(spec).value
            out.check(abs(sd / ml - 1) <= 1e-4, f"({t},{n}) {sd:.8g} vs {ml:.8g}")
    out.close(acceptance_log)


def test_criterion_09_decision_optimality(acceptance_log):
    out = Outcome(9, 60.0)
    cfg = decisions.TrialConfig(1000, 1.0, 0.5, 1_000_000, seed=42)
    bf = decisions.run_mistake_count(cfg, decisions.BFThreshold(1.0, 1.0))
    fixed = decisions.run_mistake_count(cfg, decisions.FixedAlpha(0.05))
    var = sum(t.total * (1 - t.total / t.trials) for t in (bf, fixed))
    margin = (fixed.total - bf.total) / math.sqrt(var)
    out.check(margin > 3, f"margin {margin:.1f} SE ({bf.total} vs {fixed.total})")
    for n in (100, 1000, 10_000):
        c_star = decisions.minimize_weighted_errors(1.0, n, 1.0).critical_value
        root = gaussian.critical_z_for_unit_bf(n, 1.0)
        out.check(abs(c_star - root) <= 0.1, f"c*({n})={c_star:.4f} vs {root:.4f}")
    out.close(acceptance_log)


def log_bf01_families():
    """Each entry maps n to log BF01 with the test statistic held fixed."""
    r = 2.0

    def flip(e: EvidenceRatio) -> float:
        return e.oriented("01").log_value

    def two_prop(n):
        # equal sample ratios keep the chi-square term at zero as n doubles
        q = n // 8
        return flip(proportions.approx_two_proportion_odds(proportions.TwoProportionCounts(3 * q, q, 3 * q, q)))

    return {
        "point_null_gaussian": lambda n: flip(gaussian.point_null_gaussian_bf(
            gaussian.GaussianTestSpec(r / math.sqrt(n), 1 / math.sqrt(n), n, 1.0))),
        "generic_sqrt_n": lambda n: flip(gaussian.generic_sqrt_n_bf(r, 1.0, n)),
        "uniformity": lambda n: flip(gaussian.uniformity_bf(gaussian.UniformitySpec(n, r / math.sqrt(n)))),
        "jeffreys_t": lambda n: flip(student.jeffreys1938_t_bf(student.TTestSpec(r, n))),
        "cauchy_t": lambda n: flip(student.cauchy_t_bf10(student.TTestSpec(r, n))),
        "point_null_z": lambda n: flip(gaussian.point_null_z_bf(r, n, 1.0)),
        "two_proportion": two_prop,
        "lindley": lambda n: flip(gaussian.lindley_bf(n, r, 1.0, 1.0)),
    }


def test_criterion_10_paradox_signature(acceptance_log):
    out = Outcome(10, 1.0)
    for name, log_bf01 in log_bf01_families().items():
        for n in (10_000, 40_000, 160_000):
            step = log_bf01(2 * n) - log_bf01(n)
            out.check(abs(step - LN2_HALF) <= 1e-3, f"{name} n={n} step={step:.6f}")
    out.close(acceptance_log)


def test_criterion_11_report(acceptance_log, capsys, monkeypatch):
    out = Outcome(11, 60.0)
    clean = cli.main(["report", "reproduce"])
    out.check(clean == 0, f"clean exit {clean}")

    def mutated(spec):
        n, t = spec.n, spec.t
        return EvidenceRatio(0.5 * math.log(2 * n / math.pi) - 0.5 * (n - 2) * math.log1p(t * t / (n - 1)))

    with monkeypatch.context() as m:
        m.setattr(student, "jeffreys1938_t_bf", mutated)
        broken = cli.main(["report", "reproduce"])
    out.check(broken == 1, f"mutated exit {broken}")
    capsys.readouterr()
    with capsys.disabled():
        out.close(acceptance_log)
