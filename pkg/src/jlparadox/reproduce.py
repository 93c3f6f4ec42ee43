"""Regenerate every tabled value and compare it with the stored fixtures."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from importlib import resources

from . import gaussian, proportions, student

FIXTURE = "paper_values.json"


@dataclass(frozen=True)
class ReproRow:
    table_id: str
    row_key: str
    paper_value: float
    computed_value: float
    tolerance: float
    mode: str
    status: str  # pass | fail | flagged
    note: str = ""

    @property
    def delta(self) -> float:
        return self.computed_value - self.paper_value


def load_fixtures() -> dict:
    text = resources.files("jlparadox").joinpath("data", FIXTURE).read_text(encoding="utf-8")
    return json.loads(text)


def within(computed: float, expected: float, tolerance: float, mode: str) -> bool:
    if not math.isfinite(computed):
        return False
    if mode == "rel":
        return abs(computed - expected) <= tolerance * abs(expected)
    if mode == "abs":
        return abs(computed - expected) <= tolerance
    raise ValueError(f"unknown tolerance mode {mode!r}")


def compute_values() -> dict[tuple[str, str], float]:
    """Every regenerated quantity keyed by (table_id, row_key).

    Functions are looked up on their modules at call time so a patched
    formula propagates into the report.
    """
    out: dict[tuple[str, str], float] = {}

    for row in proportions.jeffreys1935_table():
        out["table1", f"{row.size}/max_odds"] = row.max_odds
        out["table1", f"{row.size}/critical_difference"] = row.critical_difference
        out["table1", f"{row.size}/ratio"] = row.ratio

    for n, ratio in gaussian.jeffreys1936_table():
        out["table2", str(n)] = ratio

    for n, _t, k in student.jeffreys1938t_table():
        out["table3", str(n)] = k

    for row in gaussian.jeffreys1938chi2_table():
        for j in (0, 1):
            out["table4", f"{row.n}/K/{j + 1}"] = row.k[j]
            out["table4", f"{row.n}/a0_root_n/{j + 1}"] = row.a0_root_n[j]
            out["table4", f"{row.n}/chi2/{j + 1}"] = row.chi2[j]

    prior = student.CauchyPrior()
    for t, n in ((2.321, 20), (2.113, 82), (2.062, 332)):
        spec = student.TTestSpec(t, n)
        direction = student.posterior_direction_masses(spec, prior)
        out["figure1", f"{t}/{n}/bf10"] = student.cauchy_t_bf10(spec, prior).value
        out["figure1", f"{t}/{n}/mass_negative"] = direction.mass_negative
        out["figure1", f"{t}/{n}/one_sided_p"] = student.one_sided_p(spec)
        if n == 20:
            out["figure1", f"{t}/{n}/bf_plus_minus"] = direction.bf_plus_minus

    for g0 in (0.1, 0.05):
        for alpha in (0.05, 0.01):
            curve = gaussian.perinull_curve(g0, 1.0, alpha, [10 ** 8])
            out["figure2", f"{g0}/1/{alpha}/bound"] = curve[-1][1]

    simp = proportions.simplissimus_construct(0.07, 0.01)
    out["good", "simplissimus/n"] = simp.n
    out["good", "simplissimus/proportion"] = simp.proportion
    for n, s in ((200, 120), (780, 429), (19000, 9690)):
        out["good", f"bag/{n}/{s}/p"] = proportions.binomial_two_sided_p(proportions.BinomialOutcome(n, s))

    out["quotes", "least_squares/100000"] = gaussian.least_squares_critical_ratio(100_000)
    out["quotes", "critical_t/100000"] = student.critical_t_for_unit_bf(100_000)[0]
    return out


def run_report() -> list[ReproRow]:
    fixtures = load_fixtures()
    values = compute_values()
    rows = []
    for fx in fixtures["rows"]:
        key = (fx["table_id"], fx["row_key"])
        computed = float(values.get(key, math.nan))
        ok = within(computed, fx["paper_value"], fx["tolerance"], fx["mode"])
        status = "flagged" if fx.get("flagged") else ("pass" if ok else "fail")
        rows.append(ReproRow(fx["table_id"], fx["row_key"], fx["paper_value"], computed,
                             fx["tolerance"], fx["mode"], status, fx.get("note", "")))
    return rows


def summarize(rows: list[ReproRow]) -> dict:
    counts = {s: sum(r.status == s for r in rows) for s in ("pass", "fail", "flagged")}
    return {
        "counts": counts,
        "ok": counts["fail"] == 0,
        "rows": [dict(asdict(r), delta=r.delta) for r in rows],
    }
