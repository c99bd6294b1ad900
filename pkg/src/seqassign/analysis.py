"""Numerical studies on top of the threshold engine.

Three reports, each with a CSV emitter for external plotting:

* convergence of the scaled optimal locations ell_N(i)/N toward the
  closed-form profile d_i as the board grows;
* tables of the two tail rate functions whose crossing defines d_i;
* an audit that the optimal locations move by 0 or +1 when the horizon
  grows by one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distribution import DiscreteDistribution, asymptotic_profile, rate_minus, rate_plus
from .policy_engine import iter_rows, locations_from_row


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    i: int  # 1-based support index
    ell: int
    ell_over_n: float
    d: float
    gap: float


@dataclass(frozen=True)
class ConvergenceReport:
    rows: tuple[ConvergenceRow, ...]
    max_gap: dict[int, float]  # per recorded horizon


def convergence_study(dist: DiscreteDistribution, n_list: list[int]) -> ConvergenceReport:
    """Record |ell_N(i)/N - d_i| at each requested horizon.

    One incremental sweep to max(n_list); O(max^2) time, O(max) memory.
    """
    if any(b <= a for a, b in zip(n_list, n_list[1:])) or not n_list or n_list[0] < 1:
        raise ValueError("n_list must be strictly increasing and >= 1")
    wanted = set(n_list)
    d = asymptotic_profile(dist).d
    rows: list[ConvergenceRow] = []
    max_gap: dict[int, float] = {}
    for row in iter_rows(dist, max(n_list)):
        m = row.horizon
        if m not in wanted:
            continue
        worst = 0.0
        for i, ell in enumerate(locations_from_row(dist, row), start=1):
            gap = abs(ell / m - d[i - 1])
            worst = max(worst, gap)
            rows.append(ConvergenceRow(m, i, ell, ell / m, d[i - 1], gap))
        max_gap[m] = worst
    return ConvergenceReport(tuple(rows), max_gap)


def convergence_csv(report: ConvergenceReport) -> str:
    """Header ``N,i,ell,ell_over_N,d,gap``; horizon-major, support-minor order."""
    lines = ["N,i,ell,ell_over_N,d,gap"]
    lines += [
        f"{r.n},{r.i},{r.ell},{r.ell_over_n!r},{r.d!r},{r.gap!r}" for r in report.rows
    ]
    return "\n".join(lines) + "\n"


def rate_table(
    dist: DiscreteDistribution, i: int, y_grid: list[float]
) -> list[tuple[float, float, float]]:
    """Tabulate both tail rates over a grid: rows (y, rate_minus, rate_plus).

    For interior i the difference changes sign exactly once between f_{i-1}
    and f_i, at the profile fraction d_i.
    """
    grid = [float(y) for y in y_grid]
    return [(y, rate_minus(dist, i, y), rate_plus(dist, i, y)) for y in grid]


def rate_csv(rows: list[tuple[float, float, float]]) -> str:
    """Header ``y,rate_minus,rate_plus``."""
    lines = ["y,rate_minus,rate_plus"]
    lines += [f"{y!r},{lo!r},{hi!r}" for y, lo, hi in rows]
    return "\n".join(lines) + "\n"


def continuity_audit(
    dist: DiscreteDistribution, n_max: int
) -> list[tuple[int, int, int]]:
    """Increments ell_N(i) - ell_{N-1}(i) outside {0, +1}, as (N, i, delta) rows.

    A correct engine returns an empty list: growing the board by one slot
    nudges each value's optimal rank up by at most one.
    """
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    violations: list[tuple[int, int, int]] = []
    prev: np.ndarray | None = None
    for row in iter_rows(dist, n_max):
        ell = np.asarray(locations_from_row(dist, row))
        if prev is not None:
            delta = ell - prev
            for i in np.nonzero((delta < 0) | (delta > 1))[0]:
                violations.append((row.horizon, int(i) + 1, int(delta[i])))
        prev = ell
    return violations
