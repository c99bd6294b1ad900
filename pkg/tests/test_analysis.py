import numpy as np
import pytest

from seqassign import (
    asymptotic_profile,
    continuity_audit,
    convergence_csv,
    convergence_study,
    locations,
    rate_csv,
    rate_table,
)


class TestConvergence:
    def test_records_requested_horizons(self, dice):
        report = convergence_study(dice, [10, 50])
        assert set(report.max_gap) == {10, 50}
        assert len(report.rows) == 2 * dice.k

    def test_rows_recompute(self, dice):
        report = convergence_study(dice, [25])
        d = asymptotic_profile(dice).d
        ell = locations(dice, 25).ell
        for row in report.rows:
            assert row.n == 25
            assert row.ell == ell[row.i - 1]
            assert row.gap == pytest.approx(abs(row.ell / 25 - d[row.i - 1]))
        assert report.max_gap[25] == pytest.approx(max(r.gap for r in report.rows))

    def test_gap_shrinks_with_horizon(self, dice):
        report = convergence_study(dice, [20, 200])
        assert report.max_gap[200] < report.max_gap[20]

    def test_bad_n_list(self, dice):
        for bad in ([], [0], [5, 5], [5, 3]):
            with pytest.raises(ValueError):
                convergence_study(dice, bad)

    def test_csv_shape(self, dice):
        report = convergence_study(dice, [10, 20])
        lines = convergence_csv(report).strip().splitlines()
        assert lines[0] == "N,i,ell,ell_over_N,d,gap"
        assert len(lines) == 1 + len(report.rows)
        first = lines[1].split(",")
        assert int(first[0]) == 10 and int(first[1]) == 1


class TestRateTable:
    def test_rates_cross_at_profile(self, dice):
        d = asymptotic_profile(dice).d
        for i in range(2, dice.k):
            (_, lo, hi), = rate_table(dice, i, [d[i - 1]])
            assert lo == pytest.approx(hi, abs=1e-12)

    def test_signs_flip_across_band(self, dice):
        # below the crossing the below-rate is smaller, above it is larger
        f = dice.cum
        i = 3
        y_lo = f[i - 1] + 1e-4
        y_hi = f[i] - 1e-4
        rows = rate_table(dice, i, [y_lo, y_hi])
        assert rows[0][1] < rows[0][2]
        assert rows[1][1] > rows[1][2]

    def test_csv_shape(self, dice):
        rows = rate_table(dice, 2, list(np.linspace(0.2, 0.3, 5)))
        lines = rate_csv(rows).strip().splitlines()
        assert lines[0] == "y,rate_minus,rate_plus"
        assert len(lines) == 6
        y, lo, hi = (float(c) for c in lines[1].split(","))
        assert (y, lo, hi) == rows[0]


class TestContinuityAudit:
    def test_dice_clean(self, dice):
        assert continuity_audit(dice, 300) == []

    def test_minimum_horizon(self, dice):
        with pytest.raises(ValueError):
            continuity_audit(dice, 1)

    def test_random_distributions_clean(self, random_dist):
        rng = np.random.default_rng(3)
        for _ in range(5):
            assert continuity_audit(random_dist(rng), 120) == []
