import csv
import io
import json
import math

import pytest

from subbary.models.errors import DomainError
from subbary.models.geometry import Direction, SliceSpec
from subbary.services.eckardt import BRANCH_TAU, EckardtExample
from subbary.services.invariants import threshold


@pytest.fixture(scope="module")
def example(kernel):
    return EckardtExample(kernel)


class TestClosedForms:
    def test_t_of_tau(self, example):
        assert example.eck_t_of_tau(0.0) == 3.0
        assert example.eck_t_of_tau(1.0) == 0.0
        assert example.eck_t_of_tau(1 / 6) == pytest.approx(2.0)

    def test_branches_agree(self, example):
        assert example._s_near(BRANCH_TAU) == pytest.approx(5 / 3, abs=1e-12)
        assert example._s_far(BRANCH_TAU) == pytest.approx(5 / 3, abs=1e-12)
        assert example.eck_t_of_tau(BRANCH_TAU - 1e-15) == pytest.approx(1.0, abs=1e-7)
        assert example.eck_t_of_tau(BRANCH_TAU) == pytest.approx(1.0, abs=1e-12)

    def test_golden_values(self, example):
        assert example.eck_ratio(0.0) == pytest.approx(2 / 3, abs=1e-12)
        assert example.eck_ratio(1.0) == pytest.approx(1.5, abs=1e-12)
        assert example.eck_s_tau(1.0) == pytest.approx(4 / 3, abs=1e-12)
        assert example.eck_ratio(BRANCH_TAU) == pytest.approx(6 / 5, abs=1e-12)

    def test_tau_of_t_inverts_t_of_tau(self, example):
        for tau in (0.05, 0.3, 0.7, 0.95):
            assert example.eck_tau_of_t(example.eck_t_of_tau(tau)) == pytest.approx(tau, abs=1e-12)

    def test_slice_volume_matches_kernel(self, example, kernel):
        for t in (0.5, 1.0, 2.0):
            piece = kernel.clip(example.body, SliceSpec(Direction.coordinate(1, 2), t))
            assert example.eck_slice_volume(t) == pytest.approx(float(piece.volume), abs=1e-12)

    def test_tau_s_tau_composes(self, example):
        for tau in (0.01, 1 / 6, 0.5, BRANCH_TAU, 0.9, 1.0):
            t = example.eck_t_of_tau(tau)
            assert example.eck_tau_s_tau(t) == pytest.approx(tau * example.eck_s_tau(tau), abs=1e-12)

    def test_tau_s_tau_non_decreasing(self, example):
        values = [k / 100 * example.eck_s_tau(k / 100) for k in range(1, 101)]
        assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))


class TestChecks:
    def test_margin_positive(self, example):
        margin = example.eck_verify_stability(grid=10_000)
        assert margin.min_margin > 0
        assert margin.argmin_tau == pytest.approx(1e-6)

    def test_margin_vanishes_at_zero(self, example):
        assert example.eck_ratio(1e-10) - threshold(1e-10, 2) == pytest.approx(0.0, abs=1e-4)

    def test_margin_at_one_half(self, example):
        expected = 2 / (3 - 2 / 3 * math.sqrt(3)) - 0.5 / (1 - 0.5 ** 1.5)
        assert example.eck_ratio(0.5) - threshold(0.5, 2) == pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(0.3104, abs=1e-4)

    def test_cross_validation(self, example):
        assert example.eck_cross_validate(grid=200) <= 1e-9

    def test_taylor_certificate(self, example):
        assert example.eck_taylor_certificate(grid=10_000) > 0

    def test_small_grid_rejected(self, example):
        with pytest.raises(DomainError):
            example.eck_verify_stability(grid=1)
        with pytest.raises(DomainError):
            example.eck_curve_rows(1)

    def test_valuation(self, example):
        v = example.eck_valuation()
        assert (v.name, v.A, v.sigma, v.s0) == ("ord_E", 2.0, 0.0, 3.0)


class TestCurve:
    def test_last_row(self, example):
        rows = example.eck_curve_rows(11)
        assert rows[-1] == {"tau": "1", "ratio": "1.5", "threshold": "1", "margin": "0.5"}

    def test_first_row_curves_meet(self, example):
        first = example.eck_curve_rows(11)[0]
        assert float(first["ratio"]) == pytest.approx(2 / 3, abs=1e-3)
        assert float(first["margin"]) == pytest.approx(0.0, abs=1e-3)

    def test_ratio_increases(self, example):
        ratios = [float(row["ratio"]) for row in example.eck_curve_rows(101)]
        assert all(b > a for a, b in zip(ratios, ratios[1:]))

    def test_csv_output(self, example):
        text = example.eck_emit_curve(5, "csv")
        assert text.splitlines()[0] == "tau,ratio,threshold,margin"
        rows = list(csv.DictReader(io.StringIO(text)))
        assert len(rows) == 5

    def test_json_output(self, example):
        rows = json.loads(example.eck_emit_curve(3, "json"))
        assert [row["tau"] for row in rows][-1] == "1"

    def test_summary(self, example):
        summary = example.eck_summary(grid=50)
        assert summary["alpha"] == "0.666666666666667"
        assert summary["ratio_at_1"] == "1.5"
        assert float(summary["min_margin"]) > 0
