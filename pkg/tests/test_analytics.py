from __future__ import annotations

from datetime import datetime, timedelta, timezone

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gridpulse.analytics import (
    TimeStep,
    TimeStepSeries,
    bin_index,
    bucket_by_timestep,
    cause_histogram,
    linear_trend,
    outages_per_capita,
    transition_counts,
    transition_counts_csv,
    trend_points,
)

T0 = datetime(2021, 1, 1, tzinfo=timezone.utc)
TWO_H = timedelta(hours=2)


def at(minutes: float) -> datetime:
    return T0 + timedelta(minutes=minutes)


def series_from_totals(totals) -> TimeStepSeries:
    steps = tuple(
        TimeStep(index=i, counts_by_zip={"10001": t} if t else {}, total=t)
        for i, t in enumerate(totals)
    )
    return TimeStepSeries(step_duration=TWO_H, origin=T0, steps=steps)


class TestBucketing:
    def test_same_step(self):
        series = bucket_by_timestep(
            [("10001", at(10)), ("10002", at(110))], TWO_H, origin=T0
        )
        assert len(series.steps) == 1
        assert series.steps[0].index == 0
        assert series.steps[0].total == 2

    def test_exact_boundary_goes_to_next_step(self):
        series = bucket_by_timestep([("10001", at(120))], TWO_H, origin=T0)
        assert series.steps[0].index == 1

    def test_empty_input(self):
        assert bucket_by_timestep([], TWO_H, origin=T0).steps == ()

    def test_outage_before_origin_rejected(self):
        with pytest.raises(ValueError):
            bucket_by_timestep([("10001", at(-1))], TWO_H, origin=T0)

    def test_zero_steps_materialized_between_nonempty(self):
        series = bucket_by_timestep([("10001", at(0)), ("10001", at(600))], TWO_H, origin=T0)
        assert [s.index for s in series.steps] == [0, 1, 2, 3, 4, 5]
        assert [s.total for s in series.steps] == [1, 0, 0, 0, 0, 1]

    def test_default_origin_is_utc_midnight_of_earliest(self):
        series = bucket_by_timestep([("10001", datetime(2021, 3, 2, 5, 30, tzinfo=timezone.utc))])
        assert series.origin == datetime(2021, 3, 2, tzinfo=timezone.utc)
        assert series.steps[0].index == 2  # 05:30 falls into [04:00, 06:00)

    def test_active_overlap_mode_counts_every_step(self):
        series = bucket_by_timestep(
            [("10001", at(10), at(250))], TWO_H, origin=T0, count_active=True
        )
        assert [s.total for s in series.steps] == [1, 1, 1]

    def test_active_mode_requires_end(self):
        with pytest.raises(ValueError):
            bucket_by_timestep([("10001", at(10))], TWO_H, origin=T0, count_active=True)


@settings(max_examples=80)
@given(st.lists(st.integers(min_value=0, max_value=100_000), min_size=1, max_size=60))
def test_bucketing_conserves_outages(offsets):
    events = [(f"1{i % 7:04d}", at(m)) for i, m in enumerate(offsets)]
    series = bucket_by_timestep(events, TWO_H, origin=T0)
    assert sum(series.totals()) == len(events)
    for step in series.steps:
        assert step.total == sum(step.counts_by_zip.values())


@settings(max_examples=50)
@given(st.lists(st.integers(min_value=0, max_value=100_000), min_size=1, max_size=40))
def test_doubling_step_never_increases_nonempty_steps(offsets):
    events = [("10001", at(m)) for m in offsets]
    fine = bucket_by_timestep(events, TWO_H, origin=T0)
    coarse = bucket_by_timestep(events, 2 * TWO_H, origin=T0)
    nonempty = lambda s: sum(1 for step in s.steps if step.total)
    assert nonempty(coarse) <= nonempty(fine)


class TestBinIndex:
    @pytest.mark.parametrize(
        "total,expected",
        [(0, 0), (1, 0), (2, 1), (3, 2), (4, 2), (5, 3), (8, 3),
         (9, 4), (16, 4), (17, 5), (32, 5), (33, 6), (10_000, 6)],
    )
    def test_edges(self, total, expected):
        assert bin_index(total) == expected

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            bin_index(-1)


class TestTransitionCounts:
    def test_two_transitions(self):
        matrix = transition_counts(series_from_totals([1, 2, 5]))
        assert matrix[0][1] == 1
        assert matrix[1][3] == 1
        assert sum(sum(row) for row in matrix) == 2

    def test_self_transition_counts(self):
        matrix = transition_counts(series_from_totals([3, 3]))
        assert matrix[2][2] == 1

    def test_constant_series_fills_diagonal(self):
        matrix = transition_counts(series_from_totals([7] * 12))
        assert matrix[3][3] == 11
        assert sum(sum(row) for row in matrix) == 11

    def test_needs_two_steps(self):
        with pytest.raises(ValueError):
            transition_counts(series_from_totals([4]))

    @settings(max_examples=60)
    @given(st.lists(st.integers(min_value=0, max_value=200), min_size=2, max_size=80))
    def test_cell_sum_is_steps_minus_one(self, totals):
        matrix = transition_counts(series_from_totals(totals))
        assert sum(sum(row) for row in matrix) == len(totals) - 1

    def test_csv_header_lists_bin_upper_limits(self):
        text = transition_counts_csv(transition_counts(series_from_totals([1, 2])))
        assert text.splitlines()[0] == "1,2,4,8,16,32,inf"
        assert len(text.splitlines()) == 8


class TestPerCapita:
    def test_counts_and_rate(self, zip_table):
        result = outages_per_capita(["Queens", "Queens"], zip_table)
        assert result["Queens"] == (2, 0.02)

    def test_no_outages_all_zero(self, zip_table):
        result = outages_per_capita([], zip_table)
        assert set(result) == {"Bronx", "Brooklyn", "Manhattan", "Queens", "StatenIsland"}
        assert all(v == (0, 0.0) for v in result.values())

    def test_zero_population_rejected(self, zip_table):
        from conftest import make_zip_info

        table = {"10001": make_zip_info(pop=0)}
        with pytest.raises(ValueError):
            outages_per_capita([], table)

    def test_unknown_borough_rejected(self, zip_table):
        with pytest.raises(ValueError):
            outages_per_capita(["Gotham"], zip_table)


class TestLinearTrend:
    def test_perfect_line(self):
        fit = linear_trend([(0, 0), (1, 1), (2, 2)])
        assert fit.slope == pytest.approx(1.0, abs=1e-12)
        assert fit.intercept == pytest.approx(0.0, abs=1e-12)
        assert fit.r == pytest.approx(1.0, abs=1e-12)

    def test_flat_line(self):
        fit = linear_trend([(0, 1), (1, 1)])
        assert fit.slope == pytest.approx(0.0, abs=1e-12)
        assert fit.intercept == pytest.approx(1.0, abs=1e-12)

    def test_hand_solved_normal_equations(self):
        # n=4, Sx=6, Sy=10, Sxx=14, Sxy=23, Syy=38
        # slope = (4*23-60)/(4*14-36) = 32/20, intercept = (10-1.6*6)/4
        fit = linear_trend([(0, 0), (1, 2), (2, 3), (3, 5)])
        assert fit.slope == pytest.approx(1.6, abs=1e-12)
        assert fit.intercept == pytest.approx(0.1, abs=1e-12)
        assert fit.r == pytest.approx(0.9922778767136676, abs=1e-12)
        assert fit.n == 4

    def test_degenerate_x_rejected(self):
        with pytest.raises(ValueError):
            linear_trend([(2, 0), (2, 5)])

    def test_single_point_rejected(self):
        with pytest.raises(ValueError):
            linear_trend([(0, 0)])

    @settings(max_examples=60)
    @given(
        st.integers(min_value=-50, max_value=50),
        st.integers(min_value=-50, max_value=50),
        st.lists(st.integers(min_value=-100, max_value=100), min_size=2, max_size=30, unique=True),
    )
    def test_recovers_exact_line(self, a, b, xs):
        fit = linear_trend([(x, a * x + b) for x in xs])
        assert fit.slope == pytest.approx(a, abs=1e-9)
        assert fit.intercept == pytest.approx(b, abs=1e-9)
        if a != 0:
            assert fit.r**2 == pytest.approx(1.0, abs=1e-9)


class TestCauseHistogram:
    def test_missing_maps_to_under_investigation(self):
        result = cause_histogram(["weather", "weather", None])
        assert result == [("weather", 2), ("under investigation", 1)]

    def test_empty(self):
        assert cause_histogram([]) == []

    def test_ties_alphabetical(self):
        assert cause_histogram(["b", "a"]) == [("a", 1), ("b", 1)]

    @settings(max_examples=50)
    @given(st.lists(st.sampled_from(["weather", "equipment", None, "", "tree"])))
    def test_counts_sum_to_history_size(self, causes):
        assert sum(c for _, c in cause_histogram(causes)) == len(causes)


def test_trend_points_joins_on_zip():
    demo = {"10001": {"median_income": 50_000.0}, "10002": {"median_income": 90_000.0}}
    points = trend_points({"10001": 7}, demo, "median_income")
    assert points == [(50_000.0, 7.0), (90_000.0, 0.0)]
