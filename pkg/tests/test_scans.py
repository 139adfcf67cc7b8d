"""Tests for the scan engines, curve families, and expectation inequalities."""

import math

import numpy as np
import pytest

from entroset.distribution import FiniteDistribution, random_distribution
from entroset.kernel import (
    FREQUENCY_BOUND,
    GOLDEN_THRESHOLD,
    DomainError,
    binary_entropy,
)
from entroset.report import (
    PreconditionError,
    ScanConfig,
    make_report,
    merge_reports,
    report_csv_header,
    report_csv_row,
    report_from_json,
    report_to_json,
)
from entroset.scans import (
    BRIDGE_TOL,
    DEFAULT_CONFIGS,
    SCAN_NAMES,
    bridge_gap_scan,
    complement_bridge_gap,
    composed_rate,
    composed_rate_slope,
    entropy_sq_ratio,
    entropy_sq_ratio_arr,
    entropy_sq_ratio_scaled,
    golden_anchor_check,
    kernel_roundtrip_scan,
    merge_property_scan,
    merge_quadruple_margin,
    optimum_search_scan,
    product_bound_chain,
    product_bound_margin,
    reduction_consistency_scan,
    reevaluate_witness,
    run_named_scan,
    scan_rate_convexity,
    tail_rate,
    threshold_exploration,
    union_bound_margin,
)

PHI = (math.sqrt(5.0) + 1.0) / 2.0


def small_cfg(name: str, **overrides) -> ScanConfig:
    from dataclasses import replace

    shrink = {"sq-ratio": 1e-3, "sq-ratio-scaled": 1e-4, "rate-convexity": 5e-3,
              "tail-rate": 1e-3, "threshold": 0.02}
    cfg = DEFAULT_CONFIGS[name]
    kw = {}
    if name in shrink:
        kw["grid_step"] = shrink[name]
    if cfg.random_samples:
        kw["random_samples"] = 2000
    kw.update(overrides)
    return replace(cfg, **kw)


class TestCurveFamilies:
    def test_sq_ratio_anchors_and_limits(self):
        assert entropy_sq_ratio(0.0) == 0.0
        assert entropy_sq_ratio(1.0) == 2.0
        assert entropy_sq_ratio(GOLDEN_THRESHOLD) == 1.0
        # The limit at 1 is 2, approached only logarithmically; what can
        # be checked tightly is the series branch against high precision.
        import mpmath as mp

        mp.mp.dps = 50
        for x in (1.0 - 1e-9, 1.0 - 1e-12):
            xm = mp.mpf(x)

            def h(t):
                return -(t * mp.log(t, 2) + (1 - t) * mp.log(1 - t, 2))

            expected = float(h(xm * xm) / h(xm))
            assert entropy_sq_ratio(x) == pytest.approx(expected, rel=1e-9)
            assert expected < 2.0

    def test_sq_ratio_increasing(self):
        xs = np.linspace(1e-4, 1.0 - 1e-4, 2000)
        vals = entropy_sq_ratio_arr(xs)
        assert np.all(np.diff(vals) > 0.0)

    def test_sq_ratio_series_branch_is_continuous(self):
        # The series takes over below complement 1e-8; the two branches
        # must agree to well under the scan tolerance at the switch.
        lo = entropy_sq_ratio(1.0 - 1.0000001e-8)
        hi = entropy_sq_ratio(1.0 - 0.9999999e-8)
        assert abs(hi - lo) < 1e-7

    def test_scaled_ratio_anchors(self):
        assert entropy_sq_ratio_scaled(0.0) == 2.0
        assert entropy_sq_ratio_scaled(1.0) == 2.0
        assert entropy_sq_ratio_scaled(GOLDEN_THRESHOLD) == pytest.approx(
            PHI, abs=5e-16
        )

    def test_scaled_ratio_increasing_above_golden(self):
        xs = np.linspace(GOLDEN_THRESHOLD, 1.0 - 1e-6, 5000)
        vals = np.array([entropy_sq_ratio_scaled(float(x)) for x in xs])
        assert np.all(np.diff(vals) >= 0.0)

    def test_tail_rate_anchors(self):
        assert tail_rate(0.0) == 1.0
        assert tail_rate(1.0) == 0.0
        assert tail_rate(0.5) == math.log(2.0)

    def test_tail_rate_series_agreement_for_tiny_z(self):
        z = 1e-12
        series = 1.0 - z / 2.0 - z * z / 6.0
        assert tail_rate(z) == pytest.approx(series, abs=1e-15)

    def test_tail_rate_decreasing(self):
        zs = np.linspace(0.0, 1.0, 2001)
        vals = [tail_rate(float(z)) for z in zs]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_composed_rate_convex_and_increasing(self):
        xs = np.linspace(0.1, 8.0, 80)
        vals = [composed_rate(0.5, float(x)) for x in xs]
        assert all(a < b for a, b in zip(vals, vals[1:]))
        second = [a - 2.0 * b + c for a, b, c in zip(vals, vals[2:], vals[1:])]
        # disc = vals[i] - 2 vals[i+2]? keep explicit below instead
        second = [
            vals[i] - 2.0 * vals[i + 1] + vals[i + 2] for i in range(len(vals) - 2)
        ]
        assert all(s >= -1e-9 for s in second)

    def test_composed_rate_slope_matches_finite_difference(self):
        for alpha in (0.2, 0.5, 0.8):
            for x in (0.3, 1.0, 3.0, 7.0):
                h = 1e-5
                fd = (
                    composed_rate(alpha, x + h) - composed_rate(alpha, x - h)
                ) / (2.0 * h)
                assert composed_rate_slope(alpha, x) == pytest.approx(fd, rel=1e-5)

    def test_composed_rate_slope_limits(self):
        assert composed_rate_slope(0.5, 0.0) == 0.0
        assert composed_rate_slope(0.5, 30.0) == pytest.approx(1.0, abs=1e-3)

    def test_composed_rate_rejects_bad_alpha(self):
        for alpha in (0.0, 1.0, -0.5, math.nan):
            with pytest.raises(DomainError):
                composed_rate(alpha, 1.0)
            with pytest.raises(DomainError):
                composed_rate_slope(alpha, 1.0)


class TestExpectationInequalities:
    def test_union_margin_zero_at_single_atom_level(self):
        d = FiniteDistribution([(1.0, FREQUENCY_BOUND)])
        assert union_bound_margin(d, FREQUENCY_BOUND) == pytest.approx(0.0, abs=1e-12)

    def test_union_margin_positive_for_interior_draws(self):
        rng = np.random.default_rng(37)
        for _ in range(200):
            alpha = float(rng.uniform(0.05, FREQUENCY_BOUND))
            vals = rng.uniform(0.0, alpha, size=3)
            w = rng.dirichlet(np.ones(3))
            d = FiniteDistribution(zip(w.tolist(), vals.tolist()))
            assert union_bound_margin(d, alpha) >= -1e-9

    def test_union_margin_preconditions(self):
        d = FiniteDistribution([(1.0, 0.2)])
        with pytest.raises(PreconditionError):
            union_bound_margin(d, 0.5)  # level beyond the frequency bound
        with pytest.raises(PreconditionError):
            union_bound_margin(d, 0.1)  # mean above the level

    def test_product_margin_zero_at_golden_single_atom(self):
        d = FiniteDistribution([(1.0, GOLDEN_THRESHOLD)])
        assert product_bound_margin(d, GOLDEN_THRESHOLD) == pytest.approx(
            0.0, abs=1e-12
        )

    def test_product_margin_positive_above_golden(self):
        rng = np.random.default_rng(41)
        for _ in range(200):
            beta = float(rng.uniform(GOLDEN_THRESHOLD, 0.98))
            vals = rng.uniform(beta, 1.0, size=3)
            w = rng.dirichlet(np.ones(3))
            d = FiniteDistribution(zip(w.tolist(), vals.tolist()))
            assert product_bound_margin(d, beta) >= -1e-9

    def test_product_margin_preconditions(self):
        d = FiniteDistribution([(1.0, 0.9)])
        with pytest.raises(PreconditionError):
            product_bound_margin(d, 0.5)  # level below golden
        with pytest.raises(PreconditionError):
            product_bound_margin(FiniteDistribution([(1.0, 0.3)]), 0.7)
        with pytest.raises(PreconditionError):
            product_bound_margin(d, 1.0)

    def test_product_margin_fails_below_golden_when_unenforced(self):
        # Two-point families (beta/v at v, rest at 0) break the inequality
        # below the golden threshold; that is exactly why the threshold
        # is where it is.
        beta = 0.55
        margins = []
        for v in np.linspace(0.56, 0.999, 300):
            w = beta / v
            d = FiniteDistribution([(w, float(v)), (1.0 - w, 0.0)])
            margins.append(product_bound_margin(d, beta, enforce_threshold=False))
        assert min(margins) < -1e-5

    def test_bridge_gap_is_float_noise(self):
        rng = np.random.default_rng(43)
        for _ in range(300):
            beta = float(rng.uniform(GOLDEN_THRESHOLD, 0.95))
            vals = rng.uniform(beta, 1.0, size=4)
            w = rng.dirichlet(np.ones(4))
            d = FiniteDistribution(zip(w.tolist(), vals.tolist()))
            assert complement_bridge_gap(d, beta) <= 1e-12

    def test_chain_steps_and_recomposition(self):
        rng = np.random.default_rng(47)
        for _ in range(100):
            beta = float(rng.uniform(GOLDEN_THRESHOLD, 0.95))
            vals = rng.uniform(beta, 1.0, size=3)
            w = rng.dirichlet(np.ones(3))
            d = FiniteDistribution(zip(w.tolist(), vals.tolist()))
            chain = product_bound_chain(d, beta)
            assert chain.step_optimum >= -1e-9
            assert chain.step_scaled >= -1e-9
            assert chain.step_golden >= -1e-9
            assert abs(chain.identity_residual) <= 1e-12
            recomposed = (
                chain.step_optimum
                + chain.identity_residual
                + chain.step_scaled
                + chain.step_golden
            )
            assert chain.margin == pytest.approx(recomposed, abs=1e-10)
            assert chain.margin == pytest.approx(
                product_bound_margin(d, beta), abs=1e-12
            )

    def test_chain_preconditions(self):
        d = FiniteDistribution([(1.0, 0.9)])
        with pytest.raises(PreconditionError):
            product_bound_chain(d, 0.5)


class TestScanReports:
    def test_config_validation(self):
        with pytest.raises(ValueError):
            ScanConfig(grid_step=0.0)
        with pytest.raises(ValueError):
            ScanConfig(range_lo=0.9, range_hi=0.1)
        with pytest.raises(ValueError):
            ScanConfig(random_samples=-1)

    def test_make_report_pass_logic(self):
        r = make_report("demo", 10, -1e-7, (0.5,), 1e-6)
        assert r.passed
        r2 = make_report("demo", 10, -1e-5, (0.5,), 1e-6)
        assert not r2.passed

    def test_merge_reports_partition(self):
        from dataclasses import replace

        base = DEFAULT_CONFIGS["sq-ratio"]
        left = run_named_scan(
            "sq-ratio", replace(base, grid_step=1e-3, range_lo=0.01, range_hi=0.5)
        )
        right = run_named_scan(
            "sq-ratio", replace(base, grid_step=1e-3, range_lo=0.5, range_hi=0.99)
        )
        merged = merge_reports(left, right)
        assert merged.points_checked == left.points_checked + right.points_checked
        assert merged.min_margin == min(left.min_margin, right.min_margin)
        worse = left if left.min_margin <= right.min_margin else right
        assert merged.argmin_witness == worse.argmin_witness
        assert merge_reports(right, left).min_margin == merged.min_margin

    def test_merge_reports_rejects_mismatches(self):
        a = make_report("a", 1, 0.0, (), 1e-6)
        b = make_report("b", 1, 0.0, (), 1e-6)
        c = make_report("a", 1, 0.0, (), 1e-7)
        with pytest.raises(ValueError):
            merge_reports(a, b)
        with pytest.raises(ValueError):
            merge_reports(a, c)

    def test_json_round_trip(self):
        r = run_named_scan("tail-rate", small_cfg("tail-rate"))
        doc = report_to_json(r)
        again = report_from_json(doc)
        assert again == r

    def test_csv_row_matches_header(self):
        r = run_named_scan("tail-rate", small_cfg("tail-rate"))
        header = report_csv_header()
        row = report_csv_row(r)
        assert len(header) == len(row)
        assert row[0] == "tail-rate"


class TestScanEngines:
    @pytest.mark.parametrize("name", SCAN_NAMES)
    def test_named_scans_pass_and_witnesses_replay(self, name):
        report = run_named_scan(name, small_cfg(name))
        assert report.passed
        replayed = reevaluate_witness(report)
        assert replayed == pytest.approx(report.min_margin, abs=1e-12)

    @pytest.mark.parametrize("name", ["sq-ratio", "union-bound", "threshold"])
    def test_deterministic_for_fixed_seed(self, name):
        a = run_named_scan(name, small_cfg(name))
        b = run_named_scan(name, small_cfg(name))
        assert a == b

    def test_unknown_scan_name_rejected(self):
        with pytest.raises(ValueError):
            run_named_scan("nope")

    def test_rate_convexity_alpha_is_recorded(self):
        r = scan_rate_convexity(0.25, small_cfg("rate-convexity"))
        assert r.config["alpha"] == 0.25
        assert r.passed

    def test_threshold_structure(self):
        from dataclasses import replace

        cfg = replace(
            DEFAULT_CONFIGS["threshold"],
            range_lo=0.56, range_hi=0.68, grid_step=0.02, random_samples=300,
        )
        r = threshold_exploration(cfg)
        assert r.passed  # exploration never fails the suite
        rows = r.details["rows"]
        below = [row for row in rows if not row["above_golden"]]
        above = [row for row in rows if row["above_golden"]]
        assert below and above
        assert min(row["min_margin"] for row in below) < -1e-6
        assert all(row["min_margin"] >= -1e-9 for row in above)

    def test_merge_property_scan_details(self):
        r = merge_property_scan(ScanConfig(random_samples=5000, seed=1, tolerance=1e-9))
        assert r.passed
        d = r.details
        assert d["max_mean_residual"] <= d["mean_residual_bound"]
        assert d["max_weight_excess"] <= d["weight_excess_bound"]
        assert reevaluate_witness(r) == pytest.approx(r.min_margin, abs=1e-12)
        assert merge_quadruple_margin(*r.argmin_witness) == pytest.approx(
            r.min_margin, abs=1e-12
        )

    def test_reduction_scan_replays(self):
        r = reduction_consistency_scan(
            ScanConfig(random_samples=100, seed=2, tolerance=0.0)
        )
        assert r.passed
        assert reevaluate_witness(r) == pytest.approx(r.min_margin, abs=1e-12)

    def test_optimum_search_scan_replays(self):
        r = optimum_search_scan(
            ScanConfig(random_samples=20_000, seed=3, tolerance=0.0), pairs=10
        )
        assert r.passed
        assert r.details["qualified_candidates"] > 0
        assert reevaluate_witness(r) == pytest.approx(r.min_margin, abs=1e-12)

    def test_bridge_gap_scan(self):
        r = bridge_gap_scan(samples=2000, seed=4)
        assert r.passed
        assert r.min_margin >= 0.0
        assert r.details["bound"] == BRIDGE_TOL
        assert reevaluate_witness(r) == pytest.approx(r.min_margin, abs=1e-15)

    def test_kernel_roundtrip_scan_replays(self):
        r = kernel_roundtrip_scan()
        assert r.passed
        assert r.points_checked == 21_000
        assert reevaluate_witness(r) == pytest.approx(r.min_margin, abs=1e-15)

    def test_golden_anchor_check_replays(self):
        r = golden_anchor_check()
        assert r.passed
        assert reevaluate_witness(r) == pytest.approx(r.min_margin, abs=1e-15)

    def test_random_scans_respect_mean_level_preconditions(self):
        # every witness stored by the randomized expectation scans must
        # itself satisfy the hypothesis, so replay cannot raise
        for name in ("union-bound", "product-bound"):
            r = run_named_scan(name, small_cfg(name))
            level, ws, vs = r.argmin_witness
            d = FiniteDistribution(zip(ws, vs))
            if name == "union-bound":
                assert d.mean() <= level + 1e-12
            else:
                assert d.mean() >= level - 1e-12
