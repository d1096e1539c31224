import json
from fractions import Fraction

import pytest

from intertwinor import blocks, spectra
from intertwinor.spectra import Family, KTypeLabel
from intertwinor.verify import (
    FAIL,
    PASS,
    SKIP,
    CheckReport,
    GridSpec,
    failures,
    iter_bundles,
    run_even_order_checks,
    run_det_checks,
    run_diamond_checks,
    run_interface_checks,
    run_scalar_reduction,
    summarize,
    write_report,
)

SMALL = GridSpec(p_max=4, q_max=4, j_max=4, r_values=(1, 2))
TINY = GridSpec(p_max=3, q_max=3, j_max=3, r_values=(1, 2))


class TestGridSpec:
    def test_rejects_empty_ranges(self):
        with pytest.raises(ValueError):
            GridSpec(p_max=1)
        with pytest.raises(ValueError):
            GridSpec(r_values=())

    def test_bundle_iteration_respects_caps(self):
        for params in iter_bundles(SMALL):
            assert 2 <= params.p <= 4 and 2 <= params.q <= 4
            assert params.k <= min(params.p, params.q) - 1
            assert 0 <= params.a <= params.k


class TestSuitesPass:
    @pytest.mark.parametrize("suite", [
        run_diamond_checks, run_interface_checks, run_det_checks,
        run_even_order_checks, run_scalar_reduction,
    ])
    def test_zero_failures_on_small_grid(self, suite):
        reports = suite(SMALL)
        counts = summarize(reports)
        assert counts[FAIL] == 0
        assert counts[PASS] > 0

    def test_diamond_covers_all_families(self):
        reports = run_diamond_checks(TINY)
        families = {rep.point["family"] for rep in reports}
        assert families == {"coexact", "exact", "mixed"}

    def test_order_zero_grid_passes_trivially(self):
        grid = GridSpec(p_max=3, q_max=3, j_max=3, r_values=(0,))
        for suite in (run_diamond_checks, run_interface_checks, run_det_checks,
                      run_even_order_checks, run_scalar_reduction):
            counts = summarize(suite(grid))
            assert counts[FAIL] == 0

    def test_degenerates_are_counted_not_dropped(self):
        reports = run_interface_checks(SMALL)
        counts = summarize(reports)
        assert counts[SKIP] > 0
        skipped = [rep for rep in reports if rep.status == SKIP]
        assert all(rep.lhs for rep in skipped)  # reason recorded


class TestDeterminism:
    def test_identical_runs(self):
        first = [rep.to_json() for rep in run_diamond_checks(TINY)]
        second = [rep.to_json() for rep in run_diamond_checks(TINY)]
        assert first == second

    def test_reports_serialize_to_json_lines(self, tmp_path):
        reports = run_scalar_reduction(TINY)
        path = tmp_path / "report.jsonl"
        write_report(reports, path)
        lines = path.read_text().splitlines()
        assert len(lines) == len(reports)
        for line in lines:
            record = json.loads(line)
            assert {"check", "point", "status"} <= set(record)


class TestNegativeControls:
    def test_perturbed_transition_is_flagged(self):
        from intertwinor.arithmetic import quotient

        def skewed(pt, r, direction):
            # one extra unit in one numerator of the diamond
            if direction.djp == 1 and direction.dj == 1:
                x = pt.Jp + pt.J + 1
                return quotient(Fraction(x + r + 1), Fraction(x - r))
            return spectra.mult1_transition(pt, r, direction)

        reports = run_diamond_checks(TINY, mult1_fn=skewed)
        bad = failures(reports)
        assert bad
        assert all(rep.lhs and rep.rhs for rep in bad)

    def test_perturbed_eigenvalue_is_flagged(self):
        def skewed(pt, r):
            value = spectra.mult1_eigenvalue(pt, r)
            if pt.Jp == pt.J:
                return value * 2
            return value

        reports = run_diamond_checks(TINY, mult1_eig_fn=skewed)
        assert failures(reports)

    def test_perturbed_entries_are_flagged(self):
        def skewed(params, pt, r, scale):
            block = blocks.intertwinor_block(params, pt, r, scale)
            return blocks.TwoByTwo(block.e11 + 1, block.e12, block.e21, block.e22)

        reports = run_interface_checks(TINY, entries_fn=skewed)
        bad = failures(reports)
        assert bad
        assert all(rep.point.get("equation") for rep in bad)

    def test_perturbed_det_is_flagged(self):
        def skewed(pt, r):
            value = spectra.mult2_det(pt, r)
            return value * Fraction(5, 4)

        reports = run_det_checks(TINY, det_fn=skewed)
        assert failures(reports)

    def test_perturbed_even_order_is_flagged(self):
        def skewed(family, params, pt, r):
            value = blocks.even_order_eigenvalue(family, params, pt, r)
            if family is Family.COEXACT:
                return value + 1
            return value

        reports = run_even_order_checks(TINY, eigenvalue_fn=skewed)
        assert failures(reports)

    def test_perturbed_existence_is_flagged(self):
        def skewed(params, label):
            if params.k == 0 and label.family is Family.EXACT:
                return label.jp >= 1 and label.j >= 1  # wrongly claims exact types at k=0
            return spectra.ktype_exists(params, label)

        reports = run_scalar_reduction(TINY, exists_fn=skewed)
        bad = failures(reports)
        assert bad
        assert any("exact family nonempty" in rep.lhs for rep in bad)

    def test_witnesses_carry_both_sides(self):
        def skewed(pt, r):
            return spectra.mult2_det(pt, r) * 7

        bad = failures(run_det_checks(TINY, det_fn=skewed))
        assert bad and bad[0].lhs is not None and bad[0].rhs is not None


class TestScalarReduction:
    def test_only_function_family_at_k0(self):
        reports = run_scalar_reduction(SMALL)
        counts = summarize(reports)
        assert counts[FAIL] == 0
        # the s = +-r degeneracies are present and counted
        assert counts[SKIP] > 0

    def test_report_points_are_k0(self):
        for rep in run_scalar_reduction(TINY):
            assert rep.point["k"] == 0


def test_check_report_json_shape():
    rep = CheckReport("demo", {"p": 2}, FAIL, lhs="1", rhs="2")
    record = json.loads(rep.to_json())
    assert record == {"check": "demo", "point": {"p": 2}, "status": "fail",
                      "lhs": "1", "rhs": "2"}
