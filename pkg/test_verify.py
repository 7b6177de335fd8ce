"""Tests of the self-verification suites."""
import numpy as np
import pytest

import hypervol._hypercube as _hypercube
import hypervol._verify as _verify

EXACT_SUITES = (
    "orthonormality",
    "derivative_expansion",
    "eigen_relation",
    "reversibility",
    "expected_count_vs_influence",
    "pairing_routes",
    "second_moment_series_vs_fourier",
    "second_moment_increasing_vs_series",
    "increasing_upper_bound",
    "closed_form_oracles",
    "product_coefficient",
    "tri_product_expectation",
    "inverse_and_parseval",
    "measure_normalization",
    "operator_split",
    "family_backing",
    "incremental_evaluators",
    "exact_law_moments",
    "pz_bound_monotone",
    "mgf_derivatives",
)

SAMPLED_SUITES = ("monte_carlo_tails", "monte_carlo", "stationarity")


@pytest.fixture(scope="module")
def quick_report():
    return _verify.run_suites(n_max=5, p_grid=(0.3, 0.5), seed=0,
                              mc_trials=5000, quick=True)


def test_report_layout(quick_report):
    names = [suite["name"] for suite in quick_report["suites"]]

    assert len(names) == len(set(names))
    assert set(names) == set(EXACT_SUITES) | set(SAMPLED_SUITES)
    assert isinstance(quick_report["passed"], bool)

    for suite in quick_report["suites"]:
        assert suite["checks"] >= 1
        assert suite["elapsed"] >= 0.0


def test_exact_suites_pass(quick_report):
    failed = [suite for suite in quick_report["suites"]
              if suite["name"] in EXACT_SUITES and not suite["passed"]]

    assert not failed, failed


def test_leading_constant(quick_report):
    leading = quick_report["leading_constant"]

    assert leading["constant"] in (1, 2)
    assert leading["residual"] <= 1e-6


def test_oracles():
    res = _verify.check_oracles()

    assert res.passed
    assert np.isclose(res.detail["majority_3 I(f)"], 0.75)


def test_eigen_small_dims():
    res = _verify.check_eigen(dims=(4, ), p_grid=(0.1, 0.5))

    assert res.passed
    assert res.checks == 2 * 16


def test_tally_flags_non_finite():
    tally = _verify._Tally("residuals", 1e-10)
    tally.record(0.0, "fine")
    tally.record(float("nan"), "broken")
    res = tally.result()

    assert not res.passed
    assert res.checks == 2
    assert res.detail["failures"][0].startswith("broken")


class TestAlgebraSuites:
    def test_product_coefficient(self):
        res = _verify.check_product_coefficient(n_max=4, count=4,
                                                p_grid=(0.2, 0.5), seed=1)

        assert res.passed, res.detail
        # One pair of functions per dimension 1..4, every subset.
        assert res.checks == 2 + 4 + 8 + 16

    def test_tri_product(self):
        res = _verify.check_tri_product(n_max=2, p_grid=(0.1, 0.5))

        assert res.passed, res.detail
        assert res.checks == 2 * (2**2 + 4**2)

    def test_inverse_and_parseval(self):
        res = _verify.check_inverse_and_parseval(n_max=4, count=3,
                                                 p_grid=(0.3, ), seed=2)

        assert res.passed, res.detail
        assert res.max_residual <= 1e-10

    def test_measure(self):
        res = _verify.check_measure(n_max=6, p_grid=(0.1, 0.9))

        assert res.passed
        assert res.checks == 12

    def test_operator_split(self):
        res = _verify.check_operator_split(n_max=4, count=2,
                                           p_grid=(0.3, ), seed=3)

        assert res.passed, res.detail


class TestBackingSuites:
    @pytest.mark.parametrize("kind, n, tribe_size", (
        ("dictator", 3, None),
        ("majority", 5, None),
        ("parity", 4, None),
        ("and", 3, None),
        ("or", 3, None),
        ("tribes", 6, 3),
    ))
    def test_word_oracle_matches_table(self, kind, n, tribe_size):
        spec = _hypercube.FamilySpec(kind, n, tribe_size=tribe_size)
        table = _hypercube.BooleanFunction.from_family(spec).truth_table()
        oracle = _verify._word_oracle(spec, np.arange(1 << n))

        assert np.array_equal(oracle, table.astype(np.int64))

    def test_tribes_oracle(self):
        spec = _hypercube.FamilySpec("tribes", 4, tribe_size=2)
        words = np.array([0b0011, 0b1100, 0b0110, 0b0101, 0b1111])

        assert _verify._word_oracle(spec, words).tolist() == [1, 1, 0, 0, 1]

    def test_family_backing(self):
        res = _verify.check_family_backing(n_max=6, samples=32, seed=4)

        assert res.passed, res.detail
        assert res.max_residual == 0.0

    def test_incremental_evaluators(self):
        res = _verify.check_incremental_evaluators(n_max=6, runs=16,
                                                   steps=20, seed=5)

        assert res.passed, res.detail
        assert res.max_residual == 0.0


class TestCountLawSuites:
    def test_exact_engine(self):
        res = _verify.check_exact_engine(n_max=3, count=2, p_grid=(0.3, ),
                                         seed=6)

        assert res.passed, res.detail
        assert res.checks % 3 == 0

    def test_pz_monotone(self):
        res = _verify.check_pz_monotone(n_max=3, p_grid=(0.5, ), thetas=5)

        assert res.passed, res.detail

    def test_mc_tails(self):
        res = _verify.check_mc_tails(trials=20000, seed=7)

        assert res.passed, res.detail
        assert res.detail["dictator_1"]["thresholds"] >= 2
