"""Tests of the switch count moments, bounds and criteria."""
import json

import numpy as np
import pytest

import hypervol._utils as _utils
import hypervol._hypercube as _hypercube
import hypervol._moments as _moments


def _func(spec):
    return _hypercube.parse_function(spec)


class TestOracles:
    @pytest.mark.parametrize("spec, first, second", (
        ("dictator:1", 0.5, 0.75),
        ("parity:2", 1.0, 2.0),
        ("parity:6", 3.0, 12.0),
    ))
    def test_poisson_counts(self, spec, first, second):
        func = _func(spec)

        assert np.isclose(_moments.expected_count(func, 0.5), first,
                          rtol=0, atol=1e-12)
        assert np.isclose(_moments.second_moment_series(func, 0.5), second,
                          rtol=0, atol=1e-9)
        assert np.isclose(_moments.second_moment_fourier(func, 0.5), second,
                          rtol=0, atol=1e-9)

    def test_dictator_increasing_route(self):
        assert np.isclose(
            _moments.second_moment_increasing(_func("dictator:1"), 0.5),
            0.75, rtol=0, atol=1e-9)

    def test_majority_influence(self):
        assert np.isclose(_moments.expected_count(_func("majority:3"), 0.5),
                          0.75, rtol=0, atol=1e-12)


class TestRoutes:
    @pytest.mark.parametrize("p", (0.1, 0.3, 0.5, 0.8))
    def test_series_and_fourier_agree(self, p):
        for seed in range(5):
            func = _hypercube.random_function(6, random_state=seed)
            series = _moments.second_moment_series(func, p)
            fourier = _moments.second_moment_fourier(func, p)

            assert abs(series - fourier) <= 1e-8 * max(1.0, series)

    @pytest.mark.parametrize("spec", ("majority:5", "tribes:6:3", "and:4",
                                      "or:3", "dictator:4"))
    @pytest.mark.parametrize("p", (0.2, 0.5, 0.7))
    def test_increasing_route_agrees(self, spec, p):
        func = _func(spec)
        series = _moments.second_moment_series(func, p)

        assert np.isclose(_moments.second_moment_increasing(func, p), series,
                          rtol=0, atol=1e-8 * max(1.0, series))

    def test_increasing_random_functions(self):
        for seed in range(5):
            func = _hypercube.random_function(7, random_state=seed,
                                              increasing=True)
            series = _moments.second_moment_series(func, 0.3)

            assert np.isclose(_moments.second_moment_increasing(func, 0.3),
                              series, rtol=0, atol=1e-8 * max(1.0, series))

    def test_leading_constant(self):
        leading = _moments.resolve_leading_constant()

        assert leading.constant in (1, 2)
        assert leading.residual <= 1e-6

    def test_increasing_route_contract(self):
        with pytest.raises(_utils.ContractError):
            _moments.second_moment_increasing(_func("parity:3"), 0.5)

    def test_series_gate(self):
        func = _func("parity:{}".format(_utils.SERIES_MAX_N + 1))

        with pytest.raises(_utils.GateError):
            _moments.second_moment_series(func, 0.5)

    def test_truncation_failure(self):
        policy = _moments.TruncationPolicy(tol=1e-12, k_max=5)

        with pytest.raises(_utils.TruncationError):
            _moments.second_moment_series(_func("majority:9"), 0.5, policy)

    def test_series_certificate(self):
        details = _moments.second_moment_series_details(_func("majority:7"),
                                                         0.4)

        assert details.tail_bound <= 1e-12
        assert details.cutoff >= 7

    @pytest.mark.parametrize("kwargs", ({"tol": 0.0}, {"k_max": 1}))
    def test_invalid_policy(self, kwargs):
        with pytest.raises(ValueError):
            _moments.TruncationPolicy(**kwargs)


class TestGeneratingFunction:
    def test_at_zero(self):
        assert np.isclose(_moments.mgf(_func("tribes:6:3"), 0.3, 0.0), 1.0,
                          rtol=0, atol=1e-12)

    def test_poisson_closed_form(self):
        # Parity at p = 1/2 switches at the events of a Poisson(n / 2).
        for s in (-0.5, 0.3):
            assert np.isclose(_moments.mgf(_func("parity:4"), 0.5, s),
                              np.exp(2.0 * (np.exp(s) - 1.0)), rtol=1e-10)

    def test_derivatives(self):
        func = _func("majority:3")
        first, second = _moments.mgf_derivatives(func, 0.4)

        assert np.isclose(first, _moments.expected_count(func, 0.4),
                          rtol=0, atol=1e-4)
        assert np.isclose(second, _moments.second_moment_series(func, 0.4),
                          rtol=0, atol=1e-3)


class TestBounds:
    def test_pz_bound(self):
        func = _func("majority:5")
        first = _moments.expected_count(func, 0.5)
        second = _moments.second_moment_series(func, 0.5)

        assert np.isclose(_moments.pz_lower_bound(func, 0.5, 0.25),
                          0.75 * first**2 / second)

    @pytest.mark.parametrize("theta", (0.0, 1.0, -0.2))
    def test_pz_theta(self, theta):
        with pytest.raises(ValueError):
            _moments.pz_lower_bound(_func("majority:3"), 0.5, theta)

    def test_pz_constant_function(self):
        func = _hypercube.BooleanFunction(n=3, table=np.zeros(8))
        assert _moments.pz_lower_bound(func, 0.5, 0.5) == 0.0

    @pytest.mark.parametrize("n", (3, 5, 7, 9, 11, 13))
    def test_majority_anticoncentration(self, n):
        bound = _moments.pz_lower_bound(_func("majority:{}".format(n)), 0.5,
                                        0.5)
        assert bound >= 0.1

    @pytest.mark.parametrize("spec", ("majority:5", "tribes:6:2", "or:4",
                                      "dictator:3"))
    @pytest.mark.parametrize("p", (0.1, 0.5, 0.9))
    def test_increasing_upper_bound(self, spec, p):
        func = _func(spec)

        assert (_moments.second_moment_series(func, p)
                <= _moments.increasing_upper_bound(func, p) + 1e-10)

    def test_upper_bound_contract(self):
        with pytest.raises(_utils.ContractError):
            _moments.increasing_upper_bound(_func("parity:3"), 0.5)

    def test_criterion_ratio(self):
        func = _func("majority:5")
        ratio, holds = _moments.nontame_criterion(func, 0.5, c_const=1e3)

        total = _moments.expected_count(func, 0.5)
        assert np.isclose(ratio, 0.25 * 5 * 0.25 / total**2)
        assert holds

    def test_criterion_ratio_zero_influence(self):
        func = _hypercube.BooleanFunction(n=2, table=np.ones(4))

        with pytest.raises(_utils.ContractError):
            _moments.criterion_ratio(func, 0.5)

    def test_regularity_bound(self):
        check = _moments.regularity_influence_bound(_func("majority:3"), 0.5,
                                                    d_const=0.4)

        assert check.regular
        assert check.sq_sum > check.d_squared
        assert check.holds is True
        assert check.increasing
        assert check.monotone_ok is True

    def test_regularity_not_applicable(self):
        check = _moments.regularity_influence_bound(_func("dictator:3"), 0.5,
                                                    d_const=0.4)

        assert not check.regular
        assert check.holds is None


class TestReport:
    def test_increasing_function(self):
        report = _moments.moment_report(_func("majority:5"), 0.3)

        assert report.not_computed == []
        assert set(report.pz_bounds) == set(_moments.DEFAULT_THETA_GRID)
        assert all(val <= 1e-8 for val in report.residuals.values())
        assert report.leading_constant is not None
        assert report.series_tail_bound <= 1e-12

    def test_non_increasing_function(self):
        report = _moments.moment_report(_func("parity:4"), 0.3)

        assert report.second_increasing is None
        assert report.increasing_upper is None
        assert "second_increasing" in report.not_computed
        assert "increasing_upper" in report.not_computed

    def test_beyond_series_gate(self):
        report = _moments.moment_report(
            _func("parity:{}".format(_utils.SERIES_MAX_N + 1)), 0.5)

        assert report.second_series is None
        assert all(val is None for val in report.pz_bounds.values())
        assert "pz_bounds" in report.not_computed
        assert report.criterion_ratio is not None

    def test_json_ready(self):
        res = _moments.moment_report(_func("tribes:6:3"), 0.4).to_dict()
        decoded = json.loads(json.dumps(res))

        assert decoded["pz_bounds"].keys() == {"0.25", "0.5", "0.75"}
        assert len(decoded["influence"]["per_bit"]) == 6
