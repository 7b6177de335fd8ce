"""End-to-end VolMFE tests."""
import sys
import warnings

import numpy as np
import pytest

import hypervol.volmfe
from hypervol._hypercube import parse_function


def _as_dict(res):
    return dict(zip(res[0], res[1]))


class TestFitExtract:
    def test_default_groups(self):
        model = hypervol.volmfe.VolMFE(random_state=0)
        names, vals = model.fit("majority:5", 0.3).extract()

        assert len(names) == len(vals)
        assert names == sorted(names)

        res = dict(zip(names, vals))
        assert res["dim"] == 5
        assert np.isclose(res["bias"], 0.3)
        assert res["is_increasing"] == 1
        assert np.isclose(res["expected_count"], res["total_influence"],
                          rtol=0, atol=1e-12)
        assert "influence.mean" in res and "influence.sd" in res
        assert not any(name.startswith("mc_") for name in names)

    def test_accepts_function_objects(self):
        func = parse_function("tribes:6:3")
        model = hypervol.volmfe.VolMFE(groups="hypercube", summary=[])
        res = _as_dict(model.fit(func, 0.5).extract())

        assert res["dim"] == 6
        # P(at least one of two all-ones blocks of 3)
        assert np.isclose(res["prob_one"], 1 - (1 - 1 / 8)**2)

    def test_arrays_without_summary(self):
        model = hypervol.volmfe.VolMFE(groups="influence", summary=[])
        res = _as_dict(model.fit("majority:3", 0.5).extract())

        assert np.allclose(res["influence"], 0.25, rtol=0, atol=1e-12)
        assert np.isclose(res["total_influence"], 0.75, rtol=0, atol=1e-12)
        assert res["regularity_check"] in (0.0, 1.0)

    def test_without_precomputation(self):
        kwargs = dict(groups=["influence", "moments"], summary=["mean"])
        with_precomp = _as_dict(hypervol.volmfe.VolMFE(**kwargs).fit(
            "majority:5", 0.4).extract())
        without = _as_dict(hypervol.volmfe.VolMFE(**kwargs).fit(
            "majority:5", 0.4, precomp_groups=None).extract())

        assert with_precomp.keys() == without.keys()

        for name, val in with_precomp.items():
            assert np.isclose(val, without[name], rtol=1e-9, atol=1e-12,
                              equal_nan=True), name

    def test_custom_arguments(self):
        model = hypervol.volmfe.VolMFE(groups="spectral",
                                       features="noise_stability")
        names, vals = model.fit("majority:5", 0.5).extract(
            noise_stability={"rho": 1.0})

        assert names == ["noise_stability"]
        assert np.isclose(vals[0], 0.5)

    def test_measure_time(self):
        model = hypervol.volmfe.VolMFE(groups="hypercube",
                                       measure_time="total")
        res = model.fit("or:4", 0.2).extract()

        assert len(res) == 3
        assert len(res[0]) == len(res[2])
        assert all(val >= 0 for val in res[2])
        assert model.time_total >= model.time_extract >= 0

    def test_measure_time_with_summary(self):
        model = hypervol.volmfe.VolMFE(groups="influence",
                                       features="influence",
                                       summary=["mean", "quantiles"],
                                       measure_time="avg_summ")
        names, vals, times = model.fit("majority:3", 0.5).extract()

        assert names[0] == "influence.mean"
        assert len(names) == len(vals) == len(times) == 6
        assert times[0] >= 0.0
        # Only the first quantile carries the summary time.
        assert times[2:] == [0.0] * 4

    def test_invalid_time_option(self):
        with pytest.raises(ValueError):
            hypervol.volmfe.VolMFE(measure_time="median")

    def test_extract_before_fit(self):
        with pytest.raises(TypeError):
            hypervol.volmfe.VolMFE().extract()

        with pytest.raises(TypeError):
            hypervol.volmfe.VolMFE().extract_report()

    @pytest.mark.parametrize("p", (0.0, 1.0, -0.1, 2))
    def test_invalid_bias(self, p):
        with pytest.raises(ValueError):
            hypervol.volmfe.VolMFE().fit("majority:3", p)

    def test_invalid_function(self):
        with pytest.raises(TypeError):
            hypervol.volmfe.VolMFE().fit([0, 1, 1, 0], 0.5)

        with pytest.raises(ValueError):
            hypervol.volmfe.VolMFE().fit("majority", 0.5)

    @pytest.mark.parametrize("kwargs", (
        {"theta_grid": (0.0, 0.5)},
        {"k_grid": (-1, )},
        {"mc_trials": 0},
        {"tol": 0.0},
        {"random_state": 1.5},
        {"groups": "unknown"},
    ))
    def test_invalid_settings(self, kwargs):
        with pytest.raises(ValueError):
            hypervol.volmfe.VolMFE(**kwargs)

    def test_gated_diagnostic_is_nan(self):
        model = hypervol.volmfe.VolMFE(groups="moments",
                                       features="second_moment")

        with pytest.warns(RuntimeWarning):
            names, vals = model.fit("parity:15", 0.5).extract()

        assert names == ["second_moment"]
        assert np.isnan(vals[0])

    def test_contract_violation_is_nan(self):
        model = hypervol.volmfe.VolMFE(groups="moments",
                                       features="second_moment_increasing")
        model.fit("parity:4", 0.5)

        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            names, vals = model.extract(suppress_warnings=True)

        assert names == ["second_moment_increasing"]
        assert np.isnan(vals[0])


class TestSimulationGroup:
    def test_reproducible(self):
        kwargs = dict(groups="simulation", mc_trials=4000, mc_batch=1000,
                      summary=[], random_state=7)

        res_a = _as_dict(hypervol.volmfe.VolMFE(**kwargs).fit(
            "dictator:1", 0.5).extract())
        res_b = _as_dict(hypervol.volmfe.VolMFE(**kwargs).fit(
            "dictator:1", 0.5).extract())

        assert res_a["mc_mean"] == res_b["mc_mean"]
        assert np.array_equal(res_a["mc_tail"], res_b["mc_tail"])

    def test_matches_exact_mean(self):
        model = hypervol.volmfe.VolMFE(groups="simulation", mc_trials=20000,
                                       summary=[], random_state=3)
        res = _as_dict(model.fit("dictator:1", 0.5).extract())

        assert abs(res["mc_mean"] - 0.5) <= 4 * res["mc_mean_stderr"]
        assert np.isclose(res["exact_tail"][0], 1 - np.exp(-0.5), rtol=0,
                          atol=1e-10)
        assert np.all(np.diff(res["exact_tail"]) <= 0)


class TestReport:
    def test_small_majority(self):
        report = hypervol.volmfe.VolMFE().fit("majority:3",
                                              0.5).extract_report()

        assert report["function"] == "majority_3"
        assert report["n"] == 3 and report["p"] == 0.5
        assert np.isclose(report["expected_count"], 0.75, rtol=0, atol=1e-12)
        assert np.isclose(report["second_series"], report["second_fourier"],
                          rtol=0, atol=1e-8)
        assert np.isclose(report["second_series"],
                          report["second_increasing"], rtol=0, atol=1e-8)
        assert report["not_computed"] == []

    def test_beyond_exact_gate(self):
        report = hypervol.volmfe.VolMFE(exact_max_n=4).fit(
            "majority:5", 0.5).extract_report()

        assert report["n"] == 5
        assert report["expected_count"] is None
        assert "expected_count" in report["not_computed"]
        assert report["residuals"] == {}


class TestIntrospection:
    def test_valid_groups_and_summary(self):
        assert "simulation" in hypervol.volmfe.VolMFE.valid_groups()
        assert "mean" in hypervol.volmfe.VolMFE.valid_summary()

    def test_valid_diagnostics_includes_dependencies(self):
        names = hypervol.volmfe.VolMFE.valid_diagnostics("moments")

        assert "expected_count" in names
        assert "total_influence" in names
        assert "mc_mean" not in names

    def test_diagnostic_description(self):
        rows, draw = hypervol.volmfe.VolMFE.diagnostic_description(
            groups="spectral", print_table=False)

        assert rows[0] == ["Group", "Diagnostic name", "Description"]
        assert {row[1] for row in rows[1:]} >= {"degree", "level_weights"}
        assert "noise_stability" in draw

    def test_dependencies_inserted(self):
        model = hypervol.volmfe.VolMFE(groups="moments")

        assert model.groups == ("hypercube", "influence", "moments")
        assert model.inserted_group_dep == frozenset({"hypercube",
                                                      "influence"})

    def test_features_narrow_groups(self):
        model = hypervol.volmfe.VolMFE(groups="all",
                                       features=["degree", "mc_mean"])

        assert model.groups == ("spectral", "simulation")
        assert sorted(model.features) == ["degree", "mc_mean"]

    def test_unknown_feature_warns(self):
        with pytest.warns(UserWarning):
            model = hypervol.volmfe.VolMFE(features=["degree", "median"])

        assert model.features == ("degree", )


def _test() -> None:
    if len(sys.argv) <= 3:
        print("usage:", sys.argv[0], "<function> <p> <random_seed>")
        sys.exit(1)

    func_spec = sys.argv[1]
    p = float(sys.argv[2])
    random_state = int(sys.argv[3])

    print("Chosen function:", func_spec)
    print("Random_state:", random_state)

    extractor = hypervol.volmfe.VolMFE(groups="all", mc_trials=20000,
                                       random_state=random_state)
    extractor.fit(func_spec, p)
    res = extractor.extract()

    for name, val in zip(*res):
        print("{:<40}: {:.4f}".format(name, val))


if __name__ == "__main__":
    _test()
