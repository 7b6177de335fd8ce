"""Tests of the Monte Carlo simulator and of the exact count law."""
import numpy as np
import pytest
import scipy.stats

import hypervol._utils as _utils
import hypervol._hypercube as _hypercube
import hypervol._moments as _moments
import hypervol._simulate as _simulate


class TestEvaluators:
    @pytest.mark.parametrize("spec", ("majority:7", "majority:6", "parity:6",
                                      "dictator:5", "tribes:6:3", "and:4",
                                      "or:4"))
    def test_follow_closed_form(self, spec):
        family = _hypercube.parse_function(spec).family
        self._check(_simulate.incremental_evaluator(family),
                    lambda bits: _hypercube.eval_family_bits(family, bits),
                    family.n)

    def test_table_lookup(self):
        func = _hypercube.random_function(5, random_state=6)
        evaluator = _simulate.incremental_evaluator(func)

        assert isinstance(evaluator, _simulate.TableEvaluator)
        self._check(evaluator, func.evaluate_bits, 5)

    def test_unknown_source(self):
        with pytest.raises(TypeError):
            _simulate.incremental_evaluator("majority:5")

    @staticmethod
    def _check(evaluator, reference, n, size=300, rounds=60):
        rng = np.random.default_rng(0)
        bits = (rng.random((size, n)) < 0.4).astype(np.uint8)

        assert np.array_equal(evaluator.start(bits.copy()), reference(bits))

        for _ in range(rounds):
            rows = np.flatnonzero(rng.random(size) < 0.7)
            coords = rng.integers(0, n, size=rows.size)
            new = (rng.random(rows.size) < 0.5).astype(np.uint8)
            old = bits[rows, coords]
            bits[rows, coords] = new

            values = evaluator.update(rows, coords, old, new)
            assert np.array_equal(values, reference(bits[rows]))


class TestMonteCarlo:
    def test_reproducible(self):
        cfg = _simulate.McConfig(trials=3000, seed=42, batch=700)
        func = _hypercube.parse_function("majority:5")

        counts_a, jumps_a = _simulate.simulate_counts(func, 0.3, cfg)
        counts_b, jumps_b = _simulate.simulate_counts(func, 0.3, cfg)

        assert np.array_equal(counts_a, counts_b)
        assert np.array_equal(jumps_a, jumps_b)
        assert counts_a.size == 3000
        assert np.all(counts_a <= jumps_a)

    def test_seeds_differ(self):
        func = _hypercube.parse_function("parity:4")
        counts_a, _ = _simulate.simulate_counts(
            func, 0.5, _simulate.McConfig(trials=2000, seed=1))
        counts_b, _ = _simulate.simulate_counts(
            func, 0.5, _simulate.McConfig(trials=2000, seed=2))

        assert not np.array_equal(counts_a, counts_b)

    @pytest.mark.parametrize("spec, rate", (("dictator:1", 0.5),
                                            ("parity:8", 4.0)))
    def test_poisson_oracles(self, spec, rate):
        cfg = _simulate.McConfig(trials=40000, seed=0)
        est = _simulate.monte_carlo_moments(_hypercube.parse_function(spec),
                                            0.5, cfg)

        assert abs(est.mean - rate) <= 4 * est.standard_errors.mean
        assert (abs(est.second_moment - rate - rate**2)
                <= 4 * est.standard_errors.second_moment)

    def test_agrees_with_exact_moments(self):
        func = _hypercube.parse_function("tribes:6:3")
        cfg = _simulate.McConfig(trials=40000, seed=11)
        est = _simulate.monte_carlo_moments(func, 0.4, cfg)

        assert (abs(est.mean - _moments.expected_count(func, 0.4))
                <= 4 * est.standard_errors.mean)
        assert (abs(est.second_moment
                    - _moments.second_moment_series(func, 0.4))
                <= 4 * est.standard_errors.second_moment)

    def test_beyond_table_gate(self):
        func = _hypercube.parse_function("majority:101")
        cfg = _simulate.McConfig(trials=500, seed=3)
        est = _simulate.monte_carlo_moments(func, 0.5, cfg)

        assert not func.has_table
        assert est.mean > 0.0

    def test_sample_count(self):
        func = _hypercube.parse_function("or:4")
        stats = _simulate.sample_count(func, 0.3, seed=9)

        assert stats == _simulate.sample_count(func, 0.3, seed=9)
        assert 0 <= stats.count <= stats.jumps
        assert stats.seed == 9

    @pytest.mark.parametrize("kwargs", ({"trials": 0}, {"batch": 0},
                                        {"seed": -1}, {"trials": 1.5}))
    def test_invalid_config(self, kwargs):
        with pytest.raises(ValueError):
            _simulate.McConfig(**kwargs)

    def test_batch_sizes(self):
        cfg = _simulate.McConfig(trials=2500, batch=1000)

        assert cfg.batch_sizes(4) == [1000, 1000, 500]


class TestEstimates:
    def test_from_counts(self):
        est = _simulate.estimate_from_counts(np.array([0, 1, 1, 3]), k_max=5)

        assert est.mean == 1.25
        assert est.second_moment == 2.75
        assert np.allclose(est.tail_table, [1, 0.75, 0.25, 0.25, 0, 0])
        assert est.standard_errors.tail_table.shape == (6, )

    def test_tail_confidence(self):
        tail = np.array([1.0, 0.6, 0.2, 0.0])
        lower, upper = _simulate.tail_confidence(tail, trials=500)

        assert np.all(lower <= tail + 1e-12)
        assert np.all(tail <= upper + 1e-12)
        assert np.all(upper <= 1.0)

    def test_trajectory_frame(self):
        frame = _simulate.trajectory_frame(np.array([0, 2]), np.array([1, 3]))

        assert frame.columns.tolist() == ["trial", "count", "jumps"]
        assert frame["count"].tolist() == [0, 2]


class TestExactDistribution:
    @pytest.mark.parametrize("spec, rate", (("dictator:1", 0.5),
                                            ("parity:4", 2.0)))
    def test_poisson_law(self, spec, rate):
        dist = _simulate.exact_count_distribution(
            _hypercube.parse_function(spec), 0.5, k_max=12)
        expected = scipy.stats.poisson.pmf(np.arange(13), rate)

        assert np.allclose(dist.probs, expected, rtol=0, atol=1e-10)

    def test_moments(self):
        func = _hypercube.parse_function("majority:3")
        dist = _simulate.exact_count_distribution(func, 0.3)

        assert dist.truncation_mass <= 1e-10
        assert np.isclose(dist.tail_table()[0], 1.0, rtol=0, atol=1e-12)
        assert np.isclose(dist.mean(), _moments.expected_count(func, 0.3),
                          rtol=0, atol=1e-9)
        assert np.isclose(dist.second_moment(),
                          _moments.second_moment_series(func, 0.3),
                          rtol=0, atol=1e-8)

    def test_agrees_with_simulation(self):
        func = _hypercube.parse_function("majority:3")
        tail = _simulate.exact_count_distribution(func, 0.3).tail_table()
        est = _simulate.monte_carlo_moments(
            func, 0.3, _simulate.McConfig(trials=30000, seed=5), k_max=4)

        assert np.all(np.abs(est.tail_table - tail[:5])
                      <= 4 * est.standard_errors.tail_table + 1e-12)

    def test_gate(self):
        func = _hypercube.parse_function("parity:{}".format(
            _utils.COUNT_DIST_MAX_N + 1))

        with pytest.raises(_utils.GateError):
            _simulate.exact_count_distribution(func, 0.5)


class TestStationarity:
    def test_final_states(self):
        res = _simulate.stationarity_check(
            4, 0.3, _simulate.McConfig(trials=20000, seed=13))

        assert res.passed
        assert 0.0 <= res.pvalue <= 1.0

    def test_gate(self):
        with pytest.raises(_utils.GateError):
            _simulate.stationarity_check(
                _simulate.STATIONARITY_MAX_N + 1, 0.3,
                _simulate.McConfig(trials=100))
