"""Tests of the jump-chain operators, sensitivity and influences."""
import numpy as np
import pytest

import hypervol._utils as _utils
import hypervol._hypercube as _hypercube
import hypervol._spectral as _spectral
import hypervol._dynamics as _dynamics
import hypervol._moments as _moments


def _random_vector(n, seed=0):
    return np.random.default_rng(seed).normal(size=1 << n)


class TestOperators:
    def test_stochastic(self):
        q_n = _dynamics.OperatorHandle("qn", 0.3, n=5)
        assert np.allclose(q_n.apply(np.ones(32)), 1.0, rtol=0, atol=1e-15)

    def test_stationary(self):
        n, p = 6, 0.3
        weights = _hypercube.ProductMeasure(p, n).weights()
        vec = _random_vector(n)
        q_n = _dynamics.OperatorHandle("qn", p, n=n)

        assert np.isclose(_utils.stable_dot(weights, q_n.apply(vec)),
                          _utils.stable_dot(weights, vec), rtol=0, atol=1e-12)

    def test_boundary_split(self):
        func = _hypercube.random_function(6, random_state=2)
        vec = _random_vector(6, seed=1)
        applied = {
            kind: _dynamics.apply(_dynamics.OperatorHandle(kind, 0.4, f=func),
                                  vec)
            for kind in _dynamics.VALID_OPERATORS
        }

        assert np.allclose(applied["qf"] + applied["qdf"], applied["qn"],
                           rtol=0, atol=1e-14)

    def test_batch_axes(self):
        q_n = _dynamics.OperatorHandle("qn", 0.2, n=4)
        batch = np.stack([_random_vector(4, seed) for seed in range(3)])
        res = q_n.apply(batch)

        for row, vec in zip(res, batch):
            assert np.allclose(row, q_n.apply(vec), rtol=0, atol=1e-15)

    @pytest.mark.parametrize("p", (0.1, 0.3, 0.5, 0.9))
    def test_eigenvectors(self, p):
        n = 5

        for word in range(1 << n):
            subset = _hypercube.SubsetMask(word, n)
            peak = max(p, 1 - p) / np.sqrt(p * (1 - p))
            scale = max(1.0, peak**subset.size)

            assert _dynamics.eigen_residual(subset, p) <= 1e-12 * scale

    def test_reversible(self):
        for p in (0.1, 0.5, 0.7):
            assert _dynamics.reversibility_residual(p, 6) <= 1e-15

    def test_invalid_handles(self):
        with pytest.raises(ValueError):
            _dynamics.OperatorHandle("qx", 0.5, n=3)

        with pytest.raises(ValueError):
            _dynamics.OperatorHandle("qdf", 0.5, n=3)

        with pytest.raises(ValueError):
            _dynamics.OperatorHandle("qn", 0.5)

        with pytest.raises(ValueError):
            _dynamics.OperatorHandle("qn", 0.5, n=3).apply(np.ones(4))


class TestSensitivity:
    def test_matches_operator(self):
        func = _hypercube.parse_function("tribes:6:3")
        q_df = _dynamics.OperatorHandle("qdf", 0.3, f=func)

        assert np.allclose(_dynamics.sensitivity_function(func, 0.3),
                           q_df.apply(np.ones(64)), rtol=0, atol=1e-15)

    def test_constant_function(self):
        func = _hypercube.BooleanFunction(n=3, table=np.ones(8))

        assert not np.any(_dynamics.sensitivity_function(func, 0.4))
        assert _moments.expected_count(func, 0.4) == 0.0


class TestInfluence:
    def test_majority(self):
        profile = _dynamics.influence_profile(
            _hypercube.parse_function("majority:3"), 0.5)

        assert np.allclose(profile.per_bit, 0.25, rtol=0, atol=1e-15)
        assert np.isclose(profile.total, 0.75)
        assert np.isclose(profile.sq_sum, 3 * 0.25**2)
        assert np.allclose(profile.normalized, 0.5)
        assert profile.stderr is None

    @pytest.mark.parametrize("p", (0.2, 0.6))
    def test_dictator(self, p):
        profile = _dynamics.influence_profile(
            _hypercube.parse_function("dictator:3"), p)

        assert np.allclose(profile.per_bit, [2 * p * (1 - p), 0, 0])
        assert np.allclose(profile.normalized, [1, 0, 0])

    def test_total_is_expected_count(self):
        func = _hypercube.random_function(7, random_state=8)

        for p in (0.1, 0.5, 0.8):
            assert np.isclose(_dynamics.influence_profile(func, p).total,
                              _moments.expected_count(func, p),
                              rtol=0, atol=1e-12)

    def test_sampled(self):
        func = _hypercube.parse_function("majority:5")
        exact = _dynamics.influence_profile(func, 0.4)
        sampled = _dynamics.influence_profile(func, 0.4, method="sample",
                                              trials=50000, random_state=1)

        assert np.all(np.abs(sampled.per_bit - exact.per_bit)
                      <= 4 * sampled.stderr)

    def test_invalid_method(self):
        with pytest.raises(ValueError):
            _dynamics.influence_profile(
                _hypercube.parse_function("majority:3"), 0.5, method="fast")

    @pytest.mark.parametrize("spec, expected", (
        ("majority:3", True),
        ("parity:4", True),
        ("tribes:6:3", True),
        ("dictator:3", False),
    ))
    def test_regular(self, spec, expected):
        assert _dynamics.is_regular(_hypercube.parse_function(spec),
                                    0.3) is expected


class TestPairing:
    @pytest.mark.parametrize("spec", ("majority:5", "tribes:6:2", "or:4"))
    def test_routes_agree_increasing(self, spec):
        func = _hypercube.parse_function(spec)

        for word in range(1 << func.n):
            report = _dynamics.boundary_pairing(
                func, _hypercube.SubsetMask(word, func.n), 0.3, strict=True)

            assert set(report.routes()) == {
                "direct", "sensitivity", "monotone", "general"}
            assert report.max_residual() <= 1e-9

    def test_routes_agree_general(self):
        func = _hypercube.random_function(6, random_state=11)
        subset = _hypercube.SubsetMask(0b101101, 6)
        report = _dynamics.boundary_pairing(func, subset, 0.7, strict=True)

        assert report.monotone is None or _hypercube.is_increasing(func)
        assert report.general is not None
        assert report.max_residual() <= 1e-9

    def test_general_route_gate(self):
        func = _hypercube.parse_function("parity:{}".format(
            _utils.GENERAL_ROUTE_MAX_N + 1))
        report = _dynamics.boundary_pairing(
            func, _hypercube.SubsetMask(0b11, func.n), 0.4)

        assert report.general is None
        assert report.monotone is None
        assert set(report.routes()) == {"direct", "sensitivity"}

    def test_pairing_gate(self):
        n = _utils.PAIRING_MAX_N + 1
        func = _hypercube.parse_function("majority:{}".format(n))

        with pytest.raises(_utils.GateError):
            _dynamics.boundary_pairing(func, _hypercube.SubsetMask(0, n), 0.5)

    def test_all_pairings(self):
        func = _hypercube.parse_function("majority:5")
        pairings = _dynamics.pairing_all(func, 0.3)

        assert np.isclose(func.n * pairings[0],
                          _moments.expected_count(func, 0.3))

        for word in (0b1, 0b110, 0b11111):
            report = _dynamics.boundary_pairing(
                func, _hypercube.SubsetMask(word, 5), 0.3)
            assert np.isclose(pairings[word], report.direct, rtol=0,
                              atol=1e-12)

    def test_pairing_fourier_forms(self):
        func = _hypercube.parse_function("tribes:6:3")
        coeffs = _spectral.transform(func, 0.2).coeffs

        for word in (0, 0b000111, 0b101010):
            assert np.isclose(
                _dynamics.pairing_increasing(coeffs, word, 6, 0.2),
                _dynamics.pairing_general(coeffs, word, 6, 0.2),
                rtol=0, atol=1e-10)

    @pytest.mark.parametrize("spec", ("parity:5", "random"))
    def test_pairing_general_weight(self, spec):
        if spec == "random":
            func = _hypercube.random_function(5, random_state=13)
        else:
            func = _hypercube.parse_function(spec)

        coeffs = _spectral.transform(func, 0.35).coeffs

        for word in (0b1, 0b101, 0b11110, 0b11111):
            direct = _dynamics.boundary_pairing(
                func, _hypercube.SubsetMask(word, 5), 0.35).direct
            assert np.isclose(
                _dynamics.pairing_general(coeffs, word, 5, 0.35), direct,
                rtol=0, atol=1e-10)
