"""Tests of the p-biased Fourier basis and transforms."""
import numpy as np
import pytest

import hypervol._utils as _utils
import hypervol._hypercube as _hypercube
import hypervol._spectral as _spectral


def _expectation(values, p, n):
    return _hypercube.ProductMeasure(p, n).expectation(values)


class TestBasis:
    @pytest.mark.parametrize("p", (0.1, 0.3, 0.5, 0.9))
    def test_orthonormal(self, p):
        n = 4
        chis = np.stack([_spectral.chi_vector(word, n, p)
                         for word in range(1 << n)])
        gram = _spectral.walsh_transform(chis, p)

        assert np.allclose(gram, np.eye(1 << n), rtol=0, atol=1e-10)

    def test_chi_eval_matches_vector(self):
        subset = _hypercube.SubsetMask.from_indices([1, 3], 3)
        chi = _spectral.chi_vector(subset, 3, 0.3)

        for word in range(8):
            point = _hypercube.Point(word, 3)
            assert np.isclose(_spectral.chi_eval(subset, point, 0.3),
                              chi[word], rtol=0, atol=1e-14)

    def test_tri_product(self):
        n, p = 4, 0.3
        rng = np.random.default_rng(0)

        for _ in range(20):
            masks = [_hypercube.SubsetMask(int(word), n)
                     for word in rng.integers(0, 1 << n, size=3)]
            direct = _expectation(np.prod([
                _spectral.chi_vector(mask, n, p) for mask in masks], axis=0),
                                  p, n)

            assert np.isclose(_spectral.tri_product_expectation(*masks, p),
                              direct, rtol=0, atol=1e-10)

    def test_pair_product_expand(self):
        n, p = 3, 0.2
        s_mask = _hypercube.SubsetMask(0b011, n)
        t_mask = _hypercube.SubsetMask(0b110, n)
        product = (_spectral.chi_vector(s_mask, n, p)
                   * _spectral.chi_vector(t_mask, n, p))

        for word in range(1 << n):
            point = _hypercube.Point(word, n)
            assert np.isclose(
                _spectral.pair_product_expand(s_mask, t_mask, point, p),
                product[word], rtol=0, atol=1e-12)

    def test_basis_scale(self):
        scale = _spectral.basis_scale(0.5)

        assert np.isclose(scale.sigma, 0.5)
        assert scale.lam == 0.0


class TestTransform:
    def test_dictator(self):
        spectrum = _spectral.transform(_hypercube.parse_function("dictator:3"),
                                       0.5)
        expected = np.zeros(8)
        expected[0] = expected[1] = 0.5

        assert np.allclose(spectrum.coeffs, expected, rtol=0, atol=1e-15)
        assert spectrum.mean == 0.5
        assert np.isclose(spectrum.variance, 0.25)

    @pytest.mark.parametrize("p", (0.1, 0.5, 0.8))
    def test_parseval(self, p):
        func = _hypercube.random_function(7, random_state=3)
        spectrum = _spectral.transform(func, p)
        prob, _ = _hypercube.nondegeneracy(func, p)

        assert np.isclose(spectrum.mean, prob, rtol=0, atol=1e-12)
        assert np.isclose(_utils.stable_sum(spectrum.coeffs**2), prob,
                          rtol=0, atol=1e-12)

    def test_inverse(self):
        func = _hypercube.random_function(6, random_state=9)
        rebuilt = _spectral.inverse_transform(_spectral.transform(func, 0.3))

        assert np.array_equal(rebuilt.truth_table(), func.truth_table())

    def test_corrupted_spectrum(self):
        coeffs = _spectral.transform(_hypercube.parse_function("or:3"),
                                     0.4).coeffs.copy()
        coeffs[5] += 0.1

        with pytest.raises(ValueError):
            _spectral.inverse_transform(_spectral.Spectrum(3, 0.4, coeffs))

    def test_spectrum_length(self):
        with pytest.raises(ValueError):
            _spectral.Spectrum(3, 0.5, np.zeros(7))

    def test_gate(self):
        func = _hypercube.parse_function("or:{}".format(
            _utils.EXACT_MAX_N + 1))

        with pytest.raises(_utils.GateError):
            _spectral.transform(func, 0.5)

    def test_inner_product(self):
        func = _hypercube.parse_function("majority:3")
        prob, _ = _hypercube.nondegeneracy(func, 0.3)

        assert np.isclose(_spectral.inner_product(func, func, 0.3), prob)

        with pytest.raises(ValueError):
            _spectral.inner_product(func, np.ones(16), 0.3)


class TestProducts:
    def test_product_coefficient(self):
        n, p = 5, 0.3
        f = _hypercube.random_function(n, random_state=1)
        g = _hypercube.random_function(n, random_state=2)
        fg = _hypercube.BooleanFunction(
            n=n, table=f.truth_table() * g.truth_table())
        expected = _spectral.transform(fg, p)

        for word in (0, 0b1, 0b10110, 0b11111):
            subset = _hypercube.SubsetMask(word, n)
            assert np.isclose(
                _spectral.product_coefficient(f, g, subset, p),
                expected[subset], rtol=0, atol=1e-10)

    @pytest.mark.parametrize("p", (0.2, 0.5, 0.7))
    def test_derivative_expansion(self, p):
        func = _hypercube.random_function(6, random_state=4)

        for i in range(1, 7):
            assert np.allclose(_spectral.derivative_expansion(func, i, p),
                               _spectral.direct_derivative(func, i),
                               rtol=0, atol=1e-10)

    def test_derivative_index(self):
        func = _hypercube.parse_function("majority:3")

        with pytest.raises(ValueError):
            _spectral.direct_derivative(func, 4)


class TestLevels:
    def test_level_weights(self):
        func = _hypercube.parse_function("parity:4")
        spectrum = _spectral.transform(func, 0.5)
        weights = _spectral.level_weights(spectrum)

        assert np.allclose(weights, [0.25, 0, 0, 0, 0.25], rtol=0,
                           atol=1e-15)

    def test_noise_stability(self):
        spectrum = _spectral.transform(_hypercube.parse_function("tribes:6:3"),
                                       0.4)

        assert np.isclose(_spectral.noise_stability(spectrum, 1.0),
                          spectrum.mean)
        assert np.isclose(_spectral.noise_stability(spectrum, 0.0),
                          spectrum.mean**2)

        with pytest.raises(ValueError):
            _spectral.noise_stability(spectrum, 1.5)


class TestSpectrumFiles:
    def test_nonzero_rows(self):
        spectrum = _spectral.transform(_hypercube.parse_function("dictator:3"),
                                       0.5)
        frame = _spectral.spectrum_frame(spectrum, nonzero_only=True)

        assert frame.columns.tolist() == ["n", "p", "mask", "subset",
                                          "coefficient"]
        assert frame["mask"].tolist() == ["0x0", "0x1"]
        assert frame["subset"].tolist() == ["{}", "{1}"]
        assert (frame["n"] == 3).all() and np.allclose(frame["p"], 0.5)
        assert np.allclose(frame["coefficient"], 0.5)

    def test_empty_set_row_always_kept(self):
        spectrum = _spectral.transform(_hypercube.parse_function("and:3"),
                                       0.5)
        frame = _spectral.spectrum_frame(spectrum, nonzero_only=True,
                                         atol=1.0)

        assert frame["mask"].tolist() == ["0x0"]

    def test_save_and_load(self, tmp_path):
        path = str(tmp_path / "spectrum.csv")
        spectrum = _spectral.transform(_hypercube.parse_function("tribes:6:2"),
                                       0.3)
        _spectral.save_spectrum_csv(spectrum, path, nonzero_only=True)

        loaded = _spectral.load_spectrum_csv(path)

        assert loaded.n == 6
        assert np.isclose(float(loaded.p), 0.3, rtol=0, atol=1e-15)
        assert np.allclose(loaded.coeffs, spectrum.coeffs, rtol=0, atol=1e-15)

    def test_sparse_table_keeps_dimension(self, tmp_path):
        path = str(tmp_path / "dictator.csv")
        spectrum = _spectral.transform(_hypercube.parse_function("dictator:3"),
                                       0.4)
        _spectral.save_spectrum_csv(spectrum, path, nonzero_only=True)

        loaded = _spectral.load_spectrum_csv(path, 0.4)

        assert loaded.n == 3
        assert np.allclose(loaded.coeffs, spectrum.coeffs, rtol=0, atol=1e-15)

    @pytest.mark.parametrize("kwargs", ({"p": 0.5}, {"n": 4}))
    def test_load_disagreeing_arguments(self, tmp_path, kwargs):
        path = str(tmp_path / "spectrum.csv")
        _spectral.save_spectrum_csv(
            _spectral.transform(_hypercube.parse_function("dictator:3"), 0.4),
            path)

        with pytest.raises(ValueError):
            _spectral.load_spectrum_csv(path, **kwargs)

    def test_sparse_table_without_dimension(self, tmp_path):
        path = tmp_path / "sparse.csv"
        path.write_text("mask,subset,coefficient\n0x0,{},0.5\n0x1,{1},0.5\n")

        with pytest.raises(ValueError):
            _spectral.load_spectrum_csv(str(path), 0.5)

        loaded = _spectral.load_spectrum_csv(str(path), 0.5, n=3)
        assert loaded.n == 3

    def test_full_table_without_dimension(self, tmp_path):
        path = tmp_path / "full.csv"
        path.write_text("mask,subset,coefficient\n0x0,{},0.5\n0x1,{1},0.5\n"
                        "0x2,{2},0\n0x3,\"{1,2}\",0\n")

        loaded = _spectral.load_spectrum_csv(str(path), 0.5)

        assert loaded.n == 2
        assert np.allclose(loaded.coeffs, [0.5, 0.5, 0.0, 0.0])

    def test_missing_columns(self, tmp_path):
        path = tmp_path / "broken.csv"
        path.write_text("mask,value\n0x0,1.0\n")

        with pytest.raises(ValueError):
            _spectral.load_spectrum_csv(str(path), 0.5, n=1)
