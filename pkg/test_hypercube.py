"""Tests of the hypercube core: points, families, measure and file I/O."""
import numpy as np
import pytest

import hypervol._utils as _utils
import hypervol._hypercube as _hypercube


class TestBiasParam:
    @pytest.mark.parametrize("p", (0.0, 1.0, -0.5, 1.5))
    def test_out_of_range(self, p):
        with pytest.raises(ValueError):
            _hypercube.BiasParam(p)

    @pytest.mark.parametrize("p", (True, "0.5", None))
    def test_not_a_number(self, p):
        with pytest.raises(TypeError):
            _hypercube.BiasParam(p)

    def test_constants(self):
        bias = _hypercube.BiasParam(0.2)

        assert np.isclose(bias.sigma, 0.4)
        assert np.isclose(bias.lam, 0.6 / 0.4)
        assert _hypercube.BiasParam(bias) == bias
        assert float(bias) == 0.2


class TestPoints:
    def test_point_range(self):
        with pytest.raises(ValueError):
            _hypercube.Point(8, 3)

        with pytest.raises(ValueError):
            _hypercube.Point(-1, 3)

        with pytest.raises(TypeError):
            _hypercube.Point(1.0, 3)

    def test_coordinates(self):
        x = _hypercube.Point(0b101, 3)

        assert [x.coord(i) for i in (1, 2, 3)] == [1, 0, 1]
        assert x.weight == 2
        assert x.to_array().tolist() == [1, 0, 1]

    @pytest.mark.parametrize("i", (0, 4))
    def test_index_out_of_range(self, i):
        with pytest.raises(ValueError):
            _hypercube.flip_bit(_hypercube.Point(0, 3), i)

    def test_index_type(self):
        with pytest.raises(TypeError):
            _hypercube.flip_bit(_hypercube.Point(0, 3), True)

    def test_flip_and_set(self):
        x = _hypercube.Point(0b010, 3)

        assert _hypercube.flip_bit(x, 1).bits == 0b011
        assert _hypercube.flip_bit(_hypercube.flip_bit(x, 3), 3) == x
        assert _hypercube.set_bit(x, 2, 0).bits == 0
        assert _hypercube.set_bit(x, 2, 1) == x

        with pytest.raises(ValueError):
            _hypercube.set_bit(x, 2, 2)

    def test_resample_degenerate_bias(self):
        x = _hypercube.Point(0b000, 3)

        assert _hypercube.resample_bit(x, 2, 1.0, random_state=0).bits == 0b010
        assert _hypercube.resample_bit(x, 2, 0.0, random_state=0) == x

        with pytest.raises(ValueError):
            _hypercube.resample_bit(x, 2, 1.5)

    def test_subset_mask(self):
        subset = _hypercube.SubsetMask.from_indices([3, 1], 4)

        assert subset.bits == 0b0101
        assert subset.elements() == (1, 3)
        assert subset.size == 2

        with pytest.raises(ValueError):
            _hypercube.SubsetMask.from_indices([5], 4)


class TestFamilies:
    @pytest.mark.parametrize("spec, bits, expected", (
        ("dictator:3", 0b110, 0),
        ("dictator:3", 0b001, 1),
        ("majority:3", 0b011, 1),
        ("majority:3", 0b100, 0),
        ("majority:4", 0b0011, 1),
        ("majority:4", 0b0001, 0),
        ("parity:3", 0b011, 1),
        ("parity:3", 0b111, 0),
        ("parity:2", 0b00, 1),
        ("tribes:4:2", 0b1100, 1),
        ("tribes:4:2", 0b0110, 0),
        ("and:3", 0b111, 1),
        ("and:3", 0b011, 0),
        ("or:3", 0b000, 0),
        ("or:3", 0b100, 1),
    ))
    def test_evaluate(self, spec, bits, expected):
        func = _hypercube.parse_function(spec)
        x = _hypercube.Point(bits, func.n)

        assert _hypercube.evaluate(func, x) == expected

    def test_table_agrees_with_closed_form(self):
        func = _hypercube.parse_function("tribes:6:2")
        table = func.truth_table()

        assert not table.flags.writeable
        assert np.array_equal(table, _hypercube.eval_family_bits(
            func.family, _utils.bits_matrix(6)))

    @pytest.mark.parametrize("spec", (
        "majority", "majority:x", "tribes:6", "tribes:6:4", "parity:0",
        "parity:3:1", "unknown:3",
    ))
    def test_malformed_spec(self, spec):
        with pytest.raises(ValueError):
            _hypercube.parse_function(spec)

    def test_truth_table_gate(self):
        func = _hypercube.parse_function("majority:{}".format(
            _utils.EXACT_MAX_N + 1))

        with pytest.raises(_utils.GateError):
            func.truth_table()

    def test_dimension_mismatch(self):
        func = _hypercube.parse_function("majority:3")

        with pytest.raises(ValueError):
            _hypercube.evaluate(func, _hypercube.Point(0, 4))

    @pytest.mark.parametrize("table", ([0, 1, 1], [0, 1, 2, 1]))
    def test_invalid_table(self, table):
        with pytest.raises(ValueError):
            _hypercube.BooleanFunction(n=2, table=np.array(table))


class TestMeasure:
    def test_weights(self):
        measure = _hypercube.ProductMeasure(0.3, 4)
        weights = measure.weights()

        assert np.isclose(weights.sum(), 1.0, rtol=0, atol=1e-15)
        assert np.isclose(_hypercube.measure_weight(
            measure, _hypercube.Point(0b0110, 4)), 0.3**2 * 0.7**2)
        assert np.isclose(weights[0b0110], 0.3**2 * 0.7**2)

    def test_exact_nondegeneracy(self):
        prob, stderr = _hypercube.nondegeneracy(
            _hypercube.parse_function("and:3"), 0.4)

        assert np.isclose(prob, 0.4**3)
        assert stderr == 0.0

    def test_sampled_nondegeneracy(self):
        func = _hypercube.parse_function("dictator:30")
        prob, stderr = _hypercube.nondegeneracy(func, 0.3, trials=20000,
                                                random_state=5)

        assert stderr > 0.0
        assert abs(prob - 0.3) <= 4 * stderr
        assert not func.has_table

    def test_table_above_gate_is_sampled(self):
        n = _utils.EXACT_MAX_N + 1
        func = _hypercube.BooleanFunction(n, table=_utils.all_words(n) & 1)
        prob, stderr = _hypercube.nondegeneracy(func, 0.3, trials=20000,
                                                random_state=2)

        assert stderr > 0.0
        assert abs(prob - 0.3) <= 4 * stderr


class TestMonotonicity:
    @pytest.mark.parametrize("spec, expected", (
        ("majority:5", True),
        ("tribes:6:3", True),
        ("or:4", True),
        ("parity:3", False),
    ))
    def test_families(self, spec, expected):
        assert _hypercube.is_increasing(
            _hypercube.parse_function(spec)) is expected

    def test_random_increasing(self):
        for seed in range(10):
            func = _hypercube.random_function(6, random_state=seed,
                                              increasing=True)
            assert _hypercube.is_increasing(func)

    def test_random_reproducible(self):
        func_a = _hypercube.random_function(8, random_state=12)
        func_b = _hypercube.random_function(8, random_state=12)

        assert np.array_equal(func_a.truth_table(), func_b.truth_table())


class TestTruthTableFile:
    def test_save_and_load(self, tmp_path):
        path = str(tmp_path / "tribes.txt")
        func = _hypercube.parse_function("tribes:6:3")
        _hypercube.save_truth_table(func, path)

        loaded = _hypercube.parse_function("file:" + path)

        assert loaded.n == 6
        assert loaded.family.kind == "custom"
        assert np.array_equal(loaded.truth_table(), func.truth_table())

    @pytest.mark.parametrize("content", (
        "0110\n",
        "n=2\n011\n",
        "n=2\n01a0\n",
        "n=x\n0110\n",
    ))
    def test_malformed(self, tmp_path, content):
        path = tmp_path / "bad.txt"
        path.write_text(content)

        with pytest.raises(ValueError):
            _hypercube.load_truth_table(str(path))
