"""Points, subsets, the p-biased product measure and Boolean functions.

Coordinate ``i`` (1-based) of a point is stored at bit ``i - 1`` of its
integer word, and truth tables are indexed by that little-endian word.
"""
import typing as t
import os

import numpy as np

import hypervol._utils as _utils

VALID_FAMILIES = (
    "dictator",
    "majority",
    "parity",
    "tribes",
    "and",
    "or",
    "custom",
)  # type: t.Tuple[str, ...]

_EVAL_BATCH_CELLS = 1 << 22
"""Upper bound on bits materialized per batch by the family evaluators."""


class BiasParam:
    """Bias ``p`` of the product measure, restricted to the open (0, 1)."""
    __slots__ = ("p", )

    def __init__(self, p: t.Union[float, "BiasParam"]) -> None:
        if isinstance(p, BiasParam):
            p = p.p

        if isinstance(p, bool) or not isinstance(p, (int, float, np.number)):
            raise TypeError("'p' must be a real number (got {})."
                            "".format(type(p)))

        p = float(p)

        if not 0.0 < p < 1.0:
            raise ValueError("'p' must be in the open (0, 1) interval "
                             "(got {}).".format(p))

        self.p = p

    @property
    def sigma(self) -> float:
        """Basis normalization sqrt(p(1 - p))."""
        return float(np.sqrt(self.p * (1.0 - self.p)))

    @property
    def lam(self) -> float:
        """Product identity constant (1 - 2p) / sqrt(p(1 - p))."""
        return (1.0 - 2.0 * self.p) / self.sigma

    def __float__(self) -> float:
        return self.p

    def __eq__(self, other: t.Any) -> bool:
        return isinstance(other, BiasParam) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("BiasParam", self.p))

    def __repr__(self) -> str:
        return "BiasParam(p={!r})".format(self.p)


class _PointBase(t.NamedTuple):
    bits: int
    n: int


def _check_word(bits: int, n: int, name: str) -> None:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise TypeError("'n' must be an integer (got {}).".format(type(n)))

    if n < 1:
        raise ValueError("'n' must be positive (got {}).".format(n))

    if isinstance(bits, bool) or not isinstance(bits, (int, np.integer)):
        raise TypeError("'{}' bits must be an integer (got {})."
                        "".format(name, type(bits)))

    if bits < 0 or int(bits) >> int(n):
        raise ValueError("'{}' bits must fit in {} positions (got {})."
                         "".format(name, n, bits))


class Point(_PointBase):
    """A point x of {0,1}^n stored as an integer word."""
    __slots__ = ()

    def __new__(cls, bits: int, n: int) -> "Point":
        _check_word(bits, n, "Point")
        return super().__new__(cls, int(bits), int(n))

    def coord(self, i: int) -> int:
        """Return x(i)."""
        _utils.check_index(i, self.n)
        return (self.bits >> (i - 1)) & 1

    @property
    def weight(self) -> int:
        """Hamming weight |x|."""
        return bin(self.bits).count("1")

    def to_array(self) -> np.ndarray:
        """Coordinates x(1), ..., x(n) as an uint8 array."""
        return np.array([(self.bits >> k) & 1 for k in range(self.n)],
                        dtype=np.uint8)


class SubsetMask(_PointBase):
    """A subset S of [n] stored as an integer word."""
    __slots__ = ()

    def __new__(cls, bits: int, n: int) -> "SubsetMask":
        _check_word(bits, n, "SubsetMask")
        return super().__new__(cls, int(bits), int(n))

    @classmethod
    def from_indices(cls, indices: t.Iterable[int], n: int) -> "SubsetMask":
        """Build S from its (1-based) elements."""
        bits = 0

        for i in indices:
            _utils.check_index(i, n)
            bits |= 1 << (i - 1)

        return cls(bits, n)

    @property
    def size(self) -> int:
        """Cardinality |S|."""
        return bin(self.bits).count("1")

    def elements(self) -> t.Tuple[int, ...]:
        """Sorted 1-based elements of S."""
        return tuple(pos + 1 for pos in range(self.n) if self.bits >> pos & 1)


class _FamilySpecBase(t.NamedTuple):
    kind: str
    n: int
    tribe_size: t.Optional[int] = None
    path: t.Optional[str] = None


class FamilySpec(_FamilySpecBase):
    """Closed-form description of a Boolean function family member."""
    __slots__ = ()

    def __new__(cls,
                kind: str,
                n: int,
                tribe_size: t.Optional[int] = None,
                path: t.Optional[str] = None) -> "FamilySpec":
        kind = str(kind).lower()

        if kind not in VALID_FAMILIES:
            raise ValueError("Unknown function family '{}'. Please select "
                             "values in {}.".format(kind, VALID_FAMILIES))

        if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
            raise TypeError("'n' must be an integer (got {}).".format(type(n)))

        if n < 1:
            raise ValueError("'n' must be positive (got {}).".format(n))

        if kind == "tribes":
            if tribe_size is None or tribe_size < 1 or n % tribe_size:
                raise ValueError("'tribe_size' must be a positive divisor "
                                 "of n={} (got {}).".format(n, tribe_size))

        if kind == "custom" and not path:
            raise ValueError("'custom' family requires a truth table 'path'.")

        return super().__new__(cls, kind, int(n), tribe_size, path)

    @property
    def label(self) -> str:
        """Short name such as ``tribes_12_4``."""
        if self.kind == "tribes":
            return "tribes_{}_{}".format(self.n, self.tribe_size)

        if self.kind == "custom":
            return "custom_{}".format(os.path.basename(str(self.path)))

        return "{}_{}".format(self.kind, self.n)


def eval_family_bits(spec: FamilySpec, bits: np.ndarray) -> np.ndarray:
    """Evaluate a closed-form family on rows of coordinates.

    Parameters
    ----------
    spec : :obj:`FamilySpec`
        Family member to evaluate. ``custom`` is not closed-form.

    bits : :obj:`np.ndarray`
        Array of shape (m, n) holding x(1), ..., x(n) in each row.

    Returns
    -------
    :obj:`np.ndarray`
        Array of shape (m,) with values in {0, 1}.
    """
    bits = np.asarray(bits, dtype=np.uint8)
    n = spec.n

    if bits.ndim != 2 or bits.shape[1] != n:
        raise ValueError("'bits' must have shape (m, {}) (got {})."
                         "".format(n, bits.shape))

    if spec.kind == "dictator":
        res = bits[:, 0]

    elif spec.kind == "majority":
        # Note: ties (even n, sum = n / 2) go to 1.
        res = 2 * bits.sum(axis=1, dtype=np.int64) >= n

    elif spec.kind == "parity":
        res = bits.sum(axis=1, dtype=np.int64) % 2 == 0

    elif spec.kind == "tribes":
        blocks = bits.reshape(bits.shape[0], n // spec.tribe_size,
                              spec.tribe_size)
        res = blocks.all(axis=2).any(axis=1)

    elif spec.kind == "and":
        res = bits.all(axis=1)

    elif spec.kind == "or":
        res = bits.any(axis=1)

    else:
        raise ValueError("Family '{}' has no closed form evaluator."
                         "".format(spec.kind))

    return np.asarray(res, dtype=np.uint8)


class BooleanFunction:
    """Boolean function f: {0,1}^n -> {0,1}.

    The function is backed by a truth table, by a closed-form family or by
    both. Family-backed functions materialize their truth table lazily.

    Attributes
    ----------
    n : int
        Dimension of the hypercube.

    family : :obj:`FamilySpec` or None
        Closed-form description, if any.

    name : str
        Label used in reports.
    """
    def __init__(self,
                 n: int,
                 table: t.Optional[np.ndarray] = None,
                 family: t.Optional[FamilySpec] = None,
                 name: t.Optional[str] = None) -> None:
        if table is None and family is None:
            raise ValueError("Either 'table' or 'family' must be given.")

        if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
            raise TypeError("'n' must be an integer (got {}).".format(type(n)))

        if n < 1:
            raise ValueError("'n' must be positive (got {}).".format(n))

        if family is not None and family.n != n:
            raise ValueError("Family dimension {} does not match n={}."
                             "".format(family.n, n))

        if family is not None and family.kind == "custom" and table is None:
            raise ValueError("'custom' family requires an explicit table.")

        self.n = int(n)
        self.family = family
        self._table = None  # type: t.Optional[np.ndarray]

        if table is not None:
            table = np.asarray(table)

            if table.shape != (1 << self.n, ):
                raise ValueError("'table' must have length 2^n={} (got "
                                 "shape {}).".format(1 << self.n, table.shape))

            if not np.isin(table, (0, 1)).all():
                raise ValueError("'table' must hold only 0 and 1 values.")

            self._table = table.astype(np.uint8)
            self._table.setflags(write=False)

        if name is None:
            name = family.label if family is not None else "table_{}".format(n)

        self.name = name

    @classmethod
    def from_family(cls, spec: FamilySpec) -> "BooleanFunction":
        """Family-backed function (no table materialized yet)."""
        return cls(n=spec.n, family=spec)

    @property
    def has_table(self) -> bool:
        """True if a truth table is already available."""
        return self._table is not None

    def truth_table(self, max_n: int = _utils.EXACT_MAX_N) -> np.ndarray:
        """Return the read-only truth table, building it if necessary."""
        if self._table is None:
            _utils.check_gate(self.n, max_n, "truth_table")
            words = _utils.all_words(self.n)
            table = np.empty(words.size, dtype=np.uint8)
            batch = max(1, _EVAL_BATCH_CELLS // self.n)

            for start in range(0, words.size, batch):
                chunk = words[start:start + batch]
                bits = ((chunk[:, np.newaxis]
                         >> np.arange(self.n, dtype=np.int64)) & 1)
                table[start:start + batch] = eval_family_bits(
                    self.family, bits)  # type: ignore

            table.setflags(write=False)
            self._table = table

        return self._table

    def evaluate_bits(self, bits: np.ndarray) -> np.ndarray:
        """Evaluate f on rows of coordinates (array of shape (m, n))."""
        bits = np.asarray(bits, dtype=np.uint8)

        if self._table is not None:
            weights = np.left_shift(1, np.arange(self.n, dtype=np.int64))
            return self._table[bits.astype(np.int64) @ weights]

        return eval_family_bits(self.family, bits)  # type: ignore

    def __repr__(self) -> str:
        return "BooleanFunction(name={!r}, n={})".format(self.name, self.n)


class ProductMeasure:
    """The p-biased product measure on {0,1}^n."""
    def __init__(self, p: t.Union[float, BiasParam], n: int) -> None:
        self.p = BiasParam(p)

        if n < 1:
            raise ValueError("'n' must be positive (got {}).".format(n))

        self.n = int(n)

    def weight(self, x: Point) -> float:
        """Return p^|x| (1 - p)^(n - |x|)."""
        if x.n != self.n:
            raise ValueError("Point dimension {} does not match measure "
                             "dimension {}.".format(x.n, self.n))

        ones = x.weight
        return self.p.p**ones * (1.0 - self.p.p)**(self.n - ones)

    def weights(self) -> np.ndarray:
        """Weights of every point, indexed by word (n <= EXACT_MAX_N)."""
        _utils.check_gate(self.n, _utils.EXACT_MAX_N, "weights")
        ones = _utils.popcount(_utils.all_words(self.n))
        return self.p.p**ones * (1.0 - self.p.p)**(self.n - ones)

    def expectation(self, values: np.ndarray) -> float:
        """E_pi of a function given by its values over all points."""
        return _utils.stable_dot(self.weights(), values)

    def sample_bits(self,
                    size: int,
                    random_state: t.Optional[
                        t.Union[int, np.random.Generator]] = None
                    ) -> np.ndarray:
        """Draw ``size`` points as rows of an uint8 array."""
        rng = _utils.check_random_state(random_state)
        return (rng.random((size, self.n)) < self.p.p).astype(np.uint8)


def _check_dims(f: BooleanFunction, x: Point) -> None:
    if x.n != f.n:
        raise ValueError("Point dimension {} does not match function "
                         "dimension {}.".format(x.n, f.n))


def evaluate(f: BooleanFunction, x: Point) -> int:
    """Return f(x) in {0, 1}."""
    _check_dims(f, x)

    if f.has_table:
        return int(f.truth_table()[x.bits])

    return int(eval_family_bits(f.family,  # type: ignore
                                x.to_array()[np.newaxis, :])[0])


def flip_bit(x: Point, i: int) -> Point:
    """Return x xor e_i."""
    _utils.check_index(i, x.n)
    return Point(x.bits ^ (1 << (i - 1)), x.n)


def set_bit(x: Point, i: int, y: int) -> Point:
    """Return x with coordinate ``i`` set to ``y``."""
    _utils.check_index(i, x.n)

    if y not in (0, 1):
        raise ValueError("'y' must be 0 or 1 (got {}).".format(y))

    mask = 1 << (i - 1)
    return Point((x.bits | mask) if y else (x.bits & ~mask), x.n)


def resample_bit(x: Point,
                 i: int,
                 p: t.Union[float, BiasParam],
                 random_state: t.Optional[
                     t.Union[int, np.random.Generator]] = None) -> Point:
    """Replace coordinate ``i`` of ``x`` with an independent Bernoulli(p).

    Parameters
    ----------
    x : :obj:`Point`
        Current state.

    i : int
        Coordinate to resample (1-based).

    p : float or :obj:`BiasParam`
        Bias of the draw. Raw floats may take the degenerate values 0 and 1.

    random_state : int or :obj:`np.random.Generator`, optional
        Source of randomness.

    Returns
    -------
    :obj:`Point`
        The resampled point.
    """
    p_val = float(p)

    if not 0.0 <= p_val <= 1.0:
        raise ValueError("'p' must be in [0, 1] (got {}).".format(p_val))

    rng = _utils.check_random_state(random_state)
    return set_bit(x, i, int(rng.random() < p_val))


def measure_weight(measure: ProductMeasure, x: Point) -> float:
    """Return pi(x) for the given product measure."""
    return measure.weight(x)


def is_increasing(f: BooleanFunction) -> bool:
    """Check f(x) <= f(x') for every covering pair x <= x'."""
    table = f.truth_table(max_n=_utils.INCREASING_CHECK_MAX_N)

    for i in range(1, f.n + 1):
        pairs = table.reshape(_utils.pair_shape(f.n, i))

        if np.any(pairs[:, 0, :] > pairs[:, 1, :]):
            return False

    return True


def nondegeneracy(f: BooleanFunction,
                  p: t.Union[float, BiasParam],
                  trials: int = 100000,
                  random_state: t.Optional[int] = None
                  ) -> t.Tuple[float, float]:
    """Probability P(f(X_0) = 1) under the stationary measure.

    The value is exact (standard error 0) up to the exact-computation
    gate; above it, it is a Monte Carlo estimate, read from the truth
    table when the function carries one.

    Returns
    -------
    tuple of float
        The probability and its standard error.
    """
    measure = ProductMeasure(p, f.n)

    if f.n <= _utils.EXACT_MAX_N:
        return measure.expectation(f.truth_table()), 0.0

    if trials < 2:
        raise ValueError("'trials' must be at least 2 (got {})."
                         "".format(trials))

    rng = _utils.check_random_state(random_state)
    batch = max(1, _EVAL_BATCH_CELLS // f.n)
    hits = 0

    for start in range(0, trials, batch):
        size = min(batch, trials - start)
        hits += int(f.evaluate_bits(measure.sample_bits(size, rng)).sum())

    prob = hits / trials
    return prob, float(np.sqrt(prob * (1.0 - prob) / trials))


def random_function(n: int,
                    random_state: t.Optional[
                        t.Union[int, np.random.Generator]] = None,
                    increasing: bool = False,
                    density: float = 0.5,
                    minterms: t.Optional[int] = None) -> BooleanFunction:
    """Draw a random truth table.

    Increasing functions are the up-closure of ``minterms`` random points
    (default: between 1 and n of them).
    """
    _utils.check_gate(n, _utils.EXACT_MAX_N, "random_function")
    rng = _utils.check_random_state(random_state)

    if not increasing:
        table = (rng.random(1 << n) < density).astype(np.uint8)
        return BooleanFunction(n=n, table=table, name="random_{}".format(n))

    if minterms is None:
        minterms = int(rng.integers(1, n + 1))

    table = np.zeros(1 << n, dtype=np.uint8)
    table[rng.integers(0, 1 << n, size=minterms)] = 1

    for i in range(1, n + 1):
        pairs = table.reshape(_utils.pair_shape(n, i))
        pairs[:, 1, :] |= pairs[:, 0, :]

    return BooleanFunction(n=n, table=table,
                           name="random_increasing_{}".format(n))


def load_truth_table(path: str) -> BooleanFunction:
    """Load a truth table file.

    The first line reads ``n=<int>``; the second holds 2^n characters in
    {'0', '1'}, in little-endian point order.
    """
    with open(path, "r") as fh:
        lines = [line.strip() for line in fh if line.strip()]

    if len(lines) != 2 or not lines[0].startswith("n="):
        raise ValueError("Malformed truth table file '{}': expecting an "
                         "'n=<int>' line followed by the table.".format(path))

    try:
        n = int(lines[0][2:])

    except ValueError:
        raise ValueError("Malformed dimension line '{}' in '{}'."
                         "".format(lines[0], path))

    if not 1 <= n <= _utils.INCREASING_CHECK_MAX_N:
        raise ValueError("Truth table dimension must be in [1, {}] "
                         "(got {}).".format(_utils.INCREASING_CHECK_MAX_N, n))

    if len(lines[1]) != 1 << n:
        raise ValueError("Truth table in '{}' has length {}; expecting "
                         "2^{}={}.".format(path, len(lines[1]), n, 1 << n))

    if set(lines[1]) - {"0", "1"}:
        raise ValueError("Truth table in '{}' holds characters other than "
                         "'0' and '1'.".format(path))

    table = np.frombuffer(lines[1].encode("ascii"), dtype=np.uint8) - ord("0")
    spec = FamilySpec("custom", n, path=path)

    return BooleanFunction(n=n, table=table, family=spec)


def save_truth_table(f: BooleanFunction, path: str) -> None:
    """Write ``f`` in the truth table file format."""
    table = f.truth_table(max_n=_utils.INCREASING_CHECK_MAX_N)

    with open(path, "w") as fh:
        fh.write("n={}\n".format(f.n))
        fh.write((table + ord("0")).astype(np.uint8).tobytes().decode("ascii"))
        fh.write("\n")


def parse_function(spec: str) -> BooleanFunction:
    """Build a function from strings like ``majority:9`` or ``tribes:12:4``.

    Accepted kinds: ``dictator:n``, ``majority:n``, ``parity:n``,
    ``tribes:n:w``, ``and:n``, ``or:n`` and ``file:<path>``.
    """
    if not isinstance(spec, str) or ":" not in spec:
        raise ValueError("Function spec must look like 'kind:n' (got {!r})."
                         "".format(spec))

    kind, _, rest = spec.partition(":")
    kind = kind.strip().lower()

    if kind == "file":
        return load_truth_table(rest)

    fields = rest.split(":")

    try:
        params = [int(val) for val in fields]

    except ValueError:
        raise ValueError("Function spec parameters must be integers "
                         "(got {!r}).".format(spec))

    if kind == "tribes":
        if len(params) != 2:
            raise ValueError("Tribes spec must be 'tribes:n:w' (got {!r})."
                             "".format(spec))

        family = FamilySpec(kind, params[0], tribe_size=params[1])

    else:
        if len(params) != 1:
            raise ValueError("Spec '{}' takes a single dimension (got {!r})."
                             "".format(kind, spec))

        family = FamilySpec(kind, params[0])

    return BooleanFunction.from_family(family)
