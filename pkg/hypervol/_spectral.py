"""The p-biased Fourier-Walsh basis and its fast transform.

The transform runs one butterfly stage per coordinate. At coordinate ``i``
the pair (v0, v1) of values with x(i) = 0 and x(i) = 1 is replaced by
((1 - p) v0 + p v1, sigma (v1 - v0)), with sigma = sqrt(p(1 - p)); the
inverse stage maps (a, b) back to (a - (p / sigma) b, a + ((1 - p) / sigma) b).
"""
import typing as t

import numpy as np
import pandas as pd

import hypervol._utils as _utils
import hypervol._hypercube as _hypercube

TypeFunctionLike = t.Union[_hypercube.BooleanFunction, np.ndarray]
"""A Boolean function or the vector of its values over all points."""


class BasisScale(t.NamedTuple):
    """Normalizing constants of the basis."""
    sigma: float
    lam: float


def basis_scale(p: t.Union[float, _hypercube.BiasParam]) -> BasisScale:
    """Return sigma = sqrt(p(1 - p)) and lambda = (1 - 2p) / sigma."""
    bias = _hypercube.BiasParam(p)
    return BasisScale(sigma=bias.sigma, lam=bias.lam)


class Spectrum:
    """Dense table S -> f_hat(S) indexed by subset word.

    Attributes
    ----------
    n : int
        Dimension.

    p : :obj:`BiasParam`
        Bias of the basis.

    coeffs : :obj:`np.ndarray`
        Read-only coefficients of length 2^n.
    """
    def __init__(self,
                 n: int,
                 p: t.Union[float, _hypercube.BiasParam],
                 coeffs: np.ndarray) -> None:
        coeffs = np.array(coeffs, dtype=float)

        if coeffs.shape != (1 << n, ):
            raise ValueError("'coeffs' must have length 2^n={} (got shape "
                             "{}).".format(1 << n, coeffs.shape))

        coeffs.setflags(write=False)

        self.n = int(n)
        self.p = _hypercube.BiasParam(p)
        self.coeffs = coeffs

    def __getitem__(self,
                    subset: t.Union[int, _hypercube.SubsetMask]) -> float:
        if isinstance(subset, _hypercube.SubsetMask):
            if subset.n != self.n:
                raise ValueError("Subset dimension {} does not match "
                                 "spectrum dimension {}.".format(
                                     subset.n, self.n))

            subset = subset.bits

        return float(self.coeffs[subset])

    @property
    def mean(self) -> float:
        """f_hat(empty set) = E_pi[f]."""
        return float(self.coeffs[0])

    @property
    def variance(self) -> float:
        """Sum of the squared non-empty coefficients."""
        return _utils.stable_sum(self.coeffs[1:]**2)

    def __repr__(self) -> str:
        return "Spectrum(n={}, p={})".format(self.n, self.p.p)


def _num_vars(size: int) -> int:
    n = int(size).bit_length() - 1

    if size < 2 or 1 << n != size:
        raise ValueError("Vector length must be a power of two >= 2 "
                         "(got {}).".format(size))

    return n


def walsh_transform(values: np.ndarray,
                    p: t.Union[float, _hypercube.BiasParam]) -> np.ndarray:
    """Coefficients E_pi[v chi_S] of real vectors over {0,1}^n.

    The last axis of ``values`` indexes the points; leading axes are
    transformed independently.
    """
    bias = _hypercube.BiasParam(p)
    sigma = bias.sigma

    res = np.array(values, dtype=float)
    n = _num_vars(res.shape[-1])
    lead = res.shape[:-1]

    for i in range(1, n + 1):
        view = res.reshape(lead + _utils.pair_shape(n, i))
        low = view[..., 0, :].copy()
        high = view[..., 1, :]
        view[..., 0, :] = (1.0 - bias.p) * low + bias.p * high
        view[..., 1, :] = sigma * (high - low)

    return res


def inverse_walsh_transform(
        coeffs: np.ndarray,
        p: t.Union[float, _hypercube.BiasParam]) -> np.ndarray:
    """Pointwise values sum_S coeffs(S) chi_S(x) of a coefficient vector."""
    bias = _hypercube.BiasParam(p)
    sigma = bias.sigma

    res = np.array(coeffs, dtype=float)
    n = _num_vars(res.shape[-1])
    lead = res.shape[:-1]

    for i in range(1, n + 1):
        view = res.reshape(lead + _utils.pair_shape(n, i))
        low = view[..., 0, :].copy()
        high = view[..., 1, :].copy()
        view[..., 0, :] = low - (bias.p / sigma) * high
        view[..., 1, :] = low + ((1.0 - bias.p) / sigma) * high

    return res


def chi_eval(subset: _hypercube.SubsetMask,
             x: _hypercube.Point,
             p: t.Union[float, _hypercube.BiasParam]) -> float:
    """Evaluate chi_S(x) = prod_{i in S} (x(i) - p) / sqrt(p(1 - p))."""
    if subset.n != x.n:
        raise ValueError("Subset dimension {} does not match point "
                         "dimension {}.".format(subset.n, x.n))

    bias = _hypercube.BiasParam(p)
    res = 1.0

    for i in subset.elements():
        res *= (x.coord(i) - bias.p) / bias.sigma

    return res


def chi_vector(subset: t.Union[int, _hypercube.SubsetMask],
               n: int,
               p: t.Union[float, _hypercube.BiasParam]) -> np.ndarray:
    """Values of chi_S over every point of {0,1}^n."""
    if isinstance(subset, _hypercube.SubsetMask):
        subset = subset.bits

    _utils.check_gate(n, _utils.EXACT_MAX_N, "chi_vector")
    bias = _hypercube.BiasParam(p)

    factors = np.array([-bias.p / bias.sigma, (1.0 - bias.p) / bias.sigma])
    words = _utils.all_words(n)
    res = np.ones(words.size, dtype=float)

    for pos in range(n):
        if subset >> pos & 1:
            res *= factors[(words >> pos) & 1]

    return res


def transform(f: _hypercube.BooleanFunction,
              p: t.Union[float, _hypercube.BiasParam]) -> Spectrum:
    """Spectrum f_hat(S) = E_pi[f chi_S] of a Boolean function.

    Parameters
    ----------
    f : :obj:`BooleanFunction`
        Function with a truth table or a closed form, n <= EXACT_MAX_N.

    p : float or :obj:`BiasParam`
        Bias of the product measure.

    Returns
    -------
    :obj:`Spectrum`
        All 2^n coefficients, computed in O(n 2^n) time.
    """
    _utils.check_gate(f.n, _utils.EXACT_MAX_N, "transform")
    table = f.truth_table()
    return Spectrum(n=f.n, p=p, coeffs=walsh_transform(table, p))


def inverse_transform(spectrum: Spectrum,
                      atol: float = 1e-6) -> _hypercube.BooleanFunction:
    """Rebuild the Boolean function whose spectrum is ``spectrum``.

    Raises ``ValueError`` when some reconstructed value is farther than
    ``atol`` from {0, 1}.
    """
    values = inverse_walsh_transform(spectrum.coeffs, spectrum.p)
    table = np.rint(values)
    deviation = float(np.max(np.abs(values - table)))

    if deviation > atol or not np.isin(table, (0.0, 1.0)).all():
        raise ValueError("Corrupted spectrum: reconstruction is {:.3e} away "
                         "from a Boolean function.".format(deviation))

    return _hypercube.BooleanFunction(n=spectrum.n,
                                      table=table.astype(np.uint8),
                                      name="inverse_{}".format(spectrum.n))


def _as_values(func: TypeFunctionLike) -> np.ndarray:
    if isinstance(func, _hypercube.BooleanFunction):
        return func.truth_table().astype(float)

    return np.asarray(func, dtype=float)


def inner_product(f: TypeFunctionLike,
                  g: TypeFunctionLike,
                  p: t.Union[float, _hypercube.BiasParam]) -> float:
    """Return <f, g> = E_pi[f g]."""
    f_vals, g_vals = _as_values(f), _as_values(g)

    if f_vals.shape != g_vals.shape:
        raise ValueError("Functions must share the dimension (got shapes "
                         "{} and {}).".format(f_vals.shape, g_vals.shape))

    measure = _hypercube.ProductMeasure(p, _num_vars(f_vals.size))
    return measure.expectation(f_vals * g_vals)


def overlap_pairs(subset: int,
                  n: int) -> t.Tuple[np.ndarray, np.ndarray, np.ndarray,
                                     np.ndarray]:
    """Every pair (T, T') with T xor T' <= S <= T | T'.

    Inside S each element lies in both sets, in T only or in T' only;
    outside S both sets share a common part U.

    Returns
    -------
    tuple of :obj:`np.ndarray`
        Arrays T, T', |S & T & T'| and |T & T'|, one entry per pair.
    """
    complement = ((1 << n) - 1) ^ subset
    outside = _utils.submasks(complement)
    outside_size = _utils.popcount(outside)

    t_in, tp_in, common_in = [], [], []

    for both in _utils.submasks(subset):
        rest = subset ^ int(both)
        only_t = _utils.submasks(rest)
        t_in.append(both | only_t)
        tp_in.append(both | (rest ^ only_t))
        common_in.append(np.full(only_t.size, bin(int(both)).count("1")))

    t_part = np.concatenate(t_in)
    tp_part = np.concatenate(tp_in)
    common = np.concatenate(common_in)

    t_all = (t_part[:, np.newaxis] | outside[np.newaxis, :]).ravel()
    tp_all = (tp_part[:, np.newaxis] | outside[np.newaxis, :]).ravel()
    k_in = np.repeat(common, outside.size)
    k_both = (common[:, np.newaxis] + outside_size[np.newaxis, :]).ravel()

    return t_all, tp_all, k_in, k_both


def _coeffs_of(func: t.Union[_hypercube.BooleanFunction, Spectrum],
               p: _hypercube.BiasParam) -> np.ndarray:
    if isinstance(func, Spectrum):
        if func.p != p:
            raise ValueError("Spectrum bias {} does not match p={}."
                             "".format(func.p.p, p.p))
        return func.coeffs

    return transform(func, p).coeffs


def product_coefficient(f: t.Union[_hypercube.BooleanFunction, Spectrum],
                        g: t.Union[_hypercube.BooleanFunction, Spectrum],
                        subset: _hypercube.SubsetMask,
                        p: t.Union[float, _hypercube.BiasParam]) -> float:
    """Coefficient <fg, chi_S> through the spectra of ``f`` and ``g``.

    Evaluates sum f_hat(T) g_hat(T') lambda^|S & T & T'| over the pairs with
    T xor T' <= S <= T | T'.
    """
    bias = _hypercube.BiasParam(p)
    _utils.check_gate(subset.n, _utils.GENERAL_ROUTE_MAX_N,
                      "product_coefficient")

    f_hat, g_hat = _coeffs_of(f, bias), _coeffs_of(g, bias)

    if f_hat.size != 1 << subset.n or g_hat.size != 1 << subset.n:
        raise ValueError("Spectra dimension does not match subset "
                         "dimension {}.".format(subset.n))

    t_all, tp_all, k_in, _ = overlap_pairs(subset.bits, subset.n)
    terms = f_hat[t_all] * g_hat[tp_all] * np.power(bias.lam, k_in)

    return _utils.stable_sum(terms)


def tri_product_expectation(s_mask: _hypercube.SubsetMask,
                            t_mask: _hypercube.SubsetMask,
                            r_mask: _hypercube.SubsetMask,
                            p: t.Union[float, _hypercube.BiasParam]) -> float:
    """Return E_pi[chi_S chi_T chi_R] in closed form."""
    if not s_mask.n == t_mask.n == r_mask.n:
        raise ValueError("Subsets must share the dimension.")

    bias = _hypercube.BiasParam(p)
    common = s_mask.bits & t_mask.bits & r_mask.bits

    if s_mask.bits ^ t_mask.bits ^ r_mask.bits != common:
        return 0.0

    return bias.lam**bin(common).count("1")


def pair_product_expand(s_mask: _hypercube.SubsetMask,
                        t_mask: _hypercube.SubsetMask,
                        x: _hypercube.Point,
                        p: t.Union[float, _hypercube.BiasParam]) -> float:
    """Evaluate chi_{S xor T}(x) prod_{i in S & T} (1 + lambda chi_i(x))."""
    if not s_mask.n == t_mask.n == x.n:
        raise ValueError("Subsets and point must share the dimension.")

    bias = _hypercube.BiasParam(p)
    n = x.n

    res = chi_eval(_hypercube.SubsetMask(s_mask.bits ^ t_mask.bits, n), x,
                   bias)

    for i in _hypercube.SubsetMask(s_mask.bits & t_mask.bits, n).elements():
        single = _hypercube.SubsetMask(1 << (i - 1), n)
        res *= 1.0 + bias.lam * chi_eval(single, x, bias)

    return res


def direct_derivative(f: _hypercube.BooleanFunction, i: int) -> np.ndarray:
    """D_i f(x) = f(x with x(i)=1) - f(x with x(i)=0) over every point."""
    _utils.check_index(i, f.n)
    pairs = f.truth_table().astype(float).reshape(_utils.pair_shape(f.n, i))
    diff = pairs[:, 1, :] - pairs[:, 0, :]
    return np.stack((diff, diff), axis=1).ravel()


def derivative_expansion(f: t.Union[_hypercube.BooleanFunction, Spectrum],
                         i: int,
                         p: t.Union[float, _hypercube.BiasParam]
                         ) -> np.ndarray:
    """D_i f through the spectrum: (1/sigma) sum_{T not containing i}
    f_hat(T + {i}) chi_T(x), evaluated at every point."""
    bias = _hypercube.BiasParam(p)
    coeffs = _coeffs_of(f, bias)
    n = _num_vars(coeffs.size)
    _utils.check_index(i, n)

    shifted = np.zeros_like(coeffs)
    src = coeffs.reshape(_utils.pair_shape(n, i))
    shifted.reshape(_utils.pair_shape(n, i))[:, 0, :] = src[:, 1, :]

    return inverse_walsh_transform(shifted, bias) / bias.sigma


def level_weights(spectrum: Spectrum) -> np.ndarray:
    """Spectral weight sum_{|S|=k} f_hat(S)^2 for k = 0, ..., n."""
    sizes = _utils.popcount(_utils.all_words(spectrum.n))
    return np.bincount(sizes, weights=spectrum.coeffs**2,
                       minlength=spectrum.n + 1)


def noise_stability(spectrum: Spectrum, rho: float) -> float:
    """Return sum_S rho^|S| f_hat(S)^2."""
    if not -1.0 <= rho <= 1.0:
        raise ValueError("'rho' must be in [-1, 1] (got {}).".format(rho))

    weights = level_weights(spectrum)
    return _utils.stable_dot(np.power(rho, np.arange(weights.size)), weights)


def _subset_label(word: int, n: int) -> str:
    elements = _hypercube.SubsetMask(int(word), n).elements()
    return "{" + ",".join(map(str, elements)) + "}"


def spectrum_frame(spectrum: Spectrum,
                   nonzero_only: bool = False,
                   atol: float = 1e-15) -> pd.DataFrame:
    """Spectrum as a table with ``n``, ``p``, ``mask``, ``subset`` and
    ``coefficient`` columns.

    With ``nonzero_only``, coefficients whose magnitude is at most ``atol``
    are dropped. The empty-set row is always kept, so a written table
    still names its dimension and bias when every coefficient is zero.
    """
    words = _utils.all_words(spectrum.n)

    if nonzero_only:
        keep = np.abs(spectrum.coeffs) > atol
        keep[0] = True
        words = words[keep]

    return pd.DataFrame({
        "n": spectrum.n,
        "p": float(spectrum.p),
        "mask": ["0x{:x}".format(int(w)) for w in words],
        "subset": [_subset_label(w, spectrum.n) for w in words],
        "coefficient": spectrum.coeffs[words],
    }, columns=["n", "p", "mask", "subset", "coefficient"])


def save_spectrum_csv(spectrum: Spectrum,
                      path: str,
                      nonzero_only: bool = False,
                      atol: float = 1e-15) -> None:
    """Write the spectrum CSV (17 significant digits)."""
    spectrum_frame(spectrum, nonzero_only=nonzero_only, atol=atol).to_csv(
        path, index=False, float_format="%.17g")


def _single_value(frame: pd.DataFrame, column: str, path: str) -> t.Any:
    values = frame[column].unique()

    if values.size != 1:
        raise ValueError("Column '{}' of spectrum file '{}' must hold a "
                         "single value (got {}).".format(column, path,
                                                         values.tolist()))

    return values[0]


def load_spectrum_csv(path: str,
                      p: t.Optional[t.Union[float,
                                            _hypercube.BiasParam]] = None,
                      n: t.Optional[int] = None) -> Spectrum:
    """Read a spectrum CSV back; missing masks are zero coefficients.

    Dimension and bias come from the ``n`` and ``p`` columns. Values given
    as arguments must agree with them. Tables without an ``n`` column are
    accepted only if ``n`` is given or if they list every mask.
    """
    frame = pd.read_csv(path, dtype={"mask": str, "subset": str})

    missing = {"mask", "subset", "coefficient"}.difference(frame.columns)

    if missing or frame.empty:
        raise ValueError("Spectrum file '{}' lacks columns {} or rows."
                         "".format(path, sorted(missing)))

    words = np.array([int(val, 16) for val in frame["mask"]], dtype=np.int64)

    if "n" in frame.columns:
        file_n = int(_single_value(frame, "n", path))

        if n is not None and n != file_n:
            raise ValueError("'n' must match the file dimension {} (got {})."
                             "".format(file_n, n))

        n = file_n

    elif n is None:
        if not np.array_equal(np.sort(words), np.arange(words.size)):
            raise ValueError("Spectrum file '{}' has no 'n' column and does "
                             "not list every mask; pass 'n'.".format(path))

        n = _num_vars(words.size)

    if "p" in frame.columns:
        file_p = float(_single_value(frame, "p", path))

        if p is not None and not np.isclose(float(p), file_p, rtol=0,
                                            atol=1e-15):
            raise ValueError("'p' must match the file bias {} (got {})."
                             "".format(file_p, float(p)))

        p = file_p

    elif p is None:
        raise ValueError("Spectrum file '{}' has no 'p' column; pass 'p'."
                         "".format(path))

    if words.max() >= 1 << n:
        raise ValueError("Mask {} does not fit dimension n={}."
                         "".format(hex(int(words.max())), n))

    coeffs = np.zeros(1 << n, dtype=float)
    coeffs[words] = frame["coefficient"].to_numpy(dtype=float)

    return Spectrum(n=n, p=p, coeffs=coeffs)
