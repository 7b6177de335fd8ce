"""Matrix-free jump-chain operators, sensitivity and influences.

``Q_n`` is the transition matrix of the jump chain: a uniformly chosen
coordinate is resampled from Bernoulli(p). ``Q_df`` keeps only the moves
across boundary edges of ``f`` (edges where ``f`` changes value) and
``Q_f = Q_n - Q_df``. Every operator is applied in O(n 2^n) time.
"""
import typing as t

import numpy as np

import hypervol._utils as _utils
import hypervol._hypercube as _hypercube
import hypervol._spectral as _spectral

VALID_OPERATORS = ("qn", "qdf", "qf")  # type: t.Tuple[str, ...]


def _stay_weights(p: float) -> np.ndarray:
    """Weight of resampling coordinate i to its current value x(i)."""
    return np.array([1.0 - p, p])


def _move_weights(p: float) -> np.ndarray:
    """Weight of resampling coordinate i to 1 - x(i)."""
    return np.array([p, 1.0 - p])


def boundary_masks(f: _hypercube.BooleanFunction) -> t.List[np.ndarray]:
    """For each coordinate, where f(x) differs from f(x xor e_i).

    Entry ``i - 1`` has shape (2^(n-i), 1, 2^(i-1)), ready to broadcast over
    the pair view of coordinate ``i``.
    """
    table = f.truth_table()
    masks = []

    for i in range(1, f.n + 1):
        pairs = table.reshape(_utils.pair_shape(f.n, i))
        masks.append(pairs[:, :1, :] != pairs[:, 1:, :])

    return masks


class OperatorHandle:
    """Matrix-free application of Q_n, Q_df or Q_f.

    Attributes
    ----------
    f : :obj:`BooleanFunction` or None
        Function defining the boundary. Not needed for ``qn``.

    p : :obj:`BiasParam`
        Bias of the resampling.

    n : int
        Dimension.

    kind : str
        One of ``qn``, ``qdf`` or ``qf``.
    """
    def __init__(self,
                 kind: str,
                 p: t.Union[float, _hypercube.BiasParam],
                 n: t.Optional[int] = None,
                 f: t.Optional[_hypercube.BooleanFunction] = None,
                 masks: t.Optional[t.List[np.ndarray]] = None) -> None:
        kind = str(kind).lower()

        if kind not in VALID_OPERATORS:
            raise ValueError("Unknown operator '{}'. Please select values "
                             "in {}.".format(kind, VALID_OPERATORS))

        if kind != "qn" and f is None:
            raise ValueError("Operator '{}' requires a function.".format(kind))

        if n is None:
            if f is None:
                raise ValueError("Either 'n' or 'f' must be given.")
            n = f.n

        if f is not None and f.n != n:
            raise ValueError("Function dimension {} does not match n={}."
                             "".format(f.n, n))

        _utils.check_gate(n, _utils.EXACT_MAX_N, "operator")

        self.kind = kind
        self.p = _hypercube.BiasParam(p)
        self.n = int(n)
        self.f = f

        self._masks = None  # type: t.Optional[t.List[np.ndarray]]

        if kind != "qn":
            self._masks = masks if masks is not None else boundary_masks(f)

    def apply(self, values: np.ndarray) -> np.ndarray:
        """Return Q v; leading axes of ``values`` are batch axes."""
        values = np.asarray(values, dtype=float)

        if values.shape[-1] != 1 << self.n:
            raise ValueError("Vector length must be 2^n={} (got {})."
                             "".format(1 << self.n, values.shape[-1]))

        lead = values.shape[:-1]
        res = np.zeros(values.shape, dtype=float)
        stay = _stay_weights(self.p.p)[:, np.newaxis]
        move = _move_weights(self.p.p)[:, np.newaxis]

        for i in range(1, self.n + 1):
            shape = lead + _utils.pair_shape(self.n, i)
            view = values.reshape(shape)
            out = res.reshape(shape)
            flipped = view[..., ::-1, :]

            if self.kind == "qn":
                out += stay * view + move * flipped

            elif self.kind == "qdf":
                out += move * np.where(self._masks[i - 1], flipped, 0.0)

            else:
                out += stay * view + move * np.where(self._masks[i - 1],
                                                     0.0, flipped)

        res /= self.n

        return res

    def __repr__(self) -> str:
        return "OperatorHandle(kind={!r}, n={}, p={})".format(
            self.kind, self.n, self.p.p)


def apply(handle: OperatorHandle, values: np.ndarray) -> np.ndarray:
    """Apply the operator held by ``handle`` to ``values``."""
    return handle.apply(values)


def eigen_residual(subset: _hypercube.SubsetMask,
                   p: t.Union[float, _hypercube.BiasParam]) -> float:
    """Sup norm of (Q_n - I) chi_S + (|S| / n) chi_S."""
    _utils.check_gate(subset.n, _utils.EIGEN_CHECK_MAX_N, "eigen_residual")

    chi = _spectral.chi_vector(subset, subset.n, p)
    q_chi = OperatorHandle("qn", p, n=subset.n).apply(chi)
    res = q_chi - chi + (subset.size / subset.n) * chi

    return float(np.max(np.abs(res)))


def sensitivity_function(f: _hypercube.BooleanFunction,
                         p: t.Union[float, _hypercube.BiasParam],
                         masks: t.Optional[t.List[np.ndarray]] = None
                         ) -> np.ndarray:
    """Q_df applied to the all-ones vector.

    At x the value is (1/n) sum_i (p (1 - x(i)) + (1 - p) x(i)) times the
    indicator of f(x) != f(x xor e_i).
    """
    _utils.check_gate(f.n, _utils.EXACT_MAX_N, "sensitivity_function")
    bias = _hypercube.BiasParam(p)

    if masks is None:
        masks = boundary_masks(f)

    move = _move_weights(bias.p)[:, np.newaxis]
    res = np.zeros(1 << f.n, dtype=float)

    for i, mask in enumerate(masks, 1):
        res.reshape(_utils.pair_shape(f.n, i))[...] += move * mask

    return res / f.n


def reversibility_residual(p: t.Union[float, _hypercube.BiasParam],
                           n: int) -> float:
    """Largest violation of pi(x xor e_i) w(x xor e_i) = pi(x) w(x).

    Here w(x) = p (1 - x(i)) + (1 - p) x(i) is the move weight.
    """
    measure = _hypercube.ProductMeasure(p, n)
    weights = measure.weights()
    move = _move_weights(measure.p.p)[:, np.newaxis]
    res = 0.0

    for i in range(1, n + 1):
        flow = weights.reshape(_utils.pair_shape(n, i)) * move
        res = max(res, float(np.max(np.abs(flow[:, 0, :] - flow[:, 1, :]))))

    return res


class InfluenceProfile(t.NamedTuple):
    """Per-bit influences, their total and their sum of squares.

    ``normalized`` holds I_i / (2p(1 - p)), the flip-influence convention.
    ``stderr`` holds standard errors in sample mode, None when exact.
    """
    per_bit: np.ndarray
    total: float
    sq_sum: float
    normalized: np.ndarray
    stderr: t.Optional[np.ndarray] = None


def _make_profile(per_bit: np.ndarray,
                  p: float,
                  stderr: t.Optional[np.ndarray] = None) -> InfluenceProfile:
    per_bit.setflags(write=False)
    return InfluenceProfile(per_bit=per_bit,
                            total=_utils.stable_sum(per_bit),
                            sq_sum=_utils.stable_sum(per_bit**2),
                            normalized=per_bit / (2.0 * p * (1.0 - p)),
                            stderr=stderr)


def influence_profile(f: _hypercube.BooleanFunction,
                      p: t.Union[float, _hypercube.BiasParam],
                      method: str = "exact",
                      trials: int = 100000,
                      random_state: t.Optional[
                          t.Union[int, np.random.Generator]] = None,
                      masks: t.Optional[t.List[np.ndarray]] = None
                      ) -> InfluenceProfile:
    """Influence I_i(f): probability that resampling bit ``i`` changes f.

    Parameters
    ----------
    f : :obj:`BooleanFunction`
        Function to analyze.

    p : float or :obj:`BiasParam`
        Bias of the stationary measure.

    method : str, optional
        ``exact`` sums E[(p (1 - x(i)) + (1 - p) x(i)) (D_i f(x))^2] over
        all points (n <= EXACT_MAX_N). ``sample`` draws X ~ pi, resamples a
        uniformly chosen coordinate and records whether f changed.

    trials : int, optional
        Number of draws in ``sample`` mode.

    random_state : int or :obj:`np.random.Generator`, optional
        Source of randomness in ``sample`` mode.

    Returns
    -------
    :obj:`InfluenceProfile`
        Per-bit influences, total influence I(f) and sum of squares.
    """
    bias = _hypercube.BiasParam(p)

    if method == "exact":
        _utils.check_gate(f.n, _utils.EXACT_MAX_N, "influence_profile")

        if masks is None:
            masks = boundary_masks(f)

        weights = _hypercube.ProductMeasure(bias, f.n).weights()
        move = _move_weights(bias.p)[:, np.newaxis]
        per_bit = np.array([
            _utils.stable_sum(
                weights.reshape(_utils.pair_shape(f.n, i)) * move * mask)
            for i, mask in enumerate(masks, 1)
        ])

        return _make_profile(per_bit, bias.p)

    if method != "sample":
        raise ValueError("'method' must be 'exact' or 'sample' (got {})."
                         "".format(method))

    if trials < 2:
        raise ValueError("'trials' must be at least 2 (got {})."
                         "".format(trials))

    rng = _utils.check_random_state(random_state)
    measure = _hypercube.ProductMeasure(bias, f.n)
    changes = np.zeros(f.n, dtype=np.int64)
    draws = np.zeros(f.n, dtype=np.int64)
    batch = max(1, (1 << 22) // f.n)

    for start in range(0, trials, batch):
        size = min(batch, trials - start)
        bits = measure.sample_bits(size, rng)
        coords = rng.integers(0, f.n, size=size)
        before = f.evaluate_bits(bits)
        rows = np.arange(size)
        bits[rows, coords] = rng.random(size) < bias.p
        after = f.evaluate_bits(bits)

        np.add.at(draws, coords, 1)
        np.add.at(changes, coords, (before != after).astype(np.int64))

    with np.errstate(invalid="ignore", divide="ignore"):
        per_bit = np.where(draws > 0, changes / np.maximum(draws, 1), np.nan)
        stderr = np.sqrt(per_bit * (1.0 - per_bit) / np.maximum(draws, 1))

    return _make_profile(per_bit, bias.p, stderr=stderr)


def is_regular(f: _hypercube.BooleanFunction,
               p: t.Union[float, _hypercube.BiasParam],
               atol: float = 1e-10) -> bool:
    """True when every coordinate influence is equal within ``atol``."""
    per_bit = influence_profile(f, p).per_bit
    return bool(np.ptp(per_bit) <= atol)


def pairing_all(f: _hypercube.BooleanFunction,
                p: t.Union[float, _hypercube.BiasParam],
                sensitivity: t.Optional[np.ndarray] = None) -> np.ndarray:
    """pi^T Q_df chi_S for every S, as one transform of Q_df 1."""
    if sensitivity is None:
        sensitivity = sensitivity_function(f, p)

    return _spectral.walsh_transform(sensitivity, p)


class PairingReport(t.NamedTuple):
    """The pairing pi^T Q_df chi_S by every applicable route.

    ``monotone`` is None for non-increasing functions and ``general`` is
    None above ``GENERAL_ROUTE_MAX_N``.
    """
    subset: _hypercube.SubsetMask
    direct: float
    sensitivity: float
    monotone: t.Optional[float]
    general: t.Optional[float]

    def routes(self) -> t.Dict[str, float]:
        """Present routes by name."""
        return {
            name: getattr(self, name)
            for name in ("direct", "sensitivity", "monotone", "general")
            if getattr(self, name) is not None
        }

    def max_residual(self) -> float:
        """Largest absolute difference between two present routes."""
        vals = np.fromiter(self.routes().values(), dtype=float)
        return float(np.ptp(vals)) if vals.size > 1 else 0.0


def pairing_increasing(coeffs: np.ndarray,
                       subset: int,
                       n: int,
                       p: t.Union[float, _hypercube.BiasParam]) -> float:
    """Fourier form of the pairing, valid for increasing functions.

    (1/n) [(1 - 2p) |S| f_hat(S) + 2 sigma sum_{i not in S} f_hat(S + {i})].
    """
    bias = _hypercube.BiasParam(p)
    size = bin(subset).count("1")
    above = [coeffs[subset | (1 << pos)]
             for pos in range(n) if not subset >> pos & 1]

    bracket = ((1.0 - 2.0 * bias.p) * size * coeffs[subset]
               + 2.0 * bias.sigma * _utils.stable_sum(above))

    return bracket / n


def pairing_general(coeffs: np.ndarray,
                    subset: int,
                    n: int,
                    p: t.Union[float, _hypercube.BiasParam]) -> float:
    """Double-subset form of the pairing, valid for every function.

    Sums f_hat(T) f_hat(T') lambda^|S & T & T'| w(T, T') / n over the
    pairs with T xor T' <= S <= T | T', where the weight is
    w(T, T') = 2 |T & T'| - |S & T & T'|.
    """
    bias = _hypercube.BiasParam(p)
    t_all, tp_all, k_in, k_both = _spectral.overlap_pairs(subset, n)
    terms = (coeffs[t_all] * coeffs[tp_all] * np.power(bias.lam, k_in)
             * (2 * k_both - k_in))

    return _utils.stable_sum(terms) / n


def boundary_pairing(f: _hypercube.BooleanFunction,
                     subset: _hypercube.SubsetMask,
                     p: t.Union[float, _hypercube.BiasParam],
                     atol: float = 1e-9,
                     strict: bool = False,
                     increasing: t.Optional[bool] = None) -> PairingReport:
    """Compute pi^T Q_df chi_S by four independent routes.

    Parameters
    ----------
    f : :obj:`BooleanFunction`
        Function defining the boundary, n <= PAIRING_MAX_N.

    subset : :obj:`SubsetMask`
        The set S.

    p : float or :obj:`BiasParam`
        Bias.

    atol : float, optional
        Tolerance for the agreement check.

    strict : bool, optional
        If True, raise ``RouteMismatchError`` when routes disagree beyond
        ``atol``.

    increasing : bool, optional
        Known monotonicity of ``f``; computed when not given.

    Returns
    -------
    :obj:`PairingReport`
        Direct application of Q_df, the inner product with Q_df 1, the
        increasing-only Fourier form and the general double-subset form.
    """
    bias = _hypercube.BiasParam(p)
    n = f.n

    if subset.n != n:
        raise ValueError("Subset dimension {} does not match function "
                         "dimension {}.".format(subset.n, n))

    _utils.check_gate(n, _utils.PAIRING_MAX_N, "boundary_pairing")

    masks = boundary_masks(f)
    weights = _hypercube.ProductMeasure(bias, n).weights()
    chi = _spectral.chi_vector(subset, n, bias)

    q_df = OperatorHandle("qdf", bias, f=f, masks=masks)
    direct = _utils.stable_dot(weights, q_df.apply(chi))

    sens = sensitivity_function(f, bias, masks=masks)
    sensitivity = _utils.stable_dot(weights, sens * chi)

    if increasing is None:
        increasing = _hypercube.is_increasing(f)

    coeffs = _spectral.transform(f, bias).coeffs

    monotone = None  # type: t.Optional[float]
    if increasing:
        monotone = pairing_increasing(coeffs, subset.bits, n, bias)

    general = None  # type: t.Optional[float]
    if n <= _utils.GENERAL_ROUTE_MAX_N:
        general = pairing_general(coeffs, subset.bits, n, bias)

    report = PairingReport(subset=subset, direct=direct,
                           sensitivity=sensitivity, monotone=monotone,
                           general=general)

    if strict and report.max_residual() > atol:
        raise _utils.RouteMismatchError(
            "Pairing routes disagree for S={}: {} (residual {:.3e})."
            "".format(subset.elements(), report.routes(),
                      report.max_residual()))

    return report

