"""First and second moments of the switch count C_f.

The switch count is the number of times f(X_t) changes value for t in
(0, 1). Its moments are computed through several independent routes:

    * ``expected_count``: n pi^T Q_df 1.
    * ``second_moment_series``: power series in (Q_n - I), truncated with a
      certified tail bound.
    * ``second_moment_fourier``: closed form over the pairings
      pi^T Q_df chi_S, themselves one transform of the sensitivity.
    * ``second_moment_increasing``: closed form over the Fourier
      coefficients of ``f``, valid for increasing functions only.
"""
import typing as t
import functools

import numpy as np
import scipy.stats

import hypervol._utils as _utils
import hypervol._hypercube as _hypercube
import hypervol._spectral as _spectral
import hypervol._dynamics as _dynamics

DEFAULT_THETA_GRID = (0.25, 0.5, 0.75)  # type: t.Tuple[float, ...]


class TruncationPolicy:
    """Truncation tolerance and hard cap of the infinite series.

    Attributes
    ----------
    tol : float
        Largest admissible bound on the neglected tail.

    k_max : int or None
        Largest series index. Defaults to max(8 n, 128).
    """
    def __init__(self, tol: float = 1e-12, k_max: t.Optional[int] = None):
        if not tol > 0:
            raise ValueError("'tol' must be positive (got {}).".format(tol))

        if k_max is not None and k_max < 2:
            raise ValueError("'k_max' must be at least 2 (got {})."
                             "".format(k_max))

        self.tol = float(tol)
        self.k_max = k_max

    def cap(self, n: int) -> int:
        """Effective k_max for dimension ``n``."""
        return self.k_max if self.k_max is not None else max(8 * n, 128)

    def __repr__(self) -> str:
        return "TruncationPolicy(tol={}, k_max={})".format(self.tol,
                                                          self.k_max)


def _policy(policy: t.Optional[TruncationPolicy]) -> TruncationPolicy:
    return policy if policy is not None else TruncationPolicy()


def _size_weights(sizes: np.ndarray) -> np.ndarray:
    """(e^-s - (1 - s)) / s^2, with its limit 1/2 at s = 0."""
    sizes = np.asarray(sizes, dtype=float)
    res = np.full(sizes.shape, 0.5)
    nonzero = sizes > 0
    s_nz = sizes[nonzero]
    res[nonzero] = (np.exp(-s_nz) - (1.0 - s_nz)) / s_nz**2
    return res


def expected_count(f: _hypercube.BooleanFunction,
                   p: t.Union[float, _hypercube.BiasParam],
                   sensitivity: t.Optional[np.ndarray] = None) -> float:
    """E[C_f] = n pi^T Q_df 1, which equals the total influence I(f)."""
    if sensitivity is None:
        sensitivity = _dynamics.sensitivity_function(f, p)

    weights = _hypercube.ProductMeasure(p, f.n).weights()
    return f.n * _utils.stable_dot(weights, sensitivity)


def variance(f: _hypercube.BooleanFunction,
             p: t.Union[float, _hypercube.BiasParam]) -> float:
    """Var_pi(f) = E[f] - E[f]^2 for Boolean ``f``."""
    mean, _ = _hypercube.nondegeneracy(f, p)
    return mean - mean**2


class SeriesResult(t.NamedTuple):
    """Truncated series value, last index kept and certified tail bound."""
    value: float
    cutoff: int
    tail_bound: float


def second_moment_series_details(
        f: _hypercube.BooleanFunction,
        p: t.Union[float, _hypercube.BiasParam],
        policy: t.Optional[TruncationPolicy] = None,
        sensitivity: t.Optional[np.ndarray] = None) -> SeriesResult:
    """Series route of E[C_f^2] with its truncation certificate.

    The summand of index k is (n^k / k!) <Q_df 1, (Q_n - I)^(k-2) Q_df 1>_pi.
    As Q_n - I is a contraction of L2(pi), its size is at most
    (n^k / k!) ||Q_df 1||^2_pi, which bounds the neglected tail by
    2 B e^n P(Poisson(n) > K).
    """
    policy = _policy(policy)
    bias = _hypercube.BiasParam(p)
    n = f.n
    _utils.check_gate(n, _utils.SERIES_MAX_N, "second_moment_series")

    if sensitivity is None:
        sensitivity = _dynamics.sensitivity_function(f, bias)

    weights = _hypercube.ProductMeasure(bias, n).weights()
    first = n * _utils.stable_dot(weights, sensitivity)
    sq_norm = _utils.stable_dot(weights, sensitivity**2)

    if sq_norm == 0.0:
        return SeriesResult(value=first, cutoff=1, tail_bound=0.0)

    scale = 2.0 * sq_norm * np.exp(n)
    cutoff = max(2, _utils.poisson_cutoff(rate=n,
                                          tol=policy.tol,
                                          k_max=policy.cap(n),
                                          scale=scale,
                                          name="second_moment_series"))

    q_n = _dynamics.OperatorHandle("qn", bias, n=n)
    ks = np.arange(2, cutoff + 1)
    coeffs = np.exp(n + scipy.stats.poisson.logpmf(ks, n))

    terms = np.empty(ks.size, dtype=float)
    vec = sensitivity.copy()

    for ind in range(ks.size):
        terms[ind] = coeffs[ind] * _utils.stable_dot(weights,
                                                     sensitivity * vec)
        vec = q_n.apply(vec) - vec

    tail = scale * float(scipy.stats.poisson.sf(cutoff, n))
    value = first + 2.0 * _utils.stable_sum(terms)

    return SeriesResult(value=value, cutoff=int(cutoff), tail_bound=tail)


def second_moment_series(f: _hypercube.BooleanFunction,
                         p: t.Union[float, _hypercube.BiasParam],
                         policy: t.Optional[TruncationPolicy] = None,
                         sensitivity: t.Optional[np.ndarray] = None) -> float:
    """E[C_f^2] = E[C_f] + 2 sum_{k >= 2} (n^k / k!)
    pi^T Q_df (Q_n - I)^(k-2) Q_df 1.

    Raises ``TruncationError`` when ``policy.k_max`` is reached before the
    tail bound drops below ``policy.tol``.
    """
    return second_moment_series_details(f, p, policy, sensitivity).value


def second_moment_fourier(f: _hypercube.BooleanFunction,
                          p: t.Union[float, _hypercube.BiasParam],
                          sensitivity: t.Optional[np.ndarray] = None,
                          pairings: t.Optional[np.ndarray] = None) -> float:
    """E[C_f^2] = E[C_f] + E[C_f]^2
    + 2 sum_{S != {}} ((e^-|S| - (1 - |S|)) / |S|^2) (n pi^T Q_df chi_S)^2.

    Holds for every function. All pairings come from a single transform of
    the sensitivity function.
    """
    n = f.n
    _utils.check_gate(n, _utils.SERIES_MAX_N, "second_moment_fourier")

    if pairings is None:
        pairings = _dynamics.pairing_all(f, p, sensitivity=sensitivity)

    scaled = n * np.asarray(pairings, dtype=float)
    first = float(scaled[0])
    sizes = _utils.popcount(_utils.all_words(n))[1:]

    rest = 2.0 * _utils.stable_sum(_size_weights(sizes) * scaled[1:]**2)
    return first + first**2 + rest


def increasing_brackets(coeffs: np.ndarray,
                        n: int,
                        p: t.Union[float, _hypercube.BiasParam]) -> np.ndarray:
    """(1 - 2p) |S| f_hat(S) + 2 sigma sum_{i not in S} f_hat(S + {i}),
    for every S at once."""
    bias = _hypercube.BiasParam(p)
    coeffs = np.asarray(coeffs, dtype=float)
    above = np.zeros_like(coeffs)

    for i in range(1, n + 1):
        src = coeffs.reshape(_utils.pair_shape(n, i))
        above.reshape(_utils.pair_shape(n, i))[:, 0, :] += src[:, 1, :]

    sizes = _utils.popcount(_utils.all_words(n))
    return (1.0 - 2.0 * bias.p) * sizes * coeffs + 2.0 * bias.sigma * above


class LeadingConstant(t.NamedTuple):
    """Outcome of the run that pins the constant of the increasing route."""
    constant: int
    raw: float
    residual: float


@functools.lru_cache(maxsize=8)
def _resolve_leading_constant(tol: float, k_max: t.Optional[int]
                              ) -> LeadingConstant:
    policy = TruncationPolicy(tol=tol, k_max=k_max)
    bias = _hypercube.BiasParam(0.3)
    dictator = _hypercube.BooleanFunction.from_family(
        _hypercube.FamilySpec("dictator", 1))

    series = second_moment_series(dictator, bias, policy=policy)
    first = expected_count(dictator, bias)
    coeffs = _spectral.transform(dictator, bias).coeffs
    brackets = increasing_brackets(coeffs, 1, bias)
    term = float(_size_weights(np.array([1]))[0] * brackets[1]**2)

    raw = (series - first - first**2) / term
    constant = min((1, 2), key=lambda cand: abs(raw - cand))

    return LeadingConstant(constant=constant, raw=raw,
                           residual=abs(raw - constant))


def resolve_leading_constant(
        policy: t.Optional[TruncationPolicy] = None) -> LeadingConstant:
    """Pin the leading constant of the increasing route.

    Runs the n = 1, p = 0.3 Dictator through the series route, isolates
    the single non-empty term of the increasing closed form and rounds the
    fitted factor to the nearest candidate in {1, 2}.
    """
    policy = _policy(policy)
    return _resolve_leading_constant(policy.tol, policy.k_max)


def _check_increasing(f: _hypercube.BooleanFunction, name: str) -> None:
    if not _hypercube.is_increasing(f):
        raise _utils.ContractError("'{}' requires an increasing function "
                                   "(got '{}').".format(name, f.name))


def second_moment_increasing(
        f: _hypercube.BooleanFunction,
        p: t.Union[float, _hypercube.BiasParam],
        policy: t.Optional[TruncationPolicy] = None,
        spectrum: t.Optional[_spectral.Spectrum] = None) -> float:
    """E[C_f^2] through the Fourier coefficients of an increasing ``f``.

    E[C_f] + E[C_f]^2 + c sum_{S != {}} ((e^-|S| - (1 - |S|)) / |S|^2)
    B(S)^2, with B(S) from ``increasing_brackets`` and c from
    ``resolve_leading_constant``.
    """
    n = f.n
    _utils.check_gate(n, _utils.SERIES_MAX_N, "second_moment_increasing")
    _check_increasing(f, "second_moment_increasing")

    bias = _hypercube.BiasParam(p)

    if spectrum is None:
        spectrum = _spectral.transform(f, bias)

    brackets = increasing_brackets(spectrum.coeffs, n, bias)
    first = float(brackets[0])
    sizes = _utils.popcount(_utils.all_words(n))[1:]
    constant = resolve_leading_constant(policy).constant

    rest = constant * _utils.stable_sum(_size_weights(sizes)
                                        * brackets[1:]**2)
    return first + first**2 + rest


def mgf(f: _hypercube.BooleanFunction,
        p: t.Union[float, _hypercube.BiasParam],
        s: float,
        policy: t.Optional[TruncationPolicy] = None) -> float:
    """Moment generating function E[exp(s C_f)].

    The series sum_k (n^k / k!) pi^T((Q_n - I) + (e^s - 1) Q_df)^k 1 is
    evaluated in its equivalent Poisson mixture form
    sum_k P(Poisson(n) = k) pi^T (Q_f + e^s Q_df)^k 1, whose terms are all
    nonnegative. The neglected tail is at most
    exp(n (e^s - 1)) P(Poisson(n e^s) > K) for s > 0, and
    P(Poisson(n) > K) for s <= 0.
    """
    policy = _policy(policy)
    bias = _hypercube.BiasParam(p)
    n = f.n
    _utils.check_gate(n, _utils.SERIES_MAX_N, "mgf")

    growth = float(np.exp(s))

    if s > 0:
        cutoff = _utils.poisson_cutoff(rate=n * growth,
                                       tol=policy.tol,
                                       k_max=policy.cap(n),
                                       scale=float(np.exp(n * (growth - 1))),
                                       name="mgf")

    else:
        cutoff = _utils.poisson_cutoff(rate=n, tol=policy.tol,
                                       k_max=policy.cap(n), name="mgf")

    masks = _dynamics.boundary_masks(f)
    q_f = _dynamics.OperatorHandle("qf", bias, f=f, masks=masks)
    q_df = _dynamics.OperatorHandle("qdf", bias, f=f, masks=masks)

    weights = _hypercube.ProductMeasure(bias, n).weights()
    pmf = scipy.stats.poisson.pmf(np.arange(cutoff + 1), n)
    vec = np.ones(1 << n, dtype=float)
    terms = np.empty(cutoff + 1, dtype=float)

    for k in range(cutoff + 1):
        terms[k] = pmf[k] * _utils.stable_sum(weights * vec)
        vec = q_f.apply(vec) + growth * q_df.apply(vec)

    return _utils.stable_sum(terms)


def mgf_derivatives(f: _hypercube.BooleanFunction,
                    p: t.Union[float, _hypercube.BiasParam],
                    h: float = 1e-5,
                    policy: t.Optional[TruncationPolicy] = None
                    ) -> t.Tuple[float, float]:
    """Central differences of the mgf at 0: estimates of E[C] and E[C^2]."""
    policy = _policy(policy)
    # Note: the truncation error must stay well below h^2.
    fine = TruncationPolicy(tol=min(policy.tol, 1e-16), k_max=policy.k_max)

    upper = mgf(f, p, h, fine)
    lower = mgf(f, p, -h, fine)

    first = (upper - lower) / (2.0 * h)
    second = (upper - 2.0 + lower) / h**2

    return first, second


def pz_lower_bound(f: _hypercube.BooleanFunction,
                   p: t.Union[float, _hypercube.BiasParam],
                   theta: float,
                   first: t.Optional[float] = None,
                   second: t.Optional[float] = None,
                   policy: t.Optional[TruncationPolicy] = None) -> float:
    """Anti-concentration bound P(C > theta E[C]) >= (1 - theta) E[C]^2 /
    E[C^2].

    The factor is (1 - theta), not (1 - theta)^2. Returns 0 for functions
    with E[C] = 0.
    """
    if not 0.0 < theta < 1.0:
        raise ValueError("'theta' must be in the open (0, 1) interval "
                         "(got {}).".format(theta))

    if first is None:
        first = expected_count(f, p)

    if first == 0.0:
        return 0.0

    if second is None:
        second = second_moment_series(f, p, policy)

    return (1.0 - theta) * first**2 / second


def increasing_upper_bound(f: _hypercube.BooleanFunction,
                           p: t.Union[float, _hypercube.BiasParam],
                           first: t.Optional[float] = None) -> float:
    """E[C] + E[C]^2 + 4 (1 - 2p)^2 E[C] + 32 p (1 - p) n Var_pi(f).

    An upper bound on E[C^2] for increasing functions.
    """
    _check_increasing(f, "increasing_upper_bound")
    bias = _hypercube.BiasParam(p)

    if first is None:
        first = expected_count(f, bias)

    return (first + first**2 + 4.0 * (1.0 - 2.0 * bias.p)**2 * first
            + 32.0 * bias.p * (1.0 - bias.p) * f.n * variance(f, bias))


def criterion_ratio(f: _hypercube.BooleanFunction,
                    p: t.Union[float, _hypercube.BiasParam],
                    total_influence: t.Optional[float] = None) -> float:
    """p (1 - p) n Var_pi(f) / I(f)^2."""
    bias = _hypercube.BiasParam(p)

    if total_influence is None:
        total_influence = expected_count(f, bias)

    if total_influence <= 0.0:
        raise _utils.ContractError("Criterion ratio is undefined for "
                                   "I(f) = 0 ('{}').".format(f.name))

    return (bias.p * (1.0 - bias.p) * f.n * variance(f, bias)
            / total_influence**2)


def nontame_criterion(f: _hypercube.BooleanFunction,
                      p: t.Union[float, _hypercube.BiasParam],
                      c_const: float) -> t.Tuple[float, bool]:
    """Check p (1 - p) n Var_pi(f) <= C I(f)^2.

    Returns
    -------
    tuple
        The ratio p (1 - p) n Var_pi(f) / I(f)^2 and whether it is at most
        ``c_const``.
    """
    ratio = criterion_ratio(f, p)
    return ratio, bool(ratio <= c_const)


class RegularityCheck(t.NamedTuple):
    """Both sides of the regularity implication and the monotone bound.

    ``holds`` is None when the implication does not apply (``f`` not
    regular or sum of squared influences at most D^2); ``monotone_ok`` is
    None for non-increasing functions.
    """
    regular: bool
    sq_sum: float
    d_squared: float
    total: float
    target: float
    holds: t.Optional[bool]
    increasing: bool
    monotone_bound: t.Optional[float]
    monotone_ok: t.Optional[bool]


def regularity_influence_bound(f: _hypercube.BooleanFunction,
                               p: t.Union[float, _hypercube.BiasParam],
                               d_const: float,
                               atol: float = 1e-10) -> RegularityCheck:
    """For regular ``f``, check that sum I_i^2 > D^2 gives I(f) >= D sqrt(n).

    Also reports the soft diagnostic I(f) <= sqrt(n p) for increasing
    functions.
    """
    bias = _hypercube.BiasParam(p)
    profile = _dynamics.influence_profile(f, bias)
    regular = bool(np.ptp(profile.per_bit) <= atol)
    target = d_const * float(np.sqrt(f.n))

    holds = None  # type: t.Optional[bool]
    if regular and profile.sq_sum > d_const**2:
        holds = bool(profile.total >= target)

    increasing = _hypercube.is_increasing(f)
    monotone_bound = None  # type: t.Optional[float]
    monotone_ok = None  # type: t.Optional[bool]

    if increasing:
        monotone_bound = float(np.sqrt(f.n * bias.p))
        monotone_ok = bool(profile.total <= monotone_bound)

    return RegularityCheck(regular=regular,
                           sq_sum=profile.sq_sum,
                           d_squared=d_const**2,
                           total=profile.total,
                           target=target,
                           holds=holds,
                           increasing=increasing,
                           monotone_bound=monotone_bound,
                           monotone_ok=monotone_ok)


class MomentReport(t.NamedTuple):
    """Every moment, bound and criterion of one (f, p) pair.

    Fields that cannot be computed (gated dimension, contract) are None
    and listed in ``not_computed``.
    """
    expected_count: float
    second_series: t.Optional[float]
    second_fourier: t.Optional[float]
    second_increasing: t.Optional[float]
    variance_f: float
    pz_bounds: t.Dict[float, t.Optional[float]]
    increasing_upper: t.Optional[float]
    criterion_ratio: t.Optional[float]
    influence: _dynamics.InfluenceProfile
    leading_constant: t.Optional[LeadingConstant]
    series_tail_bound: t.Optional[float]
    residuals: t.Dict[str, float]
    not_computed: t.List[str]

    def to_dict(self) -> t.Dict[str, t.Any]:
        """JSON-ready rendering."""
        influence = self.influence
        leading = self.leading_constant

        return {
            "expected_count": self.expected_count,
            "second_series": self.second_series,
            "second_fourier": self.second_fourier,
            "second_increasing": self.second_increasing,
            "variance_f": self.variance_f,
            "pz_bounds": {str(key): val
                          for key, val in self.pz_bounds.items()},
            "increasing_upper": self.increasing_upper,
            "criterion_ratio": self.criterion_ratio,
            "influence": {
                "per_bit": influence.per_bit.tolist(),
                "normalized": influence.normalized.tolist(),
                "total": influence.total,
                "sq_sum": influence.sq_sum,
            },
            "leading_constant": None if leading is None else {
                "constant": leading.constant,
                "raw": leading.raw,
                "residual": leading.residual,
            },
            "series_tail_bound": self.series_tail_bound,
            "residuals": dict(self.residuals),
            "not_computed": list(self.not_computed),
        }


def moment_report(f: _hypercube.BooleanFunction,
                  p: t.Union[float, _hypercube.BiasParam],
                  theta_grid: t.Sequence[float] = DEFAULT_THETA_GRID,
                  policy: t.Optional[TruncationPolicy] = None
                  ) -> MomentReport:
    """Assemble the MomentReport of ``f`` at bias ``p``.

    Exact quantities need n <= EXACT_MAX_N; second moments need
    n <= SERIES_MAX_N. Anything beyond a gate is reported as not computed.
    """
    bias = _hypercube.BiasParam(p)
    policy = _policy(policy)
    _utils.check_gate(f.n, _utils.EXACT_MAX_N, "moment_report")

    not_computed = []  # type: t.List[str]
    residuals = {}  # type: t.Dict[str, float]

    masks = _dynamics.boundary_masks(f)
    sens = _dynamics.sensitivity_function(f, bias, masks=masks)
    influence = _dynamics.influence_profile(f, bias, masks=masks)
    first = expected_count(f, bias, sensitivity=sens)
    residuals["expected_vs_influence"] = abs(first - influence.total)

    increasing = f.n <= _utils.INCREASING_CHECK_MAX_N and (
        _hypercube.is_increasing(f))

    second_series = second_fourier = second_increasing = None
    series_tail = None  # type: t.Optional[float]
    leading = None  # type: t.Optional[LeadingConstant]

    if f.n <= _utils.SERIES_MAX_N:
        details = second_moment_series_details(f, bias, policy, sens)
        second_series, series_tail = details.value, details.tail_bound
        second_fourier = second_moment_fourier(f, bias, sensitivity=sens)
        residuals["series_vs_fourier"] = abs(second_series - second_fourier)

        if increasing:
            leading = resolve_leading_constant(policy)
            second_increasing = second_moment_increasing(f, bias, policy)
            residuals["series_vs_increasing"] = abs(second_series
                                                    - second_increasing)

        else:
            not_computed.append("second_increasing")

    else:
        not_computed += ["second_series", "second_fourier",
                         "second_increasing"]

    pz_bounds = {}  # type: t.Dict[float, t.Optional[float]]
    for theta in theta_grid:
        if first == 0.0:
            pz_bounds[theta] = 0.0

        elif second_series is None:
            pz_bounds[theta] = None

        else:
            pz_bounds[theta] = pz_lower_bound(f, bias, theta, first=first,
                                              second=second_series)

    if second_series is None and first > 0.0:
        not_computed.append("pz_bounds")

    increasing_upper = None  # type: t.Optional[float]
    if increasing:
        increasing_upper = increasing_upper_bound(f, bias, first=first)

    else:
        not_computed.append("increasing_upper")

    ratio = None  # type: t.Optional[float]
    if first > 0.0:
        ratio = criterion_ratio(f, bias, total_influence=first)

    else:
        not_computed.append("criterion_ratio")

    return MomentReport(expected_count=first,
                        second_series=second_series,
                        second_fourier=second_fourier,
                        second_increasing=second_increasing,
                        variance_f=variance(f, bias),
                        pz_bounds=pz_bounds,
                        increasing_upper=increasing_upper,
                        criterion_ratio=ratio,
                        influence=influence,
                        leading_constant=leading,
                        series_tail_bound=series_tail,
                        residuals=residuals,
                        not_computed=not_computed)
