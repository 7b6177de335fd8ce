"""Numerical identity suites run by the ``verify`` command.

Every suite returns a :obj:`SuiteResult`; ``run_suites`` collects them into
a JSON-ready report. A suite never raises on a failed identity: the
failure is recorded and the caller decides the exit status.
"""
import typing as t
import time

import numpy as np
import scipy.stats

import hypervol._internal as _internal
import hypervol._utils as _utils
import hypervol._hypercube as _hypercube
import hypervol._spectral as _spectral
import hypervol._dynamics as _dynamics
import hypervol._moments as _moments
import hypervol._simulate as _simulate

DEFAULT_P_GRID = (0.1, 0.3, 0.5, 0.7, 0.9)  # type: t.Tuple[float, ...]

EIGEN_DIMS = (4, 8, 10)  # type: t.Tuple[int, ...]


class SuiteResult(t.NamedTuple):
    """Outcome of one suite."""
    name: str
    passed: bool
    max_residual: float
    tolerance: float
    checks: int
    elapsed: float
    detail: t.Dict[str, t.Any]

    def to_dict(self) -> t.Dict[str, t.Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "checks": self.checks,
            "elapsed": self.elapsed,
            "detail": self.detail,
        }


class _Tally:
    """Running maximum of residuals against a tolerance."""
    def __init__(self, name: str, tolerance: float) -> None:
        self.name = name
        self.tolerance = tolerance
        self.worst = 0.0
        self.checks = 0
        self.failures = []  # type: t.List[str]
        self.detail = {}  # type: t.Dict[str, t.Any]
        self._start = time.perf_counter()

    def record(self, residual: float, label: str) -> None:
        self.checks += 1
        residual = float(residual)

        if not np.isfinite(residual) or residual > self.tolerance:
            self.failures.append("{} (residual {:.3e})".format(label,
                                                               residual))

        if np.isfinite(residual):
            self.worst = max(self.worst, residual)

        else:
            self.worst = float("inf")

    def result(self) -> SuiteResult:
        detail = dict(self.detail)

        if self.failures:
            detail["failures"] = self.failures[:10]

        return SuiteResult(name=self.name,
                           passed=not self.failures,
                           max_residual=self.worst,
                           tolerance=self.tolerance,
                           checks=self.checks,
                           elapsed=time.perf_counter() - self._start,
                           detail=detail)


def _family(kind: str, n: int,
            tribe_size: t.Optional[int] = None) -> _hypercube.BooleanFunction:
    return _hypercube.BooleanFunction.from_family(
        _hypercube.FamilySpec(kind, n, tribe_size=tribe_size))


def _named_families(n_max: int) -> t.List[_hypercube.BooleanFunction]:
    """Dictator, odd Majority, Parity and Tribes up to ``n_max``."""
    funcs = []  # type: t.List[_hypercube.BooleanFunction]

    for n in range(1, n_max + 1):
        funcs.append(_family("dictator", n))
        funcs.append(_family("parity", n))

        if n % 2:
            funcs.append(_family("majority", n))

        if n >= 4 and n % 2 == 0:
            funcs.append(_family("tribes", n, tribe_size=2))

    return funcs


def _increasing_families(n_max: int) -> t.List[_hypercube.BooleanFunction]:
    funcs = []  # type: t.List[_hypercube.BooleanFunction]

    for n in range(1, n_max + 1):
        funcs.append(_family("dictator", n))
        funcs.append(_family("and", n))
        funcs.append(_family("or", n))

        if n % 2:
            funcs.append(_family("majority", n))

        if n >= 4 and n % 2 == 0:
            funcs.append(_family("tribes", n, tribe_size=2))

    return funcs


def check_orthonormality(n_max: int = 8,
                         p_grid: t.Sequence[float] = DEFAULT_P_GRID,
                         tol: float = 1e-10) -> SuiteResult:
    """Gram matrix of the basis against the identity.

    Entries E_pi[chi_S chi_T] come out of the butterfly transform applied to
    the stacked basis vectors.
    """
    tally = _Tally("orthonormality", tol)

    for n in range(1, min(n_max, 8) + 1):
        for p in p_grid:
            basis = np.stack([_spectral.chi_vector(word, n, p)
                              for word in range(1 << n)])
            gram = _spectral.walsh_transform(basis, p)
            tally.record(np.max(np.abs(gram - np.eye(1 << n))),
                         "n={} p={}".format(n, p))

    return tally.result()


def check_derivatives(n: int = 8,
                      count: int = 50,
                      p_grid: t.Sequence[float] = DEFAULT_P_GRID,
                      seed: t.Optional[int] = None,
                      tol: float = 1e-10) -> SuiteResult:
    """Spectral derivative expansion against the direct difference."""
    tally = _Tally("derivative_expansion", tol)
    rng = _utils.check_random_state(seed)

    for ind in range(count):
        func = _hypercube.random_function(n, rng)
        p = p_grid[ind % len(p_grid)]
        spectrum = _spectral.transform(func, p)

        for i in range(1, n + 1):
            res = (_spectral.derivative_expansion(spectrum, i, p)
                   - _spectral.direct_derivative(func, i))
            tally.record(np.max(np.abs(res)),
                         "function {} bit {} p={}".format(ind, i, p))

    return tally.result()


def check_eigen(dims: t.Sequence[int] = EIGEN_DIMS,
                p_grid: t.Sequence[float] = DEFAULT_P_GRID,
                tol: float = 1e-12) -> SuiteResult:
    """Basis functions as eigenvectors of the jump chain.

    Residuals are relative to sup |chi_S|, which reaches (1/sigma)^|S|.
    """
    tally = _Tally("eigen_relation", tol)

    for n in dims:
        if n > _utils.EIGEN_CHECK_MAX_N:
            continue

        for p in p_grid:
            bias = _hypercube.BiasParam(p)
            peak = max(bias.p, 1.0 - bias.p) / bias.sigma

            for word in range(1 << n):
                subset = _hypercube.SubsetMask(word, n)
                scale = max(1.0, peak**subset.size)
                tally.record(_dynamics.eigen_residual(subset, bias) / scale,
                             "n={} p={} S={}".format(n, p, subset.elements()))

    return tally.result()


def check_reversibility(n_max: int = 8,
                        p_grid: t.Sequence[float] = DEFAULT_P_GRID,
                        tol: float = 1e-14) -> SuiteResult:
    """Detailed balance of the jump chain with respect to pi."""
    tally = _Tally("reversibility", tol)

    for n in range(1, n_max + 1):
        for p in p_grid:
            tally.record(_dynamics.reversibility_residual(p, n),
                         "n={} p={}".format(n, p))

    return tally.result()


def check_expected_count(n_max: int = 10,
                         count: int = 100,
                         p_grid: t.Sequence[float] = DEFAULT_P_GRID,
                         seed: t.Optional[int] = None,
                         tol: float = 1e-10) -> SuiteResult:
    """E[C_f] against the total influence I(f)."""
    tally = _Tally("expected_count_vs_influence", tol)
    rng = _utils.check_random_state(seed)

    funcs = _named_families(min(n_max, 10))
    funcs += [_hypercube.random_function(int(rng.integers(1, n_max + 1)), rng)
              for _ in range(count)]

    for func in funcs:
        for p in p_grid:
            first = _moments.expected_count(func, p)
            total = _dynamics.influence_profile(func, p).total
            tally.record(abs(first - total), "{} p={}".format(func.name, p))

    return tally.result()


def check_pairing_routes(n: int = 8,
                         count: int = 20,
                         p: float = 0.3,
                         seed: t.Optional[int] = None,
                         tol_direct: float = 1e-12,
                         tol_fourier: float = 1e-9) -> SuiteResult:
    """The four routes of the boundary pairing, over every subset.

    Half of the random functions are increasing so that the monotone route
    is exercised.
    """
    tally = _Tally("pairing_routes", tol_fourier)
    rng = _utils.check_random_state(seed)
    worst_direct = 0.0

    for ind in range(count):
        increasing = bool(ind % 2)
        func = _hypercube.random_function(n, rng, increasing=increasing)

        for word in range(1 << n):
            report = _dynamics.boundary_pairing(
                func, _hypercube.SubsetMask(word, n), p,
                increasing=increasing or None)

            gap = abs(report.direct - report.sensitivity)
            worst_direct = max(worst_direct, gap)

            if gap > tol_direct:
                tally.failures.append(
                    "function {} S={} direct vs sensitivity ({:.3e})"
                    "".format(ind, word, gap))

            tally.record(report.max_residual(),
                         "function {} S={}".format(ind, word))

    tally.detail["direct_vs_sensitivity"] = worst_direct

    return tally.result()


def check_second_moment_routes(n_max: int = 10,
                               count: int = 50,
                               p_grid: t.Sequence[float] = DEFAULT_P_GRID,
                               seed: t.Optional[int] = None,
                               tol: float = 1e-8,
                               policy: t.Optional[
                                   _moments.TruncationPolicy] = None
                               ) -> SuiteResult:
    """Power series route of E[C^2] against the pairing route."""
    tally = _Tally("second_moment_series_vs_fourier", tol)
    rng = _utils.check_random_state(seed)
    n_max = min(n_max, _utils.SERIES_MAX_N)

    for ind in range(count):
        n = 1 + ind % n_max
        func = _hypercube.random_function(n, rng)

        for p in p_grid:
            series = _moments.second_moment_series(func, p, policy)
            fourier = _moments.second_moment_fourier(func, p)
            tally.record(abs(series - fourier) / max(1.0, abs(series)),
                         "function {} (n={}) p={}".format(ind, n, p))

    return tally.result()


def check_increasing_route(n_max: int = 10,
                           count: int = 20,
                           p_grid: t.Sequence[float] = DEFAULT_P_GRID,
                           seed: t.Optional[int] = None,
                           tol: float = 1e-8,
                           policy: t.Optional[
                               _moments.TruncationPolicy] = None
                           ) -> SuiteResult:
    """Increasing closed form of E[C^2] against the series route.

    The detail records the resolved leading constant and the residual of
    the n = 1 Dictator run that pinned it.
    """
    tally = _Tally("second_moment_increasing_vs_series", tol)
    rng = _utils.check_random_state(seed)
    n_max = min(n_max, _utils.SERIES_MAX_N)

    leading = _moments.resolve_leading_constant(policy)
    tally.detail["leading_constant"] = {
        "constant": leading.constant,
        "raw": leading.raw,
        "residual": leading.residual,
        "reference": "dictator_1 at p=0.3",
    }

    funcs = _increasing_families(n_max)
    funcs += [_hypercube.random_function(1 + ind % n_max, rng,
                                         increasing=True)
              for ind in range(count)]

    for func in funcs:
        for p in p_grid:
            series = _moments.second_moment_series(func, p, policy)
            closed = _moments.second_moment_increasing(func, p, policy)
            tally.record(abs(series - closed) / max(1.0, abs(series)),
                         "{} p={}".format(func.name, p))

    return tally.result()


def check_upper_bound(n_max: int = 12,
                      p_grid: t.Sequence[float] = DEFAULT_P_GRID,
                      policy: t.Optional[_moments.TruncationPolicy] = None
                      ) -> SuiteResult:
    """E[C^2] never exceeds the bound valid for increasing functions."""
    tally = _Tally("increasing_upper_bound", 1e-10)
    n_max = min(n_max, _utils.SERIES_MAX_N)
    violations = 0

    for func in _increasing_families(n_max):
        for p in p_grid:
            series = _moments.second_moment_series(func, p, policy)
            upper = _moments.increasing_upper_bound(func, p)
            excess = max(0.0, series - upper)
            violations += int(excess > tally.tolerance)
            tally.record(excess, "{} p={}".format(func.name, p))

    tally.detail["violations"] = violations

    return tally.result()


def check_oracles(tol: float = 1e-10,
                  policy: t.Optional[_moments.TruncationPolicy] = None
                  ) -> SuiteResult:
    """Closed-form values from the Poisson laws and brute force."""
    tally = _Tally("closed_form_oracles", tol)

    dictator = _family("dictator", 1)
    parity = _family("parity", 2)
    majority = _family("majority", 3)

    cases = (
        ("dictator_1 E[C]", _moments.expected_count(dictator, 0.5), 0.5),
        ("dictator_1 E[C^2]",
         _moments.second_moment_series(dictator, 0.5, policy), 0.75),
        ("dictator_1 E[C^2] fourier",
         _moments.second_moment_fourier(dictator, 0.5), 0.75),
        ("parity_2 E[C]", _moments.expected_count(parity, 0.5), 1.0),
        ("parity_2 E[C^2]",
         _moments.second_moment_series(parity, 0.5, policy), 2.0),
        ("majority_3 I(f)",
         _dynamics.influence_profile(majority, 0.5).total, 0.75),
    )

    for label, value, expected in cases:
        tally.record(abs(value - expected), label)
        tally.detail[label] = value

    return tally.result()


def check_mgf(p_grid: t.Sequence[float] = (0.3, 0.5),
              tol: float = 1e-4) -> SuiteResult:
    """Numerical derivatives of the mgf at 0 against the moments."""
    tally = _Tally("mgf_derivatives", tol)

    for func in (_family("dictator", 1), _family("parity", 3),
                 _family("majority", 3)):
        for p in p_grid:
            first, second = _moments.mgf_derivatives(func, p)
            tally.record(abs(first - _moments.expected_count(func, p)),
                         "{} p={} first".format(func.name, p))
            tally.record(abs(second - _moments.second_moment_series(func, p))
                         / max(1.0, second),
                         "{} p={} second".format(func.name, p))

    return tally.result()


def check_monte_carlo(trials: int = 100000,
                      seed: t.Optional[int] = None,
                      sigmas: float = 3.0,
                      tol_exact: float = 1e-10) -> SuiteResult:
    """Simulated moments against the Poisson laws, plus the exact law.

    The Dictator has C ~ Poisson(1/2) and Parity_8 has C ~ Poisson(4) at
    p = 1/2. Monte Carlo residuals are measured in standard errors.
    """
    tally = _Tally("monte_carlo", sigmas)
    cfg = _simulate.McConfig(trials=trials, seed=seed)

    for kind, n in (("dictator", 1), ("parity", 8)):
        rate = 2.0 * 0.25 * n
        est = _simulate.monte_carlo_moments(_hypercube.FamilySpec(kind, n),
                                            0.5, cfg)
        errors = est.standard_errors
        label = "{}_{}".format(kind, n)

        tally.record(abs(est.mean - rate) / max(errors.mean, 1e-300),
                     label + " mean")
        tally.record(abs(est.second_moment - rate - rate**2)
                     / max(errors.second_moment, 1e-300),
                     label + " second moment")
        tally.detail[label] = {"mean": est.mean,
                               "second_moment": est.second_moment,
                               "mean_stderr": errors.mean}

    dist = _simulate.exact_count_distribution(_family("dictator", 1), 0.5,
                                              k_max=20)
    oracle = scipy.stats.poisson.pmf(np.arange(dist.probs.size), 0.5)
    gap = float(np.max(np.abs(dist.probs - oracle)))
    tally.detail["exact_vs_poisson"] = gap

    if gap > tol_exact:
        tally.failures.append("exact law of dictator_1 ({:.3e})".format(gap))

    return tally.result()


def check_stationarity(n: int = 4,
                       p: float = 0.3,
                       trials: int = 20000,
                       seed: t.Optional[int] = None,
                       alpha: float = 1e-3) -> SuiteResult:
    """Chi-square test of the simulated X_1 against pi."""
    cfg = _simulate.McConfig(trials=trials, seed=seed)
    start = time.perf_counter()
    res = _simulate.stationarity_check(n, p, cfg, alpha=alpha)

    return SuiteResult(name="stationarity",
                       passed=res.passed,
                       max_residual=alpha - min(alpha, res.pvalue),
                       tolerance=0.0,
                       checks=1,
                       elapsed=time.perf_counter() - start,
                       detail={"statistic": res.statistic,
                               "pvalue": res.pvalue,
                               "alpha": alpha})


def check_product_coefficient(n_max: int = 6,
                              count: int = 10,
                              p_grid: t.Sequence[float] = DEFAULT_P_GRID,
                              seed: t.Optional[int] = None,
                              tol: float = 1e-9) -> SuiteResult:
    """Pair expansion of <fg, chi_S> against the transform of f g."""
    tally = _Tally("product_coefficient", tol)
    rng = _utils.check_random_state(seed)
    n_max = min(n_max, _utils.GENERAL_ROUTE_MAX_N)

    for ind in range(count):
        n = 1 + ind % n_max
        f = _hypercube.random_function(n, rng)
        g = _hypercube.random_function(n, rng)
        fg = _hypercube.BooleanFunction(
            n=n, table=f.truth_table() & g.truth_table())
        p = p_grid[ind % len(p_grid)]
        f_hat, g_hat = _spectral.transform(f, p), _spectral.transform(g, p)
        fg_hat = _spectral.transform(fg, p).coeffs

        for word in range(1 << n):
            value = _spectral.product_coefficient(
                f_hat, g_hat, _hypercube.SubsetMask(word, n), p)
            tally.record(abs(value - fg_hat[word]) / max(1.0, abs(value)),
                         "pair {} (n={}) p={} S={}".format(ind, n, p, word))

    return tally.result()


def check_tri_product(n_max: int = 4,
                      p_grid: t.Sequence[float] = DEFAULT_P_GRID,
                      tol: float = 1e-10) -> SuiteResult:
    """Closed form of E[chi_S chi_T chi_R] against the weighted sum."""
    tally = _Tally("tri_product_expectation", tol)

    for n in range(1, min(n_max, 4) + 1):
        masks = [_hypercube.SubsetMask(word, n) for word in range(1 << n)]

        for p in p_grid:
            weights = _hypercube.ProductMeasure(p, n).weights()
            basis = np.stack([_spectral.chi_vector(word, n, p)
                              for word in range(1 << n)])

            for s_mask in masks:
                for t_mask in masks:
                    brute = (basis @ (weights * basis[s_mask.bits]
                                      * basis[t_mask.bits]))
                    closed = np.array([
                        _spectral.tri_product_expectation(s_mask, t_mask,
                                                          r_mask, p)
                        for r_mask in masks])
                    scale = np.maximum(1.0, np.abs(closed))
                    tally.record(np.max(np.abs(closed - brute) / scale),
                                 "n={} p={} S={} T={}".format(
                                     n, p, s_mask.bits, t_mask.bits))

    return tally.result()


def check_inverse_and_parseval(n_max: int = 8,
                               count: int = 20,
                               p_grid: t.Sequence[float] = DEFAULT_P_GRID,
                               seed: t.Optional[int] = None,
                               tol: float = 1e-10) -> SuiteResult:
    """Inverse transform of the spectrum and sum of squared coefficients.

    The inverse must give back the truth table exactly, and since f^2 = f
    the squared coefficients add up to E[f].
    """
    tally = _Tally("inverse_and_parseval", tol)
    rng = _utils.check_random_state(seed)

    funcs = _named_families(min(n_max, 8))
    funcs += [_hypercube.random_function(1 + ind % n_max, rng)
              for ind in range(count)]

    for func in funcs:
        table = func.truth_table()

        for p in p_grid:
            spectrum = _spectral.transform(func, p)
            rebuilt = _spectral.inverse_transform(spectrum).truth_table()
            tally.record(np.count_nonzero(rebuilt != table),
                         "{} p={} inverse".format(func.name, p))

            mean = _hypercube.ProductMeasure(p, func.n).expectation(table)
            energy = _utils.stable_sum(spectrum.coeffs**2)
            tally.record(abs(energy - mean),
                         "{} p={} parseval".format(func.name, p))

    return tally.result()


def check_measure(n_max: int = 12,
                  p_grid: t.Sequence[float] = DEFAULT_P_GRID,
                  tol: float = 1e-12) -> SuiteResult:
    """Product measure weights add up to one."""
    tally = _Tally("measure_normalization", tol)

    for n in range(1, min(n_max, _utils.EXACT_MAX_N) + 1):
        for p in p_grid:
            weights = _hypercube.ProductMeasure(p, n).weights()
            tally.record(abs(_utils.stable_sum(weights) - 1.0),
                         "n={} p={}".format(n, p))

            if weights.min() <= 0.0:
                tally.failures.append("n={} p={} non-positive weight"
                                      "".format(n, p))

    return tally.result()


def check_operator_split(n_max: int = 8,
                         count: int = 10,
                         p_grid: t.Sequence[float] = DEFAULT_P_GRID,
                         seed: t.Optional[int] = None,
                         tol: float = 1e-12) -> SuiteResult:
    """Q_n = Q_f + Q_df, and Q_n maps the constant one to itself."""
    tally = _Tally("operator_split", tol)
    rng = _utils.check_random_state(seed)

    funcs = _named_families(min(n_max, 6))
    funcs += [_hypercube.random_function(1 + ind % n_max, rng)
              for ind in range(count)]

    for func in funcs:
        size = 1 << func.n
        vectors = rng.standard_normal((2, size))

        for p in p_grid:
            q_n = _dynamics.OperatorHandle("qn", p, n=func.n)
            q_f = _dynamics.OperatorHandle("qf", p, f=func)
            q_df = _dynamics.OperatorHandle("qdf", p, f=func)

            split = q_n.apply(vectors) - q_f.apply(vectors) - q_df.apply(
                vectors)
            tally.record(np.max(np.abs(split)),
                         "{} p={} split".format(func.name, p))
            tally.record(np.max(np.abs(q_n.apply(np.ones(size)) - 1.0)),
                         "{} p={} row sums".format(func.name, p))

    return tally.result()


def _word_oracle(spec: _hypercube.FamilySpec,
                 words: np.ndarray) -> np.ndarray:
    """Family values on integer words, from population counts only."""
    n = spec.n
    ones = _utils.popcount(words)

    if spec.kind == "dictator":
        return words & 1

    if spec.kind == "majority":
        return (2 * ones >= n).astype(np.int64)

    if spec.kind == "parity":
        return (ones % 2 == 0).astype(np.int64)

    if spec.kind == "and":
        return (ones == n).astype(np.int64)

    if spec.kind == "or":
        return (ones > 0).astype(np.int64)

    block = (1 << spec.tribe_size) - 1
    full = np.zeros(words.shape, dtype=bool)

    for start in range(0, n, spec.tribe_size):
        full |= (words >> start) & block == block

    return full.astype(np.int64)


def _checked_families(n_max: int) -> t.List[_hypercube.BooleanFunction]:
    funcs = _named_families(n_max)
    funcs += [_family(kind, n) for kind in ("and", "or")
              for n in range(1, n_max + 1)]
    funcs += [_family("tribes", n, tribe_size=3)
              for n in range(3, n_max + 1, 3)]
    return funcs


def check_family_backing(n_max: int = 10,
                         samples: int = 256,
                         seed: t.Optional[int] = None) -> SuiteResult:
    """Truth tables of the families against an independent word oracle.

    Table-free evaluation on random points must agree with the table as
    well. Residuals count mismatching points.
    """
    tally = _Tally("family_backing", 0.0)
    rng = _utils.check_random_state(seed)

    for func in _checked_families(min(n_max, 12)):
        words = _utils.all_words(func.n)
        table = func.truth_table().astype(np.int64)
        tally.record(np.count_nonzero(table != _word_oracle(func.family,
                                                            words)),
                     "{} table".format(func.name))

        fresh = _hypercube.BooleanFunction.from_family(func.family)
        points = rng.integers(0, 1 << func.n, size=samples)
        bits = (points[:, np.newaxis]
                >> np.arange(func.n, dtype=np.int64)) & 1
        tally.record(np.count_nonzero(fresh.evaluate_bits(bits)
                                      != table[points]),
                     "{} closed form".format(func.name))

        if fresh.has_table:
            tally.failures.append("{} materialized a table".format(
                func.name))

    return tally.result()


def check_incremental_evaluators(n_max: int = 8,
                                 runs: int = 64,
                                 steps: int = 100,
                                 seed: t.Optional[int] = None
                                 ) -> SuiteResult:
    """Running evaluators under random coordinate updates, against tables.

    Residuals count runs whose tracked value differs from the table value
    of the current point.
    """
    tally = _Tally("incremental_evaluators", 0.0)
    rng = _utils.check_random_state(seed)

    funcs = _checked_families(min(n_max, 9))
    funcs.append(_hypercube.random_function(min(n_max, 6), rng))

    for func in funcs:
        table = func.truth_table()
        source = func.family if func.family is not None else func
        evaluator = _simulate.incremental_evaluator(source)
        weights = np.left_shift(1, np.arange(func.n, dtype=np.int64))

        bits = rng.integers(0, 2, size=(runs, func.n)).astype(np.uint8)
        values = evaluator.start(bits)
        mismatches = np.count_nonzero(values != table[bits.astype(
            np.int64) @ weights])

        for _ in range(steps):
            rows = np.flatnonzero(rng.random(runs) < 0.5)
            coords = rng.integers(0, func.n, size=rows.size)
            new = rng.integers(0, 2, size=rows.size).astype(np.uint8)
            old = bits[rows, coords]
            bits[rows, coords] = new

            values = evaluator.update(rows, coords, old, new)
            words = bits[rows].astype(np.int64) @ weights
            mismatches += np.count_nonzero(values != table[words])

        tally.record(mismatches, func.name)

    return tally.result()


def check_exact_engine(n_max: int = 6,
                       count: int = 10,
                       p_grid: t.Sequence[float] = (0.3, 0.5),
                       seed: t.Optional[int] = None,
                       tol: float = 1e-8,
                       policy: t.Optional[_moments.TruncationPolicy] = None
                       ) -> SuiteResult:
    """Moments of the exact law of C_f against the closed routes."""
    tally = _Tally("exact_law_moments", tol)
    rng = _utils.check_random_state(seed)
    n_max = min(n_max, _utils.COUNT_DIST_MAX_N)

    funcs = _named_families(n_max)
    funcs += [_hypercube.random_function(1 + ind % n_max, rng)
              for ind in range(count)]

    for func in funcs:
        for p in p_grid:
            dist = _simulate.exact_count_distribution(func, p, policy=policy)
            first = _moments.expected_count(func, p)
            series = _moments.second_moment_series(func, p, policy)
            fourier = _moments.second_moment_fourier(func, p)
            label = "{} p={}".format(func.name, p)

            tally.record(abs(dist.mean() - first) / max(1.0, first),
                         label + " mean")
            tally.record(abs(dist.second_moment() - series)
                         / max(1.0, series), label + " series")
            tally.record(abs(dist.second_moment() - fourier)
                         / max(1.0, fourier), label + " fourier")

    return tally.result()


def check_mc_tails(trials: int = 20000,
                   seed: t.Optional[int] = None,
                   sigmas: float = 4.0,
                   min_hits: int = 10) -> SuiteResult:
    """Simulated tails P(C >= k) against the exact law, in standard errors.

    Only thresholds expected to see at least ``min_hits`` runs on either
    side are compared, where the normal approximation holds.
    """
    tally = _Tally("monte_carlo_tails", sigmas)
    cfg = _simulate.McConfig(trials=trials, seed=seed)

    for kind, n, p in (("dictator", 1, 0.5), ("parity", 4, 0.5),
                       ("majority", 3, 0.3), ("tribes", 4, 0.6)):
        func = _family(kind, n, tribe_size=2 if kind == "tribes" else None)
        exact = _simulate.exact_count_distribution(func, p).tail_table()
        counts, _ = _simulate.simulate_counts(func, p, cfg)
        empirical = _simulate.estimate_from_counts(
            counts, k_max=exact.size - 1).tail_table

        hits = np.minimum(exact, 1.0 - exact) * trials
        kept = np.flatnonzero(hits >= min_hits)
        stderr = np.sqrt(exact[kept] * (1.0 - exact[kept]) / trials)
        tally.record(np.max(np.abs(empirical[kept] - exact[kept]) / stderr,
                            initial=0.0),
                     "{} p={}".format(func.name, p))
        tally.detail[func.name] = {"thresholds": int(kept.size)}

    return tally.result()


def check_pz_monotone(n_max: int = 7,
                      p_grid: t.Sequence[float] = DEFAULT_P_GRID,
                      thetas: int = 19,
                      policy: t.Optional[_moments.TruncationPolicy] = None
                      ) -> SuiteResult:
    """Anti-concentration bound non-increasing in theta and at most one."""
    tally = _Tally("pz_bound_monotone", 1e-12)
    grid = np.linspace(0.05, 0.95, thetas)

    for func in _named_families(min(n_max, _utils.SERIES_MAX_N)):
        for p in p_grid:
            first = _moments.expected_count(func, p)
            second = _moments.second_moment_series(func, p, policy)
            bounds = np.array([_moments.pz_lower_bound(func, p, theta,
                                                       first=first,
                                                       second=second)
                               for theta in grid])
            label = "{} p={}".format(func.name, p)
            tally.record(np.max(np.diff(bounds), initial=0.0),
                         label + " increase")
            tally.record(max(0.0, float(bounds.max()) - 1.0),
                         label + " above one")

    return tally.result()


def run_suites(n_max: int = 8,
               p_grid: t.Sequence[float] = DEFAULT_P_GRID,
               seed: t.Optional[int] = None,
               tol: float = 1e-12,
               mc_trials: int = 100000,
               quick: bool = False,
               verbose: int = 0) -> t.Dict[str, t.Any]:
    """Run every suite and assemble the verification report.

    Parameters
    ----------
    n_max : int, optional
        Largest dimension of the exact suites.

    p_grid : sequence of float, optional
        Biases every suite runs on.

    seed : int, optional
        Root seed of random test functions and simulations.

    tol : float, optional
        Truncation tolerance of the series.

    mc_trials : int, optional
        Runs of the Monte Carlo suite.

    quick : bool, optional
        Smaller random samples, for smoke runs.

    verbose : int, optional
        If >= 1, print each suite outcome.

    Returns
    -------
    dict
        ``passed`` (all suites passed), ``suites`` (their reports) and the
        ``leading_constant`` line.
    """
    policy = _moments.TruncationPolicy(tol=tol)
    seeds = np.random.SeedSequence(seed).generate_state(14)
    few = 5 if quick else None

    suites = (
        lambda: check_orthonormality(n_max, p_grid),
        lambda: check_derivatives(min(n_max, 8), few or 50, p_grid,
                                  int(seeds[0])),
        lambda: check_eigen(tuple(dim for dim in EIGEN_DIMS
                                  if dim <= max(n_max, 4)), p_grid),
        lambda: check_reversibility(n_max, p_grid),
        lambda: check_expected_count(min(n_max, 10), few or 100, p_grid,
                                     int(seeds[1])),
        lambda: check_pairing_routes(min(n_max, 8), few or 20,
                                     seed=int(seeds[2])),
        lambda: check_second_moment_routes(min(n_max, 10), few or 50,
                                           p_grid, int(seeds[3]),
                                           policy=policy),
        lambda: check_increasing_route(min(n_max, 10), few or 20, p_grid,
                                       int(seeds[4]), policy=policy),
        lambda: check_upper_bound(min(n_max + 4, 12), p_grid, policy),
        lambda: check_oracles(policy=policy),
        lambda: check_product_coefficient(min(n_max, 6), few or 10, p_grid,
                                          int(seeds[7])),
        lambda: check_tri_product(min(n_max, 4), p_grid),
        lambda: check_inverse_and_parseval(n_max, few or 20, p_grid,
                                           int(seeds[8])),
        lambda: check_measure(n_max + 4, p_grid),
        lambda: check_operator_split(n_max, few or 10, p_grid,
                                     int(seeds[9])),
        lambda: check_family_backing(n_max + 2, seed=int(seeds[10])),
        lambda: check_incremental_evaluators(n_max,
                                             seed=int(seeds[11])),
        lambda: check_exact_engine(min(n_max, 6), few or 10,
                                   seed=int(seeds[12]), policy=policy),
        lambda: check_pz_monotone(min(n_max, 7), p_grid, policy=policy),
        lambda: check_mc_tails(min(mc_trials, 20000), int(seeds[13])),
        check_mgf,
        lambda: check_monte_carlo(mc_trials, int(seeds[5])),
        lambda: check_stationarity(seed=int(seeds[6])),
    )  # type: t.Tuple[t.Callable[[], SuiteResult], ...]

    results = []  # type: t.List[SuiteResult]

    for suite in suites:
        res = suite()
        results.append(res)

        if verbose >= 1:
            print(" {} {:<36} {} (max residual {:.3e}, {:.2f}s)".format(
                _internal.VERBOSE_BLOCK_MID_SYMBOL, res.name,
                "ok" if res.passed else "FAILED",
                res.max_residual, res.elapsed))

    leading = next(res.detail["leading_constant"] for res in results
                   if "leading_constant" in res.detail)

    return {
        "passed": all(res.passed for res in results),
        "leading_constant": leading,
        "suites": [res.to_dict() for res in results],
    }
