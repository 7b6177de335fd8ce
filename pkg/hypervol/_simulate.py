"""Monte Carlo of the resampling dynamics and exact switch count law.

Trials are simulated in lockstep: every trial of a batch draws its jump
count T ~ Poisson(n) up front, then all trials still running perform one
event per step. Each event picks a uniform coordinate and resamples it
from Bernoulli(p), so an event may leave the state unchanged.

Every batch owns a Philox stream spawned from the configured seed, so the
outcome depends only on (f, p, trials, batch, seed).
"""
import typing as t

import numpy as np
import pandas as pd
import scipy.stats
import statsmodels.stats.proportion

import hypervol._utils as _utils
import hypervol._hypercube as _hypercube
import hypervol._dynamics as _dynamics
import hypervol._moments as _moments

TypeFunctionSource = t.Union[_hypercube.BooleanFunction,
                             _hypercube.FamilySpec]

STATIONARITY_MAX_N = 6

_BATCH_CELLS = 1 << 26


class TrajectoryStats(t.NamedTuple):
    """Switch count, number of events and seed of a single run."""
    count: int
    jumps: int
    seed: int


class CountDistribution(t.NamedTuple):
    """Law of C_f on 0..k_max plus the mass left beyond the truncation."""
    probs: np.ndarray
    truncation_mass: float

    def mean(self) -> float:
        """E[C] restricted to the tabulated counts."""
        return _utils.stable_dot(np.arange(self.probs.size), self.probs)

    def second_moment(self) -> float:
        """E[C^2] restricted to the tabulated counts."""
        return _utils.stable_dot(np.arange(self.probs.size)**2, self.probs)

    def tail_table(self) -> np.ndarray:
        """P(C >= k) for k = 0..k_max (leftover mass included)."""
        rev = np.cumsum(self.probs[::-1])[::-1]
        return rev + self.truncation_mass


class McConfig:
    """Monte Carlo settings.

    Attributes
    ----------
    trials : int
        Number of independent runs.

    seed : int or None
        Root seed of the per-batch streams.

    batch : int
        Runs simulated together in lockstep.
    """
    def __init__(self,
                 trials: int = 100000,
                 seed: t.Optional[int] = None,
                 batch: int = 10000) -> None:
        if not isinstance(trials, (int, np.integer)) or trials < 1:
            raise ValueError("'trials' must be a positive integer "
                             "(got {}).".format(trials))

        if not isinstance(batch, (int, np.integer)) or batch < 1:
            raise ValueError("'batch' must be a positive integer "
                             "(got {}).".format(batch))

        if seed is not None and (not isinstance(seed, (int, np.integer))
                                 or seed < 0):
            raise ValueError("'seed' must be None or a non-negative integer "
                             "(got {}).".format(seed))

        self.trials = int(trials)
        self.seed = seed
        self.batch = int(batch)

    def batch_sizes(self, n: int) -> t.List[int]:
        """Split ``trials`` into batches whose state fits in memory."""
        size = max(1, min(self.batch, _BATCH_CELLS // max(n, 1)))
        full, rest = divmod(self.trials, size)
        return [size] * full + ([rest] if rest else [])

    def __repr__(self) -> str:
        return "McConfig(trials={}, seed={}, batch={})".format(
            self.trials, self.seed, self.batch)


class IncrementalEvaluator:
    """Keep f(X) of many runs up to date under single-coordinate updates.

    Subclasses hold per-run sufficient statistics; ``start`` computes them
    from the initial states and ``update`` applies the change of one
    coordinate in each of the selected runs.
    """
    def __init__(self, n: int) -> None:
        self.n = n

    def start(self, bits: np.ndarray) -> np.ndarray:
        """Initialize from states of shape (m, n); return f values."""
        raise NotImplementedError

    def update(self,
               rows: np.ndarray,
               coords: np.ndarray,
               old: np.ndarray,
               new: np.ndarray) -> np.ndarray:
        """Apply x(coords) <- new in ``rows``; return f values of ``rows``.

        ``coords`` are 0-based.
        """
        raise NotImplementedError


class _SumEvaluator(IncrementalEvaluator):
    """Running number of ones, thresholded by ``_decide``."""
    def _decide(self, sums: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def start(self, bits: np.ndarray) -> np.ndarray:
        self._sums = bits.sum(axis=1, dtype=np.int64)
        return self._decide(self._sums)

    def update(self, rows, coords, old, new):
        self._sums[rows] += new.astype(np.int64) - old.astype(np.int64)
        return self._decide(self._sums[rows])


class MajorityEvaluator(_SumEvaluator):
    """1 when at least half of the coordinates are one."""
    def _decide(self, sums):
        return (2 * sums >= self.n).astype(np.uint8)


class AndEvaluator(_SumEvaluator):
    def _decide(self, sums):
        return (sums == self.n).astype(np.uint8)


class OrEvaluator(_SumEvaluator):
    def _decide(self, sums):
        return (sums > 0).astype(np.uint8)


class ParityEvaluator(IncrementalEvaluator):
    """Parity bit of the number of ones; f = 1 on even parity."""
    def start(self, bits):
        self._parity = (bits.sum(axis=1, dtype=np.int64) % 2).astype(np.uint8)
        return 1 - self._parity

    def update(self, rows, coords, old, new):
        self._parity[rows] ^= old ^ new
        return 1 - self._parity[rows]


class DictatorEvaluator(IncrementalEvaluator):
    def start(self, bits):
        self._first = bits[:, 0].copy()
        return self._first.copy()

    def update(self, rows, coords, old, new):
        hit = coords == 0
        self._first[rows[hit]] = new[hit]
        return self._first[rows]


class TribesEvaluator(IncrementalEvaluator):
    """Ones per tribe and number of complete tribes."""
    def __init__(self, n: int, tribe_size: int) -> None:
        super().__init__(n)
        self.tribe_size = tribe_size

    def start(self, bits):
        blocks = bits.reshape(bits.shape[0], -1, self.tribe_size)
        self._ones = blocks.sum(axis=2, dtype=np.int64)
        self._full = (self._ones == self.tribe_size).sum(axis=1)
        return (self._full > 0).astype(np.uint8)

    def update(self, rows, coords, old, new):
        tribes = coords // self.tribe_size
        was_full = self._ones[rows, tribes] == self.tribe_size
        self._ones[rows, tribes] += new.astype(np.int64) - old.astype(np.int64)
        now_full = self._ones[rows, tribes] == self.tribe_size
        self._full[rows] += now_full.astype(np.int64) - was_full
        return (self._full[rows] > 0).astype(np.uint8)


class TableEvaluator(IncrementalEvaluator):
    """Current word of each run, looked up in a truth table."""
    def __init__(self, n: int, table: np.ndarray) -> None:
        super().__init__(n)
        self.table = table

    def start(self, bits):
        weights = np.left_shift(1, np.arange(self.n, dtype=np.int64))
        self._words = bits.astype(np.int64) @ weights
        return self.table[self._words]

    def update(self, rows, coords, old, new):
        delta = (new.astype(np.int64) - old.astype(np.int64)) << coords
        self._words[rows] += delta
        return self.table[self._words[rows]]


def incremental_evaluator(source: TypeFunctionSource
                          ) -> IncrementalEvaluator:
    """Build the O(1)-update evaluator of a family or a tabulated function.

    Functions that already hold a truth table are evaluated by table
    lookup; closed-form families use their sufficient statistic, which
    keeps simulations feasible for n far beyond the table gate.
    """
    if isinstance(source, _hypercube.BooleanFunction):
        if source.has_table or source.family is None:
            return TableEvaluator(source.n, source.truth_table())

        spec = source.family

    elif isinstance(source, _hypercube.FamilySpec):
        spec = source

    else:
        raise TypeError("'source' must be a BooleanFunction or a FamilySpec "
                        "(got {}).".format(type(source)))

    if spec.kind == "majority":
        return MajorityEvaluator(spec.n)

    if spec.kind == "parity":
        return ParityEvaluator(spec.n)

    if spec.kind == "dictator":
        return DictatorEvaluator(spec.n)

    if spec.kind == "tribes":
        return TribesEvaluator(spec.n, spec.tribe_size)

    if spec.kind == "and":
        return AndEvaluator(spec.n)

    if spec.kind == "or":
        return OrEvaluator(spec.n)

    raise ValueError("No incremental evaluator for family '{}'."
                     "".format(spec.kind))


def _source_dim(source: TypeFunctionSource) -> int:
    return source.n


class _BatchOutcome(t.NamedTuple):
    counts: np.ndarray
    jumps: np.ndarray
    final_bits: np.ndarray


def _run_batch(evaluator: IncrementalEvaluator,
               p: _hypercube.BiasParam,
               size: int,
               rng: np.random.Generator) -> _BatchOutcome:
    """Simulate ``size`` independent runs on (0, 1) in lockstep."""
    n = evaluator.n
    bits = _hypercube.ProductMeasure(p, n).sample_bits(size, rng)
    jumps = rng.poisson(n, size=size).astype(np.int64)

    values = evaluator.start(bits)
    counts = np.zeros(size, dtype=np.int64)

    for step in range(int(jumps.max(initial=0))):
        rows = np.flatnonzero(jumps > step)
        coords = rng.integers(0, n, size=rows.size)
        new = (rng.random(rows.size) < p.p).astype(np.uint8)
        old = bits[rows, coords]
        bits[rows, coords] = new

        new_values = evaluator.update(rows, coords, old, new)
        counts[rows] += new_values != values[rows]
        values[rows] = new_values

    return _BatchOutcome(counts=counts, jumps=jumps, final_bits=bits)


def sample_count(f: TypeFunctionSource,
                 p: t.Union[float, _hypercube.BiasParam],
                 seed: int) -> TrajectoryStats:
    """Simulate one run of the dynamics on (0, 1) and count switches of f.

    X_0 is drawn from the p-biased measure, T ~ Poisson(n) events follow,
    each resampling a uniform coordinate.
    """
    bias = _hypercube.BiasParam(p)
    rng = _utils.check_random_state(seed)
    outcome = _run_batch(incremental_evaluator(f), bias, 1, rng)

    return TrajectoryStats(count=int(outcome.counts[0]),
                           jumps=int(outcome.jumps[0]),
                           seed=int(seed))


def simulate_counts(f: TypeFunctionSource,
                    p: t.Union[float, _hypercube.BiasParam],
                    cfg: McConfig,
                    return_final: bool = False
                    ) -> t.Union[t.Tuple[np.ndarray, np.ndarray],
                                 t.Tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Switch counts and jump counts of ``cfg.trials`` independent runs.

    If ``return_final`` is True, the final states (as words when n <= 62)
    are returned as a third array.
    """
    bias = _hypercube.BiasParam(p)
    n = _source_dim(f)
    sizes = cfg.batch_sizes(n)
    streams = _utils.spawn_streams(cfg.seed, len(sizes))

    counts, jumps, finals = [], [], []

    for size, rng in zip(sizes, streams):
        outcome = _run_batch(incremental_evaluator(f), bias, size, rng)
        counts.append(outcome.counts)
        jumps.append(outcome.jumps)

        if return_final:
            weights = np.left_shift(1, np.arange(n, dtype=np.int64))
            finals.append(outcome.final_bits.astype(np.int64) @ weights)

    if return_final:
        return (np.concatenate(counts), np.concatenate(jumps),
                np.concatenate(finals))

    return np.concatenate(counts), np.concatenate(jumps)


class McStdErrors(t.NamedTuple):
    """Standard errors of the Monte Carlo estimates."""
    mean: float
    second_moment: float
    tail_table: np.ndarray


class McEstimate(t.NamedTuple):
    """Empirical moments and tail of C_f."""
    mean: float
    second_moment: float
    tail_table: np.ndarray
    standard_errors: McStdErrors


def estimate_from_counts(counts: np.ndarray,
                         k_max: t.Optional[int] = None) -> McEstimate:
    """Moments, tail table P(C >= k) for k = 0..k_max and their errors."""
    counts = np.asarray(counts, dtype=np.int64)
    trials = counts.size

    if k_max is None:
        k_max = int(counts.max(initial=0))

    squares = counts.astype(float)**2
    ddof = 1 if trials > 1 else 0

    freqs = np.bincount(counts, minlength=k_max + 1).astype(float) / trials
    tail = np.cumsum(freqs[::-1])[::-1][:k_max + 1]
    tail = np.concatenate((tail, np.zeros(k_max + 1 - tail.size)))

    errors = McStdErrors(
        mean=float(counts.std(ddof=ddof) / np.sqrt(trials)),
        second_moment=float(squares.std(ddof=ddof) / np.sqrt(trials)),
        tail_table=np.sqrt(tail * (1.0 - tail) / trials))

    return McEstimate(mean=float(counts.mean()),
                      second_moment=float(squares.mean()),
                      tail_table=tail,
                      standard_errors=errors)


def monte_carlo_moments(f: TypeFunctionSource,
                        p: t.Union[float, _hypercube.BiasParam],
                        cfg: McConfig,
                        k_max: t.Optional[int] = None) -> McEstimate:
    """Batched Monte Carlo estimates of E[C], E[C^2] and P(C >= k).

    Parameters
    ----------
    f : :obj:`BooleanFunction` or :obj:`FamilySpec`
        Function whose switches are counted. Families are simulated through
        their incremental evaluator, with no truth table.

    p : float or :obj:`BiasParam`
        Bias.

    cfg : :obj:`McConfig`
        Number of trials, seed and batch size.

    k_max : int, optional
        Last count of the tail table. Defaults to the largest observed
        count.

    Returns
    -------
    :obj:`McEstimate`
        Unpacks as (mean, second_moment, tail_table, standard_errors).
    """
    counts, _ = simulate_counts(f, p, cfg)
    return estimate_from_counts(counts, k_max=k_max)


def trajectory_frame(counts: np.ndarray, jumps: np.ndarray) -> pd.DataFrame:
    """Per-run rows (trial, count, jumps)."""
    return pd.DataFrame({
        "trial": np.arange(len(counts)),
        "count": counts,
        "jumps": jumps,
    })


def exact_count_distribution(
        f: _hypercube.BooleanFunction,
        p: t.Union[float, _hypercube.BiasParam],
        k_max: t.Optional[int] = None,
        policy: t.Optional[_moments.TruncationPolicy] = None
) -> CountDistribution:
    """Exact law of C_f through count-stratified vectors.

    Conditionally on T = k events, v_m(x) is the probability of m switches
    when starting from x. One more event maps v_m to
    Q_f v_m + Q_df v_(m-1), and the law of C_f mixes pi^T v_m over
    k ~ Poisson(n).

    Parameters
    ----------
    f : :obj:`BooleanFunction`
        Function with n <= COUNT_DIST_MAX_N.

    p : float or :obj:`BiasParam`
        Bias.

    k_max : int, optional
        Largest tabulated count. Defaults to the certified jump cutoff.

    policy : :obj:`TruncationPolicy`, optional
        The number of events is truncated at the smallest K with
        P(Poisson(n) > K) <= policy.tol.

    Returns
    -------
    :obj:`CountDistribution`
        Probabilities of 0..k_max and the leftover mass (events beyond K or
        counts beyond k_max).
    """
    bias = _hypercube.BiasParam(p)
    policy = policy if policy is not None else _moments.TruncationPolicy()
    n = f.n
    _utils.check_gate(n, _utils.COUNT_DIST_MAX_N, "exact_count_distribution")

    cutoff = _utils.poisson_cutoff(rate=n, tol=policy.tol,
                                   k_max=policy.cap(n),
                                   name="exact_count_distribution")

    if k_max is None:
        k_max = cutoff

    if k_max < 0:
        raise ValueError("'k_max' must be non-negative (got {})."
                         "".format(k_max))

    masks = _dynamics.boundary_masks(f)
    q_f = _dynamics.OperatorHandle("qf", bias, f=f, masks=masks)
    q_df = _dynamics.OperatorHandle("qdf", bias, f=f, masks=masks)

    weights = _hypercube.ProductMeasure(bias, n).weights()
    pmf = scipy.stats.poisson.pmf(np.arange(cutoff + 1), n)

    strata = np.zeros((k_max + 1, 1 << n), dtype=float)
    strata[0] = 1.0
    contrib = np.empty((cutoff + 1, k_max + 1), dtype=float)

    for k in range(cutoff + 1):
        contrib[k] = pmf[k] * (strata @ weights)
        moved = q_df.apply(strata[:-1])
        strata = q_f.apply(strata)
        strata[1:] += moved

    probs = np.array([_utils.stable_sum(contrib[:, m])
                      for m in range(k_max + 1)])
    leftover = max(0.0, 1.0 - _utils.stable_sum(probs))

    return CountDistribution(probs=probs, truncation_mass=leftover)


class StationarityResult(t.NamedTuple):
    """Chi-square test of the final states against pi."""
    statistic: float
    pvalue: float
    passed: bool


def stationarity_check(f_or_n: t.Union[TypeFunctionSource, int],
                       p: t.Union[float, _hypercube.BiasParam],
                       cfg: McConfig,
                       alpha: float = 1e-3) -> StationarityResult:
    """Test that the empirical law of X_1 over the runs is pi.

    The law of X_1 does not depend on f; a function argument only fixes the
    dimension.
    """
    if isinstance(f_or_n, (int, np.integer)):
        n = int(f_or_n)

    else:
        n = _source_dim(f_or_n)

    _utils.check_gate(n, STATIONARITY_MAX_N, "stationarity_check")

    bias = _hypercube.BiasParam(p)
    dictator = _hypercube.FamilySpec("dictator", n)
    _, _, finals = simulate_counts(dictator, bias, cfg, return_final=True)

    observed = np.bincount(finals, minlength=1 << n)
    expected = _hypercube.ProductMeasure(bias, n).weights() * cfg.trials

    statistic, pvalue = scipy.stats.chisquare(observed, expected)

    return StationarityResult(statistic=float(statistic),
                              pvalue=float(pvalue),
                              passed=bool(pvalue >= alpha))


def tail_confidence(tail_table: np.ndarray,
                    trials: int,
                    alpha: float = 0.05,
                    method: str = "wilson"
                    ) -> t.Tuple[np.ndarray, np.ndarray]:
    """Binomial confidence intervals of every empirical P(C >= k)."""
    successes = np.rint(np.asarray(tail_table, dtype=float) * trials)
    lower, upper = statsmodels.stats.proportion.proportion_confint(
        successes, trials, alpha=alpha, method=method)

    return np.asarray(lower, dtype=float), np.asarray(upper, dtype=float)
