"""Module dedicated to Monte Carlo and exact switch count law diagnostics."""
import typing as t

import numpy as np

import hypervol._utils as _utils
import hypervol._hypercube as _hypercube
import hypervol._moments as _moments
import hypervol._simulate as _simulate

DEFAULT_K_GRID = (1, 2, 4, 8, 16)  # type: t.Tuple[int, ...]


class MFEBoolSimulation:
    """Extract diagnostics from the Simulation group."""
    @classmethod
    def precompute_mc_counts(cls,
                             func: _hypercube.BooleanFunction,
                             p: float,
                             mc_trials: int = 100000,
                             mc_batch: int = 10000,
                             random_state: t.Optional[int] = None,
                             **kwargs) -> t.Dict[str, np.ndarray]:
        """Precompute the switch counts of independent simulated runs.

        Parameters
        ----------
        func : :obj:`BooleanFunction`
            Fitted Boolean function. Closed-form families are simulated
            with incremental evaluators, without any truth table.

        p : float
            Bias of the dynamics.

        mc_trials : int, optional
            Number of runs.

        mc_batch : int, optional
            Runs simulated together.

        random_state : int, optional
            Root seed of the per-batch streams.

        kwargs:
            Additional arguments and previous precomputed items. May
            speed up this precomputation.

        Returns
        -------
        dict
            The following precomputed item is returned:
                * ``mc_counts`` (:obj:`np.ndarray`): C_f of every run.
        """
        precomp_vals = {}  # type: t.Dict[str, np.ndarray]

        if "mc_counts" not in kwargs:
            cfg = _simulate.McConfig(trials=mc_trials, seed=random_state,
                                     batch=mc_batch)
            precomp_vals["mc_counts"], _ = _simulate.simulate_counts(
                func, p, cfg)

        return precomp_vals

    @classmethod
    def _get_counts(cls,
                    func: _hypercube.BooleanFunction,
                    p: float,
                    mc_trials: int,
                    mc_batch: int,
                    random_state: t.Optional[int],
                    mc_counts: t.Optional[np.ndarray]) -> np.ndarray:
        if mc_counts is not None:
            return mc_counts

        return cls.precompute_mc_counts(func, p, mc_trials, mc_batch,
                                        random_state)["mc_counts"]

    @classmethod
    def ft_mc_mean(cls,
                   func: _hypercube.BooleanFunction,
                   p: float,
                   mc_trials: int = 100000,
                   mc_batch: int = 10000,
                   random_state: t.Optional[int] = None,
                   mc_counts: t.Optional[np.ndarray] = None) -> float:
        """Empirical mean of the switch count."""
        counts = cls._get_counts(func, p, mc_trials, mc_batch, random_state,
                                 mc_counts)
        return float(np.mean(counts))

    @classmethod
    def ft_mc_mean_stderr(cls,
                          func: _hypercube.BooleanFunction,
                          p: float,
                          mc_trials: int = 100000,
                          mc_batch: int = 10000,
                          random_state: t.Optional[int] = None,
                          mc_counts: t.Optional[np.ndarray] = None) -> float:
        """Standard error of the empirical mean of the switch count."""
        counts = cls._get_counts(func, p, mc_trials, mc_batch, random_state,
                                 mc_counts)
        return _simulate.estimate_from_counts(counts).standard_errors.mean

    @classmethod
    def ft_mc_second_moment(cls,
                            func: _hypercube.BooleanFunction,
                            p: float,
                            mc_trials: int = 100000,
                            mc_batch: int = 10000,
                            random_state: t.Optional[int] = None,
                            mc_counts: t.Optional[np.ndarray] = None
                            ) -> float:
        """Empirical second moment of the switch count."""
        counts = cls._get_counts(func, p, mc_trials, mc_batch, random_state,
                                 mc_counts)
        return float(np.mean(counts.astype(float)**2))

    @classmethod
    def ft_mc_second_moment_stderr(
            cls,
            func: _hypercube.BooleanFunction,
            p: float,
            mc_trials: int = 100000,
            mc_batch: int = 10000,
            random_state: t.Optional[int] = None,
            mc_counts: t.Optional[np.ndarray] = None) -> float:
        """Standard error of the empirical second moment."""
        counts = cls._get_counts(func, p, mc_trials, mc_batch, random_state,
                                 mc_counts)
        return _simulate.estimate_from_counts(
            counts).standard_errors.second_moment

    @classmethod
    def ft_mc_tail(cls,
                   func: _hypercube.BooleanFunction,
                   p: float,
                   k_grid: t.Sequence[int] = DEFAULT_K_GRID,
                   mc_trials: int = 100000,
                   mc_batch: int = 10000,
                   random_state: t.Optional[int] = None,
                   mc_counts: t.Optional[np.ndarray] = None) -> np.ndarray:
        """Empirical tail P(C >= k) for every k of ``k_grid``.

        Parameters
        ----------
        func : :obj:`BooleanFunction`
            Fitted Boolean function.

        p : float
            Bias of the dynamics.

        k_grid : sequence of int, optional
            Thresholds of the tail.

        mc_trials : int, optional
            Number of runs.

        mc_batch : int, optional
            Runs simulated together.

        random_state : int, optional
            Root seed of the per-batch streams.

        mc_counts : :obj:`np.ndarray`, optional
            Simulated counts. Used to take advantage of precomputations.

        Returns
        -------
        :obj:`np.ndarray`
            Tail probabilities, in the order of ``k_grid``.
        """
        counts = cls._get_counts(func, p, mc_trials, mc_batch, random_state,
                                 mc_counts)
        k_grid = np.asarray(k_grid, dtype=np.int64)
        tail = _simulate.estimate_from_counts(
            counts, k_max=int(k_grid.max(initial=0))).tail_table

        return tail[k_grid]

    @classmethod
    def ft_exact_tail(cls,
                      func: _hypercube.BooleanFunction,
                      p: float,
                      k_grid: t.Sequence[int] = DEFAULT_K_GRID,
                      tol: float = 1e-12) -> np.ndarray:
        """Exact tail P(C >= k) for every k of ``k_grid`` (small n only)."""
        _utils.check_gate(func.n, _utils.COUNT_DIST_MAX_N, "ft_exact_tail")

        policy = _moments.TruncationPolicy(tol=tol)
        dist = _simulate.exact_count_distribution(func, p, policy=policy)
        tail = dist.tail_table()
        k_grid = np.asarray(k_grid, dtype=np.int64)

        return np.where(k_grid < tail.size,
                        tail[np.minimum(k_grid, tail.size - 1)],
                        dist.truncation_mass)
