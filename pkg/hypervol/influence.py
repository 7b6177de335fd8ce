"""Module dedicated to influence and sensitivity diagnostics."""
import typing as t

import numpy as np

import hypervol._utils as _utils
import hypervol._hypercube as _hypercube
import hypervol._dynamics as _dynamics
import hypervol._moments as _moments


class MFEBoolInfluence:
    """Extract diagnostics from the Influence group."""
    @classmethod
    def precompute_influence(cls,
                             func: _hypercube.BooleanFunction,
                             p: float,
                             exact_max_n: int = _utils.EXACT_MAX_N,
                             **kwargs) -> t.Dict[str, t.Any]:
        """Precompute boundary masks, sensitivity function and influences.

        Parameters
        ----------
        func : :obj:`BooleanFunction`
            Fitted Boolean function.

        p : float
            Bias of the product measure.

        exact_max_n : int, optional
            Largest dimension for exact precomputation.

        kwargs:
            Additional arguments and previous precomputed items. May
            speed up this precomputation.

        Returns
        -------
        dict
            The following precomputed items are returned:
                * ``masks`` (:obj:`list` of :obj:`np.ndarray`): boundary
                    edges of ``func`` along every coordinate.
                * ``sensitivity`` (:obj:`np.ndarray`): Q_df 1.
                * ``influence`` (:obj:`InfluenceProfile`): exact per-bit
                    influences.
        """
        precomp_vals = {}  # type: t.Dict[str, t.Any]

        if func.n > min(exact_max_n, _utils.EXACT_MAX_N):
            return precomp_vals

        masks = kwargs.get("masks")

        if masks is None:
            masks = _dynamics.boundary_masks(func)
            precomp_vals["masks"] = masks

        if "sensitivity" not in kwargs:
            precomp_vals["sensitivity"] = _dynamics.sensitivity_function(
                func, p, masks=masks)

        if "influence" not in kwargs:
            precomp_vals["influence"] = _dynamics.influence_profile(
                func, p, masks=masks)

        return precomp_vals

    @classmethod
    def _get_profile(
            cls,
            func: _hypercube.BooleanFunction,
            p: float,
            influence: t.Optional[_dynamics.InfluenceProfile] = None,
            exact_max_n: int = _utils.EXACT_MAX_N,
            trials: int = 100000,
            random_state: t.Optional[int] = None
    ) -> _dynamics.InfluenceProfile:
        """Exact profile when it fits, sampled estimate otherwise."""
        if influence is not None:
            return influence

        if func.n <= min(exact_max_n, _utils.EXACT_MAX_N):
            return _dynamics.influence_profile(func, p)

        return _dynamics.influence_profile(func, p, method="sample",
                                           trials=trials,
                                           random_state=random_state)

    @classmethod
    def ft_influence(
            cls,
            func: _hypercube.BooleanFunction,
            p: float,
            influence: t.Optional[_dynamics.InfluenceProfile] = None,
            exact_max_n: int = _utils.EXACT_MAX_N,
            trials: int = 100000,
            random_state: t.Optional[int] = None) -> np.ndarray:
        """Influence I_i(f) of every coordinate.

        I_i(f) is the probability that resampling coordinate i from a
        stationary state changes the value of f.

        Parameters
        ----------
        func : :obj:`BooleanFunction`
            Fitted Boolean function.

        p : float
            Bias of the product measure.

        influence : :obj:`InfluenceProfile`, optional
            Exact influences. Used to take advantage of precomputations.

        exact_max_n : int, optional
            Dimensions above this value use a sampled estimate.

        trials : int, optional
            Sample size of the estimate.

        random_state : int, optional
            Seed of the estimate.

        Returns
        -------
        :obj:`np.ndarray`
            Per-coordinate influences.
        """
        return cls._get_profile(func, p, influence, exact_max_n, trials,
                                random_state).per_bit

    @classmethod
    def ft_influence_normalized(
            cls,
            func: _hypercube.BooleanFunction,
            p: float,
            influence: t.Optional[_dynamics.InfluenceProfile] = None,
            exact_max_n: int = _utils.EXACT_MAX_N,
            trials: int = 100000,
            random_state: t.Optional[int] = None) -> np.ndarray:
        """Influences divided by 2p(1 - p), i.e. flip probabilities of f."""
        return cls._get_profile(func, p, influence, exact_max_n, trials,
                                random_state).normalized

    @classmethod
    def ft_total_influence(
            cls,
            func: _hypercube.BooleanFunction,
            p: float,
            influence: t.Optional[_dynamics.InfluenceProfile] = None,
            exact_max_n: int = _utils.EXACT_MAX_N,
            trials: int = 100000,
            random_state: t.Optional[int] = None) -> float:
        """Total influence I(f), which equals the expected switch count."""
        return cls._get_profile(func, p, influence, exact_max_n, trials,
                                random_state).total

    @classmethod
    def ft_influence_sq_sum(
            cls,
            func: _hypercube.BooleanFunction,
            p: float,
            influence: t.Optional[_dynamics.InfluenceProfile] = None,
            exact_max_n: int = _utils.EXACT_MAX_N,
            trials: int = 100000,
            random_state: t.Optional[int] = None) -> float:
        """Sum of squared influences."""
        return cls._get_profile(func, p, influence, exact_max_n, trials,
                                random_state).sq_sum

    @classmethod
    def ft_sensitivity(
            cls,
            func: _hypercube.BooleanFunction,
            p: float,
            sensitivity: t.Optional[np.ndarray] = None) -> np.ndarray:
        """Sensitivity function Q_df 1 at every point of the hypercube.

        Parameters
        ----------
        func : :obj:`BooleanFunction`
            Fitted Boolean function (n <= EXACT_MAX_N).

        p : float
            Bias of the product measure.

        sensitivity : :obj:`np.ndarray`, optional
            Q_df 1. Used to take advantage of precomputations.

        Returns
        -------
        :obj:`np.ndarray`
            Weighted number of boundary neighbours of every point.
        """
        if sensitivity is None:
            sensitivity = _dynamics.sensitivity_function(func, p)

        return sensitivity

    @classmethod
    def ft_regularity_check(cls,
                            func: _hypercube.BooleanFunction,
                            p: float,
                            d_const: float = 0.4) -> float:
        """Outcome of the regularity implication for constant D.

        For a regular f with sum I_i^2 > D^2, checks I(f) >= D sqrt(n).
        Returns 1 when it holds, 0 when it fails and NaN when it does not
        apply.
        """
        outcome = _moments.regularity_influence_bound(func, p, d_const)

        if outcome.holds is None:
            return np.nan

        return float(outcome.holds)
