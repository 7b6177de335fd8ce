"""Module dedicated to switch count moment diagnostics."""
import typing as t

import numpy as np

import hypervol._utils as _utils
import hypervol._hypercube as _hypercube
import hypervol._moments as _moments


class MFEBoolMoments:
    """Extract diagnostics from the Moments group."""
    @classmethod
    def precompute_moments(cls,
                           func: _hypercube.BooleanFunction,
                           p: float,
                           tol: float = 1e-12,
                           k_max: t.Optional[int] = None,
                           **kwargs) -> t.Dict[str, float]:
        """Precompute E[C_f] and the series value of E[C_f^2].

        Parameters
        ----------
        func : :obj:`BooleanFunction`
            Fitted Boolean function.

        p : float
            Bias of the dynamics.

        tol : float, optional
            Truncation tolerance of the series.

        k_max : int, optional
            Hard cap of the series index.

        kwargs:
            Additional arguments and previous precomputed items. May
            speed up this precomputation.

        Returns
        -------
        dict
            The following precomputed items are returned:
                * ``expected_count`` (:obj:`float`): E[C_f].
                * ``second_moment`` (:obj:`float`): E[C_f^2], series route.
        """
        precomp_vals = {}  # type: t.Dict[str, float]
        sens = kwargs.get("sensitivity")

        if func.n <= _utils.EXACT_MAX_N and "expected_count" not in kwargs:
            precomp_vals["expected_count"] = _moments.expected_count(
                func, p, sensitivity=sens)

        if func.n <= _utils.SERIES_MAX_N and "second_moment" not in kwargs:
            policy = _moments.TruncationPolicy(tol=tol, k_max=k_max)
            precomp_vals["second_moment"] = _moments.second_moment_series(
                func, p, policy=policy, sensitivity=sens)

        return precomp_vals

    @classmethod
    def ft_expected_count(cls,
                          func: _hypercube.BooleanFunction,
                          p: float,
                          expected_count: t.Optional[float] = None) -> float:
        """Expected number of switches E[C_f] = n pi^T Q_df 1."""
        if expected_count is None:
            expected_count = _moments.expected_count(func, p)

        return expected_count

    @classmethod
    def ft_second_moment(cls,
                         func: _hypercube.BooleanFunction,
                         p: float,
                         tol: float = 1e-12,
                         k_max: t.Optional[int] = None,
                         second_moment: t.Optional[float] = None) -> float:
        """Second moment E[C_f^2] through the certified power series.

        Parameters
        ----------
        func : :obj:`BooleanFunction`
            Fitted Boolean function (n <= SERIES_MAX_N).

        p : float
            Bias of the dynamics.

        tol : float, optional
            Truncation tolerance of the series.

        k_max : int, optional
            Hard cap of the series index.

        second_moment : float, optional
            Series value. Used to take advantage of precomputations.

        Returns
        -------
        float
            E[C_f^2].
        """
        if second_moment is None:
            policy = _moments.TruncationPolicy(tol=tol, k_max=k_max)
            second_moment = _moments.second_moment_series(func, p, policy)

        return second_moment

    @classmethod
    def ft_second_moment_fourier(
            cls,
            func: _hypercube.BooleanFunction,
            p: float,
            sensitivity: t.Optional[np.ndarray] = None) -> float:
        """Second moment E[C_f^2] through the boundary pairings."""
        return _moments.second_moment_fourier(func, p,
                                              sensitivity=sensitivity)

    @classmethod
    def ft_second_moment_increasing(cls,
                                    func: _hypercube.BooleanFunction,
                                    p: float,
                                    tol: float = 1e-12) -> float:
        """Second moment E[C_f^2] through the coefficients of f.

        Only defined for increasing functions.
        """
        policy = _moments.TruncationPolicy(tol=tol)
        return _moments.second_moment_increasing(func, p, policy)

    @classmethod
    def ft_count_variance(cls,
                          func: _hypercube.BooleanFunction,
                          p: float,
                          expected_count: t.Optional[float] = None,
                          second_moment: t.Optional[float] = None) -> float:
        """Variance of the switch count, E[C_f^2] - E[C_f]^2."""
        first = cls.ft_expected_count(func, p, expected_count)
        second = cls.ft_second_moment(func, p, second_moment=second_moment)
        return second - first**2

    @classmethod
    def ft_route_residual(cls,
                          func: _hypercube.BooleanFunction,
                          p: float,
                          second_moment: t.Optional[float] = None,
                          sensitivity: t.Optional[np.ndarray] = None) -> float:
        """Absolute gap between the series and pairing routes of E[C_f^2]."""
        series = cls.ft_second_moment(func, p, second_moment=second_moment)
        fourier = _moments.second_moment_fourier(func, p,
                                                 sensitivity=sensitivity)
        return abs(series - fourier)

    @classmethod
    def ft_pz_bound(
            cls,
            func: _hypercube.BooleanFunction,
            p: float,
            theta_grid: t.Sequence[float] = _moments.DEFAULT_THETA_GRID,
            expected_count: t.Optional[float] = None,
            second_moment: t.Optional[float] = None) -> np.ndarray:
        """Anti-concentration lower bounds of P(C > theta E[C]).

        Parameters
        ----------
        func : :obj:`BooleanFunction`
            Fitted Boolean function.

        p : float
            Bias of the dynamics.

        theta_grid : sequence of float, optional
            Values of theta, each in (0, 1).

        expected_count : float, optional
            E[C_f]. Used to take advantage of precomputations.

        second_moment : float, optional
            E[C_f^2]. Used to take advantage of precomputations.

        Returns
        -------
        :obj:`np.ndarray`
            (1 - theta) E[C]^2 / E[C^2] for every theta of the grid.
        """
        first = cls.ft_expected_count(func, p, expected_count)

        if first > 0.0:
            second_moment = cls.ft_second_moment(func, p,
                                                 second_moment=second_moment)

        return np.array([
            _moments.pz_lower_bound(func, p, theta, first=first,
                                    second=second_moment)
            for theta in theta_grid
        ])

    @classmethod
    def ft_increasing_upper(cls,
                            func: _hypercube.BooleanFunction,
                            p: float,
                            expected_count: t.Optional[float] = None
                            ) -> float:
        """Upper bound on E[C_f^2] valid for increasing functions."""
        return _moments.increasing_upper_bound(func, p, first=expected_count)

    @classmethod
    def ft_criterion_ratio(cls,
                           func: _hypercube.BooleanFunction,
                           p: float,
                           expected_count: t.Optional[float] = None) -> float:
        """Ratio p (1 - p) n Var_pi(f) / I(f)^2 of the non-tameness test.

        Small values support non-tameness of the sequence the function is
        taken from.
        """
        return _moments.criterion_ratio(func, p,
                                        total_influence=expected_count)
