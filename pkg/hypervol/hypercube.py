"""Module dedicated to basic diagnostics of a Boolean function under pi_p."""
import typing as t

import numpy as np

import hypervol._utils as _utils
import hypervol._hypercube as _hypercube
import hypervol._dynamics as _dynamics


class MFEBoolHypercube:
    """Extract diagnostics from the Hypercube group."""
    @classmethod
    def precompute_measure(cls,
                           func: _hypercube.BooleanFunction,
                           p: float,
                           exact_max_n: int = _utils.EXACT_MAX_N,
                           **kwargs) -> t.Dict[str, np.ndarray]:
        """Precompute the p-biased weights and the truth table.

        Parameters
        ----------
        func : :obj:`BooleanFunction`
            Fitted Boolean function.

        p : float
            Bias of the product measure.

        exact_max_n : int, optional
            Largest dimension for which the weights are materialized.

        kwargs:
            Additional arguments and previous precomputed items. May
            speed up this precomputation.

        Returns
        -------
        dict
            The following precomputed items are returned:
                * ``weights`` (:obj:`np.ndarray`): pi_p weight of every point,
                    indexed by little-endian word.
                * ``table`` (:obj:`np.ndarray`): truth table of ``func``.
        """
        precomp_vals = {}  # type: t.Dict[str, np.ndarray]

        if func.n > min(exact_max_n, _utils.EXACT_MAX_N):
            return precomp_vals

        if "weights" not in kwargs:
            precomp_vals["weights"] = _hypercube.ProductMeasure(
                p, func.n).weights()

        if "table" not in kwargs:
            precomp_vals["table"] = func.truth_table()

        return precomp_vals

    @classmethod
    def ft_dim(cls, func: _hypercube.BooleanFunction) -> int:
        """Dimension n of the hypercube."""
        return func.n

    @classmethod
    def ft_bias(cls, p: float) -> float:
        """Bias p of the product measure."""
        return float(p)

    @classmethod
    def ft_prob_one(cls,
                    func: _hypercube.BooleanFunction,
                    p: float,
                    weights: t.Optional[np.ndarray] = None,
                    table: t.Optional[np.ndarray] = None,
                    trials: int = 100000,
                    random_state: t.Optional[int] = None) -> float:
        """Probability P(f = 1) under the p-biased measure.

        Computed exactly when the truth table fits, estimated from
        ``trials`` samples otherwise.

        Parameters
        ----------
        func : :obj:`BooleanFunction`
            Fitted Boolean function.

        p : float
            Bias of the product measure.

        weights : :obj:`np.ndarray`, optional
            Weights of every point. Used to take advantage of
            precomputations.

        table : :obj:`np.ndarray`, optional
            Truth table of ``func``. Used to take advantage of
            precomputations.

        trials : int, optional
            Sample size of the estimate used beyond the exact gate.

        random_state : int, optional
            Seed of the sample estimate.

        Returns
        -------
        float
            P(f = 1).
        """
        if weights is not None and table is not None:
            return _utils.stable_dot(weights, table)

        value, _ = _hypercube.nondegeneracy(func, p, trials=trials,
                                            random_state=random_state)
        return value

    @classmethod
    def ft_variance(cls,
                    func: _hypercube.BooleanFunction,
                    p: float,
                    weights: t.Optional[np.ndarray] = None,
                    table: t.Optional[np.ndarray] = None) -> float:
        """Variance of f under the p-biased measure, P(f=1) (1 - P(f=1))."""
        prob = cls.ft_prob_one(func, p, weights=weights, table=table)
        return prob * (1.0 - prob)

    @classmethod
    def ft_is_increasing(cls, func: _hypercube.BooleanFunction) -> int:
        """1 if f is monotone under the coordinatewise order, 0 otherwise."""
        return int(_hypercube.is_increasing(func))

    @classmethod
    def ft_is_regular(cls,
                      func: _hypercube.BooleanFunction,
                      p: float,
                      atol: float = 1e-10) -> int:
        """1 if every coordinate has the same influence, 0 otherwise.

        Parameters
        ----------
        func : :obj:`BooleanFunction`
            Fitted Boolean function.

        p : float
            Bias of the product measure.

        atol : float, optional
            Largest spread between influences still taken as equal.

        Returns
        -------
        int
            Regularity indicator.
        """
        return int(_dynamics.is_regular(func, p, atol=atol))
