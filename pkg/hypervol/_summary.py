"""Summary functions that fold multi-valued diagnostics into scalars.

Per-coordinate influences, level weights and tail tables are arrays; the
extractor combines them with the functions registered here.

Attributes:
    SUMMARY_METHODS (:obj:`Dict`): summary function names linked to the
        callables implementing them. Each takes a 1-d array of finite or
        nan values.
"""
import typing as t
import collections

import scipy.stats
import numpy as np

TypeNumeric = t.Union[int, float, np.number]
"""Type annotation for a numeric type (int, float, np.number)."""

TypeValList = t.Sequence[TypeNumeric]
"""Type annotation for a sequence of numeric type elements."""


def sum_quantiles(values: TypeValList) -> np.ndarray:
    """Minimum, first quartile, median, third quartile and maximum.

    Args:
        values (:obj:`sequence` of numerics): values to calculate quartiles.

    Returns:
        np.ndarray: the five values, necessarily in this order.
    """
    if len(values) == 0:
        return np.full(5, fill_value=np.nan)

    return np.quantile(values, (0.00, 0.25, 0.50, 0.75, 1.00))


def sum_std(values: TypeValList, ddof: int = 1) -> float:
    """Standard deviation; nan for fewer than ``ddof + 1`` values."""
    if len(values) <= ddof:
        return np.nan

    return float(np.std(values, ddof=ddof))


def sum_var(values: TypeValList, ddof: int = 1) -> float:
    if len(values) <= ddof:
        return np.nan

    return float(np.var(values, ddof=ddof))


def sum_sum(values: TypeValList) -> float:
    if len(values) == 0:
        return np.nan

    return float(np.sum(values))


def sum_entropy(values: TypeValList, base: float = 2.0) -> float:
    """Shannon entropy of the nonnegative ``values`` after normalization.

    Applied to influences, it measures how spread the sensitivity is over
    the coordinates: log2(n) for a regular function, 0 for a dictator.
    """
    values = np.asarray(values, dtype=float)
    values = values[~np.isnan(values)]

    if values.size == 0 or np.any(values < 0) or not np.any(values > 0):
        return np.nan

    return float(scipy.stats.entropy(values, base=base))


def sum_powersum(values: TypeValList, p: int = 2) -> float:
    """Sum of ``values`` raised to ``p``; ``p=2`` gives sum of I_i^2."""
    if len(values) == 0:
        return np.nan

    return float(np.sum(np.power(values, p)))


SUMMARY_METHODS = collections.OrderedDict((
    ("mean", np.mean),
    ("sd", sum_std),
    ("var", sum_var),
    ("count", len),
    ("iq_range", scipy.stats.iqr),
    ("max", np.max),
    ("median", np.median),
    ("min", np.min),
    ("quantiles", sum_quantiles),
    ("range", np.ptp),
    ("sum", sum_sum),
    ("entropy", sum_entropy),
    ("powersum", sum_powersum),
))
