"""Utility functions used ubiquitously over this library source code.

Attributes:
    EXACT_MAX_N (:obj:`int`): largest dimension for which truth tables,
        spectra and matrix-free operators are materialized.

    SERIES_MAX_N (:obj:`int`): largest dimension for the series and Fourier
        routes of the second moment.

    PAIRING_MAX_N (:obj:`int`): largest dimension for the direct, sensitivity
        and increasing routes of the boundary pairing.

    GENERAL_ROUTE_MAX_N (:obj:`int`): largest dimension for the double-subset
        route of the boundary pairing and for the product coefficient.

    COUNT_DIST_MAX_N (:obj:`int`): largest dimension for the exact switch
        count distribution engine.

    INCREASING_CHECK_MAX_N (:obj:`int`): largest dimension for the
        monotonicity predicate.

    EIGEN_CHECK_MAX_N (:obj:`int`): largest dimension for the eigenvector
        residual of the jump-chain operator.
"""
import typing as t
import math

import numpy as np
import scipy.stats

EXACT_MAX_N = 20

SERIES_MAX_N = 14

PAIRING_MAX_N = 12

GENERAL_ROUTE_MAX_N = 8

COUNT_DIST_MAX_N = 12

INCREASING_CHECK_MAX_N = 24

EIGEN_CHECK_MAX_N = 16


class GateError(ValueError):
    """An exact routine was asked for a dimension beyond its gate."""


class TruncationError(RuntimeError):
    """A series or Poisson truncation could not be certified."""


class ContractError(ValueError):
    """A routine was called outside of its mathematical contract."""


class RouteMismatchError(AssertionError):
    """Independent computation routes disagree beyond tolerance."""


def check_gate(n: int, max_n: int, name: str) -> None:
    """Raise ``GateError`` if ``n`` is larger than ``max_n``."""
    if n > max_n:
        raise GateError("'{}' is gated at n <= {} (got n={})."
                        "".format(name, max_n, n))


def check_index(i: int, n: int) -> None:
    """Check that ``i`` is a valid 1-based coordinate of {0,1}^n."""
    if not isinstance(i, (int, np.integer)) or isinstance(i, bool):
        raise TypeError("'i' must be an integer (got {}).".format(type(i)))

    if not 1 <= i <= n:
        raise ValueError("'i' must be in [1, {}] range (got {})."
                         "".format(n, i))


def all_words(n: int) -> np.ndarray:
    """Every point of {0,1}^n as its little-endian integer word."""
    return np.arange(1 << n, dtype=np.int64)


def popcount(words: np.ndarray) -> np.ndarray:
    """Vectorized population count of non-negative integer words."""
    words = np.asarray(words, dtype=np.int64)
    as_bytes = words.astype("<u8").view(np.uint8).reshape(*words.shape, 8)
    return np.unpackbits(as_bytes, axis=-1).sum(axis=-1).astype(np.int64)


def bits_matrix(n: int) -> np.ndarray:
    """Matrix of shape (2^n, n) whose row ``x`` holds x(1), ..., x(n)."""
    words = all_words(n)
    shifts = np.arange(n, dtype=np.int64)
    return ((words[:, np.newaxis] >> shifts) & 1).astype(np.uint8)


def pair_shape(n: int, i: int) -> t.Tuple[int, int, int]:
    """Shape that exposes coordinate ``i`` of a length-2^n vector.

    Reshaping a vector indexed by little-endian words to this shape puts
    x(i) = 0 at index 0 and x(i) = 1 at index 1 of the middle axis, so
    flipping the middle axis realizes x -> x xor e_i.
    """
    return 1 << (n - i), 2, 1 << (i - 1)


def submasks(mask: int) -> np.ndarray:
    """All submasks of ``mask`` (including 0 and ``mask``), ascending."""
    positions = [pos for pos in range(mask.bit_length()) if mask >> pos & 1]
    inds = np.arange(1 << len(positions), dtype=np.int64)
    res = np.zeros(inds.size, dtype=np.int64)

    for j, pos in enumerate(positions):
        res |= ((inds >> j) & 1) << pos

    return res


def stable_sum(values: t.Union[np.ndarray, t.Iterable[float]]) -> float:
    """Compensated (exactly rounded) summation."""
    return math.fsum(np.asarray(values, dtype=float).ravel())


def stable_dot(arr_a: np.ndarray, arr_b: np.ndarray) -> float:
    """Inner product accumulated with compensated summation."""
    return stable_sum(np.asarray(arr_a) * np.asarray(arr_b))


def poisson_cutoff(rate: float,
                   tol: float,
                   k_max: int,
                   scale: float = 1.0,
                   name: str = "series") -> int:
    """Smallest ``K`` such that ``scale * P(Poisson(rate) > K) <= tol``.

    Raises ``TruncationError`` if no ``K <= k_max`` satisfies the bound.
    """
    if rate <= 0 or scale <= 0:
        return 0

    ks = np.arange(k_max + 1)
    tails = scale * scipy.stats.poisson.sf(ks, rate)
    certified = np.flatnonzero(tails <= tol)

    if certified.size == 0:
        raise TruncationError(
            "Can't certify the '{}' truncation: tail bound {:.3e} exceeds "
            "tol={:.1e} at k_max={}.".format(name, tails[-1], tol, k_max))

    return int(certified[0])


def exp_series_tail(rate: float, cutoff: int) -> float:
    """Bound ``sum_{k > cutoff} rate^k / k!``, i.e. e^rate P(Poisson > K)."""
    if rate <= 0:
        return 0.0

    return float(np.exp(rate + scipy.stats.poisson.logsf(cutoff, rate)))


def check_random_state(
        random_state: t.Optional[t.Union[int, np.random.Generator]] = None
) -> np.random.Generator:
    """Turn ``random_state`` into a counter-based (Philox) generator."""
    if isinstance(random_state, np.random.Generator):
        return random_state

    if random_state is not None and (
            not isinstance(random_state, (int, np.integer))
            or isinstance(random_state, bool)):
        raise TypeError("'random_state' must be None, an integer or a "
                        "numpy Generator (got {}).".format(type(random_state)))

    return np.random.Generator(np.random.Philox(random_state))


def spawn_streams(seed: t.Optional[int],
                  count: int) -> t.List[np.random.Generator]:
    """Split ``seed`` into ``count`` independent Philox streams."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.Generator(np.random.Philox(child))
            for child in children]
