"""Module dedicated to p-biased Fourier-Walsh diagnostics."""
import typing as t

import numpy as np

import hypervol._utils as _utils
import hypervol._hypercube as _hypercube
import hypervol._spectral as _spectral
import hypervol._dynamics as _dynamics


class MFEBoolSpectral:
    """Extract diagnostics from the Spectral group."""
    @classmethod
    def precompute_spectrum(cls,
                            func: _hypercube.BooleanFunction,
                            p: float,
                            exact_max_n: int = _utils.EXACT_MAX_N,
                            **kwargs) -> t.Dict[str, _spectral.Spectrum]:
        """Precompute the p-biased Fourier-Walsh spectrum of ``func``.

        Parameters
        ----------
        func : :obj:`BooleanFunction`
            Fitted Boolean function.

        p : float
            Bias of the basis.

        exact_max_n : int, optional
            Largest dimension for exact precomputation.

        kwargs:
            Additional arguments and previous precomputed items. May
            speed up this precomputation.

        Returns
        -------
        dict
            The following precomputed item is returned:
                * ``spectrum`` (:obj:`Spectrum`): every coefficient f_hat(S).
        """
        precomp_vals = {}  # type: t.Dict[str, _spectral.Spectrum]

        if func.n <= min(exact_max_n, _utils.EXACT_MAX_N) and (
                "spectrum" not in kwargs):
            precomp_vals["spectrum"] = _spectral.transform(func, p)

        return precomp_vals

    @classmethod
    def ft_level_weights(
            cls,
            func: _hypercube.BooleanFunction,
            p: float,
            spectrum: t.Optional[_spectral.Spectrum] = None) -> np.ndarray:
        """Spectral weight sum_{|S| = k} f_hat(S)^2 of every level k.

        Parameters
        ----------
        func : :obj:`BooleanFunction`
            Fitted Boolean function.

        p : float
            Bias of the basis.

        spectrum : :obj:`Spectrum`, optional
            Spectrum of ``func``. Used to take advantage of precomputations.

        Returns
        -------
        :obj:`np.ndarray`
            Weights of levels 0..n. They add up to P(f = 1).
        """
        if spectrum is None:
            spectrum = _spectral.transform(func, p)

        return _spectral.level_weights(spectrum)

    @classmethod
    def ft_degree(cls,
                  func: _hypercube.BooleanFunction,
                  p: float,
                  atol: float = 1e-12,
                  spectrum: t.Optional[_spectral.Spectrum] = None) -> int:
        """Largest |S| whose coefficient exceeds ``atol`` in absolute value."""
        if spectrum is None:
            spectrum = _spectral.transform(func, p)

        sizes = _utils.popcount(_utils.all_words(func.n))
        support = np.abs(spectrum.coeffs) > atol

        return int(sizes[support].max(initial=0))

    @classmethod
    def ft_noise_stability(
            cls,
            func: _hypercube.BooleanFunction,
            p: float,
            rho: float = 0.5,
            spectrum: t.Optional[_spectral.Spectrum] = None) -> float:
        """Noise stability sum_S rho^|S| f_hat(S)^2.

        Parameters
        ----------
        func : :obj:`BooleanFunction`
            Fitted Boolean function.

        p : float
            Bias of the basis.

        rho : float, optional
            Correlation parameter in [-1, 1].

        spectrum : :obj:`Spectrum`, optional
            Spectrum of ``func``. Used to take advantage of precomputations.

        Returns
        -------
        float
            E[f(X) f(Y)] for rho-correlated p-biased X and Y.
        """
        if spectrum is None:
            spectrum = _spectral.transform(func, p)

        return _spectral.noise_stability(spectrum, rho)

    @classmethod
    def ft_pairing(cls,
                   func: _hypercube.BooleanFunction,
                   p: float,
                   sensitivity: t.Optional[np.ndarray] = None) -> np.ndarray:
        """Scaled boundary pairings n pi^T Q_df chi_S over every S.

        The entry of the empty set equals the expected switch count.
        """
        return func.n * _dynamics.pairing_all(func, p,
                                              sensitivity=sensitivity)
