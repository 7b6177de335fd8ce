"""Main module for extracting switch count diagnostics of Boolean functions."""
import typing as t
import collections.abc
import shutil
import time

import texttable
import numpy as np

import hypervol._internal as _internal
import hypervol._utils as _utils
import hypervol._hypercube as _hypercube
import hypervol._moments as _moments
import hypervol.simulation as simulation

_TypeResult = t.Tuple[t.List[str], t.List[t.Any], t.List[float]]
"""Names, values and times of extracted diagnostics."""


class VolMFE:
    """Core class for the switch count diagnostics of a Boolean function.

    Attributes
    ----------
    func : :obj:`BooleanFunction`
        Fitted Boolean function.

    p : float
        Fitted bias of the dynamics.

    groups : :obj:`tuple` of :obj:`str`
        Diagnostic groups loaded in the model at instantiation.

    inserted_group_dep : :obj:`frozenset` of :obj:`str`
        Groups added only because a selected group depends on them.

    features : :obj:`tuple` of :obj:`str`
        Diagnostic method names available for extraction, from the selected
        groups and the diagnostics listed at instantiation.

    summary : :obj:`tuple` of :obj:`str`
        Summary functions used for multi-valued diagnostics.
    """
    def __init__(self,
                 groups: t.Union[str, t.Iterable[str]] = "default",
                 features: t.Union[str, t.Iterable[str]] = "all",
                 summary: t.Union[str, t.Iterable[str]] = ("mean", "sd"),
                 measure_time: t.Optional[str] = None,
                 wildcard: str = "all",
                 theta_grid: t.Sequence[float] = _moments.DEFAULT_THETA_GRID,
                 k_grid: t.Sequence[int] = simulation.DEFAULT_K_GRID,
                 mc_trials: int = 100000,
                 mc_batch: int = 10000,
                 exact_max_n: int = _utils.EXACT_MAX_N,
                 tol: float = 1e-12,
                 suppress_warnings: bool = False,
                 random_state: t.Optional[int] = None) -> None:
        """Diagnostics of the resampling dynamics of a Boolean function.

        Call ``fit`` with the function and the bias first, then ``extract``.

        Parameters
        ----------
        groups : :obj:`Iterable` of :obj:`str` or :obj:`str`
            A collection or a single diagnostic group name. Use the method
            ``valid_groups`` to get all available groups. ``default`` selects
            every exact group, leaving ``simulation`` out. Groups needed by
            the selected ones are added automatically.

            The value provided by the argument ``wildcard`` selects every
            group.

        features : :obj:`Iterable` of :obj:`str` or :obj:`str`, optional
            A collection or a single diagnostic name. Only diagnostics of the
            selected ``groups`` are gathered. Use ``valid_diagnostics`` or
            ``diagnostic_description`` to list them.

        summary : :obj:`Iterable` of :obj:`str` or :obj:`str`, optional
            Summary functions applied to every multi-valued diagnostic (such
            as per-bit influences or tail tables). If empty, multi-valued
            diagnostics are returned as arrays. Use ``valid_summary`` to list
            the available ones.

        measure_time : :obj:`str`, optional
            Options for measuring the time elapsed during extraction:

                1. ``avg``: average time of each diagnostic (total time
                   divided by the number of values), without summarization.
                2. ``avg_summ``: as ``avg``, including summarization.
                3. ``total``: total time of each diagnostic, without
                   summarization.
                4. ``total_summ``: total time of each diagnostic, including
                   summarization.

        wildcard : :obj:`str`, optional
            Value used as ``select all`` for ``groups``, ``features`` and
            ``summary``.

        theta_grid : sequence of float, optional
            Values of theta of the anti-concentration bounds, each in (0, 1).

        k_grid : sequence of int, optional
            Thresholds k of the tail tables P(C >= k).

        mc_trials : int, optional
            Number of simulated runs of the ``simulation`` group, also the
            sample size of sampled estimates beyond the exact gate.

        mc_batch : int, optional
            Runs simulated together in one vectorized batch.

        exact_max_n : int, optional
            Largest dimension for exact precomputations. It can only lower
            the built-in gate.

        tol : float, optional
            Truncation tolerance of the power series.

        suppress_warnings : :obj:`bool`, optional
            If True, then ignore all warnings invoked at the instantiation
            time.

        random_state : :obj:`int`, optional
            Root seed of every random event. Keeps the runs reproducible.

        Examples
        --------
        >>> from hypervol.volmfe import VolMFE
        >>> model = VolMFE(groups=["influence", "moments"], summary=[])
        >>> names, vals = model.fit("majority:5", 0.5).extract()
        """
        self.groups, self.inserted_group_dep = _internal.resolve_groups(
            groups, wildcard=wildcard)

        self._ft_methods, self.groups = _internal.resolve_features(
            features, self.groups, wildcard=wildcard,
            suppress_warnings=suppress_warnings)

        self.features = tuple(mtd.name for mtd in self._ft_methods)

        self._sm_methods = _internal.resolve_summary(summary,
                                                     wildcard=wildcard)
        self.summary = tuple(mtd.name for mtd in self._sm_methods)

        self.timeopt = _internal.resolve_timeopt(measure_time)

        if random_state is not None and (
                isinstance(random_state, bool)
                or not isinstance(random_state, (int, np.integer))):
            raise ValueError("'random_state' must be None or an integer "
                             "(got {}).".format(random_state))

        theta_grid = tuple(float(theta) for theta in theta_grid)

        if not all(0.0 < theta < 1.0 for theta in theta_grid):
            raise ValueError("'theta_grid' values must be in (0, 1) "
                             "(got {}).".format(theta_grid))

        k_grid = tuple(int(k) for k in k_grid)

        if any(k < 0 for k in k_grid):
            raise ValueError("'k_grid' values must be non-negative "
                             "(got {}).".format(k_grid))

        for name, value in (("mc_trials", mc_trials), ("mc_batch", mc_batch),
                            ("exact_max_n", exact_max_n)):
            if not isinstance(value, (int, np.integer)) or value < 1:
                raise ValueError("'{}' must be a positive integer (got {})."
                                 "".format(name, value))

        if not 0.0 < tol < 1.0:
            raise ValueError("'tol' must be in (0, 1) (got {}).".format(tol))

        self.random_state = random_state
        self.theta_grid = theta_grid
        self.k_grid = k_grid
        self.mc_trials = int(mc_trials)
        self.mc_batch = int(mc_batch)
        self.exact_max_n = int(exact_max_n)
        self.tol = float(tol)

        self.func = None  # type: t.Optional[_hypercube.BooleanFunction]
        self.p = None  # type: t.Optional[float]

        # Arguments every diagnostic may take, set at fit time.
        self._fit_args = {}  # type: t.Dict[str, t.Any]
        self._precomp_args = {}  # type: t.Dict[str, t.Any]
        self._summary_args = {"ddof": 1}  # type: t.Dict[str, t.Any]

        self.time_precomp = -1.0
        self.time_extract = -1.0
        self.time_total = -1.0

    def _summarize(self,
                   values: t.Union[np.ndarray, t.Sequence],
                   ft_name: str,
                   verbose: int = 0,
                   suppress_warnings: bool = False,
                   **kwargs) -> _TypeResult:
        """Apply every loaded summary function to a multi-valued diagnostic.

        Summaries returning several values yield one entry per value,
        named ``diagnostic.summary.i``; only the first one carries the
        summary time.
        """
        names = []  # type: t.List[str]
        vals = []  # type: t.List[t.Any]
        times = []  # type: t.List[float]

        for mtd in self._sm_methods:
            if verbose >= 2:
                print(" {} Summarizing '{}' with '{}'...".format(
                    _internal.VERBOSE_BLOCK_MID_SYMBOL, ft_name, mtd.name),
                      end=" ")

            sm_kwargs = mtd.kwargs(self._summary_args,
                                   user=kwargs.get(mtd.name),
                                   suppress_warnings=suppress_warnings,
                                   check_mandatory=False)
            value, elapsed = _internal.timeit(_internal.summarize, values,
                                              mtd, sm_kwargs)

            if not suppress_warnings:
                _internal.check_summary_warnings(value, ft_name, mtd.name)

            if isinstance(value, np.ndarray):
                value = value.ravel().tolist()

            label = "{}.{}".format(ft_name, mtd.name)

            if (isinstance(value, collections.abc.Sequence)
                    and not isinstance(value, str)):
                names += ["{}.{}".format(label, i) for i in range(len(value))]
                vals += list(value)
                times += [elapsed] + [0.0] * (len(value) - 1)

            else:
                names.append(label)
                vals.append(value)
                times.append(elapsed)

            if verbose >= 2:
                print("Done.")

        return names, vals, times

    def _extract_all(self,
                     verbose: int = 0,
                     suppress_warnings: bool = False,
                     **kwargs) -> _TypeResult:
        """Call every loaded diagnostic method, summarizing arrays."""
        names = []  # type: t.List[str]
        vals = []  # type: t.List[t.Any]
        times = []  # type: t.List[float]

        total = len(self._ft_methods)
        skipped = 0

        for ind, mtd in enumerate(self._ft_methods, 1):
            try:
                ft_kwargs = mtd.kwargs(self._fit_args, self._precomp_args,
                                       user=kwargs.get(mtd.name),
                                       suppress_warnings=suppress_warnings)

            except RuntimeError:
                if verbose >= 2:
                    print("\nSkipped '{}' ({} of {}).".format(mtd.name, ind,
                                                              total))
                skipped += 1
                continue

            if verbose >= 2:
                print("\nExtracting '{}' ({} of {})...".format(mtd.name, ind,
                                                               total))

            value, elapsed = _internal.timeit(_internal.call_diagnostic, mtd,
                                              ft_kwargs, suppress_warnings)

            is_array = isinstance(value, (np.ndarray,
                                          collections.abc.Sequence))

            if is_array and len(value) and self._timeopt_type_is_avg():
                elapsed /= len(value)

            if is_array and self._sm_methods:
                sm_names, sm_vals, sm_times = self._summarize(
                    value, mtd.name, verbose=verbose,
                    suppress_warnings=suppress_warnings, **kwargs)

                names += sm_names
                vals += sm_vals
                times += self._combine_time(elapsed, sm_times)

            else:
                names.append(mtd.name)
                vals.append(value)
                times.append(elapsed)

            _internal.print_verbose_progress(
                cur_progress=100 * ind / total,
                cur_mtf_name=mtd.name,
                item_type="diagnostic",
                verbose=verbose)

        if verbose == 1:
            print("\r{:<{fill}}".format(
                "Process of diagnostic extraction finished.",
                fill=shutil.get_terminal_size()[0]))

        if verbose >= 2 and skipped:
            print("\nNote: skipped {} of {} diagnostics.".format(skipped,
                                                                total))

        return names, vals, times

    def _timeopt_type_is_avg(self) -> bool:
        return bool(self.timeopt) and self.timeopt.startswith(  # type: ignore
            _internal.TIMEOPT_AVG_PREFIX)

    def _timeopt_include_summary(self) -> bool:
        return bool(self.timeopt) and self.timeopt.endswith(  # type: ignore
            _internal.TIMEOPT_SUMMARY_SUFFIX)

    def _combine_time(self, time_ft: float,
                      times_sm: t.List[float]) -> t.List[float]:
        """Time of each summarized value.

        Every value gets the time of the diagnostic, plus the time of its
        summary when ``timeopt`` ends with ``summ``. Filler entries of
        multi-valued summaries stay zero.
        """
        sm_times = np.asarray(times_sm, dtype=float)
        combined = np.full(sm_times.size, time_ft)

        if self._timeopt_include_summary():
            combined += sm_times

        combined[sm_times == 0.0] = 0.0

        return combined.tolist()

    def fit(self,
            func: t.Union[_hypercube.BooleanFunction, str],
            p: float,
            precomp_groups: t.Optional[t.Union[str, t.Iterable[str]]] = "all",
            wildcard: str = "all",
            suppress_warnings: bool = False,
            verbose: int = 0,
            **kwargs) -> "VolMFE":
        """Fits a Boolean function and a bias into the model.

        Parameters
        ----------
        func : :obj:`BooleanFunction` or :obj:`str`
            Boolean function, or a function spec such as ``majority:9``,
            ``tribes:12:4`` or ``file:table.txt``.

        p : float
            Bias of the dynamics, in (0, 1).

        precomp_groups : :obj:`str` or :obj:`Iterable` of :obj:`str`, optional
            Groups whose shared values (truth table, spectrum, sensitivity
            function, influence profile, moments, simulated counts) are
            computed once and shared by every diagnostic method. None
            disables the precomputations.

        wildcard : :obj:`str`, optional
            Value used as ``select all`` for ``precomp_groups``.

        suppress_warnings : :obj:`bool`, optional
            If True, ignore all warnings invoked while fitting.

        verbose : :obj:`int`, optional
            If `1`, print a progress bar of the precomputations. If `2` or
            higher, log every step.

        **kwargs:
            Extra custom arguments of the precomputation methods. They may
            replace internal custom arguments with the same name.

        Returns
        -------
        self

        Raises
        ------
        ValueError
            If ``p`` is not in (0, 1) or ``func`` is a malformed spec.
        TypeError
            If ``func`` is neither a BooleanFunction nor a string.
        """
        self.func = _internal.check_func(func)
        self.p = float(_hypercube.BiasParam(p))

        if verbose >= 2:
            print("Fitted {} with p = {}.".format(self.func, self.p))

        self._fit_args = {
            "func": self.func,
            "p": self.p,
            "theta_grid": self.theta_grid,
            "k_grid": self.k_grid,
            "mc_trials": self.mc_trials,
            "mc_batch": self.mc_batch,
            "trials": self.mc_trials,
            "exact_max_n": self.exact_max_n,
            "tol": self.tol,
            "random_state": self.random_state,
        }

        _time_start = time.time()

        self._precomp_args = _internal.run_precomputations(
            precomp_groups,
            groups=self.groups,
            wildcard=wildcard,
            suppress_warnings=suppress_warnings,
            verbose=verbose,
            **{**self._fit_args, **kwargs})

        self.time_precomp = time.time() - _time_start

        if verbose >= 2:
            print("\nFinished precomputation process.",
                  " {} Total time elapsed: {:.8f} seconds".format(
                      _internal.VERBOSE_BLOCK_MID_SYMBOL, self.time_precomp),
                  " {} Got a total of {} precomputed values.".format(
                      _internal.VERBOSE_BLOCK_END_SYMBOL,
                      len(self._precomp_args)),
                  sep="\n")

        return self

    def extract(
            self,
            verbose: int = 0,
            suppress_warnings: bool = False,
            **kwargs) -> t.Tuple[t.List, ...]:
        """Extracts the diagnostics of the fitted function.

        Parameters
        ----------
        verbose : :obj:`int`, optional
            If == 1, show just the current progress, without line breaks.
            If >= 2, print every message of the extraction process.

        suppress_warnings : :obj:`bool`, optional
            If True, do not warn about diagnostics that could not be computed
            or about unknown custom arguments.

        kwargs:
            Custom arguments of diagnostic and summary methods, in the form
            {``mtd_name``: {``arg_name``: arg_value, ...}, ...}.

        Returns
        -------
        :obj:`tuple`(:obj:`list`, :obj:`list`)
            Diagnostic names (``diagnostic.summary`` for summarized ones) and
            values, sorted by name. If ``measure_time`` was given, a third
            list holds the time spent on each value.

            A diagnostic beyond the size gate of its exact routine, or
            outside its domain (e.g. an increasing-only route on a
            non-increasing function), is NaN.

        Raises
        ------
        TypeError
            If calling ``extract`` method before ``fit`` method.

        Examples
        --------
        >>> model = VolMFE(groups="spectral").fit("majority:5", 0.3)
        >>> res = model.extract(noise_stability={"rho": 0.9})
        """
        if self.func is None:
            raise TypeError("Fitted function not found. Call "
                            '"fit" method before "extract".')

        _time_start = time.time()

        names, vals, times = self._extract_all(
            verbose=verbose, suppress_warnings=suppress_warnings, **kwargs)

        self.time_extract = time.time() - _time_start
        self.time_total = self.time_extract + self.time_precomp

        order = sorted(range(len(names)), key=names.__getitem__)
        names = [names[ind] for ind in order]
        vals = [vals[ind] for ind in order]
        times = [times[ind] for ind in order]

        if verbose >= 2:
            print("\nDiagnostic extraction process done.",
                  " {} Time elapsed in total: {:.8f} seconds, {:.8f} of "
                  "them in precomputations.".format(
                      _internal.VERBOSE_BLOCK_MID_SYMBOL, self.time_total,
                      self.time_precomp),
                  " {} Total of {} values obtained.".format(
                      _internal.VERBOSE_BLOCK_END_SYMBOL, len(vals)),
                  sep="\n")

        if self.timeopt:
            return names, vals, times

        return names, vals

    def extract_report(self) -> t.Dict[str, t.Any]:
        """Every moment, bound and route residual of the fitted pair.

        Returns
        -------
        dict
            JSON-ready MomentReport fields plus ``function``, ``n`` and
            ``p``. Beyond the exact gate every value is None and the field
            names are listed in ``not_computed``.

        Raises
        ------
        TypeError
            If calling this method before ``fit``.
        """
        if self.func is None:
            raise TypeError("Fitted function not found. Call "
                            '"fit" method before "extract_report".')

        header = {
            "function": self.func.name,
            "n": self.func.n,
            "p": self.p,
        }

        if self.func.n > min(self.exact_max_n, _utils.EXACT_MAX_N):
            fields = [field for field in _moments.MomentReport._fields
                      if field not in ("residuals", "not_computed")]
            return {
                **header,
                **{field: None for field in fields},
                "residuals": {},
                "not_computed": fields,
            }

        policy = _moments.TruncationPolicy(tol=self.tol)
        report = _moments.moment_report(self.func, self.p,
                                        theta_grid=self.theta_grid,
                                        policy=policy)

        return {**header, **report.to_dict()}

    @classmethod
    def valid_groups(cls) -> t.Tuple[str, ...]:
        """Every diagnostic group of the package."""
        return _internal.VALID_GROUPS

    @classmethod
    def valid_summary(cls) -> t.Tuple[str, ...]:
        """Every summary function for multi-valued diagnostics."""
        return _internal.VALID_SUMMARY

    @classmethod
    def _groups_with_deps(cls,
                          groups: t.Optional[t.Union[str, t.Iterable[str]]]
                          ) -> t.Tuple[str, ...]:
        """Known groups among ``groups`` (every group if None), plus
        the groups they depend on."""
        if groups is None:
            return _internal.VALID_GROUPS

        wanted = {groups} if isinstance(groups, str) else set(groups)

        for alias, members in _internal.GROUP_ALIASES.items():
            if alias in wanted:
                wanted.update(members)

        wanted.intersection_update(_internal.VALID_GROUPS)
        wanted.update(_internal.group_prerequisites(wanted))

        return tuple(group for group in _internal.VALID_GROUPS
                     if group in wanted)

    @classmethod
    def valid_diagnostics(
            cls,
            groups: t.Optional[t.Union[str, t.Iterable[str]]] = None,
    ) -> t.Tuple[str, ...]:
        """Diagnostic names of ``groups`` and of their dependencies.

        Parameters
        ----------
        groups : :obj:`Sequence` of :obj:`str` or :obj:`str`, optional:
            A group name (see ``valid_groups``) or a sequence of them. If
            None, every diagnostic name is returned.
        """
        return tuple(mtd.name for group in cls._groups_with_deps(groups)
                     for mtd in _internal.group_methods(
                         group, _internal.MTF_PREFIX))

    @classmethod
    def diagnostic_description(
            cls,
            groups: t.Optional[t.Union[str, t.Iterable[str]]] = None,
            sort_by_group: bool = False,
            sort_by_mtf: bool = False,
            print_table: bool = True,
    ) -> t.Optional[t.Tuple[t.List[t.List[str]], str]]:
        """Print a table with groups, diagnostics and descriptions.

        Parameters
        ----------
        groups : sequence of str or str, optional:
            A group name or a sequence of them. If None, every group.

        sort_by_group: bool
            Sort table by group name.

        sort_by_mtf: bool
            Sort table by diagnostic name.

        print_table : bool
            If True the table is printed, otherwise it is returned.

        Returns
        -------
        tuple
            The table rows and its rendering, or None if printed.
        """
        for name, flag in (("sort_by_group", sort_by_group),
                           ("sort_by_mtf", sort_by_mtf),
                           ("print_table", print_table)):
            if not isinstance(flag, bool):
                raise TypeError("The parameter {} should be bool."
                                "".format(name))

        rows = [["Group", "Diagnostic name", "Description"]]

        for group in cls._groups_with_deps(groups):
            for mtd in _internal.group_methods(group, _internal.MTF_PREFIX):
                doc = str(mtd.method.__doc__).split("\n\n")[0]
                rows.append([group, mtd.name, " ".join(doc.split())])

        if sort_by_mtf:
            rows[1:] = sorted(rows[1:], key=lambda row: row[1])

        if sort_by_group:
            rows[1:] = sorted(rows[1:], key=lambda row: row[0])

        draw = texttable.Texttable().add_rows(rows).draw()

        if print_table:
            print(draw)
            return None

        return rows, draw
