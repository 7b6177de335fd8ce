"""Group registry and method plumbing of the diagnostics extractor.

Attributes:
    GROUP_REGISTRY (:obj:`dict`): every diagnostic group by name, in the
        order its precomputations run. Each entry holds the extractor class,
        the group it needs (or None) and whether ``default`` selects it.

    VALID_GROUPS (:obj:`tuple` of :obj:`str`): names of ``GROUP_REGISTRY``.

    DEFAULT_GROUP (:obj:`tuple` of :obj:`str`): groups selected by the
        ``default`` alias, i.e. every exact group.

    VALID_SUMMARY (:obj:`tuple` of :obj:`str`): summary functions for
        multi-valued diagnostics.

    VALID_TIMEOPT (:obj:`tuple` of :obj:`str`): options of ``measure_time``.
        ``avg`` options divide the time of a diagnostic by its number of
        values; ``summ`` options add the summarization time.

    MTF_PREFIX (:obj:`str`): prefix of diagnostic methods. The diagnostic
        ``total_influence`` is the method ``ft_total_influence``.

    PRECOMPUTE_PREFIX (:obj:`str`): prefix of precomputation methods, run
        at fit time. Their values are shared by every diagnostic method.
"""
import typing as t
import collections.abc
import inspect
import shutil
import time
import warnings

import numpy as np

import hypervol._utils as _utils
import hypervol._summary as _summary
import hypervol._hypercube as _hypercube

import hypervol.hypercube as hypercube
import hypervol.influence as influence
import hypervol.spectral as spectral
import hypervol.moments as moments
import hypervol.simulation as simulation


class GroupEntry(t.NamedTuple):
    """Extractor class of a group and the group it depends on."""
    extractor: t.Any
    requires: t.Optional[str]
    default: bool


GROUP_REGISTRY = {
    "hypercube": GroupEntry(hypercube.MFEBoolHypercube, None, True),
    "influence": GroupEntry(influence.MFEBoolInfluence, "hypercube", True),
    "spectral": GroupEntry(spectral.MFEBoolSpectral, None, True),
    "moments": GroupEntry(moments.MFEBoolMoments, "influence", True),
    "simulation": GroupEntry(simulation.MFEBoolSimulation, None, False),
}  # type: t.Dict[str, GroupEntry]

VALID_GROUPS = tuple(GROUP_REGISTRY)  # type: t.Tuple[str, ...]

DEFAULT_GROUP = tuple(
    name for name, entry in GROUP_REGISTRY.items()
    if entry.default)  # type: t.Tuple[str, ...]

GROUP_ALIASES = {"default": DEFAULT_GROUP}  # type: t.Dict[str, t.Tuple]

VALID_SUMMARY = tuple(_summary.SUMMARY_METHODS)  # type: t.Tuple[str, ...]

VALID_TIMEOPT = ("avg", "avg_summ", "total", "total_summ")

TIMEOPT_AVG_PREFIX = "avg"

TIMEOPT_SUMMARY_SUFFIX = "summ"

MTF_PREFIX = "ft_"

PRECOMPUTE_PREFIX = "precompute_"

TypeNumeric = t.TypeVar("TypeNumeric", int, float, np.number)
"""Generic numeric types returned by diagnostic methods."""

VERBOSE_BLOCK_MID_SYMBOL = "|"

VERBOSE_BLOCK_END_SYMBOL = "."

VERBOSE_WARNING_SYMBOL = "*"

_EXCEPTIONS = (
    ValueError,
    TypeError,
    MemoryError,
    ZeroDivisionError,
    AttributeError,
    OverflowError,
    np.linalg.LinAlgError,
    _utils.TruncationError,
)
"""Failures that turn a diagnostic into NaN instead of aborting extraction.

Gate and contract violations are ``ValueError`` subclasses.
"""


def warning_format(message: str,
                   category: t.Type[Warning],
                   filename: str,
                   lineno: int,
                   line: t.Optional[str] = None) -> str:
    """One-line warning format, marked by ``VERBOSE_WARNING_SYMBOL``."""
    # pylint: disable=W0613
    return " {} Warning: {}\n".format(VERBOSE_WARNING_SYMBOL, message)


warnings.formatwarning = warning_format


class BoundMethod(t.NamedTuple):
    """A diagnostic, precomputation or summary callable and its arguments.

    Attributes:
        name (:obj:`str`): name without prefix, as reported to the user.

        method (:obj:`callable`): the callable itself.

        args (:obj:`frozenset`): names of every argument.

        mandatory (:obj:`frozenset`): names of the arguments without a
            default value.

        returns_array (:obj:`bool`): True if the return annotation is an
            array type, so failures yield an empty array.
    """
    name: str
    method: t.Callable
    args: t.FrozenSet[str]
    mandatory: t.FrozenSet[str]
    returns_array: bool

    def kwargs(self,
               *sources: t.Optional[t.Dict[str, t.Any]],
               user: t.Optional[t.Dict[str, t.Any]] = None,
               suppress_warnings: bool = False,
               check_mandatory: bool = True) -> t.Dict[str, t.Any]:
        """Arguments of the call, taken from ``sources`` then ``user``.

        Later sources override earlier ones and ``user`` overrides all.
        Summary functions receive their values positionally, so they skip
        the mandatory check with ``check_mandatory=False``.

        Raises:
            RuntimeError: if some mandatory argument is missing.
        """
        merged = {}  # type: t.Dict[str, t.Any]

        for source in sources + (user, ):
            merged.update(source or {})

        picked = {key: val for key, val in merged.items() if key in self.args}

        if check_mandatory and not self.mandatory.issubset(picked):
            raise RuntimeError("Missing mandatory arguments {} of '{}'."
                               "".format(sorted(self.mandatory - set(picked)),
                                         self.name))

        if user and not suppress_warnings:
            for unknown in set(user).difference(self.args):
                warnings.warn("Unknown argument '{}' for method '{}'."
                              "".format(unknown, self.name), UserWarning)

        return picked


def bind(name: str, method: t.Callable) -> BoundMethod:
    """Introspect ``method`` into a :obj:`BoundMethod` named ``name``."""
    try:
        params = inspect.signature(method).parameters

    except ValueError:
        # Some numpy callables have no introspectable signature.
        return BoundMethod(name, method, frozenset({"values"}),
                           frozenset({"values"}), False)

    plain = {
        key: param for key, param in params.items()
        if param.kind not in (inspect.Parameter.VAR_KEYWORD,
                              inspect.Parameter.VAR_POSITIONAL)
    }
    mandatory = frozenset(key for key, param in plain.items()
                          if param.default is inspect.Parameter.empty)

    try:
        returned = t.get_type_hints(method).get("return", float)

    except (NameError, TypeError):
        returned = float

    return BoundMethod(name, method, frozenset(plain), mandatory,
                       hasattr(returned, "__len__"))


def group_methods(group: str, prefix: str) -> t.List[BoundMethod]:
    """Every method of ``group`` whose name starts with ``prefix``.

    The returned names have the prefix removed.
    """
    extractor = GROUP_REGISTRY[group].extractor

    return [
        bind(remove_prefix(name, prefix), method)
        for name, method in inspect.getmembers(extractor,
                                               predicate=inspect.ismethod)
        if name.startswith(prefix)
    ]


def _as_lower_set(values: t.Union[str, t.Iterable[str]]) -> t.Set[str]:
    if isinstance(values, str):
        values = (values, )

    if not isinstance(values, collections.abc.Iterable):
        raise TypeError("Expected a string or an iterable of strings "
                        "(got {}).".format(type(values)))

    return {str(val).lower() for val in values}


def group_prerequisites(groups: t.Iterable[str]) -> t.Set[str]:
    """Groups required, directly or not, by ``groups``."""
    required = set()  # type: t.Set[str]
    pending = [GROUP_REGISTRY[group].requires for group in groups
               if group in GROUP_REGISTRY]

    while pending:
        group = pending.pop()

        if group and group not in required:
            required.add(group)
            pending.append(GROUP_REGISTRY[group].requires)

    return required


def resolve_groups(groups: t.Union[str, t.Iterable[str]],
                   wildcard: str = "all"
                   ) -> t.Tuple[t.Tuple[str, ...], t.FrozenSet[str]]:
    """Validate ``groups`` and add the groups they depend on.

    Returns:
        tuple: selected groups in registry order, and the groups inserted
            as dependencies.

    Raises:
        ValueError: if ``groups`` is empty or names an unknown group.
    """
    if not groups:
        raise ValueError("'groups' can not be None nor empty.")

    requested = _as_lower_set(groups)

    if wildcard.lower() in requested:
        requested = set(VALID_GROUPS)

    for alias, members in GROUP_ALIASES.items():
        if alias in requested:
            requested.discard(alias)
            requested.update(members)

    unknown = requested.difference(VALID_GROUPS)

    if unknown:
        raise ValueError("Unknown groups: {}. Please select values in {}."
                         "".format(sorted(unknown), VALID_GROUPS))

    inserted = group_prerequisites(requested).difference(requested)
    selected = requested.union(inserted)

    return (tuple(group for group in VALID_GROUPS if group in selected),
            frozenset(inserted))


def resolve_features(
        features: t.Union[str, t.Iterable[str]],
        groups: t.Tuple[str, ...],
        wildcard: str = "all",
        suppress_warnings: bool = False,
) -> t.Tuple[t.Tuple[BoundMethod, ...], t.Tuple[str, ...]]:
    """Diagnostic methods of ``groups`` selected by ``features``.

    Returns:
        tuple: the selected methods, and the groups that contribute at
            least one of them (every group of ``groups`` for the wildcard).

    Raises:
        ValueError: if ``features`` is None or empty.
    """
    if not features:
        raise ValueError("'features' can not be None nor empty.")

    wanted = _as_lower_set(features)
    select_all = wildcard.lower() in wanted

    selected = []  # type: t.List[BoundMethod]
    contributing = []  # type: t.List[str]

    for group in groups:
        picked = [mtd for mtd in group_methods(group, MTF_PREFIX)
                  if select_all or mtd.name in wanted]

        if picked or select_all:
            contributing.append(group)

        selected += picked

    if not suppress_warnings and not select_all:
        for unknown in sorted(wanted.difference(mtd.name
                                                for mtd in selected)):
            warnings.warn("Unknown diagnostic '{}'. You can check available "
                          "diagnostic names with either 'valid_diagnostics()'"
                          " or 'diagnostic_description()' methods."
                          "".format(unknown), UserWarning)

    return tuple(selected), tuple(contributing)


def resolve_summary(summary: t.Optional[t.Union[str, t.Iterable[str]]],
                    wildcard: str = "all"
                    ) -> t.Tuple[BoundMethod, ...]:
    """Summary callables named by ``summary``, in ``VALID_SUMMARY`` order.

    Raises:
        ValueError: if some summary function is unknown.
    """
    if not summary:
        return tuple()

    wanted = _as_lower_set(summary)

    if wildcard.lower() in wanted:
        wanted = set(VALID_SUMMARY)

    unknown = wanted.difference(VALID_SUMMARY)

    if unknown:
        raise ValueError("Unknown summary function {}. Please select values "
                         "in {}.".format(sorted(unknown), VALID_SUMMARY))

    return tuple(bind(name, _summary.SUMMARY_METHODS[name])
                 for name in VALID_SUMMARY if name in wanted)


def resolve_timeopt(value: t.Optional[str]) -> t.Optional[str]:
    """Validate the ``measure_time`` option."""
    if value is None:
        return None

    if not isinstance(value, str):
        raise TypeError("'measure_time' must be a string or None (got {})."
                        "".format(type(value)))

    if value.lower() not in VALID_TIMEOPT:
        raise ValueError("Unknown 'measure_time' option '{}'. Please select "
                         "values in {}.".format(value, VALID_TIMEOPT))

    return value.lower()


def run_precomputations(
        precomp_groups: t.Optional[t.Union[str, t.Iterable[str]]],
        groups: t.Tuple[str, ...],
        wildcard: str = "all",
        suppress_warnings: bool = False,
        verbose: int = 0,
        **kwargs) -> t.Dict[str, t.Any]:
    """Run the precomputation methods of the selected groups.

    Groups run in registry order, and each method receives the values of
    the methods that ran before it, so the influence group reuses the
    truth table and the moments group reuses the sensitivity function.

    Args:
        precomp_groups (:obj:`iterable` of `str` or `str`): groups whose
            precomputations run. Groups outside ``groups`` are ignored.

        groups (:obj:`Tuple` of :obj:`str`): selected groups of the model.

        wildcard (:obj:`str`, optional): value standing for every group.

        suppress_warnings (:obj:`bool`, optional): if True, do not warn
            about unknown groups or failed precomputations.

        verbose (:obj:`int`, optional): `1` prints a progress bar, `2` or
            higher logs every step.

        **kwargs: arguments of the precomputation methods.

    Returns:
        dict: every precomputed value by name.
    """
    if not precomp_groups:
        return {}

    wanted = _as_lower_set(precomp_groups)

    if wildcard.lower() in wanted:
        wanted = set(groups)

    elif not suppress_warnings:
        for unknown in sorted(wanted.difference(groups)):
            warnings.warn("Unknown precomp_groups '{}'. You can check "
                          "available diagnostic groups using "
                          "'valid_groups()' method.".format(unknown),
                          UserWarning)

    methods = [mtd for group in VALID_GROUPS
               if group in wanted and group in groups
               for mtd in group_methods(group, PRECOMPUTE_PREFIX)]

    shared = {}  # type: t.Dict[str, t.Any]
    failures = 0

    for ind, mtd in enumerate(methods, 1):
        if verbose >= 2:
            print("\nStarted precomputing '{}'.".format(mtd.name))

        try:
            values = mtd.method(**{**kwargs, **shared})

        except _EXCEPTIONS as err:
            values = {}
            failures += 1

            if not suppress_warnings:
                warnings.warn("Precomputation '{}' failed and is skipped: {}."
                              "".format(mtd.name, repr(err)), RuntimeWarning)

        shared.update(values)

        if verbose >= 2 and values:
            print(" {} Got {} new precomputed values.".format(
                VERBOSE_BLOCK_END_SYMBOL, len(values)))

        print_verbose_progress(cur_progress=100 * ind / len(methods),
                               cur_mtf_name=mtd.name,
                               item_type="precomputation",
                               verbose=verbose)

    if verbose == 1:
        _t_num_cols, _ = shutil.get_terminal_size()
        print("\r{:<{fill}}".format("Process of precomputation finished.",
                                    fill=_t_num_cols))

    if verbose >= 2 and failures:
        print("\nNote: {} of {} precomputations failed.".format(
            failures, len(methods)))

    return shared


def call_diagnostic(mtd: BoundMethod,
                    kwargs: t.Dict[str, t.Any],
                    suppress_warnings: bool = False
                    ) -> t.Union[TypeNumeric, np.ndarray]:
    """Value of a diagnostic method.

    A failed method (size gate, violated contract, uncertified truncation)
    yields :obj:`np.nan`, or an empty array for multi-valued diagnostics,
    with a RuntimeWarning.
    """
    try:
        return mtd.method(**kwargs)

    except _EXCEPTIONS as err:
        if not suppress_warnings:
            warnings.warn("Can't extract diagnostic '{}'.\n Exception "
                          "message: {}.".format(mtd.name, repr(err)),
                          RuntimeWarning)

        return np.empty(0) if mtd.returns_array else np.nan


def summarize(values: t.Union[np.ndarray, t.Sequence],
              mtd: BoundMethod,
              kwargs: t.Optional[t.Dict[str, t.Any]] = None
              ) -> t.Union[t.Sequence, TypeNumeric]:
    """``values`` reduced by a summary function; NaN if it fails."""
    try:
        return mtd.method(values, **(kwargs or {}))

    except _EXCEPTIONS:
        return np.nan


def check_summary_warnings(value: t.Union[TypeNumeric, t.Sequence,
                                          np.ndarray],
                           name_feature: str, name_summary: str) -> None:
    """Warn if a summarized value holds :obj:`np.nan`."""
    if np.any(np.isnan(np.asarray(value, dtype=float))):
        warnings.warn("Can't summarize diagnostic '{}' with summary '{}'. "
                      "Will set it as 'np.nan'.".format(name_feature,
                                                        name_summary),
                      RuntimeWarning)


def check_func(func: t.Union[_hypercube.BooleanFunction, str]
               ) -> _hypercube.BooleanFunction:
    """Turn ``func`` into a BooleanFunction.

    Strings are parsed as function specs (``majority:5``, ``file:f.txt``).

    Raises:
        TypeError: if ``func`` is neither a BooleanFunction nor a string.
    """
    if isinstance(func, str):
        return _hypercube.parse_function(func)

    if not isinstance(func, _hypercube.BooleanFunction):
        raise TypeError("'func' must be a BooleanFunction or a function "
                        "spec string (got {}).".format(type(func)))

    return func


def remove_prefix(value: str, prefix: str) -> str:
    """Remove ``prefix`` from ``value``."""
    return value[len(prefix):] if value.startswith(prefix) else value


def timeit(func: t.Callable, *args, **kwargs) -> t.Tuple[t.Any, float]:
    """Value of ``func(*args, **kwargs)`` and the seconds it took."""
    t_start = time.perf_counter()
    ret_val = func(*args, **kwargs)
    return ret_val, time.perf_counter() - t_start


def print_verbose_progress(cur_progress: float,
                           cur_mtf_name: str,
                           item_type: str,
                           verbose: int = 0) -> None:
    """Progress line (``verbose == 1``) or log message (``verbose >= 2``)."""
    if verbose <= 0:
        return

    if verbose >= 2:
        print("Done with '{}' {} (progress of {:.2f}%)."
              .format(cur_mtf_name, item_type, cur_progress))
        return

    width = shutil.get_terminal_size()[0] - 9

    if width <= 0:
        return

    filled = int(cur_progress * width / 100)
    print("\r[{}{}]{:.2f}%".format(filled * "#", (width - filled) * ".",
                                   cur_progress), end="")
