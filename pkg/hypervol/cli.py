"""Command-line harness of the switch count toolkit.

Subcommands: ``spectrum``, ``influence``, ``moments``, ``simulate``,
``sweep`` and ``verify``. JSON outputs carry ``"schema": 1``.
"""
import typing as t
import argparse
import concurrent.futures
import datetime
import json
import sys
import time
import warnings

import numpy as np
import pandas as pd

import hypervol._internal as _internal
import hypervol._utils as _utils
import hypervol._hypercube as _hypercube
import hypervol._spectral as _spectral
import hypervol._dynamics as _dynamics
import hypervol._moments as _moments
import hypervol._simulate as _simulate
import hypervol._verify as _verify
import hypervol.simulation as simulation
import hypervol.volmfe as volmfe

SCHEMA_VERSION = 1

NOT_COMPUTED = "not_computed"

VALID_SCHEDULES = ("constant", "power", "inverse", "custom")

SWEEP_FAMILIES = ("dictator", "majority", "parity", "tribes", "and", "or")

# Tail at fixed k moving less than this across the n grid reads as stable.
TAIL_STABLE_SPAN = 0.05

# Tails never above this on the n grid carry no information on the trend.
TAIL_NEGLIGIBLE = 0.01


class Schedule:
    """Bias sequence p_n over the n grid.

    ``constant:c`` gives p_n = c, ``power:c:alpha`` gives c n^-alpha,
    ``inverse:c`` gives c / n and ``custom:p1,p2,...`` lists p_n in the order
    of the n grid.
    """
    def __init__(self, kind: str, params: t.Sequence[float]) -> None:
        if kind not in VALID_SCHEDULES:
            raise ValueError("Unknown schedule '{}'. Please select values in "
                             "{}.".format(kind, VALID_SCHEDULES))

        arity = {"constant": 1, "power": 2, "inverse": 1}

        if kind in arity and len(params) != arity[kind]:
            raise ValueError("Schedule '{}' takes {} parameter(s) (got {})."
                             "".format(kind, arity[kind], len(params)))

        if kind == "custom" and not params:
            raise ValueError("Schedule 'custom' needs at least one value.")

        self.kind = kind
        self.params = tuple(float(val) for val in params)

    @classmethod
    def parse(cls, text: str) -> "Schedule":
        """Build a schedule from its ``kind:params`` string."""
        kind, _, rest = str(text).partition(":")
        kind = kind.strip().lower()
        sep = "," if kind == "custom" else ":"

        try:
            params = [float(val) for val in rest.split(sep) if val.strip()]

        except ValueError:
            raise ValueError("Malformed schedule '{}'.".format(text))

        return cls(kind, params)

    def values(self, n_grid: t.Sequence[int]) -> t.List[float]:
        """p_n for every n of ``n_grid``.

        Raises
        ------
        ValueError
            If some p_n falls outside (0, 1), or a custom schedule does not
            match the grid length.
        """
        if self.kind == "constant":
            vals = [self.params[0]] * len(n_grid)

        elif self.kind == "power":
            coef, alpha = self.params
            vals = [coef * n**(-alpha) for n in n_grid]

        elif self.kind == "inverse":
            vals = [self.params[0] / n for n in n_grid]

        else:
            if len(self.params) != len(n_grid):
                raise ValueError("Custom schedule lists {} values for {} "
                                 "dimensions.".format(len(self.params),
                                                      len(n_grid)))
            vals = list(self.params)

        for n, p_n in zip(n_grid, vals):
            if not 0.0 < p_n < 1.0:
                raise ValueError("Schedule {} gives p_n={} at n={}; every "
                                 "p_n must be in (0, 1).".format(self, p_n, n))

        return vals

    def __repr__(self) -> str:
        return "Schedule({}:{})".format(
            self.kind, ",".join("{:g}".format(val) for val in self.params))


def parse_int_grid(text: str) -> t.List[int]:
    """``3,5,7`` or ``start:stop:step`` (stop inclusive)."""
    if ":" in text:
        fields = [int(val) for val in text.split(":")]

        if len(fields) not in (2, 3):
            raise ValueError("Range grid must be 'start:stop[:step]' "
                             "(got '{}').".format(text))

        start, stop = fields[:2]
        step = fields[2] if len(fields) == 3 else 1
        return list(range(start, stop + 1, step))

    return [int(val) for val in text.split(",") if val.strip()]


def parse_float_grid(text: str) -> t.List[float]:
    return [float(val) for val in text.split(",") if val.strip()]


def sweep_columns(theta_grid: t.Sequence[float],
                  k_grid: t.Sequence[int]) -> t.List[str]:
    """Fixed CSV headers of a sweep."""
    return ([
        "n", "p_n", "prob_one", "total_influence", "influence_sq_sum",
        "expected_count", "second_moment_series", "second_moment_fourier",
        "second_moment_increasing", "variance_f",
    ] + ["pz_bound_{:g}".format(theta) for theta in theta_grid] + [
        "increasing_upper", "criterion_ratio", "mc_mean", "mc_mean_se",
        "mc_second_moment", "mc_second_moment_se",
    ] + ["tail_ge_{}".format(k) for k in k_grid])


def _marker(value: t.Any) -> t.Any:
    if value is None or (isinstance(value, (float, np.floating))
                         and not np.isfinite(value)):
        return NOT_COMPUTED

    return value


# Sweep columns read directly from the diagnostic of the same name.
_SWEEP_DIAGNOSTICS = (
    ("prob_one", "prob_one"),
    ("total_influence", "total_influence"),
    ("influence_sq_sum", "influence_sq_sum"),
    ("expected_count", "expected_count"),
    ("second_moment_series", "second_moment"),
    ("second_moment_fourier", "second_moment_fourier"),
    ("second_moment_increasing", "second_moment_increasing"),
    ("variance_f", "variance"),
    ("increasing_upper", "increasing_upper"),
    ("criterion_ratio", "criterion_ratio"),
    ("mc_mean", "mc_mean"),
    ("mc_mean_se", "mc_mean_stderr"),
    ("mc_second_moment", "mc_second_moment"),
    ("mc_second_moment_se", "mc_second_moment_stderr"),
)

# Diagnostics that fall back to sampling beyond the exact gate.
_SAMPLED_BEYOND_GATE = ("prob_one", "influence", "total_influence",
                        "influence_sq_sum", "variance")


def _array_entry(values: t.Any, ind: int) -> t.Optional[float]:
    values = np.asarray(values, dtype=float)
    return float(values[ind]) if ind < values.size else None


def sweep_row(kind: str,
              n: int,
              p: float,
              theta_grid: t.Sequence[float],
              k_grid: t.Sequence[int],
              trials: int,
              batch: int,
              seed: t.Optional[int],
              tol: float,
              tribe_size: t.Optional[int] = None) -> t.Dict[str, t.Any]:
    """Every column of one sweep row, from one diagnostics extraction.

    Exact columns beyond their size gate hold ``NOT_COMPUTED``, never a
    sampled estimate; Monte Carlo columns are always filled.
    """
    spec = _hypercube.FamilySpec(kind, n, tribe_size=tribe_size)
    func = _hypercube.BooleanFunction.from_family(spec)

    exact = n <= _utils.EXACT_MAX_N
    features = [name for _, name in _SWEEP_DIAGNOSTICS
                if exact or name not in _SAMPLED_BEYOND_GATE]

    model = volmfe.VolMFE(
        groups=("hypercube", "influence", "moments", "simulation"),
        features=features + ["pz_bound", "mc_tail"],
        summary=(), theta_grid=theta_grid, k_grid=k_grid,
        mc_trials=trials, mc_batch=batch, tol=tol, random_state=seed)

    names, vals = model.fit(func, p, suppress_warnings=True).extract(
        suppress_warnings=True)
    res = dict(zip(names, vals))

    row = {"n": n, "p_n": p}  # type: t.Dict[str, t.Any]

    for column, name in _SWEEP_DIAGNOSTICS:
        row[column] = _marker(res.get(name))

    for ind, theta in enumerate(theta_grid):
        row["pz_bound_{:g}".format(theta)] = _marker(
            _array_entry(res.get("pz_bound", ()), ind))

    for ind, k in enumerate(k_grid):
        row["tail_ge_{}".format(k)] = _marker(
            _array_entry(res.get("mc_tail", ()), ind))

    return row


def tameness_evidence(rows: t.Sequence[t.Dict[str, t.Any]],
                      k_grid: t.Sequence[int],
                      trials: int = 100000) -> t.Dict[str, t.Any]:
    """Read the tail columns across n as finite-size evidence.

    A tail P(C >= k) that never exceeds ``TAIL_NEGLIGIBLE`` is labelled
    negligible and left out of the verdict: k is beyond the reach of every
    n of the grid. Among the remaining tails, one that moves less than
    ``TAIL_STABLE_SPAN`` over the grid reads as tame-like and one that
    increases across the grid and ends above 0.9 reads as volatile-like.
    Decreases within three worst-case standard errors of the Monte Carlo
    tails still count as increasing. With no informative tail the verdict
    is inconclusive.
    """
    slack = 3.0 * np.sqrt(0.25 / trials)

    per_k = {}  # type: t.Dict[str, str]

    for k in k_grid:
        tail = np.array([row["tail_ge_{}".format(k)] for row in rows],
                        dtype=float)
        rises = bool(np.all(np.diff(tail) >= -slack))

        if tail.size and np.max(tail) <= TAIL_NEGLIGIBLE:
            per_k[str(k)] = "negligible"

        elif tail.size < 2 or np.ptp(tail) <= TAIL_STABLE_SPAN:
            per_k[str(k)] = "stable"

        elif rises and tail[-1] >= 0.9:
            per_k[str(k)] = "rising toward 1"

        elif rises:
            per_k[str(k)] = "rising"

        else:
            per_k[str(k)] = "mixed"

    labels = set(per_k.values()) - {"negligible"}

    if labels == {"stable"}:
        verdict = "tame-like"

    elif "rising toward 1" in labels and labels <= {"rising toward 1",
                                                    "rising"}:
        verdict = "volatile-like"

    else:
        verdict = "inconclusive"

    return {
        "label": "evidence",
        "heuristic": "tail P(C >= k) at fixed k stabilizing across n "
                     "(tame-like) versus rising toward 1 (volatile-like); "
                     "tails below {} on the whole grid are ignored; the "
                     "notions are asymptotic and this is not a proof"
                     "".format(TAIL_NEGLIGIBLE),
        "per_k": per_k,
        "verdict": verdict,
    }


def _jsonable(obj: t.Any) -> t.Any:
    """Plain JSON types; non-finite floats become None."""
    if isinstance(obj, dict):
        return {str(key): _jsonable(val) for key, val in obj.items()}

    if isinstance(obj, (list, tuple)):
        return [_jsonable(val) for val in obj]

    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())

    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)

    if isinstance(obj, (int, np.integer)):
        return int(obj)

    if isinstance(obj, (float, np.floating)):
        return float(obj) if np.isfinite(obj) else None

    return obj


def _envelope(command: str,
              args: argparse.Namespace,
              result: t.Any,
              parameters: t.Dict[str, t.Any]) -> t.Dict[str, t.Any]:
    doc = {
        "schema": SCHEMA_VERSION,
        "command": command,
        "parameters": parameters,
        "result": result,
    }

    if not args.reproducible:
        doc["generated"] = datetime.datetime.now(
            datetime.timezone.utc).isoformat()

    return _jsonable(doc)


def _emit_json(doc: t.Dict[str, t.Any], path: t.Optional[str]) -> None:
    if path is None:
        json.dump(doc, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
        return

    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _strip_elapsed(report: t.Dict[str, t.Any]) -> t.Dict[str, t.Any]:
    for suite in report["suites"]:
        suite.pop("elapsed", None)

    return report


def cmd_spectrum(args: argparse.Namespace) -> int:
    """Write the spectrum CSV of one function."""
    func = _hypercube.parse_function(args.function)
    spectrum = _spectral.transform(func, args.p)

    frame = _spectral.spectrum_frame(spectrum,
                                     nonzero_only=not args.all_rows,
                                     atol=args.atol)
    frame.to_csv(args.out if args.out else sys.stdout, index=False,
                 float_format="%.17g")

    return 0


def cmd_influence(args: argparse.Namespace) -> int:
    """Per-bit influences, exact or sampled beyond the exact gate."""
    func = _hypercube.parse_function(args.function)
    exact = func.n <= _utils.EXACT_MAX_N

    profile = _dynamics.influence_profile(
        func, args.p, method="exact" if exact else "sample",
        trials=args.trials, random_state=args.seed)

    result = {
        "function": func.name,
        "n": func.n,
        "method": "exact" if exact else "sample",
        "per_bit": profile.per_bit,
        "normalized": profile.normalized,
        "total": profile.total,
        "sq_sum": profile.sq_sum,
        "stderr": profile.stderr,
        "regular": (_dynamics.is_regular(func, args.p)
                    if exact else NOT_COMPUTED),
    }

    _emit_json(_envelope("influence", args, result, {
        "function": args.function, "p": args.p, "seed": args.seed,
    }), args.out)

    return 0


# Scalar and per-bit diagnostics attached to the moment report.
_REPORT_DIAGNOSTICS = (
    "prob_one", "variance", "is_increasing", "is_regular", "influence",
    "total_influence", "influence_sq_sum", "regularity_check",
    "expected_count", "second_moment", "second_moment_fourier",
    "second_moment_increasing", "count_variance", "route_residual",
    "pz_bound", "increasing_upper", "criterion_ratio",
)


def cmd_moments(args: argparse.Namespace) -> int:
    """Emit the full moment report of one (f, p) pair.

    The ``diagnostics`` map holds the extracted diagnostics of the same
    pair; values that could not be computed exactly are null.
    """
    func = _hypercube.parse_function(args.function)
    exact = func.n <= _utils.EXACT_MAX_N
    features = [name for name in _REPORT_DIAGNOSTICS
                if exact or name not in _SAMPLED_BEYOND_GATE]

    model = volmfe.VolMFE(groups="moments", features=features, summary=(),
                          theta_grid=args.theta_grid, tol=args.tol,
                          random_state=args.seed)
    model.fit(func, args.p, suppress_warnings=args.verbose <= 0)

    report = model.extract_report()
    names, vals = model.extract(suppress_warnings=args.verbose <= 0)
    report["diagnostics"] = {
        **dict.fromkeys(_REPORT_DIAGNOSTICS), **dict(zip(names, vals))}

    _emit_json(_envelope("moments", args, report, {
        "function": args.function, "p": args.p, "tol": args.tol,
        "theta_grid": args.theta_grid,
    }), args.out)

    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    """Monte Carlo moments and tail table, with the exact law if small."""
    func = _hypercube.parse_function(args.function)
    source = func.family if func.family is not None and (
        func.family.kind != "custom") else func

    cfg = _simulate.McConfig(trials=args.trials, seed=args.seed,
                             batch=args.batch)
    counts, jumps = _simulate.simulate_counts(source, args.p, cfg)
    est = _simulate.estimate_from_counts(counts, k_max=max(args.k_grid))
    lower, upper = _simulate.tail_confidence(est.tail_table, cfg.trials)

    result = {
        "function": func.name,
        "n": func.n,
        "mean": est.mean,
        "mean_stderr": est.standard_errors.mean,
        "second_moment": est.second_moment,
        "second_moment_stderr": est.standard_errors.second_moment,
        "tail": {str(k): {"value": est.tail_table[k],
                          "wilson_low": lower[k],
                          "wilson_high": upper[k]}
                 for k in args.k_grid},
        "exact_tail": NOT_COMPUTED,
    }  # type: t.Dict[str, t.Any]

    if func.n <= _utils.COUNT_DIST_MAX_N:
        result["exact_tail"] = dict(zip(
            map(str, args.k_grid),
            simulation.MFEBoolSimulation.ft_exact_tail(
                func, args.p, k_grid=args.k_grid, tol=args.tol)))

    if args.trajectories:
        _simulate.trajectory_frame(counts, jumps).to_csv(args.trajectories,
                                                         index=False)

    _emit_json(_envelope("simulate", args, result, {
        "function": args.function, "p": args.p, "trials": args.trials,
        "batch": args.batch, "seed": args.seed,
    }), args.out)

    return 0


def _row_seeds(seed: t.Optional[int], count: int) -> t.List[t.Optional[int]]:
    if seed is None:
        return [None] * count

    return [int(child.generate_state(1)[0])
            for child in np.random.SeedSequence(seed).spawn(count)]


def cmd_sweep(args: argparse.Namespace) -> int:
    """Tabulate one family across the n grid under a bias schedule."""
    family, _, width = args.family.partition(":")
    family = family.lower()

    if family not in SWEEP_FAMILIES:
        raise ValueError("Unknown sweep family '{}'. Please select values "
                         "in {}.".format(family, SWEEP_FAMILIES))

    tribe_size = int(width) if width else None
    n_grid = list(args.n_grid)
    p_grid = Schedule.parse(args.schedule).values(n_grid)
    seeds = _row_seeds(args.seed, len(n_grid))

    for n in n_grid:
        _hypercube.FamilySpec(family, n, tribe_size=tribe_size)

    jobs = [
        dict(kind=family, n=n, p=p_n, theta_grid=args.theta_grid,
             k_grid=args.k_grid, trials=args.trials, batch=args.batch,
             seed=row_seed, tol=args.tol, tribe_size=tribe_size)
        for n, p_n, row_seed in zip(n_grid, p_grid, seeds)
    ]

    rows = [None] * len(jobs)  # type: t.List[t.Any]

    if args.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(
                max_workers=args.jobs) as pool:
            futures = {pool.submit(sweep_row, **job): ind
                       for ind, job in enumerate(jobs)}

            for done, future in enumerate(
                    concurrent.futures.as_completed(futures), 1):
                rows[futures[future]] = future.result()
                _internal.print_verbose_progress(
                    cur_progress=100 * done / len(jobs),
                    cur_mtf_name="n={}".format(jobs[futures[future]]["n"]),
                    item_type="sweep row",
                    verbose=args.verbose)

    else:
        for ind, job in enumerate(jobs):
            rows[ind] = sweep_row(**job)
            _internal.print_verbose_progress(
                cur_progress=100 * (ind + 1) / len(jobs),
                cur_mtf_name="n={}".format(job["n"]),
                item_type="sweep row",
                verbose=args.verbose)

    if args.verbose == 1:
        print()

    columns = sweep_columns(args.theta_grid, args.k_grid)
    frame = pd.DataFrame(rows, columns=columns)

    out = args.out or "sweep.csv"
    stem = out[:-4] if out.endswith(".csv") else out
    frame.to_csv(stem + ".csv", index=False, float_format="%.17g")

    _emit_json(_envelope("sweep", args, {
        "columns": columns,
        "rows": rows,
        "tameness": tameness_evidence(rows, args.k_grid, args.trials),
    }, {
        "family": args.family, "n_grid": n_grid, "schedule": args.schedule,
        "theta_grid": args.theta_grid, "k_grid": args.k_grid,
        "trials": args.trials, "batch": args.batch, "seed": args.seed,
        "tol": args.tol,
    }), stem + ".json")

    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    """Run every identity suite; nonzero exit status on any failure."""
    report = _verify.run_suites(n_max=args.n_max, p_grid=args.p_grid,
                                seed=args.seed, tol=args.tol,
                                mc_trials=args.trials, quick=args.quick,
                                verbose=args.verbose)

    if args.reproducible:
        report = _strip_elapsed(report)

    _emit_json(_envelope("verify", args, report, {
        "n_max": args.n_max, "p_grid": args.p_grid, "seed": args.seed,
        "tol": args.tol, "trials": args.trials, "quick": args.quick,
    }), args.out)

    return 0 if report["passed"] else 1


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="root seed of every random stream")
    common.add_argument("--tol", type=float, default=1e-12,
                        help="truncation tolerance of the series")
    common.add_argument("--out", type=str, default=None,
                        help="output path (stdout when omitted)")
    common.add_argument("--reproducible", action="store_true",
                        help="omit timestamps and timings from outputs")
    common.add_argument("--config", type=str, default=None,
                        help="JSON file whose keys mirror the long flags")
    common.add_argument("--verbose", "-v", action="count", default=0)
    common.add_argument("--jobs", type=int, default=1,
                        help="worker processes for sweep rows")
    return common


def _function_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("function",
                        help="function spec: majority:9, tribes:12:4, "
                             "file:table.txt, ...")
    parser.add_argument("--p", type=float, default=0.5, help="bias in (0, 1)")


def build_parser() -> t.Tuple[argparse.ArgumentParser,
                              t.Dict[str, argparse.ArgumentParser]]:
    """The top-level parser and its subcommand parsers by name."""
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="hypervol",
        description="Switch count diagnostics of Boolean functions under "
                    "p-biased resampling dynamics.")
    sub = parser.add_subparsers(dest="command")
    sub.required = True
    subparsers = {}  # type: t.Dict[str, argparse.ArgumentParser]

    cur = sub.add_parser("spectrum", parents=[common],
                         help="p-biased Fourier-Walsh spectrum CSV")
    _function_args(cur)
    cur.add_argument("--all-rows", action="store_true",
                     help="also write zero coefficients")
    cur.add_argument("--atol", type=float, default=1e-15,
                     help="coefficients at most this large count as zero")
    cur.set_defaults(handler=cmd_spectrum)
    subparsers["spectrum"] = cur

    cur = sub.add_parser("influence", parents=[common],
                         help="per-bit influences")
    _function_args(cur)
    cur.add_argument("--trials", type=int, default=100000)
    cur.set_defaults(handler=cmd_influence)
    subparsers["influence"] = cur

    cur = sub.add_parser("moments", parents=[common],
                         help="moment report of one function")
    _function_args(cur)
    cur.add_argument("--theta-grid", type=parse_float_grid,
                     default=list(_moments.DEFAULT_THETA_GRID))
    cur.set_defaults(handler=cmd_moments)
    subparsers["moments"] = cur

    cur = sub.add_parser("simulate", parents=[common],
                         help="Monte Carlo switch counts")
    _function_args(cur)
    cur.add_argument("--trials", type=int, default=100000)
    cur.add_argument("--batch", type=int, default=10000)
    cur.add_argument("--k-grid", type=parse_int_grid,
                     default=list(simulation.DEFAULT_K_GRID))
    cur.add_argument("--trajectories", type=str, default=None,
                     help="CSV path for per-run counts and jump numbers")
    cur.set_defaults(handler=cmd_simulate)
    subparsers["simulate"] = cur

    cur = sub.add_parser("sweep", parents=[common],
                         help="family sweep across n and a bias schedule")
    cur.add_argument("--family", type=str, default="majority",
                     help="dictator, majority, parity, and, or, tribes:w")
    cur.add_argument("--n-grid", type=parse_int_grid,
                     default=parse_int_grid("3:13:2"))
    cur.add_argument("--schedule", type=str, default="constant:0.5",
                     help="constant:c, power:c:alpha, inverse:c or "
                          "custom:p1,p2,...")
    cur.add_argument("--theta-grid", type=parse_float_grid,
                     default=list(_moments.DEFAULT_THETA_GRID))
    cur.add_argument("--k-grid", type=parse_int_grid,
                     default=list(simulation.DEFAULT_K_GRID))
    cur.add_argument("--trials", type=int, default=100000)
    cur.add_argument("--batch", type=int, default=10000)
    cur.set_defaults(handler=cmd_sweep)
    subparsers["sweep"] = cur

    cur = sub.add_parser("verify", parents=[common],
                         help="run every numerical identity suite")
    cur.add_argument("--n-max", type=int, default=8)
    cur.add_argument("--p-grid", type=parse_float_grid,
                     default=list(_verify.DEFAULT_P_GRID))
    cur.add_argument("--trials", type=int, default=100000)
    cur.add_argument("--quick", action="store_true",
                     help="smaller random samples")
    cur.set_defaults(handler=cmd_verify)
    subparsers["verify"] = cur

    return parser, subparsers


def _load_config(path: str,
                 subparser: argparse.ArgumentParser) -> t.Dict[str, t.Any]:
    """Config file values, converted like their command-line flags."""
    with open(path, "r") as fh:
        config = json.load(fh)

    if not isinstance(config, dict):
        raise ValueError("Config file '{}' must hold a JSON object."
                         "".format(path))

    actions = {action.dest: action for action in subparser._actions}
    defaults = {}  # type: t.Dict[str, t.Any]

    for key, value in config.items():
        dest = key.lstrip("-").replace("-", "_")

        if dest not in actions or dest in ("config", "help"):
            warnings.warn("Unknown config key '{}'.".format(key), UserWarning)
            continue

        converter = actions[dest].type

        if isinstance(value, str) and converter is not None:
            value = converter(value)

        defaults[dest] = value

    return defaults


def main(argv: t.Optional[t.Sequence[str]] = None) -> int:
    """Entry point of the ``hypervol`` command."""
    parser, subparsers = build_parser()
    args = parser.parse_args(argv)

    if args.config:
        subparser = subparsers[args.command]
        subparser.set_defaults(**_load_config(args.config, subparser))
        args = parser.parse_args(argv)

    if args.reproducible and args.seed is None:
        args.seed = 0

    if args.verbose <= 0:
        warnings.simplefilter("ignore", RuntimeWarning)

    _time_start = time.time()

    try:
        status = args.handler(args)

    except (ValueError, TypeError, OSError, _utils.TruncationError) as err:
        print("hypervol {}: error: {}".format(args.command, err),
              file=sys.stderr)
        return 2

    if args.verbose >= 2:
        print("{} Done in {:.2f} seconds.".format(
            _internal.VERBOSE_BLOCK_END_SYMBOL, time.time() - _time_start),
            file=sys.stderr)

    return status
