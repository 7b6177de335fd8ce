"""Walk every precomputation and diagnostic method of every group.

This test code is made pragmatically and therefore is not clean.
"""
import sys
import inspect
import typing as t

import numpy as np
import pytest

import hypervol._hypercube as _hypercube
from hypervol._utils import ContractError

from hypervol.hypercube import MFEBoolHypercube
from hypervol.influence import MFEBoolInfluence
from hypervol.spectral import MFEBoolSpectral
from hypervol.moments import MFEBoolMoments
from hypervol.simulation import MFEBoolSimulation

GROUP_CLASSES = (
    MFEBoolHypercube,
    MFEBoolInfluence,
    MFEBoolSpectral,
    MFEBoolMoments,
    MFEBoolSimulation,
)


def _prefixed(prefix: str) -> t.List[t.Callable]:
    methods = []

    for group_class in GROUP_CLASSES:
        for name, method in inspect.getmembers(group_class,
                                               predicate=inspect.ismethod):
            if name.startswith(prefix):
                methods.append(method)

    return methods


def _conforms(res: t.Any, exp_ret_type: t.Any) -> bool:
    type_ = type(res)
    type_ = float if isinstance(res, np.floating) else type_
    type_ = int if isinstance(res, (np.integer, np.bool_, bool)) else type_

    if hasattr(exp_ret_type, "__args__"):
        return type_ in exp_ret_type.__args__

    return type_ is exp_ret_type


def run_all(func_spec: str = "majority:5",
            p: float = 0.3,
            random_state: int = 16,
            precomp: bool = True,
            verbose: bool = False) -> t.List[t.Tuple[str, Exception, str]]:
    """Call every method with the arguments its signature asks for."""
    components = {
        "func": _hypercube.parse_function(func_spec),
        "p": p,
        "random_state": random_state,
        "mc_trials": 2000,
        "mc_batch": 500,
        "trials": 2000,
    }  # type: t.Dict[str, t.Any]

    errors = []  # type: t.List[t.Tuple[str, Exception, str]]

    if precomp:
        precomps = _prefixed("precompute_")

        for i, method in enumerate(precomps, 1):
            if verbose:
                print("Precomputation method {} of {}: {}...".format(
                    i, len(precomps), method.__name__))

            params = inspect.signature(method).parameters.keys()
            args = {
                name: comp
                for name, comp in components.items() if name in params
            }

            try:
                components.update(method(**args))

            except Exception as ex:
                errors.append(("P", ex, method.__name__))

    methods = _prefixed("ft_")

    for i, method in enumerate(methods, 1):
        if verbose:
            print("method {} of {}: {}...".format(i, len(methods),
                                                 method.__name__))

        sig = inspect.signature(method)
        args = {
            name: comp
            for name, comp in components.items() if name in sig.parameters
        }

        try:
            res = method(**args)

            if not _conforms(res, sig.return_annotation):
                raise TypeError(
                    "Return ({}) type {} does not conform to the return "
                    "type ({}).".format(res, type(res), sig.return_annotation))

        except Exception as ex:
            errors.append(("M", ex, method.__name__))

    return errors


@pytest.mark.parametrize("precomp", (True, False))
@pytest.mark.parametrize("func_spec", ("majority:5", "tribes:6:3", "or:4"))
def test_every_method_runs(func_spec, precomp):
    errors = run_all(func_spec=func_spec, p=0.3, precomp=precomp)
    assert not errors, errors


def test_increasing_only_methods_reject_parity():
    errors = run_all(func_spec="parity:4", p=0.3)

    assert {name for _, _, name in errors} == {
        "ft_second_moment_increasing", "ft_increasing_upper"}
    assert all(isinstance(err, ContractError) for _, err, _ in errors)


def test_precomputation_matches_direct_call():
    func = _hypercube.parse_function("majority:5")
    components = {"func": func, "p": 0.4}

    for method in _prefixed("precompute_"):
        params = inspect.signature(method).parameters
        components.update(method(**{
            name: comp
            for name, comp in components.items() if name in params
        }))

    direct = MFEBoolMoments.ft_expected_count(func=func, p=0.4)
    cached = MFEBoolMoments.ft_expected_count(
        func=func, p=0.4, expected_count=components["expected_count"])

    assert np.isclose(direct, cached, rtol=0, atol=1e-12)
    assert np.isclose(
        MFEBoolInfluence.ft_total_influence(func=func, p=0.4),
        MFEBoolInfluence.ft_total_influence(
            func=func, p=0.4, influence=components["influence"]),
        rtol=0, atol=1e-12)


def _test() -> None:
    if len(sys.argv) <= 3:
        print("usage:", sys.argv[0], "<function> <random_seed> <precomp 0/1>")
        sys.exit(1)

    func_spec = sys.argv[1]
    random_state = int(sys.argv[2])
    precomp = bool(int(sys.argv[3]))

    print("Chosen function:", func_spec)
    print("Random_state:", random_state)

    errors = run_all(func_spec=func_spec,
                     random_state=random_state,
                     precomp=precomp,
                     verbose=True)

    for typ, err, method in errors:
        print("-> ({})".format(typ), err, method)

    print("Total of {} exceptions raised.".format(len(errors)))


if __name__ == "__main__":
    _test()
