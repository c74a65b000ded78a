"""Bundled arithmetic example and host bindings for its external functions."""

from __future__ import annotations

import importlib
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Mapping

ARITH_SPEC_PATH = Path(str(resources.files("typedpg") / "data" / "arith.tpg"))
SIMPLE_GTS_PATH = Path(str(resources.files("typedpg") / "data" / "simple.gts"))


@dataclass
class BindingSet:
    """Host callbacks plus a way to build start-function inputs from ``--env`` pairs."""

    callbacks: dict = field(default_factory=dict)
    make_inputs: Callable[[Mapping[str, str]], tuple] = lambda env: ()


def _value(args):
    env, name = args
    if name not in env:
        raise KeyError(f"variable {name} is not bound in the environment")
    return (env[name],)


ARITH_CALLBACKS = {
    "strToInt": lambda a: (int(a[0]),),
    "value": _value,
    "zero": lambda a: (0,),
    "one": lambda a: (1,),
    "neg": lambda a: (-a[0],),
    "add": lambda a: (a[0] + a[1],),
    "mul": lambda a: (a[0] * a[1],),
}


def arith_inputs(env: Mapping[str, str]) -> tuple:
    return ({k: int(v) for k, v in env.items()},)


ARITH = BindingSet(dict(ARITH_CALLBACKS), arith_inputs)
BUILTIN_BINDINGS = {"arith": ARITH}


def load_bindings(spec: str) -> BindingSet:
    """Resolve ``spec``: a built-in name or ``module:attribute``.

    The attribute may be a :class:`BindingSet` or a plain mapping of
    callbacks (the start function then takes no inputs).
    """
    if spec in BUILTIN_BINDINGS:
        return BUILTIN_BINDINGS[spec]
    module, sep, attr = spec.partition(":")
    if not sep:
        raise ValueError(f"unknown bindings {spec!r}; use one of {sorted(BUILTIN_BINDINGS)} or module:attribute")
    obj = getattr(importlib.import_module(module), attr)
    return obj if isinstance(obj, BindingSet) else BindingSet(dict(obj))
