"""Named test functions addressable from the command line.

``poly43``, ``poly44`` and ``poly21`` are the lowest-degree polynomials
meeting the vanishing-derivative conditions of the decay estimates;
``mode:k`` is the k-th eigenfunction ``J0(lambda_k x)``, represented exactly
by a unit coefficient vector.
"""

from __future__ import annotations

import re
from typing import Callable

import numpy as np

from .basis import BesselBasis, Quadrature, SpectralField, analyze
from .errors import DomainError

__all__ = ["BUILTINS", "is_builtin", "builtin_field", "builtin_callable"]


def poly43(x):
    return x**4 * (1.0 - x) ** 3


def poly44(x):
    return x**4 * (1.0 - x) ** 4


def poly21(x):
    return x**2 * (1.0 - x)


BUILTINS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "poly43": poly43,
    "poly44": poly44,
    "poly21": poly21,
}

_MODE = re.compile(r"^mode:(\d+)$")


def is_builtin(name: str) -> bool:
    return name in BUILTINS or bool(_MODE.match(name))


def builtin_callable(name: str) -> Callable[[np.ndarray], np.ndarray]:
    try:
        return BUILTINS[name]
    except KeyError:
        raise DomainError(f"unknown function {name!r}") from None


def builtin_field(name: str, basis: BesselBasis, quad: Quadrature | None = None) -> SpectralField:
    m = _MODE.match(name)
    if m:
        return SpectralField.unit(int(m.group(1)), basis.size)
    return analyze(builtin_callable(name), basis, quad)
