"""Gaussian ordering class of quasi-distribution functions.

A member of the class is fixed by the kernel

    f(v, u) = exp(g1 u^2 + g2 v^2 + 2i g3 u v)

that multiplies the symmetric (Wigner) characteristic function. Here ``u`` is
the Fourier variable conjugate to ``p`` and ``v`` the one conjugate to ``q``.
The same kernel can be written in coherent variables as
``exp(a1 |beta|^2 + a2 beta^2 + a3 beta*^2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np

__all__ = [
    "OrderingParams",
    "OrderingParamsAlpha",
    "ORDERING_NAMES",
    "alpha_to_qp",
    "qp_to_alpha",
    "named_ordering",
    "kernel_value",
    "parse_ordering",
    "WIGNER",
    "NORMAL",
    "ANTINORMAL",
    "STANDARD",
    "ANTISTANDARD",
]


def _check_finite(*values: float) -> None:
    for x in values:
        if not math.isfinite(x):
            raise ValueError(f"ordering parameters must be finite, got {values}")


@dataclass(frozen=True)
class OrderingParams:
    """Kernel triple in the (u, v) parameterization."""

    g1: float
    g2: float
    g3: float

    def __post_init__(self) -> None:
        for name in ("g1", "g2", "g3"):
            object.__setattr__(self, name, float(getattr(self, name)))
        _check_finite(self.g1, self.g2, self.g3)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.g1, self.g2, self.g3)

    def log_kernel(self, u, v):
        """Exponent of the kernel, ``g1 u^2 + g2 v^2 + 2i g3 u v``."""
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        return self.g1 * u**2 + self.g2 * v**2 + 2j * self.g3 * u * v

    def conjugate(self) -> "OrderingParams":
        """Ordering whose kernel is the complex conjugate of this one."""
        return OrderingParams(self.g1, self.g2, -self.g3)

    def __str__(self) -> str:
        return f"{self.g1!r},{self.g2!r},{self.g3!r}"


@dataclass(frozen=True)
class OrderingParamsAlpha:
    """Kernel triple in the coherent (beta, beta*) parameterization."""

    a1: float
    a2: float
    a3: float

    def __post_init__(self) -> None:
        for name in ("a1", "a2", "a3"):
            object.__setattr__(self, name, float(getattr(self, name)))
        _check_finite(self.a1, self.a2, self.a3)


def alpha_to_qp(a: OrderingParamsAlpha) -> OrderingParams:
    return OrderingParams(
        (a.a1 + a.a2 + a.a3) / 2.0,
        (a.a1 - a.a2 - a.a3) / 2.0,
        (a.a2 - a.a3) / 2.0,
    )


def qp_to_alpha(g: OrderingParams) -> OrderingParamsAlpha:
    return OrderingParamsAlpha(
        g.g1 + g.g2,
        (g.g1 - g.g2 + 2.0 * g.g3) / 2.0,
        (g.g1 - g.g2 - 2.0 * g.g3) / 2.0,
    )


WIGNER = OrderingParams(0.0, 0.0, 0.0)
NORMAL = OrderingParams(0.25, 0.25, 0.0)
ANTINORMAL = OrderingParams(-0.25, -0.25, 0.0)
STANDARD = OrderingParams(0.0, 0.0, 0.25)
ANTISTANDARD = OrderingParams(0.0, 0.0, -0.25)

_NAMED = {
    "wigner": WIGNER,
    "normal": NORMAL,
    "antinormal": ANTINORMAL,
    "standard": STANDARD,
    "antistandard": ANTISTANDARD,
}

_ALIASES = {
    "w": "wigner",
    "symmetric": "wigner",
    "p": "normal",
    "glauber": "normal",
    "q": "antinormal",
    "husimi": "antinormal",
    "anti-normal": "antinormal",
    "anti-standard": "antistandard",
    "kr": "antistandard",
    "kirkwood-rihaczek": "antistandard",
    "s": "s-ordered",
    "s_ordered": "s-ordered",
    "sordered": "s-ordered",
}

ORDERING_NAMES = ("wigner", "normal", "antinormal", "standard", "antistandard", "s-ordered")


def named_ordering(name: str, s: float | None = None) -> OrderingParams:
    """Return the kernel triple of a named ordering.

    Parameters
    ----------
    name : str
        One of :data:`ORDERING_NAMES` (case-insensitive). ``P``/``Q``/``KR``
        and a few other common aliases are accepted.
    s : float, optional
        Order parameter of the s-ordered family; required for ``s-ordered``
        and rejected otherwise.
    """
    key = name.strip().lower()
    key = _ALIASES.get(key, key)
    if key == "s-ordered":
        if s is None:
            raise ValueError("s-ordered ordering requires a value for s")
        s = float(s)
        _check_finite(s)
        return OrderingParams(s / 4.0, s / 4.0, 0.0)
    if key not in _NAMED:
        raise ValueError(f"unknown ordering {name!r}; expected one of {', '.join(ORDERING_NAMES)}")
    if s is not None:
        raise ValueError(f"ordering {name!r} does not take an s parameter")
    return _NAMED[key]


def kernel_value(g: OrderingParams, u, v):
    """Evaluate the ordering kernel at (u, v); broadcasts over arrays."""
    out = np.exp(g.log_kernel(u, v))
    return complex(out) if np.ndim(out) == 0 else out


def parse_ordering(spec: Any) -> OrderingParams:
    """Build an ordering from a config value.

    Accepts a name string, ``{"name": ..., "s": ...}``, or an explicit
    ``{"g1": ..., "g2": ..., "g3": ...}`` triple.
    """
    if isinstance(spec, OrderingParams):
        return spec
    if isinstance(spec, str):
        return named_ordering(spec)
    if isinstance(spec, Mapping):
        if "name" in spec:
            extra = set(spec) - {"name", "s"}
            if extra:
                raise ValueError(f"unexpected ordering keys {sorted(extra)}")
            return named_ordering(str(spec["name"]), spec.get("s"))
        if {"g1", "g2", "g3"} <= set(spec):
            return OrderingParams(float(spec["g1"]), float(spec["g2"]), float(spec["g3"]))
        raise ValueError("ordering mapping needs either 'name' or all of g1, g2, g3")
    if isinstance(spec, (list, tuple)) and len(spec) == 3:
        return OrderingParams(*map(float, spec))
    raise ValueError(f"cannot interpret ordering {spec!r}")
