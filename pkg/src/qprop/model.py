"""Quadratic Hamiltonians, reservoir damping and their representations.

Units are dimensionless throughout (hbar = m = 1). The q,p form is

    H = k1 q^2 + k2 p^2 + k3 (qp + pq)/2 + k4 q + k5 p

and the coherent form is

    H = omega (a^dag a + 1/2) + V a^dag + V* a + A a^dag^2 + A* a^2

with a = (q + i p)/sqrt(2). Each k_i may depend on time as a finite sum of
real exponentials.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .exceptions import RepresentationError

__all__ = [
    "CoefficientFn",
    "QPHamiltonian",
    "CoherentHamiltonian",
    "DampingSpec",
    "QuadraticModel",
    "PhysicalityWarning",
    "coherent_to_qp",
    "qp_to_coherent",
    "eval_coefficient",
    "tdep_squeezing_model",
]

SQRT2 = math.sqrt(2.0)


class PhysicalityWarning(UserWarning):
    """Reservoir parameters outside the physically allowed region."""


@dataclass(frozen=True)
class CoefficientFn:
    """A real function of time ``sum_k amp_k * exp(rate_k * t)``.

    Terms with equal rates are merged and zero amplitudes dropped, so two
    functions that agree for all t compare equal.
    """

    terms: tuple[tuple[float, float], ...] = ()

    def __post_init__(self) -> None:
        merged: dict[float, float] = {}
        for amp, rate in self.terms:
            amp, rate = float(amp), float(rate)
            if not (math.isfinite(amp) and math.isfinite(rate)):
                raise ValueError(f"non-finite coefficient term ({amp}, {rate})")
            merged[rate] = merged.get(rate, 0.0) + amp
        terms = tuple((a, r) for r, a in sorted(merged.items()) if a != 0.0)
        object.__setattr__(self, "terms", terms)

    @classmethod
    def constant(cls, value: float) -> "CoefficientFn":
        return cls(((float(value), 0.0),))

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[float]]) -> "CoefficientFn":
        out = []
        for pair in pairs:
            if len(pair) != 2:
                raise ValueError(f"coefficient term must be [amplitude, rate], got {pair!r}")
            out.append((float(pair[0]), float(pair[1])))
        return cls(tuple(out))

    @property
    def is_constant(self) -> bool:
        return all(rate == 0.0 for _, rate in self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for amp, rate in self.terms:
            out = out + (amp if rate == 0.0 else amp * np.exp(rate * t))
        return float(out) if out.ndim == 0 else out

    def __add__(self, other: "CoefficientFn") -> "CoefficientFn":
        return CoefficientFn(self.terms + other.terms)

    def __neg__(self) -> "CoefficientFn":
        return CoefficientFn(tuple((-a, r) for a, r in self.terms))

    def __sub__(self, other: "CoefficientFn") -> "CoefficientFn":
        return self + (-other)

    def __mul__(self, scalar: float) -> "CoefficientFn":
        scalar = float(scalar)
        return CoefficientFn(tuple((a * scalar, r) for a, r in self.terms))

    __rmul__ = __mul__

    def shifted(self, t0: float) -> "CoefficientFn":
        """The function ``t -> self(t + t0)``."""
        return CoefficientFn(tuple((a * math.exp(r * t0), r) for a, r in self.terms))

    def to_pairs(self) -> list[list[float]]:
        return [[a, r] for a, r in self.terms]


def eval_coefficient(c: CoefficientFn, t: float) -> float:
    return c(t)


ZERO = CoefficientFn()


def _as_fn(x) -> CoefficientFn:
    if isinstance(x, CoefficientFn):
        return x
    return CoefficientFn.constant(float(x))


@dataclass(frozen=True)
class QPHamiltonian:
    """Coefficients of q^2, p^2, (qp+pq)/2, q and p."""

    k1: CoefficientFn = ZERO
    k2: CoefficientFn = ZERO
    k3: CoefficientFn = ZERO
    k4: CoefficientFn = ZERO
    k5: CoefficientFn = ZERO

    def __post_init__(self) -> None:
        for name in ("k1", "k2", "k3", "k4", "k5"):
            object.__setattr__(self, name, _as_fn(getattr(self, name)))

    @property
    def coefficients(self) -> tuple[CoefficientFn, ...]:
        return (self.k1, self.k2, self.k3, self.k4, self.k5)

    @property
    def quadratic_is_constant(self) -> bool:
        return self.k1.is_constant and self.k2.is_constant and self.k3.is_constant

    def at(self, t: float) -> tuple[float, float, float, float, float]:
        return tuple(float(k(t)) for k in self.coefficients)

    def shifted(self, t0: float) -> "QPHamiltonian":
        return QPHamiltonian(*(k.shifted(t0) for k in self.coefficients))


@dataclass(frozen=True)
class CoherentHamiltonian:
    omega: float = 0.0
    V: complex = 0j
    A: complex = 0j

    def __post_init__(self) -> None:
        omega = complex(self.omega)
        if omega.imag != 0.0:
            raise ValueError("omega must be real")
        object.__setattr__(self, "omega", float(omega.real))
        object.__setattr__(self, "V", complex(self.V))
        object.__setattr__(self, "A", complex(self.A))


@dataclass(frozen=True)
class DampingSpec:
    """Reservoir coupling: rate ``gamma``, occupation ``N``, squeezing ``M``.

    ``|M|^2 <= N (N + 1)`` is required for a positive reservoir state; it is
    only warned about so that the equations can be exercised freely.
    """

    gamma: float
    N: float = 0.0
    M: complex = 0j

    def __post_init__(self) -> None:
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "N", float(self.N))
        object.__setattr__(self, "M", complex(self.M))
        if not self.gamma >= 0.0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        if not self.N >= 0.0:
            raise ValueError(f"N must be >= 0, got {self.N}")
        if abs(self.M) ** 2 > self.N * (self.N + 1.0) * (1.0 + 1e-12):
            warnings.warn(
                f"|M|^2 = {abs(self.M) ** 2:g} exceeds N(N+1) = {self.N * (self.N + 1):g}",
                PhysicalityWarning,
                stacklevel=3,
            )


def coherent_to_qp(h: CoherentHamiltonian) -> QPHamiltonian:
    """Expand the coherent form with a = (q + i p)/sqrt(2).

    A a^dag^2 + A* a^2 = A_x (q^2 - p^2) + A_y (qp + pq), so the squeezing
    phase enters k3 with a positive sign.
    """
    w, V, A = h.omega, h.V, h.A
    return QPHamiltonian(
        k1=CoefficientFn.constant(w / 2.0 + A.real),
        k2=CoefficientFn.constant(w / 2.0 - A.real),
        k3=CoefficientFn.constant(2.0 * A.imag),
        k4=CoefficientFn.constant(SQRT2 * V.real),
        k5=CoefficientFn.constant(SQRT2 * V.imag),
    )


def qp_to_coherent(h: QPHamiltonian, t: float = 0.0) -> CoherentHamiltonian:
    """Inverse of :func:`coherent_to_qp`; drive terms are frozen at ``t``."""
    if not h.quadratic_is_constant:
        raise RepresentationError(
            "coherent form needs time-independent k1, k2, k3"
        )
    k1, k2, k3, k4, k5 = h.at(t)
    return CoherentHamiltonian(
        omega=k1 + k2,
        V=complex(k4 / SQRT2, k5 / SQRT2),
        A=complex((k1 - k2) / 2.0, k3 / 2.0),
    )


@dataclass(frozen=True)
class QuadraticModel:
    hamiltonian: QPHamiltonian = field(default_factory=QPHamiltonian)
    coherent_part: CoherentHamiltonian | None = None
    damping: DampingSpec | None = None

    def __post_init__(self) -> None:
        if self.damping is not None and self.coherent_part is None:
            if not self.hamiltonian.quadratic_is_constant:
                raise RepresentationError(
                    "damping with time-dependent k1, k2, k3 is not supported"
                )

    @classmethod
    def from_coherent(cls, h: CoherentHamiltonian, damping: DampingSpec | None = None) -> "QuadraticModel":
        return cls(coherent_to_qp(h), h, damping)

    def coherent(self) -> CoherentHamiltonian:
        """The coherent-form Hamiltonian, derived from k1..k5 if not supplied."""
        if self.coherent_part is not None:
            return self.coherent_part
        return qp_to_coherent(self.hamiltonian)

    def shifted(self, t0: float) -> "QuadraticModel":
        return QuadraticModel(self.hamiltonian.shifted(t0), self.coherent_part, self.damping)


def tdep_squeezing_model(eps: float, delta: float) -> QuadraticModel:
    """H = eps e^{-2 delta t} q^2 + eps e^{2 delta t} p^2 + delta (qp + pq)/2."""
    return QuadraticModel(
        QPHamiltonian(
            k1=CoefficientFn(((eps, -2.0 * delta),)),
            k2=CoefficientFn(((eps, 2.0 * delta),)),
            k3=CoefficientFn.constant(delta),
        )
    )
