"""Lie-algebra coefficients of the phase-space equation of motion.

The evolution of any Gaussian-class QDF under a quadratic model reads

    dF/dt = sum_i a_i(t) S_i F

with the generators (q,p representation)

    S1 = p d/dq          S2 = q d/dp          S3 = d/dq q - d/dp p
    S4 = d/dq q + d/dp p S5 = d/dq            S6 = d/dp
    S7 = d2/dq2          S8 = d2/dp2          S9 = d2/dqdp
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import RepresentationError
from .model import CoefficientFn, QPHamiltonian, QuadraticModel
from .ordering import WIGNER, OrderingParams

__all__ = [
    "LieCoefficients",
    "hamiltonian_lie_coeffs",
    "damping_lie_coeffs",
    "assemble",
]

_ZERO = CoefficientFn()


def _scale(c: complex, fn: CoefficientFn) -> tuple[CoefficientFn, CoefficientFn]:
    c = complex(c)
    return fn * c.real, fn * c.imag


@dataclass(frozen=True)
class LieCoefficients:
    """Nine complex coefficient functions, stored as real and imaginary parts.

    ``coeffs(t)`` returns an array of shape ``(9,)`` (or ``(9, len(t))``).
    """

    real: tuple[CoefficientFn, ...] = (_ZERO,) * 9
    imag: tuple[CoefficientFn, ...] = (_ZERO,) * 9

    def __post_init__(self) -> None:
        if len(self.real) != 9 or len(self.imag) != 9:
            raise ValueError("LieCoefficients needs exactly nine entries")

    @classmethod
    def build(cls, terms: dict[int, list[tuple[complex, CoefficientFn]]]) -> "LieCoefficients":
        """Assemble from ``{index (1-based): [(complex scale, fn), ...]}``."""
        re = [_ZERO] * 9
        im = [_ZERO] * 9
        for i, parts in terms.items():
            if not 1 <= i <= 9:
                raise IndexError(i)
            for c, fn in parts:
                r, m = _scale(c, fn)
                re[i - 1] = re[i - 1] + r
                im[i - 1] = im[i - 1] + m
        return cls(tuple(re), tuple(im))

    @classmethod
    def constant(cls, values) -> "LieCoefficients":
        values = [complex(x) for x in values]
        return cls(
            tuple(CoefficientFn.constant(x.real) for x in values),
            tuple(CoefficientFn.constant(x.imag) for x in values),
        )

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        shape = (9,) + t.shape
        out = np.zeros(shape, dtype=complex)
        for i in range(9):
            if self.real[i].terms:
                out[i] += self.real[i](t)
            if self.imag[i].terms:
                out[i] += 1j * self.imag[i](t)
        return out

    def __add__(self, other: "LieCoefficients") -> "LieCoefficients":
        return LieCoefficients(
            tuple(a + b for a, b in zip(self.real, other.real)),
            tuple(a + b for a, b in zip(self.imag, other.imag)),
        )

    def shifted(self, t0: float) -> "LieCoefficients":
        return LieCoefficients(
            tuple(f.shifted(t0) for f in self.real),
            tuple(f.shifted(t0) for f in self.imag),
        )

    @property
    def drift_is_real(self) -> bool:
        return all(f.is_zero for f in self.imag[:6])

    @property
    def is_constant(self) -> bool:
        return all(f.is_constant for f in self.real + self.imag)

    def drift_only(self) -> "LieCoefficients":
        """Copy with the diffusion coefficients a7..a9 removed."""
        return LieCoefficients(self.real[:6] + (_ZERO,) * 3, self.imag[:6] + (_ZERO,) * 3)


def hamiltonian_lie_coeffs(h: QPHamiltonian, g: OrderingParams) -> LieCoefficients:
    """Coefficients of the undamped equation, ordering corrections included."""
    k1, k2, k3, k4, k5 = h.coefficients
    g1, g2, g3 = g.as_tuple()
    return LieCoefficients.build(
        {
            1: [(-2.0, k2)],
            2: [(2.0, k1)],
            3: [(-1.0, k3)],
            5: [(-1.0, k5)],
            6: [(1.0, k4)],
            7: [(2.0 * g2, k3), (-4j * g3, k2)],
            8: [(-2.0 * g1, k3), (4j * g3, k1)],
            9: [(-4.0 * g2, k1), (4.0 * g1, k2)],
        }
    )


def damping_lie_coeffs(model: QuadraticModel, g: OrderingParams) -> LieCoefficients:
    """Damping terms plus every ordering correction of the damped equation.

    Only the reservoir (gamma) terms of the Wigner equation are included; its
    omega, V and A drift is what :func:`hamiltonian_lie_coeffs` produces from
    k1..k5 and is not repeated here. The ordering corrections cover omega, A
    and gamma, so adding this to the Wigner-ordered Hamiltonian drift gives
    the full equation for ``g``.
    """
    if model.damping is None:
        raise ValueError("model has no damping spec")
    try:
        h = model.coherent()
    except RepresentationError as exc:
        raise RepresentationError(
            "damping requires a coherent-form Hamiltonian (constant k1, k2, k3)"
        ) from exc
    d = model.damping
    gamma, N, K, L = d.gamma, d.N, d.M.real, d.M.imag
    w, Ax, Ay = h.omega, h.A.real, h.A.imag
    g1, g2, g3 = g.as_tuple()
    one = CoefficientFn.constant(1.0)
    a4 = gamma / 2.0
    a7 = (
        -(gamma / 2.0) * K
        + (gamma / 2.0) * (N + 0.5)
        - 2j * w * g3
        - gamma * g2
        + 4j * Ax * g3
        + 4.0 * Ay * g2
    )
    a8 = (
        (gamma / 2.0) * K
        + (gamma / 2.0) * (N + 0.5)
        + 2j * w * g3
        - gamma * g1
        + 4j * Ax * g3
        - 4.0 * Ay * g1
    )
    a9 = -gamma * L + 2.0 * w * (g1 - g2) - 4.0 * Ax * (g1 + g2) + 2j * gamma * g3
    return LieCoefficients.build({4: [(a4, one)], 7: [(a7, one)], 8: [(a8, one)], 9: [(a9, one)]})


def assemble(model: QuadraticModel, g: OrderingParams) -> LieCoefficients:
    """Full coefficient set for ``model`` propagating a QDF of ordering ``g``."""
    if model.damping is None:
        return hamiltonian_lie_coeffs(model.hamiltonian, g)
    drift = hamiltonian_lie_coeffs(model.hamiltonian, WIGNER)
    return drift + damping_lie_coeffs(model, g)
