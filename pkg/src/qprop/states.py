"""Initial quasi-distribution grids for a handful of pure states.

Coherent amplitudes follow alpha = (q + i p)/sqrt(2); for alpha = A + iB the
state is centred at (q0, p0) = (sqrt(2) A, sqrt(2) B). Where a closed form is
available it is sampled directly, so these fixtures do not depend on the
transform machinery they are later used to test.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .ordering import STANDARD, WIGNER, OrderingParams
from .phasegrid import Geometry, PhaseGrid, convert_ordering

__all__ = [
    "StateSpec",
    "MarginWarning",
    "wavefunction",
    "momentum_wavefunction",
    "momentum_transform",
    "standard_from_wavefunctions",
    "qdf_ground",
    "qdf_coherent",
    "wigner_coherent",
    "standard_cat",
    "standard_superposition01",
    "initial_qdf",
]

SQRT2 = math.sqrt(2.0)
PI_M14 = math.pi ** -0.25

KINDS = ("ground", "coherent", "cat", "superposition01")


class MarginWarning(UserWarning):
    """A displaced state sits too close to the grid edge."""


@dataclass(frozen=True)
class StateSpec:
    kind: str
    alpha: complex = 0j

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown state kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        object.__setattr__(self, "alpha", complex(self.alpha))

    @property
    def cat_norm(self) -> float:
        """1 / sqrt(2 (1 + exp(-2|alpha|^2)))."""
        return 1.0 / math.sqrt(2.0 * (1.0 + math.exp(-2.0 * abs(self.alpha) ** 2)))


def _coherent_q(alpha: complex, q):
    A, B = alpha.real, alpha.imag
    return PI_M14 * np.exp(-0.5 * (q - SQRT2 * A) ** 2 + 1j * SQRT2 * B * q - 1j * A * B)


def _coherent_p(alpha: complex, p):
    A, B = alpha.real, alpha.imag
    return PI_M14 * np.exp(-0.5 * (p - SQRT2 * B) ** 2 - 1j * SQRT2 * A * p + 1j * A * B)


def wavefunction(spec: StateSpec, q):
    """Position-space wavefunction <q|psi>."""
    q = np.asarray(q, dtype=float)
    if spec.kind == "ground":
        return _coherent_q(0j, q)
    if spec.kind == "coherent":
        return _coherent_q(spec.alpha, q)
    if spec.kind == "cat":
        return spec.cat_norm * (_coherent_q(spec.alpha, q) + _coherent_q(-spec.alpha, q))
    # (|0> + |1>)/sqrt(2)
    return PI_M14 * np.exp(-0.5 * q**2) * (1.0 + SQRT2 * q) / SQRT2


def momentum_wavefunction(spec: StateSpec, p):
    """Momentum-space wavefunction <p|psi> = (2 pi)^(-1/2) int psi(q) e^{-ipq} dq."""
    p = np.asarray(p, dtype=float)
    if spec.kind == "ground":
        return _coherent_p(0j, p)
    if spec.kind == "coherent":
        return _coherent_p(spec.alpha, p)
    if spec.kind == "cat":
        return spec.cat_norm * (_coherent_p(spec.alpha, p) + _coherent_p(-spec.alpha, p))
    return PI_M14 * np.exp(-0.5 * p**2) * (1.0 - 1j * SQRT2 * p) / SQRT2


def momentum_transform(psi, q_min: float, q_max: float, n: int, p, oversample: int = 4):
    """Momentum amplitudes at ``p`` by direct quadrature of ``psi``.

    ``psi`` is a callable sampled on ``oversample * n`` points of
    ``[q_min, q_max)``; a sample array of length ``n`` is used as is.
    """
    p = np.asarray(p, dtype=float)
    if callable(psi):
        m = oversample * n
        dx = (q_max - q_min) / m
        x = q_min + dx * np.arange(m)
        samples = np.asarray(psi(x), dtype=complex)
    else:
        samples = np.asarray(psi, dtype=complex)
        if samples.shape != (n,):
            raise ValueError(f"expected {n} wavefunction samples, got {samples.shape}")
        dx = (q_max - q_min) / n
        x = q_min + dx * np.arange(n)
    kernel = np.exp(-1j * np.outer(p, x))
    return kernel @ samples * dx / math.sqrt(2.0 * math.pi)


def standard_from_wavefunctions(psi_q, psi_p, geometry: Geometry) -> PhaseGrid:
    """Standard-ordered QDF ``(2 pi)^(-1/2) e^{iqp} psi*(q) psi~(p)``.

    ``psi_q`` holds samples on the grid q nodes, or is a callable. ``psi_p``
    holds samples on the p nodes; if ``None`` it is computed from ``psi_q``
    by an oversampled quadrature.
    """
    g = geometry
    q, p = g.q, g.p
    if psi_p is None:
        psi_p = momentum_transform(psi_q, g.q_min, g.q_max, g.n_q, p)
    if callable(psi_q):
        psi_q = psi_q(q)
    if callable(psi_p):
        psi_p = psi_p(p)
    psi_q = np.asarray(psi_q, dtype=complex)
    psi_p = np.asarray(psi_p, dtype=complex)
    if psi_q.shape != (g.n_q,) or psi_p.shape != (g.n_p,):
        raise ValueError(
            f"wavefunction samples {psi_q.shape}, {psi_p.shape} do not match grid {g.shape}"
        )
    vals = np.exp(1j * np.outer(q, p)) * np.outer(np.conj(psi_q), psi_p) / math.sqrt(2.0 * math.pi)
    return PhaseGrid(g, vals, STANDARD)


def _gaussian_qdf(g: OrderingParams, dq, dp):
    """Closed-form QDF of the oscillator ground state displaced to the origin of (dq, dp)."""
    a = 0.25 - g.g1
    b = 0.25 - g.g2
    c = g.g3
    if not (a > 0.0 and b > 0.0):
        raise ValueError(
            f"ground-state characteristic function does not decay for ordering ({g}); "
            "need g1 < 1/4 and g2 < 1/4"
        )
    det = a * b + c * c
    return np.exp(-(a * dq**2 + b * dp**2 - 2j * c * dq * dp) / (4.0 * det)) / (4.0 * math.pi * math.sqrt(det))


def qdf_ground(g: OrderingParams, geometry: Geometry) -> PhaseGrid:
    """Ground-state QDF in ordering ``g`` from the analytic Fourier transform."""
    Q, P = geometry.mesh()
    return PhaseGrid(geometry, _gaussian_qdf(g, Q, P), g)


def _check_margin(geometry: Geometry, q0: float, p0: float) -> None:
    m = 4.0 / SQRT2
    g = geometry
    if q0 - m < g.q_min or q0 + m > g.q_max or p0 - m < g.p_min or p0 + m > g.p_max:
        warnings.warn(
            f"state centred at ({q0:.3g}, {p0:.3g}) is within 4 sigma of the grid edge",
            MarginWarning,
            stacklevel=3,
        )


def qdf_coherent(alpha: complex, g: OrderingParams, geometry: Geometry) -> PhaseGrid:
    """Coherent-state QDF: the ground-state QDF of ordering ``g`` displaced."""
    alpha = complex(alpha)
    q0, p0 = SQRT2 * alpha.real, SQRT2 * alpha.imag
    _check_margin(geometry, q0, p0)
    Q, P = geometry.mesh()
    return PhaseGrid(geometry, _gaussian_qdf(g, Q - q0, P - p0), g)


def wigner_coherent(alpha: complex, geometry: Geometry) -> PhaseGrid:
    return qdf_coherent(alpha, WIGNER, geometry)


def standard_cat(alpha: complex, geometry: Geometry) -> PhaseGrid:
    """Standard-ordered QDF of the even cat state, as four displaced Gaussians."""
    alpha = complex(alpha)
    A, B = alpha.real, alpha.imag
    Q, P = geometry.mesh()
    norm = 1.0 / (2.0 + 2.0 * math.exp(-2.0 * abs(alpha) ** 2))
    pref = norm / math.sqrt(2.0 * math.pi) / math.sqrt(math.pi) * np.exp(2j * A * B) * np.exp(1j * Q * P)
    qa, qb = SQRT2 * A, SQRT2 * B
    terms = (
        np.exp(-0.5 * (Q - qa) ** 2 - 0.5 * (P - qb) ** 2 - SQRT2 * 1j * (Q * B + A * P))
        + np.exp(-0.5 * (Q - qa) ** 2 - 0.5 * (P + qb) ** 2 - SQRT2 * 1j * (Q * B - A * P))
        + np.exp(-0.5 * (Q + qa) ** 2 - 0.5 * (P - qb) ** 2 - SQRT2 * 1j * (-Q * B + A * P))
        + np.exp(-0.5 * (Q + qa) ** 2 - 0.5 * (P + qb) ** 2 + SQRT2 * 1j * (Q * B + A * P))
    )
    return PhaseGrid(geometry, pref * terms, STANDARD)


def standard_superposition01(geometry: Geometry) -> PhaseGrid:
    """Standard-ordered QDF of (|0> + |1>)/sqrt(2)."""
    Q, P = geometry.mesh()
    gauss = np.exp(1j * Q * P - 0.5 * Q**2 - 0.5 * P**2) / math.pi
    vals = gauss * (0.5 / SQRT2 - 0.5j * P + 0.5 * Q - 1j / SQRT2 * Q * P)
    return PhaseGrid(geometry, vals, STANDARD)


def initial_qdf(spec: StateSpec, g: OrderingParams, geometry: Geometry, cap: float | None = None) -> PhaseGrid:
    """QDF of ``spec`` in ordering ``g``.

    Ground and coherent states are closed forms for every decaying ordering;
    cat and superposition states start from their standard-ordered closed
    form and are converted spectrally.
    """
    if spec.kind == "ground":
        return qdf_ground(g, geometry)
    if spec.kind == "coherent":
        return qdf_coherent(spec.alpha, g, geometry)
    if spec.kind == "cat":
        _check_margin(geometry, SQRT2 * abs(spec.alpha.real), SQRT2 * abs(spec.alpha.imag))
        F = standard_cat(spec.alpha, geometry)
    else:
        F = standard_superposition01(geometry)
    if g == STANDARD:
        return F
    kw = {} if cap is None else {"cap": cap}
    return convert_ordering(F, STANDARD, g, **kw)
