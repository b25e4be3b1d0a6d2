"""Factor coefficients of the product-form propagator.

The propagator of ``dF/dt = sum_i a_i(t) S_i F`` is written as the ordered
product

    U(t, 0) = exp(w1 S1) exp(w2 S2) ... exp(w9 S9)

(leftmost factor applied last). The w_i obey a closed nonlinear ODE system
with w_i(0) = 0, integrated here with fixed-step classical Runge-Kutta.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .eom import LieCoefficients
from .exceptions import BlowUpError

__all__ = [
    "WeiNormanState",
    "IntegratorConfig",
    "Trajectory",
    "rhs",
    "integrate",
]


@dataclass(frozen=True)
class WeiNormanState:
    t: float
    w: np.ndarray = field(default_factory=lambda: np.zeros(9, dtype=complex))

    def __post_init__(self) -> None:
        w = np.array(self.w, dtype=complex).reshape(9)
        w.setflags(write=False)
        object.__setattr__(self, "w", w)

    def __getitem__(self, i: int) -> complex:
        """1-based access, ``state[1]`` is w1."""
        if not 1 <= i <= 9:
            raise IndexError(i)
        return complex(self.w[i - 1])

    @property
    def affine(self) -> np.ndarray:
        return self.w[:6]

    @property
    def diffusion(self) -> np.ndarray:
        return self.w[6:]


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step RK4 settings.

    ``dt=None`` picks ``min(T / 10000, 1e-3)``. The actual step on each output
    segment is shrunk so that segment ends are hit exactly.
    """

    dt: float | None = None
    blowup_threshold: float = 1e8
    max_steps: int = 50_000_000

    def __post_init__(self) -> None:
        if self.dt is not None and not self.dt > 0.0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if not self.blowup_threshold > 0.0:
            raise ValueError("blowup_threshold must be > 0")

    def step_for(self, T: float) -> float:
        if self.dt is not None:
            return self.dt
        return min(T / 10000.0, 1e-3) if T > 0 else 1e-3


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray  # (K,)
    w: np.ndarray  # (K, 9) complex

    def __len__(self) -> int:
        return len(self.times)

    def state(self, k: int) -> WeiNormanState:
        return WeiNormanState(float(self.times[k]), self.w[k])

    @property
    def final(self) -> WeiNormanState:
        return self.state(-1)

    def __iter__(self):
        for k in range(len(self)):
            yield self.state(k)


def _rhs(a, w):
    a1, a2, a3, a4, a5, a6, a7, a8, a9 = a
    w1, w2, w3, w4, _, _, _, _, _ = w
    w1w2 = w1 * w2
    e_p = cmath.exp(w3 + w4)
    e_m = cmath.exp(w4 - w3)
    return (
        a1 - 2.0 * a3 * w1 - a2 * w1 * w1,
        a2 + 2.0 * a2 * w1w2 + 2.0 * a3 * w2,
        a3 + a2 * w1,
        a4,
        (a6 * w1 + a5) * e_p,
        (a6 * w1w2 + a5 * w2 + a6) * e_m,
        (a8 * w1 * w1 + a9 * w1 + a7) * e_p * e_p,
        (a9 * (w2 + w1w2 * w2) + a8 * (1.0 + 2.0 * w1w2 + w1w2 * w1w2) + a7 * w2 * w2) * e_m * e_m,
        (a9 * (1.0 + 2.0 * w1w2) + 2.0 * a8 * (w1 + w1 * w1w2) + 2.0 * a7 * w2) * e_p * e_m,
    )


def rhs(a: LieCoefficients, w: WeiNormanState | np.ndarray, t: float | None = None) -> np.ndarray:
    """Time derivative of the nine factor coefficients."""
    if isinstance(w, WeiNormanState):
        t = w.t if t is None else t
        w = w.w
    if t is None:
        raise ValueError("t is required when w is a plain array")
    avals = [complex(x) for x in a(float(t))]
    return np.array(_rhs(avals, [complex(x) for x in w]), dtype=complex)


def _check(w, t, threshold):
    for i, x in enumerate(w):
        if not (cmath.isfinite(x) and abs(x) <= threshold):
            raise BlowUpError(
                f"w{i + 1} left the bounded region (|w{i + 1}| = {abs(x):.3g}) at t = {t:.6g}; "
                "propagate in shorter slices",
                t=t,
                index=i + 1,
            )


def integrate(
    a: LieCoefficients,
    T: float,
    cfg: IntegratorConfig | None = None,
    t_out=None,
) -> Trajectory:
    """Integrate the factor-coefficient ODEs from 0 to ``T``.

    Parameters
    ----------
    a : LieCoefficients
        Equation-of-motion coefficients.
    T : float
        Final time, ``T >= 0``.
    cfg : IntegratorConfig, optional
        Step size and blow-up settings.
    t_out : array_like, optional
        Output times in ``[0, T]``. ``0`` and ``T`` are always included.

    Returns
    -------
    Trajectory
        States at the sorted output times.

    Raises
    ------
    BlowUpError
        If any coefficient exceeds ``cfg.blowup_threshold`` in magnitude.
    """
    T = float(T)
    if not T >= 0.0:
        raise ValueError(f"T must be >= 0, got {T}")
    cfg = cfg or IntegratorConfig()
    dt = cfg.step_for(T)
    times = {0.0, T}
    if t_out is not None:
        for x in np.atleast_1d(np.asarray(t_out, dtype=float)):
            if x < 0.0 or x > T * (1 + 1e-12):
                raise ValueError(f"output time {x} outside [0, {T}]")
            times.add(min(float(x), T))
    times = np.array(sorted(times))

    nsteps = [max(1, math.ceil((t1 - t0) / dt - 1e-9)) for t0, t1 in zip(times[:-1], times[1:])]
    if sum(nsteps) > cfg.max_steps:
        raise ValueError(f"{sum(nsteps)} steps requested, more than max_steps={cfg.max_steps}")

    w = np.zeros(9, dtype=complex)
    out = [w]
    thr = cfg.blowup_threshold
    with np.errstate(over="ignore", invalid="ignore"):
        for (t0, t1), n in zip(zip(times[:-1], times[1:]), nsteps):
            w = _advance(a, w, t0, t1, n, thr)
            out.append(w)
    return Trajectory(times, np.array(out, dtype=complex))


def _advance(a, w, t0, t1, n, thr):
    """RK4 from t0 to t1 in n equal steps."""
    h = (t1 - t0) / n
    # coefficients at every stage time of the segment, in one vectorized call
    stage_t = t0 + 0.5 * h * np.arange(2 * n + 1)
    stage_t[-1] = t1
    avals = a(stage_t).T.tolist()
    h2, h6 = 0.5 * h, h / 6.0
    for k in range(n):
        a0, am, a1_ = avals[2 * k], avals[2 * k + 1], avals[2 * k + 2]
        try:
            k1 = np.array(_rhs(a0, w.tolist()))
            k2 = np.array(_rhs(am, (w + h2 * k1).tolist()))
            k3 = np.array(_rhs(am, (w + h2 * k2).tolist()))
            k4 = np.array(_rhs(a1_, (w + h * k3).tolist()))
        except OverflowError:
            raise BlowUpError(
                f"overflow in factor coefficients at t = {t0 + k * h:.6g}; "
                "propagate in shorter slices",
                t=t0 + k * h,
            ) from None
        w = w + h6 * (k1 + k4 + 2.0 * (k2 + k3))
        if not np.abs(w).max() <= thr:
            _check(w.tolist(), t0 + (k + 1) * h, thr)
    return w
