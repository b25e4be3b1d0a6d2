"""Sampled quasi-distributions and application of the factored propagator.

Transform convention::

    chi(u, v) = iint F(q, p) exp(+i v q - i u p) dq dp
    F(q, p)   = 1/(4 pi^2) iint chi(u, v) exp(-i v q + i u p) du dv

so d/dq acts as multiplication by ``-i v`` and d/dp as ``+i u`` on the
characteristic function. Grid arrays are indexed ``[q, p]``; characteristic
arrays ``[v, u]`` with frequencies in FFT order.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import fft as sfft
from scipy import ndimage

from .exceptions import StabilityError, UnsupportedError
from .ordering import WIGNER, OrderingParams

__all__ = [
    "Geometry",
    "PhaseGrid",
    "CharGrid",
    "QuadraticSymbol",
    "BoundaryMassWarning",
    "to_char",
    "from_char",
    "apply_diffusion",
    "apply_affine",
    "affine_map",
    "propagate",
    "propagate_piecewise",
    "convert_ordering",
    "moment",
    "expectation_quadratic",
    "DEFAULT_CAP",
    "SUPPORT_FLOOR",
]

DEFAULT_CAP = 1e6
# spectrum entries below this fraction of the peak are treated as round-off
SUPPORT_FLOOR = 1e-14
BOUNDARY_TOL = 1e-10


class BoundaryMassWarning(UserWarning):
    """Non-negligible values on the grid edge were pushed out of the domain."""


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Geometry:
    """Uniform periodic sampling of a (q, p) rectangle, endpoint excluded."""

    n_q: int
    n_p: int
    q_min: float
    q_max: float
    p_min: float
    p_max: float

    def __post_init__(self) -> None:
        for name in ("n_q", "n_p"):
            n = getattr(self, name)
            if int(n) != n or not _is_pow2(int(n)) or n < 8:
                raise ValueError(f"{name} must be a power of two >= 8, got {n}")
            object.__setattr__(self, name, int(n))
        for name in ("q_min", "q_max", "p_min", "p_max"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not (self.q_max > self.q_min and self.p_max > self.p_min):
            raise ValueError("grid bounds must satisfy min < max")

    @classmethod
    def square(cls, n: int, half_width: float) -> "Geometry":
        return cls(n, n, -half_width, half_width, -half_width, half_width)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_q, self.n_p)

    @property
    def dq(self) -> float:
        return (self.q_max - self.q_min) / self.n_q

    @property
    def dp(self) -> float:
        return (self.p_max - self.p_min) / self.n_p

    @property
    def q(self) -> np.ndarray:
        return self.q_min + self.dq * np.arange(self.n_q)

    @property
    def p(self) -> np.ndarray:
        return self.p_min + self.dp * np.arange(self.n_p)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.q, self.p, indexing="ij")

    @property
    def v(self) -> np.ndarray:
        """Frequencies conjugate to q, FFT order."""
        return 2.0 * np.pi * sfft.fftfreq(self.n_q, d=self.dq)

    @property
    def u(self) -> np.ndarray:
        """Frequencies conjugate to p, FFT order."""
        return 2.0 * np.pi * sfft.fftfreq(self.n_p, d=self.dp)

    def char_mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """(u, v) arrays broadcast to the ``[v, u]`` layout."""
        return self.u[None, :], self.v[:, None]


@dataclass(frozen=True)
class PhaseGrid:
    geometry: Geometry
    values: np.ndarray
    ordering: OrderingParams = WIGNER
    t: float = 0.0

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != self.geometry.shape:
            raise ValueError(f"values shape {vals.shape} does not match grid {self.geometry.shape}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, fn, geometry: Geometry, ordering: OrderingParams = WIGNER, t: float = 0.0) -> "PhaseGrid":
        Q, P = geometry.mesh()
        return cls(geometry, np.broadcast_to(fn(Q, P), geometry.shape).astype(complex), ordering, t)

    def with_values(self, values, **changes) -> "PhaseGrid":
        return replace(self, values=values, **changes)

    def normalization(self) -> complex:
        g = self.geometry
        return complex(self.values.sum() * g.dq * g.dp)


@dataclass(frozen=True)
class CharGrid:
    geometry: Geometry
    values: np.ndarray
    ordering: OrderingParams = WIGNER
    t: float = 0.0

    @property
    def u(self) -> np.ndarray:
        return self.geometry.u

    @property
    def v(self) -> np.ndarray:
        return self.geometry.v

    def at_origin(self) -> complex:
        return complex(self.values[0, 0])


def to_char(F: PhaseGrid) -> CharGrid:
    g = F.geometry
    # sum_j F_j e^{+i v_k q_j}: inverse DFT along q, forward DFT along p
    X = sfft.fft(sfft.ifft(F.values, axis=0, norm="forward"), axis=1)
    phase = np.exp(1j * g.v * g.q_min)[:, None] * np.exp(-1j * g.u * g.p_min)[None, :]
    return CharGrid(g, X * phase * (g.dq * g.dp), F.ordering, F.t)


def from_char(X: CharGrid) -> PhaseGrid:
    g = X.geometry
    phase = np.exp(-1j * g.v * g.q_min)[:, None] * np.exp(1j * g.u * g.p_min)[None, :]
    vals = sfft.ifft(sfft.fft(X.values * phase, axis=0, norm="forward"), axis=1)
    return PhaseGrid(g, vals / (g.dq * g.dp), X.ordering, X.t)


def _support_edge(mask: np.ndarray) -> np.ndarray:
    """Points of ``mask`` with a 4-neighbour outside it, or on the Nyquist rim."""
    inner = mask.copy()
    for axis in (0, 1):
        for shift in (1, -1):
            inner &= np.roll(mask, shift, axis=axis)
    edge = mask & ~inner
    # the spectrum is periodic; the Nyquist rows/columns are its outer rim
    rim = np.zeros_like(mask)
    rim[mask.shape[0] // 2, :] = True
    rim[:, mask.shape[1] // 2] = True
    return edge | (mask & rim)


def _spectral_multiply(F: PhaseGrid, parts: dict[str, np.ndarray], cap: float, ordering=None) -> PhaseGrid:
    """Multiply the characteristic function by ``exp(sum(parts))``.

    Entries whose exponent has a positive real part and whose input magnitude
    is below the round-off floor are dropped rather than amplified. The
    result must decay by at least ``cap`` from its peak to the edge of the
    retained support; otherwise a :class:`StabilityError` names the factor
    contributing the largest growth there.
    """
    X = to_char(F)
    L = sum(parts.values())
    L = np.broadcast_to(L, X.values.shape)
    grows = L.real > 0.0
    mag = np.abs(X.values)
    peak = mag.max()
    out = np.zeros_like(X.values)
    if peak == 0.0:
        return from_char(replace(X, values=out, ordering=ordering or X.ordering))
    resolved = mag > SUPPORT_FLOOR * peak
    keep = resolved | ~grows
    with np.errstate(over="ignore", invalid="ignore"):
        out[keep] = X.values[keep] * np.exp(L[keep])
    edge = _support_edge(resolved) & grows
    out_mag = np.abs(out)
    top = out_mag.max()
    if edge.any():
        edge_max = out_mag[edge].max()
        if not np.isfinite(top) or not np.isfinite(edge_max) or edge_max * cap > top:
            k = np.argmax(np.where(edge, out_mag, -1.0))
            idx = np.unravel_index(k, out.shape)
            name = max(parts, key=lambda n: np.broadcast_to(parts[n], out.shape)[idx].real)
            gain = float(top / edge_max) if edge_max > 0 and np.isfinite(top) else 0.0
            raise StabilityError(
                f"spectral factor {name} amplifies unresolved content: output decays only by "
                f"{gain:.3g} (< cap {cap:.3g}) toward the edge of the resolved spectrum",
                factor=name,
                gain=gain,
            )
    return from_char(replace(X, values=out, ordering=ordering or X.ordering))


def apply_diffusion(F: PhaseGrid, w7: complex, w8: complex, w9: complex, cap: float = DEFAULT_CAP) -> PhaseGrid:
    """Apply exp(w7 S7) exp(w8 S8) exp(w9 S9) through the characteristic function."""
    w7, w8, w9 = complex(w7), complex(w8), complex(w9)
    if w7 == 0 and w8 == 0 and w9 == 0:
        return F
    u, v = F.geometry.char_mesh()
    parts = {}
    if w7 != 0:
        parts["w7"] = -w7 * v**2
    if w8 != 0:
        parts["w8"] = -w8 * u**2
    if w9 != 0:
        parts["w9"] = w9 * u * v
    return _spectral_multiply(F, parts, cap)


def affine_map(w, q, p):
    """Source coordinates of exp(w1 S1)...exp(w6 S6) for output points (q, p)."""
    w1, w2, w3, w4, w5, w6 = (float(x) for x in w)
    x = q + w1 * p
    y = p + w2 * x
    s3, s4 = math.exp(w3), math.exp(w4)
    x = x * s3 * s4 + w5
    y = y / s3 * s4 + w6
    return x, y


def _interp(values: np.ndarray, i: np.ndarray, j: np.ndarray) -> np.ndarray:
    coords = np.array([i.ravel(), j.ravel()])
    kw = dict(order=3, mode="grid-constant", cval=0.0, prefilter=True)
    re = ndimage.map_coordinates(values.real, coords, **kw)
    if np.any(values.imag):
        im = ndimage.map_coordinates(values.imag, coords, **kw)
    else:
        im = 0.0
    return (re + 1j * im).reshape(i.shape)


def apply_affine(F: PhaseGrid, w) -> PhaseGrid:
    """Apply exp(w1 S1) ... exp(w6 S6): one composed coordinate map.

    ``out(x) = exp(2 w4) * F(T6 T5 T4 T3 T2 T1 x)`` sampled by cubic-spline
    interpolation; points mapped outside the grid read zero.
    """
    w = np.asarray(w, dtype=complex).reshape(6)
    if np.any(np.abs(w.imag) > 1e-12 * (1.0 + np.abs(w.real))):
        raise UnsupportedError(f"affine factor coefficients must be real, got {w}")
    w = w.real
    if not np.any(w):
        return F
    g = F.geometry
    Q, P = g.mesh()
    x, y = affine_map(w, Q, P)
    i = (x - g.q_min) / g.dq
    j = (y - g.p_min) / g.dp
    outside = (i < 0) | (i > g.n_q - 1) | (j < 0) | (j > g.n_p - 1)
    if outside.any():
        vals = F.values
        ring = np.concatenate([vals[0], vals[-1], vals[:, 0], vals[:, -1]])
        vmax = np.abs(vals).max()
        if vmax > 0 and np.abs(ring).max() > BOUNDARY_TOL * vmax:
            warnings.warn(
                f"boundary ring holds {np.abs(ring).max() / vmax:.2e} of the peak; "
                "mass mapped outside the grid is dropped",
                BoundaryMassWarning,
                stacklevel=2,
            )
    out = _interp(F.values, i, j) * math.exp(2.0 * w[3])
    return F.with_values(out)


def propagate(F0: PhaseGrid, state, cap: float = DEFAULT_CAP) -> PhaseGrid:
    """Apply the factored propagator for one Wei-Norman state to ``F0``."""
    w = np.asarray(state.w, dtype=complex)
    if not w.any():
        # identity propagator: skip the round trip through transforms
        return F0.with_values(F0.values.copy(), t=F0.t + float(state.t))
    F = apply_diffusion(F0, w[6], w[7], w[8], cap=cap)
    F = apply_affine(F, w[:6])
    return F.with_values(F.values, t=F0.t + float(state.t))


def propagate_piecewise(
    F0: PhaseGrid,
    model,
    g: OrderingParams | None,
    T: float,
    slices: int = 1,
    cfg=None,
    cap: float = DEFAULT_CAP,
    max_refine: int = 6,
    on_slice=None,
    n_out: int = 2,
    affine_limit: float = 1e3,
) -> PhaseGrid:
    """Propagate over ``[0, T]`` as a sequence of independently factored slices.

    Each slice restarts the factor ODEs from zero with the coefficients
    shifted to the slice start, so a Riccati pole inside ``[0, T]`` is never
    integrated through. A slice that still blows up is halved, at most
    ``max_refine`` times. A slice ending close to a pole, where the shears
    |w1|, |w2| or the scale exp|w3| exceed ``affine_limit``, is treated the
    same way: the factors are finite there but too inaccurate to resample with.

    ``on_slice(t0, trajectory)``, if given, is called for every slice; each
    trajectory is sampled at ``n_out`` evenly spaced times of its slice.
    """
    from .eom import assemble
    from .exceptions import BlowUpError
    from .weinorman import integrate

    if slices < 1:
        raise ValueError("slices must be >= 1")
    if g is None:
        g = F0.ordering
    coeffs = assemble(model, g)
    base = F0.t

    def advance(F, t0, t1, depth):
        try:
            t_out = np.linspace(0.0, t1 - t0, max(n_out, 2))
            traj = integrate(coeffs.shifted(t0), t1 - t0, cfg, t_out=t_out)
            w = traj.final.w
            if max(abs(w[0]), abs(w[1]), math.exp(min(abs(w[2]), 700.0))) > affine_limit:
                raise BlowUpError(
                    f"factor coefficients ill-conditioned on [{t0:.6g}, {t1:.6g}] "
                    f"(|w1| = {abs(w[0]):.3g}, |w3| = {abs(w[2]):.3g}); use more slices",
                    t=t1,
                )
        except BlowUpError:
            if depth >= max_refine:
                raise
            mid = 0.5 * (t0 + t1)
            return advance(advance(F, t0, mid, depth + 1), mid, t1, depth + 1)
        if on_slice is not None:
            on_slice(t0, traj)
        out = propagate(F, traj.final, cap=cap)
        return out.with_values(out.values, t=base + t1)

    edges = np.linspace(0.0, float(T), slices + 1)
    F = F0
    for t0, t1 in zip(edges[:-1], edges[1:]):
        F = advance(F, float(t0), float(t1), 0)
    return F


def convert_ordering(F: PhaseGrid, g_from: OrderingParams | None, g_to: OrderingParams, cap: float = DEFAULT_CAP) -> PhaseGrid:
    """Re-express a QDF in another Gaussian ordering (chi_to = f_to / f_from * chi_from)."""
    g_from = F.ordering if g_from is None else g_from
    if g_from == g_to:
        return F.with_values(F.values, ordering=g_to)
    u, v = F.geometry.char_mesh()
    d1, d2, d3 = g_to.g1 - g_from.g1, g_to.g2 - g_from.g2, g_to.g3 - g_from.g3
    parts = {}
    if d1:
        parts["ordering:u^2"] = d1 * u**2 + 0j * v
    if d2:
        parts["ordering:v^2"] = d2 * v**2 + 0j * u
    if d3:
        parts["ordering:uv"] = 2j * d3 * u * v
    return _spectral_multiply(F, parts, cap, ordering=g_to)


def moment(F: PhaseGrid, m: int, n: int) -> complex:
    """Rectangle-rule ``iint q^m p^n F dq dp``."""
    if m < 0 or n < 0:
        raise ValueError("moment orders must be >= 0")
    if m + n > 4:
        raise ValueError("moments above total order 4 are not supported")
    g = F.geometry
    Q, P = g.mesh()
    return complex(np.sum(Q**m * P**n * F.values) * g.dq * g.dp)


@dataclass(frozen=True)
class QuadraticSymbol:
    """Observable ``k1 q^2 + k2 p^2 + k3 (qp+pq)/2 + k4 q + k5 p + k0``."""

    k1: float = 0.0
    k2: float = 0.0
    k3: float = 0.0
    k4: float = 0.0
    k5: float = 0.0
    k0: float = 0.0


def expectation_quadratic(F: PhaseGrid, sym: QuadraticSymbol, g: OrderingParams | None = None) -> complex:
    """Expectation value of a quadratic observable from a QDF of ordering ``g``."""
    g = F.ordering if g is None else g
    raw = (
        sym.k1 * moment(F, 2, 0)
        + sym.k2 * moment(F, 0, 2)
        + sym.k3 * moment(F, 1, 1)
        + sym.k4 * moment(F, 1, 0)
        + sym.k5 * moment(F, 0, 1)
    )
    const = sym.k0 + 2.0 * g.g2 * sym.k1 + 2.0 * g.g1 * sym.k2 - 2j * g.g3 * sym.k3
    return complex(raw + const * moment(F, 0, 0))
