"""Reference solutions independent of the factored-propagator pipeline.

Two kinds of ground truth live here:

* a truncated Fock-space density matrix integrated under the full master
  equation and mapped to a QDF grid by direct quadrature (no FFT), and
* the closed-form propagated QDFs of the worked examples (free particle,
  harmonic oscillator, exponentially modulated oscillator).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .exceptions import CutoffLeakageError
from .model import QuadraticModel
from .ordering import ANTINORMAL, NORMAL, WIGNER, OrderingParams
from .phasegrid import Geometry, PhaseGrid

__all__ = [
    "FockDensityMatrix",
    "ladder",
    "hermite_functions",
    "hamiltonian_matrix",
    "master_rhs",
    "evolve_rho",
    "rho_to_qdf",
    "analytic_solution",
    "ANALYTIC_CASES",
    "DEFAULT_CUTOFF",
]

DEFAULT_CUTOFF = 40
LEAKAGE_TOL = 1e-10
SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class FockDensityMatrix:
    entries: np.ndarray

    def __post_init__(self) -> None:
        rho = np.array(self.entries, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError("density matrix must be square")
        object.__setattr__(self, "entries", rho)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def from_ket(cls, psi) -> "FockDensityMatrix":
        psi = np.asarray(psi, dtype=complex)
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def coherent(cls, alpha: complex, dim: int = DEFAULT_CUTOFF) -> "FockDensityMatrix":
        return cls.from_ket(coherent_ket(alpha, dim))

    @classmethod
    def ground(cls, dim: int = DEFAULT_CUTOFF) -> "FockDensityMatrix":
        return cls.coherent(0j, dim)

    @classmethod
    def cat(cls, alpha: complex, dim: int = DEFAULT_CUTOFF) -> "FockDensityMatrix":
        psi = coherent_ket(alpha, dim) + coherent_ket(-alpha, dim)
        psi /= math.sqrt(2.0 * (1.0 + math.exp(-2.0 * abs(alpha) ** 2)))
        return cls.from_ket(psi)

    @classmethod
    def superposition01(cls, dim: int = DEFAULT_CUTOFF) -> "FockDensityMatrix":
        psi = np.zeros(dim, dtype=complex)
        psi[0] = psi[1] = 1.0 / SQRT2
        return cls.from_ket(psi)

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def purity(self) -> float:
        return float(np.real(np.trace(self.entries @ self.entries)))

    def top_population(self, levels: int = 2) -> float:
        return float(np.abs(np.diag(self.entries)[-levels:]).max())

    def validate(self, tol: float = 1e-12, psd_tol: float = 1e-10) -> None:
        rho = self.entries
        if np.abs(rho - rho.conj().T).max() > tol:
            raise ValueError("density matrix is not Hermitian")
        if abs(self.trace() - 1.0) > tol:
            raise ValueError(f"density matrix trace {self.trace()} != 1")
        if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() < -psd_tol:
            raise ValueError("density matrix is not positive semidefinite")

    def expect(self, op: np.ndarray) -> complex:
        return complex(np.trace(self.entries @ op))


def coherent_ket(alpha: complex, dim: int) -> np.ndarray:
    n = np.arange(dim)
    alpha = complex(alpha)
    if alpha == 0:
        out = np.zeros(dim, dtype=complex)
        out[0] = 1.0
        return out
    log_amp = n * np.log(abs(alpha)) - 0.5 * gammaln(n + 1) - 0.5 * abs(alpha) ** 2
    return np.exp(log_amp + 1j * n * np.angle(alpha))


def ladder(dim: int) -> np.ndarray:
    """Truncated annihilation operator."""
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)


def hamiltonian_matrix(model: QuadraticModel, dim: int, t: float = 0.0) -> np.ndarray:
    """Truncated Hamiltonian matrix at time ``t``.

    A coherent-form Hamiltonian is built from a and a^dag directly; otherwise
    the q,p coefficients are used with q = (a + a^dag)/sqrt(2) and
    p = (a - a^dag)/(i sqrt(2)).
    """
    a = ladder(dim)
    ad = a.conj().T
    if model.coherent_part is not None:
        h = model.coherent_part
        return (
            h.omega * (ad @ a + 0.5 * np.eye(dim))
            + h.V * ad
            + np.conj(h.V) * a
            + h.A * ad @ ad
            + np.conj(h.A) * a @ a
        )
    q = (a + ad) / SQRT2
    p = (a - ad) / (1j * SQRT2)
    k1, k2, k3, k4, k5 = model.hamiltonian.at(t)
    return k1 * q @ q + k2 * p @ p + 0.5 * k3 * (q @ p + p @ q) + k4 * q + k5 * p


def master_rhs(rho: np.ndarray, H: np.ndarray, a: np.ndarray, damping) -> np.ndarray:
    """Right-hand side of the reservoir master equation."""
    out = -1j * (H @ rho - rho @ H)
    if damping is None or damping.gamma == 0.0:
        return out
    ad = a.conj().T
    g, N, M = damping.gamma, damping.N, damping.M

    def dissipator(x, y):
        # 2 x rho y - y x rho - rho y x
        return 2.0 * x @ rho @ y - y @ x @ rho - rho @ y @ x

    out = out + 0.5 * g * (N + 1.0) * dissipator(a, ad)
    if N:
        out = out + 0.5 * g * N * dissipator(ad, a)
    if M:
        out = out + 0.5 * g * M * dissipator(ad, ad)
        out = out + 0.5 * g * np.conj(M) * dissipator(a, a)
    return out


def evolve_rho(
    rho0: FockDensityMatrix,
    model: QuadraticModel,
    T: float,
    dt: float = 1e-3,
    leakage_tol: float = LEAKAGE_TOL,
) -> FockDensityMatrix:
    """Integrate the master equation with fixed-step RK4."""
    if T < 0:
        raise ValueError("T must be >= 0")
    if rho0.top_population() > leakage_tol:
        raise CutoffLeakageError(
            f"initial state populates the top Fock levels ({rho0.top_population():.2e}); raise the cutoff"
        )
    dim = rho0.dim
    a = ladder(dim)
    rho = rho0.entries.copy()
    n = max(1, math.ceil(T / dt - 1e-9)) if T > 0 else 0
    h = T / n if n else 0.0
    static = model.coherent_part is not None or model.hamiltonian.quadratic_is_constant and all(
        k.is_constant for k in model.hamiltonian.coefficients
    )
    H0 = hamiltonian_matrix(model, dim) if static else None

    def Hat(t):
        return H0 if static else hamiltonian_matrix(model, dim, t)

    for k in range(n):
        t = k * h
        Hm = Hat(t + 0.5 * h)
        k1 = master_rhs(rho, Hat(t), a, model.damping)
        k2 = master_rhs(rho + 0.5 * h * k1, Hm, a, model.damping)
        k3 = master_rhs(rho + 0.5 * h * k2, Hm, a, model.damping)
        k4 = master_rhs(rho + h * k3, Hat(t + h), a, model.damping)
        rho = rho + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    out = FockDensityMatrix(rho)
    if out.top_population() > leakage_tol:
        raise CutoffLeakageError(
            f"population {out.top_population():.2e} reached the top Fock levels; raise the cutoff"
        )
    return out


def hermite_functions(n: int, x) -> np.ndarray:
    """Oscillator eigenfunctions <x|k>, k < n, via the three-term recurrence.

    Returns an array of shape ``(n,) + x.shape``.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((n,) + x.shape)
    out[0] = math.pi ** -0.25 * np.exp(-0.5 * x**2)
    if n > 1:
        out[1] = SQRT2 * x * out[0]
    for k in range(1, n - 1):
        out[k + 1] = math.sqrt(2.0 / (k + 1)) * x * out[k] - math.sqrt(k / (k + 1)) * out[k - 1]
    return out


def _wigner_char(rho: np.ndarray, x: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """chi_w(u, v) = int <x - u/2| rho |x + u/2> e^{i v x} dx, as ``[v, u]``."""
    dim = rho.shape[0]
    dx = x[1] - x[0]
    ev = np.exp(1j * np.outer(v, x)) * dx  # (Nv, Nx)
    K = np.empty((len(u), len(x)), dtype=complex)
    for k, uk in enumerate(u):
        left = hermite_functions(dim, x - 0.5 * uk)
        right = hermite_functions(dim, x + 0.5 * uk)
        K[k] = np.einsum("mj,mj->j", left, rho @ right)
    return ev @ K.T


def rho_to_qdf(
    rho: FockDensityMatrix,
    g: OrderingParams,
    geometry: Geometry,
    x_step: float = 0.05,
    u_step: float = 0.1,
    extent: float | None = None,
    decay_tol: float = 1e-10,
) -> PhaseGrid:
    """QDF of ``rho`` in ordering ``g`` on ``geometry`` by dense quadrature.

    The position-basis kernel <x - u/2|rho|x + u/2> is built from Hermite
    functions, Fourier-integrated over x to the Wigner characteristic
    function, multiplied by the ordering kernel and integrated back onto the
    output nodes with explicit exponential matrices.
    """
    dim = rho.dim
    reach = math.sqrt(2.0 * dim + 1.0)
    xl = reach + 6.0
    ul = 2.0 * reach + 6.0 if extent is None else float(extent)
    x = np.arange(-xl, xl + 0.5 * x_step, x_step)
    u = np.arange(-ul, ul + 0.5 * u_step, u_step)
    v = u
    chi = _wigner_char(rho.entries, x, u, v)
    chi = chi * np.exp(g.log_kernel(u[None, :], v[:, None]))
    mag = np.abs(chi)
    rim = np.concatenate([mag[0], mag[-1], mag[:, 0], mag[:, -1]])
    if not np.isfinite(mag).all() or rim.max() > decay_tol * mag.max():
        raise ValueError(
            f"characteristic function for ordering ({g}) does not decay inside |u|,|v| <= {ul:g}"
        )
    q, p = geometry.q, geometry.p
    eq = np.exp(-1j * np.outer(q, v)) * u_step
    ep = np.exp(1j * np.outer(u, p)) * u_step
    vals = eq @ chi @ ep / (4.0 * math.pi**2)
    return PhaseGrid(geometry, vals, g)


# ---------------------------------------------------------------------------
# closed-form solutions


def _gauss(q, p, q0=0.0, p0=0.0):
    return np.exp(-((q - q0) ** 2) - (p - p0) ** 2) / math.pi


def _ho_rotation(q, p, t):
    """Phase-space point at time 0 that flows to (q, p) at time t."""
    c, s = math.cos(t), math.sin(t)
    return c * q - s * p, c * p + s * q


def _standard_cat(q, p, A, B, phase_ab):
    r2 = SQRT2
    norm = 1.0 / (2.0 + 2.0 * math.exp(-2.0 * (A * A + B * B)))
    pref = norm / math.sqrt(2.0 * math.pi) / math.sqrt(math.pi) * np.exp(1j * phase_ab) * np.exp(1j * q * p)
    return pref * (
        np.exp(-0.5 * (q - r2 * A) ** 2 - 0.5 * (p - r2 * B) ** 2 - r2 * 1j * (q * B + A * p))
        + np.exp(-0.5 * (q - r2 * A) ** 2 - 0.5 * (p + r2 * B) ** 2 - r2 * 1j * (q * B - A * p))
        + np.exp(-0.5 * (q + r2 * A) ** 2 - 0.5 * (p - r2 * B) ** 2 - r2 * 1j * (-q * B + A * p))
        + np.exp(-0.5 * (q + r2 * A) ** 2 - 0.5 * (p + r2 * B) ** 2 + r2 * 1j * (q * B + A * p))
    )


def _free_wigner(q, p, t, prm):
    a = complex(prm.get("alpha", 0j))
    return _gauss(q - p * t, p, SQRT2 * a.real, SQRT2 * a.imag), WIGNER


def _free_standard_ground(q, p, t, prm):
    z = 1.0 - 1j * t
    vals = (
        np.exp(1j * q * p) / math.sqrt(2.0 * math.pi) / math.sqrt(math.pi)
        * z**-0.5 * np.exp(-(q**2) / (2.0 * z)) * np.exp(-0.5 * p**2 * (1.0 + 1j * t))
    )
    return vals, OrderingParams(0, 0, 0.25)


def _free_q_ground(q, p, t, prm):
    d = 4.0 + t * t
    vals = np.exp(-(2 * q**2 + 2 * p**2 + p**2 * t**2 - 2 * q * p * t) / d) / (math.pi * math.sqrt(d))
    return vals, ANTINORMAL


def _ho_wigner_map(q, p, t, prm):
    a = complex(prm.get("alpha", 0j))
    qq, pp = _ho_rotation(q, p, t)
    return _gauss(qq, pp, SQRT2 * a.real, SQRT2 * a.imag), WIGNER


def _ho_standard_01(q, p, t, prm):
    base = np.exp(1j * q * p - 0.5 * q**2 - 0.5 * p**2) / math.pi
    c, s = math.cos(t), math.sin(t)
    vals = base * (
        0.5 / SQRT2
        - 1j / SQRT2 * q * p
        + 0.5 * (q * c + 1j * q * s - 1j * p * c - p * s)
    )
    return vals, OrderingParams(0, 0, 0.25)


def _ho_standard_cat(q, p, t, prm):
    a = complex(prm["alpha"])
    A, B = a.real, a.imag
    N = A * math.cos(t) + B * math.sin(t)
    M = B * math.cos(t) - A * math.sin(t)
    phase = 2.0 * N * M
    return _standard_cat(q, p, N, M, phase), OrderingParams(0, 0, 0.25)


def _ho_nan_map(q, p, t, prm):
    g = prm.get("ordering", ANTINORMAL)
    if isinstance(g, str):
        from .ordering import named_ordering

        g = named_ordering(g)
    if g.g3 != 0.0 or g.g1 != g.g2:
        raise ValueError("the oscillator rotation map holds for g1 == g2, g3 == 0 only")
    if g.g1 >= 0.25:
        raise ValueError(f"ordering ({g}) has no regular coherent-state QDF (e.g. normal ordering)")
    a = complex(prm.get("alpha", 0j))
    qq, pp = _ho_rotation(q, p, t)
    s = 0.5 - 2.0 * g.g1  # variance of the displaced Gaussian
    q0, p0 = SQRT2 * a.real, SQRT2 * a.imag
    vals = np.exp(-((qq - q0) ** 2 + (pp - p0) ** 2) / (2.0 * s)) / (2.0 * math.pi * s)
    return vals, g


def _tdep_standard_ground(q, p, t, prm):
    delta = float(prm["delta"])
    e = math.exp(2.0 * delta * t)
    vals = np.exp(1j * p * q - 0.5 * q**2 / e - 0.5 * p**2 * e) / math.sqrt(2.0 * math.pi) / math.sqrt(math.pi)
    return vals, OrderingParams(0, 0, 0.25)


ANALYTIC_CASES = {
    "free-wigner": _free_wigner,
    "free-standard-ground": _free_standard_ground,
    "free-Q-ground": _free_q_ground,
    "ho-wigner-map": _ho_wigner_map,
    "ho-standard-01": _ho_standard_01,
    "ho-standard-cat": _ho_standard_cat,
    "ho-NAN-map": _ho_nan_map,
    "tdep-standard-ground": _tdep_standard_ground,
}


def analytic_solution(case_id: str, params: dict | None, geometry: Geometry, t: float) -> PhaseGrid:
    """Sample a closed-form propagated QDF.

    Parameters
    ----------
    case_id : str
        One of :data:`ANALYTIC_CASES`.
    params : dict
        ``alpha`` for coherent/cat cases, ``delta`` (and optionally ``eps``)
        for ``tdep-standard-ground``, ``ordering`` for ``ho-NAN-map``.
    """
    if case_id not in ANALYTIC_CASES:
        raise ValueError(f"unknown analytic case {case_id!r}; expected one of {', '.join(ANALYTIC_CASES)}")
    Q, P = geometry.mesh()
    vals, g = ANALYTIC_CASES[case_id](Q, P, float(t), dict(params or {}))
    return PhaseGrid(geometry, vals, g, float(t))
