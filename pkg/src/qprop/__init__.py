"""Propagation of Gaussian-class quasi-distribution functions.

A quadratic (optionally damped) model drives a phase-space QDF in any
ordering with a Gaussian kernel: Wigner, P, Q, standard, antistandard and
the s-ordered family. The propagator is factored into nine
single-generator exponentials whose coefficients obey a small ODE system;
each factor acts on a grid either as a spectral multiplier or as an affine
resampling.
"""

__version__ = "0.1.0"

from .eom import LieCoefficients, assemble, damping_lie_coeffs, hamiltonian_lie_coeffs
from .exceptions import (
    BlowUpError,
    CutoffLeakageError,
    QPropError,
    RepresentationError,
    StabilityError,
    UnsupportedError,
)
from .model import (
    CoefficientFn,
    CoherentHamiltonian,
    DampingSpec,
    QPHamiltonian,
    QuadraticModel,
    coherent_to_qp,
    qp_to_coherent,
    tdep_squeezing_model,
)
from .ordering import (
    ANTINORMAL,
    ANTISTANDARD,
    NORMAL,
    STANDARD,
    WIGNER,
    OrderingParams,
    kernel_value,
    named_ordering,
    parse_ordering,
)
from .phasegrid import (
    Geometry,
    PhaseGrid,
    convert_ordering,
    from_char,
    moment,
    propagate,
    propagate_piecewise,
    to_char,
)
from .states import StateSpec, initial_qdf, qdf_ground, standard_from_wavefunctions, wigner_coherent
from .weinorman import IntegratorConfig, Trajectory, WeiNormanState, integrate

__all__ = [name for name in dir() if not name.startswith("_")]
