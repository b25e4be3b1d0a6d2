import math

import numpy as np
import pytest

from qprop.eom import assemble
from qprop.exceptions import StabilityError, UnsupportedError
from qprop.model import CoherentHamiltonian, QPHamiltonian, QuadraticModel
from qprop.oracle import FockDensityMatrix, hamiltonian_matrix
from qprop.ordering import ANTINORMAL, ANTISTANDARD, NORMAL, STANDARD, WIGNER
from qprop.phasegrid import (
    BoundaryMassWarning,
    CharGrid,
    Geometry,
    PhaseGrid,
    QuadraticSymbol,
    apply_affine,
    apply_diffusion,
    convert_ordering,
    expectation_quadratic,
    from_char,
    moment,
    propagate,
    propagate_piecewise,
    to_char,
)
from qprop.states import StateSpec, initial_qdf, qdf_ground, standard_cat, wigner_coherent
from qprop.weinorman import WeiNormanState, integrate

G = Geometry.square(128, 8.0)
HO = QuadraticModel.from_coherent(CoherentHamiltonian(1.0))
FREE = QuadraticModel(QPHamiltonian(k2=0.5))


def test_geometry_validation():
    with pytest.raises(ValueError):
        Geometry(100, 128, -8, 8, -8, 8)
    with pytest.raises(ValueError):
        Geometry(4, 4, -8, 8, -8, 8)
    with pytest.raises(ValueError):
        Geometry(64, 64, 8, -8, -8, 8)
    g = Geometry(64, 32, -4, 4, -2, 6)
    assert g.q[0] == -4 and g.q[-1] == pytest.approx(4 - g.dq)
    assert g.p.shape == (32,)
    with pytest.raises(ValueError):
        PhaseGrid(g, np.zeros((64, 64)))


def test_transform_sign_convention():
    """chi(u, v) = iint F exp(+i v q - i u p): a displaced Gaussian fixes both signs."""
    q0, p0 = 1.3, -0.7
    F = wigner_coherent(complex(q0, p0) / math.sqrt(2), G)
    X = to_char(F)
    u, v = G.char_mesh()
    expected = np.exp(1j * v * q0 - 1j * u * p0 - (u**2 + v**2) / 4)
    assert np.abs(X.values - expected).max() < 1e-12
    assert X.at_origin() == pytest.approx(1.0)


def test_q_function_spectrum():
    X = to_char(qdf_ground(ANTINORMAL, G))
    u, v = G.char_mesh()
    assert np.abs(X.values - np.exp(-(u**2 + v**2) / 2)).max() < 1e-12
    back = from_char(CharGrid(G, np.exp(-(u**2 + v**2) / 2) + 0j * u))
    i = j = G.n_q // 2
    assert back.values[i, j].real == pytest.approx(1 / (2 * math.pi), abs=1e-12)


def test_round_trip_random():
    rng = np.random.default_rng(0)
    F = PhaseGrid(G, rng.normal(size=G.shape) + 1j * rng.normal(size=G.shape))
    assert np.abs(from_char(to_char(F)).values - F.values).max() < 1e-12
    Z = PhaseGrid(G, np.zeros(G.shape))
    assert not to_char(Z).values.any()


def test_diffusion_identity_and_commuting():
    F = standard_cat(1.5, Geometry.square(128, 10.0))
    assert apply_diffusion(F, 0, 0, 0) is F
    a = apply_diffusion(apply_diffusion(F, 0.1j, 0, 0), 0, -0.2j, 0.05)
    b = apply_diffusion(apply_diffusion(F, 0, -0.2j, 0.05), 0.1j, 0, 0)
    c = apply_diffusion(F, 0.1j, -0.2j, 0.05)
    assert np.abs(a.values - b.values).max() < 1e-12
    assert np.abs(a.values - c.values).max() < 1e-12


def test_unimodular_diffusion_keeps_spectrum_norm():
    F = qdf_ground(STANDARD, G)
    out = apply_diffusion(F, -0.3j, 0.3j, 0.0)
    assert np.linalg.norm(to_char(out).values) == pytest.approx(np.linalg.norm(to_char(F).values), rel=1e-12)


def test_free_q_diffusion_spot_value():
    GW = Geometry.square(256, 12.0)
    F = apply_diffusion(qdf_ground(ANTINORMAL, GW), 1.0, 0.0, -1.0)
    F = apply_affine(F, [-2.0, 0, 0, 0, 0, 0])
    i = GW.n_q // 2
    assert F.values[i, i].real == pytest.approx(1 / (math.pi * math.sqrt(8)), abs=1e-9)


def test_affine_identity_shear_and_rotation():
    F = wigner_coherent(0.5 + 0.5j, G)
    assert apply_affine(F, np.zeros(6)) is F
    t = 0.6
    sheared = apply_affine(F, [-t, 0, 0, 0, 0, 0])
    Q, P = G.mesh()
    expected = np.exp(-((Q - P * t - 1 / math.sqrt(2) * 1) ** 2) - (P - 1 / math.sqrt(2)) ** 2) / math.pi
    assert np.abs(sheared.values - expected).max() < 1e-3
    t = math.pi / 6
    rot = apply_affine(F, [-math.tan(t), math.sin(t) * math.cos(t), math.log(math.cos(t)), 0, 0, 0])
    c, s = math.cos(t), math.sin(t)
    q0 = p0 = 1 / math.sqrt(2)
    expected = np.exp(-((c * Q - s * P - q0) ** 2) - (c * P + s * Q - p0) ** 2) / math.pi
    assert np.abs(rot.values - expected).max() / expected.max() < 1e-3


def test_affine_scale_prefactor_and_shift():
    F = wigner_coherent(0j, G)
    out = apply_affine(F, [0, 0, 0, 0.1, 0.5, -0.25])
    Q, P = G.mesh()
    x, y = np.exp(0.1) * Q + 0.5, np.exp(0.1) * P - 0.25
    expected = np.exp(0.2) * np.exp(-(x**2) - y**2) / math.pi
    # cubic interpolation of a unit Gaussian at spacing 1/8
    assert np.abs(out.values - expected).max() < 1e-5
    assert out.normalization() == pytest.approx(1.0, abs=1e-6)


def test_affine_rejects_complex():
    with pytest.raises(UnsupportedError):
        apply_affine(wigner_coherent(0j, G), [0.1j, 0, 0, 0, 0, 0])


def test_boundary_mass_warning():
    F = PhaseGrid(G, np.ones(G.shape))
    with pytest.warns(BoundaryMassWarning):
        apply_affine(F, [0, 0, 0, 0, 1.0, 0])


def test_propagate_identity():
    F = standard_cat(1.0, G)
    out = propagate(F, WeiNormanState(0.3))
    np.testing.assert_array_equal(out.values, F.values)
    assert out.t == 0.3


def test_superposition_ho():
    GS = Geometry.square(256, 10.0)
    F0 = initial_qdf(StateSpec("superposition01"), STANDARD, GS)
    t = 0.8
    F = propagate(F0, integrate(assemble(HO, STANDARD), t).final)
    Q, P = GS.mesh()
    ref = np.exp(1j * Q * P - (Q**2 + P**2) / 2) / (2 * math.sqrt(2) * math.pi) * (
        1 - 1j * math.sqrt(2) * P * np.exp(-1j * t) + math.sqrt(2) * Q * np.exp(1j * t) - 2j * Q * P
    )
    assert np.abs(F.values - ref).max() < 1e-4


def test_conjugacy_preserved_under_propagation():
    GS = Geometry.square(128, 10.0)
    spec = StateSpec("cat", 1.2 + 0.3j)
    S = initial_qdf(spec, STANDARD, GS)
    A = initial_qdf(spec, ANTISTANDARD, GS)
    S1 = propagate(S, integrate(assemble(HO, STANDARD), 0.6).final)
    A1 = propagate(A, integrate(assemble(HO, ANTISTANDARD), 0.6).final)
    assert np.abs(A1.values - np.conj(S1.values)).max() < 1e-10


def test_piecewise_single_slice_and_free_slicing():
    F0 = wigner_coherent(0.5 + 0.2j, G)
    one = propagate_piecewise(F0, FREE, WIGNER, 0.8, slices=1)
    direct = propagate(F0, integrate(assemble(FREE, WIGNER), 0.8).final)
    np.testing.assert_array_equal(one.values, direct.values)
    four = propagate_piecewise(F0, FREE, WIGNER, 0.8, slices=4)
    assert np.abs(four.values - one.values).max() < 1e-3
    assert four.t == pytest.approx(0.8)
    with pytest.raises(ValueError):
        propagate_piecewise(F0, FREE, WIGNER, 0.8, slices=0)


def test_piecewise_refines_blown_slice():
    F0 = wigner_coherent(1 + 0.5j, G)
    seen = []
    out = propagate_piecewise(F0, HO, WIGNER, math.pi, slices=1, on_slice=lambda t0, tr: seen.append(t0))
    assert len(seen) > 1
    assert np.abs(out.values - wigner_coherent(-(1 + 0.5j), G).values).max() < 2e-3


def test_convert_ordering_examples():
    W = qdf_ground(WIGNER, G)
    Q = convert_ordering(W, WIGNER, ANTINORMAL)
    i = G.n_q // 2
    assert W.values[i, i].real == pytest.approx(1 / math.pi)
    assert Q.values[i, i].real == pytest.approx(1 / (2 * math.pi), abs=1e-12)
    assert Q.ordering == ANTINORMAL
    back = convert_ordering(Q, None, WIGNER)
    # Q spectrum falls below the retained-support floor past u^2 + v^2 = 64;
    # the Wigner content dropped there is about exp(-16) / pi ~ 3.6e-8
    assert np.abs(back.values - W.values).max() < 5e-8
    same = convert_ordering(W, WIGNER, WIGNER)
    np.testing.assert_array_equal(same.values, W.values)


def test_convert_toward_p_fails_loudly():
    Q = qdf_ground(ANTINORMAL, G)
    with pytest.raises(StabilityError) as exc:
        convert_ordering(Q, ANTINORMAL, NORMAL)
    assert exc.value.factor.startswith("ordering:")


def test_negative_diffusion_fails_loudly():
    with pytest.raises(StabilityError) as exc:
        apply_diffusion(qdf_ground(WIGNER, G), -2.0, 0, 0)
    assert exc.value.factor == "w7"


def test_moments():
    W = qdf_ground(WIGNER, G)
    assert moment(W, 0, 0) == pytest.approx(1.0)
    assert moment(W, 2, 0) == pytest.approx(0.5)
    C = wigner_coherent(1.1 - 0.4j, G)
    assert moment(C, 1, 0) == pytest.approx(math.sqrt(2) * 1.1)
    assert moment(C, 0, 1) == pytest.approx(-math.sqrt(2) * 0.4)
    with pytest.raises(ValueError):
        moment(W, 3, 2)


@pytest.mark.parametrize("g", [WIGNER, ANTINORMAL, STANDARD, ANTISTANDARD])
def test_energy_expectation_matches_trace(g):
    rho = FockDensityMatrix.coherent(0.7 - 0.3j, 30)
    H = hamiltonian_matrix(QuadraticModel.from_coherent(CoherentHamiltonian(1.0, A=0.2 + 0.1j)), 30)
    h = QuadraticModel.from_coherent(CoherentHamiltonian(1.0, A=0.2 + 0.1j)).hamiltonian
    k1, k2, k3, k4, k5 = h.at(0.0)
    F = initial_qdf(StateSpec("coherent", 0.7 - 0.3j), g, Geometry.square(128, 10.0))
    val = expectation_quadratic(F, QuadraticSymbol(k1, k2, k3, k4, k5))
    assert val == pytest.approx(rho.expect(H), abs=1e-10)


def test_ground_q_energy():
    F = qdf_ground(ANTINORMAL, G)
    assert expectation_quadratic(F, QuadraticSymbol(0.5, 0.5)) == pytest.approx(0.5, abs=1e-12)
    assert expectation_quadratic(F, QuadraticSymbol(k4=1.0)) == pytest.approx(0.0, abs=1e-14)
