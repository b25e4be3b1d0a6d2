import math

import numpy as np
import pytest

from qprop.eom import assemble
from qprop.exceptions import CutoffLeakageError
from qprop.model import CoherentHamiltonian, DampingSpec, QPHamiltonian, QuadraticModel, tdep_squeezing_model
from qprop.oracle import (
    ANALYTIC_CASES,
    FockDensityMatrix,
    analytic_solution,
    coherent_ket,
    evolve_rho,
    hamiltonian_matrix,
    hermite_functions,
    ladder,
    rho_to_qdf,
)
from qprop.ordering import ANTINORMAL, NORMAL, STANDARD, WIGNER, OrderingParams
from qprop.phasegrid import Geometry, propagate
from qprop.states import StateSpec, initial_qdf, qdf_ground
from qprop.weinorman import IntegratorConfig, integrate

HO = QuadraticModel.from_coherent(CoherentHamiltonian(1.0))
G = Geometry.square(64, 8.0)


def test_coherent_ket_is_eigenvector():
    psi = coherent_ket(0.8 - 0.5j, 50)
    a = ladder(50)
    assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-12)
    assert np.abs((a @ psi)[:40] - (0.8 - 0.5j) * psi[:40]).max() < 1e-12


def test_hermite_functions_orthonormal():
    x = np.linspace(-15, 15, 3001)
    h = hermite_functions(12, x)
    gram = h @ h.T * (x[1] - x[0])
    np.testing.assert_allclose(gram, np.eye(12), atol=1e-10)


def test_density_matrix_validation():
    FockDensityMatrix.cat(1.2 + 0.1j, 40).validate()
    FockDensityMatrix.superposition01(10).validate()
    with pytest.raises(ValueError):
        FockDensityMatrix(np.ones((2, 3)))
    with pytest.raises(ValueError):
        FockDensityMatrix(np.diag([0.5, 0.4])).validate()
    with pytest.raises(ValueError):
        FockDensityMatrix(np.diag([1.5, -0.5])).validate()


def test_coherent_rotation_overlap():
    alpha, T = 1.0 + 0.5j, 1.3
    rho = evolve_rho(FockDensityMatrix.coherent(alpha, 40), HO, T)
    target = coherent_ket(alpha * np.exp(-1j * T), 40)
    overlap = np.real(target.conj() @ rho.entries @ target)
    assert abs(overlap - 1.0) <= 1e-6


def test_zero_time_returns_initial():
    rho0 = FockDensityMatrix.coherent(0.5, 20)
    np.testing.assert_array_equal(evolve_rho(rho0, HO, 0.0).entries, rho0.entries)
    with pytest.raises(ValueError):
        evolve_rho(rho0, HO, -1.0)


def test_damped_number_decay_and_invariants():
    gamma, N, T = 0.3, 0.4, 1.0
    model = QuadraticModel.from_coherent(CoherentHamiltonian(1.0), DampingSpec(gamma, N))
    rho0 = FockDensityMatrix.coherent(1.2, 40)
    rho = evolve_rho(rho0, model, T)
    n_op = np.diag(np.arange(40.0))
    n0 = rho0.expect(n_op).real
    expected = n0 * math.exp(-gamma * T) + N * (1 - math.exp(-gamma * T))
    assert rho.expect(n_op).real == pytest.approx(expected, abs=1e-8)
    assert abs(rho.trace() - 1) < 1e-9
    assert np.abs(rho.entries - rho.entries.conj().T).max() < 1e-9
    assert rho.purity() < 1.0 - 1e-3


def test_undamped_purity_preserved():
    model = QuadraticModel.from_coherent(CoherentHamiltonian(0.7, 0.2j, 0.1))
    rho = evolve_rho(FockDensityMatrix.cat(1.0, 40), model, 0.8)
    assert rho.purity() == pytest.approx(1.0, abs=1e-9)


def test_cutoff_leakage():
    with pytest.raises(CutoffLeakageError):
        evolve_rho(FockDensityMatrix.coherent(4.0, 20), HO, 0.1)
    # a strong drive pushes population to the top during the run
    drive = QuadraticModel.from_coherent(CoherentHamiltonian(0.0, V=3.0))
    with pytest.raises(CutoffLeakageError):
        evolve_rho(FockDensityMatrix.ground(20), drive, 1.0)


def test_hamiltonian_matrix_time_dependent():
    m = tdep_squeezing_model(0.3, 0.1)
    H0, H1 = hamiltonian_matrix(m, 10, 0.0), hamiltonian_matrix(m, 10, 1.0)
    assert np.abs(H0 - H0.conj().T).max() < 1e-14
    assert np.abs(H0 - H1).max() > 1e-3


@pytest.mark.parametrize("g", [WIGNER, ANTINORMAL, STANDARD, OrderingParams(0.1, 0.05, -0.1)])
def test_rho_to_qdf_ground(g):
    F = rho_to_qdf(FockDensityMatrix.ground(12), g, G)
    assert np.abs(F.values - qdf_ground(g, G).values).max() < 1e-8


def test_rho_to_qdf_cat_matches_closed_form():
    GS = Geometry.square(64, 10.0)
    F = rho_to_qdf(FockDensityMatrix.cat(1.1 + 0.2j, 30), STANDARD, GS)
    ref = initial_qdf(StateSpec("cat", 1.1 + 0.2j), STANDARD, GS)
    assert np.abs(F.values - ref.values).max() < 1e-8


def test_rho_to_qdf_normal_ordering_raises():
    with pytest.raises(ValueError, match="does not decay"):
        rho_to_qdf(FockDensityMatrix.ground(12), NORMAL, G)


def test_unknown_case():
    with pytest.raises(ValueError, match="unknown analytic case"):
        analytic_solution("nope", {}, G, 1.0)


@pytest.mark.parametrize("case", sorted(ANALYTIC_CASES))
def test_analytic_cases_normalized(case):
    prm = {"alpha": 0.4 + 0.2j, "delta": 0.1}
    GS = Geometry.square(128, 12.0)
    F = analytic_solution(case, prm, GS, 0.9)
    assert F.normalization() == pytest.approx(1.0, abs=1e-8)
    assert F.t == 0.9


def test_ho_nan_map_against_pipeline():
    GS = Geometry.square(128, 8.0)
    alpha, t = 0.7 - 0.3j, 1.1
    ref = analytic_solution("ho-NAN-map", {"alpha": alpha, "ordering": "antinormal"}, GS, t)
    F0 = initial_qdf(StateSpec("coherent", alpha), ANTINORMAL, GS)
    F = propagate(F0, integrate(assemble(HO, ANTINORMAL), t, IntegratorConfig(dt=1e-4)).final)
    assert np.abs(F.values - ref.values).max() / ref.values.real.max() < 1e-5
    with pytest.raises(ValueError):
        analytic_solution("ho-NAN-map", {"ordering": "normal"}, GS, t)
    with pytest.raises(ValueError):
        analytic_solution("ho-NAN-map", {"ordering": STANDARD}, GS, t)


def test_ho_standard_01_at_zero_is_initial():
    GS = Geometry.square(128, 10.0)
    ref = analytic_solution("ho-standard-01", {}, GS, 0.0)
    F0 = initial_qdf(StateSpec("superposition01"), STANDARD, GS)
    assert np.abs(ref.values - F0.values).max() < 1e-14


def test_free_wigner_against_fock():
    GS = Geometry.square(64, 8.0)
    free = QuadraticModel(QPHamiltonian(k2=0.5))
    rho = evolve_rho(FockDensityMatrix.coherent(0.3, 40), free, 0.5)
    F = rho_to_qdf(rho, WIGNER, GS)
    ref = analytic_solution("free-wigner", {"alpha": 0.3}, GS, 0.5)
    assert np.abs(F.values - ref.values).max() < 1e-6
