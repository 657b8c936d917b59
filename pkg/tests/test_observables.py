import math

import numpy as np
import pytest

from optoupb.errors import UndefinedCorrelationError
from optoupb.fock import build_basis, mode_operators, zero_phonon_projector
from optoupb.liouvillian import SystemParams, with_optimal_detuning
from optoupb.observables import (compute_observables, expectation, g2_zero, g2_zero_phonon,
                                 observable_value, occupations)
from optoupb.steady import SolveOptions, steady_state


class State:
    """Bare density matrix with a basis, standing in for a solved steady state."""

    def __init__(self, rho, basis):
        self.rho = rho
        self.basis = basis


def diagonal_state(basis, weight):
    rho = np.diag([weight(*s) for s in basis.states]).astype(complex)
    return State(rho / np.trace(rho), basis)


def test_expectation_basics():
    b = build_basis(3, 1)
    vac = diagonal_state(b, lambda n1, n2, nm: float(n1 == n2 == nm == 0))
    a1 = mode_operators(b)[0]
    assert expectation(vac, np.eye(b.dim)) == pytest.approx(1)
    assert expectation(vac, a1.conj().T @ a1) == 0
    with pytest.raises(ValueError):
        expectation(vac, np.eye(3))


def test_hermitian_expectation_is_real_on_random_state():
    b = build_basis(3, 2)
    rng = np.random.default_rng(4)
    x = rng.normal(size=(b.dim, b.dim)) + 1j * rng.normal(size=(b.dim, b.dim))
    st = State(x @ x.conj().T / np.trace(x @ x.conj().T), b)
    a1, a2, b2 = mode_operators(b)
    op = a1.conj().T @ a2 + a2.conj().T @ a1 + b2 + b2.conj().T
    val = expectation(st, op)
    assert abs(val.imag) <= 1e-10
    assert val.real == pytest.approx(np.trace(st.rho @ op.toarray()).real)


def test_single_photon_is_antibunched():
    b = build_basis(3, 1)
    st = diagonal_state(b, lambda n1, n2, nm: float((n1, n2, nm) == (1, 0, 0)))
    assert g2_zero(st) == 0


@pytest.mark.parametrize("nbar", [0.05, 0.3, 1.0])
def test_thermal_mode_gives_two(nbar):
    b = build_basis(90, 0)
    st = diagonal_state(b, lambda n1, n2, nm: (nbar / (1 + nbar)) ** n1 * (n2 == 0))
    assert g2_zero(st) == pytest.approx(2.0, abs=1e-6)


def test_coherent_product_state_gives_one():
    b = build_basis(30, 0)
    alpha, beta = 0.7 + 0.2j, -0.4j

    def amp(n, z):
        return z ** n / math.sqrt(math.factorial(n)) * math.exp(-abs(z) ** 2 / 2)

    psi = np.array([amp(n1, alpha) * amp(n2, beta) for n1, n2, _ in b.states])
    st = State(np.outer(psi, psi.conj()) / np.vdot(psi, psi).real, b)
    assert g2_zero(st, "a1") == pytest.approx(1.0, abs=1e-6)
    assert g2_zero(st, "a2") == pytest.approx(1.0, abs=1e-6)


def test_population_sum_oracle():
    p = with_optimal_detuning(SystemParams(omega_m=24, coupling_j=2.6, coupling_g=1.16,
                                           drive_eps=0.5))
    st = steady_state(p, 6, 2)
    pops = np.real(np.diag(st.rho))
    n1 = np.array([s[0] for s in st.basis.states])
    expected = (pops @ (n1 * (n1 - 1))) / (pops @ n1) ** 2
    assert g2_zero(st) == pytest.approx(expected, rel=1e-10)
    assert occupations(st)[0] == pytest.approx(pops @ n1)


def test_zero_phonon_projector_ordering_is_benign():
    p = with_optimal_detuning(SystemParams(omega_m=24, coupling_j=2.6, coupling_g=1.16,
                                           drive_eps=0.3))
    st = steady_state(p, 4, 2)
    a1 = mode_operators(st.basis)[0].toarray()
    p0 = zero_phonon_projector(st.basis).toarray()
    ad = a1.conj().T
    assert np.allclose(p0 @ ad @ a1, ad @ a1 @ p0)
    num = np.trace(st.rho @ ad @ ad @ a1 @ a1 @ p0).real
    den = np.trace(st.rho @ ad @ a1 @ p0).real
    assert g2_zero_phonon(st) == pytest.approx(num / den ** 2, rel=1e-10)


def test_zero_phonon_matches_plain_without_phonons():
    p = SystemParams(coupling_j=2.0, delta1=-0.3, delta2=-0.2, drive_eps=0.3)
    st = steady_state(p, 5, 0)
    assert g2_zero_phonon(st) == pytest.approx(g2_zero(st), rel=1e-12)


def test_vacuum_correlations_are_undefined():
    st = steady_state(SystemParams(), 2, 1, SolveOptions(backend="direct"))
    with pytest.raises(UndefinedCorrelationError):
        g2_zero(st)
    with pytest.raises(ZeroDivisionError):
        g2_zero_phonon(st)


def test_observable_set_is_consistent():
    p = with_optimal_detuning(SystemParams(omega_m=11, coupling_j=1.9, coupling_g=1.0,
                                           drive_eps=0.2))
    st = steady_state(p, 4, 2)
    obs = compute_observables(st)
    for name, value in obs.as_dict().items():
        assert value == observable_value(st, name)
        assert value >= -1e-10
    with pytest.raises(ValueError):
        observable_value(st, "g3")
