import math

import numpy as np
import pytest
from scipy.optimize import fsolve

from optoupb.fock import build_basis
from optoupb.liouvillian import (SystemParams, build_hamiltonian, build_liouvillian,
                                 commutator_superop, delta_opt, devectorize,
                                 dissipator_superop, sandwich_superop, thermal_occupation,
                                 vectorize, with_optimal_detuning)


def dense_mode_ops(nph, nm):
    """Mode operators from numpy alone: Kronecker products, then delete over-cutoff rows."""
    a = np.diag(np.sqrt(np.arange(1, nph + 1)), 1).astype(complex)
    b = np.diag(np.sqrt(np.arange(1, nm + 1)), 1).astype(complex)
    ip, im = np.eye(nph + 1), np.eye(nm + 1)
    ops = [np.kron(np.kron(a, ip), im), np.kron(np.kron(ip, a), im), np.kron(np.kron(ip, ip), b)]
    ntot = np.diag(ops[0].conj().T @ ops[0] + ops[1].conj().T @ ops[1]).real
    keep = np.flatnonzero(ntot <= nph + 1e-9)
    return [op[np.ix_(keep, keep)] for op in ops]


def lindblad_rhs(p, rho, ops):
    a1, a2, b2 = ops
    dag = lambda x: x.conj().T  # noqa: E731

    def diss(o):
        return 2 * o @ rho @ dag(o) - dag(o) @ o @ rho - rho @ dag(o) @ o

    n1, n2 = dag(a1) @ a1, dag(a2) @ a2
    h = (p.delta1 * n1 + p.delta2 * n2 + p.omega_m * dag(b2) @ b2
         - p.coupling_j * (dag(a1) @ a2 + dag(a2) @ a1)
         + p.coupling_g * n2 @ (dag(b2) + b2) + p.drive_eps * (dag(a1) + a1))
    out = -1j * (h @ rho - rho @ h)
    out += p.kappa1 / 2 * diss(a1) + p.kappa2 / 2 * diss(a2)
    out += p.gamma / 2 * ((p.n_th + 1) * diss(b2) + p.n_th * diss(dag(b2)))
    out += p.dephasing / 2 * (diss(n1) + diss(n2))
    return out


def random_params(rng):
    return SystemParams(delta1=rng.normal(), delta2=rng.normal(), omega_m=rng.uniform(1, 30),
                        coupling_j=rng.uniform(0, 5), coupling_g=rng.uniform(0, 2),
                        drive_eps=rng.uniform(0, 1), kappa1=rng.uniform(0.5, 2),
                        kappa2=rng.uniform(0.5, 2), gamma=rng.uniform(0, 0.1),
                        dephasing=rng.uniform(0, 0.1), n_th=rng.uniform(0, 3))


@pytest.mark.parametrize("seed", range(5))
def test_superoperator_matches_bruteforce_on_every_matrix_unit(seed):
    rng = np.random.default_rng(seed)
    p = random_params(rng)
    basis = build_basis(2, 1)
    ops = dense_mode_ops(2, 1)
    mat = build_liouvillian(p, basis).matrix.toarray()
    d = basis.dim
    worst = 0.0
    for i in range(d):
        for j in range(d):
            unit = np.zeros((d, d), complex)
            unit[i, j] = 1
            got = devectorize(mat @ vectorize(unit))
            worst = max(worst, np.max(np.abs(got - lindblad_rhs(p, unit, ops))))
    assert worst <= 1e-12


def test_matrix_free_apply_and_adjoint_match_matrix():
    rng = np.random.default_rng(7)
    p = random_params(rng)
    lv = build_liouvillian(p, build_basis(3, 2))
    d = lv.dim
    x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    mat = lv.matrix
    assert np.allclose(vectorize(lv.apply(x)), mat @ vectorize(x), atol=1e-12)
    assert np.allclose(vectorize(lv.apply_adjoint(x)), mat.conj().T @ vectorize(x), atol=1e-12)


@pytest.mark.parametrize("seed", range(3))
def test_trace_preservation(seed):
    p = random_params(np.random.default_rng(100 + seed))
    basis = build_basis(3, 2)
    mat = build_liouvillian(p, basis).matrix
    left = vectorize(np.eye(basis.dim)) @ mat
    assert np.max(np.abs(left)) <= 1e-12


def test_hermiticity_preserved():
    rng = np.random.default_rng(3)
    lv = build_liouvillian(random_params(rng), build_basis(3, 1))
    d = lv.dim
    x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = x @ x.conj().T
    out = lv.apply(rho)
    assert np.max(np.abs(out - out.conj().T)) <= 1e-12


def test_vec_identity_and_component_superoperators():
    rng = np.random.default_rng(11)
    a, b, r = (rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)) for _ in range(3))
    assert np.allclose(sandwich_superop(a, b) @ vectorize(r), vectorize(a @ r @ b))
    assert np.allclose(commutator_superop(a) @ vectorize(r), vectorize(a @ r - r @ a))
    diss = 2 * a @ r @ a.conj().T - a.conj().T @ a @ r - r @ a.conj().T @ a
    assert np.allclose(dissipator_superop(a) @ vectorize(r), vectorize(diss))
    with pytest.raises(ValueError):
        sandwich_superop(a, np.eye(3))


def test_vectorize_roundtrip_and_errors():
    m = np.arange(9.0).reshape(3, 3)
    v = vectorize(m)
    assert np.array_equal(v, [0, 3, 6, 1, 4, 7, 2, 5, 8])
    assert np.array_equal(devectorize(v), m)
    with pytest.raises(ValueError):
        devectorize(np.zeros(8))
    with pytest.raises(ValueError):
        vectorize(np.zeros((2, 3)))


def test_hamiltonian_is_hermitian():
    p = random_params(np.random.default_rng(5))
    h = build_hamiltonian(p, build_basis(4, 3)).toarray()
    assert np.allclose(h, h.conj().T)


@pytest.mark.parametrize("k_b_t,omega_m,expected", [(1.0, 1.0, 0.58198), (10.0, 1.0, 9.508)])
def test_thermal_occupation_values(k_b_t, omega_m, expected):
    assert thermal_occupation(k_b_t, omega_m) == pytest.approx(expected, abs=1e-3)


def test_thermal_occupation_limits():
    assert thermal_occupation(0.0, 24.0) == 0.0
    assert 0.0 <= thermal_occupation(0.1, 24.0) < 1e-100
    assert thermal_occupation(1e-3, 24.0) == 0.0
    with pytest.raises(ValueError):
        thermal_occupation(1.0, 0.0)
    with pytest.raises(ValueError):
        thermal_occupation(-1.0, 1.0)


def test_delta_opt_large_coupling_limit():
    assert delta_opt(100.0, 1.0) == pytest.approx(-1 / (2 * math.sqrt(3)), rel=1e-3)
    assert delta_opt(100.0, 1.0, branch=1) == -delta_opt(100.0, 1.0)


def _kerr_c20(delta, u, j, kappa=1.0):
    """Two-photon amplitude of the coupled Kerr model in the weak-drive limit."""
    d, s = delta - 0.5j * kappa, math.sqrt(2)
    m = np.array([[d, -j, 0, 0, 0],
                  [-j, d, 0, 0, 0],
                  [s, 0, 2 * d, -s * j, 0],
                  [0, 1, -s * j, 2 * d, -s * j],
                  [0, 0, 0, -s * j, 2 * d + 2 * u]], complex)
    return np.linalg.solve(m, [-1, 0, 0, 0, 0])[2]


@pytest.mark.parametrize("j", [1.0, 3.6, 10.0])
def test_delta_opt_zeroes_the_kerr_two_photon_amplitude(j):
    def f(x):
        c = _kerr_c20(x[0], x[1], j)
        return [c.real, c.imag]

    delta, _ = fsolve(f, [-0.3, -0.03], xtol=1e-13)
    assert abs(_kerr_c20(delta, _, j)) < 1e-10
    assert delta == pytest.approx(delta_opt(j, 1.0), rel=1e-8)


def test_delta_opt_rejects_weak_coupling():
    with pytest.raises(ValueError):
        delta_opt(0.5, 1.0)
    with pytest.raises(ValueError):
        delta_opt(1.0, 1.0, branch=2)


def test_optimal_detuning_wiring():
    p = with_optimal_detuning(SystemParams(omega_m=24.0, coupling_j=2.6, coupling_g=1.16))
    assert p.delta1 == delta_opt(2.6, 1.0)
    assert p.delta2 - p.coupling_g ** 2 / p.omega_m == pytest.approx(p.delta1, abs=1e-15)


def test_params_validation():
    with pytest.raises(ValueError):
        SystemParams(kappa1=-1)
    with pytest.raises(ValueError):
        SystemParams(omega_m=float("nan"))
    with pytest.raises(ValueError):
        SystemParams(omega_m=0.0).delta_g
