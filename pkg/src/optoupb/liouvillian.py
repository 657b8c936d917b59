"""Hamiltonian and Lindblad superoperator of the driven coupled optomechanical system.

All rates are in units of the optical loss rate kappa. The density matrix is
vectorized by stacking columns, so ``vec(A rho B) = (B^T kron A) vec(rho)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

import numpy as np
import scipy.sparse as sp

from .fock import FockBasis, kron, mode_operators


@dataclass(frozen=True)
class SystemParams:
    """Physical rates of the model, in units of kappa.

    ``delta1``/``delta2`` are the cavity detunings from the pump, ``coupling_j``
    the photon hopping, ``coupling_g`` the single-photon optomechanical
    coupling, ``drive_eps`` the (real) pump amplitude on cavity one,
    ``gamma`` the mechanical damping, ``dephasing`` the pure-dephasing rate
    applied to both optical modes and ``n_th`` the thermal phonon number.
    """

    delta1: float = 0.0
    delta2: float = 0.0
    omega_m: float = 1.0
    coupling_j: float = 0.0
    coupling_g: float = 0.0
    drive_eps: float = 0.0
    kappa1: float = 1.0
    kappa2: float = 1.0
    gamma: float = 0.01
    dephasing: float = 0.0
    n_th: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, complex) or not math.isfinite(float(v)):
                raise ValueError(f"{f.name} must be a finite real number, got {v!r}")
        for name in ("kappa1", "kappa2", "gamma", "dephasing", "n_th"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)!r}")

    @property
    def delta_g(self) -> float:
        """Polaron shift g^2 / omega_m."""
        if self.omega_m <= 0:
            raise ValueError("polaron shift needs omega_m > 0")
        return self.coupling_g ** 2 / self.omega_m

    def replace(self, **changes) -> "SystemParams":
        return replace(self, **changes)


class SuperOperator:
    """Lindblad generator on a truncated basis.

    Stored in factored form: ``L(rho) = G rho + rho G^dag + sum_k c_k O_k rho O_k^dag``
    with ``G = -i H - sum_k (c_k/2) O_k^dag O_k``. The sparse ``D^2 x D^2``
    matrix is assembled on first access of ``matrix``.
    """

    def __init__(self, basis: FockBasis, hamiltonian, jumps, params: SystemParams | None = None):
        self.basis = basis
        self.params = params
        self.hamiltonian = sp.csr_matrix(hamiltonian)
        # (weight c_k, O_k) with the factor 2 of the dissipator folded in
        self.jumps = tuple((float(c), sp.csr_matrix(o)) for c, o in jumps)
        d = basis.dim
        decay = sp.csr_matrix((d, d), dtype=complex)
        for c, o in self.jumps:
            decay = decay + (c / 2) * (o.conj().T @ o)
        self.generator = sp.csr_matrix(-1j * self.hamiltonian - decay)
        self._matrix = None

    @property
    def dim(self) -> int:
        return self.basis.dim

    @property
    def shape(self):
        n = self.basis.dim ** 2
        return (n, n)

    @property
    def matrix(self) -> sp.csr_matrix:
        if self._matrix is None:
            eye = sp.identity(self.dim, dtype=complex, format="csr")
            g = self.generator
            mat = sandwich_superop(g, eye) + sandwich_superop(eye, g.conj().T)
            for c, o in self.jumps:
                mat = mat + c * sandwich_superop(o, o.conj().T)
            mat = sp.csr_matrix(mat)
            mat.sum_duplicates()
            mat.eliminate_zeros()
            self._matrix = mat
        return self._matrix

    def apply(self, rho) -> np.ndarray:
        """``L(rho)`` for a dense ``D x D`` matrix, without forming ``matrix``."""
        rho = np.asarray(rho)
        out = self.generator @ rho
        out += (self.generator.conj() @ rho.T).T
        for c, o in self.jumps:
            out += c * (o @ (o.conj() @ rho.T).T)
        return out

    def apply_adjoint(self, x) -> np.ndarray:
        """Adjoint map ``G^dag X + X G + sum_k c_k O_k^dag X O_k``."""
        x = np.asarray(x)
        gh = self.generator.conj().T
        out = gh @ x + (gh.conj() @ x.T).T
        for c, o in self.jumps:
            out += c * (o.conj().T @ (o.T @ x.T).T)
        return out

    def diagonal_at(self, i: int) -> complex:
        """Entry of ``matrix`` coupling ``rho_ii`` to itself."""
        g_ii = self.generator[i, i]
        val = g_ii + np.conj(g_ii)
        for c, o in self.jumps:
            val += c * abs(o[i, i]) ** 2
        return complex(val)


def thermal_occupation(k_b_t: float, omega_m: float) -> float:
    """Bose-Einstein occupation ``1/(exp(omega_m/k_B T) - 1)``."""
    if omega_m <= 0:
        raise ValueError(f"omega_m must be > 0, got {omega_m!r}")
    if k_b_t < 0:
        raise ValueError(f"k_B T must be >= 0, got {k_b_t!r}")
    if k_b_t == 0:
        return 0.0
    x = omega_m / k_b_t
    if x > 700.0:
        return 0.0
    return 1.0 / math.expm1(x)


def delta_opt(j: float, kappa: float, branch: int = -1) -> float:
    """Optimal (polaron-shifted) detuning for unconventional blockade.

    Evaluates ``branch * (1/2) sqrt(sqrt(9 J^4 + 8 kappa^2 J^2) - kappa^2 - 3 J^2)``.
    The expression is often printed with ``9 J^2`` in place of ``9 J^4``; that
    form is not dimensionally consistent and turns complex at large J/kappa,
    while this one tends to ``-kappa/(2 sqrt 3)`` for ``J >> kappa`` and to 0
    for ``kappa -> 0``. A real optimum exists only for ``J >= kappa/sqrt(2)``.
    """
    if branch not in (-1, 1):
        raise ValueError("branch must be -1 or +1")
    if j <= 0 or kappa < 0:
        raise ValueError(f"need j > 0 and kappa >= 0, got j={j!r}, kappa={kappa!r}")
    j2, k2 = j * j, kappa * kappa
    root = math.sqrt(9 * j2 * j2 + 8 * k2 * j2)
    # root - 3 J^2 rewritten to avoid cancellation at large J
    inner = 8 * k2 * j2 / (root + 3 * j2) - k2
    if inner < 0:
        if inner > -1e-14 * max(k2, j2):
            inner = 0.0
        else:
            raise ValueError(
                f"no real optimal detuning for J={j!r} < kappa/sqrt(2) with kappa={kappa!r}")
    return branch * 0.5 * math.sqrt(inner)


def with_optimal_detuning(params: SystemParams, kappa: float | None = None,
                          branch: int = -1) -> SystemParams:
    """Set ``delta1 = Delta_opt`` and ``delta2 = Delta_opt + g^2/omega_m``."""
    k = params.kappa1 if kappa is None else kappa
    d = delta_opt(params.coupling_j, k, branch)
    return params.replace(delta1=d, delta2=d + params.delta_g)


def build_hamiltonian(params: SystemParams, basis: FockBasis, ops=None) -> sp.csr_matrix:
    a1, a2, b2 = mode_operators(basis) if ops is None else ops
    a1d, a2d, b2d = a1.conj().T, a2.conj().T, b2.conj().T
    n2 = a2d @ a2
    h = (params.delta1 * (a1d @ a1) + params.delta2 * n2
         + params.omega_m * (b2d @ b2)
         - params.coupling_j * (a1d @ a2 + a2d @ a1)
         + params.coupling_g * (n2 @ (b2d + b2))
         + params.drive_eps * (a1d + a1))
    h = sp.csr_matrix(h)
    h.sum_duplicates()
    h.eliminate_zeros()
    return h


def vectorize(rho) -> np.ndarray:
    """Column-stacking of a square matrix."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {rho.shape}")
    return rho.reshape(-1, order="F")


def devectorize(v, dim: int | None = None) -> np.ndarray:
    v = np.asarray(v).ravel()
    d = math.isqrt(v.size)
    if d * d != v.size:
        raise ValueError(f"vector length {v.size} is not a perfect square")
    if dim is not None and dim != d:
        raise ValueError(f"vector length {v.size} does not match dimension {dim}")
    return v.reshape(d, d, order="F")


def sandwich_superop(a, b) -> sp.csr_matrix:
    """Superoperator of ``rho -> a rho b``, i.e. ``b^T kron a``."""
    a, b = sp.csr_matrix(a), sp.csr_matrix(b)
    if a.shape[0] != a.shape[1] or a.shape != b.shape:
        raise ValueError(f"need two square matrices of equal size, got {a.shape} and {b.shape}")
    return kron(b.T, a)


def commutator_superop(h) -> sp.csr_matrix:
    """Superoperator of ``rho -> h rho - rho h``."""
    h = sp.csr_matrix(h)
    eye = sp.identity(h.shape[0], dtype=complex, format="csr")
    return sandwich_superop(h, eye) - sandwich_superop(eye, h)


def dissipator_superop(op) -> sp.csr_matrix:
    """Superoperator of ``D[O] rho = 2 O rho O^dag - O^dag O rho - rho O^dag O``."""
    op = sp.csr_matrix(op)
    opd = op.conj().T.tocsr()
    eye = sp.identity(op.shape[0], dtype=complex, format="csr")
    n = opd @ op
    return 2 * sandwich_superop(op, opd) - sandwich_superop(n, eye) - sandwich_superop(eye, n)


def build_liouvillian(params: SystemParams, basis: FockBasis) -> SuperOperator:
    ops = mode_operators(basis)
    a1, a2, b2 = ops
    h = build_hamiltonian(params, basis, ops)
    n1 = a1.conj().T @ a1
    n2 = a2.conj().T @ a2
    # (r/2) D[O] puts weight r on O rho O^dag
    channels = [
        (params.kappa1, a1),
        (params.kappa2, a2),
        (params.gamma * (params.n_th + 1), b2),
        (params.gamma * params.n_th, b2.conj().T),
        (params.dephasing, n1),
        (params.dephasing, n2),
    ]
    jumps = [(w, o) for w, o in channels if w != 0]
    return SuperOperator(basis, h, jumps, params)
