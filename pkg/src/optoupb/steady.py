"""Steady state of a Liouvillian with the trace condition substituted for one equation.

``L vec(rho) = 0`` has a one-dimensional null space. Replacing one row by
``sum_i rho_ii = 1`` gives a regular inhomogeneous system. The left null
vector of ``L`` is ``vec(I)`` (trace preservation), which is non-zero exactly
on the diagonal entries ``rho_ii``; replacing one of those rows therefore
always yields a nonsingular system, while an off-diagonal row would not.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator, gcrotmk, lsqr, splu

from .errors import NonConvergenceError, ResourceLimitError
from .fock import FockBasis, build_basis, embed
from .liouvillian import SuperOperator, SystemParams, build_liouvillian

log = logging.getLogger(__name__)

BACKENDS = ("auto", "direct", "iterative")
ITERATIVE_METHODS = ("lsqr", "gcrot")
TRACE_ROW_STRATEGIES = ("first-diagonal", "max-diagonal-coupling")
ACCEPT_RESIDUAL = 1e-8
REFINE_TOLERANCE = 1e-4


@dataclass(frozen=True)
class SolveOptions:
    """Solver configuration.

    ``backend="auto"`` uses the sparse LU factorization for bases with at most
    ``direct_max_dim`` states and the preconditioned iterative solver above.
    ``iterative_method`` selects LSQR (least squares) or GCROT(m,k); both
    are right-preconditioned with the inverse of the jump-free part of ``L``.
    GCROT follows up with ``refine_steps`` rounds of iterative refinement.
    """

    backend: str = "auto"
    iter_tolerance: float = 1e-10
    max_iterations: Optional[int] = None
    trace_row_strategy: str = "first-diagonal"
    iterative_method: str = "gcrot"
    direct_max_dim: int = 60
    preconditioner_shift: float = 1e-3
    accept_residual: float = ACCEPT_RESIDUAL
    refine_steps: int = 2

    def __post_init__(self):
        if self.backend not in BACKENDS:
            raise ValueError(f"backend must be one of {BACKENDS}, got {self.backend!r}")
        if self.iterative_method not in ITERATIVE_METHODS:
            raise ValueError(f"iterative_method must be one of {ITERATIVE_METHODS}")
        if self.trace_row_strategy not in TRACE_ROW_STRATEGIES:
            raise ValueError(f"trace_row_strategy must be one of {TRACE_ROW_STRATEGIES}")
        if not self.iter_tolerance > 0:
            raise ValueError("iter_tolerance must be > 0")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        if self.refine_steps < 0:
            raise ValueError("refine_steps must be >= 0")

    def replace(self, **changes) -> "SolveOptions":
        from dataclasses import replace
        return replace(self, **changes)


@dataclass(frozen=True)
class SteadyState:
    rho: np.ndarray
    basis: FockBasis
    residual: float
    solver: str
    trace_row: int
    iterations: int = 0
    min_eigenvalue: float = float("nan")
    hermiticity_defect: float = 0.0
    trace_defect: float = 0.0
    solve_time: float = 0.0
    params: Optional[SystemParams] = field(default=None, compare=False)

    @property
    def n_ph_max(self) -> int:
        return self.basis.n_ph_max

    @property
    def n_m_max(self) -> int:
        return self.basis.n_m_max


def choose_trace_row(lv: SuperOperator, strategy: str = "first-diagonal") -> int:
    """Vectorized index of the equation replaced by the trace condition."""
    d = lv.dim
    if strategy == "first-diagonal":
        return 0
    if strategy == "max-diagonal-coupling":
        coupling = [abs(lv.diagonal_at(i)) for i in range(d)]
        return int(np.argmax(coupling)) * (d + 1)
    raise ValueError(f"unknown trace-row strategy {strategy!r}")


class JumpFreePreconditioner:
    """Inverse of ``X -> G X + X G^dag - shift X`` by diagonalizing ``G``.

    ``G = -iH - (1/2) sum c_k O_k^dag O_k`` is the non-Hermitian generator of
    ``lv``. Applying the inverse costs four dense ``D x D`` products.
    """

    def __init__(self, lv: SuperOperator, shift: float = 1e-3):
        g = lv.generator.toarray()
        mu, v = la.eig(g)
        vinv = la.inv(v)
        self.cond = float(np.linalg.cond(v))
        if self.cond > 1e10:
            raise np.linalg.LinAlgError(
                f"generator eigenbasis is ill-conditioned (cond={self.cond:.2e})")
        self.v, self.vinv = v, vinv
        self.vh, self.vinvh = v.conj().T, vinv.conj().T
        self.den = mu[:, None] + mu.conj()[None, :] - shift

    def solve(self, y):
        return self.v @ ((self.vinv @ y @ self.vinvh) / self.den) @ self.vh

    def solve_adjoint(self, w):
        return self.vinvh @ ((self.vh @ w @ self.v) / self.den.conj()) @ self.vinv


def _replaced_rhs(n, k):
    rhs = np.zeros(n, dtype=complex)
    rhs[k] = 1.0
    return rhs


def _solve_direct(lv: SuperOperator, k: int):
    d = lv.dim
    mat = lv.matrix.tocsr()
    trace_row = sp.csr_matrix(
        (np.ones(d), (np.zeros(d, dtype=int), np.arange(d) * (d + 1))), shape=(1, d * d))
    a = sp.vstack([mat[:k], trace_row, mat[k + 1:]], format="csc")
    lu = splu(a, permc_spec="COLAMD")
    rhs = _replaced_rhs(d * d, k)
    x = lu.solve(rhs)
    x += lu.solve(rhs - a @ x)  # one refinement step reuses the factors
    return x.reshape(d, d, order="F"), 0


def _solve_iterative(lv: SuperOperator, k: int, opts: SolveOptions, x0=None):
    d = lv.dim
    n = d * d
    prec = JumpFreePreconditioner(lv, opts.preconditioner_shift)
    maxiter = opts.max_iterations or 10 * n
    count = [0]

    def forward(y):
        count[0] += 1
        x = prec.solve(y.reshape(d, d, order="F"))
        out = lv.apply(x).reshape(-1, order="F")
        out[k] = np.trace(x)
        return out

    def adjoint(z):
        zk = z[k]
        w = z.copy()
        w[k] = 0.0
        w = lv.apply_adjoint(w.reshape(d, d, order="F"))
        w[np.diag_indices(d)] += zk
        return prec.solve_adjoint(w).reshape(-1, order="F")

    op = LinearOperator((n, n), matvec=forward, rmatvec=adjoint, dtype=complex)
    rhs = _replaced_rhs(n, k)
    y0 = None
    if x0 is not None:
        # initial guess for rho mapped into the preconditioned variable
        y0 = _to_preconditioned(prec, np.asarray(x0, dtype=complex)).reshape(-1, order="F")

    if opts.iterative_method == "lsqr":
        res = lsqr(op, rhs, atol=opts.iter_tolerance, btol=opts.iter_tolerance,
                   conlim=1e14, iter_lim=maxiter, x0=y0)
        y, istop, iters = res[0], res[1], res[2]
        converged = istop in (1, 2, 4, 5)
        label = "iterative-least-squares"
    else:
        # one outer GCROT step runs m inner Arnoldi steps
        m = 20
        y, info = gcrotmk(op, rhs, x0=y0, rtol=opts.iter_tolerance, atol=0.0,
                          m=m, k=20, maxiter=max(1, maxiter // m))
        converged = info == 0
        label = "iterative-gcrot"
        if converged and opts.refine_steps:
            # small populations (g2 at weak drive) need the error of each entry
            # to shrink with the entry, not with ||rho||; refinement gets there
            for _ in range(opts.refine_steps):
                r = rhs - forward(y)
                count[0] -= 1
                dy, info = gcrotmk(op, r, rtol=REFINE_TOLERANCE, atol=0.0, m=m, k=20,
                                   maxiter=max(1, maxiter // m))
                if info != 0:
                    break
                y = y + dy
        iters = count[0]
    x = prec.solve(y.reshape(d, d, order="F"))
    return x, iters, converged, label


def _to_preconditioned(prec: JumpFreePreconditioner, x):
    """Inverse of ``prec.solve``: ``G X + X G^dag - shift X`` for ``X = x``."""
    z = prec.vinv @ x @ prec.vinvh
    return prec.v @ (z * prec.den) @ prec.vh


def residual_norm(lv: SuperOperator, rho) -> float:
    """``||L vec(rho)||_2 / ||vec(rho)||_2`` against the unmodified generator."""
    return float(np.linalg.norm(lv.apply(rho)) / np.linalg.norm(rho))


def solve_steady_state(lv: SuperOperator, opts: SolveOptions | None = None,
                       x0=None) -> SteadyState:
    """Stationary density matrix with unit trace.

    The result is symmetrized, trace-renormalized and checked against the
    original (unreplaced) Liouvillian. An iterative run that misses its
    tolerance raises ``NonConvergenceError`` with the best residual reached.
    """
    opts = opts or SolveOptions()
    t0 = time.perf_counter()
    d = lv.dim
    k = choose_trace_row(lv, opts.trace_row_strategy)
    backend = opts.backend
    if backend == "auto":
        backend = "direct" if d <= opts.direct_max_dim else "iterative"

    if backend == "direct":
        rho, iters = _solve_direct(lv, k)
        converged, label = True, "direct"
    else:
        rho, iters, converged, label = _solve_iterative(lv, k, opts, x0)

    herm = float(np.max(np.abs(rho - rho.conj().T))) if d else 0.0
    tr = np.trace(rho)
    trace_defect = float(abs(tr - 1))
    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.trace(rho).real
    resid = residual_norm(lv, rho)
    log.debug("steady state D=%d solver=%s iters=%d residual=%.3e hermiticity=%.3e trace=%.3e",
              d, label, iters, resid, herm, trace_defect)
    if not converged or resid > opts.accept_residual:
        raise NonConvergenceError(
            f"{label} solve did not converge: residual {resid:.3e} after {iters} iterations",
            residual=resid, iterations=iters)
    min_eig = float(la.eigvalsh(rho)[0]) if d else 0.0
    return SteadyState(rho=rho, basis=lv.basis, residual=resid, solver=label, trace_row=k,
                       iterations=iters, min_eigenvalue=min_eig, hermiticity_defect=herm,
                       trace_defect=trace_defect, solve_time=time.perf_counter() - t0,
                       params=lv.params)


def steady_state(params: SystemParams, n_ph_max: int, n_m_max: int,
                 opts: SolveOptions | None = None, x0=None) -> SteadyState:
    """Build the Liouvillian on ``(n_ph_max, n_m_max)`` and solve it."""
    lv = build_liouvillian(params, build_basis(n_ph_max, n_m_max))
    return solve_steady_state(lv, opts, x0)


def thermal_cutoff(n_th: float, tail: float = 5e-8) -> int:
    """Smallest ``N_m`` whose discarded Bose tail ``(n/(n+1))**(N_m+1)`` is below ``tail``."""
    if n_th <= 0:
        return 0
    if not 0 < tail < 1:
        raise ValueError("tail must lie in (0, 1)")
    return max(int(np.ceil(np.log(tail) / np.log(n_th / (n_th + 1)))) - 1, 0)


@dataclass(frozen=True)
class CutoffCaps:
    n_ph_max: int = 24
    n_m_max: int = 40


def converge_cutoffs(params: SystemParams, target: str = "g2", rel_tol: float = 5e-3,
                     opts: SolveOptions | None = None, start=(2, 1),
                     caps: CutoffCaps = CutoffCaps()):
    """Grow ``(N_ph, N_m)`` until raising either by one moves ``target`` by < rel_tol.

    Returns ``(n_ph_max, n_m_max, state)``. Raises ``ResourceLimitError`` when
    the required cutoff would pass ``caps``. With a thermal bath the phonon
    cutoff starts at ``thermal_cutoff``: a slowly decaying Bose tail changes
    ``target`` by little per added level while still biasing it as a whole.
    """
    from .observables import observable_value

    if not rel_tol > 0:
        raise ValueError("rel_tol must be > 0")
    n_ph, n_m = start
    n_m = max(n_m, thermal_cutoff(params.n_th, rel_tol * 1e-5))
    if n_ph > caps.n_ph_max or n_m > caps.n_m_max:
        raise ResourceLimitError("starting cutoffs already exceed the caps", n_ph, n_m)
    cache = {}

    def evaluate(nph, nm):
        key = (nph, nm)
        if key not in cache:
            guess = None
            smaller = [c for c in cache if c[0] <= nph and c[1] <= nm]
            if smaller:
                src = max(smaller, key=lambda c: (c[0] + c[1], c))
                st = cache[src][0]
                guess = embed(st.rho, st.basis, build_basis(nph, nm))
            st = steady_state(params, nph, nm, opts, x0=guess)
            cache[key] = (st, observable_value(st, target))
        return cache[key]

    def rel_change(a, b):
        return abs(b - a) / max(abs(a), 1e-300)

    while True:
        state, value = evaluate(n_ph, n_m)
        grow_ph = n_ph < caps.n_ph_max
        grow_m = n_m < caps.n_m_max
        d_ph = rel_change(value, evaluate(n_ph + 1, n_m)[1]) if grow_ph else 0.0
        d_m = rel_change(value, evaluate(n_ph, n_m + 1)[1]) if grow_m else 0.0
        if d_ph < rel_tol and d_m < rel_tol:
            if grow_ph and grow_m:
                return n_ph, n_m, state
            raise ResourceLimitError(
                f"convergence of {target} cannot be verified beyond the cutoff caps "
                f"(N_ph={caps.n_ph_max}, N_m={caps.n_m_max})", n_ph, n_m, max(d_ph, d_m))
        if d_ph >= rel_tol and not grow_ph or d_m >= rel_tol and not grow_m:
            raise ResourceLimitError(
                f"{target} not converged at the cutoff caps: change {max(d_ph, d_m):.3e} "
                f"at N_ph={n_ph}, N_m={n_m}", n_ph, n_m, max(d_ph, d_m))
        if d_ph >= rel_tol:
            n_ph += 1
        if d_m >= rel_tol:
            n_m += 1
