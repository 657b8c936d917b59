"""Expectation values and zero-delay photon correlations of a steady state."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import UndefinedCorrelationError
from .fock import cached_mode_operators, zero_phonon_projector

OCCUPATION_FLOOR = 1e-14

MODE_INDEX = {"a1": 0, "a2": 1, "b2": 2, 1: 0, 2: 1}


@dataclass(frozen=True)
class ObservableSet:
    n1: float
    n2: float
    n_m: float
    g2: float
    g2_zero_phonon: float

    def as_dict(self):
        return {"n1": self.n1, "n2": self.n2, "n_m": self.n_m,
                "g2": self.g2, "g2_zero_phonon": self.g2_zero_phonon}


def _rho(state):
    return np.asarray(getattr(state, "rho", state))


def expectation(state, op) -> complex:
    """``Tr(rho O)`` for a steady state (or a bare density matrix)."""
    rho = _rho(state)
    op = sp.csr_matrix(op)
    if op.shape != rho.shape:
        raise ValueError(f"operator shape {op.shape} does not match density matrix {rho.shape}")
    return complex(op.multiply(rho.T).sum())


def sandwich_trace(m, rho) -> complex:
    """``Tr(M rho M^dag)`` from one sparse-dense product."""
    m = sp.csr_matrix(m)
    return complex(m.conj().multiply(m @ rho).sum())


def _annihilator(state, mode):
    try:
        k = MODE_INDEX[mode]
    except KeyError:
        raise ValueError(f"unknown mode {mode!r}; use 'a1' or 'a2'") from None
    return cached_mode_operators(state.basis)[k]


def g2_zero(state, mode="a1") -> float:
    """``<a^dag a^dag a a> / <a^dag a>^2`` for optical mode ``a1`` or ``a2``."""
    a = _annihilator(state, mode)
    n = sandwich_trace(a, state.rho).real
    if n < OCCUPATION_FLOOR:
        raise UndefinedCorrelationError(f"occupation of {mode} is {n:.3g}, below {OCCUPATION_FLOOR}")
    return sandwich_trace(a @ a, state.rho).real / n ** 2


def g2_zero_phonon(state, p0=None, mode="a1") -> float:
    """Correlation conditioned on the zero-phonon subspace.

    ``<a^dag a^dag a a P0> / <a^dag a P0>^2`` with ``P0`` rightmost, as written.
    """
    a = _annihilator(state, mode)
    if p0 is None:
        p0 = zero_phonon_projector(state.basis)
    ad = a.conj().T
    n = expectation(state, ad @ a @ p0).real
    if n < OCCUPATION_FLOOR:
        raise UndefinedCorrelationError(
            f"zero-phonon occupation of {mode} is {n:.3g}, below {OCCUPATION_FLOOR}")
    return expectation(state, ad @ ad @ a @ a @ p0).real / n ** 2


def occupations(state):
    """Mean occupations ``(n1, n2, n_m)`` read from the diagonal of rho."""
    pops = np.real(np.diag(state.rho))
    occ = state.basis.occupations()
    return tuple(float(pops @ occ[:, k]) for k in range(3))


def compute_observables(state) -> ObservableSet:
    n1, n2, nm = occupations(state)
    return ObservableSet(n1, n2, nm, g2_zero(state, "a1"), g2_zero_phonon(state))


OBSERVABLES = ("n1", "n2", "n_m", "g2", "g2_zero_phonon")


def observable_value(state, name: str) -> float:
    if name == "g2":
        return g2_zero(state, "a1")
    if name == "g2_zero_phonon":
        return g2_zero_phonon(state)
    if name in ("n1", "n2", "n_m"):
        return occupations(state)[("n1", "n2", "n_m").index(name)]
    raise ValueError(f"unknown observable {name!r}; choose from {OBSERVABLES}")
