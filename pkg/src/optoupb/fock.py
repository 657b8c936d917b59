"""Truncated Fock bases for two optical modes and one mechanical mode.

States are triples ``(n1, n2, nm)``. The retained set is every triple with
``n1 + n2 <= n_ph_max`` and ``nm <= n_m_max``, listed in the row order of the
full Kronecker product space (mode 1 slowest, phonon fastest) after the
over-cutoff rows have been deleted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Tuple

import numpy as np
import scipy.sparse as sp

Triple = Tuple[int, int, int]


@dataclass(frozen=True)
class FockBasis:
    n_ph_max: int
    n_m_max: int
    states: Tuple[Triple, ...]
    index_of: Dict[Triple, int] = field(repr=False, compare=False)
    # positions of the retained states inside the full product space
    full_index: np.ndarray = field(repr=False, compare=False)

    @property
    def dim(self) -> int:
        return len(self.states)

    @property
    def full_dim(self) -> int:
        return (self.n_ph_max + 1) ** 2 * (self.n_m_max + 1)

    def __len__(self) -> int:
        return len(self.states)

    def occupations(self) -> np.ndarray:
        """Integer array of shape (dim, 3) with the ``(n1, n2, nm)`` triples."""
        return np.asarray(self.states, dtype=int).reshape(-1, 3)


def _check_cutoff(name, value):
    if int(value) != value or value < 0:
        raise ValueError(f"{name} must be a non-negative integer, got {value!r}")


def single_mode_annihilator(dim: int) -> sp.csr_matrix:
    """Annihilation operator on Fock levels ``0..dim-1``.

    The only non-zero entries are ``(n, n+1) = sqrt(n+1)``.
    """
    if int(dim) != dim or dim < 1:
        raise ValueError(f"invalid dimension {dim!r}: need at least one Fock level")
    dim = int(dim)
    return sp.diags(np.sqrt(np.arange(1, dim, dtype=float)).astype(complex),
                    offsets=1, shape=(dim, dim), format="csr")


def kron(a, b) -> sp.csr_matrix:
    """Sparse Kronecker product, shape ``(ra*rb, ca*cb)``."""
    return sp.kron(sp.csr_matrix(a), sp.csr_matrix(b), format="csr")


def build_basis(n_ph_max: int, n_m_max: int) -> FockBasis:
    _check_cutoff("n_ph_max", n_ph_max)
    _check_cutoff("n_m_max", n_m_max)
    n_ph_max, n_m_max = int(n_ph_max), int(n_m_max)
    states = []
    full_index = []
    pos = 0
    for n1 in range(n_ph_max + 1):
        for n2 in range(n_ph_max + 1):
            for nm in range(n_m_max + 1):
                if n1 + n2 <= n_ph_max:
                    states.append((n1, n2, nm))
                    full_index.append(pos)
                pos += 1
    index_of = {s: i for i, s in enumerate(states)}
    return FockBasis(n_ph_max, n_m_max, tuple(states), index_of,
                     np.asarray(full_index, dtype=np.int64))


def full_space_operators(n_ph_max: int, n_m_max: int):
    """Mode operators on the untruncated ``(N_ph+1)^2 (N_m+1)`` product space."""
    a = single_mode_annihilator(n_ph_max + 1)
    b = single_mode_annihilator(n_m_max + 1)
    eye_ph = sp.identity(n_ph_max + 1, dtype=complex, format="csr")
    eye_m = sp.identity(n_m_max + 1, dtype=complex, format="csr")
    a1 = kron(kron(a, eye_ph), eye_m)
    a2 = kron(kron(eye_ph, a), eye_m)
    b2 = kron(kron(eye_ph, eye_ph), b)
    return a1, a2, b2


def restrict(op, basis: FockBasis) -> sp.csr_matrix:
    """Delete the rows and columns of a full-space operator outside ``basis``."""
    keep = basis.full_index
    return sp.csr_matrix(sp.csr_matrix(op)[keep][:, keep])


def mode_operators(basis: FockBasis):
    """Return ``(a1, a2, b2)`` as sparse matrices in the basis order."""
    full = full_space_operators(basis.n_ph_max, basis.n_m_max)
    return tuple(restrict(op, basis) for op in full)


@lru_cache(maxsize=32)
def _cached_ops(n_ph_max, n_m_max):
    return mode_operators(build_basis(n_ph_max, n_m_max))


def cached_mode_operators(basis: FockBasis):
    """Memoized ``mode_operators``; the returned matrices must not be mutated."""
    return _cached_ops(basis.n_ph_max, basis.n_m_max)


def embed(rho, small: FockBasis, large: FockBasis) -> np.ndarray:
    """Zero-pad a density matrix from ``small`` into the larger basis ``large``."""
    idx = np.fromiter((large.index_of[s] for s in small.states), dtype=np.int64,
                      count=small.dim)
    out = np.zeros((large.dim, large.dim), dtype=complex)
    out[np.ix_(idx, idx)] = rho
    return out


def zero_phonon_projector(basis: FockBasis) -> sp.csr_matrix:
    nm = basis.occupations()[:, 2]
    return sp.diags((nm == 0).astype(complex), format="csr")


def number_operators(basis: FockBasis):
    """Diagonal number operators ``(n1, n2, nm)`` read from the basis triples."""
    occ = basis.occupations().astype(complex)
    return tuple(sp.diags(occ[:, k], format="csr") for k in range(3))
