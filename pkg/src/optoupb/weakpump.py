"""Weak-pump pure-state model on the 12-state basis ``n1 + n2 <= 2``, ``nm <= 1``.

Dissipation enters through complex frequencies ``Delta -> Delta - i kappa/2`` and
``omega_m -> omega_m - i gamma/2``. With ``C_000 = 1`` the remaining amplitudes
follow from a closed 10x10 linear system in which every term of higher order
in the drive is dropped, so each ``C_{n1 n2 nm}`` is exactly proportional to
``eps**(n1 + n2)``. ``C_001`` is O(eps^2) and does not enter ``g2(0)``.

The equations carry ``+J`` on the hopping terms while the Hamiltonian has
``-J``; the two conventions differ by the gauge ``a2 -> -a2`` and give the
same photon statistics in mode one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from .errors import PoleError, SingularSystemError, UndefinedCorrelationError
from .liouvillian import SystemParams

AMPLITUDES = ("100", "010", "011", "101", "200", "110", "020", "021", "111", "201")
_IDX = {k: i for i, k in enumerate(AMPLITUDES)}
SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class WeakPumpSolution:
    c: Dict[str, complex]
    params: SystemParams

    def __getitem__(self, key: str) -> complex:
        if key == "000":
            return 1.0 + 0j
        return self.c[key]


def common_detuning(params: SystemParams, rtol: float = 1e-12) -> float:
    d1, d2 = params.delta1, params.delta2
    if abs(d1 - d2) > rtol * max(1.0, abs(d1), abs(d2)):
        raise ValueError(
            f"the weak-pump model needs delta1 == delta2, got {d1!r} and {d2!r}")
    return d1


def weak_pump_matrix(params: SystemParams) -> Tuple[np.ndarray, np.ndarray]:
    """Return ``(M, rhs)`` with ``M @ C = rhs`` in the order of ``AMPLITUDES``."""
    common_detuning(params)
    d1 = params.delta1 - 0.5j * params.kappa1
    d2 = params.delta2 - 0.5j * params.kappa2
    wm = params.omega_m - 0.5j * params.gamma
    j, g, eps = params.coupling_j, params.coupling_g, params.drive_eps

    m = np.zeros((10, 10), dtype=complex)
    rhs = np.zeros(10, dtype=complex)

    def put(row, **coef):
        for key, val in coef.items():
            m[row, _IDX[key[1:]]] += val

    # one-photon manifold; C_000 = 1 moves to the right-hand side
    put(0, c100=d1, c010=j)
    rhs[0] = -eps
    put(1, c010=d2, c100=j, c011=g)
    put(2, c011=d2 + wm, c101=j, c010=g)
    put(3, c101=d1 + wm, c011=j)
    # two-photon manifold
    put(4, c200=2 * d1, c100=SQRT2 * eps, c110=SQRT2 * j)
    put(5, c110=d1 + d2, c010=eps, c200=SQRT2 * j, c020=SQRT2 * j, c111=g)
    put(6, c020=2 * d2, c110=SQRT2 * j, c021=2 * g)
    put(7, c021=2 * d2 + wm, c111=SQRT2 * j, c020=2 * g)
    put(8, c111=d1 + d2 + wm, c201=SQRT2 * j, c021=SQRT2 * j, c110=g, c011=eps)
    put(9, c201=2 * d1 + wm, c101=SQRT2 * eps, c111=SQRT2 * j)
    return m, rhs


def solve_weak_pump(params: SystemParams) -> WeakPumpSolution:
    m, rhs = weak_pump_matrix(params)
    if np.linalg.cond(m) > 1e13:
        raise SingularSystemError("weak-pump linear system is singular for these parameters")
    c = np.linalg.solve(m, rhs)
    return WeakPumpSolution({k: complex(c[i]) for i, k in enumerate(AMPLITUDES)}, params)


def g2_weak_pump(sol) -> float:
    """Zero-delay correlation ``(2|C200|^2 + 2|C201|^2) / (|C100|^2 + |C101|^2)^2``."""
    den = abs(sol["100"]) ** 2 + abs(sol["101"]) ** 2
    if den == 0:
        raise UndefinedCorrelationError("mode-one occupation vanishes in the weak-pump model")
    return (2 * abs(sol["200"]) ** 2 + 2 * abs(sol["201"]) ** 2) / den ** 2


def g2_weak_pump_params(params: SystemParams) -> float:
    return g2_weak_pump(solve_weak_pump(params))


def c_perturbative(params: SystemParams) -> Tuple[complex, complex]:
    """Leading orders in g/omega_m of ``C_200`` (through g^2) and ``C_201`` (g^1).

    Evaluated with every rate divided by omega_m, ``gamma = 0`` and the
    detuning shifted to ``Delta - i kappa/2``; the amplitudes are scaled back
    by ``(eps/omega_m)**2`` so they compare directly with ``solve_weak_pump``.
    """
    wm = params.omega_m
    if wm <= 0:
        raise ValueError("c_perturbative needs omega_m > 0")
    delta = (common_detuning(params) - 0.5j * params.kappa1) / wm
    j = params.coupling_j / wm
    g = params.coupling_g / wm
    # shifted detunings of the one- and two-photon manifolds with one phonon
    dm1 = delta + 1
    dm2 = 2 * delta + 1

    pole_a = delta ** 2 - j ** 2
    pole_b = dm1 ** 2 - j ** 2
    for value, name in ((pole_a, "Delta^2 - J^2"), (pole_b, "(Delta + omega_m)^2 - J^2"),
                        (delta, "Delta")):
        if abs(value) < 1e-14:
            raise PoleError(f"perturbative amplitudes diverge: {name} = 0", name)

    c200 = (delta ** 2 / (SQRT2 * pole_a ** 2)
            + g ** 2 * j ** 2 * (4 * delta ** 2 * dm1 + j ** 2 * dm2)
            / (2 * delta * pole_a ** 3 * pole_b))
    c201 = -g * SQRT2 * delta * j ** 2 / (pole_a ** 2 * pole_b)
    scale = (params.drive_eps / wm) ** 2
    return complex(c200 * scale), complex(c201 * scale)


def optimal_conditions_limit(j: float, kappa: float, omega_m: float,
                             branch: int = -1) -> Tuple[float, float]:
    """Asymptotic optimum ``(Delta_opt, g_opt)`` for ``kappa << J << omega_m``.

    ``Delta_opt = branch * kappa / (2 sqrt 3)`` and
    ``g_opt**2 = omega_m * (2 / (3 sqrt 3)) * kappa**3 / J**2``.
    """
    if branch not in (-1, 1):
        raise ValueError("branch must be -1 or +1")
    d = branch * kappa / (2 * math.sqrt(3))
    g = math.sqrt(omega_m * (2 / (3 * math.sqrt(3))) * kappa ** 3 / j ** 2)
    return d, g
