"""Spin and energy current operators and their steady-state profiles."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .chain import ChainSpec
from .errors import DimensionError
from .pauli import OperatorSum, string_action, pauli

log = logging.getLogger(__name__)

IMAG_TOL = 1e-10


def spin_current_op(spec: ChainSpec, j: int) -> OperatorSum:
    """Spin current through bond ``(j, j+1)``: ``2 a_j (x_j y_{j+1} - y_j x_{j+1})``."""
    n = spec.n
    if not 1 <= j <= n - 1:
        raise DimensionError(f"bond {j} outside 1..{n - 1}")
    a = spec.bond_couplings()[j - 1]
    return pauli(n, {j: "X", j + 1: "Y"}, 2 * a) - pauli(n, {j: "Y", j + 1: "X"}, 2 * a)


def _triple(n: int, j: int, letters: str, coeff: float) -> OperatorSum:
    return pauli(n, {j - 1: letters[0], j: letters[1], j + 1: letters[2]}, coeff)


def bulk_energy_current_op(spec: ChainSpec, j: int) -> OperatorSum:
    """Field-free energy current at site ``j`` (three-site operator on ``j-1, j, j+1``).

    For XXZ the prefactors are ``alpha^2``, ``alpha Delta_{j-1}`` and
    ``alpha Delta_j``; for XXX every group carries ``alpha_{j-1} alpha_j``.
    """
    n = spec.n
    if not 2 <= j <= n - 1:
        raise DimensionError(f"interior site {j} outside 2..{n - 1}")
    a1, a2 = spec.bond_couplings()[j - 2], spec.bond_couplings()[j - 1]
    d1, d2 = spec.bond_anisotropies()[j - 2], spec.bond_anisotropies()[j - 1]
    return (
        _triple(n, j, "YZX", 2 * a1 * a2) - _triple(n, j, "XZY", 2 * a1 * a2)
        + _triple(n, j, "ZXY", 2 * d1 * a2) - _triple(n, j, "ZYX", 2 * d1 * a2)
        + _triple(n, j, "XYZ", 2 * a1 * d2) - _triple(n, j, "YXZ", 2 * a1 * d2)
    )


def magnetic_current_op(spec: ChainSpec, j: int) -> OperatorSum:
    """Field contribution ``B_j (J_{j-1} + J_j) / 2`` with ``J`` the spin currents."""
    b = spec.fields_z[j - 1]
    if b == 0.0:
        return OperatorSum.zero(spec.n)
    return (spin_current_op(spec, j - 1) + spin_current_op(spec, j)) * (b / 2)


def energy_current_op(spec: ChainSpec, j: int) -> OperatorSum:
    """Total energy current at interior site ``j``, field part included when present."""
    op = bulk_energy_current_op(spec, j)
    if spec.has_field:
        op = op + magnetic_current_op(spec, j)
    return op


def expectation(rho: np.ndarray, op: OperatorSum) -> float:
    """``tr(rho op)`` for a Hermitian operator; logs a warning on imaginary residue."""
    rho = np.asarray(rho)
    dim = 2**op.n
    if rho.shape != (dim, dim):
        raise DimensionError(f"operator on {op.n} sites needs a {dim}x{dim} state")
    cols = np.arange(dim)
    total = 0j
    for s, c in op:
        rows, vals = string_action(s)
        total += c * np.dot(rho[cols, rows], vals)
    if abs(total.imag) > IMAG_TOL:
        log.warning("expectation value has imaginary part %.3e", total.imag)
    return float(total.real)


@dataclass
class CurrentProfile:
    spin: list[float]
    energy: list[float]
    magnetic: Optional[list[float]] = None

    def spin_spread(self) -> float:
        return float(np.ptp(self.spin)) if self.spin else 0.0

    def energy_spread(self) -> float:
        return float(np.ptp(self.energy)) if self.energy else 0.0

    def to_dict(self) -> dict:
        out = {"spin": list(self.spin), "energy": list(self.energy)}
        if self.magnetic is not None:
            out["magnetic"] = list(self.magnetic)
        return out


def current_profile(rho: np.ndarray, spec: ChainSpec) -> CurrentProfile:
    """Spin current per bond ``1..n-1`` and energy current per interior site ``2..n-1``."""
    spin = [expectation(rho, spin_current_op(spec, j)) for j in range(1, spec.n)]
    energy = [expectation(rho, energy_current_op(spec, j)) for j in range(2, spec.n)]
    magnetic = None
    if spec.has_field:
        magnetic = [expectation(rho, magnetic_current_op(spec, j)) for j in range(2, spec.n)]
    return CurrentProfile(spin, energy, magnetic)
