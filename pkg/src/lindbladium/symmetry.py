"""Local unitaries that exchange the two baths, and checks of their action.

For each driving case a 2x2 unitary ``A`` is given in closed form. The global
transformation is ``U = A (x) A (x) ... (x) A``. Conjugation by ``U`` is carried
out symbolically: ``A sigma^k A^dag`` is a real combination of Pauli
matrices, and each Pauli string is expanded site by site.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Optional

import numpy as np

from .chain import ChainKind, ChainSpec, build_hamiltonian
from .currents import energy_current_op, spin_current_op
from .driving import DrivingCase, DrivingConfig, build_lindblad_set, invert_baths
from .errors import CapacityError, DimensionError, SpecificationError
from .liouvillian import assemble
from .pauli import ATOL, DENSE_LIMIT, OperatorSum, to_dense

SQRT2 = math.sqrt(2)
MAP_TOL = 1e-12

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# Hamiltonian family each case is formulated for.
CASE_FAMILY = {
    DrivingCase.X_XY_THETA: ChainKind.XXZ,
    DrivingCase.XY_ORTHO: ChainKind.XXZ,
    DrivingCase.Y_YZ_THETA: ChainKind.XXX,
    DrivingCase.YZ_ORTHO: ChainKind.XXX,
    DrivingCase.Z_XZ_THETA: ChainKind.XXX,
    DrivingCase.XZ_ORTHO: ChainKind.XXX,
}

# Cases for which the spin current is known to reverse under inversion.
SPIN_FLIP_CASES = (DrivingCase.X_XY_THETA, DrivingCase.XY_ORTHO)


@dataclass(frozen=True, eq=False)
class LocalUnitary:
    matrix: np.ndarray
    case: Optional[DrivingCase] = None
    theta: Optional[float] = None

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise DimensionError("a local unitary is a 2x2 matrix")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dag(self) -> "LocalUnitary":
        return LocalUnitary(self.matrix.conj().T, self.case, self.theta)

    def unitarity_error(self) -> float:
        return float(np.abs(self.matrix.conj().T @ self.matrix - np.eye(2)).max())


def build_A(case: DrivingCase, theta: float = 0.0) -> LocalUnitary:
    """Closed-form single-site unitary that swaps the baths of ``case``."""
    case = DrivingCase(case)
    X, Y, Z = _PAULI["X"], _PAULI["Y"], _PAULI["Z"]
    if case.is_theta and not 0.0 <= theta <= math.pi / 2 + 1e-15:
        raise SpecificationError(f"theta must lie in [0, pi/2], got {theta}")
    if case is DrivingCase.X_XY_THETA:
        m = np.array([[0, 1 + 1j], [-np.exp(1j * theta) * (1 - 1j), 0]]) / SQRT2
    elif case is DrivingCase.XY_ORTHO:
        m = 1j / SQRT2 * (X - Y)
    elif case is DrivingCase.Y_YZ_THETA:
        s = math.sin(theta)
        p, q = math.sqrt(1 + s), math.sqrt(max(1 - s, 0.0))
        m = np.array([[1j * p, q], [-q, -1j * p]]) / SQRT2
    elif case is DrivingCase.YZ_ORTHO:
        m = 1j / SQRT2 * (-Z + Y)
    elif case is DrivingCase.Z_XZ_THETA:
        c = math.cos(theta)
        p, q = math.sqrt(max(1 - c, 0.0)), math.sqrt(1 + c)
        m = 1j / SQRT2 * np.array([[p, q], [q, -p]])
    else:
        m = 1j / SQRT2 * (X - Z)
    return LocalUnitary(m, case, theta if case.is_theta else None)


def rotation_matrix(A: LocalUnitary) -> np.ndarray:
    """3x3 real matrix whose column ``k`` holds the Pauli coefficients of ``A sigma^k A^dag``."""
    m = A.matrix
    R = np.empty((3, 3))
    for k, a in enumerate("XYZ"):
        img = m @ _PAULI[a] @ m.conj().T
        for l, b in enumerate("XYZ"):
            val = np.trace(_PAULI[b] @ img) / 2
            if abs(val.imag) > 1e-12:
                raise ValueError("conjugation produced a non-Hermitian image; A is not unitary")
            R[l, k] = val.real
    return R


def conjugation_table(A: LocalUnitary) -> dict[str, OperatorSum]:
    """Images of ``sigma^x, sigma^y, sigma^z`` under ``A (.) A^dag`` as one-site sums."""
    R = rotation_matrix(A)
    return {a: OperatorSum(1, {b: R[l, k] for l, b in enumerate("XYZ")}) for k, a in enumerate("XYZ")}


def _letter_images(A: LocalUnitary) -> dict[str, list[tuple[str, float]]]:
    R = rotation_matrix(A)
    images = {"I": [("I", 1.0)]}
    for k, a in enumerate("XYZ"):
        images[a] = [(b, R[l, k]) for l, b in enumerate("XYZ") if abs(R[l, k]) >= ATOL]
    return images


def conjugate(op: OperatorSum, A: LocalUnitary, inverse: bool = False) -> OperatorSum:
    """``U op U^dag`` (or ``U^dag op U`` when ``inverse``) for ``U`` the tensor power of ``A``."""
    images = _letter_images(A.dag if inverse else A)
    acc: dict[str, complex] = {}
    for s, c in op:
        for choice in itertools.product(*(images[a] for a in s)):
            letters = "".join(b for b, _ in choice)
            coeff = c * math.prod(w for _, w in choice)
            acc[letters] = acc.get(letters, 0j) + coeff
    return OperatorSum(op.n, acc)


def build_U(A: LocalUnitary, n: int, limit: Optional[int] = None) -> np.ndarray:
    """Dense ``n``-fold tensor power of ``A``."""
    limit = DENSE_LIMIT if limit is None else limit
    if n > limit:
        raise CapacityError(f"dense U limited to n <= {limit}, got {n}")
    if n < 1:
        raise DimensionError("n must be positive")
    return reduce(np.kron, [A.matrix] * n)


@dataclass
class DissipatorMatch:
    label: str
    partner: str
    phase: complex
    residual: float

    def to_dict(self) -> dict:
        return {"label": self.label, "partner": self.partner,
                "phase": [self.phase.real, self.phase.imag], "residual": self.residual}


@dataclass
class MappingReport:
    """Outcome of checking that ``U`` maps the problem onto its bath-inverted twin.

    Symbolic residuals are Euclidean norms of Pauli coefficient vectors; the
    ``dense`` entries are Frobenius norms of the same differences as matrices.
    """

    case: DrivingCase
    family_match: bool
    hamiltonian_residual: float
    dissipator_match: list[DissipatorMatch]
    energy_current_residual: float
    spin_current_sign: int
    spin_flip_residual: float
    spin_keep_residual: float
    dense: dict = field(default_factory=dict)

    @property
    def dissipator_residual(self) -> float:
        return max((m.residual for m in self.dissipator_match), default=0.0)

    def to_dict(self) -> dict:
        return {
            "case": self.case.value,
            "family_match": self.family_match,
            "hamiltonian_residual": self.hamiltonian_residual,
            "dissipator_match": [m.to_dict() for m in self.dissipator_match],
            "dissipator_residual": self.dissipator_residual,
            "energy_current_residual": self.energy_current_residual,
            "spin_current_sign": self.spin_current_sign,
            "spin_flip_residual": self.spin_flip_residual,
            "spin_keep_residual": self.spin_keep_residual,
            "dense": dict(self.dense),
        }


def match_operator(image: OperatorSum, candidates) -> tuple[str, complex, float]:
    """Best candidate ``L'`` and unit phase ``c`` minimising ``||image - c L'||``."""
    best = None
    for cand in candidates:
        ip = cand.op.inner(image)
        phase = ip / abs(ip) if abs(ip) > 0 else 1 + 0j
        res = (image - cand.op * phase).norm()
        if best is None or res < best[2]:
            best = (cand.label, complex(phase), res)
    return best


def verify_mapping(spec: ChainSpec, cfg: DrivingConfig, strict: bool = True,
                   seed: Optional[int] = None, dense_limit: int = 8) -> MappingReport:
    """Check Hamiltonian invariance, the dissipator mapping and current laws under ``U``.

    With ``strict`` a chain outside the case's Hamiltonian family is rejected;
    otherwise the residuals are measured and ``family_match`` is ``False``.
    When ``seed`` is given and ``n`` is small, a random-state dense check of
    the full generator mapping is added.
    """
    family_match = CASE_FAMILY[cfg.case] is spec.kind
    if strict and not family_match:
        raise SpecificationError(
            f"{cfg.case.value} is formulated for {CASE_FAMILY[cfg.case].value} chains, got {spec.kind.value}")
    n = spec.n
    A = build_A(cfg.case, cfg.theta)
    H = build_hamiltonian(spec)
    h_res = (conjugate(H, A) - H).norm()

    source = build_lindblad_set(cfg, n)
    target = build_lindblad_set(invert_baths(cfg), n)
    matches = []
    for L in source:
        label, phase, res = match_operator(conjugate(L.op, A), target)
        matches.append(DissipatorMatch(L.label, label, phase, res))

    e_res = 0.0
    for j in range(2, n):
        J = energy_current_op(spec, j)
        e_res = max(e_res, (conjugate(J, A, inverse=True) - J).norm())

    flip = keep = 0.0
    for j in range(1, n):
        J = spin_current_op(spec, j)
        img = conjugate(J, A, inverse=True)
        flip = max(flip, (img + J).norm())
        keep = max(keep, (img - J).norm())
    sign = -1 if flip < MAP_TOL else (1 if keep < MAP_TOL else 0)

    report = MappingReport(cfg.case, family_match, h_res, matches, e_res, sign, flip, keep)
    if n <= dense_limit:
        report.dense = _dense_witness(spec, cfg, A, H, seed)
    return report


def _dense_witness(spec, cfg, A, H, seed) -> dict:
    n = spec.n
    U = build_U(A, n)
    Hd = to_dense(H)
    out = {"hamiltonian_residual": float(np.linalg.norm(U @ Hd @ U.conj().T - Hd))}
    e_res = 0.0
    for j in range(2, n):
        J = to_dense(energy_current_op(spec, j))
        e_res = max(e_res, float(np.linalg.norm(U.conj().T @ J @ U - J)))
    out["energy_current_residual"] = e_res
    if seed is not None and n <= 6:
        rng = np.random.default_rng(seed)
        dim = 2**n
        g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        rho = g @ g.conj().T
        rho /= np.trace(rho)
        fwd = assemble(H, build_lindblad_set(cfg, n), n, "MATRIX_FREE")
        inv = assemble(H, build_lindblad_set(invert_baths(cfg), n), n, "MATRIX_FREE")
        lhs = U @ fwd.apply(rho) @ U.conj().T
        rhs = inv.apply(U @ rho @ U.conj().T)
        out["generator_residual"] = float(np.linalg.norm(lhs - rhs))
    return out


def map_state(rho: np.ndarray, A: LocalUnitary) -> np.ndarray:
    """``U rho U^dag``."""
    n = int(round(math.log2(rho.shape[0])))
    U = build_U(A, n)
    return U @ rho @ U.conj().T

