"""Lindblad generator, steady-state solvers and density-matrix diagnostics.

The generator is

    d rho/dt = i [rho, H] + sum_s ( L_s rho L_s^dag - 1/2 {L_s^dag L_s, rho} ).

Dense superoperators act on column-stacked density matrices, so that
``vec(A rho B) = (B^T kron A) vec(rho)``.
"""

from __future__ import annotations

import enum
import logging
import os
import warnings
from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
from scipy.integrate import RK45, solve_ivp

from .driving import LindbladSet
from .errors import CapacityError, ConvergenceError, DimensionError
from .pauli import OperatorSum, to_dense, to_sparse

log = logging.getLogger(__name__)

DEFAULT_DENSE_LIMIT = 6
MATRIX_FREE_LIMIT = 10
NULL_THRESHOLD = 1e-9
DENSE_LIMIT_ENV = "LINDBLADIUM_DENSE_LIMIT"


class SolverMode(str, enum.Enum):
    DENSE = "DENSE"
    MATRIX_FREE = "MATRIX_FREE"


class DegeneracyWarning(UserWarning):
    """The Liouvillian has more than one zero mode."""


def dense_limit() -> int:
    """Largest ``n`` for dense assembly; the environment may only raise it."""
    raw = os.environ.get(DENSE_LIMIT_ENV, "").strip()
    if not raw:
        return DEFAULT_DENSE_LIMIT
    return max(DEFAULT_DENSE_LIMIT, int(raw))


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(v).reshape((dim, dim), order="F")


@dataclass(frozen=True, eq=False)
class Superoperator:
    """Assembled Lindblad generator on ``n`` sites.

    ``matrix`` is the ``4**n x 4**n`` dense generator in DENSE mode and
    ``None`` in MATRIX_FREE mode; :meth:`apply` works in both.
    """

    n: int
    mode: SolverMode
    h_eff: Union[np.ndarray, sp.csr_matrix]
    jumps: tuple
    matrix: Optional[np.ndarray] = None

    @property
    def dim(self) -> int:
        return 2**self.n

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """``d rho/dt`` evaluated at ``rho`` (a ``2**n x 2**n`` array)."""
        rho = np.asarray(rho)
        if rho.shape != (self.dim, self.dim):
            raise DimensionError(f"expected a {self.dim}x{self.dim} density matrix")
        if self.matrix is not None:
            return unvec(self.matrix @ vec(rho), self.dim)
        h_rho = self.h_eff @ rho
        # rho H_eff^dag = (H_eff rho^dag)^dag
        out = -1j * h_rho + 1j * (self.h_eff @ rho.conj().T).conj().T
        for L in self.jumps:
            # L rho L^dag = L (L rho^dag)^dag
            out += L @ (L @ rho.conj().T).conj().T
        return np.asarray(out)

    def residual(self, rho: np.ndarray) -> float:
        return float(np.linalg.norm(self.apply(rho)))


def _as_ops(ls: Union[LindbladSet, Sequence[OperatorSum]]) -> list[OperatorSum]:
    if isinstance(ls, LindbladSet):
        return ls.operators(nonzero=True)
    return [L for L in ls if L]


def assemble(
    h: OperatorSum,
    ls: Union[LindbladSet, Sequence[OperatorSum]],
    n: int,
    mode: Union[SolverMode, str] = SolverMode.DENSE,
) -> Superoperator:
    """Build the generator for Hamiltonian ``h`` and jump operators ``ls``."""
    mode = SolverMode(mode)
    ops = _as_ops(ls)
    if h.n != n or any(L.n != n for L in ops):
        raise DimensionError(f"all operators must act on {n} sites")
    if mode is SolverMode.DENSE:
        limit = dense_limit()
        if n > limit:
            raise CapacityError(f"dense Liouvillian limited to n <= {limit}, got {n}")
        H = to_dense(h)
        jumps = [to_dense(L) for L in ops]
        dim = 2**n
        K = sum((L.conj().T @ L for L in jumps), np.zeros((dim, dim), dtype=complex))
        h_eff = H - 0.5j * K
        eye = np.eye(dim)
        mat = -1j * np.kron(eye, h_eff) + 1j * np.kron(h_eff.conj(), eye)
        for L in jumps:
            mat += np.kron(L.conj(), L)
        for arr in (h_eff, mat, *jumps):
            arr.setflags(write=False)
        return Superoperator(n, mode, h_eff, tuple(jumps), mat)
    if n > MATRIX_FREE_LIMIT:
        raise CapacityError(f"matrix-free Liouvillian limited to n <= {MATRIX_FREE_LIMIT}, got {n}")
    H = to_sparse(h)
    jumps = [to_sparse(L) for L in ops]
    K = sp.csr_matrix((2**n, 2**n), dtype=complex)
    for L in jumps:
        K = K + (L.conj().T @ L)
    h_eff = (H - 0.5j * K).tocsr()
    return Superoperator(n, mode, h_eff, tuple(jumps), None)


class StateDiagnostics(NamedTuple):
    trace_deviation: float
    hermiticity_deviation: float
    min_eigenvalue: float

    def ok(self, trace_tol: float = 1e-12, herm_tol: float = 1e-12, eig_tol: float = 1e-10) -> bool:
        return (self.trace_deviation <= trace_tol and self.hermiticity_deviation <= herm_tol
                and self.min_eigenvalue >= -eig_tol)


def validate_state(rho: np.ndarray) -> StateDiagnostics:
    """Trace deviation from 1, Frobenius norm of ``rho - rho^dag``, smallest eigenvalue."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionError("density matrix must be square")
    dim = rho.shape[0]
    if dim & (dim - 1):
        raise DimensionError(f"dimension {dim} is not a power of two")
    herm = (rho + rho.conj().T) / 2
    return StateDiagnostics(
        trace_deviation=float(abs(np.trace(rho) - 1)),
        hermiticity_deviation=float(np.linalg.norm(rho - rho.conj().T)),
        min_eigenvalue=float(np.linalg.eigvalsh(herm)[0]),
    )


@dataclass
class SteadyStateResult:
    rho: np.ndarray
    residual: float
    null_dim: Optional[int]
    gap: Optional[float]
    mode: SolverMode
    steps: int = 0
    warnings: list[str] = field(default_factory=list)

    @property
    def diagnostics(self) -> StateDiagnostics:
        return validate_state(self.rho)


def _normalise(rho: np.ndarray) -> np.ndarray:
    rho = (rho + rho.conj().T) / 2
    return rho / np.trace(rho).real


def liouvillian_spectrum(sop: Superoperator) -> np.ndarray:
    if sop.matrix is None:
        raise CapacityError("spectrum requires a dense superoperator")
    return la.eigvals(sop.matrix)


def _dense_steady_state(sop: Superoperator, tol: float) -> SteadyStateResult:
    dim = sop.dim
    w, v = la.eig(sop.matrix)
    order = np.argsort(np.abs(w))
    rho = _normalise(unvec(v[:, order[0]], dim))
    residual = sop.residual(rho)
    if residual > tol:
        # polish: least-squares solve of L vec(rho) = 0 with tr(rho) = 1
        a = np.vstack([sop.matrix, vec(np.eye(dim))[None, :]])
        b = np.zeros(a.shape[0], dtype=complex)
        b[-1] = 1
        x = la.lstsq(a, b)[0]
        polished = _normalise(unvec(x, dim))
        if sop.residual(polished) < residual:
            rho, residual = polished, sop.residual(polished)
    null_dim = int(np.sum(np.abs(w) < NULL_THRESHOLD))
    re = np.sort(np.abs(w.real))
    gap = float(re[1]) if re.size > 1 else None
    result = SteadyStateResult(rho, residual, null_dim, gap, SolverMode.DENSE)
    if residual > tol:
        raise ConvergenceError(
            f"dense steady state residual {residual:.3e} exceeds tolerance {tol:.1e}",
            residual, result)
    return result


STALL_CHECKS = 20
MAX_RESTARTS = 8


def _stalled(window: deque) -> bool:
    """Residual flat and step size settled across the whole check window."""
    if len(window) < window.maxlen:
        return False
    (r0, h0), (r1, h1) = window[0], window[-1]
    return r1 > 0.9 * r0 and abs(h1 - h0) <= 0.1 * h0


def _matrix_free_steady_state(sop: Superoperator, tol: float, max_steps: int,
                              rho0: Optional[np.ndarray]) -> SteadyStateResult:
    dim = sop.dim
    rho = np.eye(dim, dtype=complex) / dim if rho0 is None else np.array(rho0, dtype=complex)

    def rhs(_t, y):
        return sop.apply(y.reshape(dim, dim)).ravel()

    def start(t0, y0, cap=np.inf):
        first = cap if np.isfinite(cap) else None
        return RK45(rhs, t0, y0, t_bound=np.inf, rtol=1e-10, atol=1e-10, max_step=cap,
                    first_step=first)

    solver = start(0.0, rho.ravel())
    best = np.inf
    best_rho = rho
    steps = restarts = 0
    window: deque = deque(maxlen=STALL_CHECKS)
    while steps < max_steps:
        solver.step()
        steps += 1
        if solver.status == "failed":
            break
        if steps % 10:
            continue
        cand = _normalise(solver.y.reshape(dim, dim))
        res = sop.residual(cand)
        if res <= tol:
            log.debug("matrix-free solve converged after %d steps (t=%.3g)", steps, solver.t)
            return SteadyStateResult(cand, res, None, None, SolverMode.MATRIX_FREE, steps)
        if res < best:
            best, best_rho = res, cand
        window.append((res, solver.step_size))
        if restarts < MAX_RESTARTS and _stalled(window):
            # the step size has settled on the stability boundary, where the stiffest
            # modes are barely damped; cap it below that so every mode decays again
            cap = 0.5 * solver.step_size
            log.debug("residual stalled at %.3e; capping step at %.3g", res, cap)
            solver = start(solver.t, solver.y, cap)
            restarts += 1
            window.clear()
    partial = SteadyStateResult(best_rho, best, None, None, SolverMode.MATRIX_FREE, steps)
    raise ConvergenceError(
        f"time propagation stopped after {steps} steps with residual {best:.3e} > {tol:.1e}",
        best, partial)


def steady_state(
    sop: Superoperator,
    tol: float = 1e-10,
    max_steps: int = 200_000,
    rho0: Optional[np.ndarray] = None,
) -> SteadyStateResult:
    """Stationary density matrix of ``sop``.

    DENSE mode diagonalises the generator; MATRIX_FREE mode integrates the
    master equation from ``rho0`` (default ``I/2**n``) with an adaptive
    Dormand-Prince 5(4) pair until the residual drops below ``tol``.

    Raises
    ------
    ConvergenceError
        If the residual cannot be brought below ``tol``; the best partial
        result is attached.
    """
    if sop.mode is SolverMode.DENSE:
        result = _dense_steady_state(sop, tol)
    else:
        result = _matrix_free_steady_state(sop, tol, max_steps, rho0)
    if result.null_dim is not None and result.null_dim > 1:
        msg = f"Liouvillian null space has dimension {result.null_dim}; steady state not unique"
        result.warnings.append(msg)
        warnings.warn(msg, DegeneracyWarning, stacklevel=2)
    return result


def propagate(sop: Superoperator, rho: np.ndarray, t: float) -> np.ndarray:
    """Evolve ``rho`` for time ``t`` under the generator."""
    dim = sop.dim

    def rhs(_t, y):
        return sop.apply(y.reshape(dim, dim)).ravel()

    sol = solve_ivp(rhs, (0.0, t), np.asarray(rho, dtype=complex).ravel(),
                    method="RK45", rtol=1e-10, atol=1e-12)
    if not sol.success:
        raise ConvergenceError(f"propagation failed: {sol.message}", np.inf)
    return sol.y[:, -1].reshape(dim, dim)
