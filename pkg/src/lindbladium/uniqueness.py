"""Witnesses for uniqueness of the steady state.

Three independent checks are offered:

* the boundary operators on one site reduce to the ladder pair
  ``sigma^+, sigma^-`` and the ladder recursions reach every site;
* the associative algebra generated by ``H`` and the jump operators is the
  full ``4**n``-dimensional Pauli algebra;
* the dense Liouvillian has a one-dimensional null space.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence, Union

import numpy as np
import scipy.linalg as la

from .chain import ChainSpec, build_hamiltonian, field_term
from .driving import DrivingConfig, LindbladSet, build_lindblad_set
from .errors import CapacityError, DimensionError, ReductionError, SpecificationError
from .liouvillian import (
    NULL_THRESHOLD, SolverMode, Superoperator, assemble, dense_limit, liouvillian_spectrum,
)
from .pauli import (
    LETTERS, OperatorSum, commutator, gamma_minus, gamma_plus, pauli, pi_minus, pi_plus,
    sigma, sigma_minus, sigma_plus,
)

PIVOT_TOL = 1e-10
CLOSURE_SITE_LIMIT = 6

# single-site product table in index form: LETTERS[a] . LETTERS[b] = phase * LETTERS[c]
_PROD_IDX = np.zeros((4, 4), dtype=np.int64)
_PROD_PHASE = np.ones((4, 4), dtype=complex)
for _a in range(4):
    for _b in range(4):
        _s = OperatorSum(1, {LETTERS[_a]: 1}) * OperatorSum(1, {LETTERS[_b]: 1})
        ((_c, _ph),) = _s.terms.items()
        _PROD_IDX[_a, _b] = LETTERS.index(_c)
        _PROD_PHASE[_a, _b] = _ph


@lru_cache(maxsize=8)
def _digits(n: int) -> np.ndarray:
    idx = np.arange(4**n)
    return np.stack([(idx // 4 ** (n - 1 - k)) % 4 for k in range(n)], axis=1)


@lru_cache(maxsize=4096)
def _mul_map(n: int, letters: str, left: bool) -> tuple[np.ndarray, np.ndarray]:
    """Index map and phases of ``P_t P_s`` (``left``) or ``P_s P_t`` over all ``s``."""
    d = _digits(n)
    t = np.array([LETTERS.index(a) for a in letters])
    if left:
        res, ph = _PROD_IDX[t[None, :], d], _PROD_PHASE[t[None, :], d]
    else:
        res, ph = _PROD_IDX[d, t[None, :]], _PROD_PHASE[d, t[None, :]]
    weights = 4 ** np.arange(n - 1, -1, -1)
    return res @ weights, np.prod(ph, axis=1)


def _multiply(vectors: np.ndarray, g: OperatorSum, left: bool) -> np.ndarray:
    out = np.zeros_like(vectors)
    for letters, c in g:
        perm, phase = _mul_map(g.n, letters, left)
        out[:, perm] += c * phase[None, :] * vectors
    return out


@dataclass
class ClosureReport:
    generated_dim: int
    target_dim: int
    iterations: int
    saturated: bool
    complete: bool
    history: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"generated_dim": self.generated_dim, "target_dim": self.target_dim,
                "iterations": self.iterations, "saturated": self.saturated,
                "complete": self.complete, "history": list(self.history)}


class _Span:
    """Orthonormal basis grown by projection plus pivoted QR with a relative pivot threshold."""

    def __init__(self, dim: int):
        self.q = np.zeros((0, dim), dtype=complex)

    def add(self, cands: np.ndarray) -> np.ndarray:
        # products that vanish analytically leave rounding debris; never normalise it
        norms = np.linalg.norm(cands, axis=1)
        keep = norms > PIVOT_TOL
        cands = cands[keep] / norms[keep, None]
        if cands.shape[0] == 0:
            return cands
        for _ in range(2):
            cands = cands - (cands @ self.q.conj().T) @ self.q
        q, r, _ = la.qr(cands.T, mode="economic", pivoting=True)
        rank = int(np.sum(np.abs(np.diag(r)) > PIVOT_TOL))
        new = q[:, :rank].T
        new = new - (new @ self.q.conj().T) @ self.q
        new /= np.linalg.norm(new, axis=1)[:, None]
        self.q = np.vstack([self.q, new])
        return new

    @property
    def dim(self) -> int:
        return self.q.shape[0]


def algebra_closure(gens: Sequence[OperatorSum], n: Optional[int] = None,
                    max_rounds: int = 256) -> ClosureReport:
    """Dimension of the associative algebra generated by ``gens``.

    Each round multiplies the elements added in the previous round by every
    generator on both sides and adds whatever is linearly independent. The
    span of all words in the generators is reached when a round adds nothing.
    """
    gens = [g for g in gens if g]
    if not gens:
        raise ValueError("algebra_closure needs at least one nonzero generator")
    n = gens[0].n if n is None else n
    if any(g.n != n for g in gens):
        raise DimensionError(f"all generators must act on {n} sites")
    if n > CLOSURE_SITE_LIMIT:
        raise CapacityError(f"closure limited to n <= {CLOSURE_SITE_LIMIT}")
    target = 4**n
    span = _Span(target)
    frontier = span.add(np.array([g.to_vector() for g in gens]))
    history = [span.dim]
    rounds = 0
    complete = False
    while rounds < max_rounds:
        if frontier.shape[0] == 0 or span.dim == target:
            complete = True
            break
        rounds += 1
        cands = np.concatenate(
            [_multiply(frontier, g, left) for g in gens for left in (True, False)])
        frontier = span.add(cands)
        history.append(span.dim)
    else:
        complete = frontier.shape[0] == 0 or span.dim == target
    return ClosureReport(span.dim, target, rounds, span.dim == target, complete, history)


# ---------------------------------------------------------------------------
# boundary reduction

_FAMILIES = {
    "sigma": (sigma_plus, sigma_minus),
    "gamma": (gamma_plus, gamma_minus),
    "pi": (pi_plus, pi_minus),
}


def _scale_against(op: OperatorSum, template: OperatorSum) -> Optional[complex]:
    """``c`` with ``op = c * template`` if ``op`` is proportional to ``template``."""
    ip = template.inner(op)
    tn, on = template.norm(), op.norm()
    if on == 0 or abs(abs(ip) - tn * on) > 1e-12 * tn * on:
        return None
    return ip / tn**2


def _ladder_from(family: str, plus: OperatorSum, minus: OperatorSum) -> list[OperatorSum]:
    if family == "sigma":
        return [plus, minus]
    if family == "pi":
        sx = commutator(plus, minus)
        sy = plus + minus
        sz = (plus - minus) * -1j
    else:
        sy = commutator(plus, minus)
        sz = plus + minus
        sx = (plus - minus) * -1j
    return [(sx + sy * 1j) / 2, (sx - sy * 1j) / 2]


@dataclass
class BoundaryReduction:
    site: int
    family: str
    ops: list[OperatorSum]


def boundary_reduction(ls: Union[LindbladSet, Sequence[OperatorSum]],
                       n: Optional[int] = None) -> BoundaryReduction:
    """First boundary site whose operators contain a ``+/-`` pair of a known family."""
    ops = ls.operators(nonzero=True) if isinstance(ls, LindbladSet) else [L for L in ls if L]
    if not ops:
        raise ReductionError("no nonzero boundary operators")
    n = ops[0].n if n is None else n
    by_site: dict[int, list[OperatorSum]] = {}
    for L in ops:
        sup = L.support()
        if len(sup) != 1:
            raise ReductionError(f"operator acts on sites {sorted(sup)}, not on one site")
        by_site.setdefault(sup.pop(), []).append(L)
    for site in sorted(by_site):
        for family, (mk_plus, mk_minus) in _FAMILIES.items():
            tp, tm = mk_plus(n, site), mk_minus(n, site)
            plus = minus = None
            for L in by_site[site]:
                if plus is None and (c := _scale_against(L, tp)) is not None:
                    plus = L / c
                elif minus is None and (c := _scale_against(L, tm)) is not None:
                    minus = L / c
            if plus is not None and minus is not None:
                return BoundaryReduction(site, family, _ladder_from(family, plus, minus))
    raise ReductionError("no boundary carries a sigma, Gamma or Pi ladder pair")


def reduce_boundary_generators(ls: Union[LindbladSet, Sequence[OperatorSum]]) -> list[OperatorSum]:
    """``[sigma^+, sigma^-]`` on a boundary site, derived from its Lindblad operators."""
    return boundary_reduction(ls).ops


# ---------------------------------------------------------------------------
# ladder recursions

def ladder_hamiltonian(spec: ChainSpec) -> OperatorSum:
    """Hamiltonian with every bond rescaled so its hopping reads ``2 s+ s- + 2 s- s+``."""
    n = spec.n
    h = OperatorSum.zero(n)
    for b, (a, d) in enumerate(zip(spec.bond_couplings(), spec.bond_anisotropies()), start=1):
        if a == 0:
            raise SpecificationError(f"bond {b} has zero hopping; ladder form undefined")
        h = (h + 2 * (sigma_plus(n, b) * sigma_minus(n, b + 1) + sigma_minus(n, b) * sigma_plus(n, b + 1))
             + pauli(n, {b: "Z", b + 1: "Z"}, d / a))
    return h + field_term(spec)


def verify_ladder_recursion(spec: ChainSpec, side: str = "left") -> dict[str, bool]:
    """Check the recursions that build ``sigma_j^+-`` from the boundary pair.

    ``side="right"`` runs the mirrored recursion starting from site ``n``.
    Each verdict is an exact canonical-form comparison.
    """
    n = spec.n
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    site = (lambda k: k) if side == "left" else (lambda k: n + 1 - k)
    H = ladder_hamiltonian(spec)
    sp = lambda k: sigma_plus(n, site(k))  # noqa: E731
    sm = lambda k: sigma_minus(n, site(k))  # noqa: E731
    sz = lambda k: sigma(n, site(k), "Z")  # noqa: E731

    verdicts: dict[str, bool] = {}
    verdicts["[s+,s-]=sz"] = commutator(sp(1), sm(1)) == sz(1)
    hz = commutator(H, sz(1))
    verdicts["adjoint_identity"] = (
        commutator(sp(1), hz).adjoint() == -commutator(sp(1).adjoint(), hz.adjoint()))
    verdicts["sigma+_2"] = sz(1) * commutator(sp(1), hz) / 4 == sp(2)
    verdicts["sigma-_2"] = commutator(sm(1), hz) * sz(1) / 4 == sm(2)
    for j in range(3, n + 1):
        up = -sp(j - 2) - sz(j - 1) * commutator(sm(j - 1), sp(j - 1) * H * sp(j - 1)) / 2
        down = -sm(j - 2) + commutator(sp(j - 1), sm(j - 1) * H * sm(j - 1)) * sz(j - 1) / 2
        verdicts[f"sigma+_{j}"] = up == sp(j)
        verdicts[f"sigma-_{j}"] = down == sm(j)
    return verdicts


# ---------------------------------------------------------------------------
# numerical witness

def null_space_dimension(sop: Superoperator, tol: float = NULL_THRESHOLD) -> int:
    """Number of Liouvillian eigenvalues with modulus below ``tol``."""
    if sop.matrix is None:
        raise CapacityError("null space dimension requires a dense superoperator")
    return int(np.sum(np.abs(liouvillian_spectrum(sop)) < tol))


@dataclass
class UniquenessWitness:
    reduction_site: Optional[int]
    reduction_family: Optional[str]
    ladder: dict[str, bool]
    closure: ClosureReport
    null_dim: Optional[int]

    @property
    def ladder_ok(self) -> bool:
        return bool(self.ladder) and all(self.ladder.values())

    @property
    def agree(self) -> bool:
        return (self.reduction_site is not None and self.ladder_ok and self.closure.saturated
                and self.null_dim == 1)

    def to_dict(self) -> dict:
        return {"reduction_site": self.reduction_site, "reduction_family": self.reduction_family,
                "ladder": dict(self.ladder), "ladder_ok": self.ladder_ok,
                "closure": self.closure.to_dict(), "null_dim": self.null_dim,
                "agree": self.agree}


def closure_generators(h: OperatorSum, ls: LindbladSet) -> list[OperatorSum]:
    """``H`` together with every nonzero jump operator and its adjoint."""
    ops = ls.operators(nonzero=True)
    return [h, *ops, *(L.adjoint() for L in ops)]


def uniqueness_witnesses(spec: ChainSpec, cfg: DrivingConfig,
                         sop: Optional[Superoperator] = None) -> UniquenessWitness:
    """Run all three uniqueness witnesses for one configuration."""
    n = spec.n
    ls = build_lindblad_set(cfg, n)
    h = build_hamiltonian(spec)
    gens = closure_generators(h, ls)
    try:
        # the generated algebra is closed under adjoints, so L^dag may complete a pair
        red = boundary_reduction(gens[1:], n) if len(gens) > 1 else boundary_reduction([], n)
        site, family = red.site, red.family
        ladder = verify_ladder_recursion(spec, "left" if site == 1 else "right")
    except ReductionError:
        site = family = None
        ladder = {}
    closure = algebra_closure(gens, n)
    if sop is None and n <= dense_limit():
        sop = assemble(h, ls, n, SolverMode.DENSE)
    null_dim = null_space_dimension(sop) if sop is not None and sop.matrix is not None else None
    return UniquenessWitness(site, family, ladder, closure, null_dim)


__all__ = [
    "ClosureReport", "BoundaryReduction", "UniquenessWitness", "algebra_closure",
    "boundary_reduction", "reduce_boundary_generators", "ladder_hamiltonian",
    "verify_ladder_recursion", "null_space_dimension", "uniqueness_witnesses",
    "closure_generators",
]
