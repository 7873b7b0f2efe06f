"""Symbolic algebra of multi-site Pauli strings.

Sites are numbered ``1..n``. A letter sequence such as ``"XIZ"`` means
``sigma^x (x) 1 (x) sigma^z`` with site 1 leftmost, which is also the most
significant qubit of the dense computational basis.

Coefficients are double-precision complex. Every phase produced by the
single-site table is one of ``+-1, +-i``, so identities built from dyadic
coefficients cancel exactly; terms below :data:`ATOL` are dropped when a sum is
canonicalised.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence, Union

import numpy as np
import scipy.sparse as sp

from .errors import CapacityError, DimensionError

LETTERS = "IXYZ"
ATOL = 1e-14
DENSE_LIMIT = 12

# (a, b) -> (phase, c) with a.b = phase * c
_TABLE: dict[tuple[str, str], tuple[complex, str]] = {
    ("X", "Y"): (1j, "Z"),
    ("Y", "Z"): (1j, "X"),
    ("Z", "X"): (1j, "Y"),
    ("Y", "X"): (-1j, "Z"),
    ("Z", "Y"): (-1j, "X"),
    ("X", "Z"): (-1j, "Y"),
}
for _p in LETTERS:
    _TABLE[("I", _p)] = (1, _p)
    _TABLE[(_p, "I")] = (1, _p)
    _TABLE[(_p, _p)] = (1, "I")

Scalar = Union[int, float, complex, np.number]


def _check_letters(letters: str) -> None:
    if not letters:
        raise DimensionError("a Pauli string needs at least one site")
    bad = set(letters) - set(LETTERS)
    if bad:
        raise ValueError(f"invalid Pauli letters {sorted(bad)} in {letters!r}")


@lru_cache(maxsize=1 << 16)
def _mul_letters(s: str, t: str) -> tuple[complex, str]:
    phase: complex = 1
    out = []
    for a, b in zip(s, t):
        ph, c = _TABLE[(a, b)]
        phase *= ph
        out.append(c)
    return phase, "".join(out)


@dataclass(frozen=True)
class PauliString:
    """A coefficient times a tensor product of single-site Pauli letters."""

    coeff: complex
    letters: str

    def __post_init__(self):
        _check_letters(self.letters)

    @property
    def n(self) -> int:
        return len(self.letters)

    def to_sum(self) -> "OperatorSum":
        return OperatorSum(self.n, {self.letters: self.coeff})


def mul(a: PauliString, b: PauliString) -> PauliString:
    """Operator product ``a.b`` of two Pauli strings."""
    if a.n != b.n:
        raise DimensionError(f"cannot multiply strings on {a.n} and {b.n} sites")
    phase, letters = _mul_letters(a.letters, b.letters)
    return PauliString(complex(a.coeff * b.coeff * phase), letters)


class OperatorSum:
    """Canonical linear combination of Pauli strings on ``n`` sites.

    Instances are immutable. Two sums compare equal when their canonical term
    maps agree, i.e. when every coefficient of their difference is below
    :data:`ATOL`.
    """

    __slots__ = ("_n", "_terms")
    __hash__ = None  # equality is tolerance based

    def __init__(
        self,
        n: int,
        terms: Union[Mapping[str, Scalar], Iterable[tuple[str, Scalar]]] = (),
    ):
        if n < 1:
            raise DimensionError("an operator needs at least one site")
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[str, complex] = {}
        for letters, c in items:
            if len(letters) != n:
                raise DimensionError(
                    f"term {letters!r} has {len(letters)} sites, expected {n}"
                )
            acc[letters] = acc.get(letters, 0j) + complex(c)
        for letters in acc:
            _check_letters(letters)
        self._n = n
        self._terms = {k: v for k, v in acc.items() if abs(v) >= ATOL}

    # construction helpers -------------------------------------------------
    @classmethod
    def zero(cls, n: int) -> "OperatorSum":
        return cls(n)

    @classmethod
    def identity(cls, n: int) -> "OperatorSum":
        return cls(n, {"I" * n: 1})

    @classmethod
    def from_vector(cls, vec: np.ndarray, n: int) -> "OperatorSum":
        """Inverse of :meth:`to_vector`."""
        vec = np.asarray(vec)
        if vec.shape != (4**n,):
            raise DimensionError(f"expected a vector of length {4 ** n}")
        idx = np.flatnonzero(np.abs(vec) >= ATOL)
        return cls(n, {pauli_label(int(k), n): vec[k] for k in idx})

    # basic protocol -------------------------------------------------------
    @property
    def n(self) -> int:
        return self._n

    @property
    def terms(self) -> Mapping[str, complex]:
        return MappingProxyType(self._terms)

    def __iter__(self) -> Iterator[tuple[str, complex]]:
        return iter(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def coefficient(self, letters: str) -> complex:
        return self._terms.get(letters, 0j)

    def __repr__(self) -> str:
        if not self._terms:
            return f"OperatorSum({self._n}, 0)"
        body = " + ".join(f"({_fmt(c)}){s}" for s, c in sorted(self._terms.items()))
        return f"OperatorSum({self._n}, {body})"

    def _check(self, other: "OperatorSum") -> None:
        if other.n != self._n:
            raise DimensionError(f"operands act on {self._n} and {other.n} sites")

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, OperatorSum):
            self._check(other)
            return OperatorSum(self._n, _chain(self._terms, other._terms, 1))
        if isinstance(other, (int, float, complex, np.number)):
            return self + other * OperatorSum.identity(self._n)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, OperatorSum):
            self._check(other)
            return OperatorSum(self._n, _chain(self._terms, other._terms, -1))
        if isinstance(other, (int, float, complex, np.number)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self) -> "OperatorSum":
        return OperatorSum(self._n, {s: -c for s, c in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, OperatorSum):
            self._check(other)
            acc: dict[str, complex] = {}
            for s, a in self._terms.items():
                for t, b in other._terms.items():
                    ph, u = _mul_letters(s, t)
                    acc[u] = acc.get(u, 0j) + a * b * ph
            return OperatorSum(self._n, acc)
        if isinstance(other, (int, float, complex, np.number)):
            return OperatorSum(self._n, {s: c * other for s, c in self._terms.items()})
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self * (1 / other)
        return NotImplemented

    def __eq__(self, other) -> bool:
        if not isinstance(other, OperatorSum):
            return NotImplemented
        if other.n != self._n:
            return False
        return not (self - other)._terms

    # queries ----------------------------------------------------------------
    def adjoint(self) -> "OperatorSum":
        return OperatorSum(self._n, {s: c.conjugate() for s, c in self._terms.items()})

    dag = adjoint

    def is_hermitian(self, atol: float = ATOL) -> bool:
        return (self - self.adjoint()).max_abs() < atol

    def trace(self) -> complex:
        """Matrix trace, ``2**n`` times the identity coefficient."""
        return self.coefficient("I" * self._n) * 2**self._n

    def support(self) -> set[int]:
        """1-based sites on which some term acts nontrivially."""
        return {i + 1 for s in self._terms for i, a in enumerate(s) if a != "I"}

    def norm(self) -> float:
        """Euclidean norm of the coefficient vector.

        Equals the Frobenius norm of the dense matrix divided by ``2**(n/2)``.
        """
        if not self._terms:
            return 0.0
        return float(np.sqrt(sum(abs(c) ** 2 for c in self._terms.values())))

    def max_abs(self) -> float:
        return max((abs(c) for c in self._terms.values()), default=0.0)

    def inner(self, other: "OperatorSum") -> complex:
        """Hilbert-Schmidt product ``tr(self^dag other) / 2**n``."""
        self._check(other)
        return sum(c.conjugate() * other._terms.get(s, 0) for s, c in self._terms.items())

    def to_vector(self) -> np.ndarray:
        """Dense coefficient vector of length ``4**n`` in base-4 label order."""
        vec = np.zeros(4**self._n, dtype=complex)
        for s, c in self._terms.items():
            vec[pauli_index(s)] = c
        return vec

    def relabel(self, mapping: Sequence[int]) -> "OperatorSum":
        """Move the letter at site ``k`` to site ``mapping[k-1]``."""
        if sorted(mapping) != list(range(1, self._n + 1)):
            raise DimensionError("relabel mapping must be a permutation of the sites")
        out = {}
        for s, c in self._terms.items():
            letters = ["I"] * self._n
            for k, a in enumerate(s):
                letters[mapping[k] - 1] = a
            out["".join(letters)] = c
        return OperatorSum(self._n, out)


def _chain(a: Mapping[str, complex], b: Mapping[str, complex], sign: int):
    yield from a.items()
    for s, c in b.items():
        yield s, sign * c


def _fmt(c: complex) -> str:
    if c.imag == 0:
        return f"{c.real:g}"
    if c.real == 0:
        return f"{c.imag:g}j"
    return f"{c.real:g}{c.imag:+g}j"


# ---------------------------------------------------------------------------
# free functions

def commutator(a: OperatorSum, b: OperatorSum) -> OperatorSum:
    """``a b - b a`` in canonical form."""
    if a.n != b.n:
        raise DimensionError(f"operands act on {a.n} and {b.n} sites")
    return a * b - b * a


def anticommutator(a: OperatorSum, b: OperatorSum) -> OperatorSum:
    if a.n != b.n:
        raise DimensionError(f"operands act on {a.n} and {b.n} sites")
    return a * b + b * a


def adjoint(a: OperatorSum) -> OperatorSum:
    return a.adjoint()


def pauli_index(letters: str) -> int:
    """Base-4 index of a letter sequence (``I=0, X=1, Y=2, Z=3``, site 1 first)."""
    k = 0
    for a in letters:
        k = 4 * k + LETTERS.index(a)
    return k


def pauli_label(index: int, n: int) -> str:
    out = []
    for _ in range(n):
        index, r = divmod(index, 4)
        out.append(LETTERS[r])
    return "".join(reversed(out))


def site_operator(n: int, site: int, coeffs: Mapping[str, Scalar]) -> OperatorSum:
    """Single-site linear combination ``sum_a coeffs[a] sigma_site^a`` embedded in ``n`` sites."""
    if not 1 <= site <= n:
        raise DimensionError(f"site {site} outside 1..{n}")
    terms = {}
    for a, c in coeffs.items():
        letters = ["I"] * n
        letters[site - 1] = a
        terms["".join(letters)] = c
    return OperatorSum(n, terms)


def embed(op: OperatorSum, sites: Sequence[int], n: int) -> OperatorSum:
    """Place an operator on ``len(sites)`` sites into a chain of ``n`` sites."""
    if op.n != len(sites):
        raise DimensionError("one target site per operator site is required")
    if len(set(sites)) != len(sites) or not all(1 <= s <= n for s in sites):
        raise DimensionError(f"invalid target sites {list(sites)} for n={n}")
    out = {}
    for s, c in op:
        letters = ["I"] * n
        for a, site in zip(s, sites):
            letters[site - 1] = a
        out["".join(letters)] = c
    return OperatorSum(n, out)


def pauli(n: int, placement: Mapping[int, str], coeff: Scalar = 1) -> OperatorSum:
    """Single Pauli string from a ``{site: letter}`` placement, e.g. ``{1: "X", 2: "Y"}``."""
    letters = ["I"] * n
    for site, a in placement.items():
        if not 1 <= site <= n:
            raise DimensionError(f"site {site} outside 1..{n}")
        letters[site - 1] = a
    return OperatorSum(n, {"".join(letters): coeff})


def sigma(n: int, site: int, letter: str) -> OperatorSum:
    return pauli(n, {site: letter.upper()})


def sigma_plus(n: int, site: int) -> OperatorSum:
    """``(sigma^x + i sigma^y)/2``."""
    return site_operator(n, site, {"X": 0.5, "Y": 0.5j})


def sigma_minus(n: int, site: int) -> OperatorSum:
    """``(sigma^x - i sigma^y)/2``."""
    return site_operator(n, site, {"X": 0.5, "Y": -0.5j})


def gamma_plus(n: int, site: int) -> OperatorSum:
    """``(sigma^z + i sigma^x)/2``."""
    return site_operator(n, site, {"Z": 0.5, "X": 0.5j})


def gamma_minus(n: int, site: int) -> OperatorSum:
    return site_operator(n, site, {"Z": 0.5, "X": -0.5j})


def pi_plus(n: int, site: int) -> OperatorSum:
    """``(sigma^y + i sigma^z)/2``."""
    return site_operator(n, site, {"Y": 0.5, "Z": 0.5j})


def pi_minus(n: int, site: int) -> OperatorSum:
    return site_operator(n, site, {"Y": 0.5, "Z": -0.5j})


# ---------------------------------------------------------------------------
# numerical realisation

def string_action(letters: str) -> tuple[np.ndarray, np.ndarray]:
    """Rows and values of the single nonzero in each column of a Pauli string."""
    n = len(letters)
    flip = 0
    phase_mask = 0
    n_y = 0
    for k, a in enumerate(letters):
        bit = 1 << (n - 1 - k)
        if a in "XY":
            flip |= bit
        if a in "YZ":
            phase_mask |= bit
        if a == "Y":
            n_y += 1
    cols = np.arange(2**n)
    parity = np.zeros(2**n, dtype=np.int64)
    masked = cols & phase_mask
    while masked.any():
        parity ^= masked & 1
        masked >>= 1
    vals = (1j**n_y) * (1 - 2 * parity)
    return cols ^ flip, vals


def to_dense(a: OperatorSum, n: int | None = None, limit: int | None = None) -> np.ndarray:
    """Dense ``2**n x 2**n`` matrix of an operator sum (site 1 most significant)."""
    n = a.n if n is None else n
    if n != a.n:
        raise DimensionError(f"operator acts on {a.n} sites, not {n}")
    limit = DENSE_LIMIT if limit is None else limit
    if n > limit:
        raise CapacityError(f"dense conversion limited to n <= {limit}, got {n}")
    dim = 2**n
    out = np.zeros((dim, dim), dtype=complex)
    cols = np.arange(dim)
    for s, c in a:
        rows, vals = string_action(s)
        out[rows, cols] += c * vals
    return out


def to_sparse(a: OperatorSum) -> sp.csr_matrix:
    """Sparse CSR matrix of an operator sum; no size limit beyond memory."""
    dim = 2**a.n
    if not a:
        return sp.csr_matrix((dim, dim), dtype=complex)
    cols = np.arange(dim)
    rows_all, cols_all, vals_all = [], [], []
    for s, c in a:
        rows, vals = string_action(s)
        rows_all.append(rows)
        cols_all.append(cols)
        vals_all.append(c * vals)
    m = sp.coo_matrix(
        (np.concatenate(vals_all), (np.concatenate(rows_all), np.concatenate(cols_all))),
        shape=(dim, dim),
    )
    return m.tocsr()


def span_dimension(gens: Sequence[OperatorSum], tol: float = 1e-10) -> int:
    """Dimension of the complex linear span of ``gens`` in the Pauli basis."""
    gens = list(gens)
    if not gens:
        return 0
    n = gens[0].n
    if any(g.n != n for g in gens):
        raise DimensionError("all generators must act on the same number of sites")
    keys = sorted({s for g in gens for s, _ in g})
    if not keys:
        return 0
    col = {s: k for k, s in enumerate(keys)}
    mat = np.zeros((len(gens), len(keys)), dtype=complex)
    for r, g in enumerate(gens):
        for s, c in g:
            mat[r, col[s]] = c
    norms = np.linalg.norm(mat, axis=1)
    mat = mat[norms > 0] / norms[norms > 0, None]
    if mat.shape[0] == 0:
        return 0
    sv = np.linalg.svd(mat, compute_uv=False)
    return int(np.sum(sv > tol))

