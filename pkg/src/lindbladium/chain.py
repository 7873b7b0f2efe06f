"""XXZ and XXX (Heisenberg) chain Hamiltonians as Pauli operator sums."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import SpecificationError
from .pauli import OperatorSum, pauli, sigma_minus, sigma_plus


class ChainKind(str, enum.Enum):
    XXZ = "XXZ"
    XXX = "XXX"


@dataclass(frozen=True)
class ChainSpec:
    """Open chain of ``n`` spins.

    For ``XXZ`` a single hopping ``alpha`` and per-bond anisotropies
    ``deltas``; for ``XXX`` per-bond couplings ``alphas``. Bonds are indexed
    ``1..n-1`` with bond ``b`` joining sites ``b`` and ``b+1`` (stored at
    position ``b-1``). ``fields_z`` holds one longitudinal field per site.
    """

    n: int
    kind: ChainKind = ChainKind.XXZ
    alpha: Optional[float] = None
    alphas: Optional[tuple[float, ...]] = None
    deltas: Optional[tuple[float, ...]] = None
    fields_z: tuple[float, ...] = field(default=())

    def __post_init__(self):
        try:
            kind = ChainKind(self.kind)
        except ValueError:
            raise SpecificationError(f"unknown chain kind {self.kind!r}") from None
        object.__setattr__(self, "kind", kind)
        if not isinstance(self.n, (int, np.integer)) or self.n < 2:
            raise SpecificationError(f"a chain needs n >= 2 sites, got {self.n!r}")
        nb = self.n - 1
        if kind is ChainKind.XXZ:
            if self.alphas is not None:
                raise SpecificationError("XXZ chains take a single alpha, not alphas")
            if self.alpha is None:
                object.__setattr__(self, "alpha", 1.0)
            if self.deltas is None or len(self.deltas) != nb:
                raise SpecificationError(f"XXZ chain with n={self.n} needs {nb} deltas")
            object.__setattr__(self, "deltas", tuple(float(d) for d in self.deltas))
            object.__setattr__(self, "alpha", float(self.alpha))
        else:
            if self.deltas is not None:
                raise SpecificationError("XXX chains take no deltas")
            if self.alpha is not None:
                raise SpecificationError("XXX chains take per-bond alphas, not alpha")
            if self.alphas is None or len(self.alphas) != nb:
                raise SpecificationError(f"XXX chain with n={self.n} needs {nb} alphas")
            object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        fields = tuple(float(b) for b in self.fields_z) if self.fields_z else (0.0,) * self.n
        if len(fields) != self.n:
            raise SpecificationError(f"fields_z needs {self.n} entries, got {len(fields)}")
        object.__setattr__(self, "fields_z", fields)
        values = [*self.bond_couplings(), *self.bond_anisotropies(), *fields]
        if not all(np.isfinite(values)):
            raise SpecificationError("chain parameters must be finite")

    @classmethod
    def xxz(cls, deltas: Sequence[float], alpha: float = 1.0, fields_z: Sequence[float] = ()):
        return cls(len(deltas) + 1, ChainKind.XXZ, alpha=alpha, deltas=tuple(deltas),
                   fields_z=tuple(fields_z))

    @classmethod
    def xxx(cls, alphas: Sequence[float], fields_z: Sequence[float] = ()):
        return cls(len(alphas) + 1, ChainKind.XXX, alphas=tuple(alphas), fields_z=tuple(fields_z))

    @classmethod
    def graded_xxz(cls, n: int, lo: float = 0.5, hi: float = 1.5, alpha: float = 1.0):
        """XXZ chain with anisotropies linearly spaced from ``lo`` to ``hi``."""
        return cls.xxz(np.linspace(lo, hi, n - 1), alpha=alpha)

    @classmethod
    def graded_xxx(cls, n: int, lo: float = 0.5, hi: float = 1.5):
        return cls.xxx(np.linspace(lo, hi, n - 1))

    def bond_couplings(self) -> tuple[float, ...]:
        """Hopping prefactor of the ``xx + yy`` part for each bond."""
        if self.kind is ChainKind.XXZ:
            return (self.alpha,) * (self.n - 1)
        return self.alphas

    def bond_anisotropies(self) -> tuple[float, ...]:
        """Prefactor of the ``zz`` part for each bond."""
        if self.kind is ChainKind.XXZ:
            return self.deltas
        return self.alphas

    @property
    def has_field(self) -> bool:
        return any(b != 0.0 for b in self.fields_z)

    def reversed(self) -> "ChainSpec":
        """Chain relabelled by ``i -> n + 1 - i``."""
        if self.kind is ChainKind.XXZ:
            return ChainSpec(self.n, self.kind, alpha=self.alpha, deltas=self.deltas[::-1],
                             fields_z=self.fields_z[::-1])
        return ChainSpec(self.n, self.kind, alphas=self.alphas[::-1], fields_z=self.fields_z[::-1])


def field_term(spec: ChainSpec) -> OperatorSum:
    out = OperatorSum.zero(spec.n)
    for j, b in enumerate(spec.fields_z, start=1):
        if b != 0.0:
            out = out + pauli(spec.n, {j: "Z"}, b)
    return out


def bond_hamiltonian(spec: ChainSpec, bond: int) -> OperatorSum:
    """Local energy of bond ``(bond, bond+1)`` without field terms."""
    n = spec.n
    a = spec.bond_couplings()[bond - 1]
    d = spec.bond_anisotropies()[bond - 1]
    i = bond
    return (pauli(n, {i: "X", i + 1: "X"}, a) + pauli(n, {i: "Y", i + 1: "Y"}, a)
            + pauli(n, {i: "Z", i + 1: "Z"}, d))


def build_hamiltonian(spec: ChainSpec) -> OperatorSum:
    """Hamiltonian of the chain including the optional ``sum_j B_j sigma_j^z``."""
    h = OperatorSum.zero(spec.n)
    for b in range(1, spec.n):
        h = h + bond_hamiltonian(spec, b)
    return h + field_term(spec)


def hamiltonian_as_ladder(spec: ChainSpec) -> OperatorSum:
    """The same Hamiltonian assembled from ladder operators.

    ``alpha_b (xx + yy) = 2 alpha_b (s+ s- + s- s+)`` on every bond.
    """
    n = spec.n
    h = OperatorSum.zero(n)
    for b, (a, d) in enumerate(zip(spec.bond_couplings(), spec.bond_anisotropies()), start=1):
        hop = sigma_plus(n, b) * sigma_minus(n, b + 1) + sigma_minus(n, b) * sigma_plus(n, b + 1)
        h = h + 2 * a * hop + pauli(n, {b: "Z", b + 1: "Z"}, d)
    return h + field_term(spec)
