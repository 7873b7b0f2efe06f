"""Boundary Lindblad operator sets for the six driving configurations.

Two families are covered:

* theta cases (``X_XY_THETA``, ``Y_YZ_THETA``, ``Z_XZ_THETA``): a pair
  ``K_+, K_-`` on each boundary with rates ``gamma (1 +- f)`` absorbed into
  the operators;
* orthogonal cases (``XY_ORTHO``, ``YZ_ORTHO``, ``XZ_ORTHO``): six operators
  ``L, V, W`` per boundary with free nonnegative amplitudes.

The left bath normally sits on site 1 and the right bath on site ``n``.
Inverting the baths swaps the two attachment sites and leaves the chain alone.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass
from typing import Iterator

from .errors import SpecificationError
from .pauli import OperatorSum, site_operator


class DrivingCase(str, enum.Enum):
    X_XY_THETA = "X_XY_THETA"
    XY_ORTHO = "XY_ORTHO"
    Y_YZ_THETA = "Y_YZ_THETA"
    YZ_ORTHO = "YZ_ORTHO"
    Z_XZ_THETA = "Z_XZ_THETA"
    XZ_ORTHO = "XZ_ORTHO"

    @property
    def is_theta(self) -> bool:
        return self.name.endswith("_THETA")


THETA_CASES = tuple(c for c in DrivingCase if c.is_theta)
ORTHO_CASES = tuple(c for c in DrivingCase if not c.is_theta)
AMP_KEYS = ("amp_l_plus", "amp_l_minus", "amp_v_plus", "amp_v_minus", "amp_w_plus", "amp_w_minus")


class Orientation(str, enum.Enum):
    NORMAL = "NORMAL"
    INVERTED = "INVERTED"


@dataclass(frozen=True)
class DrivingConfig:
    """Which boundary driving to apply, and its parameters.

    ``gamma``, ``f`` and ``theta`` are used by the theta cases; the six
    ``amp_*`` amplitudes by the orthogonal ones.
    """

    case: DrivingCase
    gamma: float = 1.0
    f: float = 0.0
    theta: float = 0.0
    amp_l_plus: float = 0.0
    amp_l_minus: float = 0.0
    amp_v_plus: float = 0.0
    amp_v_minus: float = 0.0
    amp_w_plus: float = 0.0
    amp_w_minus: float = 0.0
    orientation: Orientation = Orientation.NORMAL

    def __post_init__(self):
        try:
            object.__setattr__(self, "case", DrivingCase(self.case))
            object.__setattr__(self, "orientation", Orientation(self.orientation))
        except ValueError as exc:
            raise SpecificationError(str(exc)) from None
        for name in ("gamma", "f", "theta", *AMP_KEYS):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise SpecificationError(f"{name} must be finite")
            object.__setattr__(self, name, value)
        if self.case.is_theta:
            if self.gamma <= 0:
                raise SpecificationError(f"gamma must be positive, got {self.gamma}")
            if abs(self.f) > 1:
                raise SpecificationError(f"|f| must not exceed 1, got {self.f}")
            if not 0.0 <= self.theta <= math.pi / 2 + 1e-15:
                raise SpecificationError(f"theta must lie in [0, pi/2], got {self.theta}")
        else:
            for name in AMP_KEYS:
                if getattr(self, name) < 0:
                    raise SpecificationError(f"{name} must be nonnegative")

    @property
    def amps(self) -> tuple[float, ...]:
        return tuple(getattr(self, k) for k in AMP_KEYS)


def invert_baths(cfg: DrivingConfig) -> DrivingConfig:
    """Toggle the bath orientation."""
    flipped = Orientation.INVERTED if cfg.orientation is Orientation.NORMAL else Orientation.NORMAL
    return dataclasses.replace(cfg, orientation=flipped)


@dataclass(frozen=True)
class LindbladOperator:
    """One dissipation channel.

    ``bath`` is ``"L"`` or ``"R"`` (which reservoir the operator belongs to),
    ``site`` is where it is attached for this orientation, ``structure`` the
    single-site Pauli coefficients before the amplitude is applied.
    """

    label: str
    bath: str
    site: int
    amplitude: float
    structure: tuple[tuple[str, complex], ...]
    op: OperatorSum


@dataclass(frozen=True)
class LindbladSet:
    ops: tuple[LindbladOperator, ...]
    n: int

    def __iter__(self) -> Iterator[LindbladOperator]:
        return iter(self.ops)

    def __len__(self) -> int:
        return len(self.ops)

    def operators(self, nonzero: bool = False) -> list[OperatorSum]:
        return [o.op for o in self.ops if o.op or not nonzero]

    def on_site(self, site: int) -> list[LindbladOperator]:
        return [o for o in self.ops if o.site == site]

    def by_label(self, label: str) -> LindbladOperator:
        for o in self.ops:
            if o.label == label:
                return o
        raise KeyError(label)


def _theta_structures(case: DrivingCase, theta: float):
    """Unit structures ``(P ± iQ)/2`` of the left and right pairs."""
    c, s = math.cos(theta), math.sin(theta)
    if case is DrivingCase.X_XY_THETA:
        left, right, imag = {"Y": 1.0}, {"X": c, "Y": s}, ("Z", "Z")
    elif case is DrivingCase.Y_YZ_THETA:
        left, right, imag = {"Z": 1.0}, {"Y": c, "Z": s}, ("X", "X")
    else:
        left, right, imag = {"X": 1.0}, {"X": c, "Z": s}, ("Y", "Y")

    def pair(real, letter):
        plus = {k: v / 2 for k, v in real.items()}
        minus = dict(plus)
        plus[letter] = plus.get(letter, 0) + 0.5j
        minus[letter] = minus.get(letter, 0) - 0.5j
        return plus, minus

    return pair(left, imag[0]), pair(right, imag[1])


_ORTHO_LEFT = (
    ("L1", "amp_l_plus", {"X": 1, "Y": 1j}),
    ("L2", "amp_l_minus", {"X": 1, "Y": -1j}),
    ("V1", "amp_v_plus", {"Y": 1, "Z": 1j}),
    ("V2", "amp_v_minus", {"Y": 1, "Z": -1j}),
    ("W1", "amp_w_plus", {"Z": 1, "X": 1j}),
    ("W2", "amp_w_minus", {"Z": 1, "X": -1j}),
)
_RIGHT_STRUCTS = {
    "L3": {"X": 1, "Y": 1j},
    "L4": {"X": 1, "Y": -1j},
    "V3": {"Y": 1, "Z": 1j},
    "V4": {"Y": 1, "Z": -1j},
    "W3": {"Z": 1, "X": 1j},
    "W4": {"Z": 1, "X": -1j},
}
# right-boundary amplitude placement differs per case
_ORTHO_RIGHT_AMPS = {
    DrivingCase.XY_ORTHO: {"L3": "amp_l_minus", "L4": "amp_l_plus", "V3": "amp_w_minus",
                           "V4": "amp_w_plus", "W3": "amp_v_minus", "W4": "amp_v_plus"},
    DrivingCase.YZ_ORTHO: {"L3": "amp_w_minus", "L4": "amp_w_plus", "V3": "amp_v_minus",
                           "V4": "amp_v_plus", "W3": "amp_l_minus", "W4": "amp_l_plus"},
    DrivingCase.XZ_ORTHO: {"L3": "amp_v_minus", "L4": "amp_v_plus", "V3": "amp_l_minus",
                           "V4": "amp_l_plus", "W3": "amp_w_minus", "W4": "amp_w_plus"},
}


def _make(label, bath, site, n, amp, struct) -> LindbladOperator:
    op = site_operator(n, site, {k: amp * v for k, v in struct.items()})
    return LindbladOperator(label, bath, site, amp, tuple(sorted(struct.items())), op)


def build_lindblad_set(cfg: DrivingConfig, n: int) -> LindbladSet:
    """Lindblad operators of ``cfg`` on a chain of ``n`` sites."""
    if n < 2:
        raise SpecificationError(f"boundary driving needs n >= 2, got {n}")
    left_site, right_site = (1, n) if cfg.orientation is Orientation.NORMAL else (n, 1)
    ops = []
    if cfg.case.is_theta:
        (lp, lm), (rp, rm) = _theta_structures(cfg.case, cfg.theta)
        up = math.sqrt(cfg.gamma * (1 + cfg.f))
        down = math.sqrt(cfg.gamma * (1 - cfg.f))
        ops += [
            _make("K+L", "L", left_site, n, up, lp),
            _make("K-L", "L", left_site, n, down, lm),
            _make("K+R", "R", right_site, n, down, rp),
            _make("K-R", "R", right_site, n, up, rm),
        ]
    else:
        for label, key, struct in _ORTHO_LEFT:
            ops.append(_make(label, "L", left_site, n, getattr(cfg, key), struct))
        for label, key in _ORTHO_RIGHT_AMPS[cfg.case].items():
            ops.append(_make(label, "R", right_site, n, getattr(cfg, key), _RIGHT_STRUCTS[label]))
    return LindbladSet(tuple(ops), n)
