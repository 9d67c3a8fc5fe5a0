"""Potential symbols: diagonal (multiplication) parts with a known asymptotic class.

Each symbol knows its pointwise values on the lattice and enough structure
for the limit machinery to classify its behaviour along direction sequences:
whether it is bounded, real, and what family it belongs to.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable, Tuple

Point = Tuple[int, ...]

TAU = 2.0 * math.pi


class PotentialSymbol:
    """Base marker class.  Subclasses are small frozen dataclasses."""

    bounded: bool = True
    real: bool = True

    def value(self, x: Point) -> complex:
        raise NotImplementedError


@dataclass(frozen=True)
class Constant(PotentialSymbol):
    c: complex = 0.0

    @property
    def real(self) -> bool:  # type: ignore[override]
        return complex(self.c).imag == 0.0

    def value(self, x: Point) -> complex:
        return self.c


@dataclass(frozen=True)
class Decaying(PotentialSymbol):
    """v(x) -> 0 at infinity, |v(x)| <= envelope(|x|) with envelope -> 0."""

    rule: Callable[[int], complex]
    envelope: Callable[[float], float]
    is_real: bool = True

    @property
    def real(self) -> bool:  # type: ignore[override]
        return self.is_real

    def value(self, x: Point) -> complex:
        return self.rule(x[0])


@dataclass(frozen=True)
class TwoSidedLimits(PotentialSymbol):
    """v(x) -> c_minus as x -> -inf and -> c_plus as x -> +inf (d = 1)."""

    rule: Callable[[int], float]
    c_minus: float
    c_plus: float
    envelope: Callable[[float], float]

    def value(self, x: Point) -> complex:
        return self.rule(x[0])


def plateau_value(x: int) -> float:
    """Height n on the block (n^2 - n, n^2), zero on [n^2, n^2 + n], for x > 0."""
    if x <= 0:
        return 0.0
    r = math.isqrt(x)
    for n in (r, r + 1):
        if n * n - n < x < n * n:
            return float(n)
    return 0.0


@dataclass(frozen=True)
class Plateau(PotentialSymbol):
    """Growing plateaus of height n on (n^2 - n, n^2), zero in between."""

    bounded = False

    def value(self, x: Point) -> complex:
        return plateau_value(x[0])


@functools.lru_cache(maxsize=64)
def make_omega(kind: str, lam: float, mu: float) -> Callable[[float], float]:
    """Period-1 modulation, vanishing exactly on the integers, ~ lam*|t|^mu at 0."""
    if kind == "power_dist":
        def omega(t: float) -> float:
            s = t - math.floor(t)
            return lam * min(s, 1.0 - s) ** mu
        return omega
    if kind == "sine_squared":
        if mu != 2:
            raise ValueError("sine_squared modulation requires mu == 2")
        scale = lam / math.pi ** 2
        def omega(t: float) -> float:
            return scale * math.sin(math.pi * t) ** 2
        return omega
    raise ValueError(f"unknown modulation kind {kind!r}")


@dataclass(frozen=True)
class ModulatedPower(PotentialSymbol):
    """v(x) = |x|^a * omega(|x|^theta), omega period 1 with omega(t) ~ lam*|t|^mu.

    The sign of a - mu*(1 - theta) selects one of three regimes for the
    localizations at infinity (constants / power wells / divergence).
    """

    a: float
    theta: float
    lam: float
    mu: float
    omega_kind: str = "power_dist"

    def __post_init__(self):
        if not (0.0 < self.theta < 1.0):
            raise ValueError("theta must lie in (0, 1)")
        if self.mu <= 0 or self.lam <= 0 or self.a < 0:
            raise ValueError("need mu > 0, lam > 0, a >= 0")

    @property
    def bounded(self) -> bool:  # type: ignore[override]
        return self.a == 0.0

    @property
    def regime(self) -> int:
        """-1, 0, +1 as a compares with mu*(1 - theta)."""
        d = self.a - self.mu * (1.0 - self.theta)
        return 0 if abs(d) < 1e-12 else (1 if d > 0 else -1)

    def omega(self, t: float) -> float:
        return make_omega(self.omega_kind, self.lam, self.mu)(t)

    def value(self, x: Point) -> complex:
        r = abs(x[0])
        if r == 0:
            return 0.0
        return float(r) ** self.a * self.omega(float(r) ** self.theta)


@dataclass(frozen=True)
class PowerWell(PotentialSymbol):
    """v(q) = lam * |theta*q + center|^mu: a confining well (limit artifact)."""

    lam: float
    mu: float
    theta: float
    center: float

    bounded = False

    def value(self, x: Point) -> complex:
        return self.lam * abs(self.theta * x[0] + self.center) ** self.mu


@dataclass(frozen=True)
class AffineRamp(PotentialSymbol):
    """v(x) = slope * x: the linear-ramp potential (unbounded both ways)."""

    slope: float = 1.0

    bounded = False

    def value(self, x: Point) -> complex:
        return self.slope * x[0]


@dataclass(frozen=True)
class RadialDiverging(PotentialSymbol):
    """v(x) = rule(|x|) with rule monotone and -> +inf; e.g. log(1 + |x|)."""

    rule: Callable[[float], float]

    bounded = False

    def value(self, x: Point) -> complex:
        return self.rule(float(max(abs(c) for c in x)) if x else 0.0)


@dataclass(frozen=True)
class OscillatoryPhase(PotentialSymbol):
    """v(x) = exp(i x^2): unimodular, with no radial limits in any direction."""

    @property
    def real(self) -> bool:  # type: ignore[override]
        return False

    def value(self, x: Point) -> complex:
        n = x[0]
        return complex(math.cos((n * n) % TAU), math.sin((n * n) % TAU))


@dataclass(frozen=True)
class HalfLineWall(PotentialSymbol):
    """Hard wall: +infinity on one side of `position` (limit artifact, d = 1).

    Not a pointwise potential; operators built from it act on the half-lattice
    {x >= position} with a Dirichlet condition, and their resolvents extend by
    zero to the dead side.
    """

    position: int = 0

    bounded = False

    def value(self, x: Point) -> complex:
        raise ValueError("HalfLineWall has no finite pointwise values")

    def active(self, x: Point) -> bool:
        return x[0] >= self.position


@dataclass(frozen=True)
class Separable(PotentialSymbol):
    """Sum of sub-potentials, each depending on a subset of coordinates.

    parts is a tuple of (coords, symbol) pairs; symbol.value is fed the
    projection of x onto those coordinates.
    """

    parts: Tuple[Tuple[Tuple[int, ...], PotentialSymbol], ...]

    @property
    def bounded(self) -> bool:  # type: ignore[override]
        return all(sym.bounded for _, sym in self.parts)

    @property
    def real(self) -> bool:  # type: ignore[override]
        return all(sym.real for _, sym in self.parts)

    def value(self, x: Point) -> complex:
        total = 0.0 + 0.0j
        for coords, sym in self.parts:
            total += complex(sym.value(tuple(x[i] for i in coords)))
        return total
