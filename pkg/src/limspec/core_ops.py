"""Band-dominated lattice operators on l^2(Z^d) and their window calculus.

Operators are represented by their matrix kernel k(x, y), controlled so that
k(x, y) = 0 whenever |x - y|_inf exceeds the bandwidth.  All dense numerics
go through finite windows; a row cap guards against accidental blow-ups.
"""
from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    DenseCapError,
    NotSelfAdjointError,
    SymbolPolicyError,
    WindowSizeError,
)
from .symbols import HalfLineWall, Point, PotentialSymbol, Separable

DENSE_CAP = 4096


def as_point(x, dim: int) -> Point:
    """Coerce ints / sequences to a lattice point of the given dimension."""
    if isinstance(x, (int, np.integer)):
        if dim != 1:
            raise ValueError(f"scalar point in dimension {dim}")
        return (int(x),)
    p = tuple(int(c) for c in x)
    if len(p) != dim:
        raise ValueError(f"point {p} has wrong dimension (expected {dim})")
    return p


def inf_norm(p: Point) -> int:
    return max(abs(c) for c in p)


@functools.lru_cache(maxsize=None)
def band_offsets(dim: int, radius: int) -> Tuple[Point, ...]:
    """All lattice offsets with |o|_inf <= radius, lexicographic."""
    rng = range(-radius, radius + 1)
    return tuple(itertools.product(rng, repeat=dim))


def ball_points(center: Point, radius: int) -> Tuple[Point, ...]:
    return tuple(
        tuple(c + o for c, o in zip(center, off))
        for off in band_offsets(len(center), radius)
    )


def sphere_points(radius: int, dim: int) -> Tuple[Point, ...]:
    if radius == 0:
        return ((0,) * dim,)
    return tuple(p for p in ball_points((0,) * dim, radius) if inf_norm(p) == radius)


def expand_points(points: Sequence[Point], radius: int) -> Tuple[Point, ...]:
    """Sorted union of inf-balls of the given radius around the points."""
    dim = len(points[0])
    out = set()
    for p in points:
        for off in band_offsets(dim, radius):
            out.add(tuple(c + o for c, o in zip(p, off)))
    return tuple(sorted(out))


@dataclass(frozen=True)
class Window:
    """An axis-aligned box of side `side` starting at `offset` (lexicographic)."""

    offset: Point
    side: int
    margin: int = 0

    def __post_init__(self):
        if self.side <= 0:
            raise ValueError("window side must be positive")
        if self.margin < 0 or self.side <= 2 * self.margin:
            raise ValueError("need side > 2 * margin >= 0")

    @property
    def dim(self) -> int:
        return len(self.offset)

    @property
    def size(self) -> int:
        return self.side ** self.dim

    def points(self) -> Tuple[Point, ...]:
        ranges = [range(o, o + self.side) for o in self.offset]
        return tuple(itertools.product(*ranges))

    def contains(self, p: Point, shrink: int = 0) -> bool:
        return all(
            o + shrink <= c <= o + self.side - 1 - shrink
            for c, o in zip(p, self.offset)
        )

    def interior_points(self, shrink: int) -> Tuple[Point, ...]:
        ranges = [range(o + shrink, o + self.side - shrink) for o in self.offset]
        return tuple(itertools.product(*ranges))


def centered_window(side: int, dim: int = 1, margin: int = 0) -> Window:
    """A side-`side` window centered at the origin (side should be odd)."""
    h = side // 2
    return Window(offset=(-h,) * dim, side=side, margin=margin)


@dataclass(frozen=True)
class LocalProbe:
    """A strictly positive, decaying weight restricted to a window."""

    weight: Callable[[Point], float]
    window: Window

    def weights(self) -> np.ndarray:
        w = np.array([float(self.weight(p)) for p in self.window.points()])
        if np.any(w <= 0):
            raise ValueError("probe weight must be strictly positive on its window")
        return w


def default_probe(dim: int = 1, side: int = 21, rate: float = 0.5) -> LocalProbe:
    return LocalProbe(
        weight=lambda p: rate ** inf_norm(p),
        window=centered_window(side, dim),
    )


@dataclass(frozen=True)
class SymbolTag:
    """Provenance of a kernel: hopping coefficients + potential + net shift."""

    hops: Tuple[Tuple[Point, complex], ...]
    potential: PotentialSymbol
    shift: Point

    def hop_dict(self) -> dict:
        return dict(self.hops)


@dataclass(frozen=True)
class LatticeKernel:
    """A controlled (finite-bandwidth) operator given by its matrix kernel."""

    dim: int
    bandwidth: int
    kernel: Callable[[Point, Point], complex]
    bound: float
    symbol_tag: Optional[SymbolTag] = None
    selfadjoint: bool = False
    active: Optional[Callable[[Point], bool]] = None

    def entry(self, x, y) -> complex:
        return self.kernel(as_point(x, self.dim), as_point(y, self.dim))


def _sample_bound(hops: Mapping[Point, complex], v: PotentialSymbol, dim: int) -> float:
    """Crude norm bound: sum of hop magnitudes + sampled sup of |v|."""
    hop_sum = sum(abs(c) for c in hops.values())
    if not v.bounded:
        return math.inf
    vmax = 0.0
    if dim == 1:
        sample = [(x,) for x in range(-4096, 4097)]
    else:
        axis = list(range(-512, 513, 7))
        sample = [tuple(0 for _ in range(dim)) for _ in range(1)]
        for i in range(dim):
            sample += [tuple(a if j == i else 0 for j in range(dim)) for a in axis]
        sample += list(itertools.product(range(-24, 25, 3), repeat=dim))
    for p in sample:
        vmax = max(vmax, abs(complex(v.value(p))))
    return hop_sum + vmax


def build_schrodinger(
    hops: Mapping,
    potential: PotentialSymbol,
    *,
    selfadjoint: bool = False,
    clamp: bool = False,
    v_bound: float | None = None,
) -> LatticeKernel:
    """Hopping operator plus multiplication: k(x, y) = hop(y - x) + [x == y] v(x).

    Unbounded potentials must be acknowledged with clamp=True: such operators
    are only ever used through finite windows, where their values are finite.
    """
    first = next(iter(hops))
    dim = 1 if isinstance(first, (int, np.integer)) else len(first)
    hop = {as_point(m, dim): complex(c) for m, c in hops.items()}
    if any(c == 0 for c in hop.values()):
        hop = {m: c for m, c in hop.items() if c != 0}
    bandwidth = max((inf_norm(m) for m in hop), default=0)
    if selfadjoint:
        for m, c in hop.items():
            neg = tuple(-a for a in m)
            if neg not in hop or abs(hop[neg] - c.conjugate()) > 1e-14:
                raise NotSelfAdjointError(f"hopping not symmetric at offset {m}")
        if not potential.real:
            raise NotSelfAdjointError("potential is not real-valued")
    if not potential.bounded and not clamp:
        raise SymbolPolicyError(
            "unbounded potential requires clamp=True (window-clamped usage)"
        )

    if isinstance(potential, HalfLineWall):
        return wall_operator(hop, position=potential.position)

    def kernel(x: Point, y: Point) -> complex:
        off = tuple(b - a for a, b in zip(x, y))
        val = hop.get(off, 0.0 + 0.0j)
        if x == y:
            val += complex(potential.value(x))
        return val

    if v_bound is None:
        bound = _sample_bound(hop, potential, dim)
    else:
        bound = sum(abs(c) for c in hop.values()) + v_bound
    tag = SymbolTag(
        hops=tuple(sorted(hop.items())), potential=potential, shift=(0,) * dim
    )
    return LatticeKernel(
        dim=dim,
        bandwidth=bandwidth,
        kernel=kernel,
        bound=bound,
        symbol_tag=tag,
        selfadjoint=selfadjoint,
    )


def wall_operator(hops: Mapping, position: int = 0) -> LatticeKernel:
    """Half-line operator (d = 1): hopping on {x >= position}, dead elsewhere.

    Models the hard-wall localization: the operator acts on the half-lattice
    with a Dirichlet condition, and by convention its resolvent is extended by
    zero to the dead side.
    """
    hop = {as_point(m, 1): complex(c) for m, c in hops.items()}
    bandwidth = max((inf_norm(m) for m in hop), default=0)
    sym = all(
        tuple(-a for a in m) in hop and abs(hop[tuple(-a for a in m)] - c.conjugate()) < 1e-14
        for m, c in hop.items()
    )

    def kernel(x: Point, y: Point) -> complex:
        if x[0] < position or y[0] < position:
            return 0.0 + 0.0j
        return hop.get((y[0] - x[0],), 0.0 + 0.0j)

    tag = SymbolTag(
        hops=tuple(sorted(hop.items())),
        potential=HalfLineWall(position=position),
        shift=(0,),
    )
    return LatticeKernel(
        dim=1,
        bandwidth=bandwidth,
        kernel=kernel,
        bound=sum(abs(c) for c in hop.values()),
        symbol_tag=tag,
        selfadjoint=sym,
        active=lambda p: p[0] >= position,
    )


def translate(A: LatticeKernel, a) -> LatticeKernel:
    """The translate tau_a(A): kernel (x, y) -> k(x + a, y + a)."""
    a = as_point(a, A.dim)
    base = A.kernel

    def kernel(x: Point, y: Point) -> complex:
        return base(
            tuple(c + o for c, o in zip(x, a)), tuple(c + o for c, o in zip(y, a))
        )

    tag = A.symbol_tag
    if tag is not None:
        tag = replace(tag, shift=tuple(s + o for s, o in zip(tag.shift, a)))
    active = A.active
    if active is not None:
        base_active = active
        active = lambda p: base_active(tuple(c + o for c, o in zip(p, a)))
    return replace(A, kernel=kernel, symbol_tag=tag, active=active)


def adjoint(A: LatticeKernel) -> LatticeKernel:
    base = A.kernel

    def kernel(x: Point, y: Point) -> complex:
        return complex(base(y, x)).conjugate()

    return replace(A, kernel=kernel, symbol_tag=None)


def kernel_matrix(
    A: LatticeKernel, rows: Sequence[Point], cols: Sequence[Point]
) -> np.ndarray:
    """Dense matrix of k(x, y) over explicit row/column point lists.

    Only the band |x - y|_inf <= bandwidth is visited, so the cost is
    O(len(cols) * (2r+1)^d), not O(len(rows) * len(cols)).
    """
    index = {p: i for i, p in enumerate(rows)}
    M = np.zeros((len(rows), len(cols)), dtype=complex)
    offs = band_offsets(A.dim, A.bandwidth)
    k = A.kernel
    for j, y in enumerate(cols):
        for off in offs:
            x = tuple(c + o for c, o in zip(y, off))
            i = index.get(x)
            if i is not None:
                M[i, j] = k(x, y)
    return M


def compress(A: LatticeKernel, w: Window, cap: int | None = None) -> np.ndarray:
    """Square dense compression of A to the window's points (lexicographic)."""
    n = w.size
    cap = DENSE_CAP if cap is None else cap
    if n > cap:
        raise DenseCapError(needed=n, cap=cap)
    pts = w.points()
    return kernel_matrix(A, pts, pts)


def band_mollify(A: LatticeKernel, eps: float) -> LatticeKernel:
    """Reduce bandwidth by the triangular (Fejer-type) mask w(eps * |x - y|_inf).

    w(t) = max(0, 1 - |t|) is positive definite, so on any window the masked
    operator's norm never exceeds the original's.  The new bandwidth is at
    most ceil(1/eps) - 1.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    base = A.kernel

    def kernel(x: Point, y: Point) -> complex:
        t = eps * max(abs(a - b) for a, b in zip(x, y))
        m = 1.0 - t
        if m <= 0.0:
            return 0.0 + 0.0j
        return m * base(x, y)

    new_bw = min(A.bandwidth, max(0, math.ceil(1.0 / eps) - 1))
    return replace(A, kernel=kernel, bandwidth=new_bw, symbol_tag=None)


def window_norm(A: LatticeKernel, w: Window, cap: int | None = None) -> float:
    """Operator norm of the window compression (largest singular value)."""
    return float(np.linalg.norm(compress(A, w, cap=cap), 2))


def compactness_profile(
    A: LatticeKernel, radii: Sequence[int], w: Window
) -> list[float]:
    """max over |x|_inf = R of || A restricted to columns over ball(x, 1) ||.

    A band-dominated operator is compact iff this profile tends to zero.  The
    window must contain every probe ball expanded by the bandwidth.
    """
    need = max(radii) + 1 + A.bandwidth
    hi = (need,) * A.dim
    lo = tuple(-c for c in hi)
    if not (w.contains(hi) and w.contains(lo)):
        raise WindowSizeError(
            f"window too small for radius {max(radii)}; need side >= {2 * need + 1}",
            min_side=2 * need + 1,
        )
    profile = []
    for R in radii:
        best = 0.0
        for x in sphere_points(R, A.dim):
            cols = ball_points(x, 1)
            rows = expand_points(cols, A.bandwidth)
            M = kernel_matrix(A, rows, cols)
            best = max(best, float(np.linalg.norm(M, 2)))
        profile.append(best)
    return profile


def local_distance(A: LatticeKernel, B: LatticeKernel, probe: LocalProbe) -> float:
    """|| (A - B) . diag(weight) || over the probe window (exact column action)."""
    if A.dim != B.dim:
        raise ValueError("dimension mismatch")
    cols = probe.window.points()
    r = max(A.bandwidth, B.bandwidth)
    rows = expand_points(cols, r)
    index = {p: i for i, p in enumerate(rows)}
    M = np.zeros((len(rows), len(cols)), dtype=complex)
    offs = band_offsets(A.dim, r)
    ka, kb = A.kernel, B.kernel
    wts = probe.weights()
    for j, y in enumerate(cols):
        wj = wts[j]
        for off in offs:
            x = tuple(c + o for c, o in zip(y, off))
            i = index.get(x)
            if i is not None:
                d = complex(ka(x, y)) - complex(kb(x, y))
                if d != 0:
                    M[i, j] = d * wj
    return float(np.linalg.norm(M, 2))


def zero_kernel(dim: int) -> LatticeKernel:
    return LatticeKernel(
        dim=dim, bandwidth=0, kernel=lambda x, y: 0.0 + 0.0j, bound=0.0,
        selfadjoint=True,
    )


def identity_kernel(dim: int) -> LatticeKernel:
    return LatticeKernel(
        dim=dim,
        bandwidth=0,
        kernel=lambda x, y: 1.0 + 0.0j if x == y else 0.0 + 0.0j,
        bound=1.0,
        selfadjoint=True,
    )


def shifted(A: LatticeKernel, z: complex) -> LatticeKernel:
    """A - z (subtract z from the diagonal)."""
    base = A.kernel

    def kernel(x: Point, y: Point) -> complex:
        val = complex(base(x, y))
        if x == y:
            val -= z
        return val

    return replace(
        A,
        kernel=kernel,
        bound=A.bound + abs(z),
        selfadjoint=A.selfadjoint and complex(z).imag == 0.0,
        symbol_tag=None,
    )
