"""Generators for randomized property checks (shared by CLI suites and tests)."""

from __future__ import annotations

import math

import numpy as np

from .core_ops import LatticeKernel, band_offsets


def random_band_operator(
    rng: np.random.Generator,
    bandwidth: int = 1,
    dim: int = 1,
    norm_bound: float = 2.0,
    selfadjoint: bool = False,
    complex_entries: bool = True,
) -> LatticeKernel:
    """A random band operator with smoothly varying coefficients.

    Each band carries a quasi-periodic coefficient a*cos(w.x + phi) + b, so
    the kernel is defined on all of the lattice and bounded; the row-sum
    bound is scaled to norm_bound.
    """
    offsets = band_offsets(dim, bandwidth)
    coeffs = {}
    for off in offsets:
        amp = rng.uniform(0.2, 1.0)
        base = rng.uniform(-0.5, 0.5)
        freq = tuple(float(f) for f in rng.uniform(0.1, 2.0, size=dim))
        phase = float(rng.uniform(0.0, 2.0 * math.pi))
        if complex_entries:
            rot = complex(np.exp(1j * rng.uniform(0.0, 2.0 * math.pi)))
        else:
            rot = 1.0 + 0.0j
        coeffs[off] = (amp, base, freq, phase, rot)
    row_sum = sum(c[0] + abs(c[1]) for c in coeffs.values())
    scale = norm_bound / row_sum

    def entry(off, x):
        amp, base, freq, phase, rot = coeffs[off]
        t = sum(f * c for f, c in zip(freq, x)) + phase
        return scale * rot * (amp * math.cos(t) + base)

    if selfadjoint:
        def kernel(x, y):
            off = tuple(b - a for a, b in zip(x, y))
            if off not in coeffs:
                return 0.0
            neg = tuple(-c for c in off)
            if off <= neg:  # lexicographic canonical representative
                return entry(off, x)
            return complex(entry(neg, y)).conjugate()
    else:
        def kernel(x, y):
            off = tuple(b - a for a, b in zip(x, y))
            if off not in coeffs:
                return 0.0
            return entry(off, x)

    return LatticeKernel(
        dim=dim,
        bandwidth=bandwidth,
        kernel=kernel,
        bound=norm_bound,
        symbol_tag=None,
        selfadjoint=selfadjoint,
    )
