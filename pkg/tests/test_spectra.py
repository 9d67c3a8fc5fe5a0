"""Spectrum estimates: symbol curves, window compressions, union machinery."""

import math

import numpy as np
import pytest

from limspec.core_ops import (
    Window,
    build_schrodinger,
    centered_window,
    default_probe,
    translate,
)
from limspec.limit_ops import (
    LimitVerdict,
    explicit_sequence,
    numeric_limit,
)
from limspec.spectra import (
    RealGrid,
    ComplexGrid,
    direct_essential_estimate,
    essential_spectrum_union,
    fredholm_test,
    hausdorff_distance,
    symbol_spectrum,
    window_spectrum,
)
from limspec.symbols import Constant, TwoSidedLimits

LAP = {(1,): -1.0, (-1,): -1.0, (0,): 2.0}


def floquet_oracle_period2(hop, v0, v1, samples=4096):
    """Direct 2x2 Floquet diagonalization, written independently of the
    library internals: cells (x_0, x_1), hopping only between neighbours."""
    ks = np.linspace(0, 2 * math.pi, samples, endpoint=False)
    evs = []
    for k in ks:
        off = hop * (1 + np.exp(-1j * k))
        H = np.array([[v0, off], [np.conj(off), v1]])
        evs.extend(np.linalg.eigvalsh(H))
    return np.sort(np.array(evs))


def test_symbol_spectrum_free_laplacian_band():
    est = symbol_spectrum({1: -1.0, -1: -1.0, 0: 2.0})
    assert est.kind == "real-intervals"
    assert len(est.data) == 1
    lo, hi = est.data[0]
    assert abs(lo - 0.0) <= 1e-6 and abs(hi - 4.0) <= 1e-6


def test_symbol_spectrum_period2_matches_floquet_oracle():
    est = symbol_spectrum({1: -1.0, -1: -1.0}, v_period=[0.0, 3.0])
    oracle = floquet_oracle_period2(-1.0, 0.0, 3.0)
    # two bands split by the gap around the mean potential
    assert len(est.data) == 2
    lo0, hi0 = est.data[0]
    lo1, hi1 = est.data[1]
    assert abs(lo0 - oracle[0]) <= 1e-3
    assert abs(hi1 - oracle[-1]) <= 1e-3
    # analytic band edges 1.5 +- sqrt(2.25 + |off|^2), |off| in [0, 2]
    assert abs(lo0 - (1.5 - 2.5)) <= 1e-3 and abs(hi0 - 0.0) <= 1e-3
    assert abs(lo1 - 3.0) <= 1e-3 and abs(hi1 - 4.0) <= 1e-3
    # no oracle eigenvalue sits strictly inside the gap
    inner = oracle[(oracle > hi0 + 1e-6) & (oracle < lo1 - 1e-6)]
    assert inner.size == 0


def test_symbol_spectrum_shift_circle():
    est = symbol_spectrum({1: 1.0})
    assert est.kind == "point-list"
    radii = np.abs(np.array(est.data))
    assert float(np.max(np.abs(radii - 1.0))) <= 1e-12


def test_window_spectrum_dirichlet_oracle():
    A = build_schrodinger(LAP, Constant(0.0), selfadjoint=True)
    n = 40
    w = Window(offset=(0,), side=n)
    got = np.sort(window_spectrum(A, w))
    want = np.sort(2.0 - 2.0 * np.cos(np.arange(1, n + 1) * math.pi / (n + 1)))
    assert float(np.max(np.abs(got - want))) <= 1e-12


def two_sided_op():
    mid, half, rate = 1.0, 1.0, 0.05
    sym = TwoSidedLimits(
        rule=lambda n: mid + half * math.tanh(rate * n),
        c_minus=0.0, c_plus=2.0,
        envelope=lambda r: 2.0 * math.exp(-rate * r),
    )
    return build_schrodinger(LAP, sym, selfadjoint=True)


def limits_of(A, starts=(256, -256)):
    probe = default_probe(A.dim)
    out = []
    for s in starts:
        seq = explicit_sequence([(s * 2 ** k,) for k in range(7)])
        lim = numeric_limit(A, seq, probe=probe)
        assert lim.verdict is LimitVerdict.FINITE
        out.append(lim)
    return out


def test_union_free_laplacian_interval():
    A = build_schrodinger(LAP, Constant(0.0), selfadjoint=True)
    lims = limits_of(A, starts=(64,))
    grid = RealGrid(-1.0, 5.0, 0.01)
    est = essential_spectrum_union(lims, grid, [centered_window(64, 1)],
                                   tol=0.05)
    assert len(est.data) == 1
    lo, hi = est.data[0]
    assert abs(lo) <= 0.05 and abs(hi - 4.0) <= 0.05
    # table rows carry the membership flags used for reporting
    members = [r for r in est.table if r[5]]
    assert min(r[0] for r in members) >= -0.05
    assert max(r[0] for r in members) <= 4.05


def test_union_shift_covariance():
    # translating the operator leaves the essential spectrum unchanged
    A = two_sided_op()
    grid = RealGrid(-1.0, 7.0, 0.02)
    W = [centered_window(64, 1)]
    est1 = essential_spectrum_union(limits_of(A), grid, W, tol=0.05)
    est2 = essential_spectrum_union(limits_of(translate(A, (23,))), grid, W,
                                    tol=0.05)
    assert hausdorff_distance(est1, est2) <= 1e-9


def test_union_two_sided_is_union_of_bands():
    A = two_sided_op()
    est = essential_spectrum_union(limits_of(A), RealGrid(-1.0, 7.0, 0.01),
                                   [centered_window(64, 1)], tol=0.05)
    # [0,4] union [2,6] = [0,6]
    assert hausdorff_distance(est, [(0.0, 6.0)]) <= 0.05


def test_direct_estimate_crosschecks_union():
    A = two_sided_op()
    far = [Window(offset=(c - 128,), side=257) for c in (8192, -8192)]
    direct = direct_essential_estimate(A, far)
    assert hausdorff_distance(direct, [(0.0, 6.0)]) <= 0.05


def test_complex_grid_union_covers_circle():
    shift = build_schrodinger({(1,): 1.0}, Constant(0.0), selfadjoint=False)
    lim = numeric_limit(shift, explicit_sequence([(2 ** k,) for k in
                                                  range(4, 10)]),
                        probe=default_probe(1))
    est = essential_spectrum_union([lim],
                                   ComplexGrid(-1.5, 1.5, -1.5, 1.5, 0.05),
                                   [centered_window(48, 1)], tol=0.05)
    assert est.kind == "complex-grid-cells"
    cells = np.array(est.data)
    circle = np.exp(1j * np.linspace(0, 2 * math.pi, 720, endpoint=False))
    cover = max(np.min(np.abs(cells - z)) for z in circle)
    stray = float(np.max(np.abs(np.abs(cells) - 1.0)))
    assert cover <= 0.05 and stray <= 0.1


def test_fredholm_test_two_sided():
    A = two_sided_op()
    lims = limits_of(A)
    W = [centered_window(64, 1)]
    inside = fredholm_test(A, 3.0, lims, W)   # in both bands
    outside = fredholm_test(A, -1.0, lims, W)
    assert not inside.fredholm
    assert outside.fredholm
    assert outside.sup_inverse_norm <= 1.0 / 0.05 + 1e-9
    assert len(outside.per_limit) == 2


def test_hausdorff_basics():
    assert hausdorff_distance([(0.0, 1.0)], [(0.0, 1.0)]) == 0.0
    assert abs(hausdorff_distance([(0.0, 1.0)], [(0.0, 1.5)]) - 0.5) <= 0.01
    assert hausdorff_distance([], []) == 0.0
    assert hausdorff_distance([(0.0, 1.0)], []) == math.inf
