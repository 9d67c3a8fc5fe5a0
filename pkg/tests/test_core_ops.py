"""Kernels, windows, compressions, translations, and the band mollifier."""

import math

import numpy as np
import pytest

from limspec.core_ops import (
    LatticeKernel,
    Window,
    adjoint,
    band_mollify,
    build_schrodinger,
    centered_window,
    compactness_profile,
    compress,
    default_probe,
    identity_kernel,
    kernel_matrix,
    local_distance,
    translate,
    window_norm,
)
from limspec.errors import (
    DenseCapError,
    NotSelfAdjointError,
    SymbolPolicyError,
    WindowSizeError,
)
from limspec.symbols import AffineRamp, Constant, Decaying
from limspec.tests_support import random_band_operator

LAP = {(1,): -1.0, (-1,): -1.0, (0,): 2.0}


def free_laplacian(dim=1):
    hops = {}
    for i in range(dim):
        e = tuple(1 if j == i else 0 for j in range(dim))
        hops[e] = -1.0
        hops[tuple(-c for c in e)] = -1.0
    hops[(0,) * dim] = 2.0 * dim
    return build_schrodinger(hops, Constant(0.0), selfadjoint=True)


def test_window_points_and_containment():
    w = Window(offset=(-2, -2), side=5)
    pts = w.points()
    assert len(pts) == 25
    assert (0, 0) in pts and (-2, 2) in pts
    assert w.contains((0, 0), shrink=2)
    assert not w.contains((1, 0), shrink=2)
    assert len(w.interior_points(1)) == 9


def test_centered_window_is_symmetric():
    w = centered_window(21, dim=1)
    pts = [p[0] for p in w.points()]
    assert min(pts) == -10 and max(pts) == 10


def test_dirichlet_eigenvalues_oracle():
    # window compression of the free Laplacian has eigenvalues
    # 2 - 2 cos(k pi / (n + 1)), k = 1..n
    A = free_laplacian()
    n = 40
    M = compress(A, centered_window(n, 1))
    eigs = np.sort(np.linalg.eigvalsh(M))
    oracle = np.sort([2.0 - 2.0 * math.cos(k * math.pi / (n + 1))
                      for k in range(1, n + 1)])
    assert np.max(np.abs(eigs - oracle)) < 1e-12


def test_kernel_matrix_matches_compress():
    A = free_laplacian()
    w = centered_window(9, 1)
    pts = w.points()
    assert np.allclose(kernel_matrix(A, pts, pts), compress(A, w))


def test_dense_cap_guard():
    A = free_laplacian(dim=2)
    with pytest.raises(DenseCapError):
        compress(A, centered_window(101, 2))


def test_translate_covariance():
    rng = np.random.default_rng(7)
    A = random_band_operator(rng, bandwidth=2)
    w = centered_window(15, 1)
    a = (13,)
    M_shift = compress(translate(A, a), w)
    shifted_w = Window(offset=(w.offset[0] + a[0],), side=w.side)
    M_direct = compress(A, shifted_w)
    assert np.allclose(M_shift, M_direct)


def test_translate_composes():
    rng = np.random.default_rng(11)
    A = random_band_operator(rng, bandwidth=1)
    w = centered_window(11, 1)
    assert np.allclose(
        compress(translate(translate(A, (3,)), (4,)), w),
        compress(translate(A, (7,)), w),
    )


def test_adjoint_is_conjugate_transpose_on_windows():
    rng = np.random.default_rng(3)
    A = random_band_operator(rng, bandwidth=2)
    w = centered_window(13, 1)
    pts = w.points()
    # interior rows agree with the conjugate transpose (edges differ by band
    # truncation, so compare on the shrunk core)
    M = kernel_matrix(A, pts, pts)
    Madj = kernel_matrix(adjoint(A), pts, pts)
    core = slice(2, 11)
    assert np.allclose(Madj[core, core], M[core, core].conj().T)


def test_selfadjoint_validation():
    with pytest.raises(NotSelfAdjointError):
        build_schrodinger({(1,): -1.0}, Constant(0.0), selfadjoint=True)
    with pytest.raises(NotSelfAdjointError):
        build_schrodinger(LAP, Constant(1.0j), selfadjoint=True)


def test_unbounded_symbol_needs_clamp():
    with pytest.raises(SymbolPolicyError):
        build_schrodinger(LAP, AffineRamp(1.0))
    build_schrodinger(LAP, AffineRamp(1.0), clamp=True)  # ok


def test_mollifier_bandwidth_bound_exact():
    rng = np.random.default_rng(5)
    A = random_band_operator(rng, bandwidth=3)
    for eps, expect in [(0.9, 1), (0.51, 1), (0.34, 2), (0.26, 3), (0.2, 3)]:
        B = band_mollify(A, eps)
        assert B.bandwidth == min(A.bandwidth, math.ceil(1.0 / eps) - 1), eps
        assert B.bandwidth == expect


def test_mollifier_never_grows_norm():
    rng = np.random.default_rng(17)
    w = centered_window(31, 1)
    for _ in range(20):
        A = random_band_operator(rng, bandwidth=int(rng.integers(1, 4)))
        eps = float(rng.uniform(0.05, 0.95))
        assert window_norm(band_mollify(A, eps), w) <= window_norm(A, w) + 1e-12


def test_mollifier_converges_monotonically_on_invariant_symbols():
    # translation-invariant coefficients are uniformly continuous, so the
    # mollification error decreases as eps shrinks
    A = build_schrodinger({(2,): 0.5, (1,): -1.0, (-1,): -1.0, (-2,): 0.5,
                           (0,): 2.0}, Constant(0.0))
    w = centered_window(41, 1)
    errs = []
    for eps in (0.45, 0.3, 0.2, 0.1):
        B = band_mollify(A, eps)
        D = compress(A, w) - compress(B, w)
        errs.append(np.linalg.norm(D, 2))
    assert all(errs[i] >= errs[i + 1] - 1e-12 for i in range(len(errs) - 1))
    assert errs[-1] < errs[0]


def test_compactness_profile_oracles():
    # the identity is not compact: its profile stays at 1
    I = identity_kernel(1)
    w = centered_window(41, 1)
    assert compactness_profile(I, [1, 5, 10], w) == [1.0, 1.0, 1.0]

    # a decaying multiplication operator is compact: profile = max of |v|
    # over the probe balls, which tends to zero
    V = build_schrodinger(
        {(0,): 0.0},
        Decaying(rule=lambda n: 1.0 / (1 + n * n),
                 envelope=lambda r: 1.0 / (1 + r * r)),
    )
    prof = compactness_profile(V, [2, 5, 10], w)
    oracle = [1.0 / (1 + (r - 1) ** 2) for r in (2, 5, 10)]
    assert np.allclose(prof, oracle)
    assert prof[0] > prof[1] > prof[2]


def test_compactness_profile_window_guard():
    A = free_laplacian()
    with pytest.raises(WindowSizeError):
        compactness_profile(A, [30], centered_window(21, 1))


def test_local_distance_zero_on_equal_and_positive_on_different():
    rng = np.random.default_rng(23)
    A = random_band_operator(rng, bandwidth=1)
    B = random_band_operator(rng, bandwidth=1)
    probe = default_probe(1)
    assert local_distance(A, A, probe) == 0.0
    assert local_distance(A, B, probe) > 0.0
    # symmetric up to numerical round-off
    assert math.isclose(local_distance(A, B, probe),
                        local_distance(B, A, probe), rel_tol=1e-9)
