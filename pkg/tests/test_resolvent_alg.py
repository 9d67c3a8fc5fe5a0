"""Pseudo-resolvent families: identity, spectrum map, associated operators."""

import numpy as np
import pytest

from limspec.resolvent_alg import (
    associated_operator,
    check_resolvent_identity,
    degenerate_resolvent,
    detect_infinity,
    extend,
    is_regular,
    resolvent_of,
    resolvent_spectrum_map,
)

PTS = (2j, 1 + 2j, -1 + 3j, 4j)


def random_hermitian(rng, n):
    M = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (M + M.conj().T)


def test_resolvent_identity_true_resolvents():
    rng = np.random.default_rng(0)
    for _ in range(10):
        n = int(rng.integers(3, 10))
        H = random_hermitian(rng, n)
        assert check_resolvent_identity(resolvent_of(H, PTS)) <= 1e-10


def test_resolvent_identity_jordan_block():
    # non-normal carrier: a 4x4 Jordan block still satisfies the identity
    J = np.eye(4, k=1) + 0.5 * np.eye(4)
    assert check_resolvent_identity(resolvent_of(J, PTS)) <= 1e-10


def test_resolvent_identity_degenerate_family():
    rng = np.random.default_rng(1)
    H = random_hermitian(rng, 5)
    R = degenerate_resolvent(H, null_dim=3, sample_points=PTS)
    assert check_resolvent_identity(R) <= 1e-10


def test_spectrum_map_recovers_eigenvalues():
    rng = np.random.default_rng(2)
    H = random_hermitian(rng, 8)
    pts, zeros = resolvent_spectrum_map(resolvent_of(H, PTS))
    assert zeros == 0
    want = sorted(np.linalg.eigvalsh(H))
    got = sorted(p.real for p in pts)
    assert max(abs(a - b) for a, b in zip(want, got)) <= 1e-8
    assert max(abs(p.imag) for p in pts) <= 1e-8


def test_spectrum_map_counts_degenerate_directions():
    rng = np.random.default_rng(3)
    H = random_hermitian(rng, 4)
    pts, zeros = resolvent_spectrum_map(degenerate_resolvent(H, 3, PTS))
    assert zeros == 3 and len(pts) == 4


def test_extension_base_point_independence():
    rng = np.random.default_rng(4)
    H = random_hermitian(rng, 6)
    target = 0.5 + 1.5j
    vals = []
    for base in PTS:
        R = resolvent_of(H, (base,) + tuple(p for p in PTS if p != base))
        vals.append(extend(R, target))
    for V in vals[1:]:
        assert np.linalg.norm(V - vals[0]) <= 1e-8


def test_extension_rejects_spectrum_points():
    H = np.diag([1.0, 2.0, 3.0])
    R = resolvent_of(H, PTS)
    with pytest.raises(np.linalg.LinAlgError):
        extend(R, 2.0)


def test_associated_operator_full_rank_roundtrip():
    rng = np.random.default_rng(5)
    for _ in range(10):
        n = int(rng.integers(3, 12))
        H = random_hermitian(rng, n)
        A = associated_operator(resolvent_of(H, PTS))
        assert A.kind == "finite"
        assert np.linalg.norm(A.matrix - H) <= 1e-9 * max(1, np.linalg.norm(H))
        assert A.reconstruction_error <= 1e-9


def test_associated_operator_degenerate_roundtrip():
    rng = np.random.default_rng(6)
    H = random_hermitian(rng, 5)
    R = degenerate_resolvent(H, null_dim=4, sample_points=PTS)
    A = associated_operator(R)
    assert A.kind == "finite"
    assert A.carrier.shape == (9, 5) and A.null_basis.shape == (9, 4)
    assert A.reconstruction_error <= 1e-9
    # the carried matrix is unitarily equivalent to the original block
    got = sorted(np.linalg.eigvals(A.matrix).real)
    want = sorted(np.linalg.eigvalsh(H))
    assert max(abs(a - b) for a, b in zip(want, got)) <= 1e-9


def test_associated_operator_zero_family_is_infinity():
    R = degenerate_resolvent(np.zeros((0, 0)), null_dim=5, sample_points=PTS)
    A = associated_operator(R)
    assert A.kind == "infinity"


def test_is_regular_ladder():
    rng = np.random.default_rng(7)
    H = random_hermitian(rng, 6)
    ok, sup, vals = is_regular(degenerate_resolvent(H, 2, PTS))
    assert ok
    assert sup < np.inf and len(vals) >= 2
    # ||z (H - z)^{-1}|| -> 1 on the carrier as z escapes along i * 2^n
    assert abs(vals[-1] - 1.0) <= 0.01


def test_detect_infinity():
    assert detect_infinity([2.0, 1.0, 0.08, 0.05, 0.03])
    assert not detect_infinity([2.0, 1.0, 0.5, 0.45, 0.44])
    assert not detect_infinity([0.05, 0.01])  # too short to certify
