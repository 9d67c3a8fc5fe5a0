"""Pseudo-resolvent families and their associated operators.

A pseudo-resolvent is a family R(z) satisfying the first resolvent identity
R(a) - R(b) = (a - b) R(a) R(b).  Unlike a true resolvent it may have a
nontrivial common kernel N_R; a regular family (sup ||z R(z)|| finite along
an escaping ladder) splits the space as range + kernel and carries a densely
defined operator on the range part.  These are the finite-dimensional model
computations backing the divergence bookkeeping of the limit machinery.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np


@dataclass(frozen=True)
class PseudoResolvent:
    """A matrix-valued pseudo-resolvent family on sample points."""

    sample_points: Tuple[complex, ...]
    eval: Callable[[complex], np.ndarray]
    base_point: complex
    selfadjoint: bool = False

    def __post_init__(self):
        if not self.sample_points:
            raise ValueError("need at least one sample point")
        if self.base_point not in self.sample_points:
            raise ValueError("base point must be among the sample points")


def resolvent_of(H: np.ndarray, sample_points: Sequence[complex]) -> PseudoResolvent:
    """The true resolvent family z -> (H - z)^(-1)."""
    H = np.asarray(H, dtype=complex)
    pts = tuple(complex(z) for z in sample_points)

    def ev(z: complex) -> np.ndarray:
        return np.linalg.inv(H - z * np.eye(H.shape[0]))

    herm = bool(np.allclose(H, H.conj().T, atol=1e-13))
    return PseudoResolvent(
        sample_points=pts, eval=ev, base_point=pts[0], selfadjoint=herm
    )


def degenerate_resolvent(
    H_block: np.ndarray, null_dim: int, sample_points: Sequence[complex]
) -> PseudoResolvent:
    """(H - z)^(-1) on a range block, extended by a zero block of size null_dim."""
    H_block = np.asarray(H_block, dtype=complex)
    pts = tuple(complex(z) for z in sample_points)
    k = H_block.shape[0]

    def ev(z: complex) -> np.ndarray:
        R = np.zeros((k + null_dim, k + null_dim), dtype=complex)
        R[:k, :k] = np.linalg.inv(H_block - z * np.eye(k))
        return R

    herm = bool(np.allclose(H_block, H_block.conj().T, atol=1e-13))
    return PseudoResolvent(
        sample_points=pts, eval=ev, base_point=pts[0], selfadjoint=herm
    )


def check_resolvent_identity(
    R: PseudoResolvent, pairs: Sequence[Tuple[complex, complex]] | None = None
) -> float:
    """Largest Frobenius residual of R(a) - R(b) - (a - b) R(a) R(b)."""
    if pairs is None:
        zs = R.sample_points
        pairs = [(a, b) for i, a in enumerate(zs) for b in zs[i + 1 :]]
    worst = 0.0
    for a, b in pairs:
        Ra, Rb = R.eval(a), R.eval(b)
        res = Ra - Rb - (a - b) * (Ra @ Rb)
        worst = max(worst, float(np.linalg.norm(res)))
    return worst


def extend(R: PseudoResolvent, z: complex, guard: float = 1e-12) -> np.ndarray:
    """Maximal extension R(z) = R(a) (1 - (z - a) R(a))^(-1) from the base point."""
    a = R.base_point
    Ra = R.eval(a)
    F = np.eye(Ra.shape[0]) - (z - a) * Ra
    s = np.linalg.svd(F, compute_uv=False)[-1]
    if s < guard:
        raise np.linalg.LinAlgError(f"z = {z} is outside the extension domain")
    return Ra @ np.linalg.inv(F)


def resolvent_spectrum_map(
    R: PseudoResolvent, zero_tol: float = 1e-12
) -> Tuple[Tuple[complex, ...], int]:
    """Spectrum of the pseudo-resolvent's carrier: eigenvalues w != 0 of R(a)
    map to points a + 1/w; zero eigenvalues count the degenerate directions.

    Returns (spectrum points, number of near-zero eigenvalues of R(a)).
    """
    Ra = R.eval(R.base_point)
    evs = np.linalg.eigvals(Ra)
    scale = max(1.0, float(np.max(np.abs(evs))))
    points = []
    zeros = 0
    for w in evs:
        if abs(w) <= zero_tol * scale:
            zeros += 1
        else:
            points.append(complex(R.base_point + 1.0 / w))
    return tuple(sorted(points, key=lambda z: (z.real, z.imag))), zeros


def is_regular(
    R: PseudoResolvent,
    ladder: Sequence[complex] | None = None,
    growth_tol: float = 0.05,
) -> Tuple[bool, float, Tuple[float, ...]]:
    """Check sup ||z R(z)|| < inf along an escaping ladder (default i * 2^n).

    Returns (regular, sup value, per-rung values); the verdict requires the
    last rung to exceed the previous by no more than the growth tolerance.
    """
    if ladder is None:
        ladder = [1j * 2.0 ** n for n in range(1, 13)]
    vals = []
    for z in ladder:
        Rz = extend(R, z)
        vals.append(float(abs(z) * np.linalg.norm(Rz, 2)))
    sup = max(vals)
    ok = vals[-1] <= vals[-2] * (1.0 + growth_tol) if len(vals) >= 2 else True
    return ok, sup, tuple(vals)


@dataclass(frozen=True)
class AssociatedOperator:
    """The operator carried by a regular pseudo-resolvent.

    kind == "finite": matrix H on the carrier subspace (columns of `carrier`),
    with `null_basis` spanning the common kernel; the original family is
    (H - z)^(-1) on the carrier extended by zero along the kernel.
    kind == "infinity": the family is identically zero (the operator has
    escaped to infinity).
    """

    kind: str
    matrix: Optional[np.ndarray] = None
    carrier: Optional[np.ndarray] = None
    null_basis: Optional[np.ndarray] = None
    reconstruction_error: float = math.nan


def associated_operator(
    R: PseudoResolvent,
    rank_tol: float = 1e-10,
    split_tol: float = 1e-8,
) -> AssociatedOperator:
    """Recover the operator behind a regular pseudo-resolvent at its base point.

    Splits the space into carrier (column span of R(a)) and common kernel,
    verifies the splitting is uniformly injective (smallest singular value of
    the combined basis >= split_tol), and returns H = a + (R(a)|carrier)^(-1).
    """
    a = R.base_point
    Ra = R.eval(a)
    n = Ra.shape[0]
    U, s, Vh = np.linalg.svd(Ra)
    scale = max(1.0, float(s[0])) if s.size else 1.0
    rank = int(np.sum(s > rank_tol * scale))
    if rank == 0:
        return AssociatedOperator(kind="infinity", reconstruction_error=0.0)
    if rank == n:
        H = a * np.eye(n) + np.linalg.inv(Ra)
        rec = float(np.linalg.norm(np.linalg.inv(H - a * np.eye(n)) - Ra))
        return AssociatedOperator(
            kind="finite",
            matrix=H,
            carrier=np.eye(n),
            null_basis=np.zeros((n, 0)),
            reconstruction_error=rec,
        )
    Q = U[:, :rank]  # carrier: orthonormal basis of ran R(a)
    N = Vh[rank:].conj().T  # common kernel: ker R(a)
    combined = np.hstack([Q, N])
    if combined.shape[1] != n:
        raise np.linalg.LinAlgError("carrier and kernel do not fill the space")
    smin = np.linalg.svd(combined, compute_uv=False)[-1]
    if smin < split_tol:
        raise np.linalg.LinAlgError(
            f"carrier/kernel splitting is degenerate (s_min = {smin:.3g}): "
            "the family is not regular"
        )
    C = Q.conj().T @ Ra @ Q  # R(a) restricted to its carrier
    H = a * np.eye(rank) + np.linalg.inv(C)
    # reconstruction: R(a) = (H - a)^(-1) on the carrier, zero along the kernel
    block = np.zeros((n, n), dtype=complex)
    block[:rank, :rank] = np.linalg.inv(H - a * np.eye(rank))
    R_rec = combined @ block @ np.linalg.inv(combined)
    rec = float(np.linalg.norm(R_rec - Ra))
    return AssociatedOperator(
        kind="finite",
        matrix=H,
        carrier=Q,
        null_basis=N,
        reconstruction_error=rec,
    )


def detect_infinity(resolvent_norms: Sequence[float], tol: float = 0.1) -> bool:
    """True iff window resolvent norms along a sequence fall below tol and
    stay there (divergence to infinity of the localized operator)."""
    norms = list(resolvent_norms)
    if len(norms) < 3:
        return False
    tail = norms[-3:]
    return all(v <= tol for v in tail)
