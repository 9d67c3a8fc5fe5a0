"""Potential symbol families and certified localizations at infinity."""

import math

import numpy as np
import pytest

from limspec.core_ops import (
    build_schrodinger,
    centered_window,
    compress,
    default_probe,
    local_distance,
)
from limspec.errors import NoLimitDirectionError
from limspec.limit_ops import (
    LimitVerdict,
    dedup_limits,
    directional_limit,
    explicit_sequence,
    modulated_power_sequence,
    numeric_limit,
    plateau_centers,
    plateau_zero_centers,
    ray_independence_gap,
    ray_sequence,
    symbolic_limit,
)
from limspec.symbols import (
    AffineRamp,
    Constant,
    Decaying,
    HalfLineWall,
    ModulatedPower,
    Plateau,
    PowerWell,
    RadialDiverging,
    TwoSidedLimits,
    plateau_value,
)

LAP = {(1,): -1.0, (-1,): -1.0, (0,): 2.0}


def two_sided(cm=0.0, cp=2.0, rate=0.05):
    mid, half = 0.5 * (cm + cp), 0.5 * (cp - cm)
    return TwoSidedLimits(
        rule=lambda n: mid + half * math.tanh(rate * n),
        c_minus=cm, c_plus=cp,
        envelope=lambda r: 2 * abs(half) * math.exp(-rate * r),
    )


def test_plateau_value_structure():
    # height n exactly on the open gap just below n^2, zero elsewhere
    assert plateau_value(99) == 10.0  # inside (90, 100)
    assert plateau_value(91) == 10.0
    assert plateau_value(90) == 0.0
    assert plateau_value(100) == 0.0
    assert plateau_value(-5) == 0.0
    assert plateau_value(2) == 0.0


def test_modulated_power_regimes():
    assert ModulatedPower(a=0.4, theta=0.6, lam=1.0, mu=2.0).regime == -1
    assert ModulatedPower(a=1.0, theta=0.5, lam=1.0, mu=2.0).regime == 0
    assert ModulatedPower(a=1.2, theta=0.6, lam=1.0, mu=2.0).regime == 1
    # vanishes exactly where |x|^theta is an integer
    m = ModulatedPower(a=1.0, theta=0.5, lam=1.0, mu=2.0)
    assert m.value((49,)) == 0.0
    assert m.value((50,)) > 0.0


def test_sequence_invariants():
    with pytest.raises(ValueError):
        explicit_sequence([(8,), (4,)])  # norms must increase
    seq = ray_sequence((1.0, 0.5), [10, 20, 40])
    assert len(seq.pts) == 3
    assert all(p[0] >= 2 * p[1] - 1 for p in seq.pts)


def test_symbolic_limit_two_sided():
    sym = two_sided()
    v, lim, _ = symbolic_limit(sym, explicit_sequence([(2 ** k,) for k in
                                                       range(4, 10)]))
    assert v is LimitVerdict.FINITE and lim == Constant(2.0)
    v, lim, _ = symbolic_limit(sym, explicit_sequence([(-2 ** k,) for k in
                                                       range(4, 10)]))
    assert v is LimitVerdict.FINITE and lim == Constant(0.0)


def test_symbolic_limit_families():
    dec = Decaying(rule=lambda n: 1.0 / (1 + n * n),
                   envelope=lambda r: 1.0 / (1 + r * r))
    seq = explicit_sequence([(2 ** k,) for k in range(4, 9)])
    assert symbolic_limit(dec, seq)[1] == Constant(0.0)
    assert symbolic_limit(AffineRamp(1.0), seq)[0] is LimitVerdict.INFINITY
    assert symbolic_limit(RadialDiverging(rule=math.log1p), seq)[0] \
        is LimitVerdict.INFINITY
    v, lim, _ = symbolic_limit(Plateau(), plateau_centers(5, 20))
    assert v is LimitVerdict.FINITE and isinstance(lim, HalfLineWall)
    v, lim, _ = symbolic_limit(Plateau(), plateau_zero_centers(5, 20))
    assert v is LimitVerdict.FINITE and lim == Constant(0.0)


def test_numeric_limit_two_sided_constants():
    A = build_schrodinger(LAP, two_sided(), selfadjoint=True)
    probe = default_probe(1)
    seq = explicit_sequence([(256 * 2 ** k,) for k in range(7)])
    lim = numeric_limit(A, seq, probe=probe)
    assert lim.verdict is LimitVerdict.FINITE
    assert lim.symbol == Constant(2.0)
    assert lim.agreement is not None and lim.agreement < 1e-3
    # gaps certificate decreasing at the tail
    assert lim.certificate[-1] < 1e-3


def test_numeric_limit_plateau_wall():
    A = build_schrodinger(LAP, Plateau(), selfadjoint=True, clamp=True)
    lim = numeric_limit(A, plateau_centers(6, 24), probe=default_probe(1))
    assert lim.verdict is LimitVerdict.FINITE
    assert isinstance(lim.symbol, HalfLineWall)
    assert lim.operator.active is not None
    lim0 = numeric_limit(A, plateau_zero_centers(6, 24), probe=default_probe(1))
    assert lim0.verdict is LimitVerdict.FINITE
    assert lim0.symbol == Constant(0.0)


def test_numeric_limit_stark_divergence():
    A = build_schrodinger(LAP, AffineRamp(1.0), selfadjoint=True, clamp=True)
    for sign in (1, -1):
        seq = explicit_sequence([(sign * 40 * 2 ** k,) for k in range(6)])
        lim = numeric_limit(A, seq, probe=default_probe(1))
        assert lim.verdict is LimitVerdict.INFINITY
        assert lim.resolvent_norms[-1] < 0.01


def test_modulated_sequence_generic_theta_hits_target():
    sym = ModulatedPower(a=1.0 * 2.0 * (1 - 0.6), theta=0.6, lam=1.0, mu=2.0)
    assert sym.regime == 0
    seq = modulated_power_sequence(sym, target=0.25, count=6)
    achieved = seq.get("achieved")
    assert abs(achieved[-1] - 0.25) < 0.05
    # the sequence is tagged with its construction data
    assert seq.get("target") == 0.25


def test_modulated_sequence_quantized_theta_fails_cleanly():
    # for theta = 1/2 the achievable well offsets on the integer lattice are
    # quantized to half-integers, so generic targets are unreachable
    sym = ModulatedPower(a=1.0, theta=0.5, lam=1.0, mu=2.0)
    with pytest.raises(NoLimitDirectionError):
        modulated_power_sequence(sym, target=0.25, count=6)


def test_modulated_sequence_critical_well_limit():
    sym = ModulatedPower(a=1.0, theta=0.5, lam=1.0, mu=2.0)
    A = build_schrodinger(LAP, sym, selfadjoint=True, clamp=True)
    seq = modulated_power_sequence(sym, target=0.0, count=8)
    lim = numeric_limit(A, seq, probe=default_probe(1))
    assert lim.verdict is LimitVerdict.FINITE
    assert isinstance(lim.symbol, PowerWell)
    # the limit well potential is lam * |theta q + center|^mu
    assert lim.symbol.theta == 0.5 and lim.symbol.mu == 2.0


def test_oscillatory_no_limit_with_certificate():
    from limspec.core_ops import LatticeKernel, band_mollify

    tau = 2 * math.pi

    def kern(x, y):
        if x[0] - y[0] != 1:
            return 0.0
        t = (x[0] * x[0]) % tau
        return complex(math.cos(t), math.sin(t))

    A = band_mollify(LatticeKernel(dim=1, bandwidth=1, kernel=kern, bound=1.0,
                                   symbol_tag=None, selfadjoint=False), 0.4)
    seq = explicit_sequence([(13 * 2 ** k,) for k in range(1, 9)])
    lim = numeric_limit(A, seq, probe=default_probe(1))
    assert lim.verdict is LimitVerdict.NO_LIMIT
    assert "oscillation" in lim.reason
    assert len(lim.certificate) >= 5


def test_ray_independence_free_laplacian():
    A = build_schrodinger(LAP, Constant(0.0), selfadjoint=True)
    gap = ray_independence_gap(A, (1.0,), [16, 32, 64, 128])
    assert gap == 0.0  # translation invariant: all translates equal


def test_dedup_limits_collapses_equal_symbols():
    A = build_schrodinger(LAP, two_sided(), selfadjoint=True)
    probe = default_probe(1)
    seqs = [
        explicit_sequence([(256 * 2 ** k,) for k in range(7)]),
        explicit_sequence([(300 * 2 ** k,) for k in range(7)]),
        explicit_sequence([(-256 * 2 ** k,) for k in range(7)]),
    ]
    limits = [numeric_limit(A, s, probe=probe) for s in seqs]
    kept = dedup_limits(limits, probe)
    assert len(kept) == 2  # c_plus twice, c_minus once


def test_directional_limit_translation_covariant():
    # localizations of a translate agree with those of the original operator
    A = build_schrodinger(LAP, two_sided(), selfadjoint=True)
    from limspec.core_ops import translate

    probe = default_probe(1)
    l1 = directional_limit(A, (1.0,), [256 * 2 ** k for k in range(7)],
                           probe=probe)
    l2 = directional_limit(translate(A, (37,)), (1.0,),
                           [256 * 2 ** k for k in range(7)], probe=probe)
    assert l1.verdict is l2.verdict is LimitVerdict.FINITE
    assert local_distance(l1.operator, l2.operator, probe) < 1e-10
