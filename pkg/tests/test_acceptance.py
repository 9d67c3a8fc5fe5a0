"""Acceptance gate: every headline capability, one pass/fail line each.

Each test prints a single `criterion <n> ...: PASS/FAIL` line (visible with
`pytest -s` and in captured output) and then asserts.  Criterion 3 states a
localization accuracy target that the discrete wall construction cannot meet
at n = 40; it is implemented faithfully and allowed to fail.
"""

import math
import time
from functools import lru_cache

import numpy as np
import pytest

from limspec.core_ops import (
    Window,
    band_mollify,
    build_schrodinger,
    centered_window,
    compress,
    window_norm,
)
from limspec.gallery import (
    build_operator,
    gallery_config,
    plateau_wall_deviation,
    run_scenario,
)
from limspec.lower_norm import (
    SupportRegion,
    box_region,
    concentrate_translate,
    nu_local,
    sparsify,
    verify_nuc,
)
from limspec.resolvent_alg import (
    associated_operator,
    check_resolvent_identity,
    extend,
    resolvent_of,
    resolvent_spectrum_map,
)
from limspec.symbols import Constant
from limspec.tests_support import random_band_operator


@lru_cache(maxsize=None)
def scenario(name):
    t0 = time.monotonic()
    report, outcomes = run_scenario(gallery_config(name), threads=1, seed=0)
    return report, outcomes, time.monotonic() - t0


def by_kind(outcomes, kind):
    return [o for o in outcomes if o.kind == kind]


def emit(n, label, ok, detail):
    print(f"criterion {n} ({label}): {'PASS' if ok else 'FAIL'} - {detail}")
    return ok


def test_criterion_01_two_sided_union():
    report, outcomes, elapsed = scenario("two-sided")
    (union,) = by_kind(outcomes, "union_intervals")
    (cross,) = by_kind(outcomes, "crosscheck_hausdorff")
    ok = union.ok and cross.ok and union.tolerance == 0.05 \
        and cross.tolerance == 0.05 and elapsed <= 60.0
    assert emit(1, "two-sided union [0,6] + crosscheck",
                ok, f"{union.detail}; {cross.detail}; {elapsed:.1f}s")


def test_criterion_02_shift_circle_non_normal():
    report, outcomes, elapsed = scenario("shift-circle")
    (cover,) = by_kind(outcomes, "circle_cover")
    (eigs,) = by_kind(outcomes, "window_eigs_small")
    ok = cover.ok and eigs.ok and elapsed <= 120.0
    assert emit(2, "shift-circle coverage, truncation eigenvalues near 0",
                ok, f"{cover.detail}; {eigs.detail}; {elapsed:.1f}s")


def test_criterion_03_plateau_wall_accuracy():
    cfg = gallery_config("plateau")
    A = build_operator(cfg["operator"])
    devs = [plateau_wall_deviation(A, n, side=41) for n in (10, 20, 40)]
    monotone = all(devs[i] > devs[i + 1] for i in range(len(devs) - 1))
    ok = monotone and devs[-1] <= 1e-3
    assert emit(3, "wall resolvent within 1e-3 of Dirichlet half-line at n=40",
                ok, f"deviations {[f'{d:.4g}' for d in devs]}, "
                    f"monotone={monotone}")


def test_criterion_04a_three_regime_membership_grid():
    report, outcomes, _ = scenario("three-regime-1")
    (grid,) = by_kind(outcomes, "grid_member_on")
    assert emit(4, "regime -1: membership true on [0,10] grid", grid.ok,
                grid.detail)


def test_criterion_04b_three_regime_well_eigenvalues():
    report, outcomes, _ = scenario("three-regime-2")
    (eigs,) = by_kind(outcomes, "well_eigs")
    ok = eigs.ok and eigs.tolerance == 1e-2
    assert emit(4, "regime 0: lowest 3 window eigenvalues match limit well",
                ok, eigs.detail)


def test_criterion_04c_three_regime_divergence():
    report, outcomes, _ = scenario("three-regime-3")
    (inf_all,) = by_kind(outcomes, "all_infinity")
    (det,) = by_kind(outcomes, "detect_infinity")
    (empty,) = by_kind(outcomes, "empty_spectrum")
    ok = inf_all.ok and det.ok and empty.ok
    assert emit(4, "regime +1: all localizations infinity, estimate empty",
                ok, f"{inf_all.detail}; {det.detail}; {empty.detail}")


def test_criterion_05_lemma_suite():
    t0 = time.monotonic()
    rng = np.random.default_rng(2024)

    violations, worst_slack = 0, 0.0
    for _ in range(100):
        A = random_band_operator(rng, bandwidth=int(rng.integers(1, 4)),
                                 norm_bound=2.0)
        w = centered_window(41, 1)
        regions = [box_region(w, (int(rng.integers(-12, 8)),), 5)
                   for _ in range(20)]
        rep = verify_nuc(A, eps=0.25, regions=regions, norm_bound=2.0)
        violations += len(rep.violations)
        worst_slack = max(worst_slack, rep.max_slack)

    worst_gap = 0.0
    for _ in range(10):
        A = random_band_operator(rng, bandwidth=1)
        w = centered_window(61, 1)
        res = concentrate_translate(A, [0.5, 0.25], [6.0, 4.0], ambient=w)
        shift = tuple(sum(o[i] for o in res.offsets) for i in range(A.dim))
        fin = Window(offset=(w.offset[0] - shift[0],), side=w.side)
        for radius, val in res.bounds:
            mask = tuple(p for p in fin.interior_points(A.bandwidth)
                         if abs(p[0]) <= radius)
            indep = nu_local(res.translate,
                             SupportRegion(window=fin, mask=mask))
            worst_gap = max(worst_gap, abs(val - indep))

    sparsify_ok = True
    w = centered_window(81, 1)
    for _ in range(200):
        weights = {p: float(rng.random()) for p in w.points()}
        target = float(rng.uniform(0.3, 0.7))
        dec = sparsify(w, weights, gap=int(rng.integers(2, 6)), target=target)
        sparsify_ok = sparsify_ok and dec.kept_fraction >= target - 1e-12

    elapsed = time.monotonic() - t0
    ok = violations == 0 and worst_gap <= 1e-9 and sparsify_ok \
        and elapsed <= 600.0
    assert emit(5, "lower-norm lemmas on random band operators", ok,
                f"{violations} bound violations (max slack {worst_slack:.3g}),"
                f" concentration re-check {worst_gap:.2g},"
                f" sparsify ok={sparsify_ok}, {elapsed:.1f}s")


def test_criterion_06_resolvent_algebra():
    rng = np.random.default_rng(11)
    pts = (2j, 1 + 2j, -1 + 3j, 4j)
    worst = {"identity": 0.0, "map": 0.0, "base": 0.0, "roundtrip": 0.0}
    for k in range(100):
        n = int(rng.integers(3, 13))
        M = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        H = 0.5 * (M + M.conj().T) if k < 50 else M
        R = resolvent_of(H, pts)
        worst["identity"] = max(worst["identity"],
                                check_resolvent_identity(R))
        got, zeros = resolvent_spectrum_map(R)
        want = sorted(np.linalg.eigvals(H), key=lambda z: (z.real, z.imag))
        worst["map"] = max(worst["map"], zeros,
                           max(abs(a - b) for a, b in zip(want, got)))
        tgt = 0.7 + 1.9j
        vals = [extend(resolvent_of(H, (b,) + tuple(p for p in pts
                                                    if p != b)), tgt)
                for b in pts]
        worst["base"] = max(worst["base"],
                            max(float(np.linalg.norm(v - vals[0]))
                                for v in vals[1:]))
        A = associated_operator(R)
        worst["roundtrip"] = max(
            worst["roundtrip"], A.reconstruction_error,
            float(np.linalg.norm(A.matrix - H))
            / max(1.0, float(np.linalg.norm(H))))
    ok = worst["identity"] <= 1e-10 and worst["map"] <= 1e-8 \
        and worst["base"] <= 1e-8 and worst["roundtrip"] <= 1e-9
    assert emit(6, "pseudo-resolvent identities and reconstructions", ok,
                ", ".join(f"{k} {v:.2g}" for k, v in worst.items()))


def test_criterion_07_mollifier():
    rng = np.random.default_rng(31)
    w = centered_window(31, 1)
    contraction_ok = True
    for _ in range(100):
        A = random_band_operator(rng, bandwidth=int(rng.integers(1, 4)))
        eps = float(rng.uniform(0.05, 0.95))
        contraction_ok = contraction_ok and \
            window_norm(band_mollify(A, eps), w) <= window_norm(A, w) + 1e-12

    A3 = random_band_operator(rng, bandwidth=3)
    bandwidth_ok = all(
        band_mollify(A3, eps).bandwidth
        == min(3, math.ceil(1.0 / eps) - 1)
        for eps in (0.9, 0.51, 0.34, 0.26, 0.2, 0.11))

    U = build_schrodinger({(2,): 0.5, (1,): -1.0, (-1,): -1.0, (-2,): 0.5,
                           (0,): 2.0}, Constant(0.0))
    w41 = centered_window(41, 1)
    errs = [float(np.linalg.norm(compress(U, w41)
                                 - compress(band_mollify(U, e), w41), 2))
            for e in (0.45, 0.3, 0.2, 0.1)]
    monotone_ok = all(errs[i] >= errs[i + 1] - 1e-12
                      for i in range(len(errs) - 1)) and errs[-1] < errs[0]

    ok = contraction_ok and bandwidth_ok and monotone_ok
    assert emit(7, "band mollifier contraction/bandwidth/convergence", ok,
                f"contraction={contraction_ok}, bandwidth={bandwidth_ok}, "
                f"errors {[f'{e:.3g}' for e in errs]}")


def test_criterion_08_discrete_spectrum_criterion():
    report, outcomes, _ = scenario("discrete-criterion")
    (inf_all,) = by_kind(outcomes, "all_infinity")
    (empty,) = by_kind(outcomes, "empty_spectrum")
    (counts,) = by_kind(outcomes, "eig_count_stable")
    ok = inf_all.ok and empty.ok and counts.ok
    assert emit(8, "log-diverging potential: purely discrete spectrum", ok,
                f"{inf_all.detail}; {empty.detail}; {counts.detail}")


def test_criterion_09_nbody_directional_limits():
    report, outcomes, elapsed = scenario("nbody2d")
    (cross,) = by_kind(outcomes, "crosscheck_hausdorff")
    rays = by_kind(outcomes, "ray_independence")
    ok = cross.ok and cross.tolerance == 0.05 and rays \
        and all(r.ok for r in rays)
    assert emit(9, "2-D separable wells: union vs brute force + rays", ok,
                f"{cross.detail}; ray gaps ok for {len(rays)} checks; "
                f"{elapsed:.0f}s")


def test_criterion_10_no_limit_diagnostics():
    rep_o, out_o, _ = scenario("oscillatory-demo")
    (nolim,) = by_kind(out_o, "no_limit")
    (claim_o,) = by_kind(out_o, "no_spectrum_claim")
    rep_s, out_s, _ = scenario("stark-demo")
    (inf_all,) = by_kind(out_s, "all_infinity")
    (claim_s,) = by_kind(out_s, "no_spectrum_claim")
    certs = [loc.get("certificate") for loc in
             rep_o.summary["localizations"]]
    cert_ok = all(c and all(g > 1e-3 for g in c[-5:]) for c in certs)
    ok = nolim.ok and claim_o.ok and inf_all.ok and claim_s.ok and cert_ok
    assert emit(10, "oscillatory NoLimit certificate; divergence w/o claim",
                ok, f"{nolim.detail}; {inf_all.detail}; "
                    f"certificates persistent={cert_ok}")
