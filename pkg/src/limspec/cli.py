"""Command-line interface.

Subcommands:

* ``limspec run <config.json>``   -- execute a scenario config
* ``limspec gallery <name>``      -- run a prebuilt scenario
* ``limspec verify <suite>``      -- run a property suite (lemmas, resolvents,
  mollifier)
* ``limspec list``                -- list gallery scenarios and suites

Exit codes: 0 on success, 1 when an embedded assertion or suite check fails,
2 on configuration errors (with the offending field named).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, LimspecError
from .gallery import GALLERY, gallery_config, run_scenario
from .report import (
    cache_lookup,
    cache_store,
    config_digest,
    replay_cached,
)
from .spectra import reset_spectral_ops, spectral_ops_count

SUITES = ("lemmas", "resolvents", "mollifier")


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="limspec",
        description="Essential spectra of band-dominated lattice operators "
                    "via localizations at infinity.",
    )
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=str, default=None,
                        help="directory for report artifacts")
    common.add_argument("--seed", type=int, default=0, help="RNG seed")
    common.add_argument("--threads", type=int, default=1,
                        help="worker threads for the grid sweep")
    common.add_argument("--no-cache", action="store_true",
                        help="bypass the result cache")

    run = sub.add_parser("run", parents=[common],
                         help="run a scenario from a JSON config file")
    run.add_argument("config", type=str)

    gal = sub.add_parser("gallery", parents=[common],
                         help="run a prebuilt gallery scenario")
    gal.add_argument("name", type=str)

    ver = sub.add_parser("verify", parents=[common],
                         help="run a property suite")
    ver.add_argument("suite", type=str, choices=SUITES)

    sub.add_parser("list", help="list gallery scenarios and verify suites")
    return p


def _execute(config: dict, args) -> int:
    digest = config_digest(config)
    t0 = time.monotonic()
    reset_spectral_ops()
    if not args.no_cache:
        cached = cache_lookup(digest)
        if cached is not None:
            payload = json.loads(cached["report.json"])
            passed = bool(payload["summary"]["passed"])
            meta = {
                "scenario_hash": digest,
                "spectral_ops": spectral_ops_count(),
                "elapsed_s": time.monotonic() - t0,
            }
            if args.out:
                replay_cached(args.out, cached, meta)
            print(f"[cache] {payload['name']}: replayed {digest[:12]} "
                  f"({spectral_ops_count()} spectral computations)")
            for a in payload["summary"]["assertions"]:
                _print_assertion(a)
            print("PASS" if passed else "FAIL")
            return 0 if passed else 1
    report, outcomes = run_scenario(config, threads=args.threads,
                                    seed=args.seed)
    report.meta.update({
        "scenario_hash": digest,
        "spectral_ops": spectral_ops_count(),
        "elapsed_s": time.monotonic() - t0,
    })
    if not args.no_cache:
        cache_store(digest, report)
    if args.out:
        report.write(args.out)
    print(f"{report.name}: {len(report.summary['localizations'])} directions, "
          f"{report.summary['distinct_finite_limits']} distinct finite limits, "
          f"{spectral_ops_count()} spectral computations, "
          f"{time.monotonic() - t0:.1f}s")
    est = report.summary["estimate"]
    if est is not None:
        if est["kind"] == "real-intervals":
            print(f"  estimate: {est['data']}")
        else:
            print(f"  estimate: {len(est['data'])} member cells")
    for o in outcomes:
        _print_assertion(o.as_dict())
    passed = all(o.ok for o in outcomes)
    print("PASS" if passed else "FAIL")
    return 0 if passed else 1


def _print_assertion(a: dict) -> None:
    mark = "ok  " if a["ok"] else "FAIL"
    print(f"  [{mark}] {a['kind']} (tol={a['tolerance']}): {a['detail']}")


def _cmd_run(args) -> int:
    path = Path(args.config)
    if not path.is_file():
        print(f"config error: file not found: {path}", file=sys.stderr)
        return 2
    try:
        config = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        print(f"config error: invalid JSON at line {e.lineno}: {e.msg}",
              file=sys.stderr)
        return 2
    return _execute(config, args)


def _cmd_gallery(args) -> int:
    config = gallery_config(args.name)
    return _execute(config, args)


def _cmd_list(args) -> int:
    print("gallery scenarios:")
    for name in sorted(GALLERY):
        print(f"  {name}")
    print("verify suites:")
    for s in SUITES:
        print(f"  {s}")
    return 0


# ---------------------------------------------------------------------------
# Verification suites

def _suite_lemmas(seed: int) -> list[tuple[str, bool, str]]:
    from .core_ops import centered_window
    from .lower_norm import (
        box_region,
        concentrate_translate,
        nu_local,
        sparsify,
        verify_nuc,
    )
    from .tests_support import random_band_operator

    rng = np.random.default_rng(seed)
    checks: list[tuple[str, bool, str]] = []

    worst_slack = 0.0
    violations = 0
    for _ in range(20):
        A = random_band_operator(rng, bandwidth=int(rng.integers(1, 4)))
        w = centered_window(41, 1)
        regions = [box_region(w, (int(rng.integers(-12, 8)),), 5)
                   for _ in range(8)]
        rep = verify_nuc(A, eps=0.25, regions=regions, norm_bound=2.0)
        worst_slack = max(worst_slack, rep.max_slack)
        violations += len(rep.violations)
    checks.append(("localized-lower-norm bound", violations == 0,
                   f"{violations} violations, max slack {worst_slack:.3g}"))

    from .core_ops import Window
    from .lower_norm import SupportRegion

    worst = 0.0
    for _ in range(10):
        A = random_band_operator(rng, bandwidth=1)
        w = centered_window(61, 1)
        res = concentrate_translate(A, [0.5, 0.25], [6.0, 4.0], ambient=w)
        shift = tuple(sum(o[i] for o in res.offsets) for i in range(A.dim))
        fin = Window(offset=tuple(o - s for o, s in zip(w.offset, shift)),
                     side=w.side)
        for radius, val in res.bounds:
            mask = tuple(p for p in fin.interior_points(A.bandwidth)
                         if max(abs(c) for c in p) <= radius)
            indep = nu_local(res.translate, SupportRegion(window=fin, mask=mask))
            worst = max(worst, abs(val - indep))
    checks.append(("concentration bounds re-verified", worst <= 1e-9,
                   f"max discrepancy {worst:.3g}"))

    ok = True
    for _ in range(20):
        w = centered_window(81, 1)
        weights = {p: float(rng.random()) for p in w.points()}
        dec = sparsify(w, weights, gap=int(rng.integers(2, 6)), target=0.5)
        ok = ok and dec.kept_fraction >= 0.5 - 1e-12
    checks.append(("sparsification keeps the target weight fraction", ok,
                   "kept fraction >= target on all draws"))
    return checks


def _suite_resolvents(seed: int) -> list[tuple[str, bool, str]]:
    from .resolvent_alg import (
        associated_operator,
        check_resolvent_identity,
        resolvent_of,
        resolvent_spectrum_map,
    )

    rng = np.random.default_rng(seed)
    worst_id = worst_map = worst_round = 0.0
    for _ in range(25):
        n = int(rng.integers(3, 13))
        M = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        if rng.random() < 0.5:
            M = M + M.conj().T
        pts = tuple(complex(40 + 5 * k, 3) for k in range(4))
        R = resolvent_of(M, pts)
        worst_id = max(worst_id, check_resolvent_identity(R))
        spec, _ = resolvent_spectrum_map(R)
        eigs = np.linalg.eigvals(M)
        d = max(min(abs(s - e) for e in eigs) for s in spec)
        worst_map = max(worst_map, d)
        assoc = associated_operator(R)
        worst_round = max(
            worst_round, float(np.max(np.abs(assoc.matrix - M))))
    return [
        ("resolvent identity residual", worst_id <= 1e-10, f"{worst_id:.3g}"),
        ("spectral mapping round-trip", worst_map <= 1e-8, f"{worst_map:.3g}"),
        ("associated-operator reconstruction", worst_round <= 1e-9,
         f"{worst_round:.3g}"),
    ]


def _suite_mollifier(seed: int) -> list[tuple[str, bool, str]]:
    from .core_ops import band_mollify, centered_window, window_norm
    from .tests_support import random_band_operator

    rng = np.random.default_rng(seed)
    w = centered_window(41, 1)
    contraction_ok = True
    bandwidth_ok = True
    for _ in range(25):
        A = random_band_operator(rng, bandwidth=int(rng.integers(1, 4)))
        eps = float(rng.uniform(0.05, 0.9))
        B = band_mollify(A, eps)
        contraction_ok = contraction_ok and (
            window_norm(B, w) <= window_norm(A, w) + 1e-12)
        bandwidth_ok = bandwidth_ok and (
            B.bandwidth <= min(A.bandwidth, int(np.ceil(1.0 / eps)) - 1))
    return [
        ("mollified window norms never grow", contraction_ok, "25 seeds"),
        ("mollified bandwidth bound", bandwidth_ok,
         "bandwidth <= ceil(1/eps) - 1"),
    ]


def _cmd_verify(args) -> int:
    suites = {"lemmas": _suite_lemmas, "resolvents": _suite_resolvents,
              "mollifier": _suite_mollifier}
    checks = suites[args.suite](args.seed)
    all_ok = True
    for name, ok, detail in checks:
        all_ok = all_ok and ok
        print(f"  [{'ok  ' if ok else 'FAIL'}] {name}: {detail}")
    print("PASS" if all_ok else "FAIL")
    return 0 if all_ok else 1


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "gallery":
            return _cmd_gallery(args)
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "list":
            return _cmd_list(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except LimspecError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
