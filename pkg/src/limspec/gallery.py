"""Declarative scenarios: config schema, assertion vocabulary, gallery registry.

A scenario is a JSON document describing an operator, a family of direction
sequences, an optional sample grid, and a list of assertions.  ``run_scenario``
executes the pipeline (build -> localizations -> spectra -> assertions) and
returns a :class:`~limspec.report.Report` plus the assertion outcomes.

The gallery is a registry of prebuilt scenarios exercising the main operator
families: two-sided potentials, the perturbed bilateral shift, plateau
potentials, modulated power potentials in all three regimes, separable 2-D
well systems, linear ramps, oscillatory phases, and diverging potentials with
purely discrete spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Optional, Sequence

import numpy as np

from .core_ops import (
    LatticeKernel,
    SymbolTag,
    Window,
    band_mollify,
    build_schrodinger,
    centered_window,
    compress,
    default_probe,
    translate,
)
from .errors import ConfigError
from .limit_ops import (
    DirectionSequence,
    LimitOperator,
    LimitVerdict,
    _cauchy_classify,
    build_limit_operator,
    dedup_limits,
    explicit_sequence,
    modulated_power_sequence,
    numeric_limit,
    plateau_centers,
    plateau_zero_centers,
    ray_independence_gap,
    ray_sequence,
)
from .report import Report, config_digest
from .resolvent_alg import detect_infinity
from .spectra import (
    ComplexGrid,
    RealGrid,
    SpectrumEstimate,
    _bump,
    direct_essential_estimate,
    essential_spectrum_union,
    hausdorff_distance,
    window_spectrum,
)
from .symbols import (
    AffineRamp,
    Constant,
    Decaying,
    ModulatedPower,
    OscillatoryPhase,
    Plateau,
    PotentialSymbol,
    PowerWell,
    RadialDiverging,
    Separable,
    TwoSidedLimits,
)

SCHEMA_VERSION = 1


# ---------------------------------------------------------------------------
# Config validation

def _expect_mapping(obj: Any, path: str) -> Mapping[str, Any]:
    if not isinstance(obj, Mapping):
        raise ConfigError("expected an object", field=path)
    return obj


def _check_keys(obj: Mapping[str, Any], path: str, required: Sequence[str],
                optional: Sequence[str] = ()) -> None:
    for k in required:
        if k not in obj:
            raise ConfigError("missing required field", field=f"{path}.{k}"
                              if path else k)
    allowed = set(required) | set(optional)
    for k in obj:
        if k not in allowed:
            raise ConfigError("unknown field", field=f"{path}.{k}" if path else k)


def _num(obj: Mapping[str, Any], key: str, path: str) -> float:
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError("expected a number", field=f"{path}.{key}")
    if not math.isfinite(float(v)):
        raise ConfigError("must be finite", field=f"{path}.{key}")
    return float(v)


def _cplx(v: Any, path: str) -> complex:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(float(v))
    if (isinstance(v, Sequence) and not isinstance(v, str) and len(v) == 2
            and all(isinstance(c, (int, float)) and not isinstance(c, bool)
                    for c in v)):
        return complex(float(v[0]), float(v[1]))
    raise ConfigError("expected a number or [re, im] pair", field=path)


# ---------------------------------------------------------------------------
# Potential / operator construction from config

def build_potential(spec: Mapping[str, Any], path: str = "operator.potential"
                    ) -> PotentialSymbol:
    spec = _expect_mapping(spec, path)
    if "kind" not in spec:
        raise ConfigError("missing required field", field=f"{path}.kind")
    kind = spec["kind"]
    if kind == "constant":
        _check_keys(spec, path, ("kind",), ("c",))
        return Constant(_cplx(spec.get("c", 0.0), f"{path}.c"))
    if kind == "two_sided":
        _check_keys(spec, path, ("kind", "c_minus", "c_plus"), ("rate",))
        cm = _num(spec, "c_minus", path)
        cp = _num(spec, "c_plus", path)
        rate = _num(spec, "rate", path) if "rate" in spec else 0.05
        mid, half = 0.5 * (cm + cp), 0.5 * (cp - cm)

        def rule(n: int, mid=mid, half=half, rate=rate) -> float:
            return mid + half * math.tanh(rate * n)

        return TwoSidedLimits(
            rule=rule, c_minus=cm, c_plus=cp,
            envelope=lambda r: 2.0 * abs(half) * math.exp(-rate * r),
        )
    if kind == "decaying":
        _check_keys(spec, path, ("kind", "amplitude"), ("scale",))
        amp = _cplx(spec["amplitude"], f"{path}.amplitude")
        scale = _num(spec, "scale", path) if "scale" in spec else 1.0
        if scale <= 0:
            raise ConfigError("must be positive", field=f"{path}.scale")

        def rule(n: int, amp=amp, scale=scale) -> complex:
            return amp / (1.0 + (n / scale) ** 2)

        return Decaying(
            rule=rule,
            envelope=lambda r: abs(amp) / (1.0 + (r / scale) ** 2),
            is_real=(amp.imag == 0.0),
        )
    if kind == "plateau":
        _check_keys(spec, path, ("kind",))
        return Plateau()
    if kind == "modulated_power":
        _check_keys(spec, path, ("kind", "a", "theta", "lam", "mu"), ("omega",))
        return ModulatedPower(
            a=_num(spec, "a", path), theta=_num(spec, "theta", path),
            lam=_num(spec, "lam", path), mu=_num(spec, "mu", path),
            omega_kind=spec.get("omega", "power_dist"),
        )
    if kind == "affine_ramp":
        _check_keys(spec, path, ("kind",), ("slope",))
        slope = _num(spec, "slope", path) if "slope" in spec else 1.0
        return AffineRamp(slope=slope)
    if kind == "log_diverging":
        _check_keys(spec, path, ("kind",))
        return RadialDiverging(rule=math.log1p)
    if kind == "oscillatory_phase":
        _check_keys(spec, path, ("kind",))
        return OscillatoryPhase()
    if kind == "separable":
        _check_keys(spec, path, ("kind", "parts"))
        parts = []
        for i, part in enumerate(spec["parts"]):
            ppath = f"{path}.parts[{i}]"
            part = _expect_mapping(part, ppath)
            _check_keys(part, ppath, ("coords", "potential"))
            coords = tuple(int(c) for c in part["coords"])
            parts.append((coords, build_potential(part["potential"],
                                                  f"{ppath}.potential")))
        return Separable(parts=tuple(parts))
    raise ConfigError(f"unknown potential kind {kind!r}", field=f"{path}.kind")


def _parse_hops(specs: Any, path: str) -> dict:
    if not isinstance(specs, Sequence) or isinstance(specs, str) or not specs:
        raise ConfigError("expected a non-empty list", field=path)
    hops: dict = {}
    for i, h in enumerate(specs):
        hpath = f"{path}[{i}]"
        h = _expect_mapping(h, hpath)
        _check_keys(h, hpath, ("offset", "value"))
        off = tuple(int(c) for c in h["offset"])
        hops[off] = _cplx(h["value"], f"{hpath}.value")
    return hops


def build_operator(spec: Mapping[str, Any], path: str = "operator"
                   ) -> LatticeKernel:
    spec = _expect_mapping(spec, path)
    if "kind" not in spec:
        raise ConfigError("missing required field", field=f"{path}.kind")
    kind = spec["kind"]
    if kind == "schrodinger":
        _check_keys(spec, path, ("kind", "hops", "potential"),
                    ("selfadjoint", "clamp"))
        hops = _parse_hops(spec["hops"], f"{path}.hops")
        pot = build_potential(spec["potential"])
        return build_schrodinger(
            hops, pot,
            selfadjoint=bool(spec.get("selfadjoint", False)),
            clamp=bool(spec.get("clamp", False)),
        )
    if kind == "modulated_shift":
        # one-step shift with a quadratic oscillatory phase, optionally
        # band-mollified: has no localizations at infinity
        _check_keys(spec, path, ("kind",), ("mollify_eps",))
        tau = 2.0 * math.pi

        def kern(x, y) -> complex:
            if x[0] - y[0] != 1:
                return 0.0
            t = (x[0] * x[0]) % tau
            return complex(math.cos(t), math.sin(t))

        A = LatticeKernel(dim=1, bandwidth=1, kernel=kern, bound=1.0,
                          symbol_tag=None, selfadjoint=False)
        eps = spec.get("mollify_eps")
        if eps is not None:
            A = band_mollify(A, _num(spec, "mollify_eps", path))
        return A
    raise ConfigError(f"unknown operator kind {kind!r}", field=f"{path}.kind")


def build_sequence(spec: Mapping[str, Any], A: LatticeKernel, path: str
                   ) -> DirectionSequence:
    spec = _expect_mapping(spec, path)
    if "kind" not in spec:
        raise ConfigError("missing required field", field=f"{path}.kind")
    kind = spec["kind"]
    if kind == "ray":
        _check_keys(spec, path, ("kind", "alpha", "radii"), ("label",))
        return ray_sequence(tuple(float(a) for a in spec["alpha"]),
                            tuple(float(r) for r in spec["radii"]),
                            label=spec.get("label", ""))
    if kind == "explicit":
        _check_keys(spec, path, ("kind", "points"), ("label",))
        pts = [tuple(int(c) for c in p) for p in spec["points"]]
        return explicit_sequence(pts, dim=A.dim, label=spec.get("label", ""))
    if kind == "geometric":
        _check_keys(spec, path, ("kind", "direction", "start", "factor",
                                 "count"), ("label",))
        direction = tuple(int(c) for c in spec["direction"])
        start = _num(spec, "start", path)
        factor = _num(spec, "factor", path)
        count = int(_num(spec, "count", path))
        pts = [tuple(int(round(c * start * factor ** k)) for c in direction)
               for k in range(count)]
        return explicit_sequence(pts, dim=A.dim,
                                 label=spec.get("label", f"geo{direction}"))
    if kind == "plateau_walls":
        _check_keys(spec, path, ("kind",), ("count", "start"))
        return plateau_centers(count=int(spec.get("count", 6)),
                               start=int(spec.get("start", 24)))
    if kind == "plateau_zeros":
        _check_keys(spec, path, ("kind",), ("count", "start"))
        return plateau_zero_centers(count=int(spec.get("count", 6)),
                                    start=int(spec.get("start", 24)))
    if kind == "modulated_target":
        _check_keys(spec, path, ("kind", "target"), ("count", "start"))
        sym = A.symbol_tag.potential if A.symbol_tag is not None else None
        if not isinstance(sym, ModulatedPower):
            raise ConfigError("modulated_target sequences need a "
                              "modulated_power potential", field=f"{path}.kind")
        return modulated_power_sequence(
            sym, target=_num(spec, "target", path),
            count=int(spec.get("count", 8)), start=int(spec.get("start", 2048)),
        )
    raise ConfigError(f"unknown sequence kind {kind!r}", field=f"{path}.kind")


def build_grid(spec: Any, path: str = "grid") -> Optional[RealGrid | ComplexGrid]:
    if spec is None:
        return None
    spec = _expect_mapping(spec, path)
    if "kind" not in spec:
        raise ConfigError("missing required field", field=f"{path}.kind")
    if spec["kind"] == "real":
        _check_keys(spec, path, ("kind", "start", "stop", "step"))
        return RealGrid(_num(spec, "start", path), _num(spec, "stop", path),
                        _num(spec, "step", path))
    if spec["kind"] == "complex":
        _check_keys(spec, path, ("kind", "re", "im", "cell"))
        re = tuple(float(v) for v in spec["re"])
        im = tuple(float(v) for v in spec["im"])
        return ComplexGrid(re[0], re[1], im[0], im[1], _num(spec, "cell", path))
    raise ConfigError(f"unknown grid kind {spec['kind']!r}", field=f"{path}.kind")


@dataclass
class Scenario:
    """A validated scenario configuration."""

    name: str
    config: dict[str, Any]
    operator: LatticeKernel
    sequences: list[DirectionSequence]
    grid: Optional[RealGrid | ComplexGrid]
    windows: tuple[int, ...]
    tolerance: float
    assertions: list[dict[str, Any]]


_TOP_REQUIRED = ("schema", "name", "operator", "sequences")
_TOP_OPTIONAL = ("grid", "windows", "tolerance", "limit_tol", "inf_tol",
                 "assertions")


def parse_scenario(config: Mapping[str, Any]) -> Scenario:
    config = _expect_mapping(config, "")
    _check_keys(config, "", _TOP_REQUIRED, _TOP_OPTIONAL)
    if config["schema"] != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema version {config['schema']!r}",
                          field="schema")
    name = config["name"]
    if not isinstance(name, str) or not name:
        raise ConfigError("expected a non-empty string", field="name")
    A = build_operator(config["operator"])
    seq_specs = config["sequences"]
    if not isinstance(seq_specs, Sequence) or not seq_specs:
        raise ConfigError("expected a non-empty list", field="sequences")
    seqs = [build_sequence(s, A, f"sequences[{i}]")
            for i, s in enumerate(seq_specs)]
    grid = build_grid(config.get("grid"))
    windows = tuple(int(w) for w in config.get("windows", (64, 128)))
    tol = float(config.get("tolerance", 0.05))
    assertions = []
    for i, a in enumerate(config.get("assertions", ())):
        a = _expect_mapping(a, f"assertions[{i}]")
        if "kind" not in a:
            raise ConfigError("missing required field",
                              field=f"assertions[{i}].kind")
        if a["kind"] not in ASSERTION_KINDS:
            raise ConfigError(f"unknown assertion kind {a['kind']!r}",
                              field=f"assertions[{i}].kind")
        assertions.append(dict(a))
    return Scenario(name=name, config=dict(config), operator=A,
                    sequences=seqs, grid=grid, windows=windows,
                    tolerance=tol, assertions=assertions)


# ---------------------------------------------------------------------------
# Assertion vocabulary

@dataclass
class AssertionOutcome:
    kind: str
    ok: bool
    tolerance: float
    observed: Any
    detail: str

    def as_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, "ok": self.ok, "tolerance": self.tolerance,
                "observed": self.observed, "detail": self.detail}


@dataclass
class RunContext:
    scenario: Scenario
    limits: list[LimitOperator]
    raw_limits: list[LimitOperator]
    estimate: Optional[SpectrumEstimate]
    threads: int = 1


def _finite_limits(ctx: RunContext) -> list[LimitOperator]:
    return [l for l in ctx.limits if l.verdict is LimitVerdict.FINITE]


def _assert_limit_count(ctx: RunContext, p: Mapping) -> AssertionOutcome:
    n = len(_finite_limits(ctx))
    want = int(p["expected"])
    return AssertionOutcome("limit_count", n == want, 0.0, n,
                            f"{n} distinct finite localizations (expected {want})")


def _assert_union_intervals(ctx: RunContext, p: Mapping) -> AssertionOutcome:
    tol = float(p["tol"])
    expected = [tuple(map(float, iv)) for iv in p["expected"]]
    est = ctx.estimate
    if est is None or est.kind != "real-intervals":
        return AssertionOutcome("union_intervals", False, tol, None,
                                "no real-interval estimate available")
    d = hausdorff_distance(est, expected)
    return AssertionOutcome(
        "union_intervals", d <= tol, tol, d,
        f"Hausdorff distance {d:.3g} between estimate {list(est.data)} "
        f"and expected {expected}")


def _assert_crosscheck(ctx: RunContext, p: Mapping) -> AssertionOutcome:
    tol = float(p["tol"])
    A = ctx.scenario.operator
    wins = []
    for w in p["windows"]:
        side = int(w["side"])
        center = tuple(int(c) for c in w["center"])
        wins.append(Window(offset=tuple(c - side // 2 for c in center),
                           side=side))
    eta = float(p.get("eta", 0.1))
    direct = direct_essential_estimate(A, wins, eta=eta, cap=8192)
    d = hausdorff_distance(ctx.estimate, direct)
    return AssertionOutcome(
        "crosscheck_hausdorff", d <= tol, tol, d,
        f"union vs direct window estimate: Hausdorff {d:.3g} "
        f"(direct intervals {list(direct.data)})")


def _assert_circle_cover(ctx: RunContext, p: Mapping) -> AssertionOutcome:
    cover_tol = float(p.get("cover_tol", 0.05))
    exclusion = float(p.get("exclusion", 0.2))
    radius = float(p.get("radius", 1.0))
    est = ctx.estimate
    if est is None or est.kind != "complex-grid-cells":
        return AssertionOutcome("circle_cover", False, cover_tol, None,
                                "no complex-cell estimate available")
    cells = np.asarray(est.data, dtype=complex)
    if cells.size == 0:
        return AssertionOutcome("circle_cover", False, cover_tol, None,
                                "estimate is empty")
    angles = np.linspace(0.0, 2.0 * np.pi, 720, endpoint=False)
    circle = radius * np.exp(1j * angles)
    cover = float(np.max(np.min(np.abs(circle[:, None] - cells[None, :]),
                                axis=1)))
    stray = float(np.max(np.abs(np.abs(cells) - radius)))
    ok = cover <= cover_tol and stray < exclusion
    return AssertionOutcome(
        "circle_cover", ok, cover_tol, cover,
        f"circle covered within {cover:.3g}; member cells stay within "
        f"{stray:.3g} of |lambda| = {radius} (exclusion band {exclusion})")


def _assert_window_eigs_small(ctx: RunContext, p: Mapping) -> AssertionOutcome:
    tol = float(p["tol"])
    side = int(p["side"])
    A = ctx.scenario.operator
    off = tuple(int(c) for c in p.get("offset", (0,) * A.dim))
    M = compress(A, Window(offset=off, side=side), cap=8192)
    _bump()
    eigs = np.linalg.eigvals(M)
    worst = float(np.max(np.abs(eigs)))
    return AssertionOutcome(
        "window_eigs_small", worst <= tol, tol, worst,
        f"all {eigs.size} finite-window eigenvalues within {worst:.3g} of 0, "
        f"far from the localization spectra")


def plateau_wall_deviation(A: LatticeKernel, n: int, side: int = 41,
                           z: complex = -1.0, buffer: int = 100) -> float:
    """Entrywise gap between the window resolvent of the translate by n^2 and
    the half-line Dirichlet resolvent extended by zero, on a centered window."""
    half = side // 2
    big = centered_window(side + 2 * buffer, dim=1)
    T = translate(A, (n * n,))
    M = compress(T, big, cap=8192) - z * np.eye(side + 2 * buffer)
    _bump()
    R = np.linalg.inv(M)
    pts = big.points()
    idx = [i for i, pt in enumerate(pts) if abs(pt[0]) <= half]
    Rwin = R[np.ix_(idx, idx)]

    # reference: Dirichlet half-line Laplacian resolvent, zero elsewhere
    sub = [pt[0] for pt in pts if abs(pt[0]) <= half]
    act = [q for q in sub if q >= 0]
    L = np.zeros((len(act), len(act)))
    for i, qi in enumerate(act):
        for j, qj in enumerate(act):
            if qi == qj:
                L[i, j] = 2.0
            elif abs(qi - qj) == 1:
                L[i, j] = -1.0
    Rh = np.linalg.inv(L - z * np.eye(len(act)))
    ref = np.zeros((len(sub), len(sub)))
    pos = {q: k for k, q in enumerate(act)}
    for i, qi in enumerate(sub):
        for j, qj in enumerate(sub):
            if qi in pos and qj in pos:
                ref[i, j] = Rh[pos[qi], pos[qj]]
    return float(np.max(np.abs(Rwin - ref)))


def _assert_plateau_wall(ctx: RunContext, p: Mapping) -> AssertionOutcome:
    tol = float(p.get("tol", 1e-3))
    ns = [int(n) for n in p.get("ns", (10, 20, 40))]
    side = int(p.get("side", 41))
    devs = [plateau_wall_deviation(ctx.scenario.operator, n, side=side)
            for n in ns]
    monotone = all(devs[i] > devs[i + 1] for i in range(len(devs) - 1))
    ok = monotone and devs[-1] <= tol
    return AssertionOutcome(
        "plateau_wall", ok, tol, devs,
        f"resolvent deviations {['%.4g' % d for d in devs]} at n = {ns} "
        f"(monotone: {monotone}; final <= {tol}: {devs[-1] <= tol})")


def _assert_grid_member_on(ctx: RunContext, p: Mapping) -> AssertionOutcome:
    lo, hi = (float(v) for v in p["interval"])
    edge = float(p.get("edge", 0.05))
    est = ctx.estimate
    if est is None or est.table is None:
        return AssertionOutcome("grid_member_on", False, edge, None,
                                "no membership table available")
    misses = [r[0] for r in est.table
              if lo + edge <= r[0] <= hi - edge and not r[5]]
    ok = not misses
    detail = (f"membership true on the whole grid of [{lo}, {hi}] minus "
              f"{edge} edge bands" if ok else
              f"{len(misses)} grid points missing, first at {misses[0]:.4g}")
    return AssertionOutcome("grid_member_on", ok, edge, len(misses), detail)


def _assert_well_eigs(ctx: RunContext, p: Mapping) -> AssertionOutcome:
    tol = float(p.get("tol", 1e-2))
    count = int(p.get("count", 3))
    side = int(p.get("side", 81))
    A = ctx.scenario.operator
    wells = [l for l in _finite_limits(ctx) if isinstance(l.symbol, PowerWell)]
    if not wells:
        return AssertionOutcome("well_eigs", False, tol, None,
                                "no power-well localization found")
    lim = wells[0]
    w = centered_window(side, dim=A.dim)
    ref = np.sort(window_spectrum(lim.operator, w, cap=8192))[:count]
    worst = 0.0
    pts = lim.provenance.pts[-3:]
    for x in pts:
        eigs = np.sort(window_spectrum(translate(A, x), w, cap=8192))[:count]
        worst = max(worst, float(np.max(np.abs(eigs - ref))))
    return AssertionOutcome(
        "well_eigs", worst <= tol, tol, worst,
        f"lowest {count} eigenvalues of translated windows at offsets "
        f"{[x[0] for x in pts]} match the limit well operator's "
        f"{[f'{v:.4f}' for v in ref]} within {worst:.3g}")


def _assert_all_infinity(ctx: RunContext, p: Mapping) -> AssertionOutcome:
    bad = [l.provenance.label or str(l.provenance.pts[-1])
           for l in ctx.raw_limits if l.verdict is not LimitVerdict.INFINITY]
    ok = not bad
    return AssertionOutcome(
        "all_infinity", ok, 0.0, len(bad),
        "every sampled localization diverges" if ok else
        f"non-divergent localizations along: {bad}")


def _assert_detect_infinity(ctx: RunContext, p: Mapping) -> AssertionOutcome:
    tol = float(p.get("tol", 0.1))
    details = []
    ok = True
    for l in ctx.raw_limits:
        norms = l.resolvent_norms
        fired = detect_infinity(norms, tol=tol)
        # first offset beyond which every window resolvent norm stays <= tol
        pts = l.provenance.pts
        offset = None
        for i in range(len(norms)):
            if all(v <= tol for v in norms[i:]):
                offset = pts[i]
                break
        ok = ok and fired and offset is not None
        lbl = l.provenance.label or str(pts[-1])
        details.append(f"{lbl}: fired={fired}, norms<= {tol} beyond "
                       f"{offset}, tail={tuple(round(v, 4) for v in norms[-3:])}")
    return AssertionOutcome("detect_infinity", ok, tol, None, "; ".join(details))


def _assert_empty_spectrum(ctx: RunContext, p: Mapping) -> AssertionOutcome:
    est = ctx.estimate
    if est is None:
        return AssertionOutcome("empty_spectrum", False, 0.0, None,
                                "no estimate computed")
    ok = len(est.data) == 0
    return AssertionOutcome(
        "empty_spectrum", ok, 0.0, len(est.data),
        "essential-spectrum estimate is empty" if ok else
        f"estimate unexpectedly non-empty: {list(est.data)[:4]}")


def _assert_no_spectrum_claim(ctx: RunContext, p: Mapping) -> AssertionOutcome:
    ok = ctx.estimate is None
    return AssertionOutcome(
        "no_spectrum_claim", ok, 0.0, None,
        "no essential-spectrum estimate emitted (divergence demonstration "
        "only)" if ok else "an estimate was emitted but none was expected")


def _assert_no_limit(ctx: RunContext, p: Mapping) -> AssertionOutcome:
    tol = float(p.get("tol", 1e-3))
    ok = True
    details = []
    for l in ctx.raw_limits:
        _, persistent = _cauchy_classify(l.certificate, tol)
        good = l.verdict is LimitVerdict.NO_LIMIT and persistent
        ok = ok and good
        details.append(
            f"{l.provenance.label or 'seq'}: verdict={l.verdict.name}, "
            f"persistent non-decreasing gaps={persistent}, "
            f"tail={tuple(round(g, 3) for g in l.certificate[-5:])}")
    return AssertionOutcome("no_limit", ok, tol, None, "; ".join(details))


def _assert_eig_count_stable(ctx: RunContext, p: Mapping) -> AssertionOutcome:
    sides = [int(s) for s in p.get("sides", (129, 257))]
    emax = int(p.get("emax", 3))
    A = ctx.scenario.operator
    tables = []
    for s in sides:
        eigs = window_spectrum(A, centered_window(s, dim=A.dim), cap=8192)
        counts = [int(np.sum((eigs >= k) & (eigs < k + 1)))
                  for k in range(emax)]
        tables.append(counts)
    ok = all(t == tables[0] for t in tables)
    return AssertionOutcome(
        "eig_count_stable", ok, 0.0, tables,
        f"eigenvalue counts per unit interval [0,{emax}) across window sides "
        f"{sides}: {tables}" + ("" if ok else " (not stable)"))


def _assert_ray_independence(ctx: RunContext, p: Mapping) -> AssertionOutcome:
    tol = float(p.get("tol", 0.01))
    A = ctx.scenario.operator
    radii = [float(r) for r in p["radii"]]
    worst = 0.0
    n = 0
    for spec in ctx.scenario.config["sequences"]:
        if spec.get("kind") != "ray":
            continue
        gap = ray_independence_gap(A, [float(a) for a in spec["alpha"]], radii)
        worst = max(worst, gap)
        n += 1
    return AssertionOutcome(
        "ray_independence", n > 0 and worst <= tol, tol, worst,
        f"max localization gap under radii doubling over {n} rays: {worst:.3g}")


ASSERTION_KINDS: dict[str, Callable[[RunContext, Mapping], AssertionOutcome]] = {
    "limit_count": _assert_limit_count,
    "union_intervals": _assert_union_intervals,
    "crosscheck_hausdorff": _assert_crosscheck,
    "circle_cover": _assert_circle_cover,
    "window_eigs_small": _assert_window_eigs_small,
    "plateau_wall": _assert_plateau_wall,
    "grid_member_on": _assert_grid_member_on,
    "well_eigs": _assert_well_eigs,
    "all_infinity": _assert_all_infinity,
    "detect_infinity": _assert_detect_infinity,
    "empty_spectrum": _assert_empty_spectrum,
    "no_spectrum_claim": _assert_no_spectrum_claim,
    "no_limit": _assert_no_limit,
    "eig_count_stable": _assert_eig_count_stable,
    "ray_independence": _assert_ray_independence,
}


# ---------------------------------------------------------------------------
# Pipeline

def run_scenario(config: Mapping[str, Any], threads: int = 1,
                 seed: int = 0) -> tuple[Report, list[AssertionOutcome]]:
    """Execute a validated scenario: build, localize, estimate, assert."""
    sc = parse_scenario(config)
    A = sc.operator
    probe = default_probe(A.dim)
    limit_tol = float(sc.config.get("limit_tol", 1e-3))
    inf_tol = float(sc.config.get("inf_tol", 0.1))
    raw = [numeric_limit(A, s, probe=probe, tol=limit_tol, inf_tol=inf_tol)
           for s in sc.sequences]
    deduped = dedup_limits(raw, probe)

    estimate = None
    if sc.grid is not None:
        usable = [l for l in deduped if l.verdict is not LimitVerdict.NO_LIMIT]
        if usable:
            windows = [centered_window(s, dim=A.dim) for s in sc.windows]
            estimate = essential_spectrum_union(
                usable, sc.grid, windows, tol=sc.tolerance, threads=threads)

    ctx = RunContext(scenario=sc, limits=deduped, raw_limits=raw,
                     estimate=estimate, threads=threads)
    outcomes = [ASSERTION_KINDS[a["kind"]](ctx, a) for a in sc.assertions]

    table = ()
    svg_kind, svg_data = "real", ()
    if estimate is not None:
        if estimate.table is not None:
            table = tuple(
                (float(r[0]), float(r[1]), float(r[2]), float(r[3]),
                 (str(r[4]) if r[4] else "-"), bool(r[5]))
                for r in estimate.table)
        if estimate.kind == "complex-grid-cells":
            svg_kind = "complex"
            svg_data = tuple(complex(c) for c in estimate.data)
        else:
            svg_data = tuple(tuple(map(float, iv)) for iv in estimate.data)

    summary = {
        "scenario_hash": config_digest(dict(config)),
        "seed": int(seed),
        "localizations": [
            {
                "label": l.provenance.label or f"seq{i}",
                "verdict": l.verdict.name,
                "reason": l.reason,
                "certificate": list(l.certificate),
                "resolvent_norms": list(l.resolvent_norms),
            }
            for i, l in enumerate(raw)
        ],
        "distinct_finite_limits": len(_finite_limits(ctx)),
        "estimate": (None if estimate is None else {
            "kind": estimate.kind,
            "tolerance": estimate.tolerance,
            "data": [list(iv) if isinstance(iv, tuple) else iv
                     for iv in estimate.data]
            if estimate.kind == "real-intervals"
            else [[c.real, c.imag] for c in estimate.data],
        }),
        "assertions": [o.as_dict() for o in outcomes],
        "passed": all(o.ok for o in outcomes),
    }
    report = Report(name=sc.name, config=dict(config), summary=summary,
                    table=table, svg_kind=svg_kind, svg_data=svg_data)
    return report, outcomes


# ---------------------------------------------------------------------------
# Gallery registry

def _laplacian_hops_1d() -> list[dict]:
    return [{"offset": [1], "value": -1.0}, {"offset": [-1], "value": -1.0},
            {"offset": [0], "value": 2.0}]


def _laplacian_hops_2d() -> list[dict]:
    return [{"offset": [1, 0], "value": -1.0}, {"offset": [-1, 0], "value": -1.0},
            {"offset": [0, 1], "value": -1.0}, {"offset": [0, -1], "value": -1.0},
            {"offset": [0, 0], "value": 4.0}]


def _two_sided_config() -> dict:
    return {
        "schema": 1,
        "name": "two-sided",
        "operator": {
            "kind": "schrodinger",
            "hops": _laplacian_hops_1d(),
            "potential": {"kind": "two_sided", "c_minus": 0.0, "c_plus": 2.0,
                          "rate": 0.05},
            "selfadjoint": True,
        },
        "sequences": [
            {"kind": "geometric", "direction": [1], "start": 256, "factor": 2,
             "count": 8, "label": "plus"},
            {"kind": "geometric", "direction": [-1], "start": 256, "factor": 2,
             "count": 8, "label": "minus"},
        ],
        "grid": {"kind": "real", "start": -1.0, "stop": 7.0, "step": 0.01},
        "windows": [64, 128],
        "tolerance": 0.05,
        "assertions": [
            {"kind": "limit_count", "expected": 2},
            {"kind": "union_intervals", "expected": [[0.0, 6.0]], "tol": 0.05},
            {"kind": "crosscheck_hausdorff", "tol": 0.05, "windows": [
                {"center": [-8192], "side": 257},
                {"center": [8192], "side": 257},
            ]},
        ],
    }


def _shift_circle_config() -> dict:
    return {
        "schema": 1,
        "name": "shift-circle",
        "operator": {
            "kind": "schrodinger",
            "hops": [{"offset": [1], "value": 1.0}],
            "potential": {"kind": "decaying", "amplitude": [0.2, 0.2],
                          "scale": 8.0},
            "selfadjoint": False,
        },
        "sequences": [
            {"kind": "geometric", "direction": [1], "start": 256, "factor": 2,
             "count": 8, "label": "plus"},
            {"kind": "geometric", "direction": [-1], "start": 256, "factor": 2,
             "count": 8, "label": "minus"},
        ],
        "grid": {"kind": "complex", "re": [-1.5, 1.5], "im": [-1.5, 1.5],
                 "cell": 0.05},
        "windows": [48],
        "tolerance": 0.05,
        "assertions": [
            {"kind": "limit_count", "expected": 1},
            {"kind": "circle_cover", "cover_tol": 0.05, "exclusion": 0.2},
            {"kind": "window_eigs_small", "side": 101, "offset": [0],
             "tol": 0.3},
        ],
    }


def _plateau_config() -> dict:
    return {
        "schema": 1,
        "name": "plateau",
        "operator": {
            "kind": "schrodinger",
            "hops": _laplacian_hops_1d(),
            "potential": {"kind": "plateau"},
            "selfadjoint": True,
            "clamp": True,
        },
        "sequences": [
            {"kind": "plateau_walls", "count": 6, "start": 24},
            {"kind": "plateau_zeros", "count": 6, "start": 24},
        ],
        "grid": {"kind": "real", "start": -1.0, "stop": 5.0, "step": 0.01},
        "windows": [64, 128],
        "tolerance": 0.05,
        "assertions": [
            {"kind": "limit_count", "expected": 2},
            {"kind": "union_intervals", "expected": [[0.0, 4.0]], "tol": 0.05},
            {"kind": "plateau_wall", "ns": [10, 20, 40], "side": 41,
             "tol": 1e-3},
        ],
    }


def _three_regime_1_config() -> dict:
    targets = [0.5 * k for k in range(14)]  # 0.0 .. 6.5
    return {
        "schema": 1,
        "name": "three-regime-1",
        "operator": {
            "kind": "schrodinger",
            "hops": _laplacian_hops_1d(),
            "potential": {"kind": "modulated_power", "a": 0.4, "theta": 0.6,
                          "lam": 1.0, "mu": 2.0},
            "selfadjoint": True,
            "clamp": True,
        },
        "sequences": [
            {"kind": "modulated_target", "target": t, "count": 8}
            for t in targets
        ],
        "grid": {"kind": "real", "start": 0.0, "stop": 10.0, "step": 0.01},
        "windows": [64],
        "tolerance": 0.05,
        "limit_tol": 0.05,
        "assertions": [
            {"kind": "grid_member_on", "interval": [0.0, 10.0], "edge": 0.05},
        ],
    }


def _three_regime_2_config() -> dict:
    return {
        "schema": 1,
        "name": "three-regime-2",
        "operator": {
            "kind": "schrodinger",
            "hops": _laplacian_hops_1d(),
            "potential": {"kind": "modulated_power", "a": 1.0, "theta": 0.5,
                          "lam": 1.0, "mu": 2.0},
            "selfadjoint": True,
            "clamp": True,
        },
        "sequences": [
            {"kind": "modulated_target", "target": 0.0, "count": 8,
             "start": 2048},
        ],
        "grid": None,
        "windows": [64],
        "tolerance": 0.05,
        "assertions": [
            {"kind": "well_eigs", "count": 3, "tol": 1e-2, "side": 81},
        ],
    }


def _three_regime_3_config() -> dict:
    return {
        "schema": 1,
        "name": "three-regime-3",
        "operator": {
            "kind": "schrodinger",
            "hops": _laplacian_hops_1d(),
            "potential": {"kind": "modulated_power", "a": 1.2, "theta": 0.6,
                          "lam": 1.0, "mu": 2.0},
            "selfadjoint": True,
            "clamp": True,
        },
        "sequences": [
            {"kind": "geometric", "direction": [1], "start": 10000,
             "factor": 4, "count": 6, "label": "plus"},
            {"kind": "geometric", "direction": [-1], "start": 10000,
             "factor": 4, "count": 6, "label": "minus"},
        ],
        "grid": {"kind": "real", "start": 0.0, "stop": 10.0, "step": 0.05},
        "windows": [64],
        "tolerance": 0.05,
        "assertions": [
            {"kind": "all_infinity"},
            {"kind": "detect_infinity", "tol": 0.1},
            {"kind": "empty_spectrum"},
        ],
    }


def _nbody2d_config() -> dict:
    angles = [k * 2.0 * math.pi / 16 for k in range(16)]
    rays = [
        {"kind": "ray", "alpha": [round(math.cos(t), 6), round(math.sin(t), 6)],
         "radii": [64, 128, 256, 512, 1024, 2048], "label": f"ray{k}"}
        for k, t in enumerate(angles)
    ]
    return {
        "schema": 1,
        "name": "nbody2d",
        "operator": {
            "kind": "schrodinger",
            "hops": _laplacian_hops_2d(),
            "potential": {"kind": "separable", "parts": [
                {"coords": [0], "potential": {"kind": "decaying",
                                              "amplitude": -3.0, "scale": 2.0}},
                {"coords": [1], "potential": {"kind": "decaying",
                                              "amplitude": -3.0, "scale": 2.0}},
            ]},
            "selfadjoint": True,
        },
        "sequences": rays,
        "grid": {"kind": "real", "start": -4.0, "stop": 10.0, "step": 0.01},
        "windows": [64, 128],
        "tolerance": 0.05,
        "assertions": [
            {"kind": "crosscheck_hausdorff", "tol": 0.05, "eta": 0.3,
             "windows": [
                 {"center": [200, 0], "side": 41},
                 {"center": [200, 0], "side": 45},
                 {"center": [200, 0], "side": 51},
                 {"center": [0, 200], "side": 41},
                 {"center": [0, 200], "side": 45},
                 {"center": [0, 200], "side": 51},
                 {"center": [141, 141], "side": 41},
             ]},
            {"kind": "ray_independence", "tol": 0.01,
             "radii": [64, 128, 256, 512, 1024, 2048]},
        ],
    }


def _stark_config() -> dict:
    return {
        "schema": 1,
        "name": "stark-demo",
        "operator": {
            "kind": "schrodinger",
            "hops": _laplacian_hops_1d(),
            "potential": {"kind": "affine_ramp", "slope": 1.0},
            "selfadjoint": True,
            "clamp": True,
        },
        "sequences": [
            {"kind": "geometric", "direction": [1], "start": 40, "factor": 2,
             "count": 6, "label": "plus"},
            {"kind": "geometric", "direction": [-1], "start": 40, "factor": 2,
             "count": 6, "label": "minus"},
        ],
        "grid": None,
        "windows": [64],
        "tolerance": 0.05,
        "assertions": [
            {"kind": "all_infinity"},
            {"kind": "detect_infinity", "tol": 0.1},
            {"kind": "no_spectrum_claim"},
        ],
    }


def _oscillatory_config() -> dict:
    return {
        "schema": 1,
        "name": "oscillatory-demo",
        "operator": {"kind": "modulated_shift", "mollify_eps": 0.4},
        "sequences": [
            {"kind": "geometric", "direction": [1], "start": 26, "factor": 2,
             "count": 8, "label": "dyadic"},
        ],
        "grid": None,
        "windows": [64],
        "tolerance": 0.05,
        "assertions": [
            {"kind": "no_limit", "tol": 1e-3},
            {"kind": "no_spectrum_claim"},
        ],
    }


def _discrete_criterion_config() -> dict:
    return {
        "schema": 1,
        "name": "discrete-criterion",
        "operator": {
            "kind": "schrodinger",
            "hops": _laplacian_hops_1d(),
            "potential": {"kind": "log_diverging"},
            "selfadjoint": True,
            "clamp": True,
        },
        "sequences": [
            {"kind": "geometric", "direction": [1], "start": 10000,
             "factor": 4, "count": 5, "label": "plus"},
            {"kind": "geometric", "direction": [-1], "start": 10000,
             "factor": 4, "count": 5, "label": "minus"},
        ],
        "grid": {"kind": "real", "start": 0.0, "stop": 10.0, "step": 0.05},
        "windows": [64],
        "tolerance": 0.05,
        "assertions": [
            {"kind": "all_infinity"},
            {"kind": "empty_spectrum"},
            {"kind": "eig_count_stable", "sides": [129, 257], "emax": 3},
        ],
    }


GALLERY: dict[str, Callable[[], dict]] = {
    "two-sided": _two_sided_config,
    "shift-circle": _shift_circle_config,
    "plateau": _plateau_config,
    "three-regime-1": _three_regime_1_config,
    "three-regime-2": _three_regime_2_config,
    "three-regime-3": _three_regime_3_config,
    "nbody2d": _nbody2d_config,
    "stark-demo": _stark_config,
    "oscillatory-demo": _oscillatory_config,
    "discrete-criterion": _discrete_criterion_config,
}


def gallery_config(name: str) -> dict:
    if name not in GALLERY:
        raise ConfigError(
            f"unknown gallery scenario {name!r}; available: "
            f"{', '.join(sorted(GALLERY))}", field="name")
    return GALLERY[name]()


def run_gallery(name: str, threads: int = 1,
                seed: int = 0) -> tuple[Report, list[AssertionOutcome]]:
    return run_scenario(gallery_config(name), threads=threads, seed=seed)
