"""Deterministic run artifacts: canonical JSON, CSV tables, SVG plots, caching.

A run produces a directory with

* ``report.json`` -- canonical, byte-deterministic summary (sorted keys,
  fixed float formatting, no wall-clock data),
* ``run_meta.json`` -- volatile sidecar (timings, host info),
* ``table.csv`` -- per-sample-point membership table,
* ``spectrum.svg`` -- a small hand-rolled plot of the estimate.

Results are cached under ``$LIMSPEC_CACHE`` (default ``~/.cache/limspec``)
keyed by the sha256 of the canonical configuration plus the package version.
A cache hit replays the stored artifacts without any spectral computation.
"""

from __future__ import annotations

import hashlib
import json
import os
import platform
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence

from . import __version__

CSV_COLUMNS = (
    "lambda_re",
    "lambda_im",
    "min_lower_norm",
    "adjoint_min_lower_norm",
    "minimizing_limit_id",
    "in_essential_spectrum",
)


def _canon(value: Any) -> Any:
    """Normalize a value for canonical JSON (floats via repr round-trip)."""
    if isinstance(value, float):
        if value != value:  # NaN
            return "nan"
        return float(repr(float(value)))
    if isinstance(value, complex):
        return {"re": _canon(value.real), "im": _canon(value.imag)}
    if isinstance(value, Mapping):
        return {str(k): _canon(v) for k, v in sorted(value.items())}
    if isinstance(value, (list, tuple)):
        return [_canon(v) for v in value]
    if hasattr(value, "item") and not isinstance(value, (str, bytes)):
        try:
            return _canon(value.item())
        except Exception:
            pass
    return value


def canonical_json(payload: Mapping[str, Any]) -> str:
    """Serialize ``payload`` to a canonical, byte-deterministic JSON string."""
    return json.dumps(_canon(payload), sort_keys=True, indent=2,
                      ensure_ascii=True) + "\n"


def config_digest(config: Mapping[str, Any]) -> str:
    """sha256 of the canonical config plus the package version."""
    blob = canonical_json({"config": config, "version": __version__})
    return hashlib.sha256(blob.encode("ascii")).hexdigest()


@dataclass
class Report:
    """All artifacts of one run, ready to be written to disk."""

    name: str
    config: dict[str, Any]
    summary: dict[str, Any]
    table: tuple[tuple[float, float, float, float, str, bool], ...] = ()
    svg_kind: str = "real"  # "real" intervals or "complex" scatter
    svg_data: tuple = ()
    meta: dict[str, Any] = field(default_factory=dict)

    def payload(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "version": __version__,
            "config": self.config,
            "summary": self.summary,
            "table_rows": len(self.table),
        }

    def json_text(self) -> str:
        return canonical_json(self.payload())

    def csv_text(self) -> str:
        lines = [",".join(CSV_COLUMNS)]
        for row in self.table:
            lre, lim, nu, nu_adj, limit_id, member = row
            lines.append(
                f"{float(lre):.12g},{float(lim):.12g},{float(nu):.12g},"
                f"{float(nu_adj):.12g},{limit_id},{'true' if member else 'false'}"
            )
        return "\n".join(lines) + "\n"

    def svg_text(self) -> str:
        if self.svg_kind == "complex":
            return _svg_scatter(self.svg_data, self.name)
        return _svg_intervals(self.svg_data, self.name)

    def write(self, out_dir: str | Path) -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        _atomic_write(out / "report.json", self.json_text())
        _atomic_write(out / "table.csv", self.csv_text())
        _atomic_write(out / "spectrum.svg", self.svg_text())
        meta = dict(self.meta)
        meta.setdefault("written_at", time.time())
        meta.setdefault("platform", platform.platform())
        _atomic_write(out / "run_meta.json",
                      json.dumps(meta, indent=2, sort_keys=True) + "\n")
        return out


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="ascii") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# SVG plotting (no external dependencies)

_SVG_HEAD = ('<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
             'viewBox="0 0 {w} {h}">\n'
             '<rect width="{w}" height="{h}" fill="white"/>\n')


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _svg_intervals(intervals: Sequence[tuple[float, float]], title: str) -> str:
    w, h = 640, 160
    parts = [_SVG_HEAD.format(w=w, h=h)]
    parts.append(f'<text x="10" y="20" font-size="13" '
                 f'font-family="monospace">{title}</text>\n')
    if intervals:
        lo = min(a for a, _ in intervals)
        hi = max(b for _, b in intervals)
        span = max(hi - lo, 1e-9)
        pad = 0.05 * span
        lo, hi = lo - pad, hi + pad
        span = hi - lo

        def px(x: float) -> float:
            return 30 + (x - lo) / span * (w - 60)

        y = h / 2
        parts.append(f'<line x1="30" y1="{_fmt(y)}" x2="{w - 30}" '
                     f'y2="{_fmt(y)}" stroke="#bbb"/>\n')
        for a, b in intervals:
            parts.append(
                f'<line x1="{_fmt(px(a))}" y1="{_fmt(y)}" x2="{_fmt(px(b))}" '
                f'y2="{_fmt(y)}" stroke="#1f5fbf" stroke-width="8" '
                f'stroke-linecap="round"/>\n')
            for x in (a, b):
                parts.append(f'<text x="{_fmt(px(x) - 10)}" y="{_fmt(y + 26)}" '
                             f'font-size="11" font-family="monospace">'
                             f'{x:.3g}</text>\n')
    else:
        parts.append(f'<text x="30" y="{h // 2}" font-size="12" '
                     f'font-family="monospace">empty spectrum</text>\n')
    parts.append("</svg>\n")
    return "".join(parts)


def _svg_scatter(points: Sequence[complex], title: str) -> str:
    w, h = 480, 480
    parts = [_SVG_HEAD.format(w=w, h=h)]
    parts.append(f'<text x="10" y="20" font-size="13" '
                 f'font-family="monospace">{title}</text>\n')
    if points:
        res = [float(p.real) for p in points]
        ims = [float(p.imag) for p in points]
        lo = min(min(res), min(ims))
        hi = max(max(res), max(ims))
        span = max(hi - lo, 1e-9)
        pad = 0.08 * span
        lo, hi = lo - pad, hi + pad
        span = hi - lo

        def px(x: float) -> float:
            return 30 + (x - lo) / span * (w - 60)

        def py(y: float) -> float:
            return h - 30 - (y - lo) / span * (h - 60)

        parts.append(f'<line x1="{_fmt(px(lo))}" y1="{_fmt(py(0))}" '
                     f'x2="{_fmt(px(hi))}" y2="{_fmt(py(0))}" stroke="#ddd"/>\n')
        parts.append(f'<line x1="{_fmt(px(0))}" y1="{_fmt(py(lo))}" '
                     f'x2="{_fmt(px(0))}" y2="{_fmt(py(hi))}" stroke="#ddd"/>\n')
        for x, y in zip(res, ims):
            parts.append(f'<circle cx="{_fmt(px(x))}" cy="{_fmt(py(y))}" '
                         f'r="2.5" fill="#1f5fbf"/>\n')
    else:
        parts.append(f'<text x="30" y="{h // 2}" font-size="12" '
                     f'font-family="monospace">empty spectrum</text>\n')
    parts.append("</svg>\n")
    return "".join(parts)


# ---------------------------------------------------------------------------
# Cache

def cache_root() -> Path:
    env = os.environ.get("LIMSPEC_CACHE")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "limspec"


def cache_lookup(digest: str) -> dict[str, str] | None:
    """Return the stored artifact texts for ``digest``, or None on a miss."""
    d = cache_root() / digest
    if not (d / "report.json").is_file():
        return None
    out: dict[str, str] = {}
    for name in ("report.json", "table.csv", "spectrum.svg"):
        p = d / name
        if not p.is_file():
            return None
        out[name] = p.read_text(encoding="ascii")
    return out


def cache_store(digest: str, report: Report) -> Path:
    d = cache_root() / digest
    d.mkdir(parents=True, exist_ok=True)
    _atomic_write(d / "report.json", report.json_text())
    _atomic_write(d / "table.csv", report.csv_text())
    _atomic_write(d / "spectrum.svg", report.svg_text())
    return d


def replay_cached(out_dir: str | Path, cached: Mapping[str, str],
                  meta: Mapping[str, Any]) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in cached.items():
        _atomic_write(out / name, text)
    side = dict(meta)
    side["cache_hit"] = True
    side.setdefault("written_at", time.time())
    _atomic_write(out / "run_meta.json",
                  json.dumps(side, indent=2, sort_keys=True) + "\n")
    return out
