"""CSV/JSON curve files and run manifests."""

from __future__ import annotations

import csv
import io
import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import GodelError

CSV_HEADERS = {
    "cartesian": ("t", "x0", "x1", "x2", "x3"),
    "cylindrical": ("t", "time", "r", "phi", "x3"),
    "kundt": ("t", "time", "x", "y", "z"),
}
FLAG_COLUMN = "flag"
FORMATS = ("csv", "json")


def package_version() -> str:
    from importlib.metadata import PackageNotFoundError, version

    try:
        return version("artifact")
    except PackageNotFoundError:
        return "0+unknown"


def fmt(value: float) -> str:
    """17 significant digits; exact zeros print as 0."""
    value = float(value)
    if value == 0.0:
        return "0"
    return f"{value:.17g}"


@dataclass
class RunManifest:
    command: str
    config: dict
    version: str = field(default_factory=package_version)
    timestamp: str = ""
    seed: int | None = None

    def __post_init__(self):
        if not self.timestamp:
            # SOURCE_DATE_EPOCH pins the stamp so whole files become reproducible
            epoch = os.environ.get("SOURCE_DATE_EPOCH")
            secs = int(epoch) if epoch else int(time.time())
            self.timestamp = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(secs))

    def to_record(self) -> dict:
        return {
            "command": self.command,
            "config": self.config,
            "version": self.version,
            "timestamp": self.timestamp,
            "seed": self.seed,
        }


@dataclass
class CurveData:
    """Rows of a curve file: parameter t and chart coordinates, plus optional flags."""

    chart: str
    times: np.ndarray
    coords: np.ndarray
    flags: list | None = None
    params: dict | None = None
    manifest: dict | None = None


def render_csv(curve: CurveData) -> str:
    header = list(CSV_HEADERS[curve.chart])
    if curve.flags is not None:
        header.append(FLAG_COLUMN)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for i, t in enumerate(curve.times):
        row = [fmt(t)] + [fmt(v) for v in curve.coords[i]]
        if curve.flags is not None:
            row.append(curve.flags[i])
        writer.writerow(row)
    return buf.getvalue()


def render_json(curve: CurveData, manifest: RunManifest) -> str:
    samples = []
    for i, t in enumerate(curve.times):
        s = {"t": float(t), "x": [float(v) for v in curve.coords[i]]}
        if curve.flags is not None:
            s["flag"] = curve.flags[i]
        samples.append(s)
    doc = {"manifest": manifest.to_record(), "chart": curve.chart, "params": curve.params, "samples": samples}
    return json.dumps(doc, indent=1) + "\n"


def write_curve(curve: CurveData, path, fmt_tag: str, manifest: RunManifest) -> list:
    """Write the curve; CSV gets a sidecar ``<path>.manifest.json``.  Returns written paths."""
    path = Path(path)
    if fmt_tag == "csv":
        path.write_text(render_csv(curve))
        side = path.with_name(path.name + ".manifest.json")
        side.write_text(json.dumps({"manifest": manifest.to_record(), "params": curve.params}, indent=1) + "\n")
        return [path, side]
    if fmt_tag == "json":
        path.write_text(render_json(curve, manifest))
        return [path]
    raise GodelError(f"unknown format {fmt_tag!r}; expected one of {FORMATS}")


def _chart_from_header(header) -> str:
    cols = tuple(h.strip() for h in header)
    if cols and cols[-1] == FLAG_COLUMN:
        cols = cols[:-1]
    for chart, expected in CSV_HEADERS.items():
        if cols == expected:
            return chart
    raise GodelError(f"unrecognized CSV header {','.join(cols)!r}")


def read_curve(path) -> CurveData:
    """Read a curve file written by :func:`write_curve` (format from content)."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        try:
            doc = json.loads(text)
            chart = doc.get("chart", "cartesian")
            samples = doc["samples"]
            times = np.array([float(s["t"]) for s in samples])
            coords = np.array([[float(v) for v in s["x"]] for s in samples]).reshape(len(samples), 4)
        except (KeyError, TypeError, ValueError) as exc:
            raise GodelError(f"malformed curve JSON: {exc}") from exc
        if chart not in CSV_HEADERS:
            raise GodelError(f"unknown chart {chart!r}")
        return CurveData(chart, times, coords, params=doc.get("params"), manifest=doc.get("manifest"))
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise GodelError("empty curve file")
    chart = _chart_from_header(rows[0])
    try:
        data = np.array([[float(v) for v in row[:5]] for row in rows[1:] if row], dtype=float).reshape(-1, 5)
    except ValueError as exc:
        raise GodelError(f"malformed CSV row: {exc}") from exc
    return CurveData(chart, data[:, 0], data[:, 1:])


def load_grid_spec(path) -> dict:
    """Parse a JSON grid spec; see :func:`godel.cli.expand_grid` for the schema."""
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise GodelError(f"cannot read grid spec {path}: {exc}") from exc
