"""CSV / JSON export of sampled curves, JSON import, and SVG projection.

Floats are written with 17 significant digits so an export/import round
trip is bit-exact. Missing values (excluded stations) are empty CSV cells
or JSON ``null``; stations are never dropped.
"""

import csv
import io
import json
import math
from typing import Optional, Union

import numpy as np

from .curves import SampledCurve
from .mates import MateResult

CSV_HEADER = ["s", "x", "y", "z", "Tx", "Ty", "Tz", "Nx", "Ny", "Nz", "Bx", "By", "Bz",
              "kappa", "tau", "theta"]
PLANES = {"xy": (0, 1), "xz": (0, 2), "yz": (1, 2)}


class _Sink:
    """Context manager yielding a text stream for a path or an open stream."""

    def __init__(self, sink, mode="w"):
        self.sink = sink
        self.mode = mode
        self.fh = None

    def __enter__(self):
        if hasattr(self.sink, "write") or hasattr(self.sink, "read"):
            return self.sink
        self.fh = open(self.sink, self.mode, encoding="utf-8", newline="")
        return self.fh

    def __exit__(self, *exc):
        if self.fh is not None:
            self.fh.close()


def _sampled(data) -> SampledCurve:
    if isinstance(data, MateResult):
        return data.mate
    if isinstance(data, SampledCurve):
        return data
    raise TypeError(f"cannot export {type(data).__name__}")


def fmt(v) -> str:
    """17-significant-digit text, empty for missing values."""
    if v is None:
        return ""
    v = float(v)
    return "" if not math.isfinite(v) else format(v, ".17g")


def _theta(sc: SampledCurve):
    return sc.theta if sc.theta is not None else np.full(len(sc), np.nan)


def export_csv(data, sink) -> None:
    sc = _sampled(data)
    if len(sc) == 0:
        raise ValueError("nothing to export")
    theta = _theta(sc)
    with _Sink(sink) as out:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for i in range(len(sc)):
            row = [sc.s[i], *sc.position[i], *sc.T[i], *sc.N[i], *sc.B[i],
                   sc.kappa[i], sc.tau[i], theta[i]]
            w.writerow([fmt(v) for v in row])


def _json_text(obj) -> str:
    """JSON with every float at 17 significant digits and NaN as null."""
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj) or "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json_text(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, np.ndarray):
        return _json_text(obj.tolist())
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_json_text(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def curve_record(data, extra: Optional[dict] = None) -> dict:
    sc = _sampled(data)
    theta = _theta(sc)
    samples = [
        {"s": sc.s[i], "pos": sc.position[i], "T": sc.T[i], "N": sc.N[i], "B": sc.B[i],
         "kappa": sc.kappa[i], "tau": sc.tau[i], "theta": theta[i]}
        for i in range(len(sc))
    ]
    rec = {"name": sc.name, "theta0": sc.theta0,
           "excluded": [[lo, hi] for lo, hi in sc.excluded], "samples": samples}
    if extra:
        rec.update(extra)
    return rec


def export_json(data, sink, extra: Optional[dict] = None) -> None:
    if len(_sampled(data)) == 0:
        raise ValueError("nothing to export")
    text = _json_text(curve_record(data, extra))
    with _Sink(sink) as out:
        out.write(text + "\n")


def export_sampled(data: Union[SampledCurve, MateResult], format: str, sink,
                   extra: Optional[dict] = None) -> None:
    """Write ``data`` as ``csv`` or ``json`` to a path or text stream.

    ``extra`` adds top-level keys to the JSON object; CSV keeps the fixed
    16-column layout.
    """
    if format == "csv":
        export_csv(data, sink)
    elif format == "json":
        export_json(data, sink, extra)
    else:
        raise ValueError(f"unknown format {format!r}")


def to_text(data, format: str, extra: Optional[dict] = None) -> str:
    buf = io.StringIO()
    export_sampled(data, format, buf, extra)
    return buf.getvalue()


def _num(v):
    return np.nan if v is None else float(v)


def _vec3(v):
    return [np.nan] * 3 if v is None else [_num(x) for x in v]


def import_json(source) -> SampledCurve:
    """Read a curve written by :func:`export_json`.

    Raises ``ValueError`` when the document does not follow the schema.
    """
    with _Sink(source, "r") as fh:
        doc = json.load(fh)
    try:
        rows = doc["samples"]
        s = np.array([_num(r["s"]) for r in rows])
        pos = np.array([_vec3(r["pos"]) for r in rows])
        T = np.array([_vec3(r["T"]) for r in rows])
        N = np.array([_vec3(r["N"]) for r in rows])
        B = np.array([_vec3(r["B"]) for r in rows])
        kappa = np.array([_num(r["kappa"]) for r in rows])
        tau = np.array([_num(r["tau"]) for r in rows])
        theta = np.array([_num(r.get("theta")) for r in rows])
        excluded = [(float(lo), float(hi)) for lo, hi in doc.get("excluded", [])]
        name = str(doc.get("name", "imported"))
        theta0 = doc.get("theta0")
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"curve JSON does not follow the export schema: {exc}") from None
    if s.size == 0:
        raise ValueError("curve JSON has no samples")
    return SampledCurve(
        name, s, pos.reshape(-1, 3), T.reshape(-1, 3), N.reshape(-1, 3), B.reshape(-1, 3),
        kappa, tau, theta0=None if theta0 is None else float(theta0),
        theta=None if np.all(np.isnan(theta)) else theta, excluded=excluded,
    )


def svg_polyline(points, plane: str = "xy", size: float = 600.0, margin: float = 0.05) -> str:
    """Orthographic projection of 3-D points onto a coordinate plane.

    The viewBox fits the projected points plus ``margin`` of their extent;
    the vertical axis is flipped so the second coordinate points up.
    Non-finite points break the polyline.
    """
    if plane not in PLANES:
        raise ValueError(f"plane must be one of {', '.join(PLANES)}")
    i, j = PLANES[plane]
    P = np.asarray(points, dtype=float)
    u, v = P[:, i], -P[:, j]
    ok = np.isfinite(u) & np.isfinite(v)
    if not ok.any():
        raise ValueError("no finite points to draw")
    lo_u, hi_u = u[ok].min(), u[ok].max()
    lo_v, hi_v = v[ok].min(), v[ok].max()
    ext = max(hi_u - lo_u, hi_v - lo_v, 1e-12)
    pad = margin * ext
    box = (lo_u - pad, lo_v - pad, hi_u - lo_u + 2 * pad, hi_v - lo_v + 2 * pad)
    stroke = ext / 300.0
    runs, cur = [], []
    for k in range(P.shape[0]):
        if ok[k]:
            cur.append(f"{fmt(u[k])},{fmt(v[k])}")
        elif cur:
            runs.append(cur)
            cur = []
    if cur:
        runs.append(cur)
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size:g}" height="{size:g}" '
        f'viewBox="{" ".join(fmt(b) for b in box)}">',
    ]
    for run in runs:
        lines.append(f'  <polyline fill="none" stroke="black" stroke-width="{fmt(stroke)}" '
                     f'points="{" ".join(run)}"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def export_svg(data, plane: str, sink, size: float = 600.0) -> None:
    sc = _sampled(data)
    text = svg_polyline(sc.position, plane, size)
    with _Sink(sink) as out:
        out.write(text)
