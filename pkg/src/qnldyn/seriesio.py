"""File formats: series CSV, analysis outputs, recurrence bitmaps.

The series format is one float per line at 17 significant digits,
preceded by `# key=value` header lines carrying the resolved run
metadata (dt included), so a file is reproducible and re-loadable on
its own.  All writes go to a temp file in the target directory and are
renamed into place.
"""

from __future__ import annotations

import os
import tempfile

import numpy as np

from .series import TimeSeries

_FLOAT_FMT = "%.17g"


def _atomic_write(path: str, data: bytes) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _header_lines(metadata: dict) -> list[str]:
    lines = []
    for key, value in metadata.items():
        if isinstance(value, float):
            value = _FLOAT_FMT % value
        lines.append(f"# {key}={value}")
    return lines


def write_series(path: str, series: TimeSeries, metadata: dict | None = None) -> None:
    """Series CSV: metadata header, then one value per line."""
    meta = {"dt": float(series.dt)}
    for key, value in series.origin.items():
        meta.setdefault(str(key), value)
    if metadata:
        meta.update(metadata)
    lines = _header_lines(meta)
    lines.extend(_FLOAT_FMT % v for v in series.values)
    _atomic_write(path, ("\n".join(lines) + "\n").encode())


def read_series(path: str) -> TimeSeries:
    """Parse the series CSV; malformed rows fail with their line number."""
    meta: dict[str, str] = {}
    values: list[float] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, _, value = body.partition("=")
                    meta[key.strip()] = value.strip()
                continue
            try:
                values.append(float(line))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: not a number: {line!r}") from None
    if "dt" not in meta:
        raise ValueError(f"{path}: header lacks the required dt key")
    try:
        dt = float(meta["dt"])
    except ValueError:
        raise ValueError(f"{path}: dt is not a number: {meta['dt']!r}") from None
    if len(values) < 2:
        raise ValueError(f"{path}: fewer than two data rows")
    origin: dict[str, object] = dict(meta)
    return TimeSeries(np.array(values), dt, origin=origin)


def write_f1_histogram(path: str, hist, metadata: dict | None = None) -> None:
    """Return-time histogram CSV: tau (samples), count; fit in the header."""
    times = np.asarray(hist.return_times)
    taus, counts = np.unique(times, return_counts=True)
    meta = {
        "cell_size": float(hist.cell_size),
        "n_returns": int(times.size),
        "mean_tau": float(hist.mean_tau),
        "mu_fit": float(hist.mu_fit),
        "mu_per_time": float(hist.mu_per_time),
        "fit_quality": "" if hist.fit_quality is None else float(hist.fit_quality),
        "quasi_periodic": hist.quasi_periodic,
        "insufficient": hist.insufficient,
        "occupied_bins": int(hist.occupied_bins),
    }
    if metadata:
        meta.update(metadata)
    lines = _header_lines(meta)
    lines.append("# columns=tau,count")
    lines.extend(f"{_FLOAT_FMT % t},{c}" for t, c in zip(taus, counts))
    _atomic_write(path, ("\n".join(lines) + "\n").encode())


def write_recurrence_pairs(path: str, rec, metadata: dict | None = None) -> None:
    """Sparse recurrence pairs (i < j), one `i,j` row per pair."""
    meta = {
        "n_points": int(rec.n_points),
        "epsilon": float(rec.epsilon),
        "window_start": int(rec.window_start),
        "n_pairs": int(rec.n_pairs),
        "recurrence_rate": float(rec.recurrence_rate()),
    }
    if metadata:
        meta.update(metadata)
    lines = _header_lines(meta)
    lines.append("# columns=i,j")
    lines.extend(f"{i},{j}" for i, j in zip(rec.ii, rec.jj))
    _atomic_write(path, ("\n".join(lines) + "\n").encode())


def write_recurrence_bitmap(path: str, rec) -> None:
    """Recurrence plot as a packed-bit PBM (P4), origin at lower-left.

    Row 0 of the file is the top row of the image, so pixel (i, j) of
    the plot (i rightward, j upward) lands at file row n-1-j.
    """
    n = rec.n_points
    dense = rec.to_dense()
    flipped = dense.T[::-1, :]
    packed = np.packbits(flipped, axis=1)
    header = f"P4\n{n} {n}\n".encode()
    _atomic_write(path, header + packed.tobytes())


def write_lyapunov_curve(path: str, curve, metadata: dict | None = None) -> None:
    """Divergence curve CSV: t (time units), S; fit results in header."""
    meta = {
        "epsilon": float(curve.epsilon),
        "m": int(curve.m),
        "delay": int(curve.delay),
        "theiler": int(curve.theiler),
        "dt": float(curve.dt),
        "n_references": int(curve.n_references),
    }
    if curve.lambda_max is not None:
        meta["lambda_max"] = float(curve.lambda_max)
    if curve.fit_window is not None:
        meta["fit_window"] = f"{curve.fit_window[0]}:{curve.fit_window[1]}"
    if metadata:
        meta.update(metadata)
    lines = _header_lines(meta)
    lines.append("# columns=t,S")
    for t, s in zip(curve.t_offsets, curve.s_values):
        lines.append(f"{_FLOAT_FMT % (t * curve.dt)},{_FLOAT_FMT % s}")
    _atomic_write(path, ("\n".join(lines) + "\n").encode())
