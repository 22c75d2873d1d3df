"""Delay-coordinate embedding of scalar series."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..series import TimeSeries


@dataclass(frozen=True)
class EmbeddedSeries:
    """Delay vectors (v_k, v_{k+d}, ..., v_{k+(m-1)d}) stacked as rows."""

    points: np.ndarray
    m: int
    delay: int
    dt: float
    origin: dict

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if pts.shape[1] != self.m:
            raise ValueError("points width must equal m")

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def scalar_track(self) -> np.ndarray:
        """Final coordinate of each vector, used to follow divergence."""
        return self.points[:, -1]


def delay_embed(series: TimeSeries, m: int, delay: int) -> EmbeddedSeries:
    """Embed with dimension m and integer delay d (in samples).

    The number of vectors is len(series) - (m - 1) * d; m = 1 returns the
    raw samples as column vectors.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if delay < 1:
        raise ValueError("delay must be >= 1")
    values = series.values
    count = values.size - (m - 1) * delay
    if count < 2:
        raise ValueError("series too short for this embedding")
    cols = [values[i * delay : i * delay + count] for i in range(m)]
    return EmbeddedSeries(
        np.column_stack(cols), m, delay, series.dt, dict(series.origin)
    )


def autocorr_delay(series: TimeSeries, max_lag: int | None = None) -> int:
    """Delay choice: first minimum of the autocorrelation function.

    Falls back to the first zero crossing when no interior minimum shows
    up within max_lag, and to 1 when neither exists.
    """
    x = series.values - series.values.mean()
    n = x.size
    if max_lag is None:
        max_lag = min(n // 2, 2000)
    if max_lag < 2:
        return 1
    size = int(2 ** np.ceil(np.log2(2 * n)))
    spec = np.fft.rfft(x, size)
    acf = np.fft.irfft(spec * np.conj(spec), size)[: max_lag + 1]
    if acf[0] <= 0:
        return 1
    acf = acf / acf[0]
    for k in range(1, max_lag):
        if acf[k] < acf[k - 1] and acf[k] <= acf[k + 1]:
            return k
    below = np.nonzero(acf[1:] <= 0.0)[0]
    if below.size:
        return int(below[0]) + 1
    return 1
