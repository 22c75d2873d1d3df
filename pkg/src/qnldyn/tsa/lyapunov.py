"""Maximal Lyapunov exponent from neighborhood divergence curves.

For each reference point, the points of its epsilon-neighborhood (full
embedding-vector distance, Theiler-excluded) are followed forward; the
log of the mean absolute gap in the final scalar coordinate, averaged
over references,

    S(t) = < ln( (1/|U_n|) sum_{n' in U_n} |s_{n+t} - s_{n'+t}| ) >_n,

grows linearly in t at the rate of the maximal exponent before it
saturates at the attractor size.  A least-squares slope over the linear
stretch, per unit time, is the estimate.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.spatial import cKDTree

from ..errors import NeighborhoodError
from ..series import TimeSeries, normalize_series
from .embedding import EmbeddedSeries, autocorr_delay, delay_embed

#: Default embedding dimensions scanned for slope agreement.
SCAN_DIMENSIONS = (3, 4, 5)

#: Default neighborhood radii, as fractions of the (normalized) range.
SCAN_EPSILONS = (0.01, 0.02, 0.04)


@dataclass(frozen=True)
class LyapunovCurve:
    """Divergence curve S(t) with the parameters that produced it."""

    t_offsets: np.ndarray  # sample offsets with a defined average
    s_values: np.ndarray
    epsilon: float
    m: int
    delay: int
    theiler: int
    dt: float
    n_references: int
    lambda_max: float | None = None
    fit_window: tuple[int, int] | None = None

    def __post_init__(self):
        t = np.asarray(self.t_offsets, dtype=np.int64)
        s = np.asarray(self.s_values, dtype=float)
        t.setflags(write=False)
        s.setflags(write=False)
        object.__setattr__(self, "t_offsets", t)
        object.__setattr__(self, "s_values", s)
        if t.size != s.size:
            raise ValueError("t_offsets and s_values must align")


def lyapunov_curve(
    emb: EmbeddedSeries,
    epsilon: float,
    theiler: int,
    t_max: int,
    n_ref: int = 2000,
    max_neighbors: int = 64,
) -> LyapunovCurve:
    """Average log divergence of epsilon-neighborhoods over t_max steps.

    Reference points are taken evenly across the usable range (those with
    t_max future samples).  Oversized neighborhoods are thinned evenly to
    max_neighbors members, which keeps densely recurrent signals cheap
    without biasing the average.  Offsets where no reference kept a
    positive mean gap are dropped; if no reference has any neighbor at
    all, the radius was too small.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if theiler < 0:
        raise ValueError("theiler must be >= 0")
    if t_max < 1:
        raise ValueError("t_max must be >= 1")
    points = emb.points
    track = emb.scalar_track
    usable = len(emb) - t_max
    if usable < 2:
        raise ValueError("t_max leaves fewer than two usable points")
    tree = cKDTree(points[:usable])
    if n_ref >= usable:
        refs = np.arange(usable)
    else:
        refs = np.unique(np.linspace(0, usable - 1, n_ref).astype(np.int64))
    neighbor_lists = tree.query_ball_point(points[refs], epsilon, workers=-1)
    offsets = np.arange(t_max + 1)
    sums = np.zeros(t_max + 1)
    counts = np.zeros(t_max + 1, dtype=np.int64)
    any_neighbor = False
    for ref, raw in zip(refs, neighbor_lists):
        nb = np.asarray(raw, dtype=np.int64)
        nb = nb[np.abs(nb - ref) > theiler]
        if nb.size == 0:
            continue
        any_neighbor = True
        if nb.size > max_neighbors:
            nb.sort()
            pick = np.linspace(0, nb.size - 1, max_neighbors).astype(np.int64)
            nb = nb[np.unique(pick)]
        gaps = np.abs(track[nb[:, None] + offsets] - track[ref + offsets])
        mean_gap = gaps.mean(axis=0)
        ok = mean_gap > 0.0
        sums[ok] += np.log(mean_gap[ok])
        counts[ok] += 1
    if not any_neighbor:
        raise NeighborhoodError(
            f"no neighborhood within epsilon = {epsilon:g}; increase epsilon"
        )
    defined = counts > 0
    return LyapunovCurve(
        t_offsets=offsets[defined],
        s_values=sums[defined] / counts[defined],
        epsilon=epsilon,
        m=emb.m,
        delay=emb.delay,
        theiler=theiler,
        dt=emb.dt,
        n_references=int(refs.size),
    )


def fit_slope(curve: LyapunovCurve, window: tuple[int, int]) -> float:
    """Least-squares slope of S over the index window, per unit time."""
    lo, hi = window
    if hi - lo < 4:
        raise ValueError("fit window must cover at least 4 points")
    t = curve.t_offsets[lo:hi] * curve.dt
    s = curve.s_values[lo:hi]
    if t.size < 4:
        raise ValueError("fit window must cover at least 4 defined points")
    return float(np.polyfit(t, s, 1)[0])


def auto_fit_window(curve: LyapunovCurve, rise_frac: float = 0.75) -> tuple[int, int]:
    """Index window over the initial linear rise of the curve.

    Starts after offset zero (whose average reflects the radius, not the
    dynamics) and ends where the curve has covered rise_frac of the way
    to its saturation level, estimated from the final quarter.
    """
    t = curve.t_offsets
    s = curve.s_values
    if t.size < 6:
        return (0, t.size)
    lo = 1 if t[0] == 0 else 0
    tail = s[-max(4, s.size // 3):]
    level = float(np.median(tail))
    base = float(s[lo])
    rise = level - base
    # A periodic signal produces a level curve that merely wobbles; fitting
    # a flank of the wobble would fake an exponent.  Demand a rise that
    # clears the tail's own peak-to-peak band before trusting one.
    if rise <= float(tail.max() - tail.min()) or rise <= 0.0:
        return (lo, s.size)
    target = base + rise_frac * rise
    above = np.nonzero(s[lo:] >= target)[0]
    hi = lo + int(above[0]) + 1 if above.size else s.size
    hi = min(max(hi, lo + 4), s.size)
    return (lo, hi)


def fitted(curve: LyapunovCurve, window: tuple[int, int] | None = None) -> LyapunovCurve:
    """Attach a slope estimate (and the window used) to the curve."""
    if window is None:
        window = auto_fit_window(curve)
    return replace(curve, lambda_max=fit_slope(curve, window), fit_window=window)


@dataclass(frozen=True)
class LyapunovScan:
    """Curves and fitted slopes across embedding dimensions and radii."""

    curves: tuple[LyapunovCurve, ...]
    lambda_by_m: dict
    lambda_max: float
    spread: float
    delay: int


def lyapunov_scan(
    series: TimeSeries,
    m_values: tuple[int, ...] = SCAN_DIMENSIONS,
    epsilons: tuple[float, ...] = SCAN_EPSILONS,
    delay: int | None = None,
    theiler: int | None = None,
    t_max: int | None = None,
    n_ref: int = 2000,
    max_neighbors: int = 64,
    fit_window: tuple[int, int] | None = None,
) -> LyapunovScan:
    """Full estimation pipeline on a raw series.

    The series is mapped onto [0, 1] (slopes are scale-invariant, radii
    become comparable across systems), embedded at each m with the
    autocorrelation delay, and each (m, epsilon) curve is fitted over its
    linear rise.  Per-dimension estimates are averaged over radii; their
    overall mean and spread (max - min across m) are reported.
    """
    normed = normalize_series(series)
    if delay is None:
        delay = autocorr_delay(normed)
    if t_max is None:
        t_max = min(600, max(30, (len(normed) - 2) // 4))
    results: dict[int, list[float]] = {m: [] for m in m_values}
    curves = []
    failures = []
    for m in m_values:
        emb = delay_embed(normed, m, delay)
        th = theiler if theiler is not None else 2 * delay * m
        for eps in epsilons:
            try:
                curve = lyapunov_curve(
                    emb, eps, th, t_max, n_ref=n_ref, max_neighbors=max_neighbors
                )
            except NeighborhoodError as exc:
                failures.append(str(exc))
                continue
            curve = fitted(curve, fit_window)
            curves.append(curve)
            results[m].append(curve.lambda_max)
    if not curves:
        raise NeighborhoodError(
            "every radius left all neighborhoods empty; increase epsilons "
            f"({'; '.join(failures)})"
        )
    lambda_by_m = {m: float(np.mean(v)) for m, v in results.items() if v}
    values = np.array(list(lambda_by_m.values()))
    return LyapunovScan(
        curves=tuple(curves),
        lambda_by_m=lambda_by_m,
        lambda_max=float(values.mean()),
        spread=float(values.max() - values.min()),
        delay=delay,
    )
