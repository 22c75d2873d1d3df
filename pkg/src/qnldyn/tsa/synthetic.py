"""Deterministic benchmark signals with known dynamical character."""

from __future__ import annotations

import numpy as np

from ..series import TimeSeries


def logistic_series(
    n_samples: int, r: float = 4.0, x0: float = 0.34567, transient: int = 1000
) -> TimeSeries:
    """Logistic-map iterates x -> r x (1 - x) after a transient.

    At r = 4 the map is fully chaotic with maximal exponent ln 2, the
    canonical ground truth for divergence-rate estimators.
    """
    total = n_samples + transient
    x = np.empty(total)
    x[0] = x0
    for k in range(total - 1):
        x[k + 1] = r * x[k] * (1.0 - x[k])
    return TimeSeries(
        x[transient:], 1.0, {"system": "logistic", "r": repr(r), "x0": repr(x0)}
    )


def sine_series(
    n_samples: int,
    period: float = 97.31,
    amplitude: float = 1.0,
    phase: float = 0.0,
) -> TimeSeries:
    """Single sinusoid; a non-integer period avoids exact sample repeats."""
    k = np.arange(n_samples)
    vals = amplitude * np.sin(2.0 * np.pi * k / period + phase)
    return TimeSeries(vals, 1.0, {"system": "sine", "period": repr(period)})


def quasiperiodic_series(
    n_samples: int,
    period_a: float = 89.0,
    period_b: float = 144.0 * 0.5 * (np.sqrt(5.0) - 1.0),
    weight_b: float = 0.6,
) -> TimeSeries:
    """Two incommensurate sinusoids; never repeats, never mixes."""
    k = np.arange(n_samples)
    vals = np.sin(2.0 * np.pi * k / period_a) + weight_b * np.sin(
        2.0 * np.pi * k / period_b
    )
    return TimeSeries(
        vals,
        1.0,
        {"system": "quasiperiodic", "period_a": repr(period_a), "period_b": repr(period_b)},
    )
