"""Time-series diagnostics: return times, recurrence plots, divergence rates."""

from .embedding import EmbeddedSeries, autocorr_delay, delay_embed
from .lyapunov import (
    LyapunovCurve,
    LyapunovScan,
    auto_fit_window,
    fit_slope,
    lyapunov_curve,
    lyapunov_scan,
)
from .recurrence import (
    RecurrenceData,
    diagonal_line_lengths,
    diagonal_profile,
    diagonal_spacings,
    dominant_peak_count,
    mean_diagonal_length,
    recurrence_plot,
)
from .returns import ReturnTimeHistogram, exponential_fit, return_time_histogram
from .synthetic import logistic_series, quasiperiodic_series, sine_series
