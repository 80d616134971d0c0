"""
Dolph-Chebyshev window synthesis for the UFMC subband filter.

Odd lengths use the closed time-domain form (n = -M..M); even lengths go
through scipy's frequency-domain construction with its half-sample phase.
Windows are normalized to unit response at f = 0.
"""

import logging
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd
from scipy.signal import find_peaks
from scipy.signal.windows import chebwin

from src.exceptions import ParameterRangeError
from src.waveforms.params import chebyshev_kappa0

logger = logging.getLogger(__name__)


def chebyshev_polynomial(order: int, x) -> np.ndarray:
    """C_n(x): cos(n·acos x) for |x| <= 1, cosh(n·acosh |x|) with sign (-1)^n outside."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    inside = np.abs(x) <= 1.0
    out[inside] = np.cos(order * np.arccos(x[inside]))
    with np.errstate(over="ignore"):
        above = x > 1.0
        out[above] = np.cosh(order * np.arccosh(x[above]))
        below = x < -1.0
        out[below] = (-1.0) ** order * np.cosh(order * np.arccosh(-x[below]))
    return out


def _odd_window(filter_length: int, alpha_db: float) -> np.ndarray:
    m_half = (filter_length - 1) // 2
    kappa0 = chebyshev_kappa0(filter_length, alpha_db)
    ripple = 10.0 ** (-alpha_db / 20.0)
    n = np.arange(-m_half, m_half + 1)
    m = np.arange(1, m_half + 1)
    cheb = chebyshev_polynomial(2 * m_half, kappa0 * np.cos(np.pi * m / filter_length))
    # (M, N) table of cos(2π m n / N)
    harmonics = np.cos(2.0 * np.pi * np.outer(m, n) / filter_length)
    return 1.0 / filter_length + ripple / filter_length * 2.0 * (cheb @ harmonics)


def chebyshev_window(filter_length: int, alpha_db: float) -> np.ndarray:
    """
    Dolph-Chebyshev window with equiripple sidelobes at -alpha_db.

    Args:
        filter_length: number of taps (>= 2).
        alpha_db: sidelobe attenuation in dB (> 0).

    Returns:
        np.ndarray: real, symmetric taps summing to 1.
    """
    if int(filter_length) != filter_length or filter_length < 2:
        raise ParameterRangeError(f"filter_length must be an integer >= 2, got {filter_length!r}")
    if not alpha_db > 0:
        raise ParameterRangeError(f"alpha_db must be > 0, got {alpha_db!r}")
    filter_length = int(filter_length)

    kappa0 = chebyshev_kappa0(filter_length, alpha_db)
    if not np.isfinite(kappa0):
        raise ParameterRangeError(f"Chebyshev parameter overflows for alpha_db={alpha_db}")

    with np.errstate(over="ignore", invalid="ignore"):
        if filter_length % 2:
            window = _odd_window(filter_length, alpha_db)
        else:
            window = chebwin(filter_length, at=alpha_db, sym=True)
        window = window / np.sum(window)

    if not np.all(np.isfinite(window)):
        raise ParameterRangeError(f"Chebyshev window is not finite for alpha_db={alpha_db}")
    return window


def sidelobe_levels_db(window: np.ndarray, oversampling: int = 64) -> np.ndarray:
    """Levels (dB relative to the main-lobe peak) of every sidelobe maximum of |W(f)|."""
    window = np.asarray(window)
    n_fft = int(oversampling) * len(window)
    magnitude = np.abs(np.fft.rfft(window, n_fft))
    magnitude_db = 20.0 * np.log10(np.maximum(magnitude / magnitude[0], 1e-300))

    # The main lobe ends at the first local minimum
    rising = np.nonzero(np.diff(magnitude) > 0)[0]
    if rising.size == 0:
        return np.empty(0)
    main_lobe_end = int(rising[0])
    peaks, _ = find_peaks(magnitude_db[main_lobe_end:])
    return magnitude_db[main_lobe_end + peaks]


def export_window_csv(window: np.ndarray, path: Union[str, Path]) -> Path:
    """Write one coefficient per line with 17 significant digits."""
    path = Path(path)
    pd.DataFrame({"coefficient": np.real(window)}).to_csv(
        path, index=False, header=False, float_format="%.17g", lineterminator="\n"
    )
    logger.info("Exported %d window coefficients to %s", len(window), path)
    return path
