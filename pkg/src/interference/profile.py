"""
Per-subcarrier interference coefficients toward a victim band.

A coefficient is the share of a unit-power subcarrier's PSD that falls inside
the victim band, which starts (d_n - 1/2)Δf away from the subcarrier centre.
Coefficients do not depend on power, so they are cached per geometry.
"""

import logging
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Hashable, Iterable, Optional, Tuple

import numpy as np
import pandas as pd

from src.exceptions import ConfigurationError, GeometryError
from src.interference.quadrature import DEFAULT_REL_TOL, BandSpec, integrate_psd
from src.waveforms.params import UfmcParams, WaveformKind, WaveformParams, check_params
from src.waveforms.psd import subcarrier_curve

logger = logging.getLogger(__name__)

_SNAP_TOL = 1e-9


@dataclass(frozen=True)
class InterferenceProfile:
    """Coefficients i_n and spectral distances d_n of one system's subcarriers toward one band."""

    kind: WaveformKind
    subcarrier_indices: np.ndarray
    spectral_distances: np.ndarray
    coefficients: np.ndarray

    def __len__(self) -> int:
        return len(self.coefficients)

    def total_interference(self, powers_w) -> float:
        """Σ P_n i_n."""
        powers_w = np.asarray(powers_w, dtype=float)
        if powers_w.shape != self.coefficients.shape:
            raise ValueError(f"Expected {len(self)} powers, got {powers_w.size}")
        return float(powers_w @ self.coefficients)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "subcarrier_index": self.subcarrier_indices.astype(int),
                "d_n": self.spectral_distances,
                "coefficient": self.coefficients,
            }
        )


def snap_distance(d_n: float) -> float:
    """Round to the nearest half-integer when within 1e-9 of it."""
    snapped = round(2.0 * d_n) / 2.0
    return snapped if abs(snapped - d_n) <= _SNAP_TOL else float(d_n)


def _check_spacing(params: WaveformParams, delta_f_hz: float) -> None:
    if abs(params.subcarrier_spacing_hz - delta_f_hz) > 1e-9 * delta_f_hz:
        raise ConfigurationError(
            f"Subcarrier spacing {delta_f_hz} Hz does not match waveform spacing "
            f"{params.subcarrier_spacing_hz} Hz"
        )


def _edge_relative_bin(params: WaveformParams) -> float:
    """Bin offset from the RB centre of the RB-edge subcarrier facing upward."""
    if isinstance(params, UfmcParams):
        return (params.subband_size - 1) / 2.0
    return 0.0


@lru_cache(maxsize=65536)
def _coefficient(
    kind: WaveformKind,
    params: WaveformParams,
    d_n: float,
    band_width_hz: float,
    relative_bin: float,
    rel_tol: float,
) -> float:
    spacing = params.subcarrier_spacing_hz
    curve = subcarrier_curve(kind, params, 1.0, relative_bin)
    band = BandSpec((d_n - 0.5) * spacing, band_width_hz)
    value = integrate_psd(curve, band, rel_tol)
    return min(max(value, 0.0), 1.0)


def interference_coefficient(
    kind: WaveformKind,
    params: WaveformParams,
    d_n: float,
    band_width_hz: float,
    delta_f_hz: float,
    rel_tol: float = DEFAULT_REL_TOL,
) -> float:
    """
    ∫ Ψ(f) df over [(d_n - 1/2)Δf, (d_n - 1/2)Δf + B] for a unit-power subcarrier.

    For UFMC the subcarrier sits at the edge of its RB, facing the band.
    """
    kind = WaveformKind(kind)
    check_params(kind, params)
    _check_spacing(params, delta_f_hz)
    d_n = snap_distance(d_n)
    if d_n < 0.5:
        raise GeometryError(f"d_n = {d_n} places the victim band over the subcarrier centre")
    return _coefficient(kind, params, d_n, float(band_width_hz), _edge_relative_bin(params), rel_tol)


def _resolve_workers(max_workers: Optional[int]) -> int:
    if max_workers is None or max_workers == 0:
        return os.cpu_count() or 1
    return max(1, int(max_workers))


def _geometry(
    own_subcarriers: np.ndarray, victim_band: BandSpec, delta_f_hz: float, rb_size: int
) -> Tuple[np.ndarray, np.ndarray]:
    """Return (d_n, relative bin as seen from a band above) per subcarrier."""
    centers = own_subcarriers * delta_f_hz
    inside = (centers >= victim_band.start_hz) & (centers <= victim_band.stop_hz)
    if np.any(inside):
        clash = own_subcarriers[inside][:5].tolist()
        raise GeometryError(f"Subcarriers {clash} lie inside the victim band")

    above = centers < victim_band.start_hz
    distances = np.where(
        above,
        (victim_band.start_hz - centers) / delta_f_hz + 0.5,
        (centers - victim_band.stop_hz) / delta_f_hz + 0.5,
    )
    distances = np.array([snap_distance(d) for d in distances])

    rb_centers = (own_subcarriers // rb_size) * rb_size + (rb_size - 1) / 2.0
    relative = own_subcarriers - rb_centers
    # A band below sees the mirror image of the curve
    relative = np.where(above, relative, -relative)
    return distances, relative


def interference_profile(
    kind: WaveformKind,
    params: WaveformParams,
    own_subcarriers: Iterable[int],
    victim_band: BandSpec,
    delta_f_hz: float,
    rel_tol: float = DEFAULT_REL_TOL,
    max_workers: Optional[int] = None,
) -> InterferenceProfile:
    """
    Coefficients of every own subcarrier toward victim_band.

    Subcarrier n is centred at n·Δf on the grid. UFMC subcarriers are
    evaluated at their actual position inside their RB.
    """
    kind = WaveformKind(kind)
    check_params(kind, params)
    _check_spacing(params, delta_f_hz)
    own = np.asarray(list(own_subcarriers), dtype=int)
    if own.size == 0:
        raise GeometryError("A profile needs at least one subcarrier")
    if np.unique(own).size != own.size:
        raise GeometryError("Own subcarriers contain duplicates")

    rb_size = params.subband_size if isinstance(params, UfmcParams) else 1
    distances, relative = _geometry(own, victim_band, delta_f_hz, rb_size)
    if not isinstance(params, UfmcParams):
        relative = np.zeros_like(distances)

    keys = sorted(set(zip(distances.tolist(), relative.tolist())))
    workers = min(_resolve_workers(max_workers), len(keys))
    logger.info(
        "Building %s interference profile: %d subcarriers, %d distinct geometries, %d workers",
        kind.value,
        own.size,
        len(keys),
        workers,
    )

    def solve(key):
        d_n, rel = key
        return key, _coefficient(kind, params, d_n, float(victim_band.width_hz), rel, rel_tol)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = dict(pool.map(solve, keys))
    else:
        values = dict(map(solve, keys))

    coefficients = np.array([values[key] for key in zip(distances.tolist(), relative.tolist())])
    return InterferenceProfile(kind, own, distances, coefficients)


class ProfileCache:
    """Write-once store of profiles keyed by waveform and geometry."""

    def __init__(self):
        self._profiles: Dict[Hashable, InterferenceProfile] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._profiles)

    def get_or_build(
        self,
        kind: WaveformKind,
        params: WaveformParams,
        own_subcarriers: Iterable[int],
        victim_band: BandSpec,
        delta_f_hz: float,
        rel_tol: float = DEFAULT_REL_TOL,
        max_workers: Optional[int] = None,
    ) -> InterferenceProfile:
        own = tuple(int(n) for n in own_subcarriers)
        key = (WaveformKind(kind), params, own, victim_band, float(delta_f_hz), rel_tol)
        with self._lock:
            cached = self._profiles.get(key)
        if cached is not None:
            return cached
        profile = interference_profile(kind, params, own, victim_band, delta_f_hz, rel_tol, max_workers)
        with self._lock:
            return self._profiles.setdefault(key, profile)

    def clear(self) -> None:
        with self._lock:
            self._profiles.clear()
