"""
Per-subcarrier and per-resource-block power spectral densities.

Every curve is expressed in W/Hz against a frequency offset in Hz. Unit-power
curves integrate to 1 over their support, so scaling by P_n gives the PSD of a
subcarrier loaded with P_n watts.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import trapezoid

from src.exceptions import ConfigurationError, ParameterRangeError
from src.waveforms.chebyshev import chebyshev_window
from src.waveforms.params import (
    FbmcParams,
    OfdmParams,
    ResourceBlockSpec,
    UfmcParams,
    WaveformKind,
    WaveformParams,
    check_params,
)

logger = logging.getLogger(__name__)

_SINGULARITY_EPS = 1e-12


def _sin_pi(x) -> np.ndarray:
    """sin(πx) after exact reduction of x to [-1, 1]."""
    x = np.asarray(x, dtype=float)
    return np.sin(np.pi * (x - 2.0 * np.round(0.5 * x)))


def _sinc(x) -> np.ndarray:
    """sin(πx)/(πx) with the removable singularity evaluated as 1."""
    x = np.asarray(x, dtype=float)
    arg = np.pi * x
    small = np.abs(arg) < _SINGULARITY_EPS
    safe = np.where(small, 1.0, arg)
    return np.where(small, 1.0, _sin_pi(x) / safe)


@dataclass(frozen=True)
class PsdCurve:
    """
    Evaluable PSD.

    `density` is vectorized over frequency offsets in Hz. Outside `support_hz`
    the curve is not defined and evaluation raises ParameterRangeError. Knots
    (origin + k * spacing) mark where the density may lose smoothness and are
    used to seed quadrature partitions.
    """

    density: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    support_hz: Tuple[float, float] = (-np.inf, np.inf)
    knot_spacing_hz: float = np.inf
    knot_origin_hz: float = 0.0
    label: str = ""

    def __call__(self, frequency_hz):
        f = np.asarray(frequency_hz, dtype=float)
        lo, hi = self.support_hz
        if np.any(f < lo) or np.any(f > hi):
            raise ParameterRangeError(
                f"{self.label or 'PSD'} evaluated outside its computed span [{lo:g}, {hi:g}] Hz"
            )
        values = self.density(f)
        return float(values) if np.ndim(values) == 0 else values

    def evaluate_clipped(self, frequency_hz) -> np.ndarray:
        """Evaluate with density 0 outside the support."""
        f = np.asarray(frequency_hz, dtype=float)
        lo, hi = self.support_hz
        inside = (f >= lo) & (f <= hi)
        out = np.zeros_like(f)
        if np.any(inside):
            out[inside] = self.density(f[inside])
        return out

    def shifted(self, offset_hz: float) -> "PsdCurve":
        lo, hi = self.support_hz
        base = self.density
        return PsdCurve(
            density=lambda f: base(np.asarray(f) - offset_hz),
            support_hz=(lo + offset_hz, hi + offset_hz),
            knot_spacing_hz=self.knot_spacing_hz,
            knot_origin_hz=self.knot_origin_hz + offset_hz,
            label=self.label,
        )

    def scaled(self, factor: float) -> "PsdCurve":
        if factor < 0 or not np.isfinite(factor):
            raise ParameterRangeError(f"PSD scale factor must be finite and >= 0, got {factor!r}")
        base = self.density
        return PsdCurve(
            density=lambda f: factor * base(f),
            support_hz=self.support_hz,
            knot_spacing_hz=self.knot_spacing_hz,
            knot_origin_hz=self.knot_origin_hz,
            label=self.label,
        )

    @staticmethod
    def sum(curves: Sequence["PsdCurve"], label: str = "") -> "PsdCurve":
        """
        Superposition, defined only where every term is: the support is the
        intersection of the term supports. Disjoint supports raise
        ParameterRangeError.
        """
        curves = list(curves)
        if not curves:
            raise ValueError("PsdCurve.sum needs at least one curve")
        if len(curves) == 1:
            return curves[0]

        def density(f):
            f = np.asarray(f, dtype=float)
            total = np.zeros_like(f)
            for curve in curves:
                total += curve.density(f)
            return total

        lo = max(c.support_hz[0] for c in curves)
        hi = min(c.support_hz[1] for c in curves)
        if lo > hi:
            raise ParameterRangeError(f"Terms of {label or 'the sum'} share no frequency where all are computed")
        return PsdCurve(
            density=density,
            support_hz=(lo, hi),
            knot_spacing_hz=min(c.knot_spacing_hz for c in curves),
            knot_origin_hz=curves[0].knot_origin_hz,
            label=label or curves[0].label,
        )

    @staticmethod
    def constant(value: float, support_hz: Tuple[float, float] = (-np.inf, np.inf)) -> "PsdCurve":
        if value < 0:
            raise ParameterRangeError("A PSD cannot be negative")
        return PsdCurve(density=lambda f: np.full(np.shape(f), float(value)), support_hz=support_hz)

    def knots_within(self, start_hz: float, stop_hz: float) -> np.ndarray:
        """Knot positions strictly inside (start, stop)."""
        if not np.isfinite(self.knot_spacing_hz):
            return np.empty(0)
        first = np.floor((start_hz - self.knot_origin_hz) / self.knot_spacing_hz) + 1
        last = np.ceil((stop_hz - self.knot_origin_hz) / self.knot_spacing_hz) - 1
        if last < first:
            return np.empty(0)
        knots = self.knot_origin_hz + np.arange(first, last + 1) * self.knot_spacing_hz
        return knots[(knots > start_hz) & (knots < stop_hz)]


# --- OFDM ---------------------------------------------------------------


def psd_ofdm_subcarrier(f_offset_hz, power_w: float, params: OfdmParams):
    """P·T_s·sinc²(f·T_s)."""
    t_s = params.symbol_duration_s
    values = power_w * t_s * _sinc(np.asarray(f_offset_hz, dtype=float) * t_s) ** 2
    return float(values) if np.ndim(values) == 0 else values


def ofdm_curve(params: OfdmParams, power_w: float = 1.0) -> PsdCurve:
    return PsdCurve(
        density=lambda f: psd_ofdm_subcarrier(f, power_w, params),
        knot_spacing_hz=params.subcarrier_spacing_hz / 2.0,
        label="OFDM",
    )


# --- FBMC ---------------------------------------------------------------


def fbmc_prototype(params: FbmcParams) -> np.ndarray:
    """Time-domain prototype filter of length K*M + 1 (M = fft_size)."""
    return params.prototype()


def _fbmc_scale(params: FbmcParams) -> float:
    _, coeffs = params.symmetric_coeffs()
    # ∫(Σ H_k sinc(K f/Δf - k))² df = Δf/K · Σ H_k²
    return params.overlap_factor / (params.subcarrier_spacing_hz * float(np.sum(coeffs**2)))


def psd_fbmc_subcarrier(f_offset_hz, power_w: float, params: FbmcParams):
    """
    Squared frequency response of the prototype, unit-power normalized.

    With ν = f/(NΔf), the shifted sincs sinc((ν - k/(NK))NK) reduce to
    sinc(x - k), x = K f/Δf. Since sin(π(x - k)) = (-1)^k sin(πx), the sum is
    sin(πx)/π · Σ H_k (-1)^k/(x - k); one shared sine keeps the far sidelobes,
    where the terms nearly cancel, free of per-term rounding noise.
    """
    ks, coeffs = params.symmetric_coeffs()
    x = params.overlap_factor * np.asarray(f_offset_hz, dtype=float) / params.subcarrier_spacing_hz
    distance = np.subtract.outer(x, ks)
    on_peak = np.abs(np.pi * distance) < _SINGULARITY_EPS
    safe = np.where(on_peak, 1.0, distance)
    weights = np.where(on_peak, 0.0, coeffs * (-1.0) ** ks / (np.pi * safe))
    amplitude = _sin_pi(x) * weights.sum(axis=-1) + np.where(on_peak, coeffs, 0.0).sum(axis=-1)
    values = power_w * _fbmc_scale(params) * amplitude**2
    return float(values) if np.ndim(values) == 0 else values


def fbmc_curve(params: FbmcParams, power_w: float = 1.0) -> PsdCurve:
    return PsdCurve(
        density=lambda f: psd_fbmc_subcarrier(f, power_w, params),
        knot_spacing_hz=params.subcarrier_spacing_hz / params.overlap_factor,
        label="FBMC",
    )


# --- UFMC ---------------------------------------------------------------


def build_ufmc_subband_filter(params: UfmcParams, rb_center_subcarrier: float) -> np.ndarray:
    """Chebyshev window shifted to the RB centre f_c (in FFT bins)."""
    if not 0 <= rb_center_subcarrier < params.fft_size:
        raise ParameterRangeError(
            f"RB centre {rb_center_subcarrier!r} outside [0, {params.fft_size})"
        )
    window = chebyshev_window(params.filter_length, params.sidelobe_attenuation_db)
    l = np.arange(params.filter_length)
    return window * np.exp(2j * np.pi * l * rb_center_subcarrier / params.fft_size)


@lru_cache(maxsize=256)
def _ufmc_unit_spectrum(params: UfmcParams, relative_bin: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Sampled unit-power PSD of a subcarrier sitting `relative_bin` bins away
    from its RB centre. Returns (offsets_hz, density) sorted by offset.
    """
    n_fft = params.fft_size
    n_pad = params.psd_oversampling * n_fft

    # Subcarrier at bin 0, so the filter is centred at -relative_bin
    tone = np.ones(n_fft, dtype=complex)
    taps = build_ufmc_subband_filter(params, (-relative_bin) % n_fft)
    spectrum = np.abs(np.fft.fft(np.convolve(tone, taps), n_pad)) ** 2

    bins = np.arange(n_pad) / params.psd_oversampling
    offsets = (bins + n_fft / 2.0) % n_fft - n_fft / 2.0
    order = np.argsort(offsets)
    offsets, spectrum = offsets[order], spectrum[order]
    # Close the period so the span is symmetric: [-N/2, N/2]
    offsets = np.append(offsets, n_fft / 2.0)
    spectrum = np.append(spectrum, spectrum[0])

    offsets_hz = offsets * params.subcarrier_spacing_hz
    density = spectrum / trapezoid(spectrum, offsets_hz)
    offsets_hz.setflags(write=False)
    density.setflags(write=False)
    logger.debug("Built UFMC spectrum for relative bin %s (%d samples)", relative_bin, len(density))
    return offsets_hz, density


def ufmc_curve(params: UfmcParams, relative_bin: float = 0.0, power_w: float = 1.0) -> PsdCurve:
    """PSD of one UFMC subcarrier, `relative_bin` bins from the centre of its RB."""
    offsets_hz, density = _ufmc_unit_spectrum(params, float(relative_bin))
    return PsdCurve(
        density=lambda f: power_w * np.interp(f, offsets_hz, density),
        support_hz=(float(offsets_hz[0]), float(offsets_hz[-1])),
        knot_spacing_hz=params.subcarrier_spacing_hz / params.psd_oversampling,
        label="UFMC",
    )


def psd_ufmc_subcarrier(
    f_offset_hz, power_w: float, params: UfmcParams, rb_center: float, subcarrier: float = 0.0
):
    """Density at f_offset_hz from the subcarrier's centre; raises outside ±fft_size/2 spacings."""
    values = ufmc_curve(params, subcarrier - rb_center, power_w)(f_offset_hz)
    return values


# --- Dispatch -----------------------------------------------------------


def subcarrier_curve(
    kind: WaveformKind, params: WaveformParams, power_w: float = 1.0, relative_bin: float = 0.0
) -> PsdCurve:
    """Curve of a single subcarrier centred at 0 Hz; relative_bin only matters for UFMC."""
    kind = WaveformKind(kind)
    check_params(kind, params)
    if kind is WaveformKind.OFDM:
        return ofdm_curve(params, power_w)
    if kind is WaveformKind.FBMC:
        return fbmc_curve(params, power_w)
    return ufmc_curve(params, relative_bin, power_w)


def resource_block_curve(kind: WaveformKind, rb: ResourceBlockSpec, params: WaveformParams) -> PsdCurve:
    """Σ_n Ψ(f - (start + n)Δf; P_n), with frequencies measured from grid index 0."""
    kind = WaveformKind(kind)
    check_params(kind, params)
    spacing = params.subcarrier_spacing_hz
    terms = [
        subcarrier_curve(kind, params, power, n - rb.center_offset).shifted((rb.start_subcarrier + n) * spacing)
        for n, power in enumerate(rb.powers_w)
    ]
    return PsdCurve.sum(terms, label=kind.value)


def psd_resource_block(kind: WaveformKind, rb: ResourceBlockSpec, params: WaveformParams, f_offset_hz):
    return resource_block_curve(kind, rb, params)(f_offset_hz)


def multi_rb_psd(
    kind: WaveformKind,
    params: WaveformParams,
    num_subcarriers: int,
    rb_size: int = 12,
    powers: Optional[Iterable[float]] = None,
) -> PsdCurve:
    """PSD of consecutive RBs starting at subcarrier 0; the last RB may be partial."""
    if num_subcarriers < 1 or rb_size < 1:
        raise ParameterRangeError("num_subcarriers and rb_size must be positive")
    powers = np.ones(num_subcarriers) if powers is None else np.asarray(list(powers), dtype=float)
    if powers.shape != (num_subcarriers,):
        raise ConfigurationError(f"Expected {num_subcarriers} power values, got {powers.size}")
    blocks = [
        ResourceBlockSpec(start, min(rb_size, num_subcarriers - start), tuple(powers[start : start + rb_size]))
        for start in range(0, num_subcarriers, rb_size)
    ]
    return PsdCurve.sum([resource_block_curve(kind, rb, params) for rb in blocks], label=WaveformKind(kind).value)
