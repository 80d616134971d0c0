"""
Waveform parameter types.

All parameter objects are frozen and hashable so they can key the curve and
interference caches.
"""

import math
from dataclasses import dataclass, field
from src._compat import StrEnum
from typing import Tuple, Union

import numpy as np

from src.exceptions import ConfigurationError, ParameterRangeError

DEFAULT_SUBCARRIER_SPACING_HZ = 15e3

# PHYDYAS polyphase coefficients for K = 4
PHYDYAS_COEFFS_K4 = (1.0, 0.971960, math.sqrt(2.0) / 2.0, 0.235147)


class WaveformKind(StrEnum):
    OFDM = "OFDM"
    FBMC = "FBMC"
    UFMC = "UFMC"

    @classmethod
    def parse(cls, value: str) -> "WaveformKind":
        try:
            return cls(str(value).upper())
        except ValueError:
            allowed = ", ".join(k.value for k in cls)
            raise ConfigurationError(f"Unknown waveform '{value}'; allowed: {allowed}") from None


@dataclass(frozen=True)
class OfdmParams:
    """OFDM: rectangular pulse of duration T_s on a Δf = 1/T_s grid."""

    symbol_duration_s: float
    subcarrier_spacing_hz: float

    def __post_init__(self):
        if not (self.symbol_duration_s > 0 and self.subcarrier_spacing_hz > 0):
            raise ParameterRangeError("OFDM symbol duration and subcarrier spacing must be > 0")
        if abs(self.symbol_duration_s * self.subcarrier_spacing_hz - 1.0) > 1e-9:
            raise ParameterRangeError(
                f"OFDM requires subcarrier_spacing_hz * symbol_duration_s == 1, "
                f"got {self.symbol_duration_s * self.subcarrier_spacing_hz!r}"
            )

    @classmethod
    def from_spacing(cls, subcarrier_spacing_hz: float = DEFAULT_SUBCARRIER_SPACING_HZ) -> "OfdmParams":
        return cls(symbol_duration_s=1.0 / subcarrier_spacing_hz, subcarrier_spacing_hz=subcarrier_spacing_hz)


@dataclass(frozen=True)
class FbmcParams:
    """
    FBMC per-subcarrier model.

    Args:
        overlap_factor: K, the length of each polyphase component.
        fft_size: N, used as the M of the prototype definition as well.
        polyphase_coeffs: H_0..H_{K-1}; negative indices follow from H_k = H_{-k}.
        subcarrier_spacing_hz: Δf, maps the normalized formula onto Hz.
    """

    overlap_factor: int = 4
    fft_size: int = 2048
    polyphase_coeffs: Tuple[float, ...] = PHYDYAS_COEFFS_K4
    subcarrier_spacing_hz: float = DEFAULT_SUBCARRIER_SPACING_HZ

    def __post_init__(self):
        object.__setattr__(self, "polyphase_coeffs", tuple(float(h) for h in self.polyphase_coeffs))
        if self.overlap_factor < 1 or self.fft_size < 1:
            raise ParameterRangeError("FBMC overlap_factor and fft_size must be positive integers")
        if self.subcarrier_spacing_hz <= 0:
            raise ParameterRangeError("FBMC subcarrier_spacing_hz must be > 0")
        if len(self.polyphase_coeffs) != self.overlap_factor:
            raise ParameterRangeError(
                f"Expected {self.overlap_factor} polyphase coefficients, got {len(self.polyphase_coeffs)}"
            )
        if self.polyphase_coeffs[0] != 1.0:
            raise ParameterRangeError("FBMC polyphase coefficient H_0 must be exactly 1")
        if any(not (0.0 < h <= 1.0) for h in self.polyphase_coeffs):
            raise ParameterRangeError("FBMC polyphase coefficients must lie in (0, 1]")
        prototype = self.prototype()
        if not np.allclose(prototype, prototype[::-1], rtol=0.0, atol=1e-12):
            raise ParameterRangeError("FBMC prototype is not evenly symmetric")

    def symmetric_coeffs(self) -> Tuple[np.ndarray, np.ndarray]:
        """Return (k, H_k) for k = -K+1..K-1."""
        half = np.asarray(self.polyphase_coeffs)
        ks = np.arange(-self.overlap_factor + 1, self.overlap_factor)
        return ks, half[np.abs(ks)]

    def prototype(self) -> np.ndarray:
        """Time-domain prototype h[l], l = 0..KM, built from the polyphase coefficients."""
        km = self.overlap_factor * self.fft_size
        l = np.arange(km + 1)
        h = np.full(km + 1, self.polyphase_coeffs[0])
        for k in range(1, self.overlap_factor):
            h += 2.0 * (-1) ** k * self.polyphase_coeffs[k] * np.cos(2.0 * np.pi * k * l / km)
        return h


@dataclass(frozen=True)
class UfmcParams:
    """UFMC subband filtering with a Dolph-Chebyshev FIR."""

    filter_length: int = 74
    sidelobe_attenuation_db: float = 40.0
    fft_size: int = 2048
    psd_oversampling: int = 16
    subcarrier_spacing_hz: float = DEFAULT_SUBCARRIER_SPACING_HZ
    subband_size: int = 12

    def __post_init__(self):
        if self.sidelobe_attenuation_db <= 0:
            raise ParameterRangeError("UFMC sidelobe_attenuation_db must be > 0")
        if self.filter_length < 2:
            raise ParameterRangeError("UFMC filter_length must be >= 2")
        if self.fft_size < self.filter_length:
            raise ParameterRangeError("UFMC fft_size must be >= filter_length")
        if self.psd_oversampling < 1:
            raise ParameterRangeError("UFMC psd_oversampling must be a positive integer")
        if self.psd_oversampling * self.fft_size < self.fft_size + self.filter_length - 1:
            raise ParameterRangeError(
                "UFMC psd_oversampling * fft_size must cover fft_size + filter_length - 1 samples"
            )
        if self.subcarrier_spacing_hz <= 0 or self.subband_size < 1:
            raise ParameterRangeError("UFMC subcarrier_spacing_hz and subband_size must be positive")
        kappa = self.kappa0
        if not (math.isfinite(kappa) and kappa > 1.0):
            raise ParameterRangeError(f"UFMC Chebyshev parameter kappa0 is not finite and > 1 ({kappa!r})")

    @property
    def kappa0(self) -> float:
        return chebyshev_kappa0(self.filter_length, self.sidelobe_attenuation_db)


def chebyshev_kappa0(filter_length: int, alpha_db: float) -> float:
    """κ₀ = cosh(acosh(10^{α/20}) / (N_filt - 1)); inf when the attenuation overflows."""
    with np.errstate(over="ignore"):
        ripple = np.power(10.0, alpha_db / 20.0)
        return float(np.cosh(np.arccosh(ripple) / (filter_length - 1)))


@dataclass(frozen=True)
class ResourceBlockSpec:
    """Contiguous subcarriers with per-subcarrier power loadings (W)."""

    start_subcarrier: int
    num_subcarriers: int
    powers_w: Tuple[float, ...] = field(default=())

    def __post_init__(self):
        powers = tuple(float(p) for p in self.powers_w) or (1.0,) * self.num_subcarriers
        object.__setattr__(self, "powers_w", powers)
        if self.num_subcarriers < 1:
            raise ParameterRangeError("Resource block needs at least one subcarrier")
        if len(powers) != self.num_subcarriers:
            raise ParameterRangeError(
                f"Resource block has {self.num_subcarriers} subcarriers but {len(powers)} power values"
            )
        if any(p < 0 or not math.isfinite(p) for p in powers):
            raise ParameterRangeError("Resource block powers must be finite and >= 0")

    @property
    def center_offset(self) -> float:
        """RB centre relative to its first subcarrier, in subcarrier spacings."""
        return (self.num_subcarriers - 1) / 2.0


WaveformParams = Union[OfdmParams, FbmcParams, UfmcParams]

_PARAMS_BY_KIND = {
    WaveformKind.OFDM: OfdmParams,
    WaveformKind.FBMC: FbmcParams,
    WaveformKind.UFMC: UfmcParams,
}


def check_params(kind: WaveformKind, params: WaveformParams) -> None:
    """Raise ConfigurationError when params do not belong to kind."""
    expected = _PARAMS_BY_KIND[WaveformKind(kind)]
    if not isinstance(params, expected):
        raise ConfigurationError(
            f"{WaveformKind(kind).value} needs {expected.__name__}, got {type(params).__name__}"
        )


def default_params(kind: WaveformKind, subcarrier_spacing_hz: float = DEFAULT_SUBCARRIER_SPACING_HZ) -> WaveformParams:
    kind = WaveformKind(kind)
    if kind is WaveformKind.OFDM:
        return OfdmParams.from_spacing(subcarrier_spacing_hz)
    if kind is WaveformKind.FBMC:
        return FbmcParams(subcarrier_spacing_hz=subcarrier_spacing_hz)
    return UfmcParams(subcarrier_spacing_hz=subcarrier_spacing_hz)
