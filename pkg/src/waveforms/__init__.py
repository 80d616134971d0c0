from src.waveforms.chebyshev import chebyshev_window, export_window_csv, sidelobe_levels_db
from src.waveforms.params import (
    DEFAULT_SUBCARRIER_SPACING_HZ,
    FbmcParams,
    OfdmParams,
    ResourceBlockSpec,
    UfmcParams,
    WaveformKind,
    WaveformParams,
    default_params,
)
from src.waveforms.psd import (
    PsdCurve,
    build_ufmc_subband_filter,
    fbmc_prototype,
    multi_rb_psd,
    psd_fbmc_subcarrier,
    psd_ofdm_subcarrier,
    psd_resource_block,
    psd_ufmc_subcarrier,
    resource_block_curve,
    subcarrier_curve,
)

__all__ = [
    "DEFAULT_SUBCARRIER_SPACING_HZ",
    "FbmcParams",
    "OfdmParams",
    "PsdCurve",
    "ResourceBlockSpec",
    "UfmcParams",
    "WaveformKind",
    "WaveformParams",
    "build_ufmc_subband_filter",
    "chebyshev_window",
    "default_params",
    "export_window_csv",
    "fbmc_prototype",
    "multi_rb_psd",
    "psd_fbmc_subcarrier",
    "psd_ofdm_subcarrier",
    "psd_resource_block",
    "psd_ufmc_subcarrier",
    "resource_block_curve",
    "sidelobe_levels_db",
    "subcarrier_curve",
]
