"""Shared fixtures. The default-scenario sweeps are built once per session."""

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from src.interference.profile import ProfileCache  # noqa: E402
from src.scenario.grid import WaveformSpec, build_default_scenario  # noqa: E402
from src.scenario.sweep import default_thresholds, run_waveform_comparison  # noqa: E402
from src.waveforms.params import WaveformKind  # noqa: E402

SPACING_HZ = 15e3


@pytest.fixture(autouse=True)
def isolated_data_dir(tmp_path, monkeypatch):
    """Keep run logs and default outputs out of the working tree."""
    monkeypatch.setenv("WAVECOEX_DATA_DIR", str(tmp_path / "data"))
    monkeypatch.delenv("WAVECOEX_THREADS", raising=False)
    return tmp_path / "data"


@pytest.fixture(scope="session")
def default_scenario():
    return build_default_scenario()


@pytest.fixture(scope="session")
def profile_cache():
    return ProfileCache()


@pytest.fixture(scope="session")
def default_sweeps(default_scenario, profile_cache):
    """Both systems on each waveform, 25 thresholds from 1e-6 to 1e-1 W."""
    grid, systems = default_scenario
    waveforms = [WaveformSpec.default(kind) for kind in (WaveformKind.OFDM, WaveformKind.FBMC, WaveformKind.UFMC)]
    return run_waveform_comparison(
        grid, systems, default_thresholds(), waveforms, profile_cache=profile_cache
    )
