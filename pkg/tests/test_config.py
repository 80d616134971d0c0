import pytest

from src.exceptions import ConfigSyntaxError, ConfigurationError, ConfigValidationError, UnitError
from src.services.config_service import (
    RunConfig,
    data_dir,
    load_config,
    log_level,
    parse_config,
    resolve_thread_count,
    serialize_config,
)
from src.waveforms.params import FbmcParams, UfmcParams, WaveformKind


def test_empty_document_gives_defaults():
    config = parse_config("")
    assert config == RunConfig()
    grid = config.grid_spec()
    assert grid.total_subcarriers == 1200
    assert config.subcarrier_spacing_hz == 15e3
    system_a, system_b = config.system_specs()
    assert system_a.power_budget_w == pytest.approx(19.952623149688797)
    assert system_a.interference_threshold_w == pytest.approx(1e-3)
    assert system_a.waveform.kind is WaveformKind.UFMC
    assert system_b.id == "B"
    assert config.noise_density_w_per_hz == pytest.approx(3.981071705534973e-21)
    assert config.thresholds().size == 25


def test_waveform_blocks_reach_the_params():
    config = parse_config(
        """
        [grid]
        rb_size = 6

        [ufmc]
        filter_length = 43
        sidelobe_attenuation_db = 50.0

        [fbmc]
        overlap_factor = 2
        polyphase_coeffs = [1.0, 0.7071067811865476]
        """
    )
    ufmc = config.waveform_spec("ufmc").params
    assert isinstance(ufmc, UfmcParams)
    assert (ufmc.filter_length, ufmc.sidelobe_attenuation_db, ufmc.subband_size) == (43, 50.0, 6)
    fbmc = config.waveform_spec(WaveformKind.FBMC).params
    assert isinstance(fbmc, FbmcParams)
    assert fbmc.polyphase_coeffs == (1.0, 0.7071067811865476)


def test_unknown_waveform_lists_the_allowed_set():
    with pytest.raises(ConfigValidationError) as excinfo:
        parse_config('waveform = "GFDM"')
    assert excinfo.value.field == "waveform"
    assert "OFDM, FBMC, UFMC" in str(excinfo.value)


def test_unknown_key_is_named():
    with pytest.raises(ConfigValidationError) as excinfo:
        parse_config("[grid]\nfoo = 1\n")
    assert excinfo.value.field == "grid.foo"


def test_wrong_type():
    with pytest.raises(ConfigValidationError) as excinfo:
        parse_config('[grid]\ntotal_subcarriers = "many"\n')
    assert excinfo.value.field == "grid.total_subcarriers"


def test_syntax_error_carries_the_line():
    with pytest.raises(ConfigSyntaxError) as excinfo:
        parse_config("seed = 1\nwaveform = \n")
    assert excinfo.value.line == 2


@pytest.mark.parametrize(
    "document, field",
    [
        ("[ufmc]\nsidelobe_attenuation_db = -10.0\n", "ufmc.sidelobe_attenuation_db"),
        ("[grid]\nsubcarrier_spacing_khz = 0.0\n", "grid.subcarrier_spacing_khz"),
        ("[sweep]\nufmc_alphas = [20.0, -5.0]\n", "sweep.ufmc_alphas[1]"),
    ],
)
def test_unit_errors(document, field):
    with pytest.raises(UnitError) as excinfo:
        parse_config(document)
    assert excinfo.value.field == field


def test_system_overrides():
    config = parse_config(
        """
        [system_b]
        waveform = "ofdm"
        power_budget_dbm = 40.0
        channel = "multipath"
        """
    )
    system_a, system_b = config.system_specs()
    assert system_a.waveform.kind is WaveformKind.UFMC
    assert system_b.waveform.kind is WaveformKind.OFDM
    assert system_b.power_budget_w == pytest.approx(10.0)
    assert system_b.channel == "multipath"
    assert system_a.channel == "flat"


@pytest.mark.parametrize(
    "document",
    [
        "[sweep]\nthreshold_min_w = 1e-9\n",
        "[sweep]\nthreshold_min_w = 1e-2\nthreshold_max_w = 1e-3\n",
        "[sweep]\nwaveforms = []\n",
        "[fbmc]\noverlap_factor = 3\n",
        '[system_a]\nchannel = "rician"\n',
        "[alloc]\nthreshold_w = 5.0\n",
        "seed = -1\n",
        "[ufmc]\nsidelobe_attenuation_db = 7000.0\n",
        "[sweep]\nufmc_alphas = [20.0, 7000.0]\n",
        "[sweep]\nufmc_alphas = [20.0, 20]\n",
        '[sweep]\nwaveforms = ["OFDM", "FBMC"]\nufmc_alphas = [20.0]\n',
        '[sweep]\nwaveforms = ["OFDM", "ofdm"]\n',
    ],
)
def test_constraint_violations(document):
    with pytest.raises(ConfigValidationError):
        parse_config(document)


def test_serialized_config_parses_back():
    config = parse_config('seed = 7\n[system_a]\nwaveform = "FBMC"\n[alloc]\nthreshold_w = 1e-4\n')
    assert parse_config(serialize_config(config)) == config


def test_with_seed():
    config = RunConfig()
    assert config.with_seed(None) is config
    assert config.with_seed(5).seed == 5


def test_load_config(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text("seed = 3\n", encoding="utf-8")
    assert load_config(path).seed == 3
    assert load_config(None) == RunConfig()
    with pytest.raises(ConfigurationError):
        load_config(tmp_path / "missing.toml")


@pytest.mark.parametrize("raw, expected", [("", None), ("0", None), ("4", 4), (" 2 ", 2)])
def test_thread_count(monkeypatch, raw, expected):
    monkeypatch.setenv("WAVECOEX_THREADS", raw)
    assert resolve_thread_count() == expected


def test_thread_count_rejects_garbage(monkeypatch):
    monkeypatch.setenv("WAVECOEX_THREADS", "-3")
    with pytest.raises(ConfigurationError):
        resolve_thread_count()


def test_log_level_and_data_dir(monkeypatch, isolated_data_dir):
    monkeypatch.setenv("WAVECOEX_LOG_LEVEL", "debug")
    assert log_level() == "DEBUG"
    monkeypatch.setenv("WAVECOEX_LOG_LEVEL", "chatty")
    assert log_level() == "WARNING"
    assert data_dir() == isolated_data_dir


def test_ufmc_alphas_expand_the_sweep_waveforms():
    config = parse_config('[sweep]\nwaveforms = ["FBMC", "UFMC", "OFDM"]\nufmc_alphas = [15, 20.0, 60.0]\n')
    assert config.sweep.ufmc_alphas == (15.0, 20.0, 60.0)
    labels = [spec.label for spec in config.sweep_waveforms()]
    assert labels == ["FBMC", "UFMC(a=15)", "UFMC(a=20)", "UFMC(a=60)", "OFDM"]
    assert parse_config(serialize_config(config)) == config
    assert [spec.label for spec in RunConfig().sweep_waveforms()] == ["OFDM", "FBMC", "UFMC(a=40)"]


def test_psd_span_must_stay_inside_the_ufmc_span():
    with pytest.raises(ConfigValidationError) as excinfo:
        parse_config("[psd]\nnum_subcarriers = 60\nhalf_span_subcarriers = 1020.0\n")
    assert excinfo.value.field == "psd.half_span_subcarriers"
    assert parse_config("[psd]\nnum_subcarriers = 60\nhalf_span_subcarriers = 994.0\n").psd.half_span_subcarriers == 994.0
    assert parse_config('[psd]\nhalf_span_subcarriers = 1020.0\nwaveforms = ["OFDM", "FBMC"]\n')
    assert parse_config("[psd]\nhalf_span_subcarriers = 1020.0\n[ufmc]\nfft_size = 4096\npsd_oversampling = 8\n")
