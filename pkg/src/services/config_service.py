"""
Run configuration: TOML documents in user units (kHz, dBm, dBW, dB) and the
environment knobs of the simulator.
"""

import dataclasses
import logging
import math
import os
import re
from src._compat import get_level_names_mapping, tomllib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union, get_args, get_origin

import numpy as np
import tomli_w

from src.exceptions import ConfigSyntaxError, ConfigurationError, ConfigValidationError, ParameterRangeError, UnitError
from src.scenario.channel import ChannelModel
from src.scenario.grid import GridSpec, SystemSpec, WaveformSpec, split_grid
from src.scenario.sweep import THRESHOLD_MAX_W, THRESHOLD_MIN_W, validate_thresholds
from src.utils.units import dbm_per_hz_to_watts_per_hz, dbm_to_watts, dbw_to_watts
from src.waveforms.params import PHYDYAS_COEFFS_K4, FbmcParams, OfdmParams, UfmcParams, WaveformKind

# --- Load environment variables from .env if present ---
try:
    from dotenv import load_dotenv

    load_dotenv()
except ImportError:
    pass

logger = logging.getLogger(__name__)

ALL_WAVEFORMS = ("OFDM", "FBMC", "UFMC")


def resolve_thread_count() -> Optional[int]:
    """WAVECOEX_THREADS: worker cap, 0 or unset for auto (returned as None)."""
    raw = os.environ.get("WAVECOEX_THREADS", "").strip()
    if not raw:
        return None
    if not raw.isdigit():
        raise ConfigurationError(f"WAVECOEX_THREADS must be a non-negative integer, got '{raw}'")
    value = int(raw)
    return value or None


def log_level() -> str:
    level = os.environ.get("WAVECOEX_LOG_LEVEL", "WARNING").strip().upper()
    return level if level in get_level_names_mapping() else "WARNING"


def data_dir() -> Path:
    return Path(os.environ.get("WAVECOEX_DATA_DIR", "data"))


# --- Schema ---


@dataclass(frozen=True)
class GridConfig:
    total_subcarriers: int = 1200
    subcarrier_spacing_khz: float = 15.0
    rb_size: int = 12
    gap_subcarriers: int = 0


@dataclass(frozen=True)
class SystemOverrides:
    waveform: Optional[str] = None
    power_budget_dbm: Optional[float] = None
    interference_threshold_dbw: Optional[float] = None
    num_users: Optional[int] = None
    channel: Optional[str] = None
    incoming_interference_dbm: Optional[float] = None


@dataclass(frozen=True)
class OfdmConfig:
    pass


@dataclass(frozen=True)
class FbmcConfig:
    overlap_factor: int = 4
    fft_size: int = 2048
    polyphase_coeffs: Tuple[float, ...] = PHYDYAS_COEFFS_K4


@dataclass(frozen=True)
class UfmcConfig:
    filter_length: int = 74
    sidelobe_attenuation_db: float = 40.0
    fft_size: int = 2048
    psd_oversampling: int = 16


@dataclass(frozen=True)
class NoiseConfig:
    density_dbm_per_hz: float = -174.0


@dataclass(frozen=True)
class SweepConfig:
    threshold_min_w: float = 1e-6
    threshold_max_w: float = 1e-1
    num_points: int = 25
    compare_waveforms: bool = True
    waveforms: Tuple[str, ...] = ALL_WAVEFORMS
    rel_tol: float = 1e-9
    ufmc_alphas: Tuple[float, ...] = ()


@dataclass(frozen=True)
class PsdConfig:
    num_subcarriers: int = 60
    num_points: int = 1201
    half_span_subcarriers: float = 60.0
    waveforms: Tuple[str, ...] = ALL_WAVEFORMS


@dataclass(frozen=True)
class AllocConfig:
    threshold_w: Optional[float] = None


@dataclass(frozen=True)
class OutputConfig:
    psd_csv: str = "psd.csv"
    sweep_csv: str = "sweep.csv"
    alloc_csv: str = "alloc.csv"
    profile_dir: str = ""


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration; empty documents give the two-system LSA default."""

    seed: int = 0
    waveform: str = "UFMC"
    power_budget_dbm: float = 43.0
    interference_threshold_dbw: float = -30.0
    num_users: int = 10
    channel: str = "flat"
    grid: GridConfig = field(default_factory=GridConfig)
    system_a: SystemOverrides = field(default_factory=SystemOverrides)
    system_b: SystemOverrides = field(default_factory=SystemOverrides)
    ofdm: OfdmConfig = field(default_factory=OfdmConfig)
    fbmc: FbmcConfig = field(default_factory=FbmcConfig)
    ufmc: UfmcConfig = field(default_factory=UfmcConfig)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    psd: PsdConfig = field(default_factory=PsdConfig)
    alloc: AllocConfig = field(default_factory=AllocConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    # --- converters to the internal watt/Hz domain ---

    @property
    def subcarrier_spacing_hz(self) -> float:
        return self.grid.subcarrier_spacing_khz * 1e3

    def grid_spec(self) -> GridSpec:
        return split_grid(
            self.grid.total_subcarriers, self.subcarrier_spacing_hz, self.grid.rb_size, self.grid.gap_subcarriers
        )

    def waveform_spec(self, kind: Union[str, WaveformKind]) -> WaveformSpec:
        kind = WaveformKind.parse(kind)
        spacing = self.subcarrier_spacing_hz
        if kind is WaveformKind.OFDM:
            params = OfdmParams.from_spacing(spacing)
        elif kind is WaveformKind.FBMC:
            params = FbmcParams(
                overlap_factor=self.fbmc.overlap_factor,
                fft_size=self.fbmc.fft_size,
                polyphase_coeffs=self.fbmc.polyphase_coeffs,
                subcarrier_spacing_hz=spacing,
            )
        else:
            params = UfmcParams(
                filter_length=self.ufmc.filter_length,
                sidelobe_attenuation_db=self.ufmc.sidelobe_attenuation_db,
                fft_size=self.ufmc.fft_size,
                psd_oversampling=self.ufmc.psd_oversampling,
                subcarrier_spacing_hz=spacing,
                subband_size=self.grid.rb_size,
            )
        return WaveformSpec(kind, params)

    def system_spec(self, system_id: str) -> SystemSpec:
        overrides = self.system_a if system_id == "A" else self.system_b

        def pick(name):
            value = getattr(overrides, name)
            return getattr(self, name) if value is None else value

        incoming = overrides.incoming_interference_dbm
        return SystemSpec(
            id=system_id,
            waveform=self.waveform_spec(pick("waveform")),
            power_budget_w=float(dbm_to_watts(pick("power_budget_dbm"))),
            interference_threshold_w=float(dbw_to_watts(pick("interference_threshold_dbw"))),
            num_users=pick("num_users"),
            channel=pick("channel"),
            incoming_interference_w=None if incoming is None else float(dbm_to_watts(incoming)),
        )

    def system_specs(self) -> Tuple[SystemSpec, SystemSpec]:
        return self.system_spec("A"), self.system_spec("B")

    @property
    def noise_density_w_per_hz(self) -> float:
        return dbm_per_hz_to_watts_per_hz(self.noise.density_dbm_per_hz)

    def thresholds(self) -> np.ndarray:
        return np.logspace(
            math.log10(self.sweep.threshold_min_w), math.log10(self.sweep.threshold_max_w), self.sweep.num_points
        )

    def sweep_waveforms(self) -> List[WaveformSpec]:
        """Sweep variants in order; UFMC expands to one variant per entry of sweep.ufmc_alphas."""
        specs = []
        for kind in self.sweep.waveforms:
            spec = self.waveform_spec(kind)
            if spec.kind is WaveformKind.UFMC and self.sweep.ufmc_alphas:
                specs.extend(spec.with_alpha(alpha) for alpha in self.sweep.ufmc_alphas)
            else:
                specs.append(spec)
        return specs

    def psd_waveforms(self) -> List[WaveformSpec]:
        return [self.waveform_spec(kind) for kind in self.psd.waveforms]

    def with_seed(self, seed: Optional[int]) -> "RunConfig":
        return self if seed is None else dataclasses.replace(self, seed=int(seed))


# --- Parsing ---


def _coerce(path: str, value: Any, annotation: Any) -> Any:
    origin = get_origin(annotation)
    if origin is Union:
        inner = [a for a in get_args(annotation) if a is not type(None)][0]
        return _coerce(path, value, inner)
    if origin in (tuple, Tuple):
        if not isinstance(value, list):
            raise ConfigValidationError(path, "must be an array")
        item_type = get_args(annotation)[0]
        return tuple(_coerce(f"{path}[{i}]", item, item_type) for i, item in enumerate(value))
    if annotation is bool:
        if not isinstance(value, bool):
            raise ConfigValidationError(path, "must be true or false")
        return value
    if annotation is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigValidationError(path, "must be an integer")
        return value
    if annotation is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigValidationError(path, "must be a number")
        value = float(value)
        if not math.isfinite(value):
            raise ConfigValidationError(path, "must be finite")
        return value
    if annotation is str:
        if not isinstance(value, str):
            raise ConfigValidationError(path, "must be a string")
        return value
    raise ConfigurationError(f"Unsupported schema type for {path}")


def _build(cls, table: Dict[str, Any], prefix: str):
    known = {f.name: f for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, value in table.items():
        path = f"{prefix}{key}"
        if key not in known:
            raise ConfigValidationError(path, "unknown key")
        if dataclasses.is_dataclass(known[key].type):
            if not isinstance(value, dict):
                raise ConfigValidationError(path, "must be a table")
            kwargs[key] = _build(known[key].type, value, f"{path}.")
        else:
            kwargs[key] = _coerce(path, value, known[key].type)
    return cls(**kwargs)


def _check(condition: bool, path: str, constraint: str, error=ConfigValidationError) -> None:
    if not condition:
        raise error(path, constraint)


def _check_waveform(path: str, value: Optional[str]) -> None:
    if value is not None and value.upper() not in ALL_WAVEFORMS:
        raise ConfigValidationError(path, f"must be one of {', '.join(ALL_WAVEFORMS)} (got '{value}')")


def _check_channel(path: str, value: Optional[str]) -> None:
    allowed = [m.value for m in ChannelModel]
    if value is not None and value.lower() not in allowed:
        raise ConfigValidationError(path, f"must be one of {', '.join(allowed)} (got '{value}')")


def _validate(config: RunConfig) -> None:
    _check(config.seed >= 0, "seed", "must be >= 0")
    _check_waveform("waveform", config.waveform)
    _check_channel("channel", config.channel)
    _check(config.num_users >= 1, "num_users", "must be >= 1")
    for name, overrides in (("system_a", config.system_a), ("system_b", config.system_b)):
        _check_waveform(f"{name}.waveform", overrides.waveform)
        _check_channel(f"{name}.channel", overrides.channel)
        if overrides.num_users is not None:
            _check(overrides.num_users >= 1, f"{name}.num_users", "must be >= 1")

    g = config.grid
    _check(g.total_subcarriers >= 2, "grid.total_subcarriers", "must be >= 2")
    _check(g.subcarrier_spacing_khz > 0, "grid.subcarrier_spacing_khz", "must be > 0", UnitError)
    _check(g.rb_size >= 1, "grid.rb_size", "must be >= 1")
    _check(0 <= g.gap_subcarriers <= g.total_subcarriers - 2, "grid.gap_subcarriers", "must leave room for both systems")

    _check(config.fbmc.overlap_factor >= 1, "fbmc.overlap_factor", "must be >= 1")
    _check(config.fbmc.fft_size >= 1, "fbmc.fft_size", "must be >= 1")
    _check(
        len(config.fbmc.polyphase_coeffs) == config.fbmc.overlap_factor,
        "fbmc.polyphase_coeffs",
        "needs exactly overlap_factor values",
    )
    _check(config.ufmc.sidelobe_attenuation_db > 0, "ufmc.sidelobe_attenuation_db", "must be > 0 dB", UnitError)
    _check(config.ufmc.filter_length >= 2, "ufmc.filter_length", "must be >= 2")
    _check(config.ufmc.fft_size >= config.ufmc.filter_length, "ufmc.fft_size", "must be >= filter_length")
    _check(config.ufmc.psd_oversampling >= 1, "ufmc.psd_oversampling", "must be >= 1")

    s = config.sweep
    for name in ("threshold_min_w", "threshold_max_w"):
        value = getattr(s, name)
        _check(
            THRESHOLD_MIN_W <= value <= THRESHOLD_MAX_W,
            f"sweep.{name}",
            f"must lie in [{THRESHOLD_MIN_W:g}, {THRESHOLD_MAX_W:g}] W",
        )
    _check(s.num_points >= 1, "sweep.num_points", "must be >= 1")
    _check(
        s.threshold_min_w < s.threshold_max_w or (s.num_points == 1 and s.threshold_min_w == s.threshold_max_w),
        "sweep.threshold_max_w",
        "must exceed threshold_min_w",
    )
    _check(len(s.waveforms) >= 1, "sweep.waveforms", "needs at least one waveform")
    for i, kind in enumerate(s.waveforms):
        _check_waveform(f"sweep.waveforms[{i}]", kind)
    _check(
        len({kind.upper() for kind in s.waveforms}) == len(s.waveforms), "sweep.waveforms", "must not repeat a waveform"
    )
    _check(1e-14 < s.rel_tol < 1e-2, "sweep.rel_tol", "must lie in (1e-14, 1e-2)")
    for i, alpha in enumerate(s.ufmc_alphas):
        _check(alpha > 0, f"sweep.ufmc_alphas[{i}]", "must be > 0 dB", UnitError)
    _check(len(set(s.ufmc_alphas)) == len(s.ufmc_alphas), "sweep.ufmc_alphas", "must not repeat a value")
    _check(
        not s.ufmc_alphas or any(kind.upper() == "UFMC" for kind in s.waveforms),
        "sweep.ufmc_alphas",
        "needs UFMC in sweep.waveforms",
    )

    p = config.psd
    _check(p.num_subcarriers >= 1, "psd.num_subcarriers", "must be >= 1")
    _check(p.num_points >= 2, "psd.num_points", "must be >= 2")
    _check(p.half_span_subcarriers > 0, "psd.half_span_subcarriers", "must be > 0")
    _check(len(p.waveforms) >= 1, "psd.waveforms", "needs at least one waveform")
    for i, kind in enumerate(p.waveforms):
        _check_waveform(f"psd.waveforms[{i}]", kind)
    if any(kind.upper() == "UFMC" for kind in p.waveforms):
        # UFMC densities exist only within half the transform size of each subcarrier
        limit = config.ufmc.fft_size / 2 - p.num_subcarriers / 2
        _check(
            p.half_span_subcarriers <= limit,
            "psd.half_span_subcarriers",
            f"must be <= ufmc.fft_size/2 - psd.num_subcarriers/2 = {limit:g} when UFMC is plotted",
        )

    _check(
        config.alloc.threshold_w is None or THRESHOLD_MIN_W <= config.alloc.threshold_w <= THRESHOLD_MAX_W,
        "alloc.threshold_w",
        f"must lie in [{THRESHOLD_MIN_W:g}, {THRESHOLD_MAX_W:g}] W",
    )
    for name in ("psd_csv", "sweep_csv", "alloc_csv"):
        _check(bool(getattr(config.output, name).strip()), f"output.{name}", "must not be empty")

    # Domain objects re-check ranges the schema cannot express (e.g. κ0 overflow)
    try:
        for kind in ALL_WAVEFORMS:
            config.waveform_spec(kind)
        config.sweep_waveforms()
        config.system_specs()
        config.grid_spec()
        validate_thresholds(config.thresholds())
    except ParameterRangeError as e:
        raise ConfigValidationError("config", str(e)) from e


_LOCATION = re.compile(r"line (\d+), column (\d+)")


def parse_config(text: str) -> RunConfig:
    """
    Parse and validate a TOML run configuration.

    Raises:
        ConfigSyntaxError: not valid TOML (carries line and column).
        ConfigValidationError: unknown key or value outside its constraint.
        UnitError: a user-unit value with no valid internal counterpart.
    """
    try:
        document = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        match = _LOCATION.search(str(e))
        line, column = (int(match.group(1)), int(match.group(2))) if match else (None, None)
        message = _LOCATION.sub("", str(e)).replace("(at )", "").strip()
        raise ConfigSyntaxError(f"Invalid TOML: {message}", line, column) from None

    config = _build(RunConfig, document, "")
    _validate(config)
    logger.debug("Parsed configuration: %s", config)
    return config


def load_config(path: Optional[Union[str, Path]] = None) -> RunConfig:
    """Read a configuration file; no path means all defaults."""
    if path is None:
        return parse_config("")
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigurationError(f"Cannot read configuration file {path}: {e}") from e
    return parse_config(text)


def _to_table(obj) -> Dict[str, Any]:
    table = {}
    for f in dataclasses.fields(obj):
        value = getattr(obj, f.name)
        if value is None:
            continue
        if dataclasses.is_dataclass(value):
            table[f.name] = _to_table(value)
        elif isinstance(value, tuple):
            table[f.name] = list(value)
        else:
            table[f.name] = value
    return table


def serialize_config(config: RunConfig) -> str:
    """TOML text that parse_config maps back to an equal RunConfig."""
    return tomli_w.dumps(_to_table(config))
