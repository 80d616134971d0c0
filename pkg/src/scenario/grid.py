"""Common subcarrier grid, system descriptions and the default two-system scenario."""

import math
from dataclasses import dataclass, replace
from typing import Optional, Tuple

from src.exceptions import ConfigurationError, GeometryError, ParameterRangeError
from src.interference.quadrature import BandSpec
from src.utils.units import dbm_to_watts
from src.waveforms.params import (
    DEFAULT_SUBCARRIER_SPACING_HZ,
    UfmcParams,
    WaveformKind,
    WaveformParams,
    check_params,
    default_params,
)

DEFAULT_TOTAL_SUBCARRIERS = 1200
DEFAULT_RB_SIZE = 12
DEFAULT_POWER_BUDGET_DBM = 43.0
DEFAULT_NUM_USERS = 10
DEFAULT_THRESHOLD_W = 1e-3
SYSTEM_IDS = ("A", "B")


@dataclass(frozen=True)
class GridSpec:
    """
    Subcarrier raster of N_c carriers at Δf, with contiguous fragments.

    assignments maps a system id to a half-open index range [start, stop).
    Subcarrier n is centred at n·Δf.
    """

    total_subcarriers: int = DEFAULT_TOTAL_SUBCARRIERS
    subcarrier_spacing_hz: float = DEFAULT_SUBCARRIER_SPACING_HZ
    rb_size: int = DEFAULT_RB_SIZE
    assignments: Tuple[Tuple[str, int, int], ...] = ()

    def __post_init__(self):
        if self.total_subcarriers < 1 or self.rb_size < 1:
            raise ParameterRangeError("total_subcarriers and rb_size must be positive")
        if not self.subcarrier_spacing_hz > 0:
            raise ParameterRangeError("subcarrier_spacing_hz must be > 0")
        object.__setattr__(self, "assignments", tuple((str(s), int(a), int(b)) for s, a, b in self.assignments))

        seen = set()
        for system_id, start, stop in self.assignments:
            if system_id in seen:
                raise GeometryError(f"System '{system_id}' has more than one fragment")
            seen.add(system_id)
            if not 0 <= start < stop <= self.total_subcarriers:
                raise GeometryError(
                    f"Fragment of '{system_id}' [{start}, {stop}) is outside the grid of {self.total_subcarriers}"
                )
        ordered = sorted(self.assignments, key=lambda item: item[1])
        for (first, _, first_stop), (second, second_start, _) in zip(ordered, ordered[1:]):
            if second_start < first_stop:
                raise GeometryError(f"Fragments of '{first}' and '{second}' overlap")

    @property
    def num_rbs(self) -> int:
        return math.ceil(self.total_subcarriers / self.rb_size)

    @property
    def bandwidth_hz(self) -> float:
        return self.total_subcarriers * self.subcarrier_spacing_hz

    def fragment(self, system_id: str) -> range:
        for sid, start, stop in self.assignments:
            if sid == system_id:
                return range(start, stop)
        raise ConfigurationError(f"No fragment assigned to system '{system_id}'")

    def band_of(self, system_id: str) -> BandSpec:
        """Occupied band of a fragment, half a spacing beyond each edge centre."""
        indices = self.fragment(system_id)
        return BandSpec((indices.start - 0.5) * self.subcarrier_spacing_hz, len(indices) * self.subcarrier_spacing_hz)


@dataclass(frozen=True)
class WaveformSpec:
    kind: WaveformKind
    params: WaveformParams

    def __post_init__(self):
        object.__setattr__(self, "kind", WaveformKind(self.kind))
        check_params(self.kind, self.params)

    @classmethod
    def default(cls, kind, subcarrier_spacing_hz: float = DEFAULT_SUBCARRIER_SPACING_HZ) -> "WaveformSpec":
        kind = WaveformKind.parse(kind)
        return cls(kind, default_params(kind, subcarrier_spacing_hz))

    @property
    def alpha_db(self) -> Optional[float]:
        """UFMC sidelobe attenuation; None for the other waveforms."""
        if isinstance(self.params, UfmcParams):
            return float(self.params.sidelobe_attenuation_db)
        return None

    @property
    def label(self) -> str:
        """Variant name used to key sweep results, e.g. 'OFDM' or 'UFMC(a=40)'."""
        if self.alpha_db is None:
            return self.kind.value
        return f"{self.kind.value}(a={self.alpha_db:g})"

    def with_alpha(self, alpha_db: float) -> "WaveformSpec":
        if not isinstance(self.params, UfmcParams):
            raise ConfigurationError(f"{self.kind.value} has no sidelobe attenuation to vary")
        return replace(self, params=replace(self.params, sidelobe_attenuation_db=float(alpha_db)))


@dataclass(frozen=True)
class SystemSpec:
    """One coexisting system; `interference_threshold_w` caps what it may leak to its neighbour."""

    id: str
    waveform: WaveformSpec
    power_budget_w: float
    interference_threshold_w: float = DEFAULT_THRESHOLD_W
    num_users: int = DEFAULT_NUM_USERS
    channel: str = "flat"
    incoming_interference_w: Optional[float] = None

    def __post_init__(self):
        if not (self.power_budget_w > 0 and math.isfinite(self.power_budget_w)):
            raise ParameterRangeError(f"System {self.id}: power budget must be > 0")
        if not (self.interference_threshold_w > 0 and math.isfinite(self.interference_threshold_w)):
            raise ParameterRangeError(f"System {self.id}: interference threshold must be > 0")
        if self.num_users < 1:
            raise ParameterRangeError(f"System {self.id}: num_users must be >= 1")

    def with_waveform(self, waveform: WaveformSpec) -> "SystemSpec":
        return replace(self, waveform=waveform)

    def with_threshold(self, threshold_w: float) -> "SystemSpec":
        return replace(self, interference_threshold_w=threshold_w)


def split_grid(
    total_subcarriers: int = DEFAULT_TOTAL_SUBCARRIERS,
    subcarrier_spacing_hz: float = DEFAULT_SUBCARRIER_SPACING_HZ,
    rb_size: int = DEFAULT_RB_SIZE,
    gap_subcarriers: int = 0,
) -> GridSpec:
    """Two fragments: A gets the lower half, B the rest after `gap_subcarriers`."""
    if gap_subcarriers < 0 or gap_subcarriers > total_subcarriers - 2:
        raise ParameterRangeError(f"gap_subcarriers={gap_subcarriers} leaves no room for two systems")
    half = (total_subcarriers - gap_subcarriers) // 2
    return GridSpec(
        total_subcarriers=total_subcarriers,
        subcarrier_spacing_hz=subcarrier_spacing_hz,
        rb_size=rb_size,
        assignments=(("A", 0, half), ("B", half + gap_subcarriers, total_subcarriers)),
    )


def build_default_scenario(kind: WaveformKind = WaveformKind.UFMC) -> Tuple[GridSpec, Tuple[SystemSpec, SystemSpec]]:
    """1200 subcarriers at 15 kHz split in two 9 MHz halves, 43 dBm per system, 10 users each."""
    grid = split_grid()
    waveform = WaveformSpec.default(kind, grid.subcarrier_spacing_hz)
    budget = float(dbm_to_watts(DEFAULT_POWER_BUDGET_DBM))
    systems = tuple(SystemSpec(system_id, waveform, budget) for system_id in SYSTEM_IDS)
    return grid, systems


def neighbour_of(system_id: str, systems) -> SystemSpec:
    others = [s for s in systems if s.id != system_id]
    if len(others) != 1:
        raise ConfigurationError("The scenario runner expects exactly two systems")
    return others[0]


def check_waveform_grid(grid: GridSpec, waveform: WaveformSpec) -> None:
    if abs(waveform.params.subcarrier_spacing_hz - grid.subcarrier_spacing_hz) > 1e-9 * grid.subcarrier_spacing_hz:
        raise ConfigurationError(
            f"{waveform.kind.value} spacing {waveform.params.subcarrier_spacing_hz} Hz differs from the grid's "
            f"{grid.subcarrier_spacing_hz} Hz"
        )
    if isinstance(waveform.params, UfmcParams) and waveform.params.subband_size != grid.rb_size:
        raise ConfigurationError("UFMC subband_size must equal the grid RB size")
