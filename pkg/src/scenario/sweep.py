"""
Interference-threshold sweep and PSD comparison tables.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from src.allocation.solver import DEFAULT_NOISE_DENSITY_W_PER_HZ
from src.exceptions import ConfigurationError, ParameterRangeError
from src.interference.profile import InterferenceProfile, ProfileCache
from src.interference.quadrature import DEFAULT_REL_TOL
from src.scenario.grid import GridSpec, SystemSpec, WaveformSpec
from src.utils.units import power_ratio_to_db, watts_to_dbw
from src.waveforms.params import WaveformKind
from src.waveforms.psd import multi_rb_psd
from src.workflow.sweep_workflow import SweepWorkflow

logger = logging.getLogger(__name__)

THRESHOLD_MIN_W = 1e-7
THRESHOLD_MAX_W = 1.0
SWEEP_COLUMNS = [
    "threshold_w",
    "threshold_dbw",
    "system",
    "waveform",
    "variant",
    "alpha_db",
    "throughput_bps",
    "power_used_w",
    "power_loss_pct",
    "status",
]
PSD_FLOOR_RATIO = 1e-30


def default_thresholds(num_points: int = 25, lo_w: float = 1e-6, hi_w: float = 1e-1) -> np.ndarray:
    """Log-spaced thresholds, 25 points from 1e-6 to 1e-1 W by default."""
    return np.logspace(np.log10(lo_w), np.log10(hi_w), num_points)


def validate_thresholds(thresholds) -> np.ndarray:
    thresholds = np.asarray(thresholds, dtype=float)
    if thresholds.ndim != 1 or thresholds.size == 0:
        raise ParameterRangeError("Thresholds must be a non-empty vector")
    if np.any(thresholds < THRESHOLD_MIN_W) or np.any(thresholds > THRESHOLD_MAX_W):
        raise ParameterRangeError(f"Thresholds must lie in [{THRESHOLD_MIN_W:g}, {THRESHOLD_MAX_W:g}] W")
    if np.any(np.diff(thresholds) <= 0):
        raise ParameterRangeError("Thresholds must be strictly increasing")
    return thresholds


@dataclass
class SystemCurve:
    system_id: str
    waveform: WaveformKind
    throughput_bps: np.ndarray
    power_used_w: np.ndarray
    power_loss_percent: np.ndarray
    status: Tuple[str, ...]
    variant: str = ""
    alpha_db: Optional[float] = None


@dataclass
class SweepResult:
    thresholds_w: np.ndarray
    curves: Dict[str, SystemCurve]
    profiles: Dict[str, InterferenceProfile] = field(default_factory=dict)
    violations: List[str] = field(default_factory=list)

    def to_frame(self) -> pd.DataFrame:
        """Rows ordered by threshold, then system id."""
        rows = []
        for i, threshold in enumerate(self.thresholds_w):
            for system_id in sorted(self.curves):
                curve = self.curves[system_id]
                rows.append(
                    {
                        "threshold_w": threshold,
                        "threshold_dbw": watts_to_dbw(threshold),
                        "system": system_id,
                        "waveform": curve.waveform.value,
                        "variant": curve.variant or curve.waveform.value,
                        "alpha_db": np.nan if curve.alpha_db is None else curve.alpha_db,
                        "throughput_bps": curve.throughput_bps[i],
                        "power_used_w": curve.power_used_w[i],
                        "power_loss_pct": curve.power_loss_percent[i],
                        "status": curve.status[i],
                    }
                )
        return pd.DataFrame(rows, columns=SWEEP_COLUMNS)


def run_threshold_sweep(
    grid: GridSpec,
    systems: Sequence[SystemSpec],
    thresholds,
    noise_density_w_per_hz: float = DEFAULT_NOISE_DENSITY_W_PER_HZ,
    rel_tol: float = DEFAULT_REL_TOL,
    seed: int = 0,
    max_workers: Optional[int] = None,
    profile_cache: Optional[ProfileCache] = None,
) -> SweepResult:
    """
    For every threshold and system: build the profile toward the neighbour's
    band, solve the allocation and record throughput, used power and loss.

    Solver failures become per-point statuses; geometry errors abort.
    """
    thresholds = validate_thresholds(thresholds)
    workflow = SweepWorkflow(profile_cache)
    state = workflow.run(
        grid, tuple(systems), thresholds.tolist(), noise_density_w_per_hz, rel_tol, seed, max_workers
    )

    curves = {}
    for system_id, entry in sorted(state["prepared"].items()):
        rows = [r for r in state["records"] if r["system"] == system_id]
        waveform: WaveformSpec = entry["system"].waveform
        curves[system_id] = SystemCurve(
            system_id=system_id,
            waveform=waveform.kind,
            throughput_bps=np.array([r["throughput_bps"] for r in rows]),
            power_used_w=np.array([r["power_used_w"] for r in rows]),
            power_loss_percent=np.array([r["power_loss_pct"] for r in rows]),
            status=tuple(r["status"] for r in rows),
            variant=waveform.label,
            alpha_db=waveform.alpha_db,
        )
    profiles = {system_id: entry["profile"] for system_id, entry in state["prepared"].items()}
    return SweepResult(thresholds, curves, profiles, list(state["violations"]))


def run_waveform_comparison(
    grid: GridSpec,
    systems: Sequence[SystemSpec],
    thresholds,
    waveforms: Sequence[WaveformSpec],
    **sweep_kwargs,
) -> Dict[str, SweepResult]:
    """
    One sweep per waveform variant, with both systems switched to it.

    Results are keyed by WaveformSpec.label, so UFMC filters with different
    sidelobe attenuations sit side by side ('UFMC(a=20)', 'UFMC(a=40)').
    """
    labels = [waveform.label for waveform in waveforms]
    if len(set(labels)) != len(labels):
        raise ConfigurationError(f"Waveform variants must be distinct, got {labels}")
    cache = sweep_kwargs.pop("profile_cache", None)
    if cache is None:
        cache = ProfileCache()
    results = {}
    for waveform in waveforms:
        logger.info("Sweeping with both systems on %s", waveform.label)
        switched = [system.with_waveform(waveform) for system in systems]
        results[waveform.label] = run_threshold_sweep(grid, switched, thresholds, profile_cache=cache, **sweep_kwargs)
    return results


def _first_curve(result: SweepResult) -> SystemCurve:
    return next(iter(result.curves.values()))


def ordering_checks(results: Mapping[str, SweepResult]) -> List[Tuple[str, bool]]:
    """
    Cross-waveform checks on sweeps sharing one threshold grid.

    Using the first variant of each waveform: at the smallest threshold
    throughput(FBMC) >= throughput(UFMC) >= throughput(OFDM), and at every
    threshold power loss OFDM >= UFMC >= FBMC. With several UFMC variants,
    power loss at the smallest threshold must not grow with alpha. Checks
    needing a missing waveform are skipped.
    """
    primary: Dict[WaveformKind, SweepResult] = {}
    ufmc_variants = []
    for result in results.values():
        curve = _first_curve(result)
        primary.setdefault(curve.waveform, result)
        if curve.waveform is WaveformKind.UFMC:
            ufmc_variants.append(result)

    checks = []
    order = [primary[k] for k in (WaveformKind.FBMC, WaveformKind.UFMC, WaveformKind.OFDM) if k in primary]
    system_ids = sorted(next(iter(results.values())).curves) if results else []
    labels = [_first_curve(result).variant for result in order]
    for system_id in system_ids if len(order) >= 2 else []:
        first = [result.curves[system_id].throughput_bps[0] for result in order]
        ok = all(a >= b * (1.0 - 1e-9) for a, b in zip(first, first[1:]))
        checks.append((f"System {system_id}: throughput {' >= '.join(labels)} at the smallest threshold", ok))

        losses = [result.curves[system_id].power_loss_percent for result in order]
        ok = all(np.all(a <= b + 1e-6) for a, b in zip(losses, losses[1:]))
        checks.append((f"System {system_id}: power loss {' <= '.join(labels)} at every threshold", ok))

    if len(ufmc_variants) >= 2:
        ufmc_variants.sort(key=lambda result: _first_curve(result).alpha_db)
        for system_id in system_ids:
            losses = [result.curves[system_id].power_loss_percent[0] for result in ufmc_variants]
            ok = all(a >= b - 1e-6 for a, b in zip(losses, losses[1:]))
            alphas = ", ".join(f"{_first_curve(result).alpha_db:g}" for result in ufmc_variants)
            checks.append(
                (f"System {system_id}: UFMC power loss non-increasing in alpha ({alphas} dB) at the smallest threshold", ok)
            )

    for name, ok in checks:
        if not ok:
            logger.warning("Ordering check failed: %s", name)
    return checks


def sample_psd_comparison(
    waveforms: Sequence[Union[WaveformSpec, WaveformKind, str]],
    num_subcarriers: int = 60,
    f_range: Optional[Tuple[float, float]] = None,
    num_points: int = 1201,
    rb_size: int = 12,
) -> pd.DataFrame:
    """
    Peak-normalized dB PSDs of a block of unit-power subcarriers.

    Frequencies are measured from the block centre; the default range is
    ±num_subcarriers spacings. Densities below 1e-30 of the peak are floored.
    """
    if num_points < 2:
        raise ParameterRangeError("num_points must be >= 2")
    specs = [w if isinstance(w, WaveformSpec) else WaveformSpec.default(w) for w in waveforms]
    if not specs:
        raise ParameterRangeError("At least one waveform is needed")
    spacing = specs[0].params.subcarrier_spacing_hz
    if f_range is None:
        f_range = (-num_subcarriers * spacing, num_subcarriers * spacing)
    freqs = np.linspace(f_range[0], f_range[1], num_points)

    table = {"freq_hz": freqs}
    for spec in specs:
        center = (num_subcarriers - 1) / 2.0 * spec.params.subcarrier_spacing_hz
        curve = multi_rb_psd(spec.kind, spec.params, num_subcarriers, rb_size).shifted(-center)
        density = np.asarray(curve(freqs), dtype=float)
        peak = float(np.max(density))
        table[f"{spec.kind.value.lower()}_db"] = power_ratio_to_db(density / peak, PSD_FLOOR_RATIO)
        logger.debug("Sampled %s PSD at %d points", spec.kind.value, num_points)
    return pd.DataFrame(table)
