import logging
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from src.allocation.solver import power_loss_percent, solve_power_allocation
from src.interference.profile import ProfileCache
from src.scenario.sweep import (
    SweepResult,
    ordering_checks,
    run_threshold_sweep,
    run_waveform_comparison,
    sample_psd_comparison,
)
from src.services.config_service import RunConfig, resolve_thread_count
from src.services.result_storage_service import ResultStorageService
from src.workflow.sweep_workflow import build_problem, prepare_systems

logger = logging.getLogger(__name__)

ALLOC_COLUMNS = ["system", "waveform", "subcarrier_index", "d_n", "coefficient", "channel_gain", "power_w"]


class SimulationService:
    """Runs the psd, alloc and sweep commands and hands results to storage."""

    def __init__(self, storage: Optional[ResultStorageService] = None):
        self.storage = storage or ResultStorageService()
        self.profile_cache = ProfileCache()

    def cmd_psd(self, config: RunConfig, out: Optional[str] = None) -> Tuple[Path, str]:
        """Peak-normalized PSD comparison table (freq_hz, <waveform>_db...)."""
        half_span = config.psd.half_span_subcarriers * config.subcarrier_spacing_hz
        frame = sample_psd_comparison(
            config.psd_waveforms(),
            num_subcarriers=config.psd.num_subcarriers,
            f_range=(-half_span, half_span),
            num_points=config.psd.num_points,
            rb_size=config.grid.rb_size,
        )
        path = self.storage.write_csv(frame, self.storage.resolve_output(out, config.output.psd_csv), "psd")
        summary = (
            f"PSD comparison: {config.psd.num_subcarriers} subcarriers, {len(frame)} frequencies, "
            f"waveforms {', '.join(config.psd.waveforms)} -> {path}"
        )
        return path, summary

    def cmd_alloc(self, config: RunConfig, out: Optional[str] = None) -> Tuple[Path, str]:
        """One allocation per system; per-subcarrier table plus a text summary."""
        grid = config.grid_spec()
        systems = config.system_specs()
        prepared = prepare_systems(
            grid, systems, self.profile_cache, config.seed, config.sweep.rel_tol, resolve_thread_count()
        )

        frames = []
        lines = ["system  waveform  threshold_w  throughput_bps  power_used_w  power_loss_pct  binding"]
        for system_id, entry in sorted(prepared.items()):
            system = entry["system"]
            threshold = config.alloc.threshold_w or system.interference_threshold_w
            result = solve_power_allocation(build_problem(entry, threshold, grid, config.noise_density_w_per_hz))
            profile = entry["profile"]
            frames.append(
                pd.DataFrame(
                    {
                        "system": system_id,
                        "waveform": system.waveform.kind.value,
                        "subcarrier_index": profile.subcarrier_indices,
                        "d_n": profile.spectral_distances,
                        "coefficient": profile.coefficients,
                        "channel_gain": entry["gains"],
                        "power_w": result.powers_w,
                    },
                    columns=ALLOC_COLUMNS,
                )
            )
            loss = power_loss_percent(result.total_power_used_w, system.power_budget_w)
            lines.append(
                f"{system_id:<7} {system.waveform.kind.value:<9} {threshold:<12.4g} {result.throughput_bps:<15.6g} "
                f"{result.total_power_used_w:<13.6g} {loss:<15.6f} {','.join(result.binding) or '-'}"
            )
            self._write_profile(config, system_id, entry["profile"])

        frame = pd.concat(frames, ignore_index=True)
        path = self.storage.write_csv(frame, self.storage.resolve_output(out, config.output.alloc_csv), "alloc")
        return path, "\n".join(lines)

    def cmd_sweep(self, config: RunConfig, out: Optional[str] = None) -> Tuple[Path, str]:
        """Threshold sweep; one block of rows per waveform when comparing waveforms."""
        grid = config.grid_spec()
        systems = config.system_specs()
        kwargs = dict(
            noise_density_w_per_hz=config.noise_density_w_per_hz,
            rel_tol=config.sweep.rel_tol,
            seed=config.seed,
            max_workers=resolve_thread_count(),
        )
        if config.sweep.compare_waveforms:
            results = run_waveform_comparison(
                grid, systems, config.thresholds(), config.sweep_waveforms(), profile_cache=self.profile_cache, **kwargs
            )
            runs = list(results.values())
            checks = ordering_checks(results)
        else:
            runs = [run_threshold_sweep(grid, systems, config.thresholds(), profile_cache=self.profile_cache, **kwargs)]
            checks = []

        frame = pd.concat([run.to_frame() for run in runs], ignore_index=True)
        path = self.storage.write_csv(frame, self.storage.resolve_output(out, config.output.sweep_csv), "sweep")
        for run in runs:
            for system_id, profile in run.profiles.items():
                name = profile.kind.value.lower()
                alpha = run.curves[system_id].alpha_db
                if config.sweep.compare_waveforms and config.sweep.ufmc_alphas and alpha is not None:
                    name = f"{name}_a{alpha:g}"
                self._write_profile(config, f"{system_id}_{name}", profile)
        return path, self._sweep_summary(runs, checks)

    def _write_profile(self, config: RunConfig, name: str, profile) -> None:
        if not config.output.profile_dir:
            return
        target = Path(config.output.profile_dir) / f"profile_{name}.csv"
        self.storage.write_csv(profile.to_frame(), target, "profile")

    @staticmethod
    def _sweep_summary(runs: List[SweepResult], checks: List[Tuple[str, bool]]) -> str:
        lines = ["variant      system  thr_min_w   thr_max_w   tput_min_bps     tput_max_bps     loss_max_pct  loss_min_pct  failed"]
        for run in runs:
            for system_id, curve in sorted(run.curves.items()):
                failed = sum(status != "ok" for status in curve.status)
                lines.append(
                    f"{curve.variant or curve.waveform.value:<12} {system_id:<7} {run.thresholds_w[0]:<11.3e} {run.thresholds_w[-1]:<11.3e} "
                    f"{np.nanmin(curve.throughput_bps):<16.6e} {np.nanmax(curve.throughput_bps):<16.6e} "
                    f"{np.nanmax(curve.power_loss_percent):<13.6f} {np.nanmin(curve.power_loss_percent):<13.6f} {failed}"
                )
        if checks:
            lines.append("")
            lines.append("Ordering checks:")
            lines.extend(f"  [{'PASS' if ok else 'FAIL'}] {name}" for name, ok in checks)
        violations = [v for run in runs for v in run.violations]
        if violations:
            lines.append("")
            lines.append("Monotonicity violations:")
            lines.extend(f"  {v}" for v in violations)
        return "\n".join(lines)
