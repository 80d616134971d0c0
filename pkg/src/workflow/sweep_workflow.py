"""
Threshold Sweep Workflow
Drives one interference-threshold sweep as a LangGraph loop:
prepare (profiles + channel gains) -> solve one threshold -> ... -> check.
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, TypedDict

import numpy as np
from langgraph.graph import END, StateGraph

from src.allocation.solver import (
    DEFAULT_NOISE_DENSITY_W_PER_HZ,
    AllocationProblem,
    power_loss_percent,
    solve_power_allocation,
)
from src.exceptions import SolverError
from src.interference.profile import ProfileCache
from src.interference.quadrature import DEFAULT_REL_TOL
from src.scenario.channel import channel_gains
from src.scenario.grid import GridSpec, SystemSpec, check_waveform_grid, neighbour_of

logger = logging.getLogger("sweep_workflow")

_MONOTONE_RTOL = 1e-9
_LOSS_ATOL = 1e-6


class PointRecord(TypedDict):
    threshold_w: float
    system: str
    waveform: str
    throughput_bps: float
    power_used_w: float
    power_loss_pct: float
    status: str


class SweepState(TypedDict):
    grid: GridSpec
    systems: Tuple[SystemSpec, ...]
    thresholds: List[float]
    noise_density_w_per_hz: float
    rel_tol: float
    seed: int
    max_workers: Optional[int]
    prepared: Dict[str, Dict[str, Any]]
    index: int
    records: List[PointRecord]
    violations: List[str]


def prepare_systems(
    grid: GridSpec,
    systems: Tuple[SystemSpec, ...],
    profile_cache: ProfileCache,
    seed: int = 0,
    rel_tol: float = DEFAULT_REL_TOL,
    max_workers: Optional[int] = None,
) -> Dict[str, Dict[str, Any]]:
    """Interference profile toward the neighbour's band and channel gains, per system id."""
    prepared = {}
    for stream, system in enumerate(sorted(systems, key=lambda s: s.id)):
        check_waveform_grid(grid, system.waveform)
        own = grid.fragment(system.id)
        victim = grid.band_of(neighbour_of(system.id, systems).id)
        profile = profile_cache.get_or_build(
            system.waveform.kind,
            system.waveform.params,
            own,
            victim,
            grid.subcarrier_spacing_hz,
            rel_tol,
            max_workers,
        )
        gains = channel_gains(system.channel, own, grid.rb_size, system.num_users, grid.total_subcarriers, seed, stream)
        incoming = None
        if system.incoming_interference_w:
            incoming = np.full(len(own), float(system.incoming_interference_w))
        prepared[system.id] = {"system": system, "profile": profile, "gains": gains, "incoming": incoming}
        logger.info(
            "System %s (%s): %d subcarriers, aggregate unit-power leakage %.3e",
            system.id,
            system.waveform.kind.value,
            len(own),
            float(np.sum(profile.coefficients)),
        )
    return prepared


def build_problem(
    entry: Dict[str, Any], threshold_w: float, grid: GridSpec, noise_density_w_per_hz: float
) -> AllocationProblem:
    system: SystemSpec = entry["system"]
    return AllocationProblem(
        channel_gains=entry["gains"],
        interference_coeffs=entry["profile"].coefficients,
        power_budget_w=system.power_budget_w,
        interference_threshold_w=threshold_w,
        subcarrier_spacing_hz=grid.subcarrier_spacing_hz,
        noise_density_w_per_hz=noise_density_w_per_hz,
        incoming_interference_w=entry["incoming"],
    )


class SweepWorkflow:
    """Threshold sweep over two coexisting systems sharing one grid."""

    def __init__(self, profile_cache: Optional[ProfileCache] = None):
        self.profile_cache = profile_cache if profile_cache is not None else ProfileCache()

    def prepare_systems(self, state: SweepState) -> SweepState:
        """Build each system's interference profile toward its neighbour and its channel gains."""
        state["prepared"] = prepare_systems(
            state["grid"],
            state["systems"],
            self.profile_cache,
            state["seed"],
            state["rel_tol"],
            state["max_workers"],
        )
        state["index"] = 0
        return state

    def solve_threshold(self, state: SweepState) -> SweepState:
        """Solve both systems' allocations at the current threshold."""
        threshold = state["thresholds"][state["index"]]
        for system_id in sorted(state["prepared"]):
            entry = state["prepared"][system_id]
            system: SystemSpec = entry["system"]
            problem = build_problem(entry, threshold, state["grid"], state["noise_density_w_per_hz"])
            record: PointRecord = {
                "threshold_w": threshold,
                "system": system_id,
                "waveform": system.waveform.kind.value,
                "throughput_bps": float("nan"),
                "power_used_w": float("nan"),
                "power_loss_pct": float("nan"),
                "status": "ok",
            }
            try:
                result = solve_power_allocation(problem)
            except SolverError as e:
                logger.warning("System %s at %.3e W: %s", system_id, threshold, e)
                record["status"] = f"solver_error: {e}"
                result = e.best_result
            if result is not None:
                record["throughput_bps"] = result.throughput_bps
                record["power_used_w"] = result.total_power_used_w
                record["power_loss_pct"] = power_loss_percent(result.total_power_used_w, system.power_budget_w)
            state["records"].append(record)
        logger.debug("Solved threshold %d/%d (%.3e W)", state["index"] + 1, len(state["thresholds"]), threshold)
        state["index"] += 1
        return state

    def check_monotonicity(self, state: SweepState) -> SweepState:
        """Throughput must not drop and power loss must not grow as the threshold is relaxed."""
        for system_id in sorted(state["prepared"]):
            rows = [r for r in state["records"] if r["system"] == system_id and r["status"] == "ok"]
            for prev, cur in zip(rows, rows[1:]):
                if cur["throughput_bps"] < prev["throughput_bps"] * (1.0 - _MONOTONE_RTOL):
                    state["violations"].append(
                        f"System {system_id}: throughput drops from {prev['throughput_bps']:.6e} to "
                        f"{cur['throughput_bps']:.6e} bit/s at {cur['threshold_w']:.3e} W"
                    )
                if cur["power_loss_pct"] > prev["power_loss_pct"] + _LOSS_ATOL:
                    state["violations"].append(
                        f"System {system_id}: power loss grows from {prev['power_loss_pct']:.6f}% to "
                        f"{cur['power_loss_pct']:.6f}% at {cur['threshold_w']:.3e} W"
                    )
        for violation in state["violations"]:
            logger.warning(violation)
        return state

    def should_continue(self, state: SweepState) -> str:
        if state["index"] >= len(state["thresholds"]):
            logger.info("Sweep complete: %d thresholds", len(state["thresholds"]))
            return "check"
        return "solve"

    def create_workflow(self):
        """Create the workflow graph."""
        workflow = StateGraph(SweepState)

        workflow.add_node("prepare", self.prepare_systems)
        workflow.add_node("solve", self.solve_threshold)
        workflow.add_node("check", self.check_monotonicity)

        workflow.add_conditional_edges("prepare", self.should_continue, {"solve": "solve", "check": "check"})
        workflow.add_conditional_edges("solve", self.should_continue, {"solve": "solve", "check": "check"})
        workflow.add_edge("check", END)

        workflow.set_entry_point("prepare")

        return workflow.compile()

    def run(
        self,
        grid: GridSpec,
        systems: Tuple[SystemSpec, ...],
        thresholds: List[float],
        noise_density_w_per_hz: float = DEFAULT_NOISE_DENSITY_W_PER_HZ,
        rel_tol: float = DEFAULT_REL_TOL,
        seed: int = 0,
        max_workers: Optional[int] = None,
    ) -> SweepState:
        state: SweepState = {
            "grid": grid,
            "systems": tuple(systems),
            "thresholds": [float(t) for t in thresholds],
            "noise_density_w_per_hz": noise_density_w_per_hz,
            "rel_tol": rel_tol,
            "seed": seed,
            "max_workers": max_workers,
            "prepared": {},
            "index": 0,
            "records": [],
            "violations": [],
        }
        workflow = self.create_workflow()
        return workflow.invoke(state, {"recursion_limit": 2 * len(state["thresholds"]) + 10})


def export_workflow_graph(output_path: str = "data/sweep_workflow.mmd") -> str:
    """
    Export the sweep graph. `.png` goes through draw_png (needs pygraphviz);
    anything else is written as Mermaid text.
    """
    Path(output_path).parent.mkdir(parents=True, exist_ok=True)
    graph = SweepWorkflow().create_workflow().get_graph()
    if str(output_path).lower().endswith(".png"):
        graph.draw_png(output_path)
    else:
        with open(output_path, "w", encoding="utf-8") as fh:
            fh.write(graph.draw_mermaid())
    logger.info("Workflow graph exported to %s", output_path)
    return output_path
