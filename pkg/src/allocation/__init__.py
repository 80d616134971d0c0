from src.allocation.solver import (
    DEFAULT_NOISE_DENSITY_W_PER_HZ,
    AllocationProblem,
    AllocationResult,
    power_loss_percent,
    solve_power_allocation,
    throughput,
)

__all__ = [
    "AllocationProblem",
    "AllocationResult",
    "DEFAULT_NOISE_DENSITY_W_PER_HZ",
    "power_loss_percent",
    "solve_power_allocation",
    "throughput",
]
