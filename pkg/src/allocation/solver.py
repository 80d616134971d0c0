"""
Throughput-maximizing power allocation under a power budget and an
interference cap.

The KKT conditions give P_n = max(0, 1/(λ + μ i_n) - σ_n/g_n); λ is found by
bisection for each trial μ, and μ by an outer bisection. Both run on log scale
and keep the feasible end of the bracket.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from src.exceptions import ContractViolationError, ParameterRangeError, SolverError
from src.utils.units import dbm_per_hz_to_watts_per_hz

logger = logging.getLogger(__name__)

DEFAULT_NOISE_DENSITY_W_PER_HZ = dbm_per_hz_to_watts_per_hz(-174.0)
FEASIBILITY_TOL = 1e-9
_LOG_TOL = 1e-14
_LAMBDA_FLOOR = 1e-300
_MU_CEILING = 1e300


@dataclass
class AllocationProblem:
    """One system's allocation problem; vectors are per subcarrier."""

    channel_gains: np.ndarray
    interference_coeffs: np.ndarray
    power_budget_w: float
    interference_threshold_w: float
    subcarrier_spacing_hz: float = 15e3
    noise_density_w_per_hz: float = DEFAULT_NOISE_DENSITY_W_PER_HZ
    incoming_interference_w: Optional[np.ndarray] = None

    def __post_init__(self):
        self.channel_gains = np.asarray(self.channel_gains, dtype=float)
        self.interference_coeffs = np.asarray(self.interference_coeffs, dtype=float)
        n = self.channel_gains.size
        if n == 0:
            raise ParameterRangeError("Allocation needs at least one subcarrier")
        if self.interference_coeffs.shape != self.channel_gains.shape:
            raise ParameterRangeError(
                f"{n} channel gains but {self.interference_coeffs.size} interference coefficients"
            )
        if np.any(~np.isfinite(self.channel_gains)) or np.any(self.channel_gains <= 0):
            raise ParameterRangeError("Channel gains must be finite and > 0")
        if np.any(~np.isfinite(self.interference_coeffs)) or np.any(self.interference_coeffs < 0):
            raise ParameterRangeError("Interference coefficients must be finite and >= 0")
        for name in ("power_budget_w", "interference_threshold_w", "subcarrier_spacing_hz", "noise_density_w_per_hz"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ParameterRangeError(f"{name} must be finite and > 0, got {value!r}")
        if self.incoming_interference_w is None:
            self.incoming_interference_w = np.zeros(n)
        else:
            self.incoming_interference_w = np.asarray(self.incoming_interference_w, dtype=float)
            if self.incoming_interference_w.shape != self.channel_gains.shape:
                raise ParameterRangeError("incoming_interference_w must have one entry per subcarrier")
            if np.any(self.incoming_interference_w < 0):
                raise ParameterRangeError("incoming_interference_w must be >= 0")

    @property
    def num_subcarriers(self) -> int:
        return self.channel_gains.size

    @property
    def noise_power_w(self) -> np.ndarray:
        """σ_n = N0·Δf plus incoming interference."""
        return self.noise_density_w_per_hz * self.subcarrier_spacing_hz + self.incoming_interference_w

    @property
    def inverse_quality(self) -> np.ndarray:
        """σ_n / g_n, the water floor of each subcarrier."""
        return self.noise_power_w / self.channel_gains


@dataclass
class AllocationResult:
    powers_w: np.ndarray
    total_power_used_w: float
    interference_w: float
    throughput_bps: float
    dual_power: float
    dual_interference: float
    binding: Tuple[str, ...] = field(default_factory=tuple)
    iterations: int = 0


def _powers(floor: np.ndarray, coeffs: np.ndarray, lam: float, mu: float) -> np.ndarray:
    with np.errstate(divide="ignore"):
        level = 1.0 / (lam + mu * coeffs)
    return np.maximum(level - floor, 0.0)


def _log_bisect(predicate, lo: float, hi: float, max_iter: int, what: str) -> Tuple[float, int]:
    """
    Smallest x in [lo, hi] (log scale) with predicate(x) true; predicate(hi)
    must hold. Returns the hi end of the final bracket.
    """
    log_lo, log_hi = math.log(lo), math.log(hi)
    for iteration in range(1, max_iter + 1):
        if log_hi - log_lo <= _LOG_TOL * max(1.0, abs(log_hi)):
            return math.exp(log_hi), iteration
        log_mid = 0.5 * (log_lo + log_hi)
        if log_mid in (log_lo, log_hi):
            return math.exp(log_hi), iteration
        if predicate(math.exp(log_mid)):
            log_hi = log_mid
        else:
            log_lo = log_mid
    raise SolverError(f"{what} bisection did not converge in {max_iter} iterations")


def _water_level(problem: AllocationProblem, mu: float, max_iter: int) -> Tuple[float, int]:
    """λ >= 0 meeting the power budget for a given μ (0 when the budget is slack)."""
    floor, coeffs = problem.inverse_quality, problem.interference_coeffs
    budget = problem.power_budget_w
    if mu > 0 and np.all(coeffs > 0) and _powers(floor, coeffs, 0.0, mu).sum() <= budget:
        return 0.0, 0
    # At λ = 1/min(floor) every subcarrier is below its floor
    upper = 1.0 / float(np.min(floor))
    return _log_bisect(
        lambda lam: _powers(floor, coeffs, lam, mu).sum() <= budget,
        _LAMBDA_FLOOR,
        upper,
        max_iter,
        "Power-budget",
    )


def throughput(result: AllocationResult, problem: AllocationProblem) -> float:
    """Σ_n Δf·log2(1 + P_n g_n / σ_n) in bit/s."""
    powers = np.asarray(result.powers_w if isinstance(result, AllocationResult) else result, dtype=float)
    snr = powers * problem.channel_gains / problem.noise_power_w
    return float(problem.subcarrier_spacing_hz * np.sum(np.log1p(snr)) / math.log(2.0))


def power_loss_percent(used_w: float, budget_w: float) -> float:
    """Share of the budget left unused, in percent, clamped to [0, 100]."""
    if budget_w <= 0:
        raise ParameterRangeError("budget_w must be > 0")
    if used_w < 0 or used_w > budget_w * (1.0 + FEASIBILITY_TOL):
        raise ContractViolationError(f"Used power {used_w!r} W is outside [0, {budget_w!r}] W")
    return float(min(max(100.0 - used_w / budget_w * 100.0, 0.0), 100.0))


def solve_power_allocation(problem: AllocationProblem, max_iter: int = 200) -> AllocationResult:
    """
    Maximize Σ Δf·log2(1 + P_n g_n/σ_n) s.t. Σ P_n <= P_max, Σ P_n i_n <= I_th, P_n >= 0.

    Raises:
        SolverError: a bisection level exhausted max_iter; best_result holds
            the last feasible iterate when there is one.
    """
    floor, coeffs = problem.inverse_quality, problem.interference_coeffs
    cap = problem.interference_threshold_w
    iterations = 0

    def build(lam: float, mu: float) -> AllocationResult:
        powers = _powers(floor, coeffs, lam, mu)
        binding = tuple(name for name, dual in (("power", lam), ("interference", mu)) if dual > 0)
        result = AllocationResult(
            powers_w=powers,
            total_power_used_w=float(powers.sum()),
            interference_w=float(powers @ coeffs),
            throughput_bps=0.0,
            dual_power=lam,
            dual_interference=mu,
            binding=binding,
            iterations=iterations,
        )
        result.throughput_bps = throughput(result, problem)
        return result

    def interference_ok(mu: float) -> bool:
        nonlocal iterations
        lam, used = _water_level(problem, mu, max_iter)
        iterations += used
        return float(_powers(floor, coeffs, lam, mu) @ coeffs) <= cap

    lam0, used = _water_level(problem, 0.0, max_iter)
    iterations += used
    if float(_powers(floor, coeffs, lam0, 0.0) @ coeffs) <= cap:
        logger.debug("Interference cap slack; pure water-filling (lambda=%g)", lam0)
        return build(lam0, 0.0)

    mu_hi = 1.0
    while not interference_ok(mu_hi):
        mu_hi *= 10.0
        if mu_hi > _MU_CEILING:
            raise SolverError("Could not bracket the interference multiplier")
    mu_lo = mu_hi / 10.0 if mu_hi > 1.0 else _LAMBDA_FLOOR

    try:
        mu, used = _log_bisect(interference_ok, mu_lo, mu_hi, max_iter, "Interference")
    except SolverError as exc:
        lam_hi, _ = _water_level(problem, mu_hi, max_iter)
        raise SolverError(str(exc), best_result=build(lam_hi, mu_hi)) from exc
    iterations += used
    lam, used = _water_level(problem, mu, max_iter)
    iterations += used
    result = build(lam, mu)
    logger.debug(
        "Allocation solved: lambda=%g mu=%g used=%g W interference=%g W",
        lam,
        mu,
        result.total_power_used_w,
        result.interference_w,
    )
    return result
