"""
Breadth-first adaptive Simpson quadrature over PSD curves.

The initial partition comes from the curve's knot grid, so piecewise-linear
curves (UFMC) are integrated exactly and sinc-type curves start from
intervals no wider than a lobe.
"""

import logging
from dataclasses import dataclass

import numpy as np

from src.exceptions import ParameterRangeError, QuadratureError
from src.waveforms.psd import PsdCurve

logger = logging.getLogger(__name__)

DEFAULT_REL_TOL = 1e-9
DEFAULT_MAX_DEPTH = 40
_MAX_INTERVALS = 1 << 22


@dataclass(frozen=True)
class BandSpec:
    """Victim band [start_hz, start_hz + width_hz]."""

    start_hz: float
    width_hz: float

    def __post_init__(self):
        if not (self.width_hz > 0 and np.isfinite(self.width_hz)):
            raise ParameterRangeError(f"Band width must be finite and > 0, got {self.width_hz!r}")
        if not np.isfinite(self.start_hz):
            raise ParameterRangeError("Band start must be finite")

    @property
    def stop_hz(self) -> float:
        return self.start_hz + self.width_hz

    def shifted(self, offset_hz: float) -> "BandSpec":
        return BandSpec(self.start_hz + offset_hz, self.width_hz)


def _simpson(width, f_left, f_mid, f_right):
    return width / 6.0 * (f_left + 4.0 * f_mid + f_right)


def integrate_psd(
    curve: PsdCurve,
    band: BandSpec,
    rel_tol: float = DEFAULT_REL_TOL,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> float:
    """
    Power of `curve` inside `band`, clipped to the curve's support.

    Raises:
        ParameterRangeError: rel_tol outside (1e-14, 1e-2).
        QuadratureError: intervals still unresolved after max_depth bisections,
            or more than 2**22 of them pending at once.
    """
    if not 1e-14 < rel_tol < 1e-2:
        raise ParameterRangeError(f"rel_tol must lie in (1e-14, 1e-2), got {rel_tol!r}")

    lo = max(band.start_hz, curve.support_hz[0])
    hi = min(band.stop_hz, curve.support_hz[1])
    if hi <= lo:
        return 0.0
    total_width = hi - lo

    edges = np.concatenate(([lo], curve.knots_within(lo, hi), [hi]))
    a, b = edges[:-1], edges[1:]
    m = 0.5 * (a + b)
    fa, fm, fb = np.split(curve.evaluate_clipped(np.concatenate((a, m, b))), 3)
    coarse = _simpson(b - a, fa, fm, fb)

    accepted = 0.0
    for depth in range(max_depth + 1):
        left_mid = 0.5 * (a + m)
        right_mid = 0.5 * (m + b)
        f_lm, f_rm = np.split(curve.evaluate_clipped(np.concatenate((left_mid, right_mid))), 2)
        left = _simpson(m - a, fa, f_lm, fm)
        right = _simpson(b - m, fm, f_rm, fb)
        fine = left + right
        error = fine - coarse

        estimate = abs(accepted + np.sum(fine))
        done = np.abs(error) <= 15.0 * rel_tol * estimate * ((b - a) / total_width)
        accepted += float(np.sum(fine[done] + error[done] / 15.0))

        if np.all(done):
            logger.debug("Quadrature converged at depth %d over [%g, %g] Hz", depth, lo, hi)
            return max(accepted, 0.0)

        keep = ~done
        if 2 * int(np.count_nonzero(keep)) > _MAX_INTERVALS:
            a, coarse = a[keep], fine[keep]
            break
        a, m, b = a[keep], m[keep], b[keep]
        fa, fm, fb = fa[keep], fm[keep], fb[keep]
        f_lm, f_rm = f_lm[keep], f_rm[keep]
        left, right = left[keep], right[keep]

        # Children: [a, m] with midpoint left_mid, [m, b] with midpoint right_mid
        a, m, b = np.concatenate((a, m)), np.concatenate((0.5 * (a + m), 0.5 * (m + b))), np.concatenate((m, b))
        fa, fm, fb = np.concatenate((fa, fm)), np.concatenate((f_lm, f_rm)), np.concatenate((fm, fb))
        coarse = np.concatenate((left, right))

    partial = accepted + float(np.sum(coarse))
    raise QuadratureError(
        f"Quadrature did not converge: {len(a)} intervals unresolved at depth {depth} (limit {max_depth})",
        partial_estimate=partial,
        unresolved_intervals=len(a),
    )
