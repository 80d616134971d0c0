"""Unit conversions between the user-facing dB scales and internal watts / Hz."""

import numpy as np


def _scalar_or_array(result: np.ndarray):
    return float(result) if result.ndim == 0 else result


def dbw_to_watts(value_dbw):
    """dBW -> W."""
    return _scalar_or_array(10.0 ** (np.asarray(value_dbw, dtype=float) / 10.0))


def dbm_to_watts(value_dbm):
    """dBm -> W."""
    return dbw_to_watts(np.asarray(value_dbm, dtype=float) - 30.0)


def watts_to_dbw(value_w):
    """W -> dBW. Non-positive powers map to -inf."""
    value_w = np.asarray(value_w, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        db = np.where(value_w > 0, 10.0 * np.log10(np.abs(value_w)), -np.inf)
    return _scalar_or_array(db)


def watts_to_dbm(value_w):
    """W -> dBm."""
    return watts_to_dbw(value_w) + 30.0


def dbm_per_hz_to_watts_per_hz(value_dbm_per_hz: float) -> float:
    # Same scaling as dBm -> W; separate name keeps call sites readable
    return float(dbm_to_watts(value_dbm_per_hz))


def power_ratio_to_db(ratio, floor_ratio: float = 1e-30):
    """10*log10 of a power ratio, floored so that zeros never become -inf."""
    ratio = np.maximum(np.asarray(ratio, dtype=float), floor_ratio)
    return _scalar_or_array(10.0 * np.log10(ratio))
