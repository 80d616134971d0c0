"""Channel gain models and round-robin RB-to-user assignment."""

import logging
from src._compat import StrEnum

import numpy as np

from src.exceptions import ConfigurationError, ParameterRangeError

logger = logging.getLogger(__name__)

MULTIPATH_TAPS = 8
MULTIPATH_DECAY_TAPS = 2.0
GAIN_FLOOR = 1e-12


class ChannelModel(StrEnum):
    FLAT = "flat"
    MULTIPATH = "multipath"

    @classmethod
    def parse(cls, value: str) -> "ChannelModel":
        try:
            return cls(str(value).lower())
        except ValueError:
            allowed = ", ".join(m.value for m in cls)
            raise ConfigurationError(f"Unknown channel model '{value}'; allowed: {allowed}") from None


def round_robin_users(subcarriers, rb_size: int, num_users: int) -> np.ndarray:
    """User index of every subcarrier; RBs are dealt to users in turn."""
    if rb_size < 1 or num_users < 1:
        raise ParameterRangeError("rb_size and num_users must be positive")
    subcarriers = np.asarray(subcarriers, dtype=int)
    rb_index = (subcarriers - subcarriers.min()) // rb_size
    return rb_index % num_users


def multipath_frequency_response(rng: np.random.Generator, grid_size: int) -> np.ndarray:
    """|H(k)|² over the grid for one exponentially decaying Rayleigh tap profile."""
    profile = np.exp(-np.arange(MULTIPATH_TAPS) / MULTIPATH_DECAY_TAPS)
    profile /= profile.sum()
    taps = np.sqrt(profile / 2.0) * (rng.standard_normal(MULTIPATH_TAPS) + 1j * rng.standard_normal(MULTIPATH_TAPS))
    response = np.fft.fft(taps, grid_size)
    return np.abs(response) ** 2


def channel_gains(
    model,
    subcarriers,
    rb_size: int,
    num_users: int,
    grid_size: int,
    seed: int = 0,
    stream: int = 0,
) -> np.ndarray:
    """
    Per-subcarrier power gains g_n.

    `stream` separates the random draws of different systems sharing a seed.
    """
    model = ChannelModel.parse(model)
    subcarriers = np.asarray(subcarriers, dtype=int)
    if model is ChannelModel.FLAT:
        return np.ones(subcarriers.size)

    if np.any(subcarriers < 0) or np.any(subcarriers >= grid_size):
        raise ParameterRangeError("Subcarrier indices must lie on the grid")
    rng = np.random.default_rng([int(seed), int(stream)])
    responses = np.stack([multipath_frequency_response(rng, grid_size) for _ in range(num_users)])
    users = round_robin_users(subcarriers, rb_size, num_users)
    gains = np.maximum(responses[users, subcarriers], GAIN_FLOOR)
    logger.debug("Drew multipath gains for %d users (seed=%d, stream=%d)", num_users, seed, stream)
    return gains
