# Threshold sweeps live in src.scenario.sweep; importing them here would loop
# back through src.workflow.
from src.scenario.channel import ChannelModel, channel_gains, round_robin_users
from src.scenario.grid import (
    GridSpec,
    SystemSpec,
    WaveformSpec,
    build_default_scenario,
    split_grid,
)

__all__ = [
    "ChannelModel",
    "GridSpec",
    "SystemSpec",
    "WaveformSpec",
    "build_default_scenario",
    "channel_gains",
    "round_robin_users",
    "split_grid",
]
