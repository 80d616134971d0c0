from src.interference.profile import (
    InterferenceProfile,
    ProfileCache,
    interference_coefficient,
    interference_profile,
    snap_distance,
)
from src.interference.quadrature import DEFAULT_REL_TOL, BandSpec, integrate_psd

__all__ = [
    "BandSpec",
    "DEFAULT_REL_TOL",
    "InterferenceProfile",
    "ProfileCache",
    "integrate_psd",
    "interference_coefficient",
    "interference_profile",
    "snap_distance",
]
