"""Virtual Euler characteristics of stable pair moduli on toric surfaces by torus localization."""

from .engine import CONVENTION_VERSION, Coefficient, evir, evir_series, global_coefficient, m_to_n, n_to_m
from .toricgeom import load_surface, surface_from_fan, surface_p2

__version__ = "0.1.0"

__all__ = [
    "CONVENTION_VERSION",
    "Coefficient",
    "evir",
    "evir_series",
    "global_coefficient",
    "load_surface",
    "m_to_n",
    "n_to_m",
    "surface_from_fan",
    "surface_p2",
]
