"""Numerical laboratory for Moebius-invariant surface geometry in S^n.

Computes canonical light-cone lifts, Schwarzian derivatives, Hopf
differentials, conformal Lorentzian 2-plane lifts driven by a Riccati
equation, adapted moving frames, and the unit-circle family of connections
whose simultaneous flatness certifies the Willmore property.
"""

__version__ = "0.1.0"

from ._backend import BACKEND
from .config import DEFAULT, Tolerances
from .jets import Jet, JetVector
from .minkowski import MobiusTransform, inner, wedge_inner
from .surfaces import SurfaceChart, catalog_get

__all__ = [
    "BACKEND",
    "DEFAULT",
    "Tolerances",
    "Jet",
    "JetVector",
    "MobiusTransform",
    "inner",
    "wedge_inner",
    "SurfaceChart",
    "catalog_get",
    "__version__",
]
