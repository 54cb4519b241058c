"""diraclab: pseudospectral tools for the 2D half-wave Dirac system.

Simulation of the split half-wave evolution with honeycomb cubic and
Hartree couplings, plus numerical probes of the modulation-space (L^4 and
bilinear) estimates and of the trilinear smoothness-failure scaling.
"""

__version__ = "0.1.0"

from .grid import Grid2D, SpinorField
from .params import DiracParams, critical_index

__all__ = ["Grid2D", "SpinorField", "DiracParams", "critical_index", "__version__"]
