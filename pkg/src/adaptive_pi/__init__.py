"""Spatially adaptive projective integration for stiff hyperbolic balance laws."""

from .models import (ComplexSpectrumWarning, EquilibriumState, ModelSystem, hme_linearized, hme_model,
                     hsm_model, scalar_model, spectral_bound)
from .discretization import (Boundary, FluctuationScheme, Grid1D, RelaxationProfile, Scheme, ViscosityScheme,
                             assemble_semi_discrete, split_blocks)
from .integrators import AFE, APFE, APPFE, FE, PFE

__version__ = "0.1.0"
