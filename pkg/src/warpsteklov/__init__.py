"""Steklov spectra of warped products [0,1] x K and their localization.

The pipeline: a warping profile defines an effective 1D potential; the
characteristic and Weyl-Titchmarsh functions of that potential assemble a
2x2 Dirichlet-to-Neumann block per transversal eigenvalue; eigenvalues,
gaps, eigenfunction traces, asymptotic laws and flea-on-the-elephant sweeps
follow from the blocks.
"""

from .extscalar import ExtScalar
from .errors import (
    CaseMismatchError,
    ConfigError,
    DegenerateTraceError,
    GridError,
    InsufficientSmoothnessError,
    InvalidPotentialError,
    NearDirichletError,
    SearchWindowError,
    SpectralError,
)
from .sturm import (
    IntegratorSettings,
    Potential,
    FundamentalData,
    WeylData,
    SolutionTrace,
    propagate,
    weyl_data,
    weyl_traces,
    dirichlet_values,
    hadamard_check,
    bvp_oracle,
)

__version__ = "0.1.0"
