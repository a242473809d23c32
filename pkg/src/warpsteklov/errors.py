"""Exception hierarchy shared across the package."""


class SpectralError(Exception):
    """Base class for numerical failures (CLI exit code 3)."""


class InvalidPotentialError(SpectralError):
    """Potential sample is non-finite or otherwise unusable."""


class NearDirichletError(SpectralError):
    """Spectral point is too close to a Dirichlet eigenvalue (characteristic
    function vanishes), typically because the frequency sits in the Dirichlet
    spectrum for the requested transversal mode."""


class SearchWindowError(SpectralError):
    """Root bracketing failed inside the documented search window."""


class InsufficientSmoothnessError(SpectralError):
    """A derivative beyond the profile's available order was requested."""


class GridError(SpectralError):
    """Evaluation grid is too coarse or malformed for the requested operation."""


class DegenerateTraceError(SpectralError):
    """Eigenfunction trace is identically zero or unusable."""


class CaseMismatchError(SpectralError):
    """Operation applied to a case model it does not cover."""


class ConfigError(Exception):
    """Invalid experiment configuration (CLI exit code 2)."""
