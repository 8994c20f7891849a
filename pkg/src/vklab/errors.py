"""Exception types shared across the package."""


class VkLabError(Exception):
    """Base class for all vklab errors."""


class NonFiniteValue(VkLabError):
    """A computed sample is NaN or infinite (singular profile, or a grid touching t = 0)."""


class GridMismatch(VkLabError):
    """Two fields or profiles live on incompatible grids."""


class ResolutionTooCoarse(VkLabError):
    """The requested 2D grid cannot host the finite-difference stencils."""


class InvalidProfile(VkLabError):
    """A radial profile violates its construction invariants."""


class NoPlateau(VkLabError):
    """The profile has no usable annulus with vanishing first and second derivative."""


class NotAdmissible(VkLabError):
    """A variation failed the linearized-constraint test at the checked entry point."""


class IndexOutOfRange(VkLabError, IndexError):
    """A family member index outside the constructed truncation range."""


class SpecInvalid(VkLabError):
    """A family specification violates its invariants."""


class PreconditionNotVerified(VkLabError):
    """An operation requiring prior verification was called without it."""


class ConfigError(VkLabError):
    """Invalid run configuration (bad flag value, missing file, malformed config)."""
