"""Exception hierarchy shared by all modules."""


class MayerFieldError(Exception):
    """Base class for every error raised by the package."""


class ConfigError(MayerFieldError):
    pass


class SeedInvalid(MayerFieldError):
    pass


class ZeroDensityRange(MayerFieldError):
    pass


class GridMismatch(MayerFieldError):
    pass


class NonpositiveAmplitude(MayerFieldError):
    pass


class NonpositiveDensity(MayerFieldError):
    pass


class NonpositiveDistance(MayerFieldError):
    pass


class WindowTooNarrow(MayerFieldError):
    pass


class IncommensurateWave(MayerFieldError):
    pass


class NonPeriodicLattice(MayerFieldError):
    pass


class VanishingDenominator(MayerFieldError):
    pass


class DivergenceTooLarge(MayerFieldError):
    pass


class NonTimelikeField(MayerFieldError):
    pass


class NonTimelikeVelocity(MayerFieldError):
    pass


class NotTimelike(MayerFieldError):
    pass


class NoNontrivialSolution(MayerFieldError):
    """The normalization condition pi.pi = (n0 c)^2 fails, i.e. det M != 0."""
