"""Exception and warning types raised by :mod:`lrd_spectra`."""


class LRDSpectraError(Exception):
    """Base class for all package errors."""


class DomainError(LRDSpectraError, ValueError):
    """Argument outside the domain of a function or constant."""


class PoleError(DomainError):
    """Evaluation at a pole (e.g. the gamma function at a non-positive integer)."""


class SingularParameterError(DomainError):
    """A closed-form constant is singular at the requested parameter."""


class UnsupportedDegreeError(DomainError):
    """Spherical-harmonic degree not supported by the transform engine."""


class DivergenceError(LRDSpectraError, ArithmeticError):
    """A function diverges at the requested point (e.g. K_nu(0), Ci(0))."""


class GammaOverflowError(LRDSpectraError, OverflowError):
    """Result exceeds the representable floating point range."""


class TailDivergenceError(LRDSpectraError, ArithmeticError):
    """Panel contributions of an infinite oscillatory integral fail to contract."""


class IntegrabilityError(TailDivergenceError):
    """Covariance decays too slowly for the requested inversion formula."""


class UnavailableQuantityError(LRDSpectraError, KeyError):
    """A model does not provide the requested quantity."""

    def __str__(self):  # KeyError quotes its argument otherwise
        return str(self.args[0]) if self.args else ""


class ConfigError(LRDSpectraError, ValueError):
    """Malformed run configuration (grid spec, parameter syntax, figure id)."""


class NonConvergenceWarning(UserWarning):
    """Quadrature stopped before reaching the requested tolerance."""
