"""Exception and warning types raised across the package."""


class SplitQuatError(Exception):
    """Base class for all errors raised by splitquat."""


class SingularElement(SplitQuatError, ZeroDivisionError):
    """Inverse requested for an element with N(Z) numerically zero."""


class StencilOutsideDomain(SplitQuatError):
    """A finite-difference stencil point could not be evaluated."""


class DegenerateFrame(SplitQuatError):
    """A tangent frame handed to a 3-form evaluation is rank deficient."""


class IntegrandSingular(SplitQuatError):
    """The integrand is singular (or numerically so) at a quadrature node."""


class NonConvergent(SplitQuatError):
    """An extrapolation or refinement loop failed its stability test."""


class WindowTooWide(SplitQuatError, ValueError):
    """A theta window reaches outside the interval where the rewrite is valid."""


class ConfigError(SplitQuatError, ValueError):
    """Unknown experiment, unknown key, or malformed value in a run config."""


class ConeTangency(UserWarning):
    """The boundary meets the null cone of X0 (nearly) tangentially."""
