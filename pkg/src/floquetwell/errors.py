"""Exception types shared across the library."""


class FloquetWellError(Exception):
    """Base class for all library-specific errors."""


class IntegrationError(FloquetWellError):
    """Time integration failed; carries the time that was reached."""

    def __init__(self, message, t_reached):
        super().__init__(f"{message} (reached t = {t_reached:g})")
        self.t_reached = t_reached


class CoalescenceError(FloquetWellError):
    """Floquet eigenvectors have (nearly) coalesced; the requested quantity
    is undefined at an exceptional point."""


class ContractViolationError(FloquetWellError):
    """An operation was called outside its stated precondition."""


class DomainError(FloquetWellError):
    """Inputs lie outside the mathematical domain of the requested formula."""


class TruncationError(FloquetWellError):
    """Fourier-hierarchy truncation too small for the requested drive."""


class EigensolverError(FloquetWellError):
    """Dense eigensolver failed to meet the residual contract."""


class NearSingularError(FloquetWellError):
    """A closed-form denominator is within rounding of zero; carries the
    resonant Fourier index."""

    def __init__(self, message, index):
        super().__init__(f"{message} (resonant index n = {index})")
        self.index = index


class PoleProximityError(FloquetWellError):
    """Evaluation point is too close to a pole of the analytic continuation."""


class ResolutionError(FloquetWellError):
    """Spatial grid does not resolve the potential-well length scales."""


class DivergenceError(FloquetWellError):
    """Field norm ran away (unbounded gain); carries the time stamp."""

    def __init__(self, message, t):
        super().__init__(f"{message} (t = {t:g})")
        self.t = t


class AmbiguityError(FloquetWellError):
    """A scan window contains more than one candidate resonance."""


class QuadratureError(FloquetWellError):
    """Numerical quadrature failed its self-consistency check."""


class SchemaError(FloquetWellError):
    """Structured output (CSV/JSON) does not match the expected schema."""
