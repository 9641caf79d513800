"""Exception types shared across the package.

Numerical non-convergence is deliberately *not* an exception: integrators
and potential evaluators return their best value together with
``converged=False`` and an honest error estimate, so that long sweeps can
record trouble per point instead of aborting.
"""


class CP3BodyError(Exception):
    """Base class for all package errors."""


class DegenerateGeometry(CP3BodyError):
    """Atom positions coincide, or side lengths admit no embedding."""


class PoleOnAxis(CP3BodyError):
    """Undamped resonance evaluated too close to its real-axis pole."""


class RegionMismatch(CP3BodyError):
    """A potential was requested outside its causal validity region."""


class ImaginaryResidue(CP3BodyError):
    """A physical energy came out with a non-negligible imaginary part."""


class CoincidentPoints(CP3BodyError):
    """Correlation function requested at (nearly) coincident points."""


class GeometryTooLarge(CP3BodyError):
    """Atom configuration does not fit inside the quantization box."""


class ConfigParseError(CP3BodyError):
    """Run configuration file is malformed or violates the schema."""
