"""Exception hierarchy.

Every error carries a short machine-readable ``code`` that the command line
front end prints as a prefix (``E_DENSITY_FLOOR: ...``).
"""


class EvidenceError(Exception):
    """Base class for all errors raised by kdevidence."""

    code = "E_NUMERIC"


class EmptyDataset(EvidenceError, ValueError):
    code = "E_EMPTY_DATASET"


class InvalidObservation(EvidenceError, ValueError):
    code = "E_INVALID_OBSERVATION"


class InvalidScale(EvidenceError, ValueError):
    code = "E_INVALID_SCALE"


class SampleTooSmall(EvidenceError, ValueError):
    code = "E_SAMPLE_TOO_SMALL"


class BadInitialization(EvidenceError, ValueError):
    code = "E_BAD_INITIALIZATION"


class DegenerateSample(EvidenceError, ValueError):
    code = "E_DEGENERATE_SAMPLE"


class OutOfGridRange(EvidenceError, ValueError):
    code = "E_OUT_OF_GRID"


class EmptyInput(EvidenceError, ValueError):
    code = "E_EMPTY_INPUT"


class NonFiniteLogWeight(EvidenceError, ValueError):
    code = "E_NONFINITE_WEIGHT"


class DensityFloorViolation(EvidenceError):
    """The density estimate at a posterior draw fell to or below the floor.

    Usually means the posterior sample and the model disagree, or the
    density estimate does not cover the draw.
    """

    code = "E_DENSITY_FLOOR"

    def __init__(self, theta, density, floor):
        self.theta = theta
        self.density = density
        self.floor = floor
        super().__init__(
            f"density estimate {density:.3g} <= floor {floor:.3g} at theta={theta!r}; "
            "the posterior sample probably does not match the model"
        )


class EmptySupport(EvidenceError):
    code = "E_EMPTY_SUPPORT"


class ToleranceNotMet(EvidenceError):
    """Adaptive quadrature ran out of depth before reaching the tolerance.

    ``best_value`` holds the log-integral computed anyway and
    ``achieved_error`` the summed local error estimate (linear scale,
    relative to the shifted integrand).
    """

    code = "E_TOLERANCE"

    def __init__(self, best_value, achieved_error, abs_tol):
        self.best_value = best_value
        self.achieved_error = achieved_error
        self.abs_tol = abs_tol
        super().__init__(
            f"tolerance {abs_tol:.3g} not met (achieved {achieved_error:.3g}); "
            f"best value {best_value!r}"
        )


class SampleFileError(EvidenceError, ValueError):
    """Malformed sample or data file; ``lineno`` is 1-based."""

    code = "E_PARSE"

    def __init__(self, path, lineno, message):
        self.path = path
        self.lineno = lineno
        super().__init__(f"{path}:{lineno}: {message}")
