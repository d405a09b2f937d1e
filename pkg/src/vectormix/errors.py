"""Exception types shared across the package."""


class VectormixError(Exception):
    """Base class for all package-specific errors."""


class GridError(VectormixError, ValueError):
    """Grid parameters invalid, or two fields live on incompatible grids."""


class RepresentabilityError(GridError):
    """A physical sampling size is too small to represent the retained modes."""


class NonIntegrableModeError(VectormixError, ValueError):
    """A negative-order multiplier was applied to a field with nonzero mean."""


class ParameterError(VectormixError, ValueError):
    """A numerical parameter is outside its admissible range."""


class ConfigError(VectormixError, ValueError):
    """Run-configuration text failed to parse or validate.

    ``line`` carries the 1-based offending line number when known.
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class StiffnessError(VectormixError, RuntimeError):
    """Adaptive stepping failed: error stayed above tolerance at the minimum step.

    Carries diagnostic attributes ``t``, ``dt`` and ``err`` describing the
    rejected step.
    """

    def __init__(self, message, t, dt, err):
        self.t = t
        self.dt = dt
        self.err = err
        super().__init__(f"{message} (t={t:.6g}, dt={dt:.3g}, err={err:.3g})")


class SnapshotFormatError(VectormixError, ValueError):
    """A snapshot file is malformed or has an unsupported version."""
