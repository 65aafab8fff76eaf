"""Exception types shared across the toolkit."""


class MfocError(Exception):
    """Base class for all toolkit errors."""


class RankDeficient(MfocError):
    """Least-squares regressor has rank below the number of unknowns.

    For the learning equations this signals insufficient excitation in
    the collected data.
    """


class NumericalBlowup(MfocError):
    """A state or weight left the finite range (unstable closed loop or
    divergent learning rate)."""


class Asymmetric(MfocError):
    """A matrix required to be symmetric is not, beyond tolerance."""


class EmptyWindow(MfocError):
    """A data window holds fewer than two samples."""


class SingularLyapunov(MfocError):
    """The Kronecker system of a Lyapunov equation is singular or its
    solution fails the residual check."""


class NotConverged(MfocError):
    """An iteration hit its cap before meeting the stopping rule."""


class NotHurwitz(MfocError):
    """A closed-loop matrix expected to be Hurwitz has an eigenvalue with
    nonnegative real part."""


class ConfigError(MfocError):
    """Malformed or out-of-range experiment configuration."""
