"""Exception hierarchy.

Singularity errors carry the time (or parameter) at which the synthesis
formula broke down so the CLI can report it.
"""


class SpinforgeError(Exception):
    """Base class for every error raised by the package."""


class InvalidState(SpinforgeError, ValueError):
    """A vector, spinor or matrix violates its normalization invariant."""


class NonFiniteField(SpinforgeError, ValueError):
    """The driving field evaluated to inf/nan on the integration grid."""

    def __init__(self, t):
        self.t = float(t)
        super().__init__(f"field is not finite at t={self.t!r}")


class SingularityError(SpinforgeError, ArithmeticError):
    """A synthesis or quadrature formula hit a vanishing denominator."""

    def __init__(self, t, detail=""):
        self.t = float(t)
        msg = f"singular at t={self.t!r}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class EquatorSingularity(SingularityError):
    """|n3| vanished, so the pointwise inverse cannot be resolved."""


class DenominatorSingularity(SingularityError):
    """The two-axis inverse denominator vanished."""


class SouthPoleSingularity(SingularityError):
    """1 + n3 vanished inside the solid-angle integrand."""


class ChiDegenerate(SpinforgeError, ArithmeticError):
    """cos(chi) = 0 makes the constant-b3 family undefined."""

    def __init__(self, chi):
        self.chi = float(chi)
        super().__init__(f"cos(chi) vanishes for chi={self.chi!r}")


class NotMaximalResonance(SpinforgeError, ValueError):
    """Full transfer |+> -> |-> is impossible unless lambda = 0."""


class OpenTrajectory(SpinforgeError, ValueError):
    """A trajectory handed to the solid-angle quadrature does not close."""


class LoopConditionViolated(SpinforgeError, ValueError):
    """alpha(tau), beta(tau) are not integer multiples of 2*pi."""


class NotCyclic(SpinforgeError, ValueError):
    """U(tau) is not the identity modulo phase."""
