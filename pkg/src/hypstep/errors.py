"""Exception hierarchy shared by all hypstep modules."""


class HypstepError(Exception):
    """Base class for every error raised by the library."""


class GammaPoleError(HypstepError, ArithmeticError):
    """A Gamma function argument sits on a pole (non-positive integer)."""

    def __init__(self, message, entry=None):
        super().__init__(message)
        self.entry = entry


class HypergeometricParameterError(HypstepError, ValueError):
    """Lower hypergeometric parameter at (or within 1e-8 of) a non-positive integer."""


class NonConvergenceError(HypstepError, ArithmeticError):
    """A series or iterative procedure failed to reach tolerance."""


class BranchPointError(HypstepError, ValueError):
    """Momentum placed on a branch point of k'(k)."""


class ThresholdError(HypstepError, ValueError):
    """Quantity requested at (or too close to) the threshold k = sqrt(V0)."""


class InadmissibleIndexError(HypstepError, ValueError):
    """Anti-bound index n with n <= lambda (no pole of the S-matrix)."""


class NodeError(HypstepError, ValueError):
    """SUSY seed has a zero on the real line."""


class WronskianZeroError(HypstepError, ValueError):
    """Darboux-Crum Wronskian vanishes at a real point."""


class UnwrapAmbiguityError(HypstepError, ValueError):
    """Adjacent principal phases are too far apart to unwrap unambiguously."""


class DomainError(HypstepError, ValueError):
    """Argument outside the domain of a physical formula."""


class OracleError(HypstepError, RuntimeError):
    """The ODE integrator failed (step limit, stiffness)."""


class ConfigError(HypstepError, ValueError):
    """Invalid command-line or run configuration."""
