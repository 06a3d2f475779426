"""Exception hierarchy.

Every error raised by the library derives from :class:`HistoshepError`.  The
three intermediate classes map onto the CLI exit codes: input problems (2),
infeasible configurations (3) and numerical failures (4).
"""


class HistoshepError(Exception):
    """Base class for all library errors."""


class InputError(HistoshepError, ValueError):
    """Malformed or inconsistent user input."""


class InfeasibleError(HistoshepError):
    """The requested construction does not exist for this grid."""


class NumericalError(HistoshepError, ArithmeticError):
    """A numerical routine failed its own accuracy checks."""


class NonMonotoneNodes(InputError):
    pass


class LengthMismatch(InputError):
    pass


class NonFiniteInput(InputError):
    pass


class JumpOnNode(InputError):
    pass


class JumpOutsideDomain(InputError):
    pass


class TwoJumpsOneSegment(InputError):
    pass


class AllSegmentsHostJumps(InputError):
    pass


class WindowViolation(InputError):
    pass


class BadK(InputError):
    pass


class BadIndex(InputError):
    pass


class OutOfDomain(InputError):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class UnknownExperiment(InputError):
    pass


class MalformedInput(InputError):
    """A data file could not be parsed; the message names the offending row."""


class InadmissibleGrid(InfeasibleError):
    pass


class DegreeInfeasible(InfeasibleError):
    def __init__(self, message, d_max=None):
        super().__init__(message)
        self.d_max = d_max


class PoolUnderflow(InfeasibleError):
    pass


class CoverageViolation(NumericalError):
    pass


class SingularGram(NumericalError):
    pass


class ResidualTooLarge(NumericalError):
    pass


class QuadratureNonConvergence(NumericalError):
    pass
