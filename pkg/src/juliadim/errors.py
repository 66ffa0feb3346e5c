"""Exception taxonomy shared by all modules.

Every error carries a short machine-readable ``code`` so the CLI can map
failures onto exit codes without string matching.
"""


class JuliaDimError(Exception):
    """Base class for all library errors."""

    code = "ERROR"


class AmbiguousBranchError(JuliaDimError):
    """Both quadratic preimages are equally close to the hint."""

    code = "AMBIGUOUS_BRANCH"


class NoConvergenceError(JuliaDimError):
    """An iterative solver exhausted its iteration cap."""

    code = "NO_CONVERGENCE"


class LevelExceededError(JuliaDimError):
    """A dyadic angle or cylinder index is finer than the table resolution."""

    code = "LEVEL_EXCEEDED"


class PoleError(JuliaDimError):
    """Evaluation requested too close to a pole."""

    code = "POLE"


class BranchCutError(JuliaDimError):
    """Principal-branch logarithm undefined for this argument."""

    code = "BRANCH_CUT"


class WrongBranchError(JuliaDimError):
    """The inverse branch fixing the fixed points cannot be resolved."""

    code = "WRONG_BRANCH"


class BracketFailureError(JuliaDimError):
    """Root bracketing failed: no sign change over the bracket."""

    code = "BRACKET_FAILURE"


class NoSignChangeError(JuliaDimError):
    """Root finder got a bracket on which the function does not change sign."""

    code = "NO_SIGN_CHANGE"


class ToleranceNotMetError(JuliaDimError):
    """Quadrature could not reach the requested tolerance."""

    code = "TOLERANCE_NOT_MET"


class InvalidDimensionError(JuliaDimError):
    """Dimension parameter outside the admissible interval (1, 3/2)."""

    code = "INVALID_DIMENSION"


class ParseError(JuliaDimError):
    """Malformed user input (CLI argument or config file)."""

    code = "PARSE_ERROR"
