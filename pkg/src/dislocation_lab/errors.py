"""Exception hierarchy.

``ValidationError`` covers bad inputs (exit status 1 on the command line);
``InvariantError`` covers numerical checks that failed at runtime (exit
status 2).
"""


class LabError(Exception):
    pass


class ValidationError(LabError, ValueError):
    pass


class InvariantError(LabError, RuntimeError):
    pass


class NoGapError(InvariantError):
    pass


class HypothesisError(InvariantError):
    """A nondegeneracy hypothesis (nu_star != 0 or theta_star != 0) fails."""
