"""Numerical laboratory for one-dimensional dislocated periodic Schroedinger operators.

Bands and Dirac points of the periodic operator, spectra of the effective
Dirac operator, gap eigenvalues of the dislocated operator, and the sweep
comparing them.
"""

__version__ = "0.1.0"

from .errors import HypothesisError, InvariantError, LabError, NoGapError, ValidationError  # noqa: E402
