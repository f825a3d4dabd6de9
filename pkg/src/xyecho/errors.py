"""Exception hierarchy shared by the library and the command line."""


class XYEchoError(Exception):
    """Base class for every error raised by :mod:`xyecho`."""


class ParameterError(XYEchoError, ValueError):
    """Invalid physical or numerical input (odd chain, bad cutoff, ...)."""


class NumericalError(XYEchoError, ArithmeticError):
    """A quantity is singular or an iterative method failed at valid input."""


class ConventionMismatch(NumericalError):
    """The brute-force pair Hamiltonian disagrees with the analytic angles."""
