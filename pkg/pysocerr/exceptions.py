"""
Exceptions raised by pysocerr.

Every leaf also derives from the built-in exception the caller would expect (mostly `ValueError`), so
code written against plain `except ValueError:` keeps working.
"""


class SocError(Exception):
    """Root of all pysocerr errors."""


class InvalidInputError(SocError, ValueError):
    """A non-finite or out-of-range argument, or a violated type invariant."""


class InvalidSpecError(InvalidInputError):
    """Empty or inverted ranges handed to the profile generator."""


class ConfigurationError(SocError, ValueError):
    """Inconsistent noise specification or run configuration."""


class ParseError(SocError, ValueError):
    """A malformed row in an input file."""

    def __init__(self, message, line_number=None):
        super().__init__(message if line_number is None else f"line {line_number}: {message}")
        self.line_number = line_number


class FormatError(SocError, ValueError):
    """Input file with a wrong header, non-monotone or non-uniform timestamps."""


class DegenerateProfileError(SocError, ValueError):
    """The profile carries no load variation (sigma_L = 0)."""


class DegenerateUpdateError(SocError, ArithmeticError):
    """The innovation variance of a measurement update is zero."""


class ToleranceError(SocError):
    """Monte-Carlo and closed-form curves disagree beyond the acceptance tolerance."""
