"""Exception hierarchy shared by the library and the command line.

Every error carries the exit code the command line returns for it: 2 for usage and parse problems, 3 for
numerical failures. Verification failures are not exceptions; they make a report fail and the CLI exit with 1.
"""


class HelixrecError(Exception):
    """Base class of every error raised by helixrec."""

    exit_code = 3


class ExpressionSyntaxError(HelixrecError):
    """Raised when expression text does not follow the grammar.

    Args:
        message (str): What went wrong.
        text (str): The source text.
        offset (int): Byte offset of the offending token in the UTF-8 encoded text.
    """

    exit_code = 2

    def __init__(self, message, text='', offset=0):
        self.text = text
        self.offset = offset
        super().__init__(f'{message} at byte {offset}')


class EvaluationError(HelixrecError):
    """Unbound parameter, math domain error or a non-finite value."""


class ProfileError(HelixrecError):
    exit_code = 2


class ClassificationError(HelixrecError):
    exit_code = 2


class QuadratureError(HelixrecError):
    pass


class IntegrationError(HelixrecError):
    pass


class DegenerateTorsionError(HelixrecError):
    """A formula dividing by the torsion was applied where the torsion vanishes."""


class VerificationError(HelixrecError):
    pass


class SampleFormatError(HelixrecError):
    exit_code = 2


class ConfigError(HelixrecError):
    exit_code = 2
