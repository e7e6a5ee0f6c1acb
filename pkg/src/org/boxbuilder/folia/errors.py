"""
Exception hierarchy for folia.

Every error carries an ``exit_code`` used by the command-line surface:
0 ok, 1 verdict-false, 2 input, 3 budget, 4 ambient.
"""


class FoliaError(RuntimeError):
    exit_code: int = 2


class InhomogeneousError(FoliaError):
    pass


class ZeroPolynomialError(FoliaError):
    pass


class ArityError(FoliaError):
    pass


class DegreeMismatchError(FoliaError):
    pass


class RingMismatchError(FoliaError):
    pass


class AmbientMismatchError(FoliaError):
    pass


class InputFormatError(FoliaError):
    pass


class NotDescendingError(FoliaError):
    pass


class ZeroFormError(FoliaError):
    pass


class ResonanceError(FoliaError):
    pass


class DegenerateFamilyError(FoliaError):
    pass


class NotIntegrableError(FoliaError):
    exit_code = 1


class TangencyError(FoliaError):
    exit_code = 1


class BracketMismatchError(FoliaError):
    exit_code = 1


class CertificationError(FoliaError):
    exit_code = 1


class ResourceLimitError(FoliaError):
    exit_code = 3


class AmbientError(FoliaError):
    exit_code = 4
