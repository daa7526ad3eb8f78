"""Exception types shared across the package.

Every domain error raised by this package derives from :class:`QselciError`,
so callers (including the CLI) can distinguish expected failure modes from
bugs.  Parse-stage errors carry the 1-based line number of the offending
input line.
"""


class QselciError(Exception):
    """Base class for all domain errors raised by qselci."""


# ---------------------------------------------------------------- integrals

class FcidumpError(QselciError):
    """Base for integral-file parse errors; carries a line number."""

    def __init__(self, message, line_no=None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class MalformedHeader(FcidumpError):
    pass


class IndexOutOfRange(FcidumpError):
    pass


class NonNumericValue(FcidumpError):
    pass


class EmptyInput(FcidumpError):
    pass


# ------------------------------------------------------------- determinants

class RankTooHigh(QselciError):
    """Two determinants differ by more than a double excitation (or not at all)."""


class TooLarge(QselciError):
    """A requested space or matrix exceeds the configured size cap."""


# -------------------------------------------------------------- hamiltonian

class DuplicateDeterminant(QselciError):
    pass


class NoConvergence(QselciError):
    """Iterative eigensolver ran out of iterations.

    Carries the best iterate found so far as ``(energy, vector)``.
    """

    def __init__(self, message, energy=None, vector=None, iterations=None):
        super().__init__(message)
        self.energy = energy
        self.vector = vector
        self.iterations = iterations


# ----------------------------------------------------------------- circuits

class EmptySelection(QselciError):
    pass


class ZeroRank(QselciError):
    """Reference and target are the same determinant."""


class ShapeMismatch(QselciError):
    pass


class TooManyQubits(QselciError):
    pass


class ParamCountMismatch(QselciError):
    """Parameter vector length does not match the circuit's parameter count."""


# ----------------------------------------------------------------- sampling

class EmptyPool(QselciError):
    pass


class EmptySubspace(QselciError):
    pass


# ---------------------------------------------------------------- expansion

class NoCandidates(QselciError):
    """No determinant outside the current space passes the score threshold."""


class SmallDenominator(QselciError):
    pass


# ------------------------------------------------------------------- bounds

class FullDepolarization(QselciError):
    pass


class ZeroGap(QselciError):
    pass


class ZeroWeight(QselciError):
    pass


# --------------------------------------------------------------------- cli

class UnknownFixture(QselciError):
    pass


class UnknownSubcommand(QselciError):
    pass


class ConfigParseError(QselciError):
    """Bad key-value config file; carries the offending line number."""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no
