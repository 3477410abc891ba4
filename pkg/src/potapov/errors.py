"""Exception hierarchy.

Two families matter to callers (and to the CLI exit codes): negative
mathematical verdicts, and numerical certification failures.
"""


class PotapovError(Exception):
    pass


class NegativeVerdict(PotapovError):
    """The input does not have the property that was asked about."""


class CertificationFailure(PotapovError):
    """A residual exceeded the tolerance.

    ``residual`` is the offending norm (Frobenius, max over grid nodes or bins).
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NotAnalytic(CertificationFailure):
    """Negative-frequency Fourier bins of a sampled function are not negligible."""


class DivisionResidual(CertificationFailure):
    pass


class NotInner(CertificationFailure):
    pass


class NotShiftInvariant(CertificationFailure):
    pass


class TruncationTooSmall(CertificationFailure):
    pass


class NotADivisor(NegativeVerdict):
    def __init__(self, condition, index=None, residual=None):
        where = "" if index is None else f" at index {index}"
        super().__init__(f"not a divisor: {condition}{where}")
        self.condition = condition
        self.index = index
        self.residual = residual

    def witness(self):
        return {"condition": self.condition, "index": self.index, "residual": self.residual}


class NotRational(NegativeVerdict):
    pass


class TrivialGcd(NegativeVerdict):
    """The computed greatest common divisor is a constant unitary."""


class CoprimeCheckFailed(NegativeVerdict):
    def __init__(self, alpha, defect):
        super().__init__(f"common divisor at alpha={alpha} (defect dimension {defect})")
        self.alpha = alpha
        self.defect = defect


class VerdictMismatch(PotapovError):
    """Verdicts that must agree by theory disagreed numerically."""
