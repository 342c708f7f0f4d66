"""Exception hierarchy shared by all modules.

Every failure that the CLI maps to exit code 1 derives from
:class:`CertificationError`; malformed input derives from :class:`InputError`
(exit code 2).
"""


class DlabError(Exception):
    """Base class for all package errors."""


class InputError(DlabError, ValueError):
    """Invalid input: a domain invariant is violated at construction/load time."""


class CertificationError(DlabError):
    """A numerical certificate could not be established."""

    check = "certification"


class ContourTooClose(CertificationError):
    check = "contour_min_modulus"


class NonConvergent(CertificationError):
    check = "convergence"


class WeightNotVanishing(CertificationError):
    check = "weight_infimum_zero"


class PrecisionExhausted(CertificationError):
    check = "precision"


class BudgetExceeded(CertificationError):
    check = "term_budget"


class CertificationFailed(CertificationError):
    check = "rouche"


class NormalizationFailure(CertificationError):
    check = "normalization"


class SearchExhausted(CertificationError):
    check = "search"


class HypothesisViolated(CertificationError):
    check = "hypothesis"

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
