"""Numerics for Dirichlet-type spaces on the unit disk."""

__version__ = "0.1.0"

from .errors import (BudgetExceeded, CertificationError, CertificationFailed, ContourTooClose,  # noqa: E402
                     DlabError, HypothesisViolated, InputError, NonConvergent,
                     NormalizationFailure, PrecisionExhausted, SearchExhausted,
                     WeightNotVanishing)
from .mobius import DiskRegion, MobiusInvolution, image_disk  # noqa: E402
from .series import TaylorPoly, compose_mobius, evaluate  # noqa: E402
from .weights import WeightSpec  # noqa: E402

__all__ = [
    "BudgetExceeded", "CertificationError", "CertificationFailed", "ContourTooClose",
    "DlabError", "DiskRegion", "HypothesisViolated", "InputError", "MobiusInvolution",
    "NonConvergent", "NormalizationFailure", "PrecisionExhausted", "SearchExhausted",
    "TaylorPoly", "WeightNotVanishing", "WeightSpec", "compose_mobius", "evaluate",
    "image_disk",
]
