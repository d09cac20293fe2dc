"""dilution-gt: non-adaptive group testing under dilution type-2 noise."""

__version__ = "0.1.0"

from .channel import GroundTruth, OutcomeVector, simulate
from .decoder import DecodeResult, dec1_defect, dec_d_defect
from .errors import BudgetExceededError, DilutionGTError, DomainError, FormatError, UsageError
from .measurement import MeasurementMatrix, t_entry
from .plan import ChernoffParams, NoiseParams, TestPlan, build_plan

__all__ = [
    "BudgetExceededError",
    "ChernoffParams",
    "DecodeResult",
    "DilutionGTError",
    "DomainError",
    "FormatError",
    "GroundTruth",
    "MeasurementMatrix",
    "NoiseParams",
    "OutcomeVector",
    "TestPlan",
    "UsageError",
    "build_plan",
    "dec1_defect",
    "dec_d_defect",
    "simulate",
    "t_entry",
]
