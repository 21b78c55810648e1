"""Data models and schemas."""

from app.models.bounds import BoundSpec, BoundValue
from app.models.cv import CvScheme, TrainingVector, WeightedVectorSet
from app.models.dataset import Dataset, Sample
from app.models.ensemble import (
    CvEstimate,
    EnsembleMember,
    MistakeMatrix,
    RiskEstimate,
    SubaggedEnsemble,
)
from app.models.learner import HypothesisClass
from app.models.loss import ConvexSurrogate, LossFunction
from app.models.split import SplitRow, SplitTable

__all__ = [
    "BoundSpec",
    "BoundValue",
    "ConvexSurrogate",
    "CvEstimate",
    "CvScheme",
    "Dataset",
    "EnsembleMember",
    "HypothesisClass",
    "LossFunction",
    "MistakeMatrix",
    "RiskEstimate",
    "Sample",
    "SplitRow",
    "SplitTable",
    "SubaggedEnsemble",
    "TrainingVector",
    "WeightedVectorSet",
]
