"""Human-in-the-loop workbench for representation debiasing of tabular data."""

from .augment import ConstraintSet, GeneratedBatch, LowCoverageWarning, SegmentConstraint
from .curation import DriftReport, EditLogEntry, drift_report, filter_sort, what_if
from .dataset import TabularDataset, ingest, split
from .errors import WorkbenchError
from .gbdt import GBDTParams
from .metrics import BiasReport, bias_report, coverage, representation_rates
from .model import ModelArtifact, Prediction, predict, train
from .quality import QualityReport, delta_quality, quality_report
from .schema import Segment, VariableSchema, load_schema, segment_of
from .session import Session, SessionConfig, SessionManager

__version__ = "0.1.0"

__all__ = [
    "BiasReport",
    "ConstraintSet",
    "DriftReport",
    "EditLogEntry",
    "GBDTParams",
    "GeneratedBatch",
    "LowCoverageWarning",
    "ModelArtifact",
    "Prediction",
    "QualityReport",
    "Segment",
    "SegmentConstraint",
    "Session",
    "SessionConfig",
    "SessionManager",
    "TabularDataset",
    "VariableSchema",
    "WorkbenchError",
    "bias_report",
    "coverage",
    "delta_quality",
    "drift_report",
    "filter_sort",
    "ingest",
    "load_schema",
    "predict",
    "quality_report",
    "representation_rates",
    "segment_of",
    "split",
    "train",
    "what_if",
    "__version__",
]
