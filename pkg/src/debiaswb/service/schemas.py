"""Pydantic request/response models for the HTTP API."""
from __future__ import annotations

from typing import Any, Optional, Union

from pydantic import BaseModel, Field

CellValue = Union[float, str]


class ConstraintIn(BaseModel):
    variable: str
    count: int = Field(ge=1)
    min: Optional[CellValue] = None
    max: Optional[CellValue] = None
    max_open: bool = False
    categories: Optional[list[str]] = None

    def to_engine_dict(self) -> dict:
        d: dict = {"variable": self.variable, "count": self.count}
        if self.categories is not None:
            d["categories"] = self.categories
        else:
            d["min"] = self.min
            d["max"] = self.max
            if self.max_open:
                d["max_open"] = True
        return d


class ConstraintSetIn(BaseModel):
    constraints: list[ConstraintIn] = Field(default_factory=list)
    joint: bool = True

    def to_engine_dict(self) -> dict:
        return {"joint": self.joint, "constraints": [c.to_engine_dict() for c in self.constraints]}


class PlanRequest(BaseModel):
    constraints: ConstraintSetIn


class AugmentRequest(BaseModel):
    constraints: ConstraintSetIn
    backend: str = "nn"
    seed: int = 0
    request_id: Optional[str] = None


class EditRequest(BaseModel):
    variable: str
    value: CellValue
    request_id: Optional[str] = None


class BulkEdit(BaseModel):
    row_id: str
    variable: str
    value: CellValue


class BulkEditRequest(BaseModel):
    edits: list[BulkEdit]
    request_id: Optional[str] = None


class WhatIfRequest(BaseModel):
    row_id: str
    variable: str
    value: CellValue


class RetrainRequest(BaseModel):
    acknowledged: bool = False
    batch_id: Optional[str] = None
    request_id: Optional[str] = None


class RevertRequest(BaseModel):
    index: int = Field(ge=0)
    request_id: Optional[str] = None


class SessionInitRequest(BaseModel):
    csv_text: str
    variables: list[dict]
    config: Optional[dict] = None
    session_id: Optional[str] = None


class PredictionOut(BaseModel):
    predicted_class: str
    class_probabilities: dict[str, float]
    confidence: float


class WarningOut(BaseModel):
    constraint: dict
    existing_count: int
    requested_count: int
    ratio: float


class PlanResponse(BaseModel):
    warnings: list[WarningOut]
    total_requested: int


class RowOut(BaseModel):
    row_id: str
    cells: dict[str, Any]
    provenance: str
    prediction: PredictionOut


class BatchResponse(BaseModel):
    batch_id: str
    generator_id: str
    size: int
    estimated_accuracy: Optional[float]
    estimated_quality: Optional[dict]
    warnings: list[WarningOut]
    constraints: dict
    rows: list[RowOut]


class OverviewResponse(BaseModel):
    accuracy: float
    accuracy_delta: float
    accuracy_interval: list[float]
    train_rows: int
    heldout_rows: int
    predictors: list[str]
    target: str
    classes: list[str]
    retrain_count: int
    pending_batch: Optional[str]
    history_length: int


class QualityResponse(BaseModel):
    severities: dict[str, float]
    overall: float
    flagged_pairs: list[dict]
    flagged_rows: list[dict]


class DriftResponse(BaseModel):
    per_variable: dict[str, float]
    flagged: list[str]
    threshold: float
    histograms: dict[str, dict]


class HistoryEntryOut(BaseModel):
    index: int
    kind: str
    timestamp: float
    overall_rr: float
    overall_cr: float
    accuracy: float
    quality_overall: float
    quality_severities: dict[str, float]
    train_rows: int
    batch_size: int
    edit_count: int
    augmentation: Optional[dict]
    dataset_ref: str
    model_ref: str
    reverted_to: Optional[int]
    deltas: dict[str, float]


class HistoryResponse(BaseModel):
    entries: list[HistoryEntryOut]


class VariableSliceResponse(BaseModel):
    variable: str
    rr: float
    segments: list[dict]
    quick_insights: list[dict]


class BiasResponse(BaseModel):
    overall_rr: float
    overall_cr: float
    coverage_threshold: int
    variables: dict[str, dict]
    quick_insights: list[dict]


class ErrorBody(BaseModel):
    code: str
    message: str
    detail: dict = Field(default_factory=dict)
