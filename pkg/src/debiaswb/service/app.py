"""HTTP service exposing the full debiasing workflow.

One configured session per server by default; all mutating endpoints accept a
client-supplied ``request_id`` and are idempotent under it. Errors come back
as structured ``{code, message, detail}`` bodies.
"""
from __future__ import annotations

import json
import logging
from pathlib import Path

from fastapi import Depends, FastAPI, Header, Query, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from ..augment import ConstraintSet
from ..config import AppConfig
from ..curation import batch_views, filter_sort
from ..errors import NoPendingBatch, UnknownRow, WorkbenchError
from ..schema import load_schema
from ..session import Session, SessionConfig, SessionManager
from . import schemas as S

logger = logging.getLogger(__name__)


def create_app(config: AppConfig | None = None) -> FastAPI:
    config = config or AppConfig()
    app = FastAPI(title="debias-workbench", version="0.1.0")
    app.state.config = config
    app.state.manager = SessionManager(config.data_dir)

    if config.dataset_csv and config.dataset_schema and not app.state.manager.exists(config.session_id):
        csv_bytes = Path(config.dataset_csv).read_bytes()
        schema = load_schema(Path(config.dataset_schema).read_text())
        app.state.manager.create(csv_bytes, schema, config.session, config.session_id)
        logger.info("bootstrapped session %r from %s", config.session_id, config.dataset_csv)

    def check_token(authorization: str | None = Header(default=None)) -> None:
        token = app.state.config.api_token
        if token and authorization != f"Bearer {token}":
            raise WorkbenchError("missing or invalid API token")

    def get_session(session: str | None = Query(default=None)) -> Session:
        return app.state.manager.get(session or app.state.config.session_id)

    @app.exception_handler(WorkbenchError)
    async def workbench_error_handler(request: Request, exc: WorkbenchError):
        return JSONResponse(status_code=exc.http_status, content=exc.to_dict())

    # -- bootstrap / meta --------------------------------------------------

    @app.get("/api/health")
    def health():
        return {"status": "ok", "sessions": app.state.manager.list_ids()}

    @app.post("/api/session", dependencies=[Depends(check_token)])
    def init_session(body: S.SessionInitRequest):
        schema = load_schema(json.dumps(body.variables))
        session_config = SessionConfig.from_dict(body.config or {})
        session = app.state.manager.create(
            body.csv_text.encode("utf-8"),
            schema,
            session_config,
            body.session_id or app.state.config.session_id,
        )
        return {"session_id": session.session_id, "overview": session.overview()}

    @app.get("/api/schema", dependencies=[Depends(check_token)])
    def get_schema(session: Session = Depends(get_session)):
        return {
            "variables": [s.to_dict() for s in session.dataset.schema],
            "segments": {
                s.name: [seg.to_dict() for seg in s.segments()]
                for s in session.dataset.schema
            },
        }

    # -- component A: system overview ---------------------------------------

    @app.get("/api/overview", response_model=S.OverviewResponse,
             dependencies=[Depends(check_token)])
    def overview(session: Session = Depends(get_session)):
        return session.overview()

    # -- component B: data explorer -----------------------------------------

    @app.get("/api/variables", response_model=S.BiasResponse,
             dependencies=[Depends(check_token)])
    def variables(session: Session = Depends(get_session)):
        report = session.bias().to_dict()
        return report

    @app.get("/api/variables/{name}", response_model=S.VariableSliceResponse,
             dependencies=[Depends(check_token)])
    def variable_slice(name: str, session: Session = Depends(get_session)):
        report = session.bias()
        session.dataset.variable(name)  # raises SchemaMismatch for unknown names
        stats = report.per_variable[name]
        return {
            "variable": name,
            "rr": report.variable_rr[name],
            "segments": [s.to_dict() for s in stats],
            "quick_insights": [q.to_dict() for q in report.quick_insights if q.variable == name],
        }

    # -- component C: data quality -------------------------------------------

    @app.get("/api/quality", response_model=S.QualityResponse,
             dependencies=[Depends(check_token)])
    def quality(session: Session = Depends(get_session)):
        return session.quality().to_dict()

    # -- component D: augmentation controller ---------------------------------

    @app.post("/api/augment/plan", response_model=S.PlanResponse,
              dependencies=[Depends(check_token)])
    def augment_plan(body: S.PlanRequest, session: Session = Depends(get_session)):
        constraints = ConstraintSet.from_dict(body.constraints.to_engine_dict())
        warnings = session.plan(constraints)
        return {
            "warnings": [w.to_dict() for w in warnings],
            "total_requested": constraints.total_requested,
        }

    @app.post("/api/augment", response_model=S.BatchResponse,
              dependencies=[Depends(check_token)])
    def augment(body: S.AugmentRequest, session: Session = Depends(get_session)):
        constraints = ConstraintSet.from_dict(body.constraints.to_engine_dict())
        batch = session.generate(constraints, backend=body.backend, seed=body.seed,
                                 request_id=body.request_id)
        return _batch_response(session, batch)

    # -- component E: generated data controller -------------------------------

    @app.get("/api/generated", dependencies=[Depends(check_token)])
    def generated(
        session: Session = Depends(get_session),
        predicted: str | None = Query(default=None),
        min_confidence: float | None = Query(default=None),
        max_confidence: float | None = Query(default=None),
        sort: str | None = Query(default=None, description="field:asc|desc"),
    ):
        pending = session.pending
        if pending is None:
            raise NoPendingBatch("no generated batch is pending")
        clauses = []
        if predicted is not None:
            clauses.append({"field": "predicted", "op": "eq", "value": predicted})
        if min_confidence is not None:
            clauses.append({"field": "confidence", "op": "ge", "value": min_confidence})
        if max_confidence is not None:
            clauses.append({"field": "confidence", "op": "lt", "value": max_confidence})
        ordering = None
        if sort:
            field_name, _, direction = sort.partition(":")
            ordering = [(field_name, direction or "asc")]
        views = filter_sort(pending.current, clauses or None, ordering)
        return {
            "batch_id": pending.current.batch_id,
            "size": pending.current.size,
            "estimated_accuracy": pending.current.estimated_accuracy,
            "estimated_quality": (
                pending.current.estimated_quality.to_dict()
                if pending.current.estimated_quality else None
            ),
            "warnings": [w.to_dict() for w in pending.current.warnings],
            "edit_count": pending.edit_count,
            "rows": [v.to_dict() for v in views],
        }

    @app.patch("/api/generated", dependencies=[Depends(check_token)])
    def bulk_edit(body: S.BulkEditRequest, session: Session = Depends(get_session)):
        results = []
        for i, edit in enumerate(body.edits):
            rid = f"{body.request_id}:{i}" if body.request_id else None
            pred = session.edit_cell(edit.row_id, edit.variable, edit.value, request_id=rid)
            results.append({"row_id": edit.row_id, "prediction": pred.to_dict()})
        return {"edited": results}

    @app.delete("/api/generated", dependencies=[Depends(check_token)])
    def discard(request_id: str | None = Query(default=None),
                session: Session = Depends(get_session)):
        session.discard_batch(request_id=request_id)
        return {"discarded": True}

    @app.get("/api/generated/{row_id}", dependencies=[Depends(check_token)])
    def generated_row(row_id: str, session: Session = Depends(get_session)):
        pending = session.pending
        if pending is None:
            raise NoPendingBatch("no generated batch is pending")
        for view in batch_views(pending.current):
            if view.row_id == row_id:
                return view.to_dict()
        raise UnknownRow(f"no row with id {row_id!r} in the pending batch")

    @app.patch("/api/generated/{row_id}", dependencies=[Depends(check_token)])
    def edit_row(row_id: str, body: S.EditRequest, session: Session = Depends(get_session)):
        pred = session.edit_cell(row_id, body.variable, body.value, request_id=body.request_id)
        return {"row_id": row_id, "prediction": pred.to_dict()}

    @app.delete("/api/generated/{row_id}", dependencies=[Depends(check_token)])
    def delete_row(row_id: str, request_id: str | None = Query(default=None),
                   session: Session = Depends(get_session)):
        session.delete_row(row_id, request_id=request_id)
        return {"deleted": row_id}

    @app.post("/api/whatif", dependencies=[Depends(check_token)])
    def whatif(body: S.WhatIfRequest, session: Session = Depends(get_session)):
        pred = session.what_if(body.row_id, body.variable, body.value)
        return {"row_id": body.row_id, "variable": body.variable,
                "value": body.value, "prediction": pred.to_dict()}

    # -- component F: bias awareness / governance ------------------------------

    @app.get("/api/drift", response_model=S.DriftResponse,
             dependencies=[Depends(check_token)])
    def drift(session: Session = Depends(get_session)):
        return session.drift().to_dict()

    @app.post("/api/retrain", dependencies=[Depends(check_token)])
    def retrain(body: S.RetrainRequest, session: Session = Depends(get_session)):
        entry = session.merge_and_retrain(
            acknowledged=body.acknowledged,
            request_id=body.request_id,
            expected_batch_id=body.batch_id,
        )
        return {"entry": session.history_entries()[entry.index]}

    @app.post("/api/revert", dependencies=[Depends(check_token)])
    def revert(body: S.RevertRequest, session: Session = Depends(get_session)):
        entry = session.revert(body.index, request_id=body.request_id)
        return {"entry": session.history_entries()[entry.index]}

    @app.get("/api/history", response_model=S.HistoryResponse,
             dependencies=[Depends(check_token)])
    def history(session: Session = Depends(get_session)):
        return {"entries": session.history_entries()}

    frontend = config.frontend_dir
    if frontend and Path(frontend).is_dir():
        app.mount("/", StaticFiles(directory=frontend, html=True), name="frontend")

    return app


def _batch_response(session: Session, batch) -> dict:
    views = batch_views(batch)
    return {
        "batch_id": batch.batch_id,
        "generator_id": batch.generator_id,
        "size": batch.size,
        "estimated_accuracy": batch.estimated_accuracy,
        "estimated_quality": batch.estimated_quality.to_dict() if batch.estimated_quality else None,
        "warnings": [w.to_dict() for w in batch.warnings],
        "constraints": batch.constraints.to_dict(),
        "rows": [v.to_dict() for v in views],
    }
