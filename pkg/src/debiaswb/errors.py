"""Exception types shared by the engine, the HTTP service and the CLI.

Every error carries a stable ``code`` (used in structured HTTP error bodies
and CLI JSON output) and a default HTTP status.
"""


class WorkbenchError(Exception):
    code = "workbench_error"
    http_status = 400

    def __init__(self, message: str, **detail):
        super().__init__(message)
        self.message = message
        self.detail = detail

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message, "detail": self.detail}


# -- dataset ----------------------------------------------------------------

class SchemaMismatch(WorkbenchError):
    code = "schema_mismatch"
    http_status = 422


class CellParseError(WorkbenchError):
    code = "cell_parse_error"
    http_status = 422

    def __init__(self, row: int, column: str, raw: str, reason: str = ""):
        msg = f"row {row}, column {column!r}: cannot parse {raw!r}"
        if reason:
            msg += f" ({reason})"
        super().__init__(msg, row=row, column=column, raw=raw)


class EmptyDataset(WorkbenchError):
    code = "empty_dataset"
    http_status = 422


class AlreadySplit(WorkbenchError):
    code = "already_split"
    http_status = 409


class TooFewRows(WorkbenchError):
    code = "too_few_rows"
    http_status = 422


class OutOfDomain(WorkbenchError):
    code = "out_of_domain"
    http_status = 422


# -- metrics ----------------------------------------------------------------

class AllZeroCounts(WorkbenchError):
    code = "all_zero_counts"
    http_status = 422


class ModelStale(WorkbenchError):
    code = "model_stale"
    http_status = 409


# -- model ------------------------------------------------------------------

class DegenerateTarget(WorkbenchError):
    code = "degenerate_target"
    http_status = 422


class SchemaDigestMismatch(WorkbenchError):
    code = "schema_digest_mismatch"
    http_status = 409


class LeakageViolation(WorkbenchError):
    code = "leakage_violation"
    http_status = 500


# -- augment ----------------------------------------------------------------

class ConstraintOutOfDomain(WorkbenchError):
    code = "constraint_out_of_domain"
    http_status = 422


class CapExceeded(WorkbenchError):
    code = "cap_exceeded"
    http_status = 422


class NoMatchingRows(WorkbenchError):
    code = "no_matching_rows"
    http_status = 422


class InfeasibleJointRegion(WorkbenchError):
    code = "infeasible_joint_region"
    http_status = 422


class UnknownBackend(WorkbenchError):
    code = "unknown_backend"
    http_status = 422


# -- curation / session -----------------------------------------------------

class UnknownRow(WorkbenchError):
    code = "unknown_row"
    http_status = 404


class UnknownHistoryIndex(WorkbenchError):
    code = "unknown_history_index"
    http_status = 404


class StaleBatch(WorkbenchError):
    code = "stale_batch"
    http_status = 409


class NoPendingBatch(WorkbenchError):
    code = "no_pending_batch"
    http_status = 404


class AcknowledgementRequired(WorkbenchError):
    code = "acknowledgement_required"
    http_status = 409


class UnknownSession(WorkbenchError):
    code = "unknown_session"
    http_status = 404


class SessionExists(WorkbenchError):
    code = "session_exists"
    http_status = 409
