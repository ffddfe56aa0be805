"""HTTP+JSON interface for the review workflow.

All bodies are UTF-8 JSON except case creation (raw DSL text) and metric
evaluation (multipart file upload). Errors use problem-detail JSON
``{code, message, field?}``; stale writes get 409, role violations 403.
Mutating requests carry the case version they read in an ``If-Match``
header; the store's compare-and-set admits exactly one of two racing
writers.
"""

from __future__ import annotations

import json
from dataclasses import asdict
from typing import Callable

from fastapi import FastAPI, File, Request, Response, UploadFile
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse

from . import __version__
from .assessors import run_metric
from .checklist import Choice, MetricResult, ReviewVerdict, Text, answer_question
from .config import Identity, ServiceConfig, TokenTable
from .dsl import CaseSyntaxError, parse_case, serialize_case
from .errors import (
    CaseExistsError,
    CaseNotFoundError,
    DuplicateIdError,
    DuplicateLinkError,
    ElensError,
    EmptyFlagListError,
    ForbiddenError,
    IllegalTransitionError,
    IncompleteCaseError,
    LinkCycleError,
    LockedAnswerError,
    QuestionPinnedError,
    UnknownElementError,
    UnknownNodeError,
    UnknownQuestionError,
    VersionConflictError,
)
from .goals import case_verdict
from .model import AssuranceCase
from .reports import build_report, report_json_bytes, report_markdown
from .stpa import build_trace_matrix
from .store import CaseStore
from .vocab import StakeholderRole
from .workflow import CaseStatus, regulator_review, review_answer, submit_answer

_STATUS_BY_ERROR: tuple[tuple[type[ElensError], int], ...] = (
    (ForbiddenError, 403),
    (VersionConflictError, 409),
    (CaseNotFoundError, 404),
    (UnknownQuestionError, 404),
    (UnknownElementError, 404),
    (UnknownNodeError, 404),
    (CaseExistsError, 409),
    (IllegalTransitionError, 409),
    (LockedAnswerError, 409),
    (IncompleteCaseError, 409),
    (DuplicateIdError, 409),
    (DuplicateLinkError, 409),
    (LinkCycleError, 409),
    (EmptyFlagListError, 409),
    (QuestionPinnedError, 409),
)

_READ_ROLES = {
    StakeholderRole.AI_SUPPLIER,
    StakeholderRole.AI_SUPPLIER_ADMIN,
    StakeholderRole.SYSTEM_ADMIN,
    StakeholderRole.ETHICS_VALIDATOR,
    StakeholderRole.REGULATOR,
}
_AUTHOR_ROLES = {
    StakeholderRole.AI_SUPPLIER,
    StakeholderRole.AI_SUPPLIER_ADMIN,
    StakeholderRole.SYSTEM_ADMIN,
}


def _problem(exc: ElensError, status: int) -> JSONResponse:
    body: dict = {"code": exc.code, "message": exc.message}
    if exc.field:
        body["field"] = exc.field
    if isinstance(exc, IncompleteCaseError):
        body["violations"] = [
            {"element": v.element_id, "rule": v.rule_id, "message": v.message}
            for v in exc.violations
        ]
    if isinstance(exc, CaseSyntaxError):
        body["diagnostics"] = [
            {
                "severity": d.severity.value,
                "line": d.span.line,
                "column": d.span.column,
                "length": d.span.length,
                "message": d.message,
                "code": d.code,
            }
            for d in exc.diagnostics
        ]
    return JSONResponse(status_code=status, content=body)


def _error_status(exc: ElensError) -> int:
    for klass, status in _STATUS_BY_ERROR:
        if isinstance(exc, klass):
            return status
    return 400


def _parse_content(doc: dict):
    kind = doc.get("type")
    if kind == "text":
        return Text(doc.get("body", ""))
    if kind == "choice":
        index = doc.get("index")
        if not isinstance(index, int):
            raise TypeError
        return Choice(index)
    if kind == "metric":
        return MetricResult(
            metric=doc.get("metric", ""),
            value=doc.get("value"),
            inputs_digest=doc.get("inputs_digest", ""),
            error=doc.get("error"),
        )
    raise TypeError


def _question_view(case: AssuranceCase) -> list[dict]:
    out = []
    for question in sorted(case.checklist.questions.values(), key=lambda q: q.id):
        qtype: dict = {"kind": question.qtype.kind}
        if question.qtype.options:
            qtype["options"] = list(question.qtype.options)
        if question.qtype.metric:
            qtype["metric"] = question.qtype.metric
        answer = case.answers.get(question.id)
        answer_doc = None
        if answer is not None:
            content = answer.content
            if isinstance(content, Choice):
                content_doc = {"type": "choice", "index": content.index}
            elif isinstance(content, Text):
                content_doc = {"type": "text", "body": content.body}
            else:
                content_doc = {
                    "type": "metric",
                    "metric": content.metric,
                    "value": content.value,
                    "inputs_digest": content.inputs_digest,
                    "error": content.error,
                }
            answer_doc = {
                "status": answer.status.value,
                "version": answer.version,
                "content": content_doc,
                "comments": [
                    {
                        "author_role": c.author_role.value,
                        "verdict": c.verdict.value,
                        "text": c.text,
                        "timestamp": c.timestamp,
                        "answer_version": c.answer_version,
                    }
                    for c in answer.comments
                ],
            }
        out.append(
            {
                "id": question.id,
                "principle": question.principle,
                "segment": question.segment,
                "stage": question.stage,
                "desideratum": question.desideratum,
                "type": qtype,
                "text": question.text,
                "requirement_links": list(question.requirement_links),
                "retired": question.retired,
                "answer": answer_doc,
            }
        )
    return out


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig()
    store = CaseStore(config.data_dir)
    tokens = TokenTable.load(config.token_file)

    app = FastAPI(title="elens", version=__version__)
    app.state.store = store
    app.state.tokens = tokens
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(ElensError)
    async def elens_error_handler(request: Request, exc: ElensError):
        return _problem(exc, _error_status(exc))

    @app.exception_handler(RequestValidationError)
    async def validation_error_handler(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400, content={"code": "bad-request", "message": str(exc.errors()[:1])}
        )

    def identify(request: Request) -> Identity:
        header = request.headers.get("authorization", "")
        token = header[7:].strip() if header.lower().startswith("bearer ") else None
        return tokens.identify(token)

    def require_reader(request: Request) -> Identity:
        identity = identify(request)
        if identity.role not in _READ_ROLES:
            raise ForbiddenError(f"role {identity.role.value} has no read access")
        return identity

    def expected_version(request: Request) -> int:
        raw = request.headers.get("if-match")
        if raw is None:
            exc = ElensError("mutations need an If-Match header with the case version")
            exc.code = "version-required"
            raise exc
        raw = raw.strip().strip('"')
        if not raw.isdigit():
            exc = ElensError(f"If-Match must be an integer case version, got {raw!r}")
            exc.code = "version-required"
            raise exc
        return int(raw)

    def mutate(case_id: str, version: int, fn: Callable[[AssuranceCase], None]) -> tuple[AssuranceCase, int]:
        case, current = store.load(case_id)
        if current != version:
            raise VersionConflictError(
                f"case {case_id} is at version {current}, request expected {version}"
            )
        fn(case)
        new_version = store.save(case, version)
        return case, new_version

    def state_body(case: AssuranceCase, version: int, extra: dict | None = None) -> dict:
        body = {"case": case.id, "version": version, "status": case.status.value}
        if extra:
            body.update(extra)
        return body

    # -- service ----------------------------------------------------------

    @app.get("/")
    async def service_info():
        return {"service": "elens", "version": __version__}

    # -- cases --------------------------------------------------------------

    @app.post("/cases", status_code=201)
    async def create_case(request: Request):
        identity = identify(request)
        if identity.role not in _AUTHOR_ROLES:
            raise ForbiddenError(f"role {identity.role.value} cannot author cases")
        source = (await request.body()).decode("utf-8")
        case = parse_case(source)
        version = store.create(case)
        return state_body(case, version)

    @app.get("/cases")
    async def list_cases(request: Request):
        require_reader(request)
        return {"cases": store.list_cases()}

    @app.get("/cases/{case_id}")
    async def get_case(case_id: str, request: Request):
        require_reader(request)
        case, version = store.load(case_id)
        return state_body(case, version, {"document": case.to_dict()})

    @app.get("/cases/{case_id}/dsl")
    async def get_case_dsl(case_id: str, request: Request):
        require_reader(request)
        case, _ = store.load(case_id)
        return PlainTextResponse(serialize_case(case))

    @app.get("/cases/{case_id}/questions")
    async def get_questions(case_id: str, request: Request):
        require_reader(request)
        case, version = store.load(case_id)
        return state_body(case, version, {"questions": _question_view(case)})

    # -- answers ---------------------------------------------------------

    @app.post("/cases/{case_id}/answers/{question_id}")
    async def write_answer(case_id: str, question_id: str, request: Request):
        identity = identify(request)
        version = expected_version(request)
        try:
            payload = await request.json()
            content = _parse_content(payload.get("content", {}))
        except (json.JSONDecodeError, TypeError, AttributeError):
            exc = ElensError("body must be JSON like {\"content\": {\"type\": \"text\", ...}}")
            exc.code = "bad-request"
            raise exc from None
        case, new_version = mutate(
            case_id, version, lambda c: answer_question(c, question_id, content, identity.role)
        )
        return state_body(
            case, new_version, {"answer_status": case.answers[question_id].status.value}
        )

    @app.post("/cases/{case_id}/answers/{question_id}/submit")
    async def submit(case_id: str, question_id: str, request: Request):
        identity = identify(request)
        version = expected_version(request)
        case, new_version = mutate(
            case_id, version, lambda c: submit_answer(c, question_id, identity.role)
        )
        return state_body(
            case, new_version, {"answer_status": case.answers[question_id].status.value}
        )

    @app.post("/cases/{case_id}/answers/{question_id}/review")
    async def review(case_id: str, question_id: str, request: Request):
        identity = identify(request)
        version = expected_version(request)
        payload = await request.json()
        try:
            verdict = ReviewVerdict(payload.get("verdict"))
        except ValueError:
            exc = ElensError("verdict must be Accept or RequestChanges")
            exc.code = "bad-request"
            raise exc from None
        text = payload.get("text", "")
        if not isinstance(text, str):
            exc = ElensError("review text must be a string")
            exc.code = "bad-request"
            raise exc
        case, new_version = mutate(
            case_id,
            version,
            lambda c: review_answer(c, question_id, identity.role, verdict, text),
        )
        return state_body(
            case, new_version, {"answer_status": case.answers[question_id].status.value}
        )

    @app.post("/cases/{case_id}/answers/{question_id}/metric")
    async def evaluate(case_id: str, question_id: str, request: Request, file: UploadFile = File(...)):
        identity = identify(request)
        version = expected_version(request)
        data = await file.read()
        results: dict = {}

        def apply(case: AssuranceCase) -> None:
            results["result"] = run_metric(case, question_id, data, identity.role)

        case, new_version = mutate(case_id, version, apply)
        result: MetricResult = results["result"]
        return state_body(
            case,
            new_version,
            {
                "result": {
                    "metric": result.metric,
                    "value": result.value,
                    "inputs_digest": result.inputs_digest,
                    "error": result.error,
                }
            },
        )

    # -- regulator ---------------------------------------------------------

    @app.post("/cases/{case_id}/regulator-review")
    async def regulator(case_id: str, request: Request):
        identity = identify(request)
        version = expected_version(request)
        payload = await request.json()
        decision = payload.get("decision", "")
        flagged = payload.get("flagged_questions", [])
        comment = payload.get("comment", "")
        if not isinstance(flagged, list) or not isinstance(comment, str):
            exc = ElensError("flagged_questions must be a list and comment a string")
            exc.code = "bad-request"
            raise exc
        case, new_version = mutate(
            case_id,
            version,
            lambda c: regulator_review(c, decision, flagged, comment, identity.role),
        )
        return state_body(case, new_version, {"decision": decision})

    # -- analysis views ----------------------------------------------------

    @app.get("/cases/{case_id}/trace/{element_id}")
    async def trace(case_id: str, element_id: str, request: Request, direction: str = "back"):
        require_reader(request)
        if direction not in ("back", "forward"):
            exc = ElensError("direction must be 'back' or 'forward'")
            exc.code = "bad-request"
            raise exc
        case, _ = store.load(case_id)
        hops = (
            case.trace_backward(element_id)
            if direction == "back"
            else case.trace_forward(element_id)
        )
        return {"element": element_id, "direction": direction, "hops": hops}

    @app.get("/cases/{case_id}/matrix")
    async def matrix(case_id: str, request: Request):
        require_reader(request)
        case, _ = store.load(case_id)
        table = build_trace_matrix(case)
        if "text/csv" in request.headers.get("accept", ""):
            return PlainTextResponse(table.to_csv(), media_type="text/csv")
        return {"rows": table.to_json_obj()}

    @app.get("/cases/{case_id}/verdict")
    async def verdict(case_id: str, request: Request, threshold: int = 100):
        require_reader(request)
        case, _ = store.load(case_id)
        result = case_verdict(case, threshold)
        return {
            "mitigated": result.mitigated,
            "root_satisfaction": result.root_satisfaction,
            "unresolved": list(result.unresolved),
            "threshold": threshold,
        }

    @app.get("/cases/{case_id}/report")
    async def report(case_id: str, request: Request, kind: str = "summary"):
        identity = identify(request)
        case, _ = store.load(case_id)
        if identity.role not in _READ_ROLES:
            # the public reads summary reports of certified cases only
            if kind != "summary" or case.status is not CaseStatus.CERTIFIED:
                raise ForbiddenError(
                    f"role {identity.role.value} may only read summary reports of certified cases"
                )
        document = build_report(case, kind)
        if "text/markdown" in request.headers.get("accept", ""):
            return PlainTextResponse(report_markdown(document), media_type="text/markdown")
        return Response(content=report_json_bytes(document), media_type="application/json")

    @app.get("/cases/{case_id}/audit")
    async def audit(case_id: str, request: Request, target: str | None = None):
        require_reader(request)
        case, _ = store.load(case_id)
        records = case.audit
        if target is not None:
            records = [r for r in records if r.target == target]
        return {"records": [asdict(r) for r in sorted(records, key=lambda r: r.seq)]}

    return app


def run(config: ServiceConfig) -> None:
    import uvicorn

    uvicorn.run(create_app(config), host=config.host, port=config.port, log_level="info")
