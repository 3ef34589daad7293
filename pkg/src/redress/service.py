"""HTTP/JSON gateway over the platform.

Static bearer tokens map to (account, role); frozen accounts are denied on
every authenticated endpoint until their debt clears. All timestamps are
RFC 3339 UTC and money is integer minor units. State changes hit the event log
before the response leaves.
"""

from typing import Optional

from fastapi import Depends, FastAPI, Header, HTTPException, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .cases import AbuseCategory
from .config import ServiceConfig, TokenEntry
from .errors import (
    AccountFrozen,
    AlreadyErased,
    DegenerateTable,
    DuplicateBallot,
    EmptyContent,
    Forbidden,
    InsufficientFunds,
    InvalidArgs,
    MalformedDocument,
    NoActiveHold,
    NoEvidence,
    NotAssigned,
    NotFound,
    PastDeadline,
    Purged,
    RateLimited,
    RedressError,
    SpecInvalid,
    UnknownSnapshot,
    UnreferencedAccess,
    WrongState,
)
from .eventlog import EventLog
from .platform import Platform
from .simulator import run_scenario, scenario_from_dict
from .timefmt import utcnow

_STATUS_BY_ERROR = [
    (RateLimited, 429),
    (NotFound, 404),
    (UnknownSnapshot, 404),
    (Forbidden, 403),
    (AccountFrozen, 403),
    (UnreferencedAccess, 403),
    (NotAssigned, 403),
    (InsufficientFunds, 402),
    (PastDeadline, 410),
    (Purged, 410),
    (DuplicateBallot, 409),
    (AlreadyErased, 409),
    (WrongState, 409),
    (NoActiveHold, 409),
    (NoEvidence, 422),
    (EmptyContent, 422),
    (SpecInvalid, 422),
    (InvalidArgs, 422),
    (MalformedDocument, 422),
    (DegenerateTable, 422),
]


def _status_for(exc: RedressError) -> int:
    for cls, status in _STATUS_BY_ERROR:
        if isinstance(exc, cls):
            return status
    return 500


class ReportRequest(BaseModel):
    accused: str
    category: str
    narrative: str
    evidence: list[str] = Field(min_length=1, description="post ids to snapshot and cite")


class BallotRequest(BaseModel):
    verdict: bool
    impact: int = Field(ge=1, le=5)
    bad_faith: bool = False


def build_platform(config: ServiceConfig) -> Platform:
    log = EventLog(config.event_log_path) if config.event_log_path else EventLog()
    platform = Platform(config.platform, log=log)
    if log.records:
        platform.recover()
    elif config.fixtures:
        _apply_fixtures(platform, config.fixtures)
    return platform


def _apply_fixtures(platform: Platform, fixtures: dict) -> None:
    now = utcnow()
    for entry in fixtures.get("accounts", []):
        platform.register_account(
            entry["account_id"],
            entry.get("handle", entry["account_id"]),
            entry.get("display_name", entry["account_id"]),
            now,
            special_status=entry.get("special_status", False),
        )
        if entry.get("wallet"):
            platform.fund_wallet(entry["account_id"], entry["wallet"], now)
        if entry.get("verifier"):
            days = entry.get("qualified_days_ago", 40)
            from datetime import timedelta

            platform.register_verifier(
                entry["account_id"], now, qualified_since=now - timedelta(days=days)
            )
    for post in fixtures.get("posts", []):
        platform.publish_post(
            post["post_id"], post["author"], post["text"], now, media=post.get("media")
        )


def create_app(config: ServiceConfig, platform: Platform | None = None) -> FastAPI:
    app = FastAPI(title="redress", version="0.1.0")
    platform = platform or build_platform(config)
    app.state.platform = platform
    app.state.config = config

    @app.exception_handler(RedressError)
    async def _redress_error(request: Request, exc: RedressError):
        status = _status_for(exc)
        body = {"error": type(exc).__name__, "detail": str(exc)}
        headers = {}
        if isinstance(exc, RateLimited):
            retry_after = max(1, int(exc.retry_after))
            body["retry_after_seconds"] = retry_after
            headers["Retry-After"] = str(retry_after)
        return JSONResponse(status_code=status, content=body, headers=headers)

    def authenticate(authorization: Optional[str] = Header(default=None)) -> TokenEntry:
        if not authorization or not authorization.startswith("Bearer "):
            raise HTTPException(status_code=401, detail="missing bearer token")
        entry = config.tokens.get(authorization.removeprefix("Bearer "))
        if entry is None:
            raise HTTPException(status_code=401, detail="unknown token")
        if entry.role != "admin" and platform.guard.is_frozen(entry.account):
            raise AccountFrozen(f"account {entry.account} is frozen pending payment")
        return entry

    def require_admin(entry: TokenEntry = Depends(authenticate)) -> TokenEntry:
        if entry.role != "admin":
            raise Forbidden("admin role required")
        return entry

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "events": len(platform.log)}

    @app.post("/reports", status_code=201)
    def file_report(body: ReportRequest, entry: TokenEntry = Depends(authenticate)):
        try:
            category = AbuseCategory(body.category)
        except ValueError:
            raise HTTPException(status_code=422, detail=f"unknown category {body.category!r}")
        case, ack = platform.file_report(
            entry.account, body.accused, category, body.narrative, body.evidence, utcnow()
        )
        return {
            "case": case.export(include_verifier_ids=False),
            "acknowledgement": ack.envelope(),
            "fee_held": platform.ledger.hold_amount(case.case_id),
        }

    @app.get("/cases/{case_id}")
    def get_case(case_id: str, entry: TokenEntry = Depends(authenticate)):
        case = platform.engine.cases.get(case_id)
        if case is None:
            raise NotFound(f"case {case_id} not found")
        if entry.role == "admin":
            return case.export(include_verifier_ids=True)
        if entry.account != case.reporter:
            raise Forbidden("only the reporter or an admin may read a case")
        return case.export(include_verifier_ids=False)

    @app.get("/cases/{case_id}/progress")
    def case_progress(case_id: str, entry: TokenEntry = Depends(authenticate)):
        platform.maybe_tick_for_case(case_id, utcnow())
        if entry.role == "admin":
            case = platform.engine.cases.get(case_id)
            if case is None:
                raise NotFound(f"case {case_id} not found")
            return platform.progress(case_id, case.reporter).export()
        return platform.progress(case_id, entry.account).export()

    @app.post("/cases/{case_id}/ballots")
    def submit_ballot(case_id: str, body: BallotRequest, entry: TokenEntry = Depends(authenticate)):
        case = platform.submit_ballot(
            case_id, entry.account, body.verdict, body.impact, body.bad_faith, utcnow()
        )
        return {"accepted": True, "ballots_received": len(case.ballots)}

    @app.get("/queue")
    def ballot_queue(entry: TokenEntry = Depends(authenticate)):
        return {"items": platform.queue_for(entry.account, utcnow())}

    @app.get("/certificates/{certificate_id}")
    def get_certificate(certificate_id: str):
        certificate = platform.engine.certificates.get(certificate_id)
        if certificate is None:
            raise NotFound(f"certificate {certificate_id} not found")
        return certificate.envelope()

    @app.get("/certificates/{certificate_id}/verify")
    def verify_certificate(certificate_id: str):
        from . import attest

        certificate = platform.engine.certificates.get(certificate_id)
        if certificate is None:
            raise NotFound(f"certificate {certificate_id} not found")
        valid = attest.verify(certificate.envelope(), platform.signing_key.public_bytes)
        return {"certificate_id": certificate_id, "valid": valid}

    @app.get("/alerts")
    def alerts(recipient: str, entry: TokenEntry = Depends(authenticate)):
        if entry.role != "admin" and entry.account != recipient:
            raise Forbidden("alerts are private to their recipient")
        return {"alerts": [a.export() for a in platform.alerts_for(recipient)]}

    @app.get("/admin/ledger/trial-balance")
    def trial_balance(entry: TokenEntry = Depends(require_admin)):
        return {"trial_balance": platform.ledger.trial_balance()}

    @app.get("/admin/linkage/{account}")
    def linkage_info(account: str, entry: TokenEntry = Depends(require_admin)):
        return {
            "account": account,
            "cluster_id": platform.linkage.cluster_of(account),
            "members": sorted(platform.linkage.cluster_members(account)),
        }

    @app.post("/admin/scenario")
    def admin_scenario(body: dict, entry: TokenEntry = Depends(require_admin)):
        if not config.dev_mode:
            raise Forbidden("scenario runs are enabled in dev mode only")
        report = run_scenario(scenario_from_dict(body))
        return report.export()

    return app


def serve(config: ServiceConfig, host: str = "127.0.0.1", port: int = 8800) -> None:
    import uvicorn

    uvicorn.run(create_app(config), host=host, port=port, log_level="warning")
