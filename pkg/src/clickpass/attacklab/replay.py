"""Replay harness: capture a successful login, then resubmit it verbatim.

The engine's single-use nonces must reject every replayed request. The
harness can also inject a fault (restoring the session and its nonce
state to the pre-login snapshot) to prove it would catch a regression:
with the nonce bookkeeping undone, the verbatim replay succeeds and the
check reports the system as not resisting.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from ..errors import ClickpassError
from ..flows import SessionEngine, VERDICT_SUCCESS
from ..store import SessionRecord


@dataclass
class LoginTranscript:
    """Everything an eavesdropper would capture from one login."""

    user_id: str
    session_id: str
    requests: list[dict]  # {"x", "y", "nonce"} in submission order
    verdict: str
    snapshot: SessionRecord | None = None  # harness-only, not captured data


@dataclass
class ReplayResult:
    resisted: bool
    accepted_requests: int
    rejected_requests: int
    replay_verdict: str | None
    outcomes: list[str] = field(default_factory=list)


def capture_login(
    engine: SessionEngine, user_id: str, clicks: list[tuple[int, int]]
) -> LoginTranscript:
    """Perform a login and record the request stream verbatim."""
    started = engine.start_login(user_id)
    snapshot = engine.sessions.snapshot(started.session_id)
    nonce = started.nonce
    requests = []
    verdict = ""
    for x, y in clicks:
        requests.append({"x": x, "y": y, "nonce": nonce})
        resp = engine.click(started.session_id, x, y, nonce)
        nonce = resp.nonce
        if resp.kind == "verdict":
            verdict = resp.payload["verdict"]
    return LoginTranscript(
        user_id=user_id,
        session_id=started.session_id,
        requests=requests,
        verdict=verdict,
        snapshot=snapshot,
    )


def replay_check(
    engine: SessionEngine,
    transcript: LoginTranscript,
    *,
    fault: Callable[[], None] | None = None,
) -> ReplayResult:
    """Resubmit the transcript byte-for-byte; True means every request was
    rejected. `fault` runs first and exists to verify the harness flags a
    broken nonce store (see module docstring)."""
    if fault is not None:
        fault()
    accepted = 0
    rejected = 0
    verdict = None
    outcomes = []
    for req in transcript.requests:
        try:
            resp = engine.click(
                transcript.session_id, req["x"], req["y"], req["nonce"]
            )
        except ClickpassError as exc:
            rejected += 1
            outcomes.append(type(exc).__name__)
            continue
        accepted += 1
        outcomes.append(resp.kind)
        if resp.kind == "verdict":
            verdict = resp.payload["verdict"]
    resisted = accepted == 0 and verdict != VERDICT_SUCCESS
    return ReplayResult(
        resisted=resisted,
        accepted_requests=accepted,
        rejected_requests=rejected,
        replay_verdict=verdict,
        outcomes=outcomes,
    )
