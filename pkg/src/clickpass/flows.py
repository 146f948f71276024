"""Enrollment and login state machines plus the persuasive viewport.

Registration walks the user through c clicks, each constrained to a
randomly placed viewport that only exists during password creation;
"shuffle" redraws it. Login is free clicking: each probe is resolved
against the stored grid phase, routes to the next image, and the only
verdict (SUCCESS or NO_MATCH_FOUND) appears after the full sequence.

Transition functions are pure (state in, state out); SessionEngine binds
them to the stores, a clock and an entropy source, and is what the HTTP
layer adapts.
"""

from __future__ import annotations

import base64
import hashlib
import hmac
import random
import time
from dataclasses import dataclass, replace
from typing import Any

from .credential import (
    DEFAULT_CLICKS,
    KdfParams,
    MIN_CLICKS,
    PasswordRecord,
    next_image,
    probe_cells,
    record_from_discretized,
    verify_sequence,
)
from .errors import (
    ConfigError,
    ConflictError,
    DomainError,
    NonceReplayError,
    NotFoundError,
    PolicyError,
    SessionExpiredError,
)
from .grid import ClickPoint, DiscretizedPoint, discretize
from .store import AccountStore, SecurityQuestion, SessionStore, UserAccount

VERDICT_SUCCESS = "SUCCESS"
VERDICT_NO_MATCH = "NO_MATCH_FOUND"

DEFAULT_VIEWPORT_SIDE = 75
DEFAULT_SESSION_TTL = 600.0
TOLERANCE_RANGE = (1, 50)
CLICKS_RANGE = (MIN_CLICKS, 10)


@dataclass(frozen=True)
class Viewport:
    x0: int
    y0: int
    side: int

    def contains(self, p: ClickPoint) -> bool:
        return (
            self.x0 <= p.x < self.x0 + self.side
            and self.y0 <= p.y < self.y0 + self.side
        )


def generate_viewport(rng: random.Random, width: int, height: int, side: int) -> Viewport:
    """Uniformly random placement over every valid top-left position."""
    if side < 1:
        raise ConfigError(f"viewport side must be >= 1, got {side}")
    if side > width or side > height:
        raise ConfigError(
            f"viewport side {side} exceeds image {width}x{height}"
        )
    return Viewport(rng.randint(0, width - side), rng.randint(0, height - side), side)


def nonce_at(nonce_key: bytes, counter: int) -> str:
    """Single-use nonce chain: deterministic per session, never reissued.

    The key stays server-side, so the chain is unpredictable to clients
    while letting a restored session snapshot reproduce its own nonces
    (which is what the replay regression harness relies on).
    """
    return hmac.new(nonce_key, counter.to_bytes(8, "big"), hashlib.sha256).hexdigest()[:32]


@dataclass(frozen=True)
class SessionState:
    """Server-side progress of one enrollment or login."""

    session_id: str
    user_id: str
    mode: str  # enroll | login | forgot
    position: int
    current_image: str
    pending_enroll: tuple[DiscretizedPoint, ...]
    pending_probes: tuple[ClickPoint, ...]
    images_seen: tuple[str, ...]
    viewport: Viewport | None
    shuffles_used: int
    nonce_key: bytes
    nonce_counter: int
    used_nonces: frozenset[str]
    t: int
    c: int
    portfolio: tuple[str, ...]
    portfolio_seed: bytes
    salt: bytes
    record: PasswordRecord | None = None
    decoy: bool = False
    reset: bool = False

    @property
    def nonce(self) -> str:
        return nonce_at(self.nonce_key, self.nonce_counter)

    @property
    def terminal(self) -> bool:
        return self.position >= self.c

    def to_dict(self) -> dict[str, Any]:
        return {
            "session_id": self.session_id,
            "user_id": self.user_id,
            "mode": self.mode,
            "position": self.position,
            "current_image": self.current_image,
            "pending_enroll": [
                [d.cell_x, d.cell_y, d.offset_x, d.offset_y] for d in self.pending_enroll
            ],
            "pending_probes": [[p.x, p.y] for p in self.pending_probes],
            "images_seen": list(self.images_seen),
            "viewport": None
            if self.viewport is None
            else [self.viewport.x0, self.viewport.y0, self.viewport.side],
            "shuffles_used": self.shuffles_used,
            "nonce_key": base64.b64encode(self.nonce_key).decode(),
            "nonce_counter": self.nonce_counter,
            "used_nonces": sorted(self.used_nonces),
            "t": self.t,
            "c": self.c,
            "portfolio": list(self.portfolio),
            "portfolio_seed": base64.b64encode(self.portfolio_seed).decode(),
            "salt": base64.b64encode(self.salt).decode(),
            "record": None if self.record is None else _record_to_dict(self.record),
            "decoy": self.decoy,
            "reset": self.reset,
        }

    @staticmethod
    def from_dict(d: dict[str, Any]) -> "SessionState":
        vp = d["viewport"]
        return SessionState(
            session_id=d["session_id"],
            user_id=d["user_id"],
            mode=d["mode"],
            position=d["position"],
            current_image=d["current_image"],
            pending_enroll=tuple(
                DiscretizedPoint(cx, cy, ox, oy) for cx, cy, ox, oy in d["pending_enroll"]
            ),
            pending_probes=tuple(ClickPoint(x, y) for x, y in d["pending_probes"]),
            images_seen=tuple(d["images_seen"]),
            viewport=None if vp is None else Viewport(*vp),
            shuffles_used=d["shuffles_used"],
            nonce_key=base64.b64decode(d["nonce_key"]),
            nonce_counter=d["nonce_counter"],
            used_nonces=frozenset(d["used_nonces"]),
            t=d["t"],
            c=d["c"],
            portfolio=tuple(d["portfolio"]),
            portfolio_seed=base64.b64decode(d["portfolio_seed"]),
            salt=base64.b64decode(d["salt"]),
            record=None if d["record"] is None else _record_from_dict(d["record"]),
            decoy=d["decoy"],
            reset=d["reset"],
        )


def _record_to_dict(rec: PasswordRecord) -> dict[str, Any]:
    return {
        "digest": base64.b64encode(rec.digest).decode(),
        "salt": base64.b64encode(rec.salt).decode(),
        "offsets": [[ox, oy] for ox, oy in rec.offsets],
        "t": rec.t,
        "c": rec.c,
        "portfolio_seed": base64.b64encode(rec.portfolio_seed).decode(),
        "start_image": rec.start_image,
        "kdf": [rec.kdf.log2_n, rec.kdf.r, rec.kdf.p],
    }


def _record_from_dict(d: dict[str, Any]) -> PasswordRecord:
    return PasswordRecord(
        digest=base64.b64decode(d["digest"]),
        salt=base64.b64decode(d["salt"]),
        offsets=tuple((ox, oy) for ox, oy in d["offsets"]),
        t=d["t"],
        c=d["c"],
        portfolio_seed=base64.b64decode(d["portfolio_seed"]),
        start_image=d["start_image"],
        kdf=KdfParams(*d["kdf"]),
    )


# -- transition outcomes ----------------------------------------------------


@dataclass(frozen=True)
class ClickAccepted:
    position: int
    next_image_id: str
    viewport: Viewport


@dataclass(frozen=True)
class ClickRejected:
    position: int
    viewport: Viewport
    reason: str = "outside_viewport"


@dataclass(frozen=True)
class EnrollCompleted:
    record: PasswordRecord
    images: tuple[str, ...]


@dataclass(frozen=True)
class LoginProgress:
    position: int
    next_image_id: str


@dataclass(frozen=True)
class LoginVerdict:
    verdict: str


# -- pure transitions ---------------------------------------------------------


def enroll_click(
    state: SessionState,
    click: ClickPoint,
    dims: dict[str, tuple[int, int]],
    rng: random.Random,
    kdf: KdfParams,
) -> tuple[SessionState, ClickAccepted | ClickRejected | EnrollCompleted]:
    """One enrollment click: accept inside the viewport, advance, cue the
    next image with a fresh viewport; outside-viewport clicks only set a
    rejection outcome and leave the position untouched."""
    if state.mode != "enroll":
        raise ConflictError("session is not enrolling")
    if state.terminal:
        raise ConflictError("enrollment already complete")
    width, height = dims[state.current_image]
    if not (0 <= click.x < width and 0 <= click.y < height):
        raise DomainError(f"click ({click.x}, {click.y}) outside {width}x{height}")
    assert state.viewport is not None  # enroll invariant
    if not state.viewport.contains(click):
        return state, ClickRejected(state.position, state.viewport)

    d = discretize(click, state.t, width, height)
    pending = state.pending_enroll + (d,)
    images = state.images_seen + (state.current_image,)
    position = state.position + 1
    if position == state.c:
        record = record_from_discretized(
            state.salt, list(pending), list(images), state.t,
            state.portfolio_seed, kdf,
        )
        new = replace(
            state,
            pending_enroll=pending,
            images_seen=images,
            position=position,
            viewport=None,
        )
        return new, EnrollCompleted(record=record, images=images)

    nxt = next_image(
        state.portfolio_seed, state.position, state.current_image,
        (d.cell_x, d.cell_y), list(state.portfolio),
    )
    nw, nh = dims[nxt]
    viewport = generate_viewport(rng, nw, nh, min(max(state.viewport.side, state.t), nw, nh))
    new = replace(
        state,
        pending_enroll=pending,
        images_seen=images,
        position=position,
        current_image=nxt,
        viewport=viewport,
    )
    return new, ClickAccepted(position=position, next_image_id=nxt, viewport=viewport)


def enroll_shuffle(
    state: SessionState, dims: dict[str, tuple[int, int]], rng: random.Random
) -> tuple[SessionState, Viewport]:
    """Redraw the viewport; position is unchanged, the shuffle is counted."""
    if state.mode != "enroll":
        raise ConflictError("shuffle is only available during password creation")
    if state.terminal:
        raise ConflictError("enrollment already complete")
    width, height = dims[state.current_image]
    assert state.viewport is not None
    viewport = generate_viewport(rng, width, height, state.viewport.side)
    new = replace(state, viewport=viewport, shuffles_used=state.shuffles_used + 1)
    return new, viewport


def login_click(
    state: SessionState,
    click: ClickPoint,
    dims: dict[str, tuple[int, int]],
) -> tuple[SessionState, LoginProgress | LoginVerdict]:
    """One login probe: no viewport, no correctness hint. The probe's cell
    under the stored grid phase cues the next image; after click c the full
    sequence is verified in one shot."""
    if state.mode != "login":
        raise ConflictError("session is not logging in")
    if state.terminal:
        raise ConflictError("login already complete")
    width, height = dims[state.current_image]
    if not (0 <= click.x < width and 0 <= click.y < height):
        raise DomainError(f"click ({click.x}, {click.y}) outside {width}x{height}")
    assert state.record is not None
    cell = probe_cells(state.record, state.position, click)
    probes = state.pending_probes + (click,)
    images = state.images_seen + (state.current_image,)
    position = state.position + 1
    if position == state.c:
        ok = verify_sequence(state.record, list(probes), list(images))
        ok = ok and not state.decoy
        new = replace(
            state, pending_probes=probes, images_seen=images, position=position
        )
        return new, LoginVerdict(VERDICT_SUCCESS if ok else VERDICT_NO_MATCH)

    nxt = next_image(
        state.portfolio_seed, state.position, state.current_image,
        cell, list(state.portfolio),
    )
    new = replace(
        state,
        pending_probes=probes,
        images_seen=images,
        position=position,
        current_image=nxt,
    )
    return new, LoginProgress(position=position, next_image_id=nxt)


# -- engine -------------------------------------------------------------------


def answer_digest(answer: str, salt: bytes, kdf: KdfParams) -> bytes:
    """Digest of a normalized security-question answer."""
    normalized = answer.strip().casefold().encode("utf-8")
    n = 1 << kdf.log2_n
    return hashlib.scrypt(
        normalized, salt=salt, n=n, r=kdf.r, p=kdf.p,
        maxmem=256 * kdf.r * n + (1 << 20), dklen=32,
    )


@dataclass(frozen=True)
class EnrollStarted:
    session_id: str
    image_id: str
    width: int
    height: int
    viewport: Viewport
    nonce: str
    position: int
    clicks_required: int


@dataclass(frozen=True)
class LoginStarted:
    session_id: str
    image_id: str
    width: int
    height: int
    nonce: str
    position: int
    clicks_required: int


@dataclass(frozen=True)
class StepResponse:
    """Uniform click response the HTTP layer serializes verbatim."""

    kind: str  # enroll_progress | enroll_rejected | enrolled | login_progress | verdict
    session_id: str
    position: int
    payload: dict[str, Any]
    nonce: str | None


@dataclass(frozen=True)
class ForgotOutcome:
    granted: bool
    reset_token: str | None


class SessionEngine:
    """Binds the pure flow transitions to stores, clock and entropy.

    Every public method is one externally reachable transition; the HTTP
    service is a field-for-field adapter over these calls.
    """

    def __init__(
        self,
        accounts: AccountStore,
        sessions: SessionStore | None = None,
        *,
        rng: random.Random | None = None,
        clock=time.time,
        viewport_side: int = DEFAULT_VIEWPORT_SIDE,
        session_ttl: float = DEFAULT_SESSION_TTL,
        kdf: KdfParams = KdfParams(),
        default_t: int = 5,
        default_c: int = DEFAULT_CLICKS,
    ):
        self.accounts = accounts
        self.sessions = sessions if sessions is not None else SessionStore(clock=clock)
        self.rng = rng if rng is not None else random.SystemRandom()
        self.clock = clock
        self.viewport_side = viewport_side
        self.session_ttl = session_ttl
        self.kdf = kdf
        self.default_t = default_t
        self.default_c = default_c
        self._server_secret = self.rng.randbytes(32)
        self._pending_questions: dict[str, SecurityQuestion] = {}
        self._active_enrollments: dict[str, str] = {}

    # -- helpers ---------------------------------------------------------

    def _dims(self, image_ids: tuple[str, ...]) -> dict[str, tuple[int, int]]:
        dims: dict[str, tuple[int, int]] = {}
        for image_id in image_ids:
            meta = self.accounts.fetch_image_meta(image_id)
            if meta is None:
                raise NotFoundError(f"image {image_id} missing from manifest")
            dims[image_id] = (meta.width, meta.height)
        return dims

    def _new_session_id(self) -> str:
        return self.rng.randbytes(16).hex()

    def _portfolio(self) -> tuple[str, ...]:
        manifest = self.accounts.image_manifest()
        if not manifest:
            raise ConfigError("no images ingested; portfolio is empty")
        return tuple(m.image_id for m in manifest)

    def _load(self, session_id: str) -> tuple[SessionState, int]:
        try:
            rec = self.sessions.get(session_id)
        except NotFoundError as exc:
            raise SessionExpiredError(str(exc)) from exc
        if rec.expires_at < self.clock():
            self.sessions.delete(session_id)
            raise SessionExpiredError(f"session {session_id} expired")
        return SessionState.from_dict(rec.state), rec.version

    def _check_single_enrollment(self, user_id: str) -> None:
        """One in-flight enrollment per user; stale sessions free the slot."""
        sid = self._active_enrollments.get(user_id)
        if sid is None:
            return
        try:
            state, _ = self._load(sid)
        except SessionExpiredError:
            del self._active_enrollments[user_id]
            return
        if state.mode == "enroll" and not state.terminal:
            raise ConflictError(f"user {user_id} already has an open enrollment")
        del self._active_enrollments[user_id]

    def _consume_nonce(self, state: SessionState, nonce: str) -> SessionState:
        if nonce in state.used_nonces:
            raise NonceReplayError("nonce already used")
        if nonce != state.nonce:
            raise NonceReplayError("stale or unknown nonce")
        return replace(
            state,
            used_nonces=state.used_nonces | {nonce},
            nonce_counter=state.nonce_counter + 1,
        )

    # -- signup / enrollment ----------------------------------------------

    def start_enroll(
        self,
        user_id: str,
        t: int | None = None,
        c: int | None = None,
        question: str = "",
        answer: str = "",
        reset_token: str | None = None,
    ) -> EnrollStarted:
        t = self.default_t if t is None else t
        c = self.default_c if c is None else c
        if not (TOLERANCE_RANGE[0] <= t <= TOLERANCE_RANGE[1]):
            raise PolicyError(f"tolerance must be in {TOLERANCE_RANGE}, got {t}")
        if not (CLICKS_RANGE[0] <= c <= CLICKS_RANGE[1]):
            raise PolicyError(f"click count must be in {CLICKS_RANGE}, got {c}")
        if not user_id:
            raise PolicyError("user_id must be non-empty")

        reset = False
        if reset_token is not None:
            # a valid reset token supersedes any half-finished enrollment
            owner = self.accounts.consume_reset_token(reset_token)
            if owner != user_id:
                raise PolicyError("invalid reset token")
            reset = True
        else:
            self._check_single_enrollment(user_id)
            if self.accounts.fetch_account(user_id) is not None:
                raise ConflictError(f"user {user_id} already exists")

        portfolio = self._portfolio()
        dims = self._dims(portfolio)
        start = portfolio[self.rng.randrange(len(portfolio))]
        w, h = dims[start]
        side = min(max(self.viewport_side, t), w, h)
        viewport = generate_viewport(self.rng, w, h, side)
        state = SessionState(
            session_id=self._new_session_id(),
            user_id=user_id,
            mode="enroll",
            position=0,
            current_image=start,
            pending_enroll=(),
            pending_probes=(),
            images_seen=(),
            viewport=viewport,
            shuffles_used=0,
            nonce_key=self.rng.randbytes(16),
            nonce_counter=0,
            used_nonces=frozenset(),
            t=t,
            c=c,
            portfolio=portfolio,
            portfolio_seed=self.rng.randbytes(16),
            salt=self.rng.randbytes(16),
            reset=reset,
        )
        # The question/answer ride along in the session until completion.
        answer_salt = self.rng.randbytes(16)
        self._pending_questions[state.session_id] = SecurityQuestion(
            question=question,
            answer_salt=answer_salt,
            answer_digest=answer_digest(answer, answer_salt, self.kdf),
        )
        self.sessions.create(state.session_id, state.to_dict(), self.session_ttl)
        self._active_enrollments[user_id] = state.session_id
        return EnrollStarted(
            session_id=state.session_id,
            image_id=start,
            width=w,
            height=h,
            viewport=viewport,
            nonce=state.nonce,
            position=0,
            clicks_required=c,
        )

    # -- login --------------------------------------------------------------

    def _decoy_record(self, user_id: str) -> tuple[PasswordRecord, tuple[str, ...]]:
        """Deterministic fake credential for unknown users: the login flow
        proceeds normally and always ends NO_MATCH_FOUND, so the endpoint
        does not reveal which accounts exist."""
        seed = hmac.new(self._server_secret, user_id.encode(), hashlib.sha256).digest()
        drng = random.Random(int.from_bytes(seed, "big"))
        portfolio = self._portfolio()
        t, c = self.default_t, self.default_c
        offsets = tuple((drng.randrange(t), drng.randrange(t)) for _ in range(c))
        record = PasswordRecord(
            digest=drng.randbytes(32),
            salt=drng.randbytes(16),
            offsets=offsets,
            t=t,
            c=c,
            portfolio_seed=drng.randbytes(16),
            start_image=portfolio[drng.randrange(len(portfolio))],
            kdf=self.kdf,
        )
        return record, portfolio

    def start_login(self, user_id: str) -> LoginStarted:
        acct = self.accounts.fetch_account(user_id)
        if acct is None:
            record, portfolio = self._decoy_record(user_id)
            decoy = True
            c = record.c
        else:
            record, portfolio = acct.record, acct.portfolio
            decoy = False
            c = acct.c
        dims = self._dims(portfolio)
        w, h = dims[record.start_image]
        state = SessionState(
            session_id=self._new_session_id(),
            user_id=user_id,
            mode="login",
            position=0,
            current_image=record.start_image,
            pending_enroll=(),
            pending_probes=(),
            images_seen=(),
            viewport=None,
            shuffles_used=0,
            nonce_key=self.rng.randbytes(16),
            nonce_counter=0,
            used_nonces=frozenset(),
            t=record.t,
            c=c,
            portfolio=portfolio,
            portfolio_seed=record.portfolio_seed,
            salt=record.salt,
            record=record,
            decoy=decoy,
        )
        self.sessions.create(state.session_id, state.to_dict(), self.session_ttl)
        return LoginStarted(
            session_id=state.session_id,
            image_id=record.start_image,
            width=w,
            height=h,
            nonce=state.nonce,
            position=0,
            clicks_required=c,
        )

    # -- clicks ----------------------------------------------------------------

    def click(self, session_id: str, x: int, y: int, nonce: str) -> StepResponse:
        state, version = self._load(session_id)
        state = self._consume_nonce(state, nonce)
        if state.terminal:
            raise ConflictError("session already complete")
        dims = self._dims(state.portfolio)
        point = ClickPoint(x, y)

        if state.mode == "enroll":
            new, outcome = enroll_click(state, point, dims, self.rng, self.kdf)
            self.sessions.cas_update(session_id, version, new.to_dict())
            if isinstance(outcome, EnrollCompleted):
                self._finish_enroll(new, outcome)
                return StepResponse(
                    kind="enrolled",
                    session_id=session_id,
                    position=new.position,
                    payload={"user_id": new.user_id},
                    nonce=None,
                )
            if isinstance(outcome, ClickRejected):
                return StepResponse(
                    kind="enroll_rejected",
                    session_id=session_id,
                    position=outcome.position,
                    payload={
                        "reason": outcome.reason,
                        "viewport": _viewport_dict(outcome.viewport),
                    },
                    nonce=new.nonce,
                )
            w, h = dims[outcome.next_image_id]
            return StepResponse(
                kind="enroll_progress",
                session_id=session_id,
                position=outcome.position,
                payload={
                    "next_image_ref": f"/api/image/{outcome.next_image_id}",
                    "image_width": w,
                    "image_height": h,
                    "viewport": _viewport_dict(outcome.viewport),
                },
                nonce=new.nonce,
            )

        if state.mode == "login":
            new, outcome = login_click(state, point, dims)
            self.sessions.cas_update(session_id, version, new.to_dict())
            if isinstance(outcome, LoginVerdict):
                return StepResponse(
                    kind="verdict",
                    session_id=session_id,
                    position=new.position,
                    payload={"verdict": outcome.verdict},
                    nonce=None,
                )
            w, h = dims[outcome.next_image_id]
            return StepResponse(
                kind="login_progress",
                session_id=session_id,
                position=outcome.position,
                payload={
                    "next_image_ref": f"/api/image/{outcome.next_image_id}",
                    "image_width": w,
                    "image_height": h,
                },
                nonce=new.nonce,
            )

        raise ConflictError(f"session mode {state.mode} accepts no clicks")

    def _finish_enroll(self, state: SessionState, outcome: EnrollCompleted) -> None:
        question = self._pending_questions.pop(
            state.session_id,
            SecurityQuestion(question="", answer_salt=b"\x00", answer_digest=b"\x00"),
        )
        acct = UserAccount(
            user_id=state.user_id,
            t=state.t,
            c=state.c,
            security_question=question,
            record=outcome.record,
            portfolio=state.portfolio,
            created_at=self.clock(),
        )
        self.accounts.upsert_account(
            acct, mode="replace" if state.reset else "create"
        )
        self._active_enrollments.pop(state.user_id, None)

    def shuffle(self, session_id: str) -> tuple[Viewport, int]:
        state, version = self._load(session_id)
        dims = self._dims((state.current_image,))
        new, viewport = enroll_shuffle(state, dims, self.rng)
        self.sessions.cas_update(session_id, version, new.to_dict())
        return viewport, new.position

    # -- forgot password -----------------------------------------------------

    def forgot_password(self, user_id: str, answer: str) -> ForgotOutcome:
        """Constant-shape: unknown user and wrong answer are the same denial."""
        acct = self.accounts.fetch_account(user_id)
        if acct is None:
            # Same digest work as the real path, then deny.
            answer_digest(answer, self._server_secret[:16], self.kdf)
            return ForgotOutcome(granted=False, reset_token=None)
        q = acct.security_question
        candidate = answer_digest(answer, q.answer_salt, self.kdf)
        if not hmac.compare_digest(candidate, q.answer_digest):
            return ForgotOutcome(granted=False, reset_token=None)
        token = self.rng.randbytes(16).hex()
        self.accounts.put_reset_token(token, user_id)
        return ForgotOutcome(granted=True, reset_token=token)


def _viewport_dict(v: Viewport) -> dict[str, int]:
    return {"x0": v.x0, "y0": v.y0, "side": v.side}
