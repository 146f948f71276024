"""Persistence: accounts and image manifest on disk, sessions in memory.

Accounts are serialized to schema-versioned UTF-8 JSON (binary fields
base64) and kept in a single-writer SQLite key-value table; the at-rest
form carries offsets, salts and digests but never cell indices or raw
click coordinates. Sessions hold in-flight click material and therefore
never touch the durable store: they live in a process-local map with
compare-and-swap semantics that serializes flow transitions.
"""

from __future__ import annotations

import base64
import copy
import json
import sqlite3
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable

from .credential import ImageMeta, KdfParams, PasswordRecord
from .errors import ConflictError, DomainError, NotFoundError, StorageError

SCHEMA_VERSION = "v1"


@dataclass(frozen=True)
class SecurityQuestion:
    question: str
    answer_salt: bytes
    answer_digest: bytes


@dataclass(frozen=True)
class UserAccount:
    user_id: str
    t: int
    c: int
    security_question: SecurityQuestion
    record: PasswordRecord
    portfolio: tuple[str, ...]
    created_at: float

    def __post_init__(self) -> None:
        if not self.user_id:
            raise DomainError("user_id must be non-empty")
        if self.t < 1 or self.c < 3:
            raise DomainError("account invariants violated (t >= 1, c >= 3)")


def _b64(b: bytes) -> str:
    return base64.b64encode(b).decode("ascii")


def _unb64(s: str) -> bytes:
    return base64.b64decode(s.encode("ascii"))


def account_to_dict(acct: UserAccount, *, redact: bool = False) -> dict[str, Any]:
    """Canonical JSON-able form. redact=True strips salts and digests
    (export for an attacker model without database access)."""
    rec = acct.record
    record: dict[str, Any] = {
        "offsets": [[ox, oy] for ox, oy in rec.offsets],
        "t": rec.t,
        "c": rec.c,
        "portfolio_seed": _b64(rec.portfolio_seed),
        "start_image": rec.start_image,
        "kdf": {"log2_n": rec.kdf.log2_n, "r": rec.kdf.r, "p": rec.kdf.p},
    }
    question: dict[str, Any] = {"question": acct.security_question.question}
    if not redact:
        record["digest"] = _b64(rec.digest)
        record["salt"] = _b64(rec.salt)
        question["answer_salt"] = _b64(acct.security_question.answer_salt)
        question["answer_digest"] = _b64(acct.security_question.answer_digest)
    return {
        "schema": SCHEMA_VERSION,
        "user_id": acct.user_id,
        "t": acct.t,
        "c": acct.c,
        "security_question": question,
        "record": record,
        "portfolio": list(acct.portfolio),
        "created_at": acct.created_at,
    }


def account_from_dict(d: dict[str, Any]) -> UserAccount:
    if d.get("schema") != SCHEMA_VERSION:
        raise StorageError(f"unsupported account schema: {d.get('schema')!r}")
    rec = d["record"]
    kdf = rec["kdf"]
    record = PasswordRecord(
        digest=_unb64(rec["digest"]),
        salt=_unb64(rec["salt"]),
        offsets=tuple((ox, oy) for ox, oy in rec["offsets"]),
        t=rec["t"],
        c=rec["c"],
        portfolio_seed=_unb64(rec["portfolio_seed"]),
        start_image=rec["start_image"],
        kdf=KdfParams(log2_n=kdf["log2_n"], r=kdf["r"], p=kdf["p"]),
    )
    q = d["security_question"]
    question = SecurityQuestion(
        question=q["question"],
        answer_salt=_unb64(q["answer_salt"]),
        answer_digest=_unb64(q["answer_digest"]),
    )
    return UserAccount(
        user_id=d["user_id"],
        t=d["t"],
        c=d["c"],
        security_question=question,
        record=record,
        portfolio=tuple(d["portfolio"]),
        created_at=d["created_at"],
    )


def serialize_account(acct: UserAccount) -> str:
    return json.dumps(account_to_dict(acct), sort_keys=True, separators=(",", ":"))


def deserialize_account(raw: str) -> UserAccount:
    return account_from_dict(json.loads(raw))


class AccountStore:
    """Single-writer embedded key-value store for accounts and image metadata.

    path=":memory:" keeps everything in process (tests, simulations).
    """

    def __init__(self, path: str | Path = ":memory:"):
        self._path = str(path)
        self._conn = sqlite3.connect(self._path, check_same_thread=False)
        self._lock = threading.Lock()
        with self._lock:
            self._conn.execute(
                "CREATE TABLE IF NOT EXISTS kv ("
                " ns TEXT NOT NULL, key TEXT NOT NULL, value TEXT NOT NULL,"
                " PRIMARY KEY (ns, key))"
            )
            self._conn.commit()

    def close(self) -> None:
        self._conn.close()

    def _put(self, ns: str, key: str, value: str, *, create: bool) -> None:
        try:
            with self._lock:
                if create:
                    self._conn.execute(
                        "INSERT INTO kv (ns, key, value) VALUES (?, ?, ?)",
                        (ns, key, value),
                    )
                else:
                    self._conn.execute(
                        "INSERT OR REPLACE INTO kv (ns, key, value) VALUES (?, ?, ?)",
                        (ns, key, value),
                    )
                self._conn.commit()
        except sqlite3.IntegrityError as exc:
            raise ConflictError(f"{ns}:{key} already exists") from exc
        except sqlite3.Error as exc:
            raise StorageError(str(exc)) from exc

    def _get(self, ns: str, key: str) -> str | None:
        try:
            with self._lock:
                row = self._conn.execute(
                    "SELECT value FROM kv WHERE ns = ? AND key = ?", (ns, key)
                ).fetchone()
        except sqlite3.Error as exc:
            raise StorageError(str(exc)) from exc
        return None if row is None else row[0]

    def _all(self, ns: str) -> list[str]:
        try:
            with self._lock:
                rows = self._conn.execute(
                    "SELECT value FROM kv WHERE ns = ? ORDER BY key", (ns,)
                ).fetchall()
        except sqlite3.Error as exc:
            raise StorageError(str(exc)) from exc
        return [r[0] for r in rows]

    # -- accounts ---------------------------------------------------------

    def upsert_account(self, acct: UserAccount, *, mode: str = "create") -> None:
        """Durably write an account. mode="create" conflicts on duplicates;
        mode="replace" overwrites (password reset re-enrollment)."""
        if mode not in ("create", "replace"):
            raise DomainError(f"unknown upsert mode {mode!r}")
        self._put("accounts", acct.user_id, serialize_account(acct), create=(mode == "create"))

    def fetch_account(self, user_id: str) -> UserAccount | None:
        raw = self._get("accounts", user_id)
        if raw is None:
            # Decode a canned record so the miss path does comparable work
            # to a hit (anti-enumeration, best effort).
            json.loads(_DECOY_ACCOUNT_JSON)
            return None
        return deserialize_account(raw)

    def account_ids(self) -> list[str]:
        return [json.loads(raw)["user_id"] for raw in self._all("accounts")]

    def export_accounts_jsonl(self, path: str | Path, *, mode: str = "full") -> int:
        """Write one JSON object per account.

        mode="full" keeps salts and digests (attacker-with-database corpus);
        mode="redacted" strips them (attacker without database access).
        """
        if mode not in ("full", "redacted"):
            raise DomainError(f"unknown export mode {mode!r}")
        count = 0
        with open(path, "w", encoding="utf-8") as fh:
            for raw in self._all("accounts"):
                acct = deserialize_account(raw)
                d = account_to_dict(acct, redact=(mode == "redacted"))
                fh.write(json.dumps(d, sort_keys=True, separators=(",", ":")))
                fh.write("\n")
                count += 1
        return count

    # -- image manifest ----------------------------------------------------

    def put_image_meta(self, meta: ImageMeta) -> None:
        d = {
            "image_id": meta.image_id,
            "width": meta.width,
            "height": meta.height,
            "source": meta.source,
            "content_hash": meta.content_hash,
            "label": meta.label,
        }
        self._put("images", meta.image_id, json.dumps(d, sort_keys=True), create=False)

    def fetch_image_meta(self, image_id: str) -> ImageMeta | None:
        raw = self._get("images", image_id)
        if raw is None:
            return None
        d = json.loads(raw)
        return ImageMeta(**d)

    def image_manifest(self) -> list[ImageMeta]:
        return [ImageMeta(**json.loads(raw)) for raw in self._all("images")]

    def write_manifest_json(self, path: str | Path) -> None:
        metas = [
            {
                "image_id": m.image_id,
                "width": m.width,
                "height": m.height,
                "source": m.source,
                "content_hash": m.content_hash,
                "label": m.label,
            }
            for m in self.image_manifest()
        ]
        Path(path).write_text(json.dumps(metas, indent=2, sort_keys=True))

    # -- reset tokens -------------------------------------------------------

    def put_reset_token(self, token: str, user_id: str) -> None:
        self._put("reset_tokens", token, user_id, create=True)

    def consume_reset_token(self, token: str) -> str | None:
        """Single use: returns the user id and deletes the token, or None."""
        try:
            with self._lock:
                row = self._conn.execute(
                    "SELECT value FROM kv WHERE ns = 'reset_tokens' AND key = ?",
                    (token,),
                ).fetchone()
                if row is None:
                    return None
                self._conn.execute(
                    "DELETE FROM kv WHERE ns = 'reset_tokens' AND key = ?", (token,)
                )
                self._conn.commit()
        except sqlite3.Error as exc:
            raise StorageError(str(exc)) from exc
        return row[0]


# A syntactically valid account body used to equalize the fetch miss path.
_DECOY_ACCOUNT_JSON = json.dumps(
    {
        "schema": SCHEMA_VERSION,
        "user_id": "__decoy__",
        "t": 5,
        "c": 5,
        "security_question": {"question": ""},
        "record": {"offsets": [[0, 0]] * 5, "t": 5, "c": 5},
        "portfolio": [],
        "created_at": 0.0,
    },
    sort_keys=True,
)


@dataclass
class SessionRecord:
    """Mutable wrapper the session store hands out; state is any dict."""

    session_id: str
    state: dict[str, Any]
    version: int = 0
    expires_at: float = 0.0


class SessionStore:
    """In-memory sessions with compare-and-swap version checks.

    Keeping these out of the durable store is what lets the at-rest audit
    hold: pending clicks and cells exist only in process memory.
    """

    def __init__(self, clock=time.time):
        self._clock = clock
        self._lock = threading.Lock()
        self._sessions: dict[str, SessionRecord] = {}

    def create(self, session_id: str, state: dict[str, Any], ttl: float) -> SessionRecord:
        with self._lock:
            if session_id in self._sessions:
                raise ConflictError(f"session {session_id} already exists")
            rec = SessionRecord(
                session_id=session_id,
                state=copy.deepcopy(state),
                version=1,
                expires_at=self._clock() + ttl,
            )
            self._sessions[session_id] = rec
            return copy.deepcopy(rec)

    def get(self, session_id: str) -> SessionRecord:
        with self._lock:
            rec = self._sessions.get(session_id)
            if rec is None:
                raise NotFoundError(f"unknown session {session_id}")
            return copy.deepcopy(rec)

    def cas_update(self, session_id: str, expected_version: int, state: dict[str, Any]) -> SessionRecord:
        with self._lock:
            rec = self._sessions.get(session_id)
            if rec is None:
                raise NotFoundError(f"unknown session {session_id}")
            if rec.version != expected_version:
                raise ConflictError(
                    f"session {session_id} version {rec.version} != {expected_version}"
                )
            rec.state = copy.deepcopy(state)
            rec.version += 1
            return copy.deepcopy(rec)

    def delete(self, session_id: str) -> None:
        with self._lock:
            self._sessions.pop(session_id, None)

    def purge_expired(self) -> int:
        now = self._clock()
        with self._lock:
            stale = [sid for sid, rec in self._sessions.items() if rec.expires_at < now]
            for sid in stale:
                del self._sessions[sid]
        return len(stale)

    # Snapshot/restore exist for the replay-regression harness only.

    def snapshot(self, session_id: str) -> SessionRecord:
        return self.get(session_id)

    def restore(self, snapshot: SessionRecord) -> None:
        with self._lock:
            self._sessions[snapshot.session_id] = copy.deepcopy(snapshot)

    def ids(self) -> Iterable[str]:
        with self._lock:
            return list(self._sessions)
