"""Guessing attacks against one account or a corpus of accounts.

with-database mode assumes the server-side record leaked: salt, offsets,
digest and portfolio seed are all available, so candidates are verified
offline at the cost of one key-derivation each. online mode only sees the
login endpoint: every candidate costs a full c-click session and the only
signal is the end-of-sequence verdict.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from ..credential import hash_credential, next_image
from ..errors import ConfigError
from ..flows import SessionEngine, VERDICT_SUCCESS
from ..grid import canonical_click
from ..store import UserAccount
from .dictionaries import CellSeq
from .models import AttackReport

MODES = ("with-database", "online")


def _candidate_digest_matches(account: UserAccount, candidate: CellSeq) -> bool:
    record = account.record
    portfolio = list(account.portfolio)
    current = record.start_image
    seq = []
    for position, cell in enumerate(candidate):
        seq.append((current, cell[0], cell[1]))
        if position + 1 < len(candidate):
            current = next_image(
                record.portfolio_seed, position, current, cell, portfolio
            )
    return hash_credential(record.salt, seq, record.kdf) == record.digest


def _online_attempt(
    engine: SessionEngine, account: UserAccount, candidate: CellSeq
) -> bool:
    t = account.t
    started = engine.start_login(account.user_id)
    nonce = started.nonce
    resp = None
    for cell in candidate:
        probe = canonical_click(cell[0], cell[1], t)
        resp = engine.click(started.session_id, probe.x, probe.y, nonce)
        nonce = resp.nonce
    assert resp is not None and resp.kind == "verdict"
    return resp.payload["verdict"] == VERDICT_SUCCESS


def guessing_attack(
    candidates: Iterable[CellSeq],
    account: UserAccount,
    mode: str = "with-database",
    *,
    engine: SessionEngine | None = None,
    space_total: int | None = None,
) -> AttackReport:
    """Try candidates in order until the account's credential is hit."""
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {mode!r}")
    if mode == "online" and engine is None:
        raise ConfigError("online mode requires a SessionEngine")
    size = len(candidates) if isinstance(candidates, Sequence) else None
    attempts = 0
    hit = False
    for candidate in candidates:
        attempts += 1
        if mode == "with-database":
            hit = _candidate_digest_matches(account, candidate)
        else:
            hit = _online_attempt(engine, account, candidate)
        if hit:
            break
    if size is None:
        size = attempts  # unsized iterable: consumed count is all we know
    coverage = None if space_total is None else min(1.0, size / space_total)
    return AttackReport(
        dictionary_size=size,
        attempts=attempts,
        hit=hit,
        exhausted=not hit,
        hit_rate=1.0 if hit else 0.0,
        coverage_fraction=coverage,
        mode=mode,
    )


def attack_corpus(
    candidates: Sequence[CellSeq],
    accounts: Sequence[UserAccount],
    mode: str = "with-database",
    *,
    engine: SessionEngine | None = None,
    space_total: int | None = None,
) -> AttackReport:
    """Run the dictionary against every account; hit_rate aggregates."""
    hits = 0
    attempts = 0
    for account in accounts:
        report = guessing_attack(
            candidates, account, mode, engine=engine, space_total=space_total
        )
        attempts += report.attempts
        hits += int(report.hit)
    coverage = (
        None if space_total is None else min(1.0, len(candidates) / space_total)
    )
    return AttackReport(
        dictionary_size=len(candidates),
        attempts=attempts,
        hit=hits > 0,
        exhausted=hits < len(accounts),
        hit_rate=hits / len(accounts) if accounts else 0.0,
        coverage_fraction=coverage,
        mode=mode,
    )


def sequence_hit_rate(
    corpus: Sequence[CellSeq], top_cells: Sequence[tuple[int, int]]
) -> float:
    """Fraction of enrollments entirely covered by a top-cell dictionary:
    a product dictionary over `top_cells` contains a sequence iff every
    one of its cells is in the set."""
    cells = set(top_cells)
    covered = sum(1 for seq in corpus if all(cell in cells for cell in seq))
    return covered / len(corpus) if corpus else 0.0
