"""Click-sequence credentials: hashing, cued image navigation, password space.

A credential commits to the ordered (image_id, cell_x, cell_y) sequence via
a salted memory-hard digest (scrypt). Grid offsets are kept in the clear so
a login click can be re-discretized; the cells themselves appear only inside
the digest. Each click also drives the deterministic choice of the next
image, which is what makes the image sequence a silent correctness cue.
"""

from __future__ import annotations

import hashlib
import hmac
import math
import struct
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ConfigError, DomainError, PolicyError
from .grid import ClickPoint, DiscretizedPoint, cell_count, discretize, formula_cell_count, probe_cell

MIN_CLICKS = 3
DEFAULT_CLICKS = 5

SERIALIZATION_VERSION = 1


@dataclass(frozen=True)
class KdfParams:
    """scrypt parameters; log2_n is the configurable work factor."""

    log2_n: int = 14
    r: int = 8
    p: int = 1

    def validate(self) -> None:
        if not (1 <= self.log2_n <= 22):
            raise ConfigError(f"log2_n out of range: {self.log2_n}")


# Low-cost parameters for simulations and tests; never a production default.
FAST_KDF = KdfParams(log2_n=4)


@dataclass(frozen=True)
class ImageMeta:
    image_id: str
    width: int
    height: int
    source: str = "uploaded"  # or "video-frame"
    content_hash: str = ""
    label: str | None = None


@dataclass(frozen=True)
class PasswordRecord:
    """Stored credential: salted cell digest plus clear grid offsets."""

    digest: bytes
    salt: bytes
    offsets: tuple[tuple[int, int], ...]
    t: int
    c: int
    portfolio_seed: bytes
    start_image: str
    kdf: KdfParams = field(default_factory=KdfParams)

    def __post_init__(self) -> None:
        if self.c < MIN_CLICKS:
            raise PolicyError(f"click count {self.c} below minimum {MIN_CLICKS}")
        if len(self.offsets) != self.c:
            raise DomainError("offset list length must equal click count")
        if self.t < 1:
            raise ConfigError("tolerance must be >= 1")


@dataclass(frozen=True)
class PasswordSpaceReport:
    per_image_cells: int
    click_count: int
    total: int
    bits: float
    formula_cells: float  # unfloored (w*h)/t^2, for parity reporting
    formula_total: float


def serialize_sequence(seq: list[tuple[str, int, int]]) -> bytes:
    """Canonical wire form of an (image_id, cell_x, cell_y) sequence.

    Layout (all integers big-endian u32): version, count, then per entry
    len(image_id utf-8), image_id bytes, cell_x, cell_y. Pinned by golden
    tests; changing it invalidates every stored digest.
    """
    if not seq:
        raise DomainError("cannot serialize an empty sequence")
    out = [struct.pack(">II", SERIALIZATION_VERSION, len(seq))]
    for image_id, cell_x, cell_y in seq:
        if cell_x < 0 or cell_y < 0:
            raise DomainError(f"negative cell index ({cell_x}, {cell_y})")
        raw = image_id.encode("utf-8")
        out.append(struct.pack(">I", len(raw)))
        out.append(raw)
        out.append(struct.pack(">II", cell_x, cell_y))
    return b"".join(out)


def hash_credential(
    salt: bytes, seq: list[tuple[str, int, int]], kdf: KdfParams = KdfParams()
) -> bytes:
    """Salted memory-hard digest of the canonical sequence serialization."""
    if not salt:
        raise DomainError("salt must be non-empty")
    kdf.validate()
    n = 1 << kdf.log2_n
    return hashlib.scrypt(
        serialize_sequence(seq),
        salt=salt,
        n=n,
        r=kdf.r,
        p=kdf.p,
        maxmem=256 * kdf.r * n + (1 << 20),
        dklen=32,
    )


def next_image(
    portfolio_seed: bytes,
    position: int,
    current_image: str,
    cell: tuple[int, int],
    portfolio: list[str],
) -> str:
    """Deterministic cued choice of the image shown after a click.

    Keyed by the per-account portfolio seed so two accounts with identical
    clicks walk different image paths. A wrong cell routes to an (almost
    always) different image: the only failure feedback the user gets.
    """
    if not portfolio:
        raise ConfigError("portfolio must not be empty")
    img = current_image.encode("utf-8")
    msg = struct.pack(">I", position) + struct.pack(">I", len(img)) + img
    msg += struct.pack(">ii", cell[0], cell[1])
    digest = hmac.new(portfolio_seed, msg, hashlib.sha256).digest()
    return portfolio[int.from_bytes(digest[:8], "big") % len(portfolio)]


def password_space(width: int, height: int, t: int, c: int) -> PasswordSpaceReport:
    """Count distinct cell-sequence credentials: (cells per image) ** c.

    Uses arbitrary-precision integers; also reports the unfloored
    (w*h/t^2)**c value for comparison with the flat formula.
    """
    if c < 1:
        raise ConfigError(f"click count must be >= 1, got {c}")
    cells = cell_count(width, height, t)
    total = cells**c
    formula_cells = formula_cell_count(width, height, t)
    formula_total = float(Fraction(width * height, t * t) ** c)
    return PasswordSpaceReport(
        per_image_cells=cells,
        click_count=c,
        total=total,
        bits=math.log2(total) if total > 0 else 0.0,
        formula_cells=formula_cells,
        formula_total=formula_total,
    )


def _image_dims(images: list[ImageMeta]) -> dict[str, tuple[int, int]]:
    return {m.image_id: (m.width, m.height) for m in images}


def record_from_discretized(
    salt: bytes,
    points: list[DiscretizedPoint],
    image_ids: list[str],
    t: int,
    portfolio_seed: bytes,
    kdf: KdfParams = KdfParams(),
) -> PasswordRecord:
    """Assemble a record from already-discretized clicks (enrollment flow)."""
    if len(points) != len(image_ids):
        raise DomainError("one image id required per click")
    if len(points) < MIN_CLICKS:
        raise PolicyError(f"at least {MIN_CLICKS} clicks required")
    seq = [(img, d.cell_x, d.cell_y) for img, d in zip(image_ids, points)]
    return PasswordRecord(
        digest=hash_credential(salt, seq, kdf),
        salt=salt,
        offsets=tuple((d.offset_x, d.offset_y) for d in points),
        t=t,
        c=len(points),
        portfolio_seed=portfolio_seed,
        start_image=image_ids[0],
        kdf=kdf,
    )


def build_record(
    salt: bytes,
    clicks: list[ClickPoint],
    images: list[ImageMeta],
    t: int,
    portfolio_seed: bytes = b"\x00" * 16,
    kdf: KdfParams = KdfParams(),
) -> PasswordRecord:
    """Discretize a full click sequence and commit to it."""
    if len(clicks) != len(images):
        raise DomainError("one image required per click")
    if len(clicks) < MIN_CLICKS:
        raise PolicyError(f"at least {MIN_CLICKS} clicks required")
    points = [
        discretize(click, t, meta.width, meta.height)
        for click, meta in zip(clicks, images)
    ]
    return record_from_discretized(
        salt, points, [m.image_id for m in images], t, portfolio_seed, kdf
    )


def verify_sequence(
    record: PasswordRecord,
    probes: list[ClickPoint],
    image_ids: list[str],
) -> bool:
    """Re-discretize probes under the stored offsets and compare digests.

    Consumes the entire sequence before producing a single verdict; there
    is deliberately no per-position result.
    """
    if len(probes) != record.c or len(image_ids) != record.c:
        raise DomainError(
            f"expected {record.c} probes and image ids, "
            f"got {len(probes)}/{len(image_ids)}"
        )
    seq = []
    valid = True
    for probe, (ox, oy), image_id in zip(probes, record.offsets, image_ids):
        d = DiscretizedPoint(0, 0, ox, oy)
        cx, cy = probe_cell(probe, d, record.t)
        if cx < 0 or cy < 0:
            # Probe fell off the enrolled grid; keep consuming the sequence
            # so the work done is independent of the failing position.
            valid = False
            cx, cy = 0, 0
        seq.append((image_id, cx, cy))
    candidate = hash_credential(record.salt, seq, record.kdf)
    return valid and hmac.compare_digest(candidate, record.digest)


def probe_cells(
    record: PasswordRecord, position: int, probe: ClickPoint
) -> tuple[int, int]:
    """Cell a login probe resolves to at a given position (for navigation)."""
    ox, oy = record.offsets[position]
    return probe_cell(probe, DiscretizedPoint(0, 0, ox, oy), record.t)
