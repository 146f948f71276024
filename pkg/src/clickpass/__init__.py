"""Cued click-point graphical password authentication.

Clicks on a sequence of images are the credential: each click is snapped
to a tolerance cell whose indices are hashed, each cell cues the next
image, and password creation is nudged by a randomly placed viewport.
An attack laboratory quantifies the scheme's password space, guessing
and pattern attacks, and a simulated tolerance study.
"""

from .credential import (
    ImageMeta,
    KdfParams,
    PasswordRecord,
    PasswordSpaceReport,
    build_record,
    hash_credential,
    next_image,
    password_space,
    verify_sequence,
)
from .errors import (
    ClickpassError,
    ConfigError,
    ConflictError,
    DomainError,
    NonceReplayError,
    NotFoundError,
    PolicyError,
    SessionExpiredError,
    StorageError,
)
from .flows import SessionEngine, Viewport, generate_viewport
from .grid import (
    ClickPoint,
    DiscretizedPoint,
    ToleranceConfig,
    cell_count,
    discretize,
    formula_cell_count,
    same_cell,
)
from .ingest import ImageRepository, seed_demo_portfolio, synthesize_image
from .store import AccountStore, SecurityQuestion, SessionStore, UserAccount

__version__ = "0.1.0"

__all__ = [
    "AccountStore",
    "ClickPoint",
    "ClickpassError",
    "ConfigError",
    "ConflictError",
    "DiscretizedPoint",
    "DomainError",
    "ImageMeta",
    "ImageRepository",
    "KdfParams",
    "NonceReplayError",
    "NotFoundError",
    "PasswordRecord",
    "PasswordSpaceReport",
    "PolicyError",
    "SecurityQuestion",
    "SessionEngine",
    "SessionExpiredError",
    "SessionStore",
    "StorageError",
    "ToleranceConfig",
    "UserAccount",
    "Viewport",
    "build_record",
    "cell_count",
    "discretize",
    "formula_cell_count",
    "generate_viewport",
    "hash_credential",
    "next_image",
    "password_space",
    "same_cell",
    "seed_demo_portfolio",
    "synthesize_image",
    "verify_sequence",
]
