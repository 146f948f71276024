"""HTTP/JSON facade over the session engine.

Endpoints (all under /api): signup and session/login create sessions,
click advances them, shuffle redraws the enrollment viewport, forgot
starts the security-question reset, and image/{id} serves the exact
enrolled raster (dimensions in headers so the browser can map display
coordinates back to original pixels). Coordinates in requests are always
in original image pixel space.

Every handler is a thin adapter: it deserializes, calls one engine
method, and serializes the outcome or maps the raised error to a status
code. No decision logic lives here.
"""

from __future__ import annotations

import random
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .config import ServiceConfig, load_config
from .credential import KdfParams
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
from .flows import SessionEngine, Viewport
from .ingest import ImageRepository, seed_demo_portfolio
from .store import AccountStore

STATUS_BY_ERROR = [
    (NonceReplayError, 409),
    (ConflictError, 409),
    (PolicyError, 422),
    (SessionExpiredError, 401),
    (NotFoundError, 404),
    (DomainError, 400),
    (ConfigError, 422),
    (StorageError, 500),
]


class SignupRequest(BaseModel):
    user_id: str
    t: int
    c: int
    security_question: str = ""
    answer: str = ""
    reset_token: str | None = None


class LoginStartRequest(BaseModel):
    user_id: str


class ClickRequest(BaseModel):
    session_id: str
    x: int
    y: int
    nonce: str


class ShuffleRequest(BaseModel):
    session_id: str


class ForgotRequest(BaseModel):
    user_id: str
    answer: str


def _viewport_json(v: Viewport) -> dict:
    return {"x0": v.x0, "y0": v.y0, "side": v.side}


def _status_for(exc: ClickpassError) -> int:
    for cls, code in STATUS_BY_ERROR:
        if isinstance(exc, cls):
            return code
    return 500


def create_app(
    config: ServiceConfig | None = None,
    *,
    engine: SessionEngine | None = None,
    repo: ImageRepository | None = None,
) -> FastAPI:
    """Build the service; pass an engine/repo to share state with tests."""
    config = config or ServiceConfig()
    if repo is None:
        data = Path(config.data_dir)
        data.mkdir(parents=True, exist_ok=True)
        store = AccountStore(data / "clickpass.db")
        repo = ImageRepository(store, data / "images", max_tolerance=config.max_tolerance)
    if engine is None:
        engine = SessionEngine(
            repo.store,
            rng=random.SystemRandom(),
            viewport_side=config.viewport_side,
            session_ttl=config.session_ttl,
            kdf=KdfParams(log2_n=config.scrypt_log2_n),
        )
    if config.seed_demo_images:
        seed_demo_portfolio(repo, config.seed_demo_images)

    app = FastAPI(title="clickpass", docs_url=None, redoc_url=None)
    app.state.engine = engine
    app.state.repo = repo

    @app.exception_handler(ClickpassError)
    async def clickpass_error_handler(request: Request, exc: ClickpassError):
        return JSONResponse(
            status_code=_status_for(exc),
            content={"error": type(exc).__name__, "message": str(exc)},
        )

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "images": len(repo.store.image_manifest())}

    @app.post("/api/signup", status_code=201)
    def signup(req: SignupRequest):
        started = engine.start_enroll(
            req.user_id,
            req.t,
            req.c,
            req.security_question,
            req.answer,
            reset_token=req.reset_token,
        )
        return {
            "session_id": started.session_id,
            "first_image_ref": f"/api/image/{started.image_id}",
            "image_width": started.width,
            "image_height": started.height,
            "viewport": _viewport_json(started.viewport),
            "nonce": started.nonce,
            "position": started.position,
            "clicks_required": started.clicks_required,
        }

    @app.post("/api/session/login")
    def login_start(req: LoginStartRequest):
        started = engine.start_login(req.user_id)
        return {
            "session_id": started.session_id,
            "first_image_ref": f"/api/image/{started.image_id}",
            "image_width": started.width,
            "image_height": started.height,
            "nonce": started.nonce,
            "position": started.position,
            "clicks_required": started.clicks_required,
        }

    @app.post("/api/click")
    def click(req: ClickRequest):
        resp = engine.click(req.session_id, req.x, req.y, req.nonce)
        if resp.kind == "verdict":
            return {"verdict": resp.payload["verdict"]}
        if resp.kind == "enrolled":
            return {"status": "enrolled", "user_id": resp.payload["user_id"]}
        if resp.kind == "enroll_rejected":
            return {
                "status": "rejected_outside_viewport",
                "position": resp.position,
                "viewport": resp.payload["viewport"],
                "nonce": resp.nonce,
            }
        body = {
            "status": "ok",
            "position": resp.position,
            "next_image_ref": resp.payload["next_image_ref"],
            "image_width": resp.payload["image_width"],
            "image_height": resp.payload["image_height"],
            "nonce": resp.nonce,
        }
        if resp.kind == "enroll_progress":
            body["viewport"] = resp.payload["viewport"]
        return body

    @app.post("/api/shuffle")
    def shuffle(req: ShuffleRequest):
        viewport, position = engine.shuffle(req.session_id)
        return {"viewport": _viewport_json(viewport), "position": position}

    @app.post("/api/forgot")
    def forgot(req: ForgotRequest):
        outcome = engine.forgot_password(req.user_id, req.answer)
        if outcome.granted:
            return {"status": "ok", "reset_token": outcome.reset_token}
        return {"status": "denied"}

    @app.get("/api/image/{image_id}")
    def image(image_id: str):
        data, meta = repo.image_bytes(image_id)
        media = {"png": "image/png", "jpeg": "image/jpeg", "bmp": "image/bmp"}
        suffix = "png"
        for fmt in media:
            if (repo.root / f"{meta.content_hash}.{fmt}").exists():
                suffix = fmt
                break
        return Response(
            content=data,
            media_type=media[suffix],
            headers={
                "X-Image-Width": str(meta.width),
                "X-Image-Height": str(meta.height),
            },
        )

    # Optionally host the built browser UI; API routes above take priority.
    if config.frontend_dir and Path(config.frontend_dir).is_dir():
        from starlette.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=config.frontend_dir, html=True))

    return app


def main(argv: list[str] | None = None) -> int:
    import argparse

    import uvicorn

    parser = argparse.ArgumentParser(prog="clickpass.service")
    parser.add_argument("--config", type=str, default=None, help="JSON config file")
    parser.add_argument("--host", type=str, default=None)
    parser.add_argument("--port", type=int, default=None)
    args = parser.parse_args(argv)

    config = load_config(args.config)
    if args.host:
        config.host = args.host
    if args.port:
        config.port = args.port
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
