"""Bring rasters into the portfolio: uploaded images and video frames.

Video decoding is out of scope; frames arrive pre-decoded in a directory
as frame_NNNNNN.<ext> and are ingested like any other image, tagged with
their source and an optional object label.
"""

from __future__ import annotations

import hashlib
import io
import threading
from pathlib import Path

from PIL import Image, UnidentifiedImageError

from .credential import ImageMeta
from .errors import DomainError, NotFoundError, PolicyError
from .store import AccountStore

SUPPORTED_FORMATS = {"png", "jpeg", "bmp"}
FRAME_PREFIX = "frame_"
FRAME_DIGITS = 6


class ImageRepository:
    """Content-addressed image bytes plus the manifest in the store."""

    def __init__(self, store: AccountStore, root: str | Path, *, max_tolerance: int = 50):
        self.store = store
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.max_tolerance = max_tolerance
        self._lock = threading.Lock()

    def _decode(self, data: bytes, declared_format: str) -> tuple[int, int, str]:
        fmt = declared_format.lower().lstrip(".")
        if fmt == "jpg":
            fmt = "jpeg"
        if fmt not in SUPPORTED_FORMATS:
            raise DomainError(f"unsupported image format {declared_format!r}")
        try:
            with Image.open(io.BytesIO(data)) as img:
                img.load()
                actual = (img.format or "").lower()
                width, height = img.size
        except (UnidentifiedImageError, OSError) as exc:
            raise DomainError(f"undecodable {fmt} data") from exc
        if actual != fmt:
            raise DomainError(f"declared {fmt} but decoded {actual or 'unknown'}")
        return width, height, fmt

    def ingest_image(
        self,
        data: bytes,
        declared_format: str,
        *,
        source: str = "uploaded",
        label: str | None = None,
    ) -> ImageMeta:
        """Store decodable raster bytes content-addressed; idempotent.

        Images smaller than 2t x 2t for the largest configured tolerance
        are rejected: they could not host even two distinct cells per axis.
        """
        width, height, fmt = self._decode(data, declared_format)
        min_side = 2 * self.max_tolerance
        if width < min_side or height < min_side:
            raise PolicyError(
                f"image {width}x{height} below minimum {min_side}x{min_side} "
                f"for tolerance up to {self.max_tolerance}"
            )
        content_hash = hashlib.sha256(data).hexdigest()
        image_id = f"img_{content_hash[:16]}"
        meta = ImageMeta(
            image_id=image_id,
            width=width,
            height=height,
            source=source,
            content_hash=content_hash,
            label=label,
        )
        with self._lock:
            path = self.root / f"{content_hash}.{fmt}"
            if not path.exists():
                path.write_bytes(data)
            self.store.put_image_meta(meta)
            self.store.write_manifest_json(self.root / "manifest.json")
        return meta

    def select_frame(
        self, frames_dir: str | Path, index: int, *, object_name: str | None = None
    ) -> ImageMeta:
        """Ingest the index-th pre-decoded frame from a frame directory."""
        frames_dir = Path(frames_dir)
        if index < 0:
            raise DomainError(f"frame index must be >= 0, got {index}")
        stem = f"{FRAME_PREFIX}{index:0{FRAME_DIGITS}d}"
        matches = sorted(
            p for p in frames_dir.glob(f"{stem}.*")
            if p.suffix.lstrip(".").lower().replace("jpg", "jpeg") in SUPPORTED_FORMATS
        )
        if not matches:
            raise NotFoundError(f"no frame {stem}.* in {frames_dir}")
        path = matches[0]
        return self.ingest_image(
            path.read_bytes(),
            path.suffix.lstrip("."),
            source="video-frame",
            label=object_name,
        )

    def image_bytes(self, image_id: str) -> tuple[bytes, ImageMeta]:
        meta = self.store.fetch_image_meta(image_id)
        if meta is None:
            raise NotFoundError(f"unknown image {image_id}")
        ext = None
        for fmt in SUPPORTED_FORMATS:
            candidate = self.root / f"{meta.content_hash}.{fmt}"
            if candidate.exists():
                ext = candidate
                break
        if ext is None:
            raise NotFoundError(f"image bytes for {image_id} missing on disk")
        return ext.read_bytes(), meta


def synthesize_image(seed: int, width: int = 400, height: int = 400) -> bytes:
    """Deterministic procedural PNG used by demos and tests.

    A seeded scatter of rectangles, ellipses and lines over a gradient;
    enough visual structure to click on, no external assets required.
    """
    import random

    from PIL import ImageDraw

    rng = random.Random(seed)
    img = Image.new("RGB", (width, height))
    top = tuple(rng.randrange(30, 120) for _ in range(3))
    bottom = tuple(rng.randrange(120, 230) for _ in range(3))
    px = img.load()
    for y in range(height):
        f = y / max(1, height - 1)
        row = tuple(int(top[i] + f * (bottom[i] - top[i])) for i in range(3))
        for x in range(width):
            px[x, y] = row
    draw = ImageDraw.Draw(img)
    for _ in range(14):
        x0, y0 = rng.randrange(max(1, width - 40)), rng.randrange(max(1, height - 40))
        x1, y1 = x0 + rng.randrange(20, 120), y0 + rng.randrange(20, 120)
        color = tuple(rng.randrange(256) for _ in range(3))
        shape = rng.choice(("rect", "ellipse", "line"))
        if shape == "rect":
            draw.rectangle([x0, y0, min(x1, width - 1), min(y1, height - 1)], outline=color, width=3)
        elif shape == "ellipse":
            draw.ellipse([x0, y0, min(x1, width - 1), min(y1, height - 1)], outline=color, width=3)
        else:
            draw.line([x0, y0, min(x1, width - 1), min(y1, height - 1)], fill=color, width=3)
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


def seed_demo_portfolio(
    repo: ImageRepository, count: int = 8, *, width: int = 400, height: int = 400
) -> list[ImageMeta]:
    """Populate the repository with procedural images; idempotent."""
    return [
        repo.ingest_image(synthesize_image(seed, width, height), "png")
        for seed in range(count)
    ]
