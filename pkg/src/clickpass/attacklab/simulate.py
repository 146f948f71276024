"""Simulated users and the tolerance/shoulder-surfing study.

The observer model is a per-axis rounded Gaussian around each enrolled
click: the single spread parameter is fit so a tolerance-5 credential is
reproduced about 87.5% of the time, the upper operating point of the
reference 8-participant observation study. The remaining rows then fall
out of the geometry instead of being dialed in.
"""

from __future__ import annotations

import random

from scipy.special import erfinv

from ..credential import FAST_KDF, ImageMeta, KdfParams, build_record, next_image, verify_sequence
from ..errors import ConfigError, DomainError
from ..flows import generate_viewport
from ..grid import ClickPoint, discretize
from .models import StudyRow, UserModel

# Reference success fractions by tolerance for the observer simulation
# (exact eighths; the percentage renderings elsewhere contain typos).
REFERENCE_SUCCESS_FRACTIONS = {1: 0 / 8, 2: 2 / 8, 3: 3 / 8, 4: 6 / 8, 5: 7 / 8}

DEFAULT_CALIBRATION_T = 5
DEFAULT_CALIBRATION_TARGET = REFERENCE_SUCCESS_FRACTIONS[5]


def calibrate_sigma(
    target: float = DEFAULT_CALIBRATION_TARGET,
    t: int = DEFAULT_CALIBRATION_T,
    c: int = 5,
) -> float:
    """Observer noise sigma such that a c-click credential at odd tolerance
    t verifies with the target probability.

    Per axis, a rounded Gaussian lands within the centered window iff the
    raw draw falls in (-t/2, t/2), so the per-axis success is
    erf(t / (2*sigma*sqrt(2))) and the credential succeeds on all 2c axes.
    """
    if not (0.0 < target < 1.0):
        raise ConfigError(f"target must be in (0, 1), got {target}")
    if t % 2 != 1:
        raise ConfigError("calibration assumes an odd (centered) tolerance")
    per_axis = target ** (1.0 / (2 * c))
    return (t / 2.0) / (2.0**0.5 * float(erfinv(per_axis)))


def _sample_hotspot_click(
    model: UserModel, rng: random.Random, image_id: str, width: int, height: int
) -> ClickPoint:
    spots = model.hotspots_for(image_id)
    r = rng.random()
    acc = 0.0
    spot = spots[-1]
    for h in spots:
        acc += h.weight
        if r <= acc:
            spot = h
            break
    x = round(rng.gauss(spot.center[0], spot.spread))
    y = round(rng.gauss(spot.center[1], spot.spread))
    return ClickPoint(min(max(x, 0), width - 1), min(max(y, 0), height - 1))


def _one_click(
    model: UserModel, rng: random.Random, image_id: str, width: int, height: int
) -> ClickPoint:
    if model.kind == "uniform":
        return ClickPoint(rng.randrange(width), rng.randrange(height))
    if model.kind == "hotspot-biased":
        return _sample_hotspot_click(model, rng, image_id, width, height)
    # viewport-constrained: want the hotspot click, but only a viewport
    # that happens to cover it is usable; give up after bounded shuffles
    # and click uniformly inside whatever viewport is on screen.
    desired = _sample_hotspot_click(model, rng, image_id, width, height)
    side = min(model.viewport_side, width, height)
    viewport = generate_viewport(rng, width, height, side)
    for _ in range(model.max_shuffles):
        if viewport.contains(desired):
            return desired
        viewport = generate_viewport(rng, width, height, side)
    if viewport.contains(desired):
        return desired
    return ClickPoint(
        viewport.x0 + rng.randrange(viewport.side),
        viewport.y0 + rng.randrange(viewport.side),
    )


def simulate_user(
    model: UserModel,
    c: int,
    portfolio: list[ImageMeta],
    rng: random.Random | None = None,
) -> list[tuple[str, ClickPoint]]:
    """Produce one enrollment: c (image_id, click) pairs along a cued path."""
    if rng is None:
        rng = random.Random(model.rng_seed)
    if not portfolio:
        raise ConfigError("portfolio must not be empty")
    dims = {m.image_id: (m.width, m.height) for m in portfolio}
    ids = [m.image_id for m in portfolio]
    seed = rng.randbytes(16)
    current = ids[rng.randrange(len(ids))]
    out: list[tuple[str, ClickPoint]] = []
    for position in range(c):
        w, h = dims[current]
        click = _one_click(model, rng, current, w, h)
        out.append((current, click))
        if position + 1 < c:
            d = discretize(click, 1, w, h)  # cueing cares only about position
            current = next_image(seed, position, current, (d.cell_x, d.cell_y), ids)
    return out


def enroll_corpus(
    model: UserModel,
    users: int,
    c: int,
    t: int,
    portfolio: list[ImageMeta],
    master_seed: int = 0,
) -> list[tuple[tuple[int, int], ...]]:
    """Cell sequences of `users` independent simulated enrollments."""
    dims = {m.image_id: (m.width, m.height) for m in portfolio}
    corpus = []
    for u in range(users):
        rng = random.Random(master_seed * 1_000_003 + model.rng_seed * 7919 + u)
        enrollment = simulate_user(model, c, portfolio, rng)
        cells = tuple(
            (d.cell_x, d.cell_y)
            for d in (
                discretize(click, t, *dims[image_id]) for image_id, click in enrollment
            )
        )
        corpus.append(cells)
    return corpus


def _noisy_probe(
    p: ClickPoint, sigma: float, width: int, height: int, rng: random.Random
) -> ClickPoint:
    if sigma == 0:
        return p
    x = round(p.x + rng.gauss(0.0, sigma))
    y = round(p.y + rng.gauss(0.0, sigma))
    return ClickPoint(min(max(x, 0), width - 1), min(max(y, 0), height - 1))


def tolerance_study(
    sigma_obs: float,
    trials: int,
    t_values: list[int],
    *,
    c: int = 5,
    image_size: tuple[int, int] = (400, 400),
    portfolio_size: int = 5,
    seed: int = 0,
    kdf: KdfParams = FAST_KDF,
) -> list[StudyRow]:
    """Simulate an observer re-entering freshly enrolled credentials.

    Per trial: enroll c uniform clicks across a cued image path, then
    probe every click with rounded Gaussian noise; the trial succeeds iff
    the full sequence verifies. One row per tolerance value.
    """
    if trials < 8:
        raise DomainError(f"at least 8 trials required, got {trials}")
    if sigma_obs < 0:
        raise DomainError("sigma_obs must be >= 0")
    w, h = image_size
    portfolio = [
        ImageMeta(image_id=f"study_{i}", width=w, height=h)
        for i in range(portfolio_size)
    ]
    ids = [m.image_id for m in portfolio]
    model = UserModel(kind="uniform")
    rows = []
    for t in t_values:
        rng = random.Random(seed * 1_000_003 + t)
        successes = 0
        for _ in range(trials):
            enrollment = simulate_user(model, c, portfolio, rng)
            clicks = [click for _, click in enrollment]
            metas = [portfolio[ids.index(image_id)] for image_id, _ in enrollment]
            record = build_record(
                rng.randbytes(16), clicks, metas, t, rng.randbytes(16), kdf
            )
            probes = [_noisy_probe(p, sigma_obs, w, h, rng) for p in clicks]
            if verify_sequence(record, probes, [m.image_id for m in metas]):
                successes += 1
        rows.append(StudyRow.from_counts(t, successes, trials))
    return rows
