"""Data shapes shared by the attack-lab simulations and reports."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ConfigError


@dataclass(frozen=True)
class Hotspot:
    """One attractor in a click-choice model: Gaussian blob on an image."""

    center: tuple[float, float]
    spread: float
    weight: float


@dataclass(frozen=True)
class UserModel:
    """How a simulated user chooses enrollment clicks.

    kind:
      uniform              - anywhere on the image
      hotspot-biased       - mixture of Gaussian hotspots (plain creation)
      viewport-constrained - same desires, but filtered through the
                             persuasive viewport with bounded shuffles
    """

    kind: str
    hotspots: tuple[Hotspot, ...] = ()
    per_image: dict[str, tuple[Hotspot, ...]] | None = None
    rng_seed: int = 0
    max_shuffles: int = 10
    viewport_side: int = 75

    def __post_init__(self) -> None:
        if self.kind not in ("uniform", "hotspot-biased", "viewport-constrained"):
            raise ConfigError(f"unknown user model kind {self.kind!r}")
        if self.kind != "uniform":
            layouts = (
                list(self.per_image.values()) if self.per_image else [self.hotspots]
            )
            for spots in layouts:
                if not spots:
                    raise ConfigError(f"{self.kind} model requires hotspots")
                total = sum(h.weight for h in spots)
                if abs(total - 1.0) > 1e-9:
                    raise ConfigError(f"hotspot weights sum to {total}, expected 1")
                if any(h.spread <= 0 for h in spots):
                    raise ConfigError("hotspot spreads must be > 0")

    def hotspots_for(self, image_id: str) -> tuple[Hotspot, ...]:
        if self.per_image is not None and image_id in self.per_image:
            return self.per_image[image_id]
        return self.hotspots


@dataclass(frozen=True)
class StudyRow:
    """One tolerance value's outcome in the simulated observer study."""

    t: int
    successes: int
    trials: int
    success_pct: float
    security_pct: float

    @staticmethod
    def from_counts(t: int, successes: int, trials: int) -> "StudyRow":
        pct = 100.0 * successes / trials
        return StudyRow(t, successes, trials, pct, 100.0 - pct)


@dataclass(frozen=True)
class AttackReport:
    """Outcome of one guessing run against an account or corpus."""

    dictionary_size: int
    attempts: int
    hit: bool
    exhausted: bool
    hit_rate: float
    coverage_fraction: float | None = None
    mode: str = "with-database"

    def to_dict(self) -> dict:
        return {
            "dictionary_size": self.dictionary_size,
            "attempts": self.attempts,
            "hit": self.hit,
            "exhausted": self.exhausted,
            "hit_rate": self.hit_rate,
            "coverage_fraction": self.coverage_fraction,
            "mode": self.mode,
        }
