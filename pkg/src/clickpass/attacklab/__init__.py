"""Attack laboratory: quantifies the click-credential scheme.

Covers the password-space arithmetic, dictionary and guessing attacks
(with and without a leaked database), geometric pattern dictionaries,
replay resistance of the session protocol, and a calibrated simulation
of a shoulder-surfing observer across tolerance values.
"""

from .models import AttackReport, Hotspot, StudyRow, UserModel
from .simulate import (
    REFERENCE_SUCCESS_FRACTIONS,
    calibrate_sigma,
    enroll_corpus,
    simulate_user,
    tolerance_study,
)
from .dictionaries import (
    full_dictionary,
    hotspot_dictionary,
    hotspot_top_cells,
    pattern_dictionary,
    pattern_sequences,
)
from .guessing import attack_corpus, guessing_attack, sequence_hit_rate
from .replay import LoginTranscript, ReplayResult, capture_login, replay_check

__all__ = [
    "AttackReport",
    "Hotspot",
    "LoginTranscript",
    "REFERENCE_SUCCESS_FRACTIONS",
    "ReplayResult",
    "StudyRow",
    "UserModel",
    "attack_corpus",
    "calibrate_sigma",
    "capture_login",
    "enroll_corpus",
    "full_dictionary",
    "guessing_attack",
    "hotspot_dictionary",
    "hotspot_top_cells",
    "pattern_dictionary",
    "pattern_sequences",
    "replay_check",
    "sequence_hit_rate",
    "simulate_user",
    "tolerance_study",
]
