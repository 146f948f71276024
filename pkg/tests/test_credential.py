import itertools
import math
import struct

import pytest
from scipy.stats import chisquare

from clickpass.credential import (
    FAST_KDF,
    ImageMeta,
    build_record,
    hash_credential,
    next_image,
    password_space,
    serialize_sequence,
    verify_sequence,
)
from clickpass.errors import ConfigError, DomainError, PolicyError
from clickpass.grid import ClickPoint, discretize

SALT = b"fixed-salt-16byte"
SEED = b"portfolio-seed##"


def _meta(image_id="img_a", w=400, h=400):
    return ImageMeta(image_id=image_id, width=w, height=h)


def enumerate_credentials(w, h, t, c):
    """Independent oracle: brute-force every pixel sequence and count the
    distinct cell sequences it discretizes to."""
    pixels = [(x, y) for x in range(w) for y in range(h)]
    seen = set()
    for combo in itertools.product(pixels, repeat=c):
        cells = tuple(
            (d.cell_x, d.cell_y)
            for d in (discretize(ClickPoint(x, y), t, w, h) for x, y in combo)
        )
        seen.add(cells)
    return len(seen)


class TestSerializationGolden:
    def test_pinned_wire_bytes(self):
        raw = serialize_sequence([("imgA", 3, 4)])
        assert raw.hex() == (
            "00000001"  # version
            "00000001"  # count
            "00000004" + "696d6741"  # len + "imgA"
            "00000003" + "00000004"  # cells
        )

    def test_matches_struct_construction(self):
        seq = [("first", 1, 2), ("second", 30, 40)]
        expected = struct.pack(">II", 1, 2)
        for img, cx, cy in seq:
            b = img.encode()
            expected += struct.pack(">I", len(b)) + b + struct.pack(">II", cx, cy)
        assert serialize_sequence(seq) == expected

    def test_empty_sequence_rejected(self):
        with pytest.raises(DomainError):
            serialize_sequence([])


class TestHashCredential:
    def test_deterministic(self):
        seq = [("a", 1, 2), ("b", 3, 4), ("c", 5, 6)]
        assert hash_credential(SALT, seq, FAST_KDF) == hash_credential(SALT, seq, FAST_KDF)

    def test_single_cell_change_changes_digest(self):
        seq = [("a", 1, 2), ("b", 3, 4), ("c", 5, 6)]
        base = hash_credential(SALT, seq, FAST_KDF)
        bumped = [("a", 2, 2), ("b", 3, 4), ("c", 5, 6)]
        assert hash_credential(SALT, bumped, FAST_KDF) != base

    def test_distinct_salts_distinct_digests(self):
        seq = [("a", 1, 2), ("b", 3, 4), ("c", 5, 6)]
        d1 = hash_credential(b"salt-one........", seq, FAST_KDF)
        d2 = hash_credential(b"salt-two........", seq, FAST_KDF)
        assert d1 != d2

    def test_avalanche_over_random_perturbations(self):
        import random

        rng = random.Random(7)
        seq = [("img%d" % i, rng.randrange(20), rng.randrange(20)) for i in range(5)]
        base = hash_credential(SALT, seq, FAST_KDF)
        changed = 0
        for _ in range(1000):
            i = rng.randrange(5)
            axis = rng.randrange(2)
            mutated = [list(e) for e in seq]
            mutated[i][1 + axis] = (mutated[i][1 + axis] + rng.randrange(1, 20)) % 21
            mseq = [tuple(e) for e in mutated]
            if mseq == seq:
                continue
            if hash_credential(SALT, mseq, FAST_KDF) != base:
                changed += 1
            else:
                changed -= 10**6
        assert changed > 0  # 100% of actual perturbations differ

    def test_empty_salt_rejected(self):
        with pytest.raises(DomainError):
            hash_credential(b"", [("a", 1, 2)], FAST_KDF)


class TestNextImage:
    PORTFOLIO = [f"img_{i}" for i in range(10)]

    def test_single_image_portfolio(self):
        assert next_image(SEED, 0, "img_0", (3, 3), ["only"]) == "only"

    def test_deterministic(self):
        a = next_image(SEED, 2, "img_4", (7, 9), self.PORTFOLIO)
        b = next_image(SEED, 2, "img_4", (7, 9), self.PORTFOLIO)
        assert a == b

    def test_empty_portfolio_rejected(self):
        with pytest.raises(ConfigError):
            next_image(SEED, 0, "img_0", (0, 0), [])

    def test_near_uniform_over_cells(self):
        counts = {img: 0 for img in self.PORTFOLIO}
        for cx in range(20):
            for cy in range(20):
                counts[next_image(SEED, 1, "img_3", (cx, cy), self.PORTFOLIO)] += 1
        stat = chisquare(list(counts.values()))
        assert stat.pvalue > 0.01

    def test_wrong_cell_usually_changes_image(self):
        right = next_image(SEED, 0, "img_0", (5, 5), self.PORTFOLIO)
        differing = sum(
            1
            for cx in range(20)
            for cy in range(20)
            if (cx, cy) != (5, 5)
            and next_image(SEED, 0, "img_0", (cx, cy), self.PORTFOLIO) != right
        )
        # expect ~ (1 - 1/10) of 399 wrong cells to differ
        assert differing >= 399 * 0.8


class TestPasswordSpace:
    def test_realistic_image_scale_value(self):
        report = password_space(400, 400, 20, 5)
        assert report.per_image_cells == 400
        assert report.total == 10_240_000_000_000
        assert math.isclose(report.bits, math.log2(10_240_000_000_000), abs_tol=1e-9)
        assert report.formula_total == pytest.approx(400.0**5)

    def test_degenerate_single_cell(self):
        report = password_space(7, 7, 7, 1)
        assert report.total == 1
        assert report.bits == 0.0

    def test_oracle_6x4(self):
        report = password_space(6, 4, 2, 2)
        assert report.total == 36
        assert enumerate_credentials(6, 4, 2, 2) == 36

    @pytest.mark.parametrize(
        "w,h,t,c",
        [(4, 4, 1, 1), (4, 4, 1, 2), (6, 4, 2, 1), (6, 4, 2, 2), (8, 8, 2, 2), (5, 7, 2, 2)],
    )
    def test_enumeration_equivalence(self, w, h, t, c):
        assert password_space(w, h, t, c).total == enumerate_credentials(w, h, t, c)

    def test_arbitrary_precision(self):
        report = password_space(4000, 4000, 1, 10)
        assert report.total == (4000 * 4000) ** 10  # far beyond 64-bit


class TestRecordLifecycle:
    def _images(self, n):
        return [_meta(f"img_{i}") for i in range(n)]

    def _clicks(self, n):
        return [ClickPoint(40 + 11 * i, 60 + 7 * i) for i in range(n)]

    def test_happy_path_shape(self):
        rec = build_record(SALT, self._clicks(3), self._images(3), 5, SEED, FAST_KDF)
        assert rec.c == 3
        assert len(rec.offsets) == 3
        assert len(rec.digest) == 32
        assert rec.start_image == "img_0"

    def test_two_clicks_policy_error(self):
        with pytest.raises(PolicyError):
            build_record(SALT, self._clicks(2), self._images(2), 5, SEED, FAST_KDF)

    def test_rebuild_identical(self):
        a = build_record(SALT, self._clicks(4), self._images(4), 5, SEED, FAST_KDF)
        b = build_record(SALT, self._clicks(4), self._images(4), 5, SEED, FAST_KDF)
        assert a == b

    def test_verify_identity(self):
        clicks = self._clicks(3)
        images = self._images(3)
        rec = build_record(SALT, clicks, images, 5, SEED, FAST_KDF)
        assert verify_sequence(rec, clicks, [m.image_id for m in images])

    def test_verify_within_tolerance(self):
        clicks = self._clicks(3)
        images = self._images(3)
        rec = build_record(SALT, clicks, images, 5, SEED, FAST_KDF)
        shifted = [ClickPoint(p.x + 2, p.y - 2) for p in clicks]
        assert verify_sequence(rec, shifted, [m.image_id for m in images])

    def test_verify_rejects_displacement_by_t(self):
        clicks = self._clicks(3)
        images = self._images(3)
        rec = build_record(SALT, clicks, images, 5, SEED, FAST_KDF)
        bad = [clicks[0], ClickPoint(clicks[1].x + 5, clicks[1].y), clicks[2]]
        assert not verify_sequence(rec, bad, [m.image_id for m in images])

    def test_verify_length_mismatch(self):
        clicks = self._clicks(3)
        images = self._images(3)
        rec = build_record(SALT, clicks, images, 5, SEED, FAST_KDF)
        with pytest.raises(DomainError):
            verify_sequence(rec, clicks[:2], [m.image_id for m in images][:2])

    def test_no_partial_credit_signal(self):
        clicks = self._clicks(5)
        images = self._images(5)
        rec = build_record(SALT, clicks, images, 5, SEED, FAST_KDF)
        ids = [m.image_id for m in images]
        wrong_first = [ClickPoint(300, 300)] + clicks[1:]
        wrong_last = clicks[:-1] + [ClickPoint(300, 300)]
        assert verify_sequence(rec, wrong_first, ids) is False
        assert verify_sequence(rec, wrong_last, ids) is False

    def test_path_stability(self):
        # replaying the same clicks yields the same image path
        portfolio = [f"img_{i}" for i in range(6)]
        cells = [(3, 4), (1, 1), (7, 2)]
        path_a, path_b = [], []
        for path in (path_a, path_b):
            current = "img_0"
            for i, cell in enumerate(cells):
                current = next_image(SEED, i, current, cell, portfolio)
                path.append(current)
        assert path_a == path_b
