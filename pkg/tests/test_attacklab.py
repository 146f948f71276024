import math
import random

import pytest
from scipy.stats import chisquare

from clickpass.attacklab import (
    Hotspot,
    UserModel,
    attack_corpus,
    calibrate_sigma,
    capture_login,
    enroll_corpus,
    full_dictionary,
    guessing_attack,
    hotspot_dictionary,
    hotspot_top_cells,
    pattern_dictionary,
    pattern_sequences,
    replay_check,
    sequence_hit_rate,
    simulate_user,
    tolerance_study,
)
from clickpass.credential import FAST_KDF, ImageMeta, password_space
from clickpass.errors import ConfigError, DomainError
from clickpass.flows import SessionEngine
from clickpass.grid import canonical_click, discretize
from clickpass.ingest import ImageRepository, seed_demo_portfolio
from clickpass.store import AccountStore


def small_portfolio(n=5, w=400, h=400):
    return [ImageMeta(image_id=f"img_{i}", width=w, height=h) for i in range(n)]


class TestSimulateUser:
    def test_uniform_cells_chi_square(self):
        """Uniform clicks induce the pixel-mass cell distribution (interior
        cells uniform; border cells carry the merged margins)."""
        portfolio = small_portfolio(1)
        model = UserModel(kind="uniform")
        rng = random.Random(3)
        n = 10_000
        counts = [[0] * 20 for _ in range(20)]
        for _ in range(n):
            ((image_id, click),) = simulate_user(model, 1, portfolio, rng)
            d = discretize(click, 20, 400, 400)
            counts[d.cell_y][d.cell_x] += 1
        # independent oracle for the expected mass: count preimage pixels
        axis_mass = [0] * 20
        for p in range(400):
            axis_mass[discretize(type(click)(p, 0), 20, 400, 400).cell_x] += 1
        expected = [
            n * (axis_mass[cx] / 400) * (axis_mass[cy] / 400)
            for cy in range(20)
            for cx in range(20)
        ]
        flat = [counts[cy][cx] for cy in range(20) for cx in range(20)]
        assert chisquare(flat, f_exp=expected).pvalue > 0.01
        # interior cells (no merged margin) are mutually uniform
        interior = [counts[cy][cx] for cy in range(1, 19) for cx in range(1, 19)]
        assert chisquare(interior).pvalue > 0.01

    def test_tight_hotspot_concentration(self):
        portfolio = small_portfolio(3)
        model = UserModel(
            kind="hotspot-biased",
            hotspots=(Hotspot(center=(200.0, 150.0), spread=10.0, weight=1.0),),
        )
        rng = random.Random(4)
        within = 0
        total = 0
        for _ in range(500):
            for _, click in simulate_user(model, 3, portfolio, rng):
                total += 1
                if math.hypot(click.x - 200, click.y - 150) <= 2 * 10 * math.sqrt(2):
                    within += 1
        assert within / total >= 0.90

    def test_viewport_constrained_reproducible(self):
        portfolio = small_portfolio(4)
        model = UserModel(
            kind="viewport-constrained",
            hotspots=(Hotspot(center=(100.0, 100.0), spread=15.0, weight=1.0),),
            rng_seed=77,
        )
        a = simulate_user(model, 5, portfolio)
        b = simulate_user(model, 5, portfolio)
        assert a == b

    def test_per_image_hotspots(self):
        portfolio = small_portfolio(2)
        model = UserModel(
            kind="hotspot-biased",
            per_image={
                "img_0": (Hotspot(center=(50.0, 50.0), spread=5.0, weight=1.0),),
                "img_1": (Hotspot(center=(350.0, 350.0), spread=5.0, weight=1.0),),
            },
        )
        rng = random.Random(5)
        for image_id, click in simulate_user(model, 4, portfolio, rng):
            cx, cy = (50, 50) if image_id == "img_0" else (350, 350)
            assert math.hypot(click.x - cx, click.y - cy) < 50

    def test_weight_validation(self):
        with pytest.raises(ConfigError):
            UserModel(
                kind="hotspot-biased",
                hotspots=(Hotspot(center=(0, 0), spread=1.0, weight=0.5),),
            )


class TestToleranceStudy:
    def test_perfect_observer_always_succeeds(self):
        rows = tolerance_study(0.0, 50, [1, 3, 5], seed=1)
        assert all(r.success_pct == 100.0 for r in rows)

    def test_exact_pixel_tolerance_defeats_observer(self):
        rows = tolerance_study(1.0, 1000, [1], seed=2)
        assert rows[0].success_pct < 5.0

    def test_monotone_in_tolerance(self):
        rows = tolerance_study(1.0, 1000, [1, 2, 3, 4, 5], seed=3)
        pcts = [r.success_pct for r in rows]
        assert all(a < b for a, b in zip(pcts, pcts[1:]))

    def test_row_arithmetic(self):
        rows = tolerance_study(0.8, 100, [2, 4], seed=4)
        for r in rows:
            assert r.success_pct == 100.0 * r.successes / r.trials
            assert r.security_pct == 100.0 - r.success_pct

    def test_too_few_trials_rejected(self):
        with pytest.raises(DomainError):
            tolerance_study(1.0, 7, [1])

    def test_calibrated_sigma_reproduces_t5_operating_point(self):
        sigma = calibrate_sigma()
        assert 0.5 < sigma < 2.0
        rows = tolerance_study(sigma, 1000, [5], seed=5)
        assert abs(rows[0].success_pct - 87.5) <= 15.0


class TestPatternDictionaries:
    def test_horizontal_l2r_4x4_c3(self):
        seqs = pattern_sequences(4, 3, "horizontal", "l2r")
        assert len(seqs) == 8  # 4 rows x 2 starting columns
        assert all(
            all(b[0] - a[0] == 1 and a[1] == b[1] for a, b in zip(s, s[1:]))
            for s in seqs
        )

    def test_step_right_down_3x3_c3(self):
        seqs = pattern_sequences(3, 3, "step", "right-down")
        expected = {
            ((0, 0), (1, 0), (1, 1)),
            ((0, 1), (1, 1), (1, 2)),
            ((1, 0), (2, 0), (2, 1)),
            ((1, 1), (2, 1), (2, 2)),
        }
        assert set(seqs) == expected

    def test_c1_all_families_coincide(self):
        cells = {(x, y) for x in range(4) for y in range(4)}
        for family in ("horizontal", "vertical", "diagonal", "arc", "step"):
            seqs = pattern_sequences(4, 1, family)
            assert {s[0] for s in seqs} == cells
            assert len(seqs) == 16

    def test_vertical_matches_brute_force(self):
        got = set(pattern_sequences(5, 3, "vertical"))
        brute = set()
        for x in range(5):
            for y in range(5):
                for dy in (1, -1):
                    seq = tuple((x, y + k * dy) for k in range(3))
                    if all(0 <= cy < 5 for _, cy in seq):
                        brute.add(seq)
        assert got == brute

    def test_diagonal_counts(self):
        # 4x4, c=3: each diagonal direction has 2x2 valid starts
        seqs = pattern_sequences(4, 3, "diagonal")
        assert len(seqs) == 4 * 4

    def test_arc_sequences_stay_near_circles(self):
        seqs = pattern_sequences(5, 4, "arc")
        assert seqs  # arcs exist on a 5x5 grid
        for seq in seqs[:50]:
            assert len(set(seq)) == len(seq)
            assert all(0 <= x < 5 and 0 <= y < 5 for x, y in seq)

    def test_dictionary_dedups_across_families(self):
        d = pattern_dictionary(4, 3, ("horizontal", "vertical", "diagonal", "step"))
        assert len(d) == len(set(d))

    def test_dictionary_deterministic(self):
        a = pattern_dictionary(4, 3)
        b = pattern_dictionary(4, 3)
        assert a == b


class TestHotspotDictionary:
    def test_degenerate_corpus_first_candidate(self):
        corpus = [((3, 3), (3, 3), (3, 3))] * 5
        d = hotspot_dictionary(corpus, 0.5, grid=(6, 6))
        assert d[0] == ((3, 3), (3, 3), (3, 3))

    def test_top_fraction_one_covers_password_space(self):
        corpus = [((0, 0), (1, 1))] * 3
        d = hotspot_dictionary(corpus, 1.0, grid=(3, 2))
        space = password_space(6, 4, 2, 2)
        assert len(d) == space.total == 36
        assert len(set(d)) == 36

    def test_two_hotspot_corpus_prefix(self):
        a, b = (1, 1), (2, 2)
        corpus = [(a, a), (b, b), (a, b), (b, a)] * 10
        d = hotspot_dictionary(corpus, 1.0, grid=(4, 4))
        prefix = set(d[: 2**2])
        assert prefix == {(a, a), (a, b), (b, a), (b, b)}

    def test_most_probable_first_ordering(self):
        corpus = [((0, 0),) * 2] * 8 + [((1, 0),) * 2] * 4 + [((2, 0),) * 2] * 2
        d = hotspot_dictionary(corpus, 1.0, grid=(3, 1))
        # joint probability of d[i] must be non-increasing
        from collections import Counter

        counts = Counter()
        for seq in corpus:
            counts.update(seq)
        probs = [
            math.prod(counts[cell] + 0.5 for cell in seq) for seq in d
        ]
        assert all(x >= y - 1e-12 for x, y in zip(probs, probs[1:]))

    def test_empty_corpus_rejected(self):
        with pytest.raises(DomainError):
            hotspot_dictionary([], 0.5)

    def test_top_cells_ranked_by_frequency(self):
        corpus = [((5, 5), (1, 1)), ((5, 5), (2, 2))]
        top = hotspot_top_cells(corpus, 0.1, grid=(10, 10))
        assert top[0] == (5, 5)


def make_tiny_account(cells, w, h, t, store=None, seed=0):
    """Enroll an account whose credential is exactly `cells`."""
    from clickpass.credential import build_record
    from clickpass.store import SecurityQuestion, UserAccount

    rng = random.Random(seed)
    portfolio = [ImageMeta(image_id=f"tiny_{i}", width=w, height=h) for i in range(3)]
    if store is not None:
        for m in portfolio:
            store.put_image_meta(m)
    clicks = [canonical_click(cx, cy, t) for cx, cy in cells]
    seed_bytes = rng.randbytes(16)
    start = portfolio[0]
    # walk the cued path to know which image hosts each click
    from clickpass.credential import next_image

    ids = [m.image_id for m in portfolio]
    path = [start.image_id]
    for i, cell in enumerate(cells[:-1]):
        path.append(next_image(seed_bytes, i, path[-1], cell, ids))
    metas = [portfolio[ids.index(p)] for p in path]
    record = build_record(rng.randbytes(16), clicks, metas, t, seed_bytes, FAST_KDF)
    question = SecurityQuestion(b"q".decode(), rng.randbytes(8), rng.randbytes(8))
    return UserAccount(
        user_id=f"tiny{seed}",
        t=t,
        c=len(cells),
        security_question=question,
        record=record,
        portfolio=tuple(ids),
        created_at=0.0,
    )


class TestGuessingAttack:
    W, H, T = 6, 4, 2

    def grid_cells(self):
        return self.W // self.T, self.H // self.T

    def test_planted_at_k(self):
        cells_x, cells_y = self.grid_cells()
        dictionary = full_dictionary(cells_x, cells_y, 3)
        rng = random.Random(11)
        for _ in range(10):
            k = rng.randrange(1, len(dictionary) + 1)
            target = dictionary[k - 1]
            account = make_tiny_account(target, self.W, self.H, self.T, seed=k)
            report = guessing_attack(dictionary, account)
            assert report.hit and report.attempts == k

    def test_exhausted_dictionary(self):
        cells_x, cells_y = self.grid_cells()
        dictionary = full_dictionary(cells_x, cells_y, 3)
        account = make_tiny_account(((0, 0), (1, 1), (2, 1)), self.W, self.H, self.T)
        missing = [seq for seq in dictionary if seq != ((0, 0), (1, 1), (2, 1))]
        report = guessing_attack(missing, account)
        assert not report.hit
        assert report.exhausted
        assert report.attempts == len(missing)

    def test_full_enumeration_hits_within_space(self):
        space = password_space(self.W, self.H, self.T, 2)
        assert space.total == 36
        cells_x, cells_y = self.grid_cells()
        dictionary = full_dictionary(cells_x, cells_y, 2)

        # a 2-click record is below the policy floor, so use c=3 and the
        # 36-candidate bound on the first two positions scaled up
        dictionary3 = full_dictionary(cells_x, cells_y, 3)
        space3 = password_space(self.W, self.H, self.T, 3)
        assert len(dictionary3) == space3.total == 216
        account = make_tiny_account(((2, 1), (0, 0), (1, 1)), self.W, self.H, self.T)
        report = guessing_attack(dictionary3, account, space_total=space3.total)
        assert report.hit
        assert report.attempts <= space3.total
        assert report.coverage_fraction == 1.0

    def test_online_mode_matches_with_database(self, tmp_path):
        store = AccountStore()
        account = make_tiny_account(
            ((1, 1), (2, 0), (0, 1)), self.W, self.H, self.T, store=store, seed=3
        )
        store.upsert_account(account)
        engine = SessionEngine(store, rng=random.Random(5), kdf=FAST_KDF)
        cells_x, cells_y = self.grid_cells()
        dictionary = full_dictionary(cells_x, cells_y, 3)
        offline = guessing_attack(dictionary, account, "with-database")
        online = guessing_attack(dictionary, account, "online", engine=engine)
        assert offline.hit and online.hit
        assert offline.attempts == online.attempts

    def test_attack_corpus_hit_rate(self):
        cells_x, cells_y = self.grid_cells()
        dictionary = full_dictionary(cells_x, cells_y, 3)[:100]
        accounts = [
            make_tiny_account(dictionary[i * 7], self.W, self.H, self.T, seed=i)
            for i in range(5)
        ]
        outside = make_tiny_account(((2, 1), (2, 1), (2, 1)), self.W, self.H, self.T, seed=99)
        report = attack_corpus(dictionary[:50], accounts + [outside], space_total=216)
        assert 0.0 < report.hit_rate < 1.0


class TestReplay:
    @pytest.fixture
    def engine(self, tmp_path):
        store = AccountStore()
        repo = ImageRepository(store, tmp_path / "img")
        seed_demo_portfolio(repo, 4)
        return SessionEngine(store, rng=random.Random(21), kdf=FAST_KDF)

    def _enroll(self, engine, user_id="victim"):
        from clickpass.flows import Viewport

        started = engine.start_enroll(user_id, 5, 3, "q", "a")
        nonce, viewport = started.nonce, started.viewport
        clicks = []
        for _ in range(3):
            x, y = viewport.x0 + viewport.side // 2, viewport.y0 + viewport.side // 2
            clicks.append((x, y))
            resp = engine.click(started.session_id, x, y, nonce)
            if resp.kind == "enrolled":
                break
            nonce = resp.nonce
            viewport = Viewport(**resp.payload["viewport"])
        return clicks

    def test_verbatim_replay_rejected(self, engine):
        clicks = self._enroll(engine)
        transcript = capture_login(engine, "victim", clicks)
        assert transcript.verdict == "SUCCESS"
        result = replay_check(engine, transcript)
        assert result.resisted
        assert result.accepted_requests == 0
        assert result.rejected_requests == len(clicks)

    def test_fresh_session_same_clicks_accepted(self, engine):
        clicks = self._enroll(engine)
        capture_login(engine, "victim", clicks)
        again = capture_login(engine, "victim", clicks)
        assert again.verdict == "SUCCESS"

    def test_nonce_wipe_fault_is_flagged(self, engine):
        clicks = self._enroll(engine)
        transcript = capture_login(engine, "victim", clicks)
        fault = lambda: engine.sessions.restore(transcript.snapshot)
        result = replay_check(engine, transcript, fault=fault)
        assert not result.resisted
        assert result.replay_verdict == "SUCCESS"
