import pytest

from clickpass.errors import DomainError, NotFoundError, PolicyError
from clickpass.ingest import ImageRepository, synthesize_image
from clickpass.store import AccountStore


@pytest.fixture
def repo(tmp_path):
    return ImageRepository(AccountStore(), tmp_path / "images", max_tolerance=50)


def test_ingest_valid_png(repo):
    meta = repo.ingest_image(synthesize_image(0), "png")
    assert (meta.width, meta.height) == (400, 400)
    assert meta.source == "uploaded"
    assert meta.image_id.startswith("img_")


def test_too_small_for_tolerance_policy(tmp_path):
    repo = ImageRepository(AccountStore(), tmp_path, max_tolerance=19)
    small = synthesize_image(1, 10, 10)
    with pytest.raises(PolicyError):
        repo.ingest_image(small, "png")


def test_content_addressing_idempotent(repo):
    data = synthesize_image(2)
    a = repo.ingest_image(data, "png")
    b = repo.ingest_image(data, "png")
    assert a.image_id == b.image_id
    assert len(repo.store.image_manifest()) == 1


def test_distinct_bytes_distinct_ids(repo):
    a = repo.ingest_image(synthesize_image(3), "png")
    b = repo.ingest_image(synthesize_image(4), "png")
    assert a.image_id != b.image_id


def test_undecodable_rejected(repo):
    with pytest.raises(DomainError):
        repo.ingest_image(b"not an image at all", "png")


def test_format_mismatch_rejected(repo):
    with pytest.raises(DomainError):
        repo.ingest_image(synthesize_image(5), "jpeg")


def test_unsupported_format_rejected(repo):
    with pytest.raises(DomainError):
        repo.ingest_image(synthesize_image(5), "tiff")


def test_image_bytes_round_trip(repo):
    data = synthesize_image(6)
    meta = repo.ingest_image(data, "png")
    stored, meta2 = repo.image_bytes(meta.image_id)
    assert stored == data
    assert meta2 == meta
    with pytest.raises(NotFoundError):
        repo.image_bytes("img_missing")


class TestFrames:
    @pytest.fixture
    def frames_dir(self, tmp_path):
        d = tmp_path / "frames"
        d.mkdir()
        for i in range(10):
            (d / f"frame_{i:06d}.png").write_bytes(synthesize_image(100 + i))
        return d

    def test_select_indexed_frame(self, repo, frames_dir):
        meta = repo.select_frame(frames_dir, 3, object_name="doorway")
        assert meta.source == "video-frame"
        assert meta.label == "doorway"
        data = (frames_dir / "frame_000003.png").read_bytes()
        assert repo.image_bytes(meta.image_id)[0] == data

    def test_missing_index_not_found(self, repo, frames_dir):
        with pytest.raises(NotFoundError):
            repo.select_frame(frames_dir, 10)

    def test_reselect_same_frame_same_id(self, repo, frames_dir):
        a = repo.select_frame(frames_dir, 7)
        b = repo.select_frame(frames_dir, 7)
        assert a.image_id == b.image_id

    def test_manifest_written(self, repo, frames_dir, tmp_path):
        repo.select_frame(frames_dir, 0)
        manifest = repo.root / "manifest.json"
        assert manifest.exists()
        assert "video-frame" in manifest.read_text()
