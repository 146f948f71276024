"""Credentials: salted cell digests, cued image paths, password space.

The stored record keeps offsets in the clear (grid phase only) and
commits to the ordered (image, cell) sequence with salted scrypt. Each
click also determines the next image shown, so replaying the right
clicks replays the right image path.
"""

import secrets

from clickpass import ClickPoint, ImageMeta, build_record, next_image, password_space, verify_sequence
from clickpass.credential import KdfParams

images = [ImageMeta(image_id=f"img_{i}", width=400, height=400) for i in range(5)]
clicks = [ClickPoint(60 + 70 * i, 330 - 60 * i) for i in range(5)]
salt = secrets.token_bytes(16)
seed = secrets.token_bytes(16)

record = build_record(salt, clicks, images, t=5, portfolio_seed=seed, kdf=KdfParams(log2_n=12))
print("record:")
print(f"  digest   {record.digest.hex()[:32]}…")
print(f"  offsets  {list(record.offsets)}")
print(f"  t={record.t} c={record.c} start={record.start_image}")

ids = [m.image_id for m in images]
print("\nverification:")
print("  exact re-entry        ->", verify_sequence(record, clicks, ids))
near = [ClickPoint(p.x + 2, p.y - 2) for p in clicks]
print("  within tolerance (+2) ->", verify_sequence(record, near, ids))
off = [ClickPoint(p.x + 5, p.y) for p in clicks]
print("  displaced by t        ->", verify_sequence(record, off, ids))

print("\ncued navigation (same cell, same next image):")
for cell in [(3, 3), (3, 4), (10, 10)]:
    nxt = next_image(seed, 0, "img_0", cell, ids)
    print(f"  click in cell {cell} on img_0 -> {nxt}")

print("\npassword space:")
for w, h, t, c in [(400, 400, 20, 5), (400, 400, 5, 5), (6, 4, 2, 2)]:
    r = password_space(w, h, t, c)
    print(
        f"  {w}x{h} t={t} c={c}: {r.per_image_cells} cells/image, "
        f"total {r.total:,} ({r.bits:.1f} bits)"
    )
