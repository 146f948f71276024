"""Full enrollment and login through the session engine.

Enrollment shades a randomly placed viewport; clicks outside it are
bounced back, shuffle redraws it, and each accepted click advances the
cued image sequence. Login is free clicking with a single end-of-sequence
verdict. Also shows the forgot-password reset loop.
"""

import random
import tempfile

from clickpass import AccountStore, ImageRepository, SessionEngine, seed_demo_portfolio
from clickpass.credential import KdfParams
from clickpass.flows import Viewport

store = AccountStore()
repo = ImageRepository(store, tempfile.mkdtemp(prefix="clickpass_demo_"))
seed_demo_portfolio(repo, 6)
engine = SessionEngine(store, rng=random.Random(7), kdf=KdfParams(log2_n=12))

print("== enrollment ==")
started = engine.start_enroll("maya", t=5, c=3, question="first pet?", answer="otter")
print(f"session {started.session_id[:8]}… starts on {started.image_id}")
v, nonce = started.viewport, started.nonce
print(f"viewport at ({v.x0},{v.y0}) side {v.side}")

v, _ = engine.shuffle(started.session_id)
print(f"shuffled viewport -> ({v.x0},{v.y0})")

clicks = []
while True:
    x, y = v.x0 + v.side // 2, v.y0 + v.side // 2
    clicks.append((x, y))
    resp = engine.click(started.session_id, x, y, nonce)
    if resp.kind == "enrolled":
        print(f"click {len(clicks)} at ({x},{y}) -> account created")
        break
    print(f"click {len(clicks)} at ({x},{y}) -> next image {resp.payload['next_image_ref']}")
    nonce = resp.nonce
    v = Viewport(**resp.payload["viewport"])

print("\n== login (correct clicks) ==")
login = engine.start_login("maya")
nonce = login.nonce
for i, (x, y) in enumerate(clicks):
    resp = engine.click(login.session_id, x, y, nonce)
    nonce = resp.nonce
    label = resp.payload.get("verdict") or resp.payload.get("next_image_ref")
    print(f"click {i + 1} -> {label}")

print("\n== login (wrong first click: silent detour, verdict at the end) ==")
login = engine.start_login("maya")
nonce = login.nonce
probes = [(399 - clicks[0][0], 399 - clicks[0][1])] + clicks[1:]
for i, (x, y) in enumerate(probes):
    resp = engine.click(login.session_id, x, y, nonce)
    nonce = resp.nonce
    label = resp.payload.get("verdict") or resp.payload.get("next_image_ref")
    print(f"click {i + 1} -> {label}")

print("\n== forgot password ==")
denied = engine.forgot_password("maya", "walrus")
print(f"wrong answer  -> granted={denied.granted}")
granted = engine.forgot_password("maya", "Otter ")
print(f"right answer  -> granted={granted.granted}, single-use reset token issued")
restart = engine.start_enroll("maya", 5, 3, "first pet?", "otter", reset_token=granted.reset_token)
print(f"re-enrollment session {restart.session_id[:8]}… opened with the token")
