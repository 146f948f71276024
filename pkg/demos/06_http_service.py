"""Drive the HTTP service end to end with stdlib clients only.

Boots uvicorn on a loopback port with a seeded demo portfolio, then walks
signup -> enrollment clicks -> login through the JSON API, including a
replayed-nonce rejection. This is the same surface the browser UI uses.
"""

import json
import tempfile
import threading
import time
import urllib.request

import uvicorn

from clickpass.config import ServiceConfig
from clickpass.service import create_app

PORT = 8471
BASE = f"http://127.0.0.1:{PORT}"

config = ServiceConfig(
    port=PORT,
    data_dir=tempfile.mkdtemp(prefix="clickpass_http_"),
    seed_demo_images=5,
    scrypt_log2_n=12,
)
server = uvicorn.Server(uvicorn.Config(create_app(config), host="127.0.0.1", port=PORT, log_level="error"))
thread = threading.Thread(target=server.run, daemon=True)
thread.start()
while not server.started:
    time.sleep(0.05)


def post(path, body):
    req = urllib.request.Request(
        BASE + path,
        data=json.dumps(body).encode(),
        headers={"Content-Type": "application/json"},
        method="POST",
    )
    try:
        with urllib.request.urlopen(req) as resp:
            return resp.status, json.loads(resp.read())
    except urllib.error.HTTPError as err:
        return err.code, json.loads(err.read())


print("== signup ==")
status, body = post(
    "/api/signup",
    {"user_id": "demo", "t": 5, "c": 3, "security_question": "pet?", "answer": "ox"},
)
print(f"POST /api/signup -> {status}, first image {body['first_image_ref']}")

clicks = []
while True:
    v = body["viewport"]
    x, y = v["x0"] + v["side"] // 2, v["y0"] + v["side"] // 2
    clicks.append((x, y))
    status, nxt = post(
        "/api/click",
        {"session_id": body["session_id"], "x": x, "y": y, "nonce": body["nonce"]},
    )
    print(f"POST /api/click ({x},{y}) -> {status}, {nxt.get('status')}")
    if nxt.get("status") == "enrolled":
        break
    body = {**body, **nxt}

print("\n== login with a nonce replay attempt ==")
status, body = post("/api/session/login", {"user_id": "demo"})
print(f"POST /api/session/login -> {status}")
first = {
    "session_id": body["session_id"],
    "x": clicks[0][0],
    "y": clicks[0][1],
    "nonce": body["nonce"],
}
status, nxt = post("/api/click", first)
print(f"first click -> {status}")
status, err = post("/api/click", first)
print(f"verbatim resubmission -> {status} ({err.get('error')})")

body = {**body, **nxt}
for x, y in clicks[1:]:
    status, nxt = post(
        "/api/click",
        {"session_id": body["session_id"], "x": x, "y": y, "nonce": body["nonce"]},
    )
    body = {**body, **nxt}
print(f"final verdict: {body['verdict']}")

print("\n== image bytes carry their dimensions ==")
status, start = post("/api/session/login", {"user_id": "demo"})
with urllib.request.urlopen(BASE + start["first_image_ref"]) as resp:
    print(
        f"GET {start['first_image_ref']} -> {resp.status}, "
        f"{len(resp.read())} bytes, "
        f"{resp.headers['X-Image-Width']}x{resp.headers['X-Image-Height']} px"
    )

server.should_exit = True
thread.join(timeout=5)
print("done")
