"""attacklab command line: tolerance study and guessing attacks.

    attacklab study --sigma 1.0 --trials 1000 --tolerances 1,2,3,4,5 --out table.csv
    attacklab guess --mode with-database --dict full --width 6 --height 4 --t 2 --c 3
"""

from __future__ import annotations

import argparse
import csv
import json
import random
import sys

from ..credential import FAST_KDF, ImageMeta, password_space
from ..flows import SessionEngine, Viewport
from ..grid import canonical_click
from ..store import AccountStore
from .dictionaries import full_dictionary, hotspot_dictionary, pattern_dictionary
from .guessing import guessing_attack
from .models import Hotspot, UserModel
from .simulate import calibrate_sigma, enroll_corpus, tolerance_study


def _study(args: argparse.Namespace) -> int:
    sigma = args.sigma if args.sigma is not None else calibrate_sigma()
    t_values = [int(v) for v in args.tolerances.split(",")]
    rows = tolerance_study(
        sigma, args.trials, t_values, c=args.clicks, seed=args.seed
    )
    writer = csv.writer(open(args.out, "w", newline="") if args.out else sys.stdout)
    writer.writerow(["t", "successes", "trials", "success_pct", "security_pct"])
    for row in rows:
        writer.writerow(
            [row.t, row.successes, row.trials, row.success_pct, row.security_pct]
        )
    if args.out:
        print(f"sigma={sigma:.4f} trials={args.trials} -> {args.out}")
    return 0


def _build_scenario(args: argparse.Namespace):
    """A self-contained account on a small grid, plus the stores an online
    attack needs. The credential is a hotspot-model enrollment."""
    rng = random.Random(args.seed)
    w, h, t, c = args.width, args.height, args.t, args.c
    portfolio = [ImageMeta(image_id=f"demo_{i}", width=w, height=h) for i in range(4)]
    store = AccountStore()
    for meta in portfolio:
        store.put_image_meta(meta)

    model = UserModel(
        kind="hotspot-biased",
        hotspots=(Hotspot(center=(w * 0.3, h * 0.4), spread=max(1.0, t), weight=1.0),),
        rng_seed=args.seed,
    )
    corpus = enroll_corpus(model, 200, c, t, portfolio, master_seed=args.seed)
    cells = corpus[0]
    clicks = [canonical_click(cx, cy, t) for cx, cy in cells]

    engine = SessionEngine(
        store, rng=rng, kdf=FAST_KDF, default_t=t, default_c=c
    )
    started = engine.start_enroll("victim", t, c, "q", "a")
    # drive enrollment clicks through the engine so online mode is attackable
    nonce, sid = started.nonce, started.session_id
    viewport = started.viewport
    position = 0
    while position < c:
        target = clicks[position]
        if viewport.contains(target):
            resp = engine.click(sid, target.x, target.y, nonce)
            if resp.kind == "enrolled":
                break
            nonce = resp.nonce
            position = resp.position
            viewport_d = resp.payload.get("viewport")
            if viewport_d:
                viewport = Viewport(**viewport_d)
        else:
            viewport, _ = engine.shuffle(sid)
    account = store.fetch_account("victim")
    return account, corpus, engine, store


def _guess(args: argparse.Namespace) -> int:
    account, corpus, engine, _ = _build_scenario(args)
    t, c = args.t, args.c
    cells_x, cells_y = args.width // t, args.height // t
    if args.dict == "full":
        candidates = full_dictionary(cells_x, cells_y, c)
    elif args.dict == "pattern":
        candidates = pattern_dictionary(min(cells_x, cells_y), c)
    else:
        candidates = hotspot_dictionary(
            corpus, args.top_fraction, c=c, grid=(cells_x, cells_y), limit=args.limit
        )
    space = password_space(args.width, args.height, t, c)
    report = guessing_attack(
        candidates,
        account,
        args.mode,
        engine=engine if args.mode == "online" else None,
        space_total=space.total,
    )
    out = report.to_dict()
    out["password_space_total"] = space.total
    out["password_space_bits"] = space.bits
    text = json.dumps(out, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    print(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="attacklab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    study = sub.add_parser("study", help="simulated observer study across tolerances")
    study.add_argument("--sigma", type=float, default=None,
                       help="observer noise in px (default: calibrated)")
    study.add_argument("--trials", type=int, default=1000)
    study.add_argument("--tolerances", type=str, default="1,2,3,4,5")
    study.add_argument("--clicks", type=int, default=5)
    study.add_argument("--seed", type=int, default=0)
    study.add_argument("--out", type=str, default=None, help="CSV path (default: stdout)")
    study.set_defaults(func=_study)

    guess = sub.add_parser("guess", help="dictionary attack on a demo account")
    guess.add_argument("--mode", choices=("with-database", "online"),
                       default="with-database")
    guess.add_argument("--dict", choices=("pattern", "hotspot", "full"),
                       default="full")
    guess.add_argument("--width", type=int, default=6)
    guess.add_argument("--height", type=int, default=4)
    guess.add_argument("--t", type=int, default=2)
    guess.add_argument("--c", type=int, default=3)
    guess.add_argument("--top-fraction", type=float, default=0.3)
    guess.add_argument("--limit", type=int, default=100_000)
    guess.add_argument("--seed", type=int, default=0)
    guess.add_argument("--out", type=str, default=None)
    guess.set_defaults(func=_guess)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
