"""Candidate dictionaries: geometric patterns, hotspot products, full space.

Pattern families enumerate click sequences that march across the cell grid
in a consistent direction: straight lines along an axis or diagonal,
staircase steps, and circular arcs (cells within half a cell of the arc
through a start/mid/end triple). The hotspot dictionary ranks cells by
observed frequency and emits Cartesian-product candidates most-probable
first.
"""

from __future__ import annotations

import heapq
import itertools
import math
from collections import Counter
from typing import Iterable, Sequence

from ..errors import ConfigError, DomainError

Cell = tuple[int, int]
CellSeq = tuple[Cell, ...]

LINE_DIRECTIONS = {
    "horizontal": {"l2r": (1, 0), "r2l": (-1, 0)},
    "vertical": {"t2b": (0, 1), "b2t": (0, -1)},
    "diagonal": {
        "down-right": (1, 1),
        "down-left": (-1, 1),
        "up-right": (1, -1),
        "up-left": (-1, -1),
    },
}

# Staircases alternate one-cell moves on the two axes; the name gives the
# first move and the signs of both.
STEP_DIRECTIONS = {
    "right-down": ("h", 1, 1),
    "right-up": ("h", 1, -1),
    "left-down": ("h", -1, 1),
    "left-up": ("h", -1, -1),
    "down-right": ("v", 1, 1),
    "down-left": ("v", -1, 1),
    "up-right": ("v", 1, -1),
    "up-left": ("v", -1, -1),
}

PATTERN_FAMILIES = ("horizontal", "vertical", "diagonal", "arc", "step")


def _in_grid(cell: Cell, grid: int) -> bool:
    return 0 <= cell[0] < grid and 0 <= cell[1] < grid


def _all_cells(grid: int) -> list[Cell]:
    return [(x, y) for y in range(grid) for x in range(grid)]


def _line_sequences(grid: int, c: int, step: tuple[int, int]) -> list[CellSeq]:
    out = []
    for start in _all_cells(grid):
        seq = tuple(
            (start[0] + k * step[0], start[1] + k * step[1]) for k in range(c)
        )
        if all(_in_grid(cell, grid) for cell in seq):
            out.append(seq)
    return out


def _step_sequences(grid: int, c: int, shape: tuple[str, int, int]) -> list[CellSeq]:
    first, sx, sy = shape
    out = []
    for start in _all_cells(grid):
        x, y = start
        seq = [(x, y)]
        for k in range(c - 1):
            horizontal_move = (k % 2 == 0) == (first == "h")
            if horizontal_move:
                x += sx
            else:
                y += sy
            seq.append((x, y))
        if all(_in_grid(cell, grid) for cell in seq):
            out.append(tuple(seq))
    return out


def _circumcircle(a: Cell, b: Cell, p: Cell):
    d = 2.0 * (a[0] * (b[1] - p[1]) + b[0] * (p[1] - a[1]) + p[0] * (a[1] - b[1]))
    if abs(d) < 1e-9:
        return None  # collinear
    a2, b2, p2 = (a[0] ** 2 + a[1] ** 2), (b[0] ** 2 + b[1] ** 2), (p[0] ** 2 + p[1] ** 2)
    ux = (a2 * (b[1] - p[1]) + b2 * (p[1] - a[1]) + p2 * (a[1] - b[1])) / d
    uy = (a2 * (p[0] - b[0]) + b2 * (a[0] - p[0]) + p2 * (b[0] - a[0])) / d
    r = math.hypot(a[0] - ux, a[1] - uy)
    return ux, uy, r


def _arc_sequences(grid: int, c: int) -> list[CellSeq]:
    """Sequences of c distinct cells hugging the circular arc through an
    ordered (start, mid, end) cell triple, sampled at equal angles and
    snapped to the nearest cell (so every sample is within half a cell)."""
    if c < 3:
        return []
    seen: set[CellSeq] = set()
    cells = _all_cells(grid)
    for s, m, e in itertools.permutations(cells, 3):
        circ = _circumcircle(s, m, e)
        if circ is None:
            continue
        ux, uy, r = circ
        ts = math.atan2(s[1] - uy, s[0] - ux)
        tm = math.atan2(m[1] - uy, m[0] - ux)
        te = math.atan2(e[1] - uy, e[0] - ux)
        sweep_ccw = (te - ts) % (2 * math.pi)
        pos_m = (tm - ts) % (2 * math.pi)
        if pos_m <= sweep_ccw:
            sweep = sweep_ccw
        else:
            sweep = sweep_ccw - 2 * math.pi  # go clockwise instead
        seq = []
        ok = True
        for k in range(c):
            theta = ts + sweep * k / (c - 1)
            cell = (round(ux + r * math.cos(theta)), round(uy + r * math.sin(theta)))
            if not _in_grid(cell, grid) or (seq and cell in seq):
                ok = False
                break
            seq.append(cell)
        if ok:
            seen.add(tuple(seq))
    return sorted(seen)


def pattern_sequences(
    grid: int, c: int, family: str, direction: str = "all"
) -> list[CellSeq]:
    """Enumerate one pattern family, optionally restricted to a direction."""
    if grid < 1 or c < 1:
        raise ConfigError("grid and c must be >= 1")
    if family not in PATTERN_FAMILIES:
        raise ConfigError(f"unknown pattern family {family!r}")
    if c == 1:
        return [(cell,) for cell in _all_cells(grid)]
    if family in LINE_DIRECTIONS:
        table = LINE_DIRECTIONS[family]
        dirs = table.values() if direction == "all" else [table[direction]]
        out: list[CellSeq] = []
        for step in dirs:
            out.extend(_line_sequences(grid, c, step))
        return sorted(set(out))
    if family == "step":
        table = STEP_DIRECTIONS
        shapes = table.values() if direction == "all" else [table[direction]]
        out = []
        for shape in shapes:
            out.extend(_step_sequences(grid, c, shape))
        return sorted(set(out))
    if direction != "all":
        raise ConfigError("arc family has no direction variants")
    return _arc_sequences(grid, c)


def pattern_dictionary(
    grid: int, c: int, families: Iterable[str] = PATTERN_FAMILIES
) -> list[CellSeq]:
    """Union of the requested families, deduplicated, deterministic order."""
    seen: set[CellSeq] = set()
    ordered: list[CellSeq] = []
    for family in families:
        for seq in pattern_sequences(grid, c, family):
            if seq not in seen:
                seen.add(seq)
                ordered.append(seq)
    return ordered


def full_dictionary(cells_x: int, cells_y: int, c: int) -> list[CellSeq]:
    """Every cell sequence of length c; the exhaustive password space."""
    cells = [(x, y) for y in range(cells_y) for x in range(cells_x)]
    return [tuple(combo) for combo in itertools.product(cells, repeat=c)]


def hotspot_top_cells(
    corpus: Sequence[CellSeq],
    top_fraction: float,
    *,
    grid: tuple[int, int] | None = None,
) -> list[Cell]:
    """Cells ranked by observed frequency, truncated to the top fraction of
    the cell universe (the grid when given, else the observed cells)."""
    if not corpus:
        raise DomainError("corpus must not be empty")
    if not (0.0 < top_fraction <= 1.0):
        raise ConfigError(f"top_fraction must be in (0, 1], got {top_fraction}")
    counts: Counter[Cell] = Counter()
    for seq in corpus:
        counts.update(seq)
    if grid is not None:
        universe = [(x, y) for y in range(grid[1]) for x in range(grid[0])]
    else:
        universe = sorted(counts)
    k = max(1, math.ceil(top_fraction * len(universe)))
    ranked = sorted(universe, key=lambda cell: (-counts[cell], cell))
    return ranked[:k]


def hotspot_dictionary(
    corpus: Sequence[CellSeq],
    top_fraction: float,
    *,
    c: int | None = None,
    grid: tuple[int, int] | None = None,
    limit: int | None = None,
    smoothing: float = 0.5,
) -> list[CellSeq]:
    """Cartesian-product candidates over the top-ranked cells, emitted
    most-probable-first under the (smoothed) empirical cell distribution."""
    if c is None:
        lengths = {len(seq) for seq in corpus}
        if len(lengths) != 1:
            raise DomainError("corpus sequences have mixed lengths; pass c")
        c = lengths.pop()
    top = hotspot_top_cells(corpus, top_fraction, grid=grid)
    counts: Counter[Cell] = Counter()
    for seq in corpus:
        counts.update(seq)
    weights = [counts[cell] + smoothing for cell in top]
    # cells already ranked: weights are non-increasing
    logw = [math.log(w) for w in weights]

    size = len(top) ** c
    budget = size if limit is None else min(limit, size)
    out: list[CellSeq] = []
    # best-first walk of the product lattice by total log-weight
    start = (0,) * c
    heap = [(-sum(logw[i] for i in start), start)]
    visited = {start}
    while heap and len(out) < budget:
        neg, idx = heapq.heappop(heap)
        out.append(tuple(top[i] for i in idx))
        for pos in range(c):
            if idx[pos] + 1 < len(top):
                nxt = idx[:pos] + (idx[pos] + 1,) + idx[pos + 1 :]
                if nxt not in visited:
                    visited.add(nxt)
                    heapq.heappush(
                        heap, (neg + logw[idx[pos]] - logw[idx[pos] + 1], nxt)
                    )
    return out
