"""Tolerance-grid discretization of pixel clicks.

A click is reduced to a (cell, offset) pair under a tolerance of t pixels
per axis. The grid phase (offset) is chosen per click so that the click
sits at index floor(t/2) of its own t-pixel cell: a later click that
deviates by at most (t-1)/2 per axis (odd t) lands in the same cell and
can be matched against a hash of the cell indices alone.

Cells are anchored per axis at ``a = cell*t + offset`` and clamped into
``[0, floor(dim/t)*t - 1]`` so every cell index lies in
``[0, floor(dim/t))``; clicks in the first floor(t/2) pixels (and, when
``dim mod t > floor(t/2)``, the trailing remainder) are merged into the
adjacent border cell, which widens their acceptance window on one side.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError, DomainError


@dataclass(frozen=True)
class ClickPoint:
    """A raw pixel click; x is the column, y the row."""

    x: int
    y: int


@dataclass(frozen=True)
class DiscretizedPoint:
    """A click reduced to cell indices plus the grid phase that centers it.

    Offsets are stored in the clear alongside hashed cells; they reveal
    only the grid phase, never which cell was clicked.
    """

    cell_x: int
    cell_y: int
    offset_x: int
    offset_y: int


@dataclass(frozen=True)
class ToleranceConfig:
    """Side length of the square acceptance region, in pixels."""

    t: int

    def validate(self, width: int, height: int) -> None:
        check_tolerance(self.t, width, height)


def check_tolerance(t: int, width: int, height: int) -> None:
    if t < 1:
        raise ConfigError(f"tolerance must be >= 1, got {t}")
    if t > min(width, height):
        raise ConfigError(
            f"tolerance {t} exceeds image dimensions {width}x{height}"
        )


def _check_bounds(p: ClickPoint, width: int, height: int) -> None:
    if not (0 <= p.x < width and 0 <= p.y < height):
        raise DomainError(
            f"click ({p.x}, {p.y}) outside image bounds {width}x{height}"
        )


def _axis_discretize(coord: int, t: int, dim: int) -> tuple[int, int]:
    # Anchor the cell so the click sits at index floor(t/2); clamp the
    # anchor so border clicks merge into the first/last full cell.
    anchor = coord - t // 2
    hi = (dim // t) * t - 1
    if anchor < 0:
        anchor = 0
    elif anchor > hi:
        anchor = hi
    return anchor // t, anchor % t


def discretize(p: ClickPoint, t: int, width: int, height: int) -> DiscretizedPoint:
    """Map a click to its centered tolerance cell.

    Raises DomainError for out-of-bounds clicks and ConfigError for an
    invalid tolerance.
    """
    check_tolerance(t, width, height)
    _check_bounds(p, width, height)
    cell_x, offset_x = _axis_discretize(p.x, t, width)
    cell_y, offset_y = _axis_discretize(p.y, t, height)
    return DiscretizedPoint(cell_x, cell_y, offset_x, offset_y)


def probe_cell(p: ClickPoint, d: DiscretizedPoint, t: int) -> tuple[int, int]:
    """Cell a probe click resolves to under the enrolled grid phase."""
    return (p.x - d.offset_x) // t, (p.y - d.offset_y) // t


def same_cell(
    p: ClickPoint, d: DiscretizedPoint, t: int, width: int, height: int
) -> bool:
    """True iff the probe resolves to the enrolled cell on both axes."""
    check_tolerance(t, width, height)
    _check_bounds(p, width, height)
    return probe_cell(p, d, t) == (d.cell_x, d.cell_y)


def cell_count(width: int, height: int, t: int) -> int:
    """Number of tolerance cells per image: floor(w/t) * floor(h/t).

    Border remainders are merged into their neighbors rather than counted
    as partial cells; ``formula_cell_count`` reports the unfloored ratio.
    """
    check_tolerance(t, width, height)
    return (width // t) * (height // t)


def formula_cell_count(width: int, height: int, t: int) -> float:
    """The raw (w*h)/t^2 ratio, reported for parity with cell_count."""
    check_tolerance(t, width, height)
    return (width * height) / (t * t)


def cell_window(cell: int, offset: int, t: int) -> tuple[int, int]:
    """Inclusive pixel span of one axis of a cell: [a, a + t - 1]."""
    a = cell * t + offset
    return a, a + t - 1


def canonical_click(cell_x: int, cell_y: int, t: int) -> ClickPoint:
    """The interior pixel that discretizes to (cell_x, cell_y) with the
    default phase: cell*t + floor(t/2) per axis."""
    return ClickPoint(cell_x * t + t // 2, cell_y * t + t // 2)
