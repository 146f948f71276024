"""How a raw pixel click becomes a hashable cell.

A click is snapped to a t x t tolerance cell whose grid phase is chosen
so the click sits at the cell's center pixel. Re-entered clicks that
deviate by at most (t-1)/2 pixels per axis (odd t) resolve to the same
cell, which is the property that lets the server hash cells instead of
storing coordinates.
"""

from clickpass import ClickPoint, cell_count, discretize, formula_cell_count, same_cell
from clickpass.grid import cell_window

W = H = 400
T = 19

click = ClickPoint(137, 137)
d = discretize(click, T, W, H)
print(f"click {click.x},{click.y} at tolerance {T}:")
print(f"  cell = ({d.cell_x}, {d.cell_y}), stored offsets = ({d.offset_x}, {d.offset_y})")
lo, hi = cell_window(d.cell_x, d.offset_x, T)
print(f"  x-axis cell spans pixels {lo}..{hi} (click centered at {lo + T // 2})")

print("\nprobes around the enrolled click:")
for dx in (-10, -9, 0, 9, 10):
    probe = ClickPoint(click.x + dx, click.y)
    verdict = same_cell(probe, d, T, W, H)
    print(f"  probe x={probe.x:3d} (delta {dx:+3d}) -> {'match' if verdict else 'reject'}")

print(f"\ncells per {W}x{H} image at t={T}:")
print(f"  grid count  floor(w/t)*floor(h/t) = {cell_count(W, H, T)}")
print(f"  flat ratio  (w*h)/t^2             = {formula_cell_count(W, H, T):.2f}")
print("(border remainders merge into their neighbors, so the grid count rules)")
