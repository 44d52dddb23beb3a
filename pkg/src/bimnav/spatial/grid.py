"""Walkability grid derived from building footprints.

The model is flattened onto the x-z plane (y is up and ignored). A cell is
walkable when its center lies inside some space footprint, loses that when
its rectangle overlaps a furnishing footprint, and gets it back when a
door footprint overlaps it; doors are what connect rooms across the wall
strips between space boxes. Overlap means positive area, so footprints
that only touch a cell edge do not claim it.
"""

from __future__ import annotations

import io
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import NoWalkableSpace
from ..geometry import Aabb, Point2, Point3
from ..ingest import BimModel, IfcClass

LOGGER = logging.getLogger(__name__)

DEFAULT_CELL_SIZE_M = 0.25


@dataclass(frozen=True)
class NavGrid:
    """Occupancy bitmap: ``cells[ix, iz]`` True means walkable."""

    origin: Point2
    cell_size: float
    cells: np.ndarray = field(repr=False)

    @property
    def width(self) -> int:
        return int(self.cells.shape[0])

    @property
    def depth(self) -> int:
        return int(self.cells.shape[1])

    def cell_of(self, p: Point3) -> tuple[int, int]:
        return (
            int(math.floor((p[0] - self.origin[0]) / self.cell_size)),
            int(math.floor((p[2] - self.origin[1]) / self.cell_size)),
        )

    def center_of(self, cell: tuple[int, int]) -> Point3:
        return (
            self.origin[0] + (cell[0] + 0.5) * self.cell_size,
            0.0,
            self.origin[1] + (cell[1] + 0.5) * self.cell_size,
        )

    def in_bounds(self, cell: tuple[int, int]) -> bool:
        return 0 <= cell[0] < self.width and 0 <= cell[1] < self.depth

    def cell_walkable(self, cell: tuple[int, int]) -> bool:
        return self.in_bounds(cell) and bool(self.cells[cell[0], cell[1]])


def is_walkable(grid: NavGrid, p: Point3) -> bool:
    """True when the point's cell is inside the grid and walkable."""
    return grid.cell_walkable(grid.cell_of(p))


def build_nav_grid(model: BimModel, cell_size: float = DEFAULT_CELL_SIZE_M) -> NavGrid:
    """Rasterise the model's footprints into a walkability grid."""
    if cell_size <= 0.0:
        raise ValueError(f"cell_size must be positive, got {cell_size}")

    spaces = [e.geometry for e in model.elements if e.ifc_class is IfcClass.SPACE and e.geometry]
    doors = [e.geometry for e in model.elements if e.ifc_class is IfcClass.DOOR and e.geometry]
    blockers = [
        e.geometry
        for e in model.elements
        if e.ifc_class is IfcClass.FURNISHING and e.geometry
    ]
    if not spaces:
        raise NoWalkableSpace("model has no space footprints")

    bounds = spaces[0]
    for box in spaces[1:] + doors + blockers:
        bounds = bounds.union(box)
    pad = cell_size
    origin = (bounds.min[0] - pad, bounds.min[2] - pad)
    width = int(math.ceil((bounds.max[0] + pad - origin[0]) / cell_size))
    depth = int(math.ceil((bounds.max[2] + pad - origin[1]) / cell_size))
    width = max(width, 1)
    depth = max(depth, 1)

    cells = np.zeros((width, depth), dtype=bool)

    xs = origin[0] + (np.arange(width) + 0.5) * cell_size
    zs = origin[1] + (np.arange(depth) + 0.5) * cell_size
    for box in spaces:
        col = (xs >= box.min[0]) & (xs <= box.max[0])
        row = (zs >= box.min[2]) & (zs <= box.max[2])
        cells |= np.outer(col, row)

    for box in blockers:
        cells &= ~_overlap_mask(box, origin, cell_size, width, depth)
    for box in doors:
        cells |= _overlap_mask(box, origin, cell_size, width, depth)

    if not cells.any():
        raise NoWalkableSpace("no cell center falls inside any space footprint")
    return NavGrid(origin=origin, cell_size=cell_size, cells=cells)


def _overlap_mask(
    box: Aabb, origin: Point2, cell_size: float, width: int, depth: int
) -> np.ndarray:
    """Cells whose rectangle overlaps the box with positive area."""
    x_low = origin[0] + np.arange(width) * cell_size
    z_low = origin[1] + np.arange(depth) * cell_size
    col = (x_low + cell_size > box.min[0] + 1e-12) & (x_low < box.max[0] - 1e-12)
    row = (z_low + cell_size > box.min[2] + 1e-12) & (z_low < box.max[2] - 1e-12)
    return np.outer(col, row)


def dump_ascii(grid: NavGrid) -> str:
    """Debug view, one row per z slice from high z to low, '#' blocked."""
    out = io.StringIO()
    for iz in range(grid.depth - 1, -1, -1):
        for ix in range(grid.width):
            out.write("." if grid.cells[ix, iz] else "#")
        out.write("\n")
    return out.getvalue()


def dump_pgm(grid: NavGrid) -> bytes:
    """Binary PGM image of the grid; white is walkable."""
    header = f"P5\n{grid.width} {grid.depth}\n255\n".encode("ascii")
    rows = []
    for iz in range(grid.depth - 1, -1, -1):
        rows.append(bytes(255 if grid.cells[ix, iz] else 0 for ix in range(grid.width)))
    return header + b"".join(rows)
