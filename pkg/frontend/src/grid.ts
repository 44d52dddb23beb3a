import type { GridInfo, Vec3 } from './types.js';

// Walkability lookups against the server's grid bitmap. The console only
// reads this data; it never plans with it.

export function cellOf(grid: GridInfo, p: Vec3): [number, number] {
  return [
    Math.floor((p[0] - grid.origin[0]) / grid.cell_size_m),
    Math.floor((p[2] - grid.origin[1]) / grid.cell_size_m),
  ];
}

export function cellWalkable(grid: GridInfo, ix: number, iz: number): boolean {
  if (ix < 0 || iz < 0 || ix >= grid.width || iz >= grid.depth) {
    return false;
  }
  return grid.rows[iz]?.charAt(ix) === '.';
}

export function walkableAt(grid: GridInfo, p: Vec3): boolean {
  const [ix, iz] = cellOf(grid, p);
  return cellWalkable(grid, ix, iz);
}
