import type { GridInfo, Vec3 } from './types.js';

// One affine transform maps world metres to canvas pixels; everything on
// screen goes through it, so rendered geometry can never drift from the
// server's coordinates.

export interface ViewTransform {
  scale: number;
  offsetX: number;
  offsetY: number;
  worldHeight: number;
}

export interface WorldBounds {
  minX: number;
  minZ: number;
  maxX: number;
  maxZ: number;
}

export function gridBounds(grid: GridInfo): WorldBounds {
  const [ox, oz] = grid.origin;
  return {
    minX: ox,
    minZ: oz,
    maxX: ox + grid.width * grid.cell_size_m,
    maxZ: oz + grid.depth * grid.cell_size_m,
  };
}

export function fitView(
  bounds: WorldBounds,
  canvasWidth: number,
  canvasHeight: number,
  margin = 16,
): ViewTransform {
  const spanX = bounds.maxX - bounds.minX;
  const spanZ = bounds.maxZ - bounds.minZ;
  const scale = Math.min(
    (canvasWidth - 2 * margin) / spanX,
    (canvasHeight - 2 * margin) / spanZ,
  );
  // center the building in the canvas
  const offsetX = (canvasWidth - spanX * scale) / 2 - bounds.minX * scale;
  const offsetY = (canvasHeight - spanZ * scale) / 2;
  return { scale, offsetX, offsetY, worldHeight: bounds.maxZ };
}

// Top-down map convention: +x right, +z up the screen.
export function worldToScreen(view: ViewTransform, p: Vec3): [number, number] {
  return [
    view.offsetX + p[0] * view.scale,
    view.offsetY + (view.worldHeight - p[2]) * view.scale,
  ];
}

export function screenToWorld(view: ViewTransform, sx: number, sy: number): Vec3 {
  return [
    (sx - view.offsetX) / view.scale,
    0,
    view.worldHeight - (sy - view.offsetY) / view.scale,
  ];
}
