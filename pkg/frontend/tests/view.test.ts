import { describe, expect, it } from 'vitest';

import { fitView, gridBounds, screenToWorld, worldToScreen } from '../src/view';
import type { GridInfo } from '../src/types';

const GRID: GridInfo = {
  origin: [-0.25, -0.25],
  cell_size_m: 0.25,
  width: 162,
  depth: 82,
  rows: [],
};

describe('view transform', () => {
  const bounds = gridBounds(GRID);
  const view = fitView(bounds, 900, 700, 16);

  it('keeps the whole building inside the canvas margin', () => {
    const corners = [
      [bounds.minX, 0, bounds.minZ],
      [bounds.maxX, 0, bounds.minZ],
      [bounds.minX, 0, bounds.maxZ],
      [bounds.maxX, 0, bounds.maxZ],
    ] as const;
    for (const corner of corners) {
      const [sx, sy] = worldToScreen(view, [...corner]);
      expect(sx).toBeGreaterThanOrEqual(16 - 1e-9);
      expect(sx).toBeLessThanOrEqual(900 - 16 + 1e-9);
      expect(sy).toBeGreaterThanOrEqual(0 - 1e-9);
      expect(sy).toBeLessThanOrEqual(700 + 1e-9);
    }
  });

  it('round trips world coordinates', () => {
    const p: [number, number, number] = [12.25, 0, 16];
    const [sx, sy] = worldToScreen(view, p);
    const back = screenToWorld(view, sx, sy);
    expect(back[0]).toBeCloseTo(p[0], 9);
    expect(back[2]).toBeCloseTo(p[2], 9);
  });

  it('is a single uniform affine map', () => {
    // distances must scale by exactly one factor in every direction
    const a = worldToScreen(view, [0, 0, 0]);
    const b = worldToScreen(view, [3, 0, 0]);
    const c = worldToScreen(view, [0, 0, 4]);
    expect(Math.hypot(b[0] - a[0], b[1] - a[1])).toBeCloseTo(3 * view.scale, 9);
    expect(Math.hypot(c[0] - a[0], c[1] - a[1])).toBeCloseTo(4 * view.scale, 9);
  });

  it('draws north (+z) toward the top of the screen', () => {
    const low = worldToScreen(view, [5, 0, 1]);
    const high = worldToScreen(view, [5, 0, 10]);
    expect(high[1]).toBeLessThan(low[1]);
    expect(high[0]).toBe(low[0]);
  });
});
