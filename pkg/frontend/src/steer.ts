import { walkableAt } from './grid.js';
import type { GridInfo, Vec3 } from './types.js';

// Keyboard steering for the simulated user. Fixed speed, axis-sliding
// along walls; the grid bitmap comes from the server, so a blocked cell
// here is a blocked cell there.

export const STEER_SPEED_MPS = 1.4;

const KEY_DIRECTIONS: Record<string, [number, number]> = {
  ArrowUp: [0, 1],
  ArrowDown: [0, -1],
  ArrowLeft: [-1, 0],
  ArrowRight: [1, 0],
  w: [0, 1],
  s: [0, -1],
  a: [-1, 0],
  d: [1, 0],
};

export interface Steering {
  press(key: string): void;
  release(key: string): void;
  active(): boolean;
  step(position: Vec3, dt: number): Vec3;
}

export function createSteering(grid: GridInfo, speed = STEER_SPEED_MPS): Steering {
  const held = new Set<string>();

  function direction(): [number, number] {
    let dx = 0;
    let dz = 0;
    for (const key of held) {
      const dir = KEY_DIRECTIONS[key];
      if (dir) {
        dx += dir[0];
        dz += dir[1];
      }
    }
    const norm = Math.hypot(dx, dz);
    return norm > 0 ? [dx / norm, dz / norm] : [0, 0];
  }

  return {
    press(key) {
      if (key in KEY_DIRECTIONS) held.add(key);
    },
    release(key) {
      held.delete(key);
    },
    active() {
      return direction()[0] !== 0 || direction()[1] !== 0;
    },
    step(position, dt) {
      const [dx, dz] = direction();
      if (dx === 0 && dz === 0) {
        return position;
      }
      const stepX = dx * speed * dt;
      const stepZ = dz * speed * dt;
      const full: Vec3 = [position[0] + stepX, position[1], position[2] + stepZ];
      if (walkableAt(grid, full)) {
        return full;
      }
      // slide along the wall instead of stopping dead
      const xOnly: Vec3 = [position[0] + stepX, position[1], position[2]];
      if (stepX !== 0 && walkableAt(grid, xOnly)) {
        return xOnly;
      }
      const zOnly: Vec3 = [position[0], position[1], position[2] + stepZ];
      if (stepZ !== 0 && walkableAt(grid, zOnly)) {
        return zOnly;
      }
      return position;
    },
  };
}
