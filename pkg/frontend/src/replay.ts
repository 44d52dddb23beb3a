import type { GridInfo, GuideMode, Snapshot, Vec3 } from './types.js';

// Recorded-session playback. A recording is what `bimnav simulate
// --record` writes: the building, the grid, the entities, and for every
// followed walk the per-tick user/guide tracks plus each route leg with
// the tick it became active. Replay converts those ticks back into
// snapshots so the live rendering path is reused unchanged.

export interface RecordedRoute {
  tick: number;
  goal_id: string | null;
  waypoints: Vec3[];
  length_m: number;
}

export interface RecordedTick {
  tick: number;
  user: Vec3;
  guide: Vec3;
  mode: GuideMode;
}

export interface RecordedCase {
  name: string;
  query: string;
  response: string;
  goal_id: string | null;
  route: { waypoints: Vec3[]; length_m: number } | null;
  routes: RecordedRoute[];
  ticks: RecordedTick[];
}

export interface Recording {
  building: string;
  grid: GridInfo;
  entities: unknown[];
  cases: RecordedCase[];
}

export function activeRouteAt(routes: RecordedRoute[], tick: number): RecordedRoute | null {
  let active: RecordedRoute | null = null;
  for (const route of routes) {
    if (route.tick <= tick) {
      active = route;
    }
  }
  return active;
}

export function tickToSnapshot(kase: RecordedCase, index: number): Snapshot {
  const entry = kase.ticks[index];
  if (!entry) {
    throw new Error(`tick index ${index} out of range for ${kase.name}`);
  }
  const route = activeRouteAt(kase.routes, entry.tick);
  return {
    session_id: `replay:${kase.name}`,
    tick: entry.tick,
    transform: {
      rotation: [1, 0, 0, 0],
      translation: [0, 0, 0],
      rms_residual_m: 0,
      high_residual: false,
    },
    user: { position: entry.user, orientation: [1, 0, 0, 0] },
    guide: {
      mode: entry.mode,
      position: entry.guide,
      heading: [1, 0],
      path_progress_m: 0,
    },
    current_goal: route ? route.goal_id : null,
    goal_queue: [],
    route: route ? { waypoints: route.waypoints, length_m: route.length_m } : null,
  };
}

export function findCase(recording: Recording, name: string): RecordedCase {
  const kase = recording.cases.find((c) => c.name === name);
  if (!kase) {
    const names = recording.cases.map((c) => c.name).join(', ');
    throw new Error(`no recorded case named ${name} (have: ${names})`);
  }
  return kase;
}
