import type {
  AgentReply,
  EntityInfo,
  GridInfo,
  GuideMode,
  ServerEvent,
  Snapshot,
  Vec3,
} from './types.js';

// Single source of truth for the console. Every goal, route and mode in
// here originates from a server payload; the store only copies, trims
// and timestamps. Events are applied in arrival order.

const TRAIL_LIMIT = 4000;
const TRANSCRIPT_LIMIT = 200;

export type TranscriptRole = 'user' | 'guide' | 'system';

export interface TranscriptEntry {
  role: TranscriptRole;
  text: string;
  question: boolean;
}

export interface ConsoleState {
  sessionId: string | null;
  tick: number;
  grid: GridInfo | null;
  entities: EntityInfo[];
  userPosition: Vec3 | null;
  guidePosition: Vec3 | null;
  guideHeading: [number, number];
  badge: GuideMode;
  // copied verbatim from snapshot.route.waypoints, never recomputed
  routeWaypoints: Vec3[] | null;
  currentGoal: string | null;
  goalQueue: string[];
  userTrail: Vec3[];
  guideTrail: Vec3[];
  transcript: TranscriptEntry[];
  toasts: string[];
  queryInFlight: boolean;
  awaitingAnswer: boolean;
}

export interface ConsoleStore {
  readonly state: ConsoleState;
  setGrid(grid: GridInfo): void;
  setEntities(entities: EntityInfo[]): void;
  applySnapshot(snapshot: Snapshot): void;
  applyEvent(event: ServerEvent): void;
  beginQuery(text: string): boolean;
  completeQuery(reply: AgentReply): void;
  failQuery(message: string): void;
  resetTrails(): void;
}

function pushCapped<T>(items: T[], item: T, cap: number): void {
  items.push(item);
  if (items.length > cap) {
    items.splice(0, items.length - cap);
  }
}

export function createConsoleStore(): ConsoleStore {
  const state: ConsoleState = {
    sessionId: null,
    tick: 0,
    grid: null,
    entities: [],
    userPosition: null,
    guidePosition: null,
    guideHeading: [1, 0],
    badge: 'idle',
    routeWaypoints: null,
    currentGoal: null,
    goalQueue: [],
    userTrail: [],
    guideTrail: [],
    transcript: [],
    toasts: [],
    queryInFlight: false,
    awaitingAnswer: false,
  };

  function say(role: TranscriptRole, text: string, question = false): void {
    pushCapped(state.transcript, { role, text, question }, TRANSCRIPT_LIMIT);
  }

  return {
    state,

    setGrid(grid) {
      state.grid = grid;
    },

    setEntities(entities) {
      state.entities = entities;
    },

    applySnapshot(snapshot) {
      const advanced = snapshot.tick > state.tick;
      state.sessionId = snapshot.session_id;
      state.tick = snapshot.tick;
      state.badge = snapshot.guide.mode;
      state.guidePosition = snapshot.guide.position;
      state.guideHeading = snapshot.guide.heading;
      state.currentGoal = snapshot.current_goal;
      state.goalQueue = snapshot.goal_queue;
      state.routeWaypoints = snapshot.route ? snapshot.route.waypoints : null;
      if (snapshot.user) {
        state.userPosition = snapshot.user.position;
        if (advanced) {
          pushCapped(state.userTrail, snapshot.user.position, TRAIL_LIMIT);
        }
      }
      if (advanced) {
        pushCapped(state.guideTrail, snapshot.guide.position, TRAIL_LIMIT);
      }
    },

    applyEvent(event) {
      switch (event.type) {
        case 'route':
          say('system', `Route to ${event.goal_name} (${event.length_m.toFixed(1)} m)`);
          break;
        case 'mode_change':
          state.badge = event.mode;
          break;
        case 'goal_reached':
          say('system', `Reached ${event.goal_id}`);
          break;
        case 'clarification':
          state.awaitingAnswer = true;
          break;
        case 'error':
          pushCapped(state.toasts, event.code, 8);
          say('system', `Error: ${event.code}`);
          break;
      }
    },

    beginQuery(text) {
      // at most one query in flight, and never an empty one
      if (state.queryInFlight || text.trim() === '') {
        return false;
      }
      state.queryInFlight = true;
      say('user', text);
      return true;
    },

    completeQuery(reply) {
      state.queryInFlight = false;
      state.awaitingAnswer = reply.needs_clarification;
      say('guide', reply.text, reply.needs_clarification);
      if (reply.error_code) {
        pushCapped(state.toasts, reply.error_code, 8);
      }
    },

    failQuery(message) {
      state.queryInFlight = false;
      pushCapped(state.toasts, message, 8);
      say('system', `Request failed: ${message}`);
    },

    resetTrails() {
      state.userTrail = [];
      state.guideTrail = [];
    },
  };
}
