// Wire types for the bimnav service. These mirror the server payloads
// exactly; the console never derives navigation data on its own.

export type Vec3 = [number, number, number];
export type Vec2 = [number, number];

export type GuideMode = 'idle' | 'walking' | 'waiting' | 'sidestepping' | 'presenting';

export interface TransformInfo {
  rotation: [number, number, number, number];
  translation: Vec3;
  rms_residual_m: number;
  high_residual: boolean;
}

export interface UserInfo {
  position: Vec3;
  orientation: [number, number, number, number];
}

export interface GuideInfo {
  mode: GuideMode;
  position: Vec3;
  heading: Vec2;
  path_progress_m: number;
}

export interface RouteInfo {
  waypoints: Vec3[];
  length_m: number;
}

export interface Snapshot {
  session_id: string;
  tick: number;
  transform: TransformInfo;
  user: UserInfo | null;
  guide: GuideInfo;
  current_goal: string | null;
  goal_queue: string[];
  route: RouteInfo | null;
}

export interface GoalInfo {
  id: string | null;
  name: string | null;
  similarity: number | null;
  distance_m: number | null;
  candidate_ids: string[];
}

export interface AgentReply {
  text: string;
  category: 'greeting' | 'inquiry' | 'navigation' | 'invalid';
  needs_clarification: boolean;
  error_code: string | null;
  goals: GoalInfo[];
}

export interface QueryResult {
  response: AgentReply;
  state: Snapshot;
}

export interface EntityInfo {
  id: string;
  class: string;
  name: string;
  description: string;
  position: Vec3;
  footprint: { min: Vec3; max: Vec3 } | null;
  attributes: Record<string, unknown>;
}

export interface EntityListing {
  building: string;
  count: number;
  entities: EntityInfo[];
}

// rows[iz][ix], row 0 at the lowest z; '.' walkable, '#' blocked
export interface GridInfo {
  origin: Vec2;
  cell_size_m: number;
  width: number;
  depth: number;
  rows: string[];
}

interface EventBase {
  seq: number;
  tick: number;
}

export interface RouteEvent extends EventBase {
  type: 'route';
  goal_id: string;
  goal_name: string;
  length_m: number;
  waypoints: number;
}

export interface ModeChangeEvent extends EventBase {
  type: 'mode_change';
  previous: GuideMode;
  mode: GuideMode;
}

export interface GoalReachedEvent extends EventBase {
  type: 'goal_reached';
  goal_id: string;
}

export interface ClarificationEvent extends EventBase {
  type: 'clarification';
  question: string;
}

export interface ErrorEvent extends EventBase {
  type: 'error';
  code: string;
  goal_id?: string;
}

export type ServerEvent =
  | RouteEvent
  | ModeChangeEvent
  | GoalReachedEvent
  | ClarificationEvent
  | ErrorEvent;

export interface PoseBody {
  position: Vec3;
  orientation?: [number, number, number, number];
  frame?: 'vps' | 'bim';
}
