import { cellWalkable } from './grid.js';
import type { ConsoleState } from './store.js';
import type { ViewTransform } from './view.js';
import { worldToScreen } from './view.js';
import type { Vec3 } from './types.js';

// Canvas drawing. Route polylines are purple and the user's walked
// trail is aqua; the guide trail is a muted violet so planned and
// actual paths read apart at a glance.

const COLORS = {
  background: '#11131a',
  blocked: '#262b3a',
  walkable: '#f2f3f7',
  entity: '#8a93ad',
  goal: '#e0b341',
  route: '#8d3bd1',
  userTrail: '#19c3d4',
  guideTrail: '#b79bd8',
  user: '#0e7fa0',
  guide: '#5b2d89',
  badgeText: '#ffffff',
};

const BADGE_FILL: Record<string, string> = {
  idle: '#6b7280',
  walking: '#2563eb',
  waiting: '#d97706',
  sidestepping: '#7c3aed',
  presenting: '#059669',
};

function polyline(
  ctx: CanvasRenderingContext2D,
  view: ViewTransform,
  points: Vec3[],
  color: string,
  width: number,
): void {
  if (points.length < 2) return;
  ctx.strokeStyle = color;
  ctx.lineWidth = width;
  ctx.lineJoin = 'round';
  ctx.beginPath();
  const first = points[0]!;
  ctx.moveTo(...worldToScreen(view, first));
  for (let i = 1; i < points.length; i += 1) {
    ctx.lineTo(...worldToScreen(view, points[i]!));
  }
  ctx.stroke();
}

function dot(
  ctx: CanvasRenderingContext2D,
  view: ViewTransform,
  p: Vec3,
  radius: number,
  color: string,
): void {
  const [sx, sy] = worldToScreen(view, p);
  ctx.fillStyle = color;
  ctx.beginPath();
  ctx.arc(sx, sy, radius, 0, 2 * Math.PI);
  ctx.fill();
}

export function drawFrame(
  ctx: CanvasRenderingContext2D,
  state: ConsoleState,
  view: ViewTransform,
): void {
  const canvas = ctx.canvas;
  ctx.fillStyle = COLORS.background;
  ctx.fillRect(0, 0, canvas.width, canvas.height);

  const grid = state.grid;
  if (!grid) return;

  // floor bitmap; one rect per walkable cell keeps the wall texture crisp
  const cell = grid.cell_size_m * view.scale;
  for (let iz = 0; iz < grid.depth; iz += 1) {
    for (let ix = 0; ix < grid.width; ix += 1) {
      const wx = grid.origin[0] + ix * grid.cell_size_m;
      const wz = grid.origin[1] + (iz + 1) * grid.cell_size_m;
      const [sx, sy] = worldToScreen(view, [wx, 0, wz]);
      ctx.fillStyle = cellWalkable(grid, ix, iz) ? COLORS.walkable : COLORS.blocked;
      ctx.fillRect(sx, sy, cell + 0.5, cell + 0.5);
    }
  }

  for (const entity of state.entities) {
    const highlighted = entity.id === state.currentGoal;
    dot(ctx, view, entity.position, highlighted ? 6 : 3, highlighted ? COLORS.goal : COLORS.entity);
    if (highlighted || entity.class === 'space') {
      const [sx, sy] = worldToScreen(view, entity.position);
      ctx.fillStyle = highlighted ? COLORS.goal : COLORS.entity;
      ctx.font = '11px system-ui, sans-serif';
      ctx.fillText(entity.name, sx + 6, sy - 4);
    }
  }

  polyline(ctx, view, state.guideTrail, COLORS.guideTrail, 1.5);
  polyline(ctx, view, state.userTrail, COLORS.userTrail, 2);
  if (state.routeWaypoints) {
    polyline(ctx, view, state.routeWaypoints, COLORS.route, 2.5);
  }

  if (state.userPosition) {
    dot(ctx, view, state.userPosition, 6, COLORS.user);
  }

  if (state.guidePosition) {
    dot(ctx, view, state.guidePosition, 6, COLORS.guide);
    // heading arrow: world z points up the screen, so flip the z component
    const [gx, gy] = worldToScreen(view, state.guidePosition);
    const [hx, hz] = state.guideHeading;
    ctx.strokeStyle = COLORS.route;
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.moveTo(gx, gy);
    ctx.lineTo(gx + hx * 14, gy - hz * 14);
    ctx.stroke();

    const badge = state.badge;
    ctx.fillStyle = BADGE_FILL[badge] ?? '#6b7280';
    const label = ` ${badge} `;
    ctx.font = 'bold 11px system-ui, sans-serif';
    const width = ctx.measureText(label).width;
    ctx.fillRect(gx + 8, gy + 6, width, 16);
    ctx.fillStyle = COLORS.badgeText;
    ctx.fillText(label, gx + 8, gy + 18);
  }
}
