import { createApiClient } from './api.js';
import { createConsoleStore } from './store.js';
import { createSteering } from './steer.js';
import { createSseParser, createStreamCursor, decodeEvent } from './sse.js';
import { drawFrame } from './render.js';
import { fitView, gridBounds } from './view.js';
import type { ViewTransform } from './view.js';
import type { Vec3 } from './types.js';

// Page wiring: one canvas, one chat column, one session against the
// service named by ?server= (same origin by default).

const POSE_INTERVAL_MS = 100;
const RECONNECT_DELAY_MS = 1000;
const START_POSITION: Vec3 = [2, 0, 10];

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

async function boot(): Promise<void> {
  const params = new URLSearchParams(location.search);
  const server = params.get('server') ?? '';
  const api = createApiClient(server);
  const store = createConsoleStore();

  const canvas = el<HTMLCanvasElement>('floorplan');
  const ctx = canvas.getContext('2d');
  if (!ctx) throw new Error('canvas 2d context unavailable');
  const transcriptBox = el<HTMLDivElement>('transcript');
  const toastBox = el<HTMLDivElement>('toasts');
  const input = el<HTMLInputElement>('query');
  const send = el<HTMLButtonElement>('send');

  const [grid, listing, snapshot] = await Promise.all([
    api.getGrid(),
    api.getEntities(),
    api.createSession(),
  ]);
  store.setGrid(grid);
  store.setEntities(listing.entities);
  store.applySnapshot(snapshot);
  const sessionId = snapshot.session_id;

  let view: ViewTransform = fitView(gridBounds(grid), canvas.width, canvas.height);
  window.addEventListener('resize', () => {
    canvas.width = canvas.clientWidth;
    canvas.height = canvas.clientHeight;
    view = fitView(gridBounds(grid), canvas.width, canvas.height);
  });

  // --- steering: keyboard in, pose posts out on a fixed cadence ---------
  const steering = createSteering(grid);
  let userPosition: Vec3 = START_POSITION;
  await api.postPose(sessionId, { position: userPosition, frame: 'bim' });

  window.addEventListener('keydown', (ev) => {
    if (document.activeElement === input) return;
    steering.press(ev.key);
  });
  window.addEventListener('keyup', (ev) => steering.release(ev.key));

  let lastPosePost = 0;
  let poseInFlight = false;
  let lastStep = performance.now();

  async function pumpPose(now: number): Promise<void> {
    const dt = Math.min(0.25, (now - lastStep) / 1000);
    lastStep = now;
    const next = steering.step(userPosition, dt);
    if (next === userPosition) return;
    userPosition = next;
    if (poseInFlight || now - lastPosePost < POSE_INTERVAL_MS) return;
    poseInFlight = true;
    lastPosePost = now;
    try {
      store.applySnapshot(await api.postPose(sessionId, { position: userPosition, frame: 'bim' }));
    } catch (err) {
      store.failQuery(err instanceof Error ? err.message : String(err));
    } finally {
      poseInFlight = false;
    }
  }

  // --- chat ---------------------------------------------------------------
  async function submitQuery(): Promise<void> {
    const text = input.value;
    if (!store.beginQuery(text)) return;
    input.value = '';
    try {
      const result = await api.postQuery(sessionId, text);
      store.completeQuery(result.response);
      store.applySnapshot(result.state);
    } catch (err) {
      store.failQuery(err instanceof Error ? err.message : String(err));
    }
  }
  send.addEventListener('click', () => void submitQuery());
  input.addEventListener('keydown', (ev) => {
    if (ev.key === 'Enter') void submitQuery();
  });

  // --- event stream with replay-on-reconnect -------------------------------
  const cursor = createStreamCursor();
  async function listen(): Promise<void> {
    for (;;) {
      try {
        const response = await fetch(api.eventsUrl(sessionId, cursor.lastSeq));
        if (!response.ok || !response.body) throw new Error(`stream ${response.status}`);
        const reader = response.body.getReader();
        const decoder = new TextDecoder();
        const parser = createSseParser();
        for (;;) {
          const { value, done } = await reader.read();
          if (done) break;
          for (const frame of parser.feed(decoder.decode(value, { stream: true }))) {
            const event = decodeEvent(frame);
            if (event && cursor.advance(event)) {
              store.applyEvent(event);
            }
          }
        }
      } catch {
        // fall through to resync
      }
      // dropped: resync from a snapshot, then replay from the last seq
      try {
        store.applySnapshot(await api.getState(sessionId));
      } catch {
        // server still unreachable; retry after the delay
      }
      await new Promise((resolve) => setTimeout(resolve, RECONNECT_DELAY_MS));
    }
  }
  void listen();

  // --- render loop ----------------------------------------------------------
  let transcriptLength = -1;
  function renderTranscript(): void {
    if (store.state.transcript.length === transcriptLength) return;
    transcriptLength = store.state.transcript.length;
    transcriptBox.replaceChildren(
      ...store.state.transcript.map((entry) => {
        const line = document.createElement('div');
        line.className = `line ${entry.role}${entry.question ? ' question' : ''}`;
        line.textContent = `${entry.role === 'user' ? 'you' : entry.role}: ${entry.text}`;
        return line;
      }),
    );
    transcriptBox.scrollTop = transcriptBox.scrollHeight;
    toastBox.replaceChildren(
      ...store.state.toasts.slice(-3).map((code) => {
        const note = document.createElement('div');
        note.className = 'toast';
        note.textContent = code;
        return note;
      }),
    );
  }

  function frame(now: number): void {
    void pumpPose(now);
    send.disabled = store.state.queryInFlight || input.value.trim() === '';
    renderTranscript();
    drawFrame(ctx!, store.state, view);
    requestAnimationFrame(frame);
  }
  input.addEventListener('input', () => {
    send.disabled = store.state.queryInFlight || input.value.trim() === '';
  });
  requestAnimationFrame(frame);
}

boot().catch((err) => {
  const box = document.getElementById('toasts');
  if (box) box.textContent = `failed to start: ${err}`;
});
