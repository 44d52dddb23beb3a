import type {
  EntityListing,
  GridInfo,
  PoseBody,
  QueryResult,
  Snapshot,
} from './types.js';

// Thin HTTP client. fetch is injectable so tests run without a server.

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  readonly code: string;
  readonly status: number;
  readonly retryAfterS: number | null;

  constructor(code: string, message: string, status: number, retryAfterS: number | null = null) {
    super(message);
    this.code = code;
    this.status = status;
    this.retryAfterS = retryAfterS;
  }
}

export interface ApiClient {
  createSession(): Promise<Snapshot>;
  postPose(sessionId: string, pose: PoseBody): Promise<Snapshot>;
  postQuery(sessionId: string, text: string): Promise<QueryResult>;
  getState(sessionId: string): Promise<Snapshot>;
  getEntities(): Promise<EntityListing>;
  getGrid(): Promise<GridInfo>;
  eventsUrl(sessionId: string, since: number): string;
}

async function unwrap<T>(res: Response): Promise<T> {
  if (res.ok) {
    return (await res.json()) as T;
  }
  const retryAfter = res.headers.get('Retry-After');
  let code = `http_${res.status}`;
  let message = res.statusText || `request failed with ${res.status}`;
  try {
    const body = await res.json();
    if (body && typeof body === 'object' && 'error' in body) {
      code = body.error.code ?? code;
      message = body.error.message ?? message;
    } else if (body && typeof body === 'object' && 'detail' in body) {
      message = String(body.detail);
    }
  } catch {
    // non-JSON error body, keep the status text
  }
  throw new ApiError(code, message, res.status, retryAfter ? Number(retryAfter) : null);
}

export function createApiClient(baseUrl: string, fetchImpl: FetchLike = fetch): ApiClient {
  const base = baseUrl.replace(/\/$/, '');

  function post<T>(path: string, body: unknown): Promise<T> {
    return fetchImpl(`${base}${path}`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(body),
    }).then((res) => unwrap<T>(res));
  }

  function get<T>(path: string): Promise<T> {
    return fetchImpl(`${base}${path}`).then((res) => unwrap<T>(res));
  }

  return {
    createSession: () => post<Snapshot>('/sessions', {}),
    postPose: (sessionId, pose) => post<Snapshot>(`/sessions/${sessionId}/pose`, pose),
    postQuery: (sessionId, text) => post<QueryResult>(`/sessions/${sessionId}/query`, { text }),
    getState: (sessionId) => get<Snapshot>(`/sessions/${sessionId}/state`),
    getEntities: () => get<EntityListing>('/entities'),
    getGrid: () => get<GridInfo>('/grid'),
    eventsUrl: (sessionId, since) => `${base}/sessions/${sessionId}/events?since=${since}`,
  };
}
