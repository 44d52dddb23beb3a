import type { ServerEvent } from './types.js';

// Incremental parser for the service's SSE stream. Frames arrive as
// "id: N / event: type / data: json" blocks separated by blank lines;
// comment lines (keepalives) and retry hints are handled but not
// surfaced as events.

export interface SseFrame {
  id: number | null;
  event: string | null;
  data: string;
}

export interface SseParser {
  feed(chunk: string): SseFrame[];
}

export function createSseParser(): SseParser {
  let buffer = '';

  function parseBlock(block: string): SseFrame | null {
    let id: number | null = null;
    let event: string | null = null;
    const data: string[] = [];
    for (const line of block.split('\n')) {
      if (line.startsWith(':') || line === '') continue;
      const sep = line.indexOf(':');
      const field = sep === -1 ? line : line.slice(0, sep);
      const value = sep === -1 ? '' : line.slice(sep + 1).replace(/^ /, '');
      if (field === 'id') id = Number(value);
      else if (field === 'event') event = value;
      else if (field === 'data') data.push(value);
      // retry hints configure reconnect timing; the caller's loop handles that
    }
    if (id === null && event === null && data.length === 0) {
      return null;
    }
    return { id, event, data: data.join('\n') };
  }

  return {
    feed(chunk) {
      buffer += chunk;
      const frames: SseFrame[] = [];
      let end: number;
      while ((end = buffer.indexOf('\n\n')) !== -1) {
        const block = buffer.slice(0, end);
        buffer = buffer.slice(end + 2);
        const frame = parseBlock(block);
        if (frame) frames.push(frame);
      }
      return frames;
    },
  };
}

export function decodeEvent(frame: SseFrame): ServerEvent | null {
  if (!frame.data) return null;
  try {
    return JSON.parse(frame.data) as ServerEvent;
  } catch {
    return null;
  }
}

// Reconnect bookkeeping: the stream replays from the last seen seq, and a
// drop is healed by a snapshot resync before reopening.

export interface StreamCursor {
  lastSeq: number;
  advance(event: ServerEvent): boolean;
}

export function createStreamCursor(since = 0): StreamCursor {
  let lastSeq = since;
  return {
    get lastSeq() {
      return lastSeq;
    },
    advance(event) {
      if (event.seq <= lastSeq) {
        return false; // replayed duplicate after a reconnect
      }
      lastSeq = event.seq;
      return true;
    },
  };
}
