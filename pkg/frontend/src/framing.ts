/**
 * Frame layer: 4-byte big-endian length prefix, UTF-8 payload.
 * The zero-length frame is the shutdown signal.
 */

export interface Response {
  status: number;
  lines: string[];
}

export function encodeFrame(source: string): Buffer {
  const payload = Buffer.from(source, "utf8");
  const header = Buffer.alloc(4);
  header.writeUInt32BE(payload.length, 0);
  return Buffer.concat([header, payload]);
}

export const SHUTDOWN_FRAME = Buffer.from([0, 0, 0, 0]);

/** Incremental frame splitter for a byte stream. */
export class FrameReader {
  private buffer = Buffer.alloc(0);

  push(chunk: Buffer): Buffer[] {
    this.buffer = Buffer.concat([this.buffer, chunk]);
    const frames: Buffer[] = [];
    for (;;) {
      if (this.buffer.length < 4) return frames;
      const length = this.buffer.readUInt32BE(0);
      if (this.buffer.length < 4 + length) return frames;
      frames.push(this.buffer.subarray(4, 4 + length));
      this.buffer = this.buffer.subarray(4 + length);
    }
  }
}

/** Payload layout: first line "STATUS LINECOUNT", then LINECOUNT lines. */
export function decodeResponse(payload: Buffer): Response {
  const text = payload.toString("utf8");
  const newline = text.indexOf("\n");
  const head = newline === -1 ? text : text.slice(0, newline);
  const parts = head.split(" ");
  if (parts.length !== 2 || !/^\d+$/.test(parts[0]) || !/^\d+$/.test(parts[1])) {
    throw new Error(`bad response header: ${JSON.stringify(head)}`);
  }
  const status = Number(parts[0]);
  const count = Number(parts[1]);
  const lines = newline === -1 ? [] : text.slice(newline + 1).split("\n");
  if (lines.length !== count) {
    throw new Error(`line count mismatch: said ${count}, got ${lines.length}`);
  }
  return { status, lines };
}
