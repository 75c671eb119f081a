/**
 * Thin protocol client: connect, raw eval, value parse (subset), ls/exists.
 * Frame format, status handling and shutdown semantics match the primary
 * client; one outstanding request at a time.
 */

import * as net from "node:net";

import { decodeResponse, encodeFrame, FrameReader, Response, SHUTDOWN_FRAME } from "./framing.js";
import { parseValue, ThinValue } from "./values.js";

export class RemoteError extends Error {
  constructor(public status: number, message: string) {
    super(`remote error (status ${status}): ${message}`);
  }
}

const RETRY_INTERVAL_MS = 100;

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

function connectOnce(host: string, port: number): Promise<net.Socket> {
  return new Promise((resolve, reject) => {
    const socket = net.createConnection({ host, port }, () => {
      socket.off("error", reject);
      resolve(socket);
    });
    socket.once("error", reject);
  });
}

export class ThinClient {
  private socket!: net.Socket;
  private reader = new FrameReader();
  private pending: Buffer[] = [];
  private waiter: ((frame: Buffer) => void) | null = null;
  private closed = false;

  static async connect(host: string, port: number, timeoutMs = 10_000): Promise<ThinClient> {
    const deadline = Date.now() + timeoutMs;
    for (;;) {
      try {
        const socket = await connectOnce(host, port);
        const client = new ThinClient();
        client.attach(socket);
        return client;
      } catch (err) {
        if (Date.now() >= deadline) throw err;
        await sleep(RETRY_INTERVAL_MS);
      }
    }
  }

  private attach(socket: net.Socket): void {
    this.socket = socket;
    socket.on("data", (chunk: Buffer) => {
      for (const frame of this.reader.push(chunk)) {
        if (this.waiter) {
          const resolve = this.waiter;
          this.waiter = null;
          resolve(frame);
        } else {
          this.pending.push(frame);
        }
      }
    });
    socket.on("close", () => {
      this.closed = true;
    });
    socket.on("error", () => {
      this.closed = true;
    });
  }

  private nextFrame(): Promise<Buffer> {
    const queued = this.pending.shift();
    if (queued !== undefined) return Promise.resolve(queued);
    return new Promise((resolve) => {
      this.waiter = resolve;
    });
  }

  async request(source: string): Promise<Response> {
    if (this.closed) throw new Error("connection already stopped");
    this.socket.write(encodeFrame(source));
    return decodeResponse(await this.nextFrame());
  }

  async evalRaw(source: string): Promise<string> {
    const response = await this.request(source);
    if (response.status !== 0) {
      throw new RemoteError(response.status, response.lines.join("\n"));
    }
    return response.lines.join("\n");
  }

  async evalValue(source: string): Promise<ThinValue> {
    return parseValue(await this.evalRaw(source));
  }

  async ls(allNames = false): Promise<string[]> {
    const value = await this.evalValue(allNames ? "ls(true)" : "ls()");
    if (value.t !== "list") throw new Error("ls did not answer with a list");
    return value.items.map((item) => {
      if (item.t !== "text") throw new Error("ls item is not text");
      return item.v;
    });
  }

  async exists(names: string[]): Promise<boolean[]> {
    const arg = "[" + names.map((n) => JSON.stringify(n)).join(",") + "]";
    const value = await this.evalValue(`exists(${arg})`);
    if (value.t !== "list") throw new Error("exists did not answer with a list");
    return value.items.map((item) => {
      if (item.t !== "bool") throw new Error("exists item is not a boolean");
      return item.v;
    });
  }

  /** Zero-length frame: the worker closes and exits cleanly. */
  async stop(): Promise<void> {
    if (this.closed) return;
    this.closed = true;
    await new Promise<void>((resolve) => {
      this.socket.end(SHUTDOWN_FRAME, () => resolve());
    });
  }
}
