/** Frame bytes must be byte-identical to the primary client's. */

import { readFileSync } from "node:fs";
import * as net from "node:net";
import { join, dirname } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { ThinClient } from "../src/client.js";
import { decodeResponse, encodeFrame, FrameReader } from "../src/framing.js";

const golden = join(dirname(fileURLToPath(import.meta.url)), "..", "..", "golden");
const fixtures: { source: string; hex: string }[] = JSON.parse(
  readFileSync(join(golden, "frames.json"), "utf8"),
);

describe("frame encoding", () => {
  it("matches every pinned fixture", () => {
    expect(fixtures.length).toBeGreaterThan(0);
    for (const fixture of fixtures) {
      expect(encodeFrame(fixture.source).toString("hex")).toBe(fixture.hex);
    }
  });

  it("loopback capture: the socket carries exactly the pinned bytes", async () => {
    const captured: Buffer[] = [];
    const reader = new FrameReader();
    const server = net.createServer((socket) => {
      socket.on("data", (chunk) => {
        captured.push(chunk);
        for (const frame of reader.push(chunk)) {
          void frame; // reply "0 1\nok" per complete request frame
          const payload = Buffer.from("0 1\nok", "utf8");
          const header = Buffer.alloc(4);
          header.writeUInt32BE(payload.length, 0);
          socket.write(Buffer.concat([header, payload]));
        }
      });
    });
    await new Promise<void>((resolve) => server.listen(0, "127.0.0.1", resolve));
    const port = (server.address() as net.AddressInfo).port;

    const client = await ThinClient.connect("127.0.0.1", port);
    const source = fixtures[0].source;
    const response = await client.request(source);
    expect(response).toEqual({ status: 0, lines: ["ok"] });
    await client.stop();
    await new Promise<void>((resolve) => server.close(() => resolve()));

    const bytes = Buffer.concat(captured).toString("hex");
    expect(bytes.startsWith(fixtures[0].hex)).toBe(true);
  });
});

describe("response decoding", () => {
  it("splits status, count and lines", () => {
    expect(decodeResponse(Buffer.from("0 1\n2", "utf8"))).toEqual({
      status: 0,
      lines: ["2"],
    });
    expect(decodeResponse(Buffer.from("2 2\na\nb", "utf8"))).toEqual({
      status: 2,
      lines: ["a", "b"],
    });
    expect(decodeResponse(Buffer.from("3 0", "utf8"))).toEqual({ status: 3, lines: [] });
  });

  it("rejects malformed payloads", () => {
    expect(() => decodeResponse(Buffer.from("bogus", "utf8"))).toThrow();
    expect(() => decodeResponse(Buffer.from("0 2\nonly", "utf8"))).toThrow();
  });
});

describe("frame reader", () => {
  it("reassembles frames across arbitrary chunk boundaries", () => {
    const frames = [encodeFrame("abc"), encodeFrame(""), encodeFrame("1 + 1")];
    const stream = Buffer.concat(frames);
    for (let cut = 1; cut < stream.length - 1; cut++) {
      const reader = new FrameReader();
      const got = [
        ...reader.push(stream.subarray(0, cut)),
        ...reader.push(stream.subarray(cut)),
      ];
      expect(got.map((b) => b.toString("utf8"))).toEqual(["abc", "", "1 + 1"]);
    }
  });
});
