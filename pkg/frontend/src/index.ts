export { encodeFrame, decodeResponse, FrameReader, SHUTDOWN_FRAME } from "./framing.js";
export type { Response } from "./framing.js";
export { ThinClient, RemoteError } from "./client.js";
export { parseValue, toPlain, compareMonomials, rat } from "./values.js";
export type { ThinValue, Ring, Term, Rat } from "./values.js";
