/**
 * Independent parser for the canonical wire grammar (subset).
 *
 * Covered: integers (bigint), rationals, reals, booleans, null, quoted
 * text, bracket lists, `poly(ring,expr)` as a term list, and
 * `ideal(ring,[exprs])` as a list of polynomials.  Any other tag falls
 * through to a generic node with generically parsed arguments.
 *
 * This is a clean-room implementation of the grammar: it shares no code
 * with the primary, only the published EBNF and the golden corpus.
 */

// ---------------------------------------------------------------------------
// value model

export type Rat = { num: bigint; den: bigint };

export type Ring = {
  field: "QQ" | "ZZ" | { zp: bigint };
  vars: string[];
  order: "lex" | "grlex" | "grevlex";
};

export type Term = { coeff: Rat; exps: number[] };

export type ThinValue =
  | { t: "int"; v: bigint }
  | { t: "rat"; v: Rat }
  | { t: "real"; v: number }
  | { t: "bool"; v: boolean }
  | { t: "text"; v: string }
  | { t: "null" }
  | { t: "list"; items: ThinValue[] }
  | { t: "ring"; ring: Ring }
  | { t: "poly"; ring: Ring; terms: Term[] }
  | { t: "ideal"; ring: Ring; gens: { ring: Ring; terms: Term[] }[] }
  | { t: "node"; tag: string; args: ThinValue[] };

// ---------------------------------------------------------------------------
// rational arithmetic on bigint

function gcd(a: bigint, b: bigint): bigint {
  a = a < 0n ? -a : a;
  b = b < 0n ? -b : b;
  while (b) [a, b] = [b, a % b];
  return a;
}

export function rat(num: bigint, den: bigint = 1n): Rat {
  if (den === 0n) throw new Error("zero denominator");
  if (den < 0n) {
    num = -num;
    den = -den;
  }
  const g = gcd(num, den) || 1n;
  return { num: num / g, den: den / g };
}

const ratAdd = (a: Rat, b: Rat) => rat(a.num * b.den + b.num * a.den, a.den * b.den);
const ratMul = (a: Rat, b: Rat) => rat(a.num * b.num, a.den * b.den);
const ratNeg = (a: Rat) => ({ num: -a.num, den: a.den });
const ratIsZero = (a: Rat) => a.num === 0n;

function modNormalize(a: Rat, p: bigint): Rat {
  // Zp coefficients live as representatives 0..p-1 with denominator 1
  let num = a.num % p;
  if (num < 0n) num += p;
  if (a.den !== 1n) {
    let den = a.den % p;
    if (den < 0n) den += p;
    num = (num * modInverse(den, p)) % p;
  }
  return { num, den: 1n };
}

function modInverse(a: bigint, p: bigint): bigint {
  let [old_r, r] = [a % p, p];
  let [old_s, s] = [1n, 0n];
  while (r !== 0n) {
    const q = old_r / r;
    [old_r, r] = [r, old_r - q * r];
    [old_s, s] = [s, old_s - q * s];
  }
  if (old_r !== 1n && old_r !== -1n) throw new Error("not invertible");
  let inv = old_s % p;
  if (old_r === -1n) inv = -inv;
  if (inv < 0n) inv += p;
  return inv;
}

// ---------------------------------------------------------------------------
// polynomials as coefficient maps keyed by exponent vector

type PolyMap = Map<string, Rat>;

function polyNormalize(m: PolyMap, ring: Ring): PolyMap {
  const p = typeof ring.field === "object" ? ring.field.zp : null;
  const out: PolyMap = new Map();
  for (const [key, c] of m) {
    const coeff = p === null ? c : modNormalize(c, p);
    if (!ratIsZero(coeff)) out.set(key, coeff);
  }
  return out;
}

const keyOf = (exps: number[]) => exps.join(",");
const expsOf = (key: string, n: number) =>
  key === "" ? new Array(n).fill(0) : key.split(",").map(Number);

function polyConst(c: Rat, ring: Ring): PolyMap {
  const m: PolyMap = new Map();
  m.set(keyOf(new Array(ring.vars.length).fill(0)), c);
  return polyNormalize(m, ring);
}

function polyVar(name: string, ring: Ring): PolyMap {
  const i = ring.vars.indexOf(name);
  if (i < 0) throw new Error(`unknown identifier ${name}`);
  const exps = new Array(ring.vars.length).fill(0);
  exps[i] = 1;
  const m: PolyMap = new Map();
  m.set(keyOf(exps), rat(1n));
  return m;
}

function polyAdd(a: PolyMap, b: PolyMap, ring: Ring): PolyMap {
  const out = new Map(a);
  for (const [key, c] of b) {
    const existing = out.get(key);
    out.set(key, existing ? ratAdd(existing, c) : c);
  }
  return polyNormalize(out, ring);
}

function polyNeg(a: PolyMap): PolyMap {
  const out: PolyMap = new Map();
  for (const [key, c] of a) out.set(key, ratNeg(c));
  return out;
}

function polyMul(a: PolyMap, b: PolyMap, ring: Ring): PolyMap {
  const n = ring.vars.length;
  const out: PolyMap = new Map();
  for (const [ka, ca] of a) {
    const ea = expsOf(ka, n);
    for (const [kb, cb] of b) {
      const eb = expsOf(kb, n);
      const key = keyOf(ea.map((e, i) => e + eb[i]));
      const product = ratMul(ca, cb);
      const existing = out.get(key);
      out.set(key, existing ? ratAdd(existing, product) : product);
    }
  }
  return polyNormalize(out, ring);
}

function polyPow(a: PolyMap, k: number, ring: Ring): PolyMap {
  let out = polyConst(rat(1n), ring);
  for (let i = 0; i < k; i++) out = polyMul(out, a, ring);
  return out;
}

export function compareMonomials(order: Ring["order"], a: number[], b: number[]): number {
  const total = (m: number[]) => m.reduce((x, y) => x + y, 0);
  if (order !== "lex") {
    const d = total(a) - total(b);
    if (d !== 0) return d > 0 ? 1 : -1;
  }
  if (order === "grevlex") {
    for (let i = a.length - 1; i >= 0; i--) {
      if (a[i] !== b[i]) return a[i] < b[i] ? 1 : -1;
    }
    return 0;
  }
  for (let i = 0; i < a.length; i++) {
    if (a[i] !== b[i]) return a[i] > b[i] ? 1 : -1;
  }
  return 0;
}

function polyTerms(m: PolyMap, ring: Ring): Term[] {
  const n = ring.vars.length;
  const terms = [...m.entries()].map(([key, coeff]) => ({
    coeff,
    exps: expsOf(key, n),
  }));
  terms.sort((x, y) => compareMonomials(ring.order, y.exps, x.exps));
  return terms;
}

// ---------------------------------------------------------------------------
// tokenizer

type Token =
  | { kind: "num"; text: string; real: boolean; pos: number }
  | { kind: "name"; text: string; pos: number }
  | { kind: "str"; value: string; pos: number }
  | { kind: "punct"; text: string; pos: number };

function tokenize(source: string): Token[] {
  const tokens: Token[] = [];
  let i = 0;
  const n = source.length;
  while (i < n) {
    const c = source[i];
    if (c === " " || c === "\t" || c === "\r" || c === "\n") {
      i++;
      continue;
    }
    if ("()[],+-*/^".includes(c)) {
      tokens.push({ kind: "punct", text: c, pos: i });
      i++;
      continue;
    }
    if (c >= "0" && c <= "9") {
      const start = i;
      let real = false;
      while (i < n && source[i] >= "0" && source[i] <= "9") i++;
      if (source[i] === "." && source[i + 1] >= "0" && source[i + 1] <= "9") {
        real = true;
        i++;
        while (i < n && source[i] >= "0" && source[i] <= "9") i++;
      }
      if (source[i] === "e" || source[i] === "E") {
        let j = i + 1;
        if (source[j] === "+" || source[j] === "-") j++;
        if (source[j] >= "0" && source[j] <= "9") {
          real = true;
          i = j;
          while (i < n && source[i] >= "0" && source[i] <= "9") i++;
        }
      }
      tokens.push({ kind: "num", text: source.slice(start, i), real, pos: start });
      continue;
    }
    if (/[A-Za-z_]/.test(c)) {
      const start = i;
      while (i < n && /[A-Za-z0-9_]/.test(source[i])) i++;
      tokens.push({ kind: "name", text: source.slice(start, i), pos: start });
      continue;
    }
    if (c === '"') {
      const start = i;
      i++;
      let out = "";
      for (;;) {
        if (i >= n) throw new Error(`unterminated text at ${start}`);
        const ch = source[i];
        if (ch === '"') {
          i++;
          break;
        }
        if (ch === "\\") {
          const next = source[i + 1];
          if (next === '"') out += '"';
          else if (next === "\\") out += "\\";
          else if (next === "n") out += "\n";
          else throw new Error(`bad escape at ${i}`);
          i += 2;
        } else {
          out += ch;
          i++;
        }
      }
      tokens.push({ kind: "str", value: out, pos: start });
      continue;
    }
    throw new Error(`unexpected character ${JSON.stringify(c)} at ${i}`);
  }
  return tokens;
}

// ---------------------------------------------------------------------------
// recursive-descent parser

class Parser {
  private i = 0;

  constructor(private tokens: Token[]) {}

  peek(): Token | undefined {
    return this.tokens[this.i];
  }

  next(expected?: string): Token {
    const tok = this.tokens[this.i];
    if (!tok) throw new Error(`unexpected end of input${expected ? `, expected ${expected}` : ""}`);
    this.i += 1;
    return tok;
  }

  expectPunct(text: string): void {
    const tok = this.next(`'${text}'`);
    if (tok.kind !== "punct" || tok.text !== text) {
      throw new Error(`expected '${text}' at ${tok.pos}`);
    }
  }

  atEnd(): boolean {
    return this.i >= this.tokens.length;
  }

  parseValue(): ThinValue {
    const tok = this.next("a value");
    if (tok.kind === "num") {
      if (tok.real) return { t: "real", v: Number(tok.text) };
      return this.maybeRational(BigInt(tok.text));
    }
    if (tok.kind === "punct" && tok.text === "-") {
      const inner = this.parseValue();
      if (inner.t === "int") return { t: "int", v: -inner.v };
      if (inner.t === "rat") return { t: "rat", v: ratNeg(inner.v) };
      if (inner.t === "real") return { t: "real", v: -inner.v };
      throw new Error(`minus sign on a non-number at ${tok.pos}`);
    }
    if (tok.kind === "str") return { t: "text", v: tok.value };
    if (tok.kind === "punct" && tok.text === "[") {
      this.i -= 1;
      return { t: "list", items: this.parseBracketList(() => this.parseValue()) };
    }
    if (tok.kind === "name") {
      const nxt = this.peek();
      if (nxt && nxt.kind === "punct" && nxt.text === "(") {
        this.i += 1;
        return this.parseCall(tok.text);
      }
      if (tok.text === "true") return { t: "bool", v: true };
      if (tok.text === "false") return { t: "bool", v: false };
      if (tok.text === "null") return { t: "null" };
      throw new Error(`bare name ${tok.text} at ${tok.pos}`);
    }
    throw new Error(`unexpected token at ${tok.pos}`);
  }

  private maybeRational(num: bigint): ThinValue {
    const nxt = this.peek();
    if (nxt && nxt.kind === "punct" && nxt.text === "/") {
      this.i += 1;
      const denTok = this.next("denominator");
      if (denTok.kind !== "num" || denTok.real) {
        throw new Error(`bad denominator at ${denTok.pos}`);
      }
      const value = rat(num, BigInt(denTok.text));
      return value.den === 1n ? { t: "int", v: value.num } : { t: "rat", v: value };
    }
    return { t: "int", v: num };
  }

  private parseBracketList<T>(item: () => T): T[] {
    this.expectPunct("[");
    const items: T[] = [];
    const first = this.peek();
    if (first && first.kind === "punct" && first.text === "]") {
      this.i += 1;
      return items;
    }
    for (;;) {
      items.push(item());
      const tok = this.next("',' or ']'");
      if (tok.kind === "punct" && tok.text === "]") return items;
      if (!(tok.kind === "punct" && tok.text === ",")) {
        throw new Error(`expected ',' or ']' at ${tok.pos}`);
      }
    }
  }

  private parseCall(tag: string): ThinValue {
    if (tag === "ring") {
      const ring = this.finishRing();
      return { t: "ring", ring };
    }
    if (tag === "poly") {
      const ring = this.parseRingArg();
      this.expectPunct(",");
      const terms = polyTerms(this.parseExpr(ring), ring);
      this.expectPunct(")");
      return { t: "poly", ring, terms };
    }
    if (tag === "ideal") {
      const ring = this.parseRingArg();
      this.expectPunct(",");
      const gens = this.parseBracketList(() => ({
        ring,
        terms: polyTerms(this.parseExpr(ring), ring),
      }));
      this.expectPunct(")");
      return { t: "ideal", ring, gens };
    }
    // unknown tags: generic node over generically parsed arguments
    const args: ThinValue[] = [];
    const first = this.peek();
    if (first && first.kind === "punct" && first.text === ")") {
      this.i += 1;
      return { t: "node", tag, args };
    }
    for (;;) {
      args.push(this.parseValue());
      const tok = this.next("',' or ')'");
      if (tok.kind === "punct" && tok.text === ")") return { t: "node", tag, args };
      if (!(tok.kind === "punct" && tok.text === ",")) {
        throw new Error(`expected ',' or ')' at ${tok.pos}`);
      }
    }
  }

  private parseRingArg(): Ring {
    const tok = this.next("ring(...)");
    if (tok.kind !== "name" || tok.text !== "ring") {
      throw new Error(`expected a ring at ${tok.pos}`);
    }
    this.expectPunct("(");
    return this.finishRing();
  }

  /** Arguments of ring(FIELD,[vars],ORDER), opening paren already consumed. */
  private finishRing(): Ring {
    const fieldTok = this.next("field tag");
    if (fieldTok.kind !== "name") throw new Error(`bad field tag at ${fieldTok.pos}`);
    let field: Ring["field"];
    if (fieldTok.text === "QQ") field = "QQ";
    else if (fieldTok.text === "ZZ") field = "ZZ";
    else if (fieldTok.text === "Zp") {
      this.expectPunct("(");
      const p = this.next("modulus");
      if (p.kind !== "num" || p.real) throw new Error(`bad modulus at ${p.pos}`);
      this.expectPunct(")");
      field = { zp: BigInt(p.text) };
    } else {
      throw new Error(`unknown field tag ${fieldTok.text}`);
    }
    this.expectPunct(",");
    const vars = this.parseBracketList(() => {
      const v = this.next("variable name");
      if (v.kind !== "name") throw new Error(`bad variable at ${v.pos}`);
      return v.text;
    });
    this.expectPunct(",");
    const orderTok = this.next("order tag");
    if (
      orderTok.kind !== "name" ||
      (orderTok.text !== "lex" && orderTok.text !== "grlex" && orderTok.text !== "grevlex")
    ) {
      throw new Error(`bad order tag at ${orderTok.pos}`);
    }
    this.expectPunct(")");
    return { field, vars, order: orderTok.text };
  }

  // polynomial expression grammar: + - * ^ parentheses, rational literals
  private parseExpr(ring: Ring): PolyMap {
    let sign = 1n;
    const first = this.peek();
    if (first && first.kind === "punct" && (first.text === "-" || first.text === "+")) {
      this.i += 1;
      if (first.text === "-") sign = -1n;
    }
    let acc = this.parseTerm(ring);
    if (sign === -1n) acc = polyNeg(acc);
    for (;;) {
      const tok = this.peek();
      if (tok && tok.kind === "punct" && (tok.text === "+" || tok.text === "-")) {
        this.i += 1;
        const rhs = this.parseTerm(ring);
        acc = polyAdd(acc, tok.text === "+" ? rhs : polyNeg(rhs), ring);
      } else {
        return acc;
      }
    }
  }

  private parseTerm(ring: Ring): PolyMap {
    let acc = this.parseFactor(ring);
    for (;;) {
      const tok = this.peek();
      if (tok && tok.kind === "punct" && tok.text === "*") {
        this.i += 1;
        acc = polyMul(acc, this.parseFactor(ring), ring);
      } else {
        return acc;
      }
    }
  }

  private parseFactor(ring: Ring): PolyMap {
    const base = this.parseBase(ring);
    const tok = this.peek();
    if (tok && tok.kind === "punct" && tok.text === "^") {
      this.i += 1;
      const exp = this.next("exponent");
      if (exp.kind !== "num" || exp.real) throw new Error(`bad exponent at ${exp.pos}`);
      return polyPow(base, Number(exp.text), ring);
    }
    return base;
  }

  private parseBase(ring: Ring): PolyMap {
    const tok = this.next("a polynomial factor");
    if (tok.kind === "num") {
      if (tok.real) throw new Error(`real literal in exact ring at ${tok.pos}`);
      let value = rat(BigInt(tok.text));
      const nxt = this.peek();
      if (nxt && nxt.kind === "punct" && nxt.text === "/") {
        this.i += 1;
        const den = this.next("denominator");
        if (den.kind !== "num" || den.real) throw new Error(`bad denominator at ${den.pos}`);
        value = rat(value.num, BigInt(den.text));
      }
      return polyConst(value, ring);
    }
    if (tok.kind === "name") return polyVar(tok.text, ring);
    if (tok.kind === "punct" && tok.text === "(") {
      const inner = this.parseExpr(ring);
      this.expectPunct(")");
      return inner;
    }
    if (tok.kind === "punct" && tok.text === "-") {
      return polyNeg(this.parseBase(ring));
    }
    throw new Error(`unexpected token at ${tok.pos}`);
  }
}

export function parseValue(source: string): ThinValue {
  const parser = new Parser(tokenize(source));
  const value = parser.parseValue();
  if (!parser.atEnd()) throw new Error("trailing input");
  return value;
}

// ---------------------------------------------------------------------------
// structural dump matching the primary's JSON shape

type Plain = unknown;

function ringPlain(ring: Ring): Plain {
  const field = typeof ring.field === "object" ? `Zp:${ring.field.zp}` : ring.field;
  return { t: "ring", field, vars: ring.vars, order: ring.order };
}

function coeffPlain(c: Rat): Plain {
  if (c.den === 1n) return { t: "int", v: c.num.toString() };
  return { t: "rat", num: c.num.toString(), den: c.den.toString() };
}

function polyPlain(ring: Ring, terms: Term[]): Plain {
  return {
    t: "poly",
    ring: ringPlain(ring),
    terms: terms.map((term) => [coeffPlain(term.coeff), term.exps]),
  };
}

export function toPlain(value: ThinValue): Plain {
  switch (value.t) {
    case "int":
      return { t: "int", v: value.v.toString() };
    case "rat":
      return { t: "rat", num: value.v.num.toString(), den: value.v.den.toString() };
    case "real":
      return { t: "real", v: value.v };
    case "bool":
      return { t: "bool", v: value.v };
    case "text":
      return { t: "text", v: value.v };
    case "null":
      return { t: "null" };
    case "list":
      return { t: "list", items: value.items.map(toPlain) };
    case "ring":
      return ringPlain(value.ring);
    case "poly":
      return polyPlain(value.ring, value.terms);
    case "ideal":
      return {
        t: "ideal",
        ring: ringPlain(value.ring),
        gens: value.gens.map((g) => polyPlain(g.ring, g.terms)),
      };
    case "node":
      return { t: "node", tag: value.tag, args: value.args.map(toPlain) };
  }
}
