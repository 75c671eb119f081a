#!/usr/bin/env python3
"""Regenerate the golden corpus under golden/.

corpus.txt holds one canonical wire text per line; corpus.json the
structural dump of each line as produced by the primary parser.
frames.json pins the exact frame bytes a client sends for sample
sources.  Secondary-language clients must reproduce both.
"""

import json
import pathlib
import random
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from microcas.ideals import ideal_new  # noqa: E402
from microcas.poly import poly_parse_text, ring_new  # noqa: E402
from microcas.session import encode_frame  # noqa: E402
from microcas.wirefmt import parse, serialize, value_to_plain  # noqa: E402

from fractions import Fraction  # noqa: E402

GOLDEN = pathlib.Path(__file__).resolve().parent.parent / "golden"

QX = ring_new(["x"], "QQ")
QXY = ring_new(["x", "y"], "QQ", "lex")
TXYZ = ring_new(["t", "x", "y", "z"], "QQ", "grevlex")
ZP7 = ring_new(["a", "b"], ("Zp", 7), "grlex")
ZP32003 = ring_new(["x"], ("Zp", 32003))


def p(src, ring):
    return poly_parse_text(src, ring)


def handpicked():
    values = [
        0,
        2,
        -3,
        1,
        2 ** 70,
        -(10 ** 25),
        Fraction(3, 4),
        Fraction(-7, 2),
        Fraction(123456789, 987654321),
        1.2,
        -0.5,
        2.1213203435596424,
        1e-08,
        1.5e21,
        -3.25e-12,
        0.0,
        True,
        False,
        "",
        "hello",
        'quote " backslash \\ newline \n done',
        "unicode: αβγ",
        [],
        [1, 2, 3],
        [True, "x", Fraction(1, 2)],
        [[1], [2.5, "deep"], []],
        p("0", QX),
        p("x", QX),
        p("x^2-1", QX),
        p("(x-1) x (x+1)", QX),
        p("3/4 x^2 - 1/2", QX),
        p("x^3 - 2 x y + y^2 - 5", QXY),
        p("t^4 - x", TXYZ),
        p("x z + y z", TXYZ),
        p("2 z^2 - 9", TXYZ),
        p("3 a^2 b + 6 b - 1", ZP7),
        p("x^2 + 32002 x", ZP32003),
        ideal_new(QX, []),
        ideal_new(QX, [p("x^2", QX)]),
        ideal_new(QX, [p("x-1", QX), p("x+1", QX)]),
        ideal_new(TXYZ, [p("x z", TXYZ), p("y z", TXYZ)]),
        ideal_new(TXYZ, [p("t^4-x", TXYZ), p("t^3-y", TXYZ), p("t^2-z", TXYZ)]),
        ideal_new(ZP7, [p("a b - 3", ZP7)]),
        [ideal_new(QX, [p("x", QX)]), 7],
    ]
    return values


def main():
    values = handpicked()
    # top up with simple deterministic extras to reach 50 lines
    rng = random.Random(1234)
    while len(values) < 50:
        kind = rng.choice(["int", "rat", "real", "list"])
        if kind == "int":
            values.append(rng.randint(-10**9, 10**9))
        elif kind == "rat":
            values.append(Fraction(rng.randint(-99, 99), rng.randint(2, 99)))
        elif kind == "real":
            values.append(rng.uniform(-1e3, 1e3))
        else:
            values.append([rng.randint(0, 9) for _ in range(rng.randint(0, 5))])

    texts = [serialize(v) for v in values]
    dumps = []
    for text in texts:
        value = parse(text)
        assert serialize(value) == text, text
        dumps.append(value_to_plain(value))

    GOLDEN.mkdir(exist_ok=True)
    (GOLDEN / "corpus.txt").write_text("\n".join(texts) + "\n", encoding="utf-8")
    (GOLDEN / "corpus.json").write_text(
        json.dumps(dumps, indent=1, ensure_ascii=False) + "\n", encoding="utf-8")

    frame_sources = ["1 + 1", "a = 1", "a", "ls()", 'exists(["a","b"])',
                     's = "unicode αβγ"', "gb(I)"]
    frames = [{"source": s, "hex": encode_frame(s.encode("utf-8")).hex()}
              for s in frame_sources]
    (GOLDEN / "frames.json").write_text(
        json.dumps(frames, indent=1, ensure_ascii=False) + "\n", encoding="utf-8")
    print(f"wrote {len(texts)} corpus lines and {len(frames)} frame fixtures")


if __name__ == "__main__":
    main()
