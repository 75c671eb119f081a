"""The checked-in golden corpus stays in sync with the primary parser."""

import json
import pathlib

from microcas.session import encode_frame
from microcas.wirefmt import parse, serialize, value_to_plain

GOLDEN = pathlib.Path(__file__).resolve().parent.parent / "golden"


def test_corpus_round_trips_and_matches_dumps():
    lines = (GOLDEN / "corpus.txt").read_text(encoding="utf-8").splitlines()
    dumps = json.loads((GOLDEN / "corpus.json").read_text(encoding="utf-8"))
    assert len(lines) == 50
    assert len(dumps) == 50
    for line, dump in zip(lines, dumps):
        value = parse(line)
        assert serialize(value) == line
        assert value_to_plain(value) == dump


def test_frame_fixtures_match_encoder():
    fixtures = json.loads((GOLDEN / "frames.json").read_text(encoding="utf-8"))
    assert fixtures
    for fixture in fixtures:
        assert encode_frame(fixture["source"].encode("utf-8")).hex() == fixture["hex"]
