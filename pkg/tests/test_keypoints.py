import json
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from posedtw.errors import (
    KeypointNeverSeen, MalformedJson, NoPersonDetected, SchemaViolation, TooShort,
)
from posedtw.keypoints import (
    LWRIST, RawSequence, load_sequence, parse_frame_file, repair_missing, serialize_frame,
)


def doc(triples, people=1):
    flat = [v for t in triples for v in t]
    return json.dumps({"version": 1.3, "people": [{"pose_keypoints_2d": flat}] * people})


def full_triples(c=1.0):
    return [(10.0 + k, 20.0 + 2 * k, c) for k in range(18)]


def write_dir(tmp_path, n, name="clip"):
    d = tmp_path / name
    d.mkdir()
    for t in range(n):
        (d / f"{t:012d}_keypoints.json").write_text(
            doc([(100.0 + t, 50.0 + k, 1.0) for k in range(18)]))
    return d


def test_parse_full_frame():
    frame = parse_frame_file(doc(full_triples()).encode())
    assert len(frame.keypoints) == 18
    assert not any(k.missing for k in frame.keypoints)
    assert frame.keypoints[3].x == 13.0 and frame.keypoints[3].y == 26.0


def test_zero_confidence_marks_missing():
    tr = full_triples()
    tr[4] = (0.0, 0.0, 0.0)
    frame = parse_frame_file(doc(tr))
    assert frame.keypoints[4].missing
    assert sum(k.missing for k in frame.keypoints) == 1


def test_body25_rejected():
    with pytest.raises(SchemaViolation):
        parse_frame_file(doc([(1.0, 1.0, 1.0)] * 25))


@pytest.mark.parametrize("text,exc", [
    ("{not json", MalformedJson),
    ('{"people": []}', NoPersonDetected),
    ('{"people": [{"pose_keypoints_2d": ' + json.dumps(["a"] * 54) + "}]}", SchemaViolation),
    ('{"frames": []}', SchemaViolation),
])
def test_parse_errors(text, exc):
    with pytest.raises(exc):
        parse_frame_file(text)


def test_multiple_people_takes_first(caplog):
    second = [(1.0, 1.0, 1.0)] * 18
    text = json.dumps({"people": [
        {"pose_keypoints_2d": [v for t in full_triples() for v in t]},
        {"pose_keypoints_2d": [v for t in second for v in t]},
    ]})
    frame = parse_frame_file(text)
    assert frame.keypoints[0].x == 10.0
    assert "2 people" in caplog.text


coord = st.floats(0, 2000, allow_nan=False)
triple = st.tuples(coord, coord, st.floats(0, 1))


@given(st.lists(triple, min_size=18, max_size=18))
def test_round_trip(triples):
    frame = parse_frame_file(doc(triples))
    assert parse_frame_file(serialize_frame(frame)) == frame


def test_load_sequence_sorted(tmp_path):
    d = write_dir(tmp_path, 44)
    seq = load_sequence(d)
    assert len(seq) == 44
    assert seq.source_id == "clip"
    assert [f.frame_index for f in seq.frames] == list(range(44))
    assert [f.keypoints[0].x for f in seq.frames] == [100.0 + t for t in range(44)]


def test_load_sequence_order_independent_of_listing(tmp_path, monkeypatch):
    d = write_dir(tmp_path, 6)
    from pathlib import Path
    original = Path.iterdir

    def shuffled(self):
        items = list(original(self))
        random.Random(1).shuffle(items)
        return iter(items)

    monkeypatch.setattr(Path, "iterdir", shuffled)
    assert [f.keypoints[0].x for f in load_sequence(d).frames] == [100.0 + t for t in range(6)]


def test_load_sequence_too_short(tmp_path):
    with pytest.raises(TooShort):
        load_sequence(write_dir(tmp_path, 1))


def test_load_sequence_no_person_names_file(tmp_path):
    d = write_dir(tmp_path, 3)
    (d / "000000000001_keypoints.json").write_text('{"people": []}')
    with pytest.raises(NoPersonDetected, match="000000000001_keypoints.json"):
        load_sequence(d)


def _seq_with(arr):
    return RawSequence.from_array(arr, "s")


def test_repair_midpoint():
    arr = np.ones((8, 18, 3))
    arr[:, :, :2] = 50.0
    arr[4, LWRIST, :2] = (10.0, 30.0)
    arr[6, LWRIST, :2] = (20.0, 40.0)
    arr[5, LWRIST] = 0.0
    out = repair_missing(_seq_with(arr)).to_array()
    assert out[5, LWRIST, 0] == 15.0
    assert out[5, LWRIST, 1] == 35.0
    assert out[5, LWRIST, 2] == 0.0


def test_repair_edges_extend_nearest():
    arr = np.ones((5, 18, 3))
    arr[:, :, :2] = 7.0
    arr[0:2, 3] = 0.0
    arr[2, 3, :2] = (11.0, 12.0)
    arr[4, 3] = 0.0
    out = repair_missing(_seq_with(arr)).to_array()
    assert out[0, 3, 0] == out[1, 3, 0] == 11.0
    assert out[4, 3, 1] == 7.0


def test_repair_identity_when_complete():
    seq = _seq_with(np.ones((4, 18, 3)))
    assert repair_missing(seq) is seq


def test_repair_never_seen():
    arr = np.ones((4, 18, 3))
    arr[:, 16] = 0.0
    with pytest.raises(KeypointNeverSeen) as info:
        repair_missing(_seq_with(arr))
    assert info.value.index == 16


@given(st.data())
def test_repair_idempotent_and_keeps_present(data):
    rng = np.random.default_rng(data.draw(st.integers(0, 10_000)))
    arr = rng.uniform(1, 600, (10, 18, 3))
    arr[:, :, 2] = 1.0
    holes = rng.random((10, 18)) < 0.3
    holes[0] = False  # every keypoint seen at least once
    arr[holes] = 0.0
    once = repair_missing(_seq_with(arr))
    twice = repair_missing(once)
    assert np.array_equal(once.to_array(), twice.to_array())
    np.testing.assert_array_equal(once.to_array()[~holes], arr[~holes])
