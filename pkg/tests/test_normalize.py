import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from posedtw.errors import DegenerateShoulders
from posedtw.keypoints import LSHOULDER, LWRIST, NECK, RSHOULDER, PoseFrame, RawSequence
from posedtw.normalize import normalize_frame, normalize_sequence

from conftest import make_raw


def frame_from(points):
    arr = np.zeros((18, 3))
    arr[:, :2] = 200.0
    arr[:, 2] = 1.0
    for k, xy in points.items():
        arr[k, :2] = xy
    return PoseFrame.from_array(arr)


def test_hand_computed_wrist():
    f = frame_from({NECK: (320, 100), RSHOULDER: (300, 110), LSHOULDER: (340, 110), LWRIST: (360, 100)})
    out = normalize_frame(f).coords
    assert tuple(out[LWRIST]) == (1.0, 0.0)
    assert tuple(out[NECK]) == (0.0, 0.0)


def test_already_normalized_is_unchanged():
    rng = np.random.default_rng(0)
    arr = np.ones((18, 3))
    arr[:, :2] = rng.normal(size=(18, 2))
    arr[NECK, :2] = 0.0
    arr[RSHOULDER, :2] = (-0.5, 0.0)
    arr[LSHOULDER, :2] = (0.5, 0.0)
    out = normalize_frame(PoseFrame.from_array(arr)).coords
    np.testing.assert_allclose(out, arr[:, :2], atol=1e-15)


def test_coincident_shoulders():
    f = frame_from({NECK: (320, 100), RSHOULDER: (300, 110), LSHOULDER: (300, 110)})
    with pytest.raises(DegenerateShoulders):
        normalize_frame(f)


def test_sequence_error_names_frame():
    arr = make_raw(10).to_array()
    arr[6, LSHOULDER, :2] = arr[6, RSHOULDER, :2]
    with pytest.raises(DegenerateShoulders, match="frame 6") as info:
        normalize_sequence(RawSequence.from_array(arr))
    assert info.value.frame_index == 6


@given(
    seed=st.integers(0, 2**16),
    scale=st.floats(0.1, 10),
    tx=st.floats(-500, 500),
    ty=st.floats(-500, 500),
)
def test_translation_scale_invariance(seed, scale, tx, ty):
    raw = make_raw(12, seed=seed, noise=3.0).to_array()
    moved = raw.copy()
    moved[:, :, :2] = scale * raw[:, :, :2] + (tx, ty)
    a = normalize_sequence(RawSequence.from_array(raw)).coords
    b = normalize_sequence(RawSequence.from_array(moved)).coords
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-9)
    assert np.all(b[:, NECK] == 0.0)
    widths = np.linalg.norm(b[:, LSHOULDER] - b[:, RSHOULDER], axis=1)
    np.testing.assert_allclose(widths, 1.0, rtol=0, atol=1e-9)


def test_not_rotation_invariant():
    raw = make_raw(5, seed=1).to_array()
    rot = raw.copy()
    rot[:, :, 0], rot[:, :, 1] = raw[:, :, 1], 1000.0 - raw[:, :, 0]
    a = normalize_sequence(RawSequence.from_array(raw)).coords
    b = normalize_sequence(RawSequence.from_array(rot)).coords
    assert not np.allclose(a, b)


def test_per_frame_scale():
    raw = make_raw(4, noise=0.0).to_array()
    raw[2, :, :2] = 2.0 * (raw[2, :, :2] - raw[2, NECK, :2]) + raw[2, NECK, :2]
    out = normalize_sequence(RawSequence.from_array(raw)).coords
    np.testing.assert_allclose(out[2], out[0], atol=1e-12)
