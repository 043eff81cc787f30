import numpy as np
import pytest

from posedtw.classify import PipelineParams
from posedtw.keypoints import N_KEYPOINTS, RawSequence
from posedtw.normalize import NormalizedSequence, normalize_sequence
from posedtw.synthetic import REST_POSE, GeneratorSpec, generate_synthetic_corpus


def make_raw(T=20, motion=None, seed=0, noise=0.5, source_id="seq"):
    """Pixel-space sequence of the rest pose plus optional per-keypoint motion.

    ``motion`` maps keypoint index -> (T, 2) pixel offsets.
    """
    rng = np.random.default_rng(seed)
    xy = np.repeat(REST_POSE[None], T, axis=0) + np.array([320.0, 130.0])
    for k, off in (motion or {}).items():
        xy[:, k] += off
    xy += rng.normal(0, noise, xy.shape)
    arr = np.concatenate([xy, np.ones((T, N_KEYPOINTS, 1))], axis=2)
    return RawSequence.from_array(arr, source_id)


def make_normalized(T=20, motion=None, seed=0, noise=0.5, source_id="seq", label=None):
    return normalize_sequence(make_raw(T, motion, seed, noise, source_id), label=label)


def wave(T, amp=80.0, periods=1.0, phase=0.0, axis=0):
    t = np.linspace(0, 1, T)
    off = np.zeros((T, 2))
    off[:, axis] = amp * np.sin(2 * np.pi * periods * t + phase)
    return off


@pytest.fixture
def params():
    return PipelineParams()


@pytest.fixture(scope="session")
def small_corpus():
    spec = GeneratorSpec(n_subjects=3, n_trials=2, frame_range=(24, 32))
    return generate_synthetic_corpus(spec, seed=11)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
