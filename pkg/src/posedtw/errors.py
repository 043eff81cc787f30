"""Exception hierarchy shared by all pipeline stages."""


class GestureError(Exception):
    """Base class for every error raised by posedtw."""


class IngestError(GestureError):
    pass


class MalformedJson(IngestError):
    pass


class SchemaViolation(IngestError):
    pass


class NoPersonDetected(IngestError):
    pass


class TooShort(IngestError):
    pass


class KeypointNeverSeen(IngestError):
    def __init__(self, index: int):
        super().__init__(f"keypoint {index} is missing in every frame")
        self.index = index


class DegenerateShoulders(GestureError):
    def __init__(self, distance: float, frame_index: int | None = None):
        where = "" if frame_index is None else f" at frame {frame_index}"
        super().__init__(
            f"shoulder distance {distance:.3g} px is degenerate{where} "
            "(profile view or detection failure)"
        )
        self.distance = distance
        self.frame_index = frame_index


class EmptySeries(GestureError):
    pass


class NoDimensionsSelected(GestureError):
    pass


class EmptyCandidates(GestureError):
    pass


class ClassificationFailed(GestureError):
    """No template pairing had a single salient dimension."""


class MissingGesture(GestureError):
    def __init__(self, subject: str, gesture: str):
        super().__init__(f"subject {subject!r} has no trial of gesture {gesture!r}")
        self.subject = subject
        self.gesture = gesture


class InvalidSpec(GestureError):
    pass


class FormatError(GestureError):
    """A sequence, template-set or manifest file does not match its schema."""
