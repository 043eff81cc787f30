"""Template selection and one-nearest-neighbour classification."""
from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .dtw import AGGREGATES, multi_dim_distance
from .errors import ClassificationFailed, EmptyCandidates, NoDimensionsSelected
from .normalize import NormalizedSequence
from .signals import PreparedSequence, prepare, select_dimensions

logger = logging.getLogger(__name__)

REJECTED = "REJECTED"
DTW_METHODS = ("fast", "exact")


@dataclass(frozen=True)
class PipelineParams:
    median_radius: int = 3
    sigma: float = 1.0
    t_var: float = 0.10
    dtw_radius: int = 1
    reject_threshold: float | None = None
    dtw_method: str = "fast"
    aggregate: str = "sum"

    def __post_init__(self):
        if self.median_radius < 1:
            raise ValueError("median_radius must be >= 1")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.t_var < 0:
            raise ValueError("t_var must be >= 0")
        if self.dtw_radius < 0:
            raise ValueError("dtw_radius must be >= 0")
        if self.reject_threshold is not None and self.reject_threshold < 0:
            raise ValueError("reject_threshold must be >= 0")
        if self.dtw_method not in DTW_METHODS:
            raise ValueError(f"dtw_method must be one of {DTW_METHODS}")
        if self.aggregate not in AGGREGATES:
            raise ValueError(f"aggregate must be one of {AGGREGATES}")

    def replace(self, **changes) -> "PipelineParams":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: Mapping) -> "PipelineParams":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown pipeline parameters: {sorted(unknown)}")
        return cls(**d)

    def prepare(self, seq: NormalizedSequence) -> PreparedSequence:
        return prepare(seq, self.median_radius, self.sigma)


@dataclass(frozen=True)
class GestureTemplate:
    prepared: PreparedSequence
    gesture_id: str
    total_distance: float = 0.0

    def __post_init__(self):
        if not self.gesture_id:
            raise ValueError("gesture_id must be non-empty")

    @property
    def source_id(self) -> str:
        return self.prepared.source_id


@dataclass(frozen=True)
class TemplateSet:
    templates: Mapping[str, GestureTemplate]
    params: PipelineParams = field(default_factory=PipelineParams)

    def __post_init__(self):
        if not self.templates:
            raise ValueError("a template set needs at least one template")
        for gid, tpl in self.templates.items():
            if gid != tpl.gesture_id:
                raise ValueError(f"template keyed {gid!r} has gesture_id {tpl.gesture_id!r}")
        # sorted keys make iteration order independent of insertion order
        object.__setattr__(self, "templates", dict(sorted(self.templates.items())))

    def __len__(self) -> int:
        return len(self.templates)

    def __iter__(self):
        return iter(self.templates.values())


@dataclass(frozen=True)
class ClassificationOutcome:
    predicted: str
    ranking: list[tuple[str, float, int]]
    query_id: str = ""

    @property
    def rejected(self) -> bool:
        return self.predicted == REJECTED

    @property
    def best_distance(self) -> float:
        return self.ranking[0][1]

    def to_dict(self) -> dict:
        return {
            "query_id": self.query_id,
            "predicted": self.predicted,
            "ranking": [
                {"gesture_id": g, "distance": d, "dimensions_used": n}
                for g, d, n in self.ranking
            ],
        }


def pair_distance(q: PreparedSequence, t: PreparedSequence, params: PipelineParams):
    """WarpingResult of ``q`` against ``t`` over the union of their salient rows."""
    dims = select_dimensions(q, t, params.t_var)
    return multi_dim_distance(q, t, dims, params.dtw_radius, params.dtw_method,
                              params.aggregate)


def select_template(
    candidates: Iterable[PreparedSequence], params: PipelineParams | None = None,
) -> GestureTemplate:
    """Pick the candidate with the smallest total warping distance to its peers.

    Pairings with no salient row contribute nothing to a candidate's total.
    Ties go to the lexicographically smallest ``source_id``.
    """
    params = params or PipelineParams()
    cands = list(candidates)
    if not cands:
        raise EmptyCandidates("no candidates to select a template from")
    labels = {c.label for c in cands}
    if len(labels) != 1 or None in labels:
        raise ValueError(f"candidates must share one label, got {sorted(map(str, labels))}")
    n = len(cands)
    totals = [0.0] * n
    for i in range(n):
        # both directions are evaluated: FastDTW is not exactly symmetric
        for j in range(n):
            if i == j:
                continue
            try:
                totals[i] += pair_distance(cands[i], cands[j], params).aggregate
            except NoDimensionsSelected:
                pass
    best = min(range(n), key=lambda k: (totals[k], cands[k].source_id))
    chosen = cands[best]
    return GestureTemplate(chosen, chosen.label, totals[best])


def classify(query: PreparedSequence, templates: TemplateSet) -> ClassificationOutcome:
    params = templates.params
    scored = []
    for tpl in templates:
        try:
            res = pair_distance(query, tpl.prepared, params)
        except NoDimensionsSelected:
            logger.debug("%s vs %s: no salient dimension", query.source_id, tpl.gesture_id)
            continue
        scored.append((tpl.gesture_id, res.aggregate, len(res.dimensions_used)))
    if not scored:
        raise ClassificationFailed(
            f"{query.source_id or 'query'}: no dimension exceeds t_var={params.t_var} "
            "for any template"
        )
    scored.sort(key=lambda r: (r[1], r[0]))
    predicted = scored[0][0]
    if params.reject_threshold is not None and scored[0][1] > params.reject_threshold:
        predicted = REJECTED
    return ClassificationOutcome(predicted, scored, query.source_id)
