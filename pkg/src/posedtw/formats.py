"""On-disk formats: sequence files, template sets and corpus manifests.

Sequence file::

    {"source_id": str, "label": str | null, "fps": number | null,
     "frames": [[x0, y0, ..., x17, y17], ...]}

Template set::

    {"format_version": 1, "params": {...}, "templates": {gesture_id: <sequence>}}

Manifest::

    [{"path": str, "label": str, "subject": str, "trial": int}, ...]

Relative manifest paths resolve against the manifest's directory.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .classify import GestureTemplate, PipelineParams, TemplateSet
from .errors import FormatError
from .keypoints import N_KEYPOINTS
from .normalize import NormalizedSequence

FORMAT_VERSION = 1


def sequence_to_dict(seq: NormalizedSequence) -> dict:
    return {
        "source_id": seq.source_id,
        "label": seq.label,
        "fps": seq.fps,
        "frames": np.asarray(seq.coords).reshape(len(seq), 2 * N_KEYPOINTS).tolist(),
    }


def sequence_from_dict(d: dict) -> NormalizedSequence:
    try:
        frames = np.asarray(d["frames"], dtype=float)
        source_id = str(d.get("source_id", ""))
        label = d.get("label")
        fps = d.get("fps")
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad sequence object: {exc}") from exc
    if frames.ndim != 2 or frames.shape[1] != 2 * N_KEYPOINTS or len(frames) < 2:
        raise FormatError(f"frames must be a T x 36 array with T >= 2, got shape {frames.shape}")
    if label is not None and not isinstance(label, str):
        raise FormatError("label must be a string or null")
    return NormalizedSequence(
        frames.reshape(len(frames), N_KEYPOINTS, 2), source_id, label,
        None if fps is None else float(fps),
    )


def _read_json(path: str | Path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: {exc}") from exc


def _write_json(obj, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh)
        fh.write("\n")


def write_sequence(seq: NormalizedSequence, path: str | Path) -> None:
    _write_json(sequence_to_dict(seq), path)


def read_sequence(path: str | Path) -> NormalizedSequence:
    return sequence_from_dict(_read_json(path))


def template_set_to_dict(ts: TemplateSet) -> dict:
    templates = {}
    for gid, tpl in ts.templates.items():
        src = tpl.prepared.source
        if src is None:
            raise ValueError(f"template {gid!r} has no source sequence to serialize")
        templates[gid] = sequence_to_dict(src.with_label(gid))
    return {"format_version": FORMAT_VERSION, "params": ts.params.to_dict(), "templates": templates}


def template_set_from_dict(d: dict) -> TemplateSet:
    if not isinstance(d, dict) or d.get("format_version") != FORMAT_VERSION:
        raise FormatError(f"unsupported template-set format_version {d.get('format_version') if isinstance(d, dict) else None!r}")
    try:
        params = PipelineParams.from_dict(d["params"])
        raw = d["templates"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad template set: {exc}") from exc
    if not isinstance(raw, dict) or not raw:
        raise FormatError("template set has no templates")
    templates = {}
    for gid, obj in raw.items():
        seq = sequence_from_dict(obj).with_label(gid)
        templates[gid] = GestureTemplate(params.prepare(seq), gid)
    return TemplateSet(templates, params)


def write_template_set(ts: TemplateSet, path: str | Path) -> None:
    _write_json(template_set_to_dict(ts), path)


def read_template_set(path: str | Path) -> TemplateSet:
    return template_set_from_dict(_read_json(path))


def read_manifest(path: str | Path) -> list[dict]:
    """Manifest entries with ``path`` resolved to an absolute Path."""
    path = Path(path)
    entries = _read_json(path)
    if not isinstance(entries, list):
        raise FormatError(f"{path}: manifest must be a JSON list")
    out = []
    for k, e in enumerate(entries):
        try:
            p = Path(e["path"])
            out.append({
                "path": p if p.is_absolute() else path.parent / p,
                "label": str(e["label"]),
                "subject": str(e["subject"]),
                "trial": int(e["trial"]),
            })
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"{path}: entry {k} is invalid ({exc})") from exc
    return out


def write_manifest(entries: list[dict], path: str | Path) -> None:
    _write_json(
        [{"path": str(e["path"]), "label": e["label"], "subject": str(e["subject"]),
          "trial": int(e["trial"])} for e in entries],
        path,
    )
