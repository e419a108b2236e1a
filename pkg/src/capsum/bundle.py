"""Video bundle: the canonical JSON document that all stages read and write.

A bundle carries per-frame captions, optional annotator ground truth, the
generated text summary, and references to embedding sidecar files. Bundles
serialize canonically (sorted keys, 2-space indent, UTF-8 kept literal,
trailing newline) so that load followed by save is byte-identical.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Any, Optional

from .errors import ParseError, SchemaError

SCHEMA_VERSION = 1


@dataclass
class Caption:
    """One downsampled frame's caption."""

    frame_index: int
    time_sec: float
    text: str


@dataclass
class Annotations:
    """Per-annotator frame-level importance at original frame rate."""

    n_frames_original: int
    scores: list[list[float]]


@dataclass
class Bundle:
    video_id: str
    fps: float
    n_frames_original: int
    captions: list[Caption]
    title: Optional[str] = None
    genre: Optional[str] = None
    query: Optional[str] = None
    summary_text: Optional[str] = None
    embeddings_ref: Optional[str] = None
    summary_embedding_ref: Optional[str] = None
    visual_features_ref: Optional[str] = None
    annotations: Optional[Annotations] = None
    extra: dict = field(default_factory=dict)

    @property
    def n_frames(self) -> int:
        return len(self.captions)

    def caption_texts(self) -> list[str]:
        return [c.text for c in self.captions]


def _require(mapping: dict, key: str, kind, ctx: str):
    if key not in mapping:
        raise SchemaError(f"{ctx}: missing required field {key!r}")
    value = mapping[key]
    if kind is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise SchemaError(f"{ctx}: field {key!r} must be a number")
        return float(value)
    if not isinstance(value, kind) or isinstance(value, bool) and kind is int:
        raise SchemaError(f"{ctx}: field {key!r} must be {kind.__name__}")
    return value


def _opt_str(mapping: dict, key: str, ctx: str) -> Optional[str]:
    value = mapping.get(key)
    if value is None:
        return None
    if not isinstance(value, str):
        raise SchemaError(f"{ctx}: field {key!r} must be a string or null")
    return value


def bundle_from_dict(doc: dict) -> Bundle:
    if not isinstance(doc, dict):
        raise SchemaError("bundle document must be a JSON object")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {version!r}")

    ctx = "bundle"
    video_id = _require(doc, "video_id", str, ctx)
    fps = _require(doc, "fps", float, ctx)
    if fps <= 0:
        raise SchemaError(f"{ctx}: fps must be positive, got {fps}")
    n_orig = _require(doc, "n_frames_original", int, ctx)
    if n_orig < 1:
        raise SchemaError(f"{ctx}: n_frames_original must be >= 1, got {n_orig}")

    raw_captions = _require(doc, "captions", list, ctx)
    if not raw_captions:
        raise SchemaError(f"{ctx}: captions must be non-empty")
    captions = []
    prev_index = -1
    for pos, item in enumerate(raw_captions):
        cctx = f"captions[{pos}]"
        if not isinstance(item, dict):
            raise SchemaError(f"{cctx}: must be an object")
        frame_index = _require(item, "frame_index", int, cctx)
        time_sec = _require(item, "time_sec", float, cctx)
        text = _require(item, "text", str, cctx)
        if frame_index <= prev_index:
            raise SchemaError(f"{cctx}: frame_index must be strictly increasing")
        if frame_index >= n_orig:
            raise SchemaError(
                f"{cctx}: frame_index {frame_index} out of range for {n_orig} frames"
            )
        prev_index = frame_index
        captions.append(Caption(frame_index=frame_index, time_sec=time_sec, text=text))

    annotations = None
    raw_ann = doc.get("annotations")
    if raw_ann is not None:
        actx = "annotations"
        if not isinstance(raw_ann, dict):
            raise SchemaError(f"{actx}: must be an object")
        ann_n = _require(raw_ann, "n_frames_original", int, actx)
        if ann_n != n_orig:
            raise SchemaError(
                f"{actx}: n_frames_original {ann_n} disagrees with bundle value {n_orig}"
            )
        raw_scores = _require(raw_ann, "scores", list, actx)
        if not raw_scores:
            raise SchemaError(f"{actx}: scores must hold at least one annotator")
        scores = []
        for a, row in enumerate(raw_scores):
            rctx = f"{actx}.scores[{a}]"
            if not isinstance(row, list):
                raise SchemaError(f"{rctx}: must be a list")
            if len(row) != n_orig:
                raise SchemaError(
                    f"{rctx}: length {len(row)} disagrees with n_frames_original {n_orig}"
                )
            out_row = []
            for j, v in enumerate(row):
                if not isinstance(v, (int, float)) or isinstance(v, bool):
                    raise SchemaError(f"{rctx}[{j}]: must be a number")
                out_row.append(float(v))
            scores.append(out_row)
        annotations = Annotations(n_frames_original=ann_n, scores=scores)

    extra = doc.get("extra", {})
    if not isinstance(extra, dict):
        raise SchemaError("bundle: field 'extra' must be an object")

    return Bundle(
        video_id=video_id,
        fps=fps,
        n_frames_original=n_orig,
        captions=captions,
        title=_opt_str(doc, "title", ctx),
        genre=_opt_str(doc, "genre", ctx),
        query=_opt_str(doc, "query", ctx),
        summary_text=_opt_str(doc, "summary_text", ctx),
        embeddings_ref=_opt_str(doc, "embeddings_ref", ctx),
        summary_embedding_ref=_opt_str(doc, "summary_embedding_ref", ctx),
        visual_features_ref=_opt_str(doc, "visual_features_ref", ctx),
        annotations=annotations,
        extra=dict(extra),
    )


def bundle_to_dict(bundle: Bundle) -> dict:
    doc: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "video_id": bundle.video_id,
        "fps": bundle.fps,
        "n_frames_original": bundle.n_frames_original,
        "captions": [
            {"frame_index": c.frame_index, "time_sec": c.time_sec, "text": c.text}
            for c in bundle.captions
        ],
        "title": bundle.title,
        "genre": bundle.genre,
        "query": bundle.query,
        "summary_text": bundle.summary_text,
        "embeddings_ref": bundle.embeddings_ref,
        "summary_embedding_ref": bundle.summary_embedding_ref,
        "visual_features_ref": bundle.visual_features_ref,
        "annotations": None
        if bundle.annotations is None
        else {
            "n_frames_original": bundle.annotations.n_frames_original,
            "scores": bundle.annotations.scores,
        },
        "extra": bundle.extra,
    }
    return doc


def dumps_canonical(doc: dict) -> str:
    """Canonical JSON text: sorted keys, indent 2, literal UTF-8, newline."""
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def save_bundle(bundle: Bundle, path: str | os.PathLike) -> None:
    text = dumps_canonical(bundle_to_dict(bundle))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def load_bundle(path: str | os.PathLike) -> Bundle:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read bundle {path}: {exc}") from exc
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from exc
    return bundle_from_dict(doc)
