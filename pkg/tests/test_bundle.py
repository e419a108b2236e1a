"""Bundle schema validation and canonical JSON round-trips."""

import json

import pytest

from capsum.bundle import (
    Bundle,
    Caption,
    bundle_from_dict,
    bundle_to_dict,
    dumps_canonical,
    load_bundle,
    save_bundle,
)
from capsum.errors import ParseError, SchemaError


def minimal_dict():
    return {
        "schema_version": 1,
        "video_id": "clip",
        "fps": 2.0,
        "n_frames_original": 30,
        "captions": [
            {"frame_index": 0, "time_sec": 0.0, "text": "a dog"},
            {"frame_index": 1, "time_sec": 0.5, "text": "a cat"},
        ],
    }


def test_round_trip_minimal():
    bundle = bundle_from_dict(minimal_dict())
    assert bundle.video_id == "clip"
    assert bundle.n_frames == 2
    assert bundle.caption_texts() == ["a dog", "a cat"]
    again = bundle_from_dict(bundle_to_dict(bundle))
    assert bundle_to_dict(again) == bundle_to_dict(bundle)


def test_fixture_round_trip_is_byte_identical(fixture_bundle_path, tmp_path):
    """load -> save reproduces the shipped fixture byte for byte."""
    bundle = load_bundle(fixture_bundle_path)
    out = tmp_path / "copy.json"
    save_bundle(bundle, out)
    assert out.read_bytes() == fixture_bundle_path.read_bytes()


def test_canonical_form_properties():
    text = dumps_canonical({"b": 1, "a": [1, 2]})
    assert text.endswith("\n")
    assert text.index('"a"') < text.index('"b"')
    # round trips through the standard parser
    assert json.loads(text) == {"b": 1, "a": [1, 2]}


def test_canonical_form_keeps_unicode():
    text = dumps_canonical({"t": "café"})
    assert "café" in text
    assert "\\u" not in text


def test_missing_required_key():
    doc = minimal_dict()
    del doc["video_id"]
    with pytest.raises(SchemaError):
        bundle_from_dict(doc)


def test_unknown_schema_version():
    doc = minimal_dict()
    doc["schema_version"] = 99
    with pytest.raises(SchemaError):
        bundle_from_dict(doc)


def test_caption_indices_must_strictly_increase():
    doc = minimal_dict()
    doc["captions"][1]["frame_index"] = 0
    with pytest.raises(SchemaError):
        bundle_from_dict(doc)


def test_empty_caption_list_rejected():
    doc = minimal_dict()
    doc["captions"] = []
    with pytest.raises(SchemaError):
        bundle_from_dict(doc)


def test_nonpositive_fps_rejected():
    doc = minimal_dict()
    doc["fps"] = 0.0
    with pytest.raises(SchemaError):
        bundle_from_dict(doc)


def test_annotation_length_must_match_n_frames_original():
    doc = minimal_dict()
    doc["annotations"] = {"n_frames_original": 30, "scores": [[0.5] * 29]}
    with pytest.raises(SchemaError):
        bundle_from_dict(doc)


def test_annotations_parse():
    doc = minimal_dict()
    doc["annotations"] = {"n_frames_original": 30, "scores": [[0.5] * 30, [0.25] * 30]}
    bundle = bundle_from_dict(doc)
    assert bundle.annotations is not None
    assert len(bundle.annotations.scores) == 2


def test_load_missing_file(tmp_path):
    with pytest.raises(ParseError):
        load_bundle(tmp_path / "absent.json")


def test_load_malformed_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(ParseError):
        load_bundle(path)


def test_load_non_object(tmp_path):
    path = tmp_path / "arr.json"
    path.write_text("[1, 2, 3]\n", encoding="utf-8")
    with pytest.raises(SchemaError):
        load_bundle(path)


def test_extra_field_preserved(tmp_path):
    doc = minimal_dict()
    doc["extra"] = {"source": "unit test"}
    bundle = bundle_from_dict(doc)
    out = bundle_to_dict(bundle)
    assert out["extra"] == {"source": "unit test"}


def test_optional_fields_default_to_none():
    bundle = bundle_from_dict(minimal_dict())
    assert bundle.title is None
    assert bundle.summary_text is None
    assert bundle.embeddings_ref is None
    assert bundle.annotations is None


def test_caption_dataclass_fields():
    cap = Caption(frame_index=3, time_sec=1.5, text="a boat")
    assert (cap.frame_index, cap.time_sec, cap.text) == (3, 1.5, "a boat")


def test_bundle_n_frames_counts_captions():
    bundle = bundle_from_dict(minimal_dict())
    assert isinstance(bundle, Bundle)
    assert bundle.n_frames == len(bundle.captions)
