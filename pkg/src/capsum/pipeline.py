"""End-to-end orchestration over a shared output directory.

Every stage reads and writes documented artifact files in one directory
(bundle, embedding sidecars, segmentation, scores, selection, report), so
the full `run` and the individual stage commands are interchangeable: a
stage rerun on the directory reproduces the same bytes. Per-stage wall
times go to a sidecar file so reports themselves stay byte-identical
across repeat runs.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bundle import (
    Annotations,
    Bundle,
    Caption,
    dumps_canonical,
    load_bundle,
    save_bundle,
)
from .clients import (
    DEFAULT_CAPTION_PROMPT,
    FixtureCaptionClient,
    FixtureEmbeddingClient,
    FixtureLLMClient,
    FrameRef,
    HttpCaptionClient,
    HttpEmbeddingClient,
    HttpLLMClient,
    fetch_captions,
    generate_text_summary,
)
from .embfile import EmbeddingMatrix, read_embeddings, write_embeddings
from .errors import ConfigError, ParseError, SchemaError
from .evaluation import (
    correlation_vs_annotators,
    personalization_pr,
    upsample_step_hold,
)
from .kts import KernelConfig, SceneSegmentation, kts_segment
from .prompts import CHAIN_OF_DENSITY, PERSONALIZED, load_template
from .scoring import FrameScores, LossConfig, video_diversity
from .selection import knapsack_select, scene_scores, with_frame_mask
from .training import TrainConfig, TrainTrace, train_video

BUNDLE_FILE = "bundle.json"
EMB_FILE = "embeddings.emb"
SUMMARY_EMB_FILE = "summary.emb"
SEG_FILE = "segmentation.json"
SCORES_FILE = "scores.json"
TRACE_FILE = "trace.tsv"
SELECTION_FILE = "selection.json"
EVAL_FILE = "eval.json"
REPORT_FILE = "report.json"
TABLE_FILE = "report.tsv"
TIMINGS_FILE = "timings.txt"
FIGURES_DIR = "figures"


@dataclass(frozen=True)
class PipelineConfig:
    loss: LossConfig
    train: TrainConfig
    segmentation: KernelConfig
    seed: int = 7
    dim: int = 32
    fixture_mode: bool = True
    caption_prompt: str = DEFAULT_CAPTION_PROMPT
    template_id: str = CHAIN_OF_DENSITY
    user_query: Optional[str] = None
    budget_ratio: float = 0.15
    n_scenes: Optional[int] = None
    figures: bool = True
    llm_endpoint: Optional[str] = None
    caption_endpoint: Optional[str] = None
    embed_endpoint: Optional[str] = None
    max_retries: int = 3
    backoff_base: float = 0.5
    max_in_flight: int = 4


def default_config_dict() -> dict:
    return {
        "seed": 7,
        "dim": 32,
        "fixture_mode": True,
        "caption_prompt": DEFAULT_CAPTION_PROMPT,
        "template_id": CHAIN_OF_DENSITY,
        "user_query": None,
        "budget_ratio": 0.15,
        "n_scenes": None,
        "figures": True,
        "loss": {
            "mode": "pdl",
            "margin": 0.11,
            "epsilon": 0.3,
            "delta": 0.35,
            "alpha": None,
        },
        "train": {"learning_rate": 5e-5, "max_epochs": 100},
        "segmentation": {"kernel": "cosine", "max_scenes": 10, "penalty_weight": 1.0},
        "clients": {
            "llm_endpoint": None,
            "caption_endpoint": None,
            "embed_endpoint": None,
            "max_retries": 3,
            "backoff_base": 0.5,
            "max_in_flight": 4,
        },
    }


def config_from_dict(doc: dict) -> PipelineConfig:
    """Validate a config document; any inconsistency is a ConfigError."""
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    doc = dict(doc)
    defaults = default_config_dict()

    loss_doc = doc.pop("loss", defaults["loss"])
    train_doc = doc.pop("train", defaults["train"])
    seg_doc = doc.pop("segmentation", defaults["segmentation"])
    client_doc = doc.pop("clients", defaults["clients"])
    for name, section in (("loss", loss_doc), ("train", train_doc),
                          ("segmentation", seg_doc), ("clients", client_doc)):
        if not isinstance(section, dict):
            raise ConfigError(f"config section {name!r} must be an object")
    loss_doc = {**defaults["loss"], **loss_doc}
    train_doc = {**defaults["train"], **train_doc}
    seg_doc = {**defaults["segmentation"], **seg_doc}
    client_doc = {**defaults["clients"], **client_doc}

    simple = {}
    for key in ("seed", "dim", "fixture_mode", "caption_prompt", "template_id",
                "user_query", "budget_ratio", "n_scenes", "figures"):
        simple[key] = doc.pop(key, defaults[key])
    if doc:
        raise ConfigError(f"unknown config keys: {sorted(doc)}")

    try:
        loss = LossConfig(
            margin=float(loss_doc["margin"]),
            epsilon=float(loss_doc["epsilon"]),
            delta=float(loss_doc["delta"]),
            alpha=None if loss_doc.get("alpha") is None else float(loss_doc["alpha"]),
            mode=str(loss_doc["mode"]),
        )
        train = TrainConfig(
            learning_rate=float(train_doc["learning_rate"]),
            max_epochs=int(train_doc["max_epochs"]),
            seed=int(simple["seed"]),
            loss=loss,
        )
        segmentation = KernelConfig(
            kernel=str(seg_doc["kernel"]),
            max_scenes=int(seg_doc["max_scenes"]),
            penalty_weight=float(seg_doc["penalty_weight"]),
        )
    except (ValueError, TypeError, KeyError) as exc:
        raise ConfigError(f"invalid config: {exc}") from exc

    budget_ratio = simple["budget_ratio"]
    if not isinstance(budget_ratio, (int, float)) or isinstance(budget_ratio, bool) \
            or not 0.0 < float(budget_ratio) <= 1.0:
        raise ConfigError(f"budget_ratio must lie in (0,1], got {budget_ratio!r}")
    dim = simple["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ConfigError(f"dim must be a positive integer, got {dim!r}")
    n_scenes = simple["n_scenes"]
    if n_scenes is not None and (not isinstance(n_scenes, int) or n_scenes < 1):
        raise ConfigError(f"n_scenes must be a positive integer or null, got {n_scenes!r}")
    template_id = simple["template_id"]
    if template_id not in (CHAIN_OF_DENSITY, PERSONALIZED):
        raise ConfigError(f"unknown template_id {template_id!r}")
    fixture_mode = simple["fixture_mode"]
    if not isinstance(fixture_mode, bool):
        raise ConfigError("fixture_mode must be true or false")
    if not fixture_mode:
        for key in ("llm_endpoint", "caption_endpoint", "embed_endpoint"):
            if not client_doc.get(key):
                raise ConfigError(f"live client mode requires clients.{key}")

    user_query = simple["user_query"]
    if user_query is not None and not isinstance(user_query, str):
        raise ConfigError("user_query must be a string or null")

    return PipelineConfig(
        loss=loss,
        train=train,
        segmentation=segmentation,
        seed=int(simple["seed"]),
        dim=dim,
        fixture_mode=fixture_mode,
        caption_prompt=str(simple["caption_prompt"]),
        template_id=template_id,
        user_query=user_query,
        budget_ratio=float(budget_ratio),
        n_scenes=n_scenes,
        figures=bool(simple["figures"]),
        llm_endpoint=client_doc.get("llm_endpoint"),
        caption_endpoint=client_doc.get("caption_endpoint"),
        embed_endpoint=client_doc.get("embed_endpoint"),
        max_retries=int(client_doc.get("max_retries", 3)),
        backoff_base=float(client_doc.get("backoff_base", 0.5)),
        max_in_flight=int(client_doc.get("max_in_flight", 4)),
    )


def load_config(path: Optional[str]) -> PipelineConfig:
    if path is None:
        return config_from_dict({})
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return config_from_dict(doc)


def make_clients(cfg: PipelineConfig):
    """(caption, llm, embed) client triple for the configured mode."""
    if cfg.fixture_mode:
        return (
            FixtureCaptionClient(cfg.seed),
            FixtureLLMClient(cfg.seed),
            FixtureEmbeddingClient(cfg.seed, cfg.dim),
        )
    kwargs = {"max_retries": cfg.max_retries, "backoff_base": cfg.backoff_base}
    return (
        HttpCaptionClient(cfg.caption_endpoint, **kwargs),
        HttpLLMClient(cfg.llm_endpoint, **kwargs),
        HttpEmbeddingClient(cfg.embed_endpoint, **kwargs),
    )


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _write_json(path: str, doc) -> None:
    _write_text(path, dumps_canonical(doc))


def _read_json(path: str, what: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {what} {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{what} {path} is not valid JSON: {exc}") from exc


def load_manifest(path: str) -> tuple[Bundle, list[FrameRef]]:
    """Parse a frames manifest into a captionless bundle skeleton."""
    doc = _read_json(path, "manifest")
    if not isinstance(doc, dict):
        raise SchemaError("manifest must be a JSON object")
    for key in ("video_id", "fps_downsampled", "n_frames_original", "frames"):
        if key not in doc:
            raise SchemaError(f"manifest: missing required field {key!r}")
    frames_doc = doc["frames"]
    if not isinstance(frames_doc, list) or not frames_doc:
        raise SchemaError("manifest: frames must be a non-empty list")
    refs = []
    prev = -1
    for pos, item in enumerate(frames_doc):
        if not isinstance(item, dict):
            raise SchemaError(f"manifest frames[{pos}]: must be an object")
        try:
            ref = FrameRef(
                frame_index=int(item["frame_index"]),
                time_sec=float(item["time_sec"]),
                ref=str(item["ref"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"manifest frames[{pos}]: {exc}") from exc
        if ref.frame_index <= prev:
            raise SchemaError("manifest frames: frame_index must be strictly increasing")
        prev = ref.frame_index
        refs.append(ref)

    annotations = None
    if doc.get("annotations") is not None:
        ann = doc["annotations"]
        if not isinstance(ann, dict) or "scores" not in ann:
            raise SchemaError("manifest annotations must carry scores")
        annotations = Annotations(
            n_frames_original=int(ann.get("n_frames_original", doc["n_frames_original"])),
            scores=[[float(v) for v in row] for row in ann["scores"]],
        )

    skeleton = Bundle(
        video_id=str(doc["video_id"]),
        fps=float(doc["fps_downsampled"]),
        n_frames_original=int(doc["n_frames_original"]),
        captions=[Caption(frame_index=0, time_sec=0.0, text="placeholder")],
        title=doc.get("title"),
        genre=doc.get("genre"),
        query=doc.get("query_category"),
        annotations=annotations,
    )
    return skeleton, refs


def stage_caption(manifest_path: str, cfg: PipelineConfig, out_path: str) -> Bundle:
    """Caption every manifest frame and write the resulting bundle."""
    skeleton, refs = load_manifest(manifest_path)
    caption_client, _, _ = make_clients(cfg)
    captions = fetch_captions(
        refs, caption_client, prompt=cfg.caption_prompt, max_in_flight=cfg.max_in_flight
    )
    skeleton.captions = captions
    save_bundle(skeleton, out_path)
    return skeleton


def stage_summarize(
    bundle_path: str,
    cfg: PipelineConfig,
    out_path: str,
    user_query: Optional[str] = None,
) -> Bundle:
    """Generate the text summary and write the updated bundle."""
    bundle = load_bundle(bundle_path)
    query = user_query if user_query is not None else cfg.user_query
    template_id = PERSONALIZED if query else cfg.template_id
    template = load_template(template_id)
    _, llm_client, _ = make_clients(cfg)
    bundle.summary_text = generate_text_summary(
        bundle, template, llm_client, user_query=query
    )
    save_bundle(bundle, out_path)
    return bundle


def _resolve_ref(bundle_path: str, ref: str) -> str:
    return os.path.join(os.path.dirname(os.path.abspath(bundle_path)), ref)


def ensure_caption_embeddings(
    bundle: Bundle, bundle_path: str, cfg: PipelineConfig
) -> tuple[Bundle, EmbeddingMatrix]:
    """Load the caption embedding sidecar, computing it first if absent.

    Freshly computed embeddings are written to disk and read back, so all
    consumers see the storage-precision values regardless of which stage
    created the file.
    """
    if bundle.embeddings_ref:
        path = _resolve_ref(bundle_path, bundle.embeddings_ref)
        if os.path.exists(path):
            return bundle, read_embeddings(path)
    _, _, embed_client = make_clients(cfg)
    matrix = embed_client.embed(bundle.caption_texts())
    path = _resolve_ref(bundle_path, EMB_FILE)
    write_embeddings(EmbeddingMatrix(matrix), path)
    bundle.embeddings_ref = EMB_FILE
    save_bundle(bundle, bundle_path)
    return bundle, read_embeddings(path)


def ensure_summary_embedding(
    bundle: Bundle, bundle_path: str, cfg: PipelineConfig
) -> tuple[Bundle, np.ndarray]:
    """Load the summary embedding sidecar, computing it first if absent."""
    if bundle.summary_embedding_ref:
        path = _resolve_ref(bundle_path, bundle.summary_embedding_ref)
        if os.path.exists(path):
            return bundle, read_embeddings(path).as_float64()[0]
    if not bundle.summary_text:
        raise SchemaError("bundle has no summary_text; run the summarize stage first")
    _, _, embed_client = make_clients(cfg)
    matrix = embed_client.embed([bundle.summary_text])
    path = _resolve_ref(bundle_path, SUMMARY_EMB_FILE)
    write_embeddings(EmbeddingMatrix(matrix), path)
    bundle.summary_embedding_ref = SUMMARY_EMB_FILE
    save_bundle(bundle, bundle_path)
    return bundle, read_embeddings(path).as_float64()[0]


def stage_segment(outdir: str, cfg: PipelineConfig) -> SceneSegmentation:
    """Segment the captions' embeddings; writes the segmentation artifact."""
    bundle_path = os.path.join(outdir, BUNDLE_FILE)
    bundle = load_bundle(bundle_path)
    bundle, embs = ensure_caption_embeddings(bundle, bundle_path, cfg)
    seg = kts_segment(embs, cfg.segmentation, q=cfg.n_scenes)
    _write_json(
        os.path.join(outdir, SEG_FILE),
        {
            "n_frames": seg.n_frames,
            "n_scenes": seg.n_scenes,
            "boundaries": list(seg.boundaries),
        },
    )
    return seg


def load_segmentation(outdir: str) -> SceneSegmentation:
    doc = _read_json(os.path.join(outdir, SEG_FILE), "segmentation")
    try:
        return SceneSegmentation(
            boundaries=tuple(doc["boundaries"]), n_frames=int(doc["n_frames"])
        )
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"segmentation artifact malformed: {exc}") from exc


def stage_score(outdir: str, cfg: PipelineConfig) -> tuple[FrameScores, TrainTrace, dict]:
    """Diversity, training, and final frame scores; writes scores + trace."""
    bundle_path = os.path.join(outdir, BUNDLE_FILE)
    bundle = load_bundle(bundle_path)
    bundle, embs = ensure_caption_embeddings(bundle, bundle_path, cfg)
    bundle, summary_vec = ensure_summary_embedding(bundle, bundle_path, cfg)
    seg_path = os.path.join(outdir, SEG_FILE)
    if os.path.exists(seg_path):
        seg = load_segmentation(outdir)
    else:
        seg = stage_segment(outdir, cfg)

    diversity_report = video_diversity(embs, seg)
    _, trace = train_video(embs, summary_vec, cfg.train, diversity_report.diversity)
    scores = trace.final_scores

    scores_doc = {
        "scores": [float(v) for v in scores.scores],
        "mean": scores.mean,
        "diversity": diversity_report.diversity,
        "sim_scene": diversity_report.sim_scene,
        "adjacent_sims": list(diversity_report.adjacent_sims),
        "lambda": trace.final_breakdown.lambda_,
        "loss_mode": cfg.loss.mode,
    }
    _write_json(os.path.join(outdir, SCORES_FILE), scores_doc)
    _write_text(os.path.join(outdir, TRACE_FILE), trace.to_table())
    return scores, trace, scores_doc


def load_scores(outdir: str) -> tuple[FrameScores, dict]:
    doc = _read_json(os.path.join(outdir, SCORES_FILE), "scores")
    try:
        values = np.asarray([float(v) for v in doc["scores"]], dtype=np.float64)
        return FrameScores(scores=values, mean=float(doc["mean"])), doc
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"scores artifact malformed: {exc}") from exc


def stage_select(outdir: str, cfg: PipelineConfig):
    """Scene aggregation plus knapsack; writes the selection artifact."""
    scores, _ = load_scores(outdir)
    seg = load_segmentation(outdir)
    values = scene_scores(scores, seg)
    weights = seg.scene_lengths()
    selection = knapsack_select(values, weights, budget_ratio=cfg.budget_ratio, n=seg.n_frames)
    selection = with_frame_mask(selection, seg)
    _write_json(
        os.path.join(outdir, SELECTION_FILE),
        {
            "selected_scenes": list(selection.selected_scenes),
            "budget_frames": selection.budget_frames,
            "budget_ratio": cfg.budget_ratio,
            "weight_used": selection.weight_used,
            "total_value": selection.total_value,
            "scene_values": values,
            "scene_weights": weights,
            "frame_mask": mask_to_bitstring(selection.frame_mask),
        },
    )
    return selection


def mask_to_bitstring(mask) -> str:
    return "".join("1" if v else "0" for v in mask)


def bitstring_to_mask(bits: str) -> list[bool]:
    return [c == "1" for c in bits]


def load_selection(outdir: str):
    doc = _read_json(os.path.join(outdir, SELECTION_FILE), "selection")
    return doc


def load_gt_mask(path: str, n_frames: int) -> list[bool]:
    doc = _read_json(path, "ground-truth mask")
    if isinstance(doc, dict):
        doc = doc.get("mask")
    if not isinstance(doc, list) or len(doc) != n_frames:
        raise SchemaError(
            f"ground-truth mask must be a list of {n_frames} flags"
        )
    return [bool(v) for v in doc]


def stage_evaluate(outdir: str, cfg: PipelineConfig, gt_mask_path: Optional[str] = None) -> Optional[dict]:
    """Correlations against annotators and optional precision/recall."""
    bundle = load_bundle(os.path.join(outdir, BUNDLE_FILE))
    scores, _ = load_scores(outdir)

    eval_doc: dict = {
        "tau": None, "rho": None, "per_annotator": [],
        "precision": None, "recall": None,
    }
    have_any = False
    if bundle.annotations is not None:
        upsampled = upsample_step_hold(list(scores.scores), bundle.n_frames_original)
        report = correlation_vs_annotators(upsampled, bundle.annotations.scores)
        eval_doc["tau"] = report.tau
        eval_doc["rho"] = report.rho
        eval_doc["per_annotator"] = [[t, r] for t, r in report.per_annotator]
        have_any = True
    if gt_mask_path is not None:
        selection_doc = load_selection(outdir)
        mask = bitstring_to_mask(selection_doc["frame_mask"])
        gt_mask = load_gt_mask(gt_mask_path, len(mask))
        precision, recall = personalization_pr(mask, gt_mask)
        eval_doc["precision"] = precision
        eval_doc["recall"] = recall
        have_any = True
    if not have_any:
        return None
    _write_json(os.path.join(outdir, EVAL_FILE), eval_doc)
    return eval_doc


def emit_report(
    report_doc: dict,
    scores: FrameScores,
    seg: SceneSegmentation,
    frame_mask,
    outdir: str,
) -> None:
    """Write the structured report and the per-frame delimited table."""
    _write_json(os.path.join(outdir, REPORT_FILE), report_doc)
    scene_of = seg.scene_of_frame()
    lines = ["index\tscore\tscene\tselected"]
    for i, value in enumerate(scores.scores):
        lines.append(f"{i}\t{float(value)!r}\t{int(scene_of[i])}\t{1 if frame_mask[i] else 0}")
    _write_text(os.path.join(outdir, TABLE_FILE), "\n".join(lines) + "\n")


def run_pipeline(
    cfg: PipelineConfig,
    outdir: str,
    bundle_path: Optional[str] = None,
    manifest_path: Optional[str] = None,
    gt_mask_path: Optional[str] = None,
) -> dict:
    """Full pipeline into outdir; returns the report document."""
    if (bundle_path is None) == (manifest_path is None):
        raise ConfigError("run needs exactly one of a bundle or a manifest")
    os.makedirs(outdir, exist_ok=True)
    timings: list[tuple[str, float]] = []
    working = os.path.join(outdir, BUNDLE_FILE)

    start = time.perf_counter()
    if manifest_path is not None:
        bundle = stage_caption(manifest_path, cfg, working)
    else:
        bundle = load_bundle(bundle_path)
        save_bundle(bundle, working)
    timings.append(("ingest", time.perf_counter() - start))

    start = time.perf_counter()
    if bundle.summary_text is None or cfg.user_query is not None:
        bundle = stage_summarize(working, cfg, working, user_query=cfg.user_query)
    timings.append(("summarize", time.perf_counter() - start))

    start = time.perf_counter()
    seg = stage_segment(outdir, cfg)
    timings.append(("segment", time.perf_counter() - start))

    start = time.perf_counter()
    scores, trace, scores_doc = stage_score(outdir, cfg)
    timings.append(("score", time.perf_counter() - start))

    start = time.perf_counter()
    selection = stage_select(outdir, cfg)
    timings.append(("select", time.perf_counter() - start))

    start = time.perf_counter()
    eval_doc = stage_evaluate(outdir, cfg, gt_mask_path=gt_mask_path)
    timings.append(("evaluate", time.perf_counter() - start))

    bundle = load_bundle(working)
    first = trace.rows[0]
    last = trace.rows[-1]
    report_doc = {
        "video_id": bundle.video_id,
        "n_frames": bundle.n_frames,
        "n_frames_original": bundle.n_frames_original,
        "dim": cfg.dim,
        "seed": cfg.seed,
        "fixture_mode": cfg.fixture_mode,
        "summary_text": bundle.summary_text,
        "diversity": scores_doc["diversity"],
        "sim_scene": scores_doc["sim_scene"],
        "adjacent_sims": scores_doc["adjacent_sims"],
        "lambda": scores_doc["lambda"],
        "loss": {
            "mode": cfg.loss.mode,
            "margin": cfg.loss.margin,
            "epsilon": cfg.loss.epsilon,
            "delta": cfg.loss.delta,
            "alpha": cfg.loss.alpha,
        },
        "train": {
            "learning_rate": cfg.train.learning_rate,
            "max_epochs": cfg.train.max_epochs,
            "epochs_run": len(trace.rows),
            "first_epoch": {
                "margin_term": first.margin_term,
                "sparsity_term": first.sparsity_term,
                "total": first.total,
                "mean_score": first.mean_score,
            },
            "last_epoch": {
                "margin_term": last.margin_term,
                "sparsity_term": last.sparsity_term,
                "total": last.total,
                "mean_score": last.mean_score,
            },
            "final": {
                "margin_term": trace.final_breakdown.margin_term,
                "sparsity_term": trace.final_breakdown.sparsity_term,
                "total": trace.final_breakdown.total,
                "mean_score": trace.final_scores.mean,
            },
        },
        "segmentation": {
            "n_scenes": seg.n_scenes,
            "boundaries": list(seg.boundaries),
        },
        "selection": {
            "selected_scenes": list(selection.selected_scenes),
            "budget_frames": selection.budget_frames,
            "budget_ratio": cfg.budget_ratio,
            "weight_used": selection.weight_used,
            "total_value": selection.total_value,
            "frame_mask": mask_to_bitstring(selection.frame_mask),
        },
        "evaluation": eval_doc,
    }
    emit_report(report_doc, scores, seg, selection.frame_mask, outdir)

    _write_text(
        os.path.join(outdir, TIMINGS_FILE),
        "".join(f"{name}\t{seconds:.6f}\n" for name, seconds in timings),
    )

    if cfg.figures:
        from . import plots

        figures_dir = os.path.join(outdir, FIGURES_DIR)
        os.makedirs(figures_dir, exist_ok=True)
        plots.save_score_figure(
            scores, seg, selection.frame_mask, os.path.join(figures_dir, "scores.png")
        )
        plots.save_trace_figure(trace.rows, os.path.join(figures_dir, "trace.png"))
        plots.save_diversity_figure(
            scores_doc["adjacent_sims"], os.path.join(figures_dir, "diversity.png")
        )
    return report_doc
