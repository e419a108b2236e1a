"""Command-line interface.

Subcommands mirror the pipeline stages and share one JSON config file;
flags override config fields. Exit codes: 0 success, 2 config error,
3 ingestion error, 4 client error, 5 numeric failure, 1 anything else.
"""

from __future__ import annotations

import functools
import json
import sys

import click

from .bundle import dumps_canonical, load_bundle, save_bundle
from .errors import (
    CapsumError,
    ClientError,
    ConfigError,
    EmbeddingFormatError,
    EmptyCaption,
    InvalidBudget,
    InvalidSceneCount,
    NonFiniteLoss,
    ParseError,
    SchemaError,
    TemplateError,
)
from .pipeline import (
    config_from_dict,
    default_config_dict,
    load_config,
    run_pipeline,
    stage_caption,
    stage_evaluate,
    stage_score,
    stage_segment,
    stage_select,
    stage_summarize,
)

EXIT_CONFIG = 2
EXIT_INGEST = 3
EXIT_CLIENT = 4
EXIT_NUMERIC = 5


def _exit_code_for(exc: CapsumError) -> int:
    if isinstance(exc, (ConfigError, InvalidBudget, InvalidSceneCount)):
        return EXIT_CONFIG
    if isinstance(exc, ClientError):
        return EXIT_CLIENT
    if isinstance(exc, NonFiniteLoss):
        return EXIT_NUMERIC
    if isinstance(exc, (ParseError, SchemaError, EmbeddingFormatError,
                        EmptyCaption, TemplateError)):
        return EXIT_INGEST
    return 1


def _mapped(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except CapsumError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(_exit_code_for(exc))
        except OSError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)

    return wrapper


def _config(config_path, **overrides):
    cfg = load_config(config_path)
    changed = {k: v for k, v in overrides.items() if v is not None}
    if not changed:
        return cfg
    from dataclasses import replace

    try:
        return replace(cfg, **changed)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid flag override: {exc}") from exc


@click.group()
def main():
    """Budgeted video summaries from per-frame captions."""


@main.command("init-config")
@click.option("--out", "out_path", default="config.json", show_default=True,
              help="Where to write the default config.")
@_mapped
def init_config(out_path):
    """Write a config file populated with every default."""
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(dumps_canonical(default_config_dict()))
    click.echo(f"wrote {out_path}")


@main.command()
@click.option("--in", "in_path", required=True, help="Bundle file to validate.")
@click.option("--out", "out_path", required=True, help="Canonicalized bundle destination.")
@_mapped
def ingest(in_path, out_path):
    """Validate a bundle file and rewrite it canonically."""
    bundle = load_bundle(in_path)
    save_bundle(bundle, out_path)
    click.echo(f"wrote {out_path} ({bundle.n_frames} captions)")


@main.command()
@click.option("--config", "config_path", default=None, help="JSON config file.")
@click.option("--manifest", "manifest_path", required=True, help="Frames manifest JSON.")
@click.option("--out", "out_path", required=True, help="Bundle destination.")
@click.option("--seed", type=int, default=None, help="Override config seed.")
@_mapped
def caption(config_path, manifest_path, out_path, seed):
    """Caption the manifest's frames into a new bundle."""
    cfg = _config(config_path, seed=seed)
    bundle = stage_caption(manifest_path, cfg, out_path)
    click.echo(f"wrote {out_path} ({bundle.n_frames} captions)")


@main.command()
@click.option("--config", "config_path", default=None, help="JSON config file.")
@click.option("--bundle", "bundle_path", required=True, help="Bundle to summarize.")
@click.option("--out", "out_path", required=True, help="Updated bundle destination.")
@click.option("--seed", type=int, default=None, help="Override config seed.")
@_mapped
def summarize(config_path, bundle_path, out_path, seed):
    """Generate the general text summary for a bundle."""
    cfg = _config(config_path, seed=seed)
    bundle = stage_summarize(bundle_path, cfg, out_path, user_query=None)
    click.echo(f"wrote {out_path}")
    click.echo(f"summary: {bundle.summary_text}")


@main.command()
@click.option("--config", "config_path", default=None, help="JSON config file.")
@click.option("--bundle", "bundle_path", required=True, help="Bundle to summarize.")
@click.option("--out", "out_path", required=True, help="Updated bundle destination.")
@click.option("--query", required=True, help="Viewer request steering the summary.")
@click.option("--seed", type=int, default=None, help="Override config seed.")
@_mapped
def personalize(config_path, bundle_path, out_path, query, seed):
    """Generate a query-conditioned text summary for a bundle."""
    cfg = _config(config_path, seed=seed)
    bundle = stage_summarize(bundle_path, cfg, out_path, user_query=query)
    click.echo(f"wrote {out_path}")
    click.echo(f"summary: {bundle.summary_text}")


@main.command()
@click.option("--config", "config_path", default=None, help="JSON config file.")
@click.option("--outdir", required=True, help="Pipeline directory holding bundle.json.")
@_mapped
def segment(config_path, outdir):
    """Cut the bundled captions into scenes."""
    cfg = _config(config_path)
    seg = stage_segment(outdir, cfg)
    click.echo(f"{seg.n_scenes} scenes, boundaries {list(seg.boundaries)}")


@main.command()
@click.option("--config", "config_path", default=None, help="JSON config file.")
@click.option("--outdir", required=True, help="Pipeline directory holding bundle.json.")
@_mapped
def score(config_path, outdir):
    """Train the projection head and write final frame scores."""
    cfg = _config(config_path)
    scores, trace, doc = stage_score(outdir, cfg)
    click.echo(
        f"scored {len(scores)} frames; mean {scores.mean:.6f}; "
        f"D {doc['diversity']:.6f}; lambda {doc['lambda']:.6f}"
    )


@main.command()
@click.option("--config", "config_path", default=None, help="JSON config file.")
@click.option("--outdir", required=True, help="Pipeline directory holding scores + segmentation.")
@_mapped
def select(config_path, outdir):
    """Pick scenes under the frame budget."""
    cfg = _config(config_path)
    selection = stage_select(outdir, cfg)
    click.echo(
        f"selected scenes {list(selection.selected_scenes)} "
        f"({selection.weight_used}/{selection.budget_frames} frames)"
    )


@main.command()
@click.option("--config", "config_path", default=None, help="JSON config file.")
@click.option("--outdir", required=True, help="Pipeline directory holding scores.")
@click.option("--gt-mask", "gt_mask_path", default=None,
              help="JSON frame mask of query-relevant frames (downsampled length).")
@_mapped
def evaluate(config_path, outdir, gt_mask_path):
    """Correlate scores with annotators; optional precision/recall."""
    cfg = _config(config_path)
    doc = stage_evaluate(outdir, cfg, gt_mask_path=gt_mask_path)
    if doc is None:
        click.echo("nothing to evaluate: no annotations and no ground-truth mask")
        return
    click.echo(json.dumps(doc, sort_keys=True))


@main.command()
@click.option("--config", "config_path", default=None, help="JSON config file.")
@click.option("--bundle", "bundle_path", default=None, help="Input bundle file.")
@click.option("--manifest", "manifest_path", default=None, help="Frames manifest JSON.")
@click.option("--outdir", required=True, help="Directory for all artifacts.")
@click.option("--query", default=None, help="Viewer request for a personalized summary.")
@click.option("--gt-mask", "gt_mask_path", default=None,
              help="JSON frame mask of query-relevant frames (downsampled length).")
@click.option("--seed", type=int, default=None, help="Override config seed.")
@click.option("--figures/--no-figures", "figures", default=None,
              help="Override figure rendering.")
@_mapped
def run(config_path, bundle_path, manifest_path, outdir, query, gt_mask_path, seed, figures):
    """Full pipeline: caption, summarize, segment, score, select, evaluate."""
    cfg = _config(config_path, seed=seed, user_query=query, figures=figures)
    report = run_pipeline(
        cfg,
        outdir,
        bundle_path=bundle_path,
        manifest_path=manifest_path,
        gt_mask_path=gt_mask_path,
    )
    click.echo(
        f"{report['video_id']}: D {report['diversity']:.6f}, "
        f"lambda {report['lambda']:.6f}, "
        f"selected {report['selection']['selected_scenes']}, "
        f"mask {report['selection']['frame_mask']}"
    )


if __name__ == "__main__":
    main()
