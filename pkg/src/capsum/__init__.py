"""capsum: budgeted video summaries from per-frame captions.

A self-supervised pipeline: captions are scored against an LLM-generated
text summary by cosine similarity through a trainable shared-weight
projection head, scenes come from kernel temporal segmentation, and a
0/1 knapsack picks scenes under a frame budget.
"""

from .bundle import Annotations, Bundle, Caption, load_bundle, save_bundle
from .clients import (
    FixtureCaptionClient,
    FixtureEmbeddingClient,
    FixtureLLMClient,
    FrameRef,
    fetch_captions,
    fixture_embed,
    generate_text_summary,
)
from .embfile import EmbeddingMatrix, read_embeddings, write_embeddings
from .evaluation import (
    EvalReport,
    correlation_vs_annotators,
    kendall_tau_b,
    personalization_pr,
    spearman_rho,
    upsample_step_hold,
)
from .kts import KernelConfig, SceneSegmentation, kts_segment
from .prompts import PromptTemplate, load_template, render_prompt
from .scoring import (
    DiversityReport,
    FrameScores,
    LossBreakdown,
    LossConfig,
    awl_loss,
    diversity_score,
    frame_scores,
    improved_margin_loss,
    lambda_of_diversity,
    pdl_loss,
    scene_mean_embeddings,
    sparsity_loss,
    video_diversity,
)
from .selection import (
    SummarySelection,
    knapsack_select,
    scene_scores,
    selection_to_frame_mask,
)
from .training import (
    ProjectionModel,
    TrainConfig,
    TrainTrace,
    finite_diff_gradcheck,
    init_model,
    train_video,
)

__version__ = "0.1.0"

__all__ = [
    "Annotations", "Bundle", "Caption", "load_bundle", "save_bundle",
    "FixtureCaptionClient", "FixtureEmbeddingClient", "FixtureLLMClient",
    "FrameRef", "fetch_captions", "fixture_embed", "generate_text_summary",
    "EmbeddingMatrix", "read_embeddings", "write_embeddings",
    "EvalReport", "correlation_vs_annotators", "kendall_tau_b",
    "personalization_pr", "spearman_rho", "upsample_step_hold",
    "KernelConfig", "SceneSegmentation", "kts_segment",
    "PromptTemplate", "load_template", "render_prompt",
    "DiversityReport", "FrameScores", "LossBreakdown", "LossConfig",
    "awl_loss", "diversity_score", "frame_scores", "improved_margin_loss",
    "lambda_of_diversity", "pdl_loss", "scene_mean_embeddings",
    "sparsity_loss", "video_diversity",
    "SummarySelection", "knapsack_select", "scene_scores",
    "selection_to_frame_mask",
    "ProjectionModel", "TrainConfig", "TrainTrace", "finite_diff_gradcheck",
    "init_model", "train_video",
    "__version__",
]
