"""Frame scoring, the loss family, and the diversity signal.

Frame i gets S_i = (1 + cos(u_i, v)) / 2 in [0,1], where u_i is the i-th
caption embedding and v the text-summary embedding. The trainable loss is
a margin term pushing each S_i at least m away from the mean plus a
sparsity term pinning the mean near a keep ratio epsilon; the two are
combined per mode, with the adaptive mode weighting sparsity by a function
of the video's scene-level diversity D.

All arithmetic is 64-bit regardless of storage precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .embfile import EmbeddingMatrix
from .errors import (
    DimensionMismatch,
    EmptyScene,
    MissingDiversity,
    NonPositiveSigma,
    TooFewScenes,
    ZeroNormVector,
)

MODES = ("pdl", "fixed_alpha", "margin_only", "sparsity_only", "awl")

# Instrumentation: number of caption-vs-summary cosine evaluations, used to
# assert the one-similarity-per-frame contract.
_similarity_evals = 0


def reset_similarity_evals() -> None:
    global _similarity_evals
    _similarity_evals = 0


def similarity_evals() -> int:
    return _similarity_evals


def _as_matrix(embs) -> np.ndarray:
    if isinstance(embs, EmbeddingMatrix):
        return embs.as_float64()
    matrix = np.asarray(embs, dtype=np.float64)
    if matrix.ndim != 2:
        raise DimensionMismatch(f"expected a 2-d embedding matrix, got shape {matrix.shape}")
    return matrix


def _cosine(u: np.ndarray, v: np.ndarray, norm_v: float) -> float:
    norm_u = float(np.linalg.norm(u))
    if norm_u == 0.0:
        raise ZeroNormVector("caption embedding has zero norm")
    value = float(np.dot(u, v)) / (norm_u * norm_v)
    # Clip to [-1, 1]: rounding can push the ratio a few ulp outside.
    return min(1.0, max(-1.0, value))


@dataclass(frozen=True)
class FrameScores:
    """Per-frame scores S_i in [0,1] plus their arithmetic mean."""

    scores: np.ndarray
    mean: float

    def __post_init__(self):
        object.__setattr__(self, "scores", np.asarray(self.scores, dtype=np.float64))

    def __len__(self) -> int:
        return int(self.scores.shape[0])


def frame_scores(caption_embs, summary_emb) -> FrameScores:
    """Score every frame against the summary with one cosine per frame."""
    global _similarity_evals
    matrix = _as_matrix(caption_embs)
    summary = np.asarray(summary_emb, dtype=np.float64).reshape(-1)
    if matrix.shape[1] != summary.shape[0]:
        raise DimensionMismatch(
            f"caption dim {matrix.shape[1]} vs summary dim {summary.shape[0]}"
        )
    norm_v = float(np.linalg.norm(summary))
    if norm_v == 0.0:
        raise ZeroNormVector("summary embedding has zero norm")
    scores = np.empty(matrix.shape[0], dtype=np.float64)
    for i in range(matrix.shape[0]):
        sim = _cosine(matrix[i], summary, norm_v)
        _similarity_evals += 1
        scores[i] = (1.0 + sim) / 2.0
    return FrameScores(scores=scores, mean=float(np.mean(scores)))


@dataclass(frozen=True)
class LossConfig:
    """Loss hyperparameters. Exactly one mode is active per config."""

    margin: float
    epsilon: float = 0.3
    delta: float = 0.35
    alpha: Optional[float] = None
    mode: str = "pdl"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown loss mode {self.mode!r}")
        if not 0.0 < self.margin < 1.0:
            raise ValueError(f"margin must lie in (0,1), got {self.margin}")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in (0,1), got {self.epsilon}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0,1), got {self.delta}")
        if self.mode == "fixed_alpha" and self.alpha is None:
            raise ValueError("fixed_alpha mode requires alpha")


@dataclass(frozen=True)
class LossBreakdown:
    """One loss evaluation: both terms, the sparsity weight, the total."""

    margin_term: float
    sparsity_term: float
    lambda_: float
    total: float
    mode: str


def improved_margin_loss(scores: FrameScores, m: float) -> float:
    """Mean hinge penalty for scores closer than m to the mean score.

    Zero when every score is at least m from the mean; equal to m when all
    scores coincide. Always within [0, m].
    """
    if not 0.0 < m < 1.0:
        raise ValueError(f"margin must lie in (0,1), got {m}")
    deviations = np.abs(scores.scores - scores.mean)
    hinges = np.maximum(0.0, m - deviations)
    return float(np.mean(hinges))


def sparsity_loss(scores: FrameScores, epsilon: float) -> float:
    """Distance of the mean score from the target keep ratio."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0,1), got {epsilon}")
    return abs(scores.mean - epsilon)


def lambda_of_diversity(diversity: float, delta: float = 0.35) -> float:
    """Sparsity weight: 0 for diverse videos, (1-D)e^(1-D) below delta."""
    if not 0.0 <= diversity <= 2.0:
        raise ValueError(f"diversity must lie in [0,2], got {diversity}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0,1), got {delta}")
    if diversity >= delta:
        return 0.0
    return (1.0 - diversity) * math.exp(1.0 - diversity)


def pdl_loss(scores: FrameScores, cfg: LossConfig, diversity: Optional[float] = None) -> LossBreakdown:
    """Combine margin and sparsity terms according to cfg.mode.

    The awl mode carries trainable weights of its own and is evaluated via
    awl_breakdown instead.
    """
    margin_term = improved_margin_loss(scores, cfg.margin)
    sparsity_term = sparsity_loss(scores, cfg.epsilon)
    if cfg.mode == "pdl":
        if diversity is None:
            raise MissingDiversity("pdl mode needs the video diversity D")
        lam = lambda_of_diversity(diversity, cfg.delta)
        total = margin_term + lam * sparsity_term
    elif cfg.mode == "fixed_alpha":
        lam = float(cfg.alpha)
        total = margin_term + lam * sparsity_term
    elif cfg.mode == "margin_only":
        lam = 0.0
        total = margin_term
    elif cfg.mode == "sparsity_only":
        lam = 1.0
        total = sparsity_term
    else:
        raise ValueError("awl mode requires sigma weights; use awl_breakdown")
    return LossBreakdown(
        margin_term=margin_term,
        sparsity_term=sparsity_term,
        lambda_=lam,
        total=total,
        mode=cfg.mode,
    )


def awl_loss(margin_term: float, sparsity_term: float, sigma1: float, sigma2: float) -> float:
    """Uncertainty-weighted total with trainable sigmas.

    For a fixed positive term L the minimizer over its sigma satisfies
    sigma^2 = L, so the weighting adapts to the terms' scales.
    """
    if sigma1 <= 0.0 or sigma2 <= 0.0:
        raise NonPositiveSigma(f"sigmas must be positive, got {sigma1}, {sigma2}")
    return (
        margin_term / (2.0 * sigma1 * sigma1)
        + sparsity_term / (2.0 * sigma2 * sigma2)
        + math.log(sigma1)
        + math.log(sigma2)
    )


def awl_breakdown(scores: FrameScores, cfg: LossConfig, sigma1: float, sigma2: float) -> LossBreakdown:
    """Loss breakdown for awl mode; lambda_ reports the sparsity weight."""
    margin_term = improved_margin_loss(scores, cfg.margin)
    sparsity_term = sparsity_loss(scores, cfg.epsilon)
    total = awl_loss(margin_term, sparsity_term, sigma1, sigma2)
    return LossBreakdown(
        margin_term=margin_term,
        sparsity_term=sparsity_term,
        lambda_=1.0 / (2.0 * sigma2 * sigma2),
        total=total,
        mode="awl",
    )


@dataclass(frozen=True)
class DiversityReport:
    """Scene-level diversity: adjacent scene-mean similarities and D."""

    scene_means: np.ndarray
    adjacent_sims: tuple
    sim_scene: float
    diversity: float


def scene_mean_embeddings(caption_embs, seg) -> np.ndarray:
    """Mean embedding per scene, rows ordered by scene index."""
    matrix = _as_matrix(caption_embs)
    if seg.n_frames != matrix.shape[0]:
        raise DimensionMismatch(
            f"segmentation covers {seg.n_frames} frames, matrix has {matrix.shape[0]}"
        )
    means = np.empty((seg.n_scenes, matrix.shape[1]), dtype=np.float64)
    for j, (start, end) in enumerate(seg.scene_ranges()):
        if end <= start:
            raise EmptyScene(f"scene {j} spans no frames")
        means[j] = matrix[start:end].mean(axis=0)
    return means


def diversity_score(scene_means: np.ndarray) -> DiversityReport:
    """Diversity D = 1 - mean cosine similarity of adjacent scene means."""
    means = np.asarray(scene_means, dtype=np.float64)
    if means.ndim != 2:
        raise DimensionMismatch(f"scene means must be 2-d, got shape {means.shape}")
    q = means.shape[0]
    if q < 2:
        raise TooFewScenes(f"diversity needs at least 2 scenes, got {q}")
    norms = np.linalg.norm(means, axis=1)
    if np.any(norms == 0.0):
        raise ZeroNormVector("scene mean with zero norm")
    sims = []
    for k in range(q - 1):
        value = float(np.dot(means[k], means[k + 1])) / (norms[k] * norms[k + 1])
        sims.append(min(1.0, max(-1.0, value)))
    sim_scene = float(np.mean(sims))
    return DiversityReport(
        scene_means=means,
        adjacent_sims=tuple(sims),
        sim_scene=sim_scene,
        diversity=1.0 - sim_scene,
    )


def video_diversity(caption_embs, seg) -> DiversityReport:
    """Diversity of a segmented video; a single-scene video has D = 0.

    With one scene there are no adjacent pairs; the video is treated as
    minimally diverse so the adaptive weight takes its low-diversity
    branch.
    """
    means = scene_mean_embeddings(caption_embs, seg)
    if means.shape[0] == 1:
        return DiversityReport(
            scene_means=means, adjacent_sims=(), sim_scene=1.0, diversity=0.0
        )
    return diversity_score(means)
