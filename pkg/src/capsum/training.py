"""Per-video training of a shared-weight projection head.

One affine head (weight, bias) projects both the caption embeddings and
the summary embedding; both branches always read the same parameter
store. The head starts at the identity so epoch-0 scores equal the raw
embedding scores, then full-batch Adam minimizes the configured loss.
Gradients are hand-derived through the cosine, the (1+s)/2 map, the mean
score, and the hinge/absolute-value terms, taking subgradient 0 at kinks,
and are checked against central finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    DimensionMismatch,
    KinkProximity,
    MissingDiversity,
    NonFiniteLoss,
    ZeroNormVector,
)
from .scoring import (
    FrameScores,
    LossBreakdown,
    LossConfig,
    awl_breakdown,
    frame_scores,
    lambda_of_diversity,
    pdl_loss,
    _as_matrix,
)


@dataclass
class ProjectionModel:
    """Affine head shared by the caption and summary branches."""

    weight: np.ndarray
    bias: np.ndarray

    def project_rows(self, matrix: np.ndarray) -> np.ndarray:
        return matrix @ self.weight.T + self.bias

    def project_vector(self, vec: np.ndarray) -> np.ndarray:
        return self.weight @ vec + self.bias

    def copy(self) -> "ProjectionModel":
        return ProjectionModel(weight=self.weight.copy(), bias=self.bias.copy())


def init_model(d: int) -> ProjectionModel:
    """Identity weight, zero bias: projection starts as a no-op."""
    if d < 1:
        raise DimensionMismatch(f"embedding dim must be >= 1, got {d}")
    return ProjectionModel(weight=np.eye(d, dtype=np.float64), bias=np.zeros(d, dtype=np.float64))


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float
    loss: LossConfig
    max_epochs: int = 100
    seed: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8

    def __post_init__(self):
        if self.learning_rate < 0.0:
            raise ValueError(f"learning_rate must be >= 0, got {self.learning_rate}")
        if self.max_epochs < 1:
            raise ValueError(f"max_epochs must be >= 1, got {self.max_epochs}")


@dataclass(frozen=True)
class TraceRow:
    """Loss state at the start of an epoch, before that epoch's update."""

    epoch: int
    margin_term: float
    sparsity_term: float
    lambda_: float
    total: float
    mean_score: float


@dataclass
class TrainTrace:
    rows: list = field(default_factory=list)
    final_scores: Optional[FrameScores] = None
    final_breakdown: Optional[LossBreakdown] = None
    final_sigmas: Optional[tuple] = None

    def to_table(self) -> str:
        """Tab-delimited trace: one row per epoch plus a header."""
        lines = ["epoch\tL_m\tL_s\tlambda\ttotal\tmean_S"]
        for row in self.rows:
            lines.append(
                f"{row.epoch}\t{row.margin_term!r}\t{row.sparsity_term!r}"
                f"\t{row.lambda_!r}\t{row.total!r}\t{row.mean_score!r}"
            )
        return "\n".join(lines) + "\n"


def _evaluate(
    model: ProjectionModel,
    embs: np.ndarray,
    summary: np.ndarray,
    cfg: LossConfig,
    diversity: Optional[float],
    sigmas: Optional[tuple],
):
    """Forward pass: project both branches, score, and evaluate the loss."""
    projected = model.project_rows(embs)
    summary_proj = model.project_vector(summary)
    scores = frame_scores(projected, summary_proj)
    if cfg.mode == "awl":
        breakdown = awl_breakdown(scores, cfg, float(sigmas[0]), float(sigmas[1]))
    else:
        breakdown = pdl_loss(scores, cfg, diversity)
    return scores, breakdown, projected, summary_proj


def _term_weights(cfg: LossConfig, diversity: Optional[float], sigmas: Optional[tuple]):
    """Coefficients (w_margin, w_sparsity) on the two loss terms."""
    if cfg.mode == "pdl":
        return 1.0, lambda_of_diversity(diversity, cfg.delta)
    if cfg.mode == "fixed_alpha":
        return 1.0, float(cfg.alpha)
    if cfg.mode == "margin_only":
        return 1.0, 0.0
    if cfg.mode == "sparsity_only":
        return 0.0, 1.0
    s1, s2 = float(sigmas[0]), float(sigmas[1])
    return 1.0 / (2.0 * s1 * s1), 1.0 / (2.0 * s2 * s2)


def _score_gradient(scores: FrameScores, cfg: LossConfig, w_margin: float, w_sparsity: float) -> np.ndarray:
    """d(total)/d(S_j): margin and sparsity terms, subgradient 0 at kinks."""
    n = len(scores)
    deviations = scores.scores - scores.mean
    signs = np.sign(deviations)
    active = (cfg.margin - np.abs(deviations) > 0.0).astype(np.float64)
    grad_margin = (-active * signs + np.sum(active * signs) / n) / n
    grad_sparsity = np.full(n, np.sign(scores.mean - cfg.epsilon) / n)
    return w_margin * grad_margin + w_sparsity * grad_sparsity


def _embedding_gradients(
    projected: np.ndarray,
    summary_proj: np.ndarray,
    scores: FrameScores,
    grad_scores: np.ndarray,
):
    """Backpropagate through S_i = (1 + cos(u_i, v)) / 2."""
    norm_v = float(np.linalg.norm(summary_proj))
    norms_u = np.linalg.norm(projected, axis=1)
    sims = 2.0 * scores.scores - 1.0
    grad_sims = 0.5 * grad_scores
    coeff_v = grad_sims / (norms_u * norm_v)
    coeff_u = grad_sims * sims / (norms_u * norms_u)
    grad_projected = coeff_v[:, None] * summary_proj[None, :] - coeff_u[:, None] * projected
    grad_summary = projected.T @ coeff_v - (float(np.dot(grad_sims, sims)) / (norm_v * norm_v)) * summary_proj
    return grad_projected, grad_summary


def _parameter_gradients(
    model: ProjectionModel,
    embs: np.ndarray,
    summary: np.ndarray,
    cfg: LossConfig,
    diversity: Optional[float],
    sigmas: Optional[tuple],
    scores: FrameScores,
    breakdown: LossBreakdown,
    projected: np.ndarray,
    summary_proj: np.ndarray,
):
    """Gradients w.r.t. weight, bias, and (awl mode) the two sigmas."""
    w_margin, w_sparsity = _term_weights(cfg, diversity, sigmas)
    grad_scores = _score_gradient(scores, cfg, w_margin, w_sparsity)
    grad_projected, grad_summary = _embedding_gradients(
        projected, summary_proj, scores, grad_scores
    )
    grad_weight = grad_projected.T @ embs + np.outer(grad_summary, summary)
    grad_bias = grad_projected.sum(axis=0) + grad_summary
    if cfg.mode != "awl":
        return grad_weight, grad_bias, None, None
    s1, s2 = float(sigmas[0]), float(sigmas[1])
    grad_s1 = -breakdown.margin_term / (s1 * s1 * s1) + 1.0 / s1
    grad_s2 = -breakdown.sparsity_term / (s2 * s2 * s2) + 1.0 / s2
    return grad_weight, grad_bias, grad_s1, grad_s2


class _Adam:
    """Textbook Adam with bias correction, one state slot per parameter."""

    def __init__(self, params: list, lr: float, beta1: float, beta2: float, eps: float):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]

    def step(self, params: list, grads: list) -> None:
        self.t += 1
        correction1 = 1.0 - self.beta1 ** self.t
        correction2 = 1.0 - self.beta2 ** self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * (g * g)
            m_hat = m / correction1
            v_hat = v / correction2
            p -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


def _check_finite(breakdown: LossBreakdown, rows: list) -> None:
    values = (breakdown.margin_term, breakdown.sparsity_term, breakdown.total)
    if not all(np.isfinite(v) for v in values):
        raise NonFiniteLoss(
            f"loss became non-finite at epoch {len(rows)}",
            trace=TrainTrace(rows=list(rows)),
        )


def train_video(
    caption_embs,
    summary_emb,
    cfg: TrainConfig,
    diversity: Optional[float] = None,
) -> tuple[ProjectionModel, TrainTrace]:
    """Train one video's projection head; bit-deterministic in its inputs."""
    embs = _as_matrix(caption_embs)
    summary = np.asarray(summary_emb, dtype=np.float64).reshape(-1)
    n, d = embs.shape
    if n < 2:
        raise DimensionMismatch(f"training needs at least 2 captions, got {n}")
    if summary.shape[0] != d:
        raise DimensionMismatch(f"summary dim {summary.shape[0]} vs caption dim {d}")
    loss_cfg = cfg.loss
    if loss_cfg.mode == "pdl" and diversity is None:
        raise MissingDiversity("pdl training needs the video diversity D")

    model = init_model(d)
    awl = loss_cfg.mode == "awl"
    sigmas = (np.array(1.0), np.array(1.0)) if awl else None
    params = [model.weight, model.bias] + (list(sigmas) if awl else [])
    adam = _Adam(params, cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.adam_eps)

    rows: list[TraceRow] = []
    for epoch in range(cfg.max_epochs):
        try:
            scores, breakdown, projected, summary_proj = _evaluate(
                model, embs, summary, loss_cfg, diversity, sigmas
            )
        except ZeroNormVector as exc:
            raise NonFiniteLoss(
                f"projection collapsed at epoch {epoch}: {exc}",
                trace=TrainTrace(rows=list(rows)),
            ) from exc
        _check_finite(breakdown, rows)
        rows.append(
            TraceRow(
                epoch=epoch,
                margin_term=breakdown.margin_term,
                sparsity_term=breakdown.sparsity_term,
                lambda_=breakdown.lambda_,
                total=breakdown.total,
                mean_score=scores.mean,
            )
        )
        grads = _parameter_gradients(
            model, embs, summary, loss_cfg, diversity, sigmas,
            scores, breakdown, projected, summary_proj,
        )
        grad_list = [grads[0], grads[1]] + ([np.asarray(grads[2]), np.asarray(grads[3])] if awl else [])
        adam.step(params, grad_list)
        if awl and (float(sigmas[0]) <= 0.0 or float(sigmas[1]) <= 0.0):
            raise NonFiniteLoss(
                f"sigma became non-positive at epoch {epoch}",
                trace=TrainTrace(rows=list(rows)),
            )

    try:
        final_scores, final_breakdown, _, _ = _evaluate(
            model, embs, summary, loss_cfg, diversity, sigmas
        )
    except ZeroNormVector as exc:
        raise NonFiniteLoss(
            f"projection collapsed after final epoch: {exc}",
            trace=TrainTrace(rows=list(rows)),
        ) from exc
    _check_finite(final_breakdown, rows)
    trace = TrainTrace(
        rows=rows,
        final_scores=final_scores,
        final_breakdown=final_breakdown,
        final_sigmas=(float(sigmas[0]), float(sigmas[1])) if awl else None,
    )
    return model, trace


def finite_diff_gradcheck(
    model: ProjectionModel,
    caption_embs,
    summary_emb,
    cfg: LossConfig,
    diversity: Optional[float] = None,
    h: float = 1e-5,
    sigmas: tuple = (1.0, 1.0),
) -> float:
    """Max relative error between analytic and central-difference gradients.

    The evaluation point must be kink-safe: every |S_i - S_avg| at least
    10h away from both 0 and the margin, and |S_avg - epsilon| over 10h,
    so both loss terms are differentiable across the probe interval.
    """
    embs = _as_matrix(caption_embs)
    summary = np.asarray(summary_emb, dtype=np.float64).reshape(-1)
    awl = cfg.mode == "awl"
    sigma_arrays = (np.array(float(sigmas[0])), np.array(float(sigmas[1]))) if awl else None

    scores, breakdown, projected, summary_proj = _evaluate(
        model, embs, summary, cfg, diversity, sigma_arrays
    )
    guard = 10.0 * h
    deviations = np.abs(scores.scores - scores.mean)
    if np.any(deviations <= guard):
        raise KinkProximity("a score sits on the absolute-value kink; resample")
    if np.any(np.abs(deviations - cfg.margin) <= guard):
        raise KinkProximity("a score sits on the hinge kink; resample")
    if abs(scores.mean - cfg.epsilon) <= guard:
        raise KinkProximity("mean score sits on the sparsity kink; resample")

    grad_weight, grad_bias, grad_s1, grad_s2 = _parameter_gradients(
        model, embs, summary, cfg, diversity, sigma_arrays,
        scores, breakdown, projected, summary_proj,
    )
    analytic = np.concatenate(
        [grad_weight.ravel(), grad_bias]
        + ([np.array([grad_s1, grad_s2])] if awl else [])
    )

    d = embs.shape[1]
    n_weight = d * d

    def loss_at(theta: np.ndarray) -> float:
        probe = ProjectionModel(
            weight=theta[:n_weight].reshape(d, d).copy(),
            bias=theta[n_weight:n_weight + d].copy(),
        )
        probe_sigmas = None
        if awl:
            probe_sigmas = (np.array(theta[-2]), np.array(theta[-1]))
        _, probe_breakdown, _, _ = _evaluate(
            probe, embs, summary, cfg, diversity, probe_sigmas
        )
        return probe_breakdown.total

    theta0 = np.concatenate(
        [model.weight.ravel(), model.bias]
        + ([np.array([float(sigmas[0]), float(sigmas[1])])] if awl else [])
    )
    worst = 0.0
    for k in range(theta0.shape[0]):
        theta_plus = theta0.copy()
        theta_plus[k] += h
        theta_minus = theta0.copy()
        theta_minus[k] -= h
        numeric = (loss_at(theta_plus) - loss_at(theta_minus)) / (2.0 * h)
        denom = max(1e-8, abs(analytic[k]) + abs(numeric))
        worst = max(worst, abs(analytic[k] - numeric) / denom)
    return worst
