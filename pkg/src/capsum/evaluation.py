"""Rank-based evaluation against human annotations, plus precision/recall
for query-conditioned summaries.

Correlations are computed per annotator and averaged. Kendall's tau uses
the tie-corrected form with integer pair counts; Spearman's rho is the
Pearson correlation of average ranks (ties share their mean rank), with
compensated summation so equal inputs give bit-equal outputs regardless
of accumulation path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (
    DegenerateInput,
    EmptyGroundTruth,
    EmptySelection,
    LengthMismatch,
)


@dataclass(frozen=True)
class EvalReport:
    tau: float
    rho: float
    per_annotator: tuple
    precision: Optional[float] = None
    recall: Optional[float] = None


def _as_vector(x: Sequence[float], name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64).reshape(-1)
    if arr.shape[0] < 2:
        raise DegenerateInput(f"{name} needs at least 2 entries")
    return arr


def kendall_tau_b(x: Sequence[float], y: Sequence[float]) -> float:
    """Tie-corrected rank agreement from exact integer pair counts."""
    xv = _as_vector(x, "x")
    yv = _as_vector(y, "y")
    if xv.shape[0] != yv.shape[0]:
        raise LengthMismatch(f"{xv.shape[0]} vs {yv.shape[0]} entries")
    iu, ju = np.triu_indices(xv.shape[0], k=1)
    sx = np.sign(xv[iu] - xv[ju]).astype(np.int64)
    sy = np.sign(yv[iu] - yv[ju]).astype(np.int64)
    product = sx * sy
    concordant = int(np.count_nonzero(product > 0))
    discordant = int(np.count_nonzero(product < 0))
    ties_x = int(np.count_nonzero((sx == 0) & (sy != 0)))
    ties_y = int(np.count_nonzero((sy == 0) & (sx != 0)))
    denom_x = concordant + discordant + ties_x
    denom_y = concordant + discordant + ties_y
    if denom_x == 0 or denom_y == 0:
        raise DegenerateInput("constant sequence: tau undefined")
    return (concordant - discordant) / math.sqrt(denom_x * denom_y)


def average_ranks(x: np.ndarray) -> np.ndarray:
    """Ranks 1..n with tied entries sharing the mean rank of their run."""
    order = np.argsort(x, kind="stable")
    ranks = np.empty(x.shape[0], dtype=np.float64)
    i = 0
    while i < x.shape[0]:
        j = i
        while j + 1 < x.shape[0] and x[order[j + 1]] == x[order[i]]:
            j += 1
        # Mean of ranks i+1..j+1: midpoint of an integer run, exact in binary.
        mean_rank = (i + 1 + j + 1) / 2.0
        for k in range(i, j + 1):
            ranks[order[k]] = mean_rank
        i = j + 1
    return ranks


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    n = x.shape[0]
    mean_x = math.fsum(x) / n
    mean_y = math.fsum(y) / n
    dx = [float(v) - mean_x for v in x]
    dy = [float(v) - mean_y for v in y]
    cov = math.fsum(a * b for a, b in zip(dx, dy))
    var_x = math.fsum(a * a for a in dx)
    var_y = math.fsum(b * b for b in dy)
    if var_x == 0.0 or var_y == 0.0:
        raise DegenerateInput("constant sequence: rho undefined")
    return cov / math.sqrt(var_x * var_y)


def spearman_rho(x: Sequence[float], y: Sequence[float]) -> float:
    """Pearson correlation of average ranks."""
    xv = _as_vector(x, "x")
    yv = _as_vector(y, "y")
    if xv.shape[0] != yv.shape[0]:
        raise LengthMismatch(f"{xv.shape[0]} vs {yv.shape[0]} entries")
    return _pearson(average_ranks(xv), average_ranks(yv))


def upsample_step_hold(scores: Sequence[float], n_original: int) -> list[float]:
    """Spread n downsampled scores over n_original frames.

    Original frame j takes the score of downsampled frame
    floor(j * n / n_original), so each downsampled frame covers one
    contiguous block and the last block absorbs the remainder.
    """
    values = list(scores)
    n = len(values)
    if n == 0:
        raise DegenerateInput("no scores to upsample")
    if n_original < n:
        raise LengthMismatch(f"cannot upsample {n} scores onto {n_original} frames")
    out = []
    for j in range(n_original):
        k = min(n - 1, (j * n) // n_original)
        out.append(values[k])
    return out


def correlation_vs_annotators(
    predicted_original: Sequence[float],
    annotations: Sequence[Sequence[float]],
) -> EvalReport:
    """Per-annotator tau and rho, then their means."""
    predicted = list(predicted_original)
    if not annotations:
        raise LengthMismatch("no annotators")
    per = []
    for idx, annotation in enumerate(annotations):
        if len(annotation) != len(predicted):
            raise LengthMismatch(
                f"annotator {idx}: {len(annotation)} scores vs {len(predicted)} predictions"
            )
        per.append((kendall_tau_b(predicted, annotation), spearman_rho(predicted, annotation)))
    tau = math.fsum(t for t, _ in per) / len(per)
    rho = math.fsum(r for _, r in per) / len(per)
    return EvalReport(tau=tau, rho=rho, per_annotator=tuple(per))


def personalization_pr(
    selected_mask: Sequence[bool],
    ground_truth_mask: Sequence[bool],
) -> tuple[float, float]:
    """Precision and recall of selected frames against relevant frames.

    precision = |selected and relevant| / |selected|;
    recall = |selected and relevant| / |relevant|.
    """
    if len(selected_mask) != len(ground_truth_mask):
        raise LengthMismatch(
            f"selection mask length {len(selected_mask)} vs ground truth {len(ground_truth_mask)}"
        )
    selected = sum(1 for v in selected_mask if v)
    relevant = sum(1 for v in ground_truth_mask if v)
    if selected == 0:
        raise EmptySelection("no frames selected")
    if relevant == 0:
        raise EmptyGroundTruth("no relevant frames in ground truth")
    overlap = sum(1 for s, g in zip(selected_mask, ground_truth_mask) if s and g)
    return overlap / selected, overlap / relevant
