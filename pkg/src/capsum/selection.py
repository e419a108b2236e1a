"""Scene aggregation and budgeted scene selection.

Frame scores average into one value per scene; scenes are then chosen by
an exact 0/1 knapsack maximizing total value under a frame budget of
floor(budget_ratio * n) downsampled frames (the floor keeps the summary
within the stated fraction). Ties break toward fewer selected frames,
then toward the lexicographically smallest scene index set, so selections
are reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .errors import InconsistentSelection, InvalidBudget, LengthMismatch
from .kts import SceneSegmentation
from .scoring import FrameScores


@dataclass(frozen=True)
class SummarySelection:
    """A budgeted scene subset; frame_mask is attached once expanded."""

    selected_scenes: tuple
    budget_frames: int
    total_value: float
    weight_used: int
    frame_mask: Optional[tuple] = None


def scene_scores(scores: FrameScores, seg: SceneSegmentation) -> list[float]:
    """Mean frame score per scene."""
    if seg.n_frames != len(scores):
        raise LengthMismatch(
            f"segmentation covers {seg.n_frames} frames, scores cover {len(scores)}"
        )
    return [float(np.mean(scores.scores[start:end])) for start, end in seg.scene_ranges()]


def knapsack_select(
    values: Sequence[float],
    weights: Sequence[int],
    budget_ratio: float = 0.15,
    n: Optional[int] = None,
) -> SummarySelection:
    """Exact 0/1 knapsack over scenes.

    values are scene scores, weights are scene frame counts summing to n.
    The DP prefers, in order: higher total value, fewer frames used,
    lexicographically smaller index set. The budget is the floor of the
    floating product budget_ratio * n.
    """
    if len(values) != len(weights):
        raise LengthMismatch(f"{len(values)} values vs {len(weights)} weights")
    q = len(values)
    if q == 0:
        raise LengthMismatch("no scenes to select from")
    weight_arr = np.asarray(weights, dtype=np.int64)
    if np.any(weight_arr <= 0):
        raise InvalidBudget("scene weights must be positive frame counts")
    total_frames = int(weight_arr.sum())
    if n is None:
        n = total_frames
    elif total_frames != n:
        raise InvalidBudget(f"scene weights sum to {total_frames}, expected n={n}")
    if not 0.0 < budget_ratio <= 1.0:
        raise InvalidBudget(f"budget_ratio must lie in (0,1], got {budget_ratio}")
    budget = math.floor(budget_ratio * n)

    value_arr = np.asarray(values, dtype=np.float64)
    capacities = np.arange(budget + 1)

    # Suffix DP over scenes: val[i][w] is the best value using scenes i..,
    # wt[i][w] the fewest frames achieving it, take[i][w] whether scene i
    # is in that optimum. Preferring take on a full tie keeps the chosen
    # index set lexicographically smallest.
    val = np.zeros((q + 1, budget + 1), dtype=np.float64)
    wt = np.zeros((q + 1, budget + 1), dtype=np.int64)
    take = np.zeros((q, budget + 1), dtype=bool)
    for i in range(q - 1, -1, -1):
        skip_val = val[i + 1]
        skip_wt = wt[i + 1]
        w_i = int(weight_arr[i])
        feasible = capacities >= w_i
        rest = np.maximum(capacities - w_i, 0)
        take_val = np.where(feasible, value_arr[i] + val[i + 1, rest], -np.inf)
        take_wt = np.where(feasible, w_i + wt[i + 1, rest], 0)
        better = (take_val > skip_val) | (
            (take_val == skip_val) & (take_wt <= skip_wt)
        )
        take[i] = better & feasible
        val[i] = np.where(take[i], take_val, skip_val)
        wt[i] = np.where(take[i], take_wt, skip_wt)

    selected = []
    w = budget
    for i in range(q):
        if take[i, w]:
            selected.append(i)
            w -= int(weight_arr[i])
    return SummarySelection(
        selected_scenes=tuple(selected),
        budget_frames=budget,
        total_value=float(val[0, budget]),
        weight_used=int(wt[0, budget]),
        frame_mask=None,
    )


def selection_to_frame_mask(sel: SummarySelection, seg: SceneSegmentation) -> list[bool]:
    """Expand a scene selection to a per-frame boolean mask."""
    ranges = seg.scene_ranges()
    for j in sel.selected_scenes:
        if not 0 <= j < len(ranges):
            raise InconsistentSelection(f"scene index {j} outside 0..{len(ranges) - 1}")
    mask = [False] * seg.n_frames
    chosen = set(sel.selected_scenes)
    for j, (start, end) in enumerate(ranges):
        if j in chosen:
            for t in range(start, end):
                mask[t] = True
    used = sum(mask)
    if used != sel.weight_used:
        raise InconsistentSelection(
            f"mask covers {used} frames, selection reports {sel.weight_used}"
        )
    if used > sel.budget_frames:
        raise InconsistentSelection(
            f"mask covers {used} frames, over budget {sel.budget_frames}"
        )
    return mask


def with_frame_mask(sel: SummarySelection, seg: SceneSegmentation) -> SummarySelection:
    """Return the selection with its expanded frame mask attached."""
    return replace(sel, frame_mask=tuple(selection_to_frame_mask(sel, seg)))
