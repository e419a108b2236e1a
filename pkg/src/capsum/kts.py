"""Kernel temporal segmentation: scene boundaries by dynamic programming.

The frame sequence is cut into contiguous scenes minimizing total
within-scene scatter, where scatter is expressed through a similarity
kernel: scatter(a..b) = sum of K[t][t] over the span minus the span's
total kernel mass divided by its length. When the scene count is not
given, it is chosen by penalized model selection.

Exact tie-breaking: among boundary lists reaching the optimal objective,
the lexicographically smallest is returned, so runs are reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidSceneCount, ZeroNormVector
from .scoring import _as_matrix


@dataclass(frozen=True)
class KernelConfig:
    kernel: str = "cosine"
    max_scenes: int = 10
    penalty_weight: float = 1.0

    def __post_init__(self):
        if self.kernel not in ("cosine", "linear"):
            raise ValueError(f"unknown kernel {self.kernel!r}")
        if self.max_scenes < 1:
            raise ValueError(f"max_scenes must be >= 1, got {self.max_scenes}")
        if self.penalty_weight < 0.0:
            raise ValueError(f"penalty_weight must be >= 0, got {self.penalty_weight}")


@dataclass(frozen=True)
class SceneSegmentation:
    """Partition of frames 0..n-1 into contiguous scenes.

    boundaries holds the start index of every scene but the first, so q =
    len(boundaries) + 1 and scene j spans [boundary_j, boundary_{j+1}).
    """

    boundaries: tuple
    n_frames: int

    def __post_init__(self):
        object.__setattr__(self, "boundaries", tuple(int(b) for b in self.boundaries))
        if self.n_frames < 1:
            raise InvalidSceneCount(f"n_frames must be >= 1, got {self.n_frames}")
        prev = 0
        for b in self.boundaries:
            if not 0 < b < self.n_frames:
                raise InvalidSceneCount(f"boundary {b} outside (0, {self.n_frames})")
            if b <= prev:
                raise InvalidSceneCount("boundaries must be strictly increasing")
            prev = b

    @property
    def n_scenes(self) -> int:
        return len(self.boundaries) + 1

    def scene_ranges(self) -> list[tuple[int, int]]:
        starts = (0,) + self.boundaries
        ends = self.boundaries + (self.n_frames,)
        return list(zip(starts, ends))

    def scene_lengths(self) -> list[int]:
        return [end - start for start, end in self.scene_ranges()]

    def scene_of_frame(self) -> np.ndarray:
        """Length-n array mapping each frame to its scene index."""
        out = np.empty(self.n_frames, dtype=np.int64)
        for j, (start, end) in enumerate(self.scene_ranges()):
            out[start:end] = j
        return out


def kernel_matrix(embs, cfg: KernelConfig) -> np.ndarray:
    """Symmetric frame-similarity kernel (cosine or raw inner product)."""
    matrix = _as_matrix(embs)
    if cfg.kernel == "cosine":
        norms = np.linalg.norm(matrix, axis=1)
        if np.any(norms == 0.0):
            raise ZeroNormVector("cannot build a cosine kernel over a zero-norm row")
        matrix = matrix / norms[:, None]
    kernel = matrix @ matrix.T
    return (kernel + kernel.T) / 2.0


def scatter_table(kernel: np.ndarray) -> np.ndarray:
    """J[a][b] = within-segment scatter of frames a..b inclusive.

    Uses the kernel identity: scatter = trace over the span minus the
    span's kernel mass over its length, via prefix sums. Only a <= b
    entries are meaningful.
    """
    n = kernel.shape[0]
    diag_csum = np.concatenate(([0.0], np.cumsum(np.diag(kernel))))
    prefix = np.zeros((n + 1, n + 1), dtype=np.float64)
    prefix[1:, 1:] = kernel.cumsum(axis=0).cumsum(axis=1)
    table = np.zeros((n, n), dtype=np.float64)
    for a in range(n):
        bs = np.arange(a, n)
        lengths = bs - a + 1
        trace = diag_csum[bs + 1] - diag_csum[a]
        mass = prefix[bs + 1, bs + 1] - prefix[a, bs + 1] - prefix[bs + 1, a] + prefix[a, a]
        table[a, a:] = trace - mass / lengths
    return table


def _dp_tables(table: np.ndarray, n: int, q_max: int):
    """Suffix DP: best[k][i] = minimal cost splitting frames i.. into k scenes.

    choice[k][i] is the smallest next-scene start achieving that cost, so
    following choice front-to-back yields the lexicographically smallest
    optimal boundary list.
    """
    best = np.full((q_max + 1, n + 1), np.inf)
    choice = np.zeros((q_max + 1, n), dtype=np.int64)
    best[1, :n] = table[:, n - 1]
    for k in range(2, q_max + 1):
        for i in range(0, n - k + 1):
            starts = np.arange(i + 1, n - k + 2)
            costs = table[i, starts - 1] + best[k - 1, starts]
            pick = int(np.argmin(costs))
            best[k, i] = costs[pick]
            choice[k, i] = starts[pick]
    return best, choice


def _reconstruct(choice: np.ndarray, q: int) -> list[int]:
    bounds = []
    i = 0
    for k in range(q, 1, -1):
        t = int(choice[k, i])
        bounds.append(t)
        i = t
    return bounds


def kts_segment(embs, cfg: KernelConfig, q: int | None = None) -> SceneSegmentation:
    """Optimal segmentation for fixed q, or penalized model selection.

    Model selection minimizes objective(q) + penalty_weight*q*(log(n/q)+1)
    over 1 <= q <= min(n, max_scenes), preferring smaller q on ties.
    """
    matrix = _as_matrix(embs)
    n = matrix.shape[0]
    if n == 1:
        if q is not None and q != 1:
            raise InvalidSceneCount(f"cannot cut 1 frame into {q} scenes")
        return SceneSegmentation(boundaries=(), n_frames=1)
    q_cap = min(n, cfg.max_scenes)
    if q is not None:
        if not 1 <= q <= q_cap:
            raise InvalidSceneCount(f"q={q} outside [1, {q_cap}] for n={n}")
        if q == 1:
            return SceneSegmentation(boundaries=(), n_frames=n)
        q_max = q
    else:
        q_max = q_cap

    kernel = kernel_matrix(embs, cfg)
    table = scatter_table(kernel)
    best, choice = _dp_tables(table, n, q_max)

    if q is None:
        chosen = 1
        chosen_cost = best[1, 0] + cfg.penalty_weight * 1.0 * (math.log(n / 1.0) + 1.0)
        for candidate in range(2, q_max + 1):
            cost = best[candidate, 0] + cfg.penalty_weight * candidate * (
                math.log(n / candidate) + 1.0
            )
            if cost < chosen_cost:
                chosen = candidate
                chosen_cost = cost
        q = chosen
        if q == 1:
            return SceneSegmentation(boundaries=(), n_frames=n)

    return SceneSegmentation(boundaries=tuple(_reconstruct(choice, q)), n_frames=n)
