"""Scene segmentation: exact DP-vs-enumeration oracle, scatter oracle, ties."""

import itertools
import math

import numpy as np
import pytest

from capsum.errors import InvalidSceneCount, ZeroNormVector
from capsum.kts import (
    KernelConfig,
    SceneSegmentation,
    _dp_tables,
    kernel_matrix,
    kts_segment,
    scatter_table,
)


def fold_cost(table, bounds, n):
    """Total cost of one boundary list, added in the DP's exact order.

    The DP accumulates right to left (last scene's scatter first), so the
    oracle folds the same way to stay bit-identical.
    """
    starts = [0] + list(bounds)
    ends = list(bounds) + [n]
    total = float(table[starts[-1], ends[-1] - 1])
    for start, end in zip(reversed(starts[:-1]), reversed(ends[:-1])):
        total = float(table[start, end - 1]) + total
    return total


def enumerate_best(table, n, q):
    """Exhaustive minimum over all boundary placements, lex-smallest on ties."""
    best_val = None
    best_bounds = None
    for bounds in itertools.combinations(range(1, n), q - 1):
        val = fold_cost(table, bounds, n)
        if best_val is None or val < best_val:
            best_val, best_bounds = val, bounds
    return best_val, best_bounds


def two_block_embs():
    a = [1.0, 0.0]
    b = [0.0, 1.0]
    return np.array([a, a, a, b, b, b])


def test_two_orthogonal_blocks_split_at_three():
    seg = kts_segment(two_block_embs(), KernelConfig(), q=2)
    assert seg.boundaries == (3,)
    assert seg.n_scenes == 2
    assert seg.scene_lengths() == [3, 3]


def test_fixed_q_gives_q_scenes():
    rng = np.random.default_rng(4)
    embs = rng.standard_normal((15, 6))
    for q in range(1, 6):
        seg = kts_segment(embs, KernelConfig(), q=q)
        assert seg.n_scenes == q
        assert all(0 < b < 15 for b in seg.boundaries)
        assert list(seg.boundaries) == sorted(set(seg.boundaries))


def test_single_frame():
    seg = kts_segment(np.array([[1.0, 2.0]]), KernelConfig())
    assert seg.boundaries == ()
    assert seg.n_frames == 1
    with pytest.raises(InvalidSceneCount):
        kts_segment(np.array([[1.0, 2.0]]), KernelConfig(), q=2)


def test_q_out_of_range():
    embs = np.random.default_rng(0).standard_normal((5, 3))
    with pytest.raises(InvalidSceneCount):
        kts_segment(embs, KernelConfig(), q=0)
    with pytest.raises(InvalidSceneCount):
        kts_segment(embs, KernelConfig(), q=6)
    with pytest.raises(InvalidSceneCount):
        kts_segment(embs, KernelConfig(max_scenes=3), q=4)


def test_kernel_is_exactly_symmetric():
    embs = np.random.default_rng(1).standard_normal((9, 4))
    kernel = kernel_matrix(embs, KernelConfig())
    assert np.array_equal(kernel, kernel.T)


def test_kernel_rejects_zero_rows():
    embs = np.array([[1.0, 0.0], [0.0, 0.0]])
    with pytest.raises(ZeroNormVector):
        kernel_matrix(embs, KernelConfig())


def test_scatter_independent_oracle():
    """scatter(a..b) equals the direct sum of squared deviations.

    The implementation goes through the kernel identity and prefix sums;
    the oracle recomputes each span from normalized rows directly.
    """
    rng = np.random.default_rng(7)
    embs = rng.standard_normal((10, 4))
    table = scatter_table(kernel_matrix(embs, KernelConfig()))
    unit = embs / np.linalg.norm(embs, axis=1)[:, None]
    n = embs.shape[0]
    for a in range(n):
        for b in range(a, n):
            span = unit[a : b + 1]
            centered = span - span.mean(axis=0)
            expected = float(np.sum(centered * centered))
            assert table[a, b] == pytest.approx(expected, abs=1e-9)


def test_dp_matches_enumeration_exactly():
    """DP value and boundaries equal brute-force enumeration, bit for bit."""
    rng = np.random.default_rng(99)
    checked = 0
    for _ in range(30):
        n = int(rng.integers(4, 13))
        d = int(rng.integers(2, 5))
        q = int(rng.integers(2, min(4, n) + 1))
        embs = rng.standard_normal((n, d))
        cfg = KernelConfig()
        table = scatter_table(kernel_matrix(embs, cfg))
        best, _choice = _dp_tables(table, n, q)

        expected_val, expected_bounds = enumerate_best(table, n, q)
        assert float(best[q, 0]) == expected_val
        seg = kts_segment(embs, cfg, q=q)
        assert seg.boundaries == expected_bounds
        checked += 1
    assert checked == 30


def test_all_identical_frames_tie_to_lex_smallest():
    embs = np.tile(np.array([0.6, 0.8]), (7, 1))
    seg = kts_segment(embs, KernelConfig(), q=4)
    assert seg.boundaries == (1, 2, 3)


def test_model_selection_picks_two_blocks():
    """With pure orthogonal blocks, penalized selection lands on q=2.

    objective(1) = 3 (cross-block mass), objective(q>=2) = 0 with growing
    penalty q*(log(n/q)+1), minimized at q=2.
    """
    seg = kts_segment(two_block_embs(), KernelConfig())
    assert seg.n_scenes == 2
    assert seg.boundaries == (3,)


def test_model_selection_tie_prefers_fewest_scenes():
    # identical frames and zero penalty: every q scores 0, pick q=1
    embs = np.tile(np.array([1.0, 0.0]), (6, 1))
    seg = kts_segment(embs, KernelConfig(penalty_weight=0.0))
    assert seg.n_scenes == 1


def test_model_selection_respects_max_scenes():
    rng = np.random.default_rng(11)
    embs = rng.standard_normal((20, 4))
    seg = kts_segment(embs, KernelConfig(max_scenes=3))
    assert seg.n_scenes <= 3


def test_penalty_formula_crossover():
    """Frozen check of the selection objective on the two-block input."""
    n = 6
    table = scatter_table(kernel_matrix(two_block_embs(), KernelConfig()))
    best, _ = _dp_tables(table, n, 6)
    costs = {
        q: float(best[q, 0]) + q * (math.log(n / q) + 1.0) for q in range(1, 7)
    }
    assert costs[1] == pytest.approx(3.0 + math.log(6.0) + 1.0, abs=1e-9)
    assert costs[2] == pytest.approx(2.0 * (math.log(3.0) + 1.0), abs=1e-9)
    assert min(costs, key=costs.get) == 2


def test_determinism():
    rng = np.random.default_rng(13)
    embs = rng.standard_normal((12, 5))
    first = kts_segment(embs, KernelConfig())
    second = kts_segment(embs.copy(), KernelConfig())
    assert first == second


def test_scene_helpers():
    seg = SceneSegmentation(boundaries=(2, 5), n_frames=8)
    assert seg.n_scenes == 3
    assert seg.scene_ranges() == [(0, 2), (2, 5), (5, 8)]
    assert seg.scene_lengths() == [2, 3, 3]
    assert seg.scene_of_frame().tolist() == [0, 0, 1, 1, 1, 2, 2, 2]


def test_boundary_validation():
    with pytest.raises(InvalidSceneCount):
        SceneSegmentation(boundaries=(5,), n_frames=5)
    with pytest.raises(InvalidSceneCount):
        SceneSegmentation(boundaries=(3, 2), n_frames=5)
    with pytest.raises(InvalidSceneCount):
        SceneSegmentation(boundaries=(2, 2), n_frames=5)


def test_linear_kernel_supported():
    embs = np.random.default_rng(5).standard_normal((8, 3))
    seg = kts_segment(embs, KernelConfig(kernel="linear"), q=3)
    assert seg.n_scenes == 3
