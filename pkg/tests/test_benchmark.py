import numpy as np
import pytest

from ggdshrink.benchmark import BenchmarkRow, benchmark_image, benchmark_synthetic, cell_rng
from ggdshrink.image import ImageBuffer
from ggdshrink.metrics import psnr
from ggdshrink.pipeline import add_noise


def by_rule(rows):
    return {(r.beta, r.snr_db, r.rule): r for r in rows}


def test_cell_rng_independent_of_order():
    a = cell_rng(3, 10).normal(size=4)
    cell_rng(3, 9).normal(size=100)
    np.testing.assert_array_equal(a, cell_rng(3, 10).normal(size=4))
    assert not np.array_equal(a, cell_rng(3, 11).normal(size=4))


def test_synthetic_deterministic():
    kw = dict(betas=[0.5], snrs_db=[10], rules=["rbayes", "bayes"], runs=1, n=4096, seed=42)
    assert benchmark_synthetic(**kw) == benchmark_synthetic(**kw)


def test_synthetic_workers_do_not_change_results():
    kw = dict(betas=[0.5, 1.0], snrs_db=[10, 20], rules=["rbayes", "lseb"], runs=3, n=4096, seed=1)
    assert benchmark_synthetic(**kw) == benchmark_synthetic(**kw, workers=2)


def test_synthetic_row_layout():
    rows = benchmark_synthetic([0.3, 1.0], [5, 30], ["rbayes", "bayes", "lseb"], runs=2, n=2048)
    assert len(rows) == 12
    assert all(isinstance(r, BenchmarkRow) and r.runs == 2 and r.ssim is None for r in rows)
    assert all(np.isfinite(r.psnr_db) for r in rows)


def test_synthetic_laplace_rules_agree():
    rows = by_rule(benchmark_synthetic([1.0], [5, 15, 30], ["rbayes", "bayes"], runs=20, n=2 ** 15, seed=2))
    for snr in (5, 15, 30):
        assert abs(rows[(1.0, snr, "rbayes")].psnr_db - rows[(1.0, snr, "bayes")].psnr_db) < 0.05


def test_synthetic_sparse_rbayes_not_worse():
    rows = by_rule(benchmark_synthetic([0.5], [15], ["rbayes", "bayes"], runs=100, n=2 ** 15, seed=3))
    assert rows[(0.5, 15, "rbayes")].psnr_db >= rows[(0.5, 15, "bayes")].psnr_db - 0.05


def test_synthetic_validation():
    with pytest.raises(ValueError):
        benchmark_synthetic([1.0], [10], ["bayes"], runs=0)
    with pytest.raises(ValueError):
        benchmark_synthetic([1.0], [10], ["bayes"], n=512)


def test_image_fixed_zero_matches_noisy(camera):
    # Keep the image away from 0 and 255 so clamping plays no part.
    mid = ImageBuffer(camera.pixels * 0.5 + 64)
    rows = benchmark_image(mid, [30], ["fixed:0"], runs=2, seed=5)
    ref = np.mean([psnr(mid, add_noise(mid, 30, cell_rng(5, i))) for i in range(2)])
    assert abs(rows[0].psnr_db - ref) < 0.01


def test_image_rows(camera):
    rows = benchmark_image(camera, [15, 25], ["rbayes", "bayes"], runs=1, seed=1)
    assert [(r.snr_db, r.rule) for r in rows] == [(15, "rbayes"), (15, "bayes"), (25, "rbayes"), (25, "bayes")]
    assert all(r.beta is None and 0 <= r.ssim <= 1 for r in rows)
    assert rows == benchmark_image(camera, [15, 25], ["rbayes", "bayes"], runs=1, seed=1)
