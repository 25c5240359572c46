"""Wavelet-domain denoising for generalized-Gaussian coefficients.

Bayes posterior-mean estimation under a GGD prior, the shape-adaptive
R-BayesShrink soft threshold and its baselines (BayesShrink, LSEB, MAP),
per-subband parameter estimation and an orthonormal Haar pipeline.
"""

from ggdshrink.ggd import GgdModel, NoiseModel, ggd_pdf, ggd_sample, kurtosis_ratio
from ggdshrink.bayes import (
    ConvergenceError,
    EstimatorConfig,
    asymptotic_slope,
    bayes_estimate_gaussian,
    bayes_estimate_laplace,
    bayes_estimate_numeric,
    q_function,
    scaled_exp_q,
)
from ggdshrink.thresholds import (
    RuleKind,
    ThresholdRule,
    fit_optimal_threshold,
    fit_threshold_surface,
    hard_threshold,
    soft_threshold,
    threshold_bayes,
    threshold_lseb,
    threshold_map_laplace,
    threshold_r_bayes,
)
from ggdshrink.estimation import (
    SubbandStats,
    estimate_beta_mme,
    estimate_noise_mad,
    estimate_signal_sigma,
    subband_stats,
)
from ggdshrink.image import ImageBuffer
from ggdshrink.wavelet import WaveletPyramid, dwt2_forward, dwt2_inverse
from ggdshrink.metrics import psnr, ssim
from ggdshrink.pipeline import DenoiseReport, add_noise, denoise
from ggdshrink.benchmark import BenchmarkRow, benchmark_image, benchmark_synthetic

__version__ = "0.1.0"
