"""Thresholding maps, closed-form threshold rules and threshold fitting."""

from __future__ import annotations

import enum
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from ggdshrink.bayes import DEFAULT_CONFIG, EstimatorConfig, posterior_moments
from ggdshrink.ggd import GgdModel, NoiseModel

logger = logging.getLogger(__name__)

# Returned when the clean-signal deviation is zero: the subband is pure
# noise and every coefficient is set to zero.
KILL = math.inf

_SQRT2 = math.sqrt(2.0)


class RuleKind(enum.Enum):
    R_BAYES = "rbayes"
    BAYES = "bayes"
    LSEB = "lseb"
    MAP_LAPLACE = "map"
    FIXED = "fixed"


@dataclass(frozen=True)
class ThresholdRule:
    kind: RuleKind
    value: float = 0.0

    def __post_init__(self):
        if self.kind is RuleKind.FIXED and not (self.value >= 0):
            raise ValueError(f"fixed threshold must be >= 0, got {self.value!r}")

    @property
    def needs_beta(self) -> bool:
        return self.kind in (RuleKind.R_BAYES, RuleKind.LSEB)

    @property
    def name(self) -> str:
        if self.kind is RuleKind.FIXED:
            return f"fixed:{self.value:g}"
        return self.kind.value

    @classmethod
    def parse(cls, text: str) -> "ThresholdRule":
        """Parse ``rbayes``, ``bayes``, ``lseb``, ``map`` or ``fixed:T``."""
        text = text.strip().lower()
        if text.startswith("fixed"):
            _, _, val = text.partition(":")
            if not val:
                raise ValueError("fixed rule needs a value, e.g. fixed:0")
            return cls(RuleKind.FIXED, float(val))
        try:
            return cls(RuleKind(text))
        except ValueError:
            names = ", ".join(k.value for k in RuleKind)
            raise ValueError(f"unknown rule {text!r}; expected one of {names}") from None

    def threshold(self, sigma_w: float, sigma_ybar: float, beta: float | None = None) -> float:
        """Threshold for a subband with the given estimates.

        With ``sigma_w == 0`` nothing is removed; with ``sigma_ybar == 0``
        the kill sentinel is returned.
        """
        if self.kind is RuleKind.FIXED:
            return self.value
        if sigma_w == 0:
            return 0.0
        if sigma_ybar == 0:
            return KILL
        if self.kind is RuleKind.BAYES:
            return threshold_bayes(sigma_w, sigma_ybar)
        if self.kind is RuleKind.MAP_LAPLACE:
            return threshold_map_laplace(sigma_w, sigma_ybar)
        if beta is None:
            raise ValueError(f"rule {self.name} needs a shape estimate")
        if self.kind is RuleKind.R_BAYES:
            return threshold_r_bayes(sigma_w, sigma_ybar, beta)
        return threshold_lseb(sigma_w, sigma_ybar, beta)


def soft_threshold(theta, T):
    """``sign(theta) * max(|theta| - T, 0)``; ``T = inf`` zeroes everything."""
    th = np.asarray(theta, dtype=float)
    if np.any(np.asarray(T) < 0):
        raise ValueError("threshold must be non-negative")
    out = np.sign(th) * np.maximum(np.abs(th) - T, 0.0)
    return float(out) if out.ndim == 0 else out


def hard_threshold(theta, T):
    """Keep coefficients with ``|theta| >= T``, zero the rest."""
    th = np.asarray(theta, dtype=float)
    if np.any(np.asarray(T) < 0):
        raise ValueError("threshold must be non-negative")
    out = np.where(np.abs(th) < T, 0.0, th)
    return float(out) if out.ndim == 0 else out


def _check_sigma_w(sigma_w):
    if not sigma_w > 0:
        raise ValueError(f"sigma_w must be positive, got {sigma_w!r}")


def threshold_r_bayes(sigma_w: float, sigma_ybar: float, beta: float) -> float:
    """Shape-adaptive R-BayesShrink threshold.

    ``(1/sqrt(beta)) * sigma_w * (sigma_w / sigma_ybar) ** sqrt(beta)``;
    reduces to BayesShrink at ``beta = 1``.
    """
    _check_sigma_w(sigma_w)
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta!r}")
    if sigma_ybar == 0:
        return KILL
    if beta == 1.0:
        # Written out so the identity with BayesShrink is exact in floating point.
        return sigma_w * sigma_w / sigma_ybar
    rb = math.sqrt(beta)
    return sigma_w * (sigma_w / sigma_ybar) ** rb / rb


def threshold_bayes(sigma_w: float, sigma_ybar: float) -> float:
    """BayesShrink: ``sigma_w**2 / sigma_ybar``."""
    _check_sigma_w(sigma_w)
    if sigma_ybar == 0:
        return KILL
    return sigma_w * sigma_w / sigma_ybar


def threshold_lseb(sigma_w: float, sigma_ybar: float, beta: float) -> float:
    """LSE-based threshold ``sqrt(2) beta**1.8 sigma_w**2 / sigma_ybar**beta``.

    Not scale-equivariant: ``sigma_ybar`` enters raised to ``beta``.
    """
    _check_sigma_w(sigma_w)
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta!r}")
    if sigma_ybar == 0:
        return KILL
    if beta == 1.0:
        return _SQRT2 * sigma_w * sigma_w / sigma_ybar
    return _SQRT2 * beta ** 1.8 * sigma_w * sigma_w / sigma_ybar ** beta


def threshold_map_laplace(sigma_w: float, sigma_ybar: float) -> float:
    """Soft threshold of the MAP estimator under a Laplace prior."""
    _check_sigma_w(sigma_w)
    if sigma_ybar == 0:
        return KILL
    return _SQRT2 * sigma_w * sigma_w / sigma_ybar


# ---------------------------------------------------------------------------
# Fitting a soft threshold to the Bayes estimator
# ---------------------------------------------------------------------------

class NonUnimodalError(ValueError):
    """The threshold objective has more than one local minimum on the scan grid."""

    def __init__(self, message, grid, values):
        super().__init__(message)
        self.grid = grid
        self.values = values


class UnderdeterminedFitError(ValueError):
    pass


_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section(f, a, b, tol):
    """Minimise a unimodal ``f`` on ``[a, b]`` to an interval shorter than ``tol``."""
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _theta_nodes(noise: NoiseModel, prior: GgdModel) -> np.ndarray:
    w = noise.sigma_w
    # Beyond the point where the prior density has dropped by exp(-30) the
    # marginal carries no mass that matters at double precision.
    reach = 30.0 ** (1.0 / prior.beta) / prior.alpha
    far = max(40.0 * w, reach + 12.0 * w)
    near = np.arange(0.0, 40.0 * w, w / 16.0)
    tail = 40.0 * w * np.geomspace(1.0, far / (40.0 * w), max(2, int(np.log(far / (40.0 * w)) / np.log(1.04)) + 2))
    return np.unique(np.concatenate([near, tail]))


@dataclass
class ThresholdObjective:
    """Weighted squared gap between the Bayes estimate and a soft threshold.

    ``J(T) = integral p(theta) (bayes(theta) - soft(theta, T))**2 dtheta``,
    with ``p`` the density of the noisy coefficient. Built from spline
    interpolants of the posterior mean and marginal so that ``J`` can be
    evaluated for any ``T`` without further quadrature.
    """

    noise: NoiseModel
    prior: GgdModel
    cfg: EstimatorConfig = DEFAULT_CONFIG
    nodes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        th = _theta_nodes(self.noise, self.prior)
        est = np.empty_like(th)
        dens = np.empty_like(th)
        for i, t in enumerate(th):
            est[i], dens[i] = posterior_moments(float(t), self.noise, self.prior, self.cfg)
        self.nodes = th
        r = th - est  # shrinkage amount
        # Cumulative integrals of p*est^2, p, p*r, p*r^2 on [0, theta].
        self._cum = [CubicSpline(th, y).antiderivative() for y in
                     (dens * est ** 2, dens, dens * r, dens * r ** 2)]
        self._tot = [c(th[-1]) for c in self._cum]

    def __call__(self, T: float) -> float:
        T = min(max(T, 0.0), float(self.nodes[-1]))
        a0, p, r1, r2 = (float(c(T)) for c in self._cum)
        _, pt, r1t, r2t = self._tot
        # Below T the soft map is 0; above it the gap is (T - r).
        half = a0 + T * T * (pt - p) - 2.0 * T * (r1t - r1) + (r2t - r2)
        return 2.0 * half


def fit_optimal_threshold(noise: NoiseModel, prior: GgdModel,
                          cfg: EstimatorConfig = DEFAULT_CONFIG,
                          objective: ThresholdObjective | None = None) -> float:
    """Soft threshold closest (in weighted MSE) to the Bayes estimator.

    A 64-point scan over ``[0, 10 sigma_w]`` brackets the minimum, then
    golden-section search refines it to ``1e-4 sigma_w``.

    Raises
    ------
    NonUnimodalError
        If the scan finds more than one local minimum.
    """
    J = objective if objective is not None else ThresholdObjective(noise, prior, cfg)
    w = noise.sigma_w
    grid = np.linspace(0.0, 10.0 * w, 64)
    vals = np.array([J(t) for t in grid])
    slack = 1e-12 * np.max(np.abs(vals))
    interior = (vals[1:-1] < vals[:-2] - slack) & (vals[1:-1] < vals[2:] - slack)
    n_min = int(interior.sum()) + int(vals[0] < vals[1] - slack) + int(vals[-1] < vals[-2] - slack)
    if n_min > 1:
        raise NonUnimodalError(
            f"threshold objective has {n_min} local minima on [0, {10 * w:g}] "
            f"for sigma_w={w:g}, sigma_ybar={prior.sigma:g}, beta={prior.beta:g}",
            grid, vals,
        )
    k = int(np.argmin(vals))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, grid.size - 1)]
    return golden_section(J, lo, hi, 1e-4 * w)


@dataclass
class SurfaceFitResult:
    a: float
    b1: float
    b2_samples: dict
    b3_samples: dict
    residual: float
    points: list = field(default_factory=list)
    failures: list = field(default_factory=list)


DEFAULT_BETAS = (0.4, 0.6, 0.8, 1.0)
DEFAULT_SIGMA_WS = (1.0, 2.0, 5.0, 10.0)
DEFAULT_SIGMA_YBARS = (2.0, 5.0, 10.0, 20.0)


def _fit_point(args):
    beta, sw, sy, cfg = args
    try:
        return beta, sw, sy, fit_optimal_threshold(NoiseModel(sw), GgdModel(sy, beta), cfg), None
    except Exception as exc:  # recorded, excluded from the regression
        return beta, sw, sy, None, repr(exc)


def fit_threshold_surface(beta_grid=DEFAULT_BETAS, sigma_w_grid=DEFAULT_SIGMA_WS,
                          sigma_ybar_grid=DEFAULT_SIGMA_YBARS,
                          cfg: EstimatorConfig = DEFAULT_CONFIG,
                          workers: int = 1) -> SurfaceFitResult:
    """Fit ``T = a beta**b1 sigma_w**b2(beta) sigma_ybar**b3(beta)`` to optimal thresholds.

    Optimal thresholds are computed on the Cartesian grid (pairs with
    ``sigma_ybar <= sigma_w / 2`` are skipped), then ``log T`` is regressed
    on an intercept, ``log beta`` and per-beta slopes in ``log sigma_w`` and
    ``log sigma_ybar``.
    """
    betas = sorted(set(float(b) for b in beta_grid))
    if not betas or not sigma_w_grid or not sigma_ybar_grid:
        raise ValueError("grids must be non-empty")
    if betas[0] < 0.3 or betas[-1] > 1.2:
        raise ValueError("beta grid must lie within [0.3, 1.2]")
    tasks = [(b, float(sw), float(sy), cfg) for b in betas for sw in sigma_w_grid
             for sy in sigma_ybar_grid if sy > sw / 2.0]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_fit_point, tasks))
    else:
        results = [_fit_point(t) for t in tasks]
    ok = [(b, sw, sy, T) for b, sw, sy, T, err in results if err is None]
    failures = [(b, sw, sy, err) for b, sw, sy, T, err in results if err is not None]
    for f in failures:
        logger.warning("threshold fit failed at beta=%g sigma_w=%g sigma_ybar=%g: %s", *f)
    if len(failures) > 0.2 * len(results):
        raise RuntimeError(f"{len(failures)} of {len(results)} grid points failed")

    nb = len(betas)
    col = {b: i for i, b in enumerate(betas)}
    X = np.zeros((len(ok), 2 + 2 * nb))
    y = np.empty(len(ok))
    for r, (b, sw, sy, T) in enumerate(ok):
        j = col[b]
        X[r, 0] = 1.0
        X[r, 1] = math.log(b)
        X[r, 2 + 2 * j] = math.log(sw)
        X[r, 3 + 2 * j] = math.log(sy)
        y[r] = math.log(T)
    if len(ok) < X.shape[1] or np.linalg.matrix_rank(X) < X.shape[1]:
        raise UnderdeterminedFitError(
            f"surface regression is underdetermined: {len(ok)} points, "
            f"{X.shape[1]} unknowns, rank {np.linalg.matrix_rank(X)}"
        )
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = float(np.sqrt(np.mean((X @ coef - y) ** 2)))
    return SurfaceFitResult(
        a=math.exp(coef[0]),
        b1=float(coef[1]),
        b2_samples={b: float(coef[2 + 2 * col[b]]) for b in betas},
        b3_samples={b: float(coef[3 + 2 * col[b]]) for b in betas},
        residual=resid,
        points=ok,
        failures=failures,
    )
