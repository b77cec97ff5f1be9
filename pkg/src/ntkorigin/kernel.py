"""Two-layer ReLU NTK evaluation, feature sampling and ReLU indicator machinery.

The kernel of a bias-augmented pair (x, y) is

    E_w[ (x.y + <w,x><w,y>) 1(<w,x> >= 0) 1(<w,y> >= 0) ],   w ~ N(0, I).

Two evaluation modes are provided. Monte Carlo averages the integrand over a
shared, seeded feature sample; this mode is the ground-truth estimator and is
internally consistent with the explicit feature map (same sample, same
normalization). Analytic mode uses the arc-cosine closed form

    k(x, y) = [ x.y (pi - theta) + |x||y| ((pi - theta) cos(theta) + sin(theta)) ] / (2 pi)

with theta the angle between x and y. The closed form is derived, not assumed:
the test suite gates it against the Monte Carlo estimator before anything else
relies on it.

Ties follow the ">= 0" convention: an exactly-zero pre-activation indicates 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, InvalidInput
from .geometry import AugmentedPoint, Direction, ShiftedTrainingSet


@dataclass(frozen=True, eq=False)
class FeatureSample:
    """K weight vectors of length d+1 drawn i.i.d. standard normal from a seed."""

    weights: np.ndarray
    seed: int

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] < 1 or w.shape[1] < 2:
            raise DimensionError(f"weights must be (K, d+1) with K >= 1, got {w.shape}")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "seed", int(self.seed))

    @property
    def count(self) -> int:
        return self.weights.shape[0]

    @property
    def dim(self) -> int:
        """Data dimension d (the weights live in d+1)."""
        return self.weights.shape[1] - 1

    def same_sample(self, other: "FeatureSample") -> bool:
        return (
            self is other
            or (self.seed == other.seed and self.weights.shape == other.weights.shape)
        )


@dataclass(frozen=True)
class Analytic:
    """Closed-form kernel mode."""


@dataclass(frozen=True)
class MonteCarlo:
    """Sampled kernel mode; every kernel entry of an experiment shares one sample."""

    features: FeatureSample


KernelMode = Analytic | MonteCarlo

ANALYTIC = Analytic()


@dataclass(frozen=True)
class KernelEstimate:
    """A kernel value with its Monte Carlo standard error (0 in analytic mode)."""

    value: float
    std_error: float = 0.0


def sample_features(d: int, count: int, seed: int) -> FeatureSample:
    """Draw `count` standard-normal weight vectors in R^{d+1}, reproducibly."""
    if count < 1:
        raise InvalidInput(f"feature count must be >= 1, got {count}")
    if d < 1:
        raise DimensionError(f"dimension must be >= 1, got {d}")
    rng = np.random.default_rng(seed)
    return FeatureSample(weights=rng.standard_normal((count, d + 1)), seed=seed)


def _aug_coords(p: AugmentedPoint | np.ndarray) -> np.ndarray:
    a = p.coords if isinstance(p, AugmentedPoint) else np.asarray(p, dtype=np.float64)
    if not np.all(np.isfinite(a)):
        raise InvalidInput("augmented vector contains non-finite entries")
    return a


def indicator(w: np.ndarray, p: AugmentedPoint | np.ndarray) -> int:
    """ReLU activation indicator 1(<w, p> >= 0); exact zero counts as active."""
    w = np.asarray(w, dtype=np.float64)
    a = _aug_coords(p)
    if w.shape != a.shape:
        raise DimensionError(f"weight shape {w.shape} != point shape {a.shape}")
    return int(np.dot(w, a) >= 0.0)


def limit_indicator(w: np.ndarray, v: Direction) -> int:
    """Input-agnostic indicator 1(<w, -v_hat> >= 0) of the far-shift limit.

    Every training point of a set shifted by -t*v activates exactly like this
    once t dominates the point's own coordinates.
    """
    w = np.asarray(w, dtype=np.float64)
    vhat = v.augmented()
    if w.shape != vhat.shape:
        raise DimensionError(f"weight shape {w.shape} != direction shape {vhat.shape}")
    return int(np.dot(w, -vhat) >= 0.0)


def feature_map(p: AugmentedPoint | np.ndarray, fs: FeatureSample) -> np.ndarray:
    """Per-feature blocks (p * 1_k, <w_k, p> * 1_k), one row of length d+2 per feature.

    A block is identically zero whenever its indicator is inactive. The unit
    prefactor convention makes the Monte Carlo kernel the mean over rows of the
    blockwise inner products.
    """
    a = _aug_coords(p)
    if a.size != fs.dim + 1:
        raise DimensionError(f"point dim {a.size} != feature dim {fs.dim + 1}")
    s = fs.weights @ a
    act = (s >= 0.0).astype(np.float64)
    return np.hstack([a[None, :] * act[:, None], (s * act)[:, None]])


def _mc_contribs(xa: np.ndarray, ya: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Per-feature kernel integrand values for one pair of augmented vectors."""
    sx = weights @ xa
    sy = weights @ ya
    joint = (sx >= 0.0) & (sy >= 0.0)
    return (np.dot(xa, ya) + sx * sy) * joint


def _analytic_value(xa: np.ndarray, ya: np.ndarray) -> float:
    dot = np.dot(xa, ya)
    nx = float(np.linalg.norm(xa))
    ny = float(np.linalg.norm(ya))
    # Chord-based angle: well conditioned at theta ~ 0, where arccos of a
    # rounded cosine loses half the significand.
    half_chord = float(np.linalg.norm(xa / nx - ya / ny)) / 2.0
    theta = 2.0 * np.arcsin(min(1.0, half_chord))
    cos = min(1.0, max(-1.0, dot / (nx * ny)))
    return float((dot * (np.pi - theta) + nx * ny * ((np.pi - theta) * cos + np.sin(theta))) / (2.0 * np.pi))


def ntk(x: AugmentedPoint | np.ndarray, y: AugmentedPoint | np.ndarray, mode: KernelMode) -> KernelEstimate:
    """Kernel value for a pair of augmented vectors under the requested mode."""
    xa = _aug_coords(x)
    ya = _aug_coords(y)
    if xa.shape != ya.shape:
        raise DimensionError(f"augmented shapes differ: {xa.shape} vs {ya.shape}")
    if isinstance(mode, MonteCarlo):
        c = _mc_contribs(xa, ya, mode.features.weights)
        k = c.size
        se = float(c.std(ddof=1) / np.sqrt(k)) if k > 1 else 0.0
        return KernelEstimate(value=float(c.mean()), std_error=se)
    return KernelEstimate(value=_analytic_value(xa, ya))


def kappa(v: Direction, mode: KernelMode) -> KernelEstimate:
    """Leading gram coefficient: integral of (|v_hat|^2 + <w, v_hat>^2) over the
    active half-space 1(<w, -v_hat> >= 0).

    In analytic mode this equals |v|^2 under standard normal features: the
    half-space carries probability 1/2 and contributes |v|^2/2 from each of the
    two integrand terms. The integrand is 2-homogeneous in v.
    """
    vhat = v.augmented()
    if isinstance(mode, MonteCarlo):
        w = mode.features.weights
        if w.shape[1] != vhat.size:
            raise DimensionError(f"feature dim {w.shape[1]} != direction dim {vhat.size}")
        proj = w @ vhat
        c = (vhat @ vhat + proj**2) * ((-proj) >= 0.0)
        k = c.size
        se = float(c.std(ddof=1) / np.sqrt(k)) if k > 1 else 0.0
        return KernelEstimate(value=float(c.mean()), std_error=se)
    return KernelEstimate(value=float(v.norm**2))


def agnosticism_rate(ts: ShiftedTrainingSet, fs: FeatureSample) -> float:
    """Fraction of (point, feature) pairs whose indicator disagrees with its limit.

    Disagreement requires |<w, v_hat>| of order 1/t, so the rate shrinks like
    1/t under standard normal features.
    """
    if ts.t <= 0:
        raise InvalidInput("agnosticism rate needs a strictly positive shift")
    if fs.dim != ts.dim:
        raise DimensionError(f"feature dim {fs.dim} != training dim {ts.dim}")
    pre = ts.augmented @ fs.weights.T
    inds = pre >= 0.0
    vhat = ts.direction.augmented()
    lim = (fs.weights @ (-vhat)) >= 0.0
    return float(np.mean(inds != lim[None, :]))
