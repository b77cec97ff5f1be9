"""Finite-width two-layer ReLU network trained by full-batch gradient descent.

The network is f(x) = (1/sqrt(m)) sum_k a_k relu(<w_k, x_hat>) with hidden
rows initialized standard normal and output signs +-1. Hidden rows come in
duplicated pairs with opposite output signs, so the initial function is
identically zero and the trained function can be compared directly against
kernel regression without an initial-function offset. The unique half of the
hidden init is bit-identical to `sample_features(d, m // 2, seed)`, which is
what makes shared-sample kernel comparisons exact rather than statistical.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DivergenceError, InvalidInput, NaNError
from .geometry import Point, ShiftedTrainingSet
from .kernel import FeatureSample, sample_features


@dataclass(frozen=True)
class MLPConfig:
    """Width, step size, step budget and seed for one training run.

    lr=None selects 0.1 / (mean diagonal of the empirical init-time gram).
    """

    width: int
    steps: int = 20000
    lr: float | None = None
    seed: int = 0
    train_both_layers: bool = True

    def __post_init__(self):
        if self.width < 1:
            raise InvalidInput(f"width must be >= 1, got {self.width}")
        if self.steps < 0:
            raise InvalidInput(f"steps must be >= 0, got {self.steps}")
        if self.lr is not None and self.lr <= 0:
            raise InvalidInput(f"lr must be positive, got {self.lr}")


@dataclass(frozen=True, eq=False)
class MLPModel:
    """Frozen parameter snapshot; training returns new snapshots."""

    hidden: np.ndarray
    output: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.hidden, dtype=np.float64)
        a = np.asarray(self.output, dtype=np.float64)
        if h.ndim != 2 or a.ndim != 1 or h.shape[0] != a.size:
            raise DimensionError(f"inconsistent parameter shapes {h.shape}, {a.shape}")
        h.setflags(write=False)
        a.setflags(write=False)
        object.__setattr__(self, "hidden", h)
        object.__setattr__(self, "output", a)

    @property
    def width(self) -> int:
        return self.output.size

    @property
    def dim(self) -> int:
        return self.hidden.shape[1] - 1


def init_model(cfg: MLPConfig, d: int) -> MLPModel:
    """Paired init: each unique hidden row appears twice with output signs +1, -1.

    Odd widths keep one unpaired trailing neuron with output +1; its
    contribution to the initial function vanishes only as 1/sqrt(m).
    """
    half = cfg.width // 2
    rng = np.random.default_rng(cfg.seed)
    draws = rng.standard_normal((half + cfg.width % 2, d + 1))
    rows = []
    signs = []
    if half >= 1:
        rows.append(np.repeat(draws[:half], 2, axis=0))
        signs.append(np.tile([1.0, -1.0], half))
    if cfg.width % 2 == 1:
        rows.append(draws[half:])
        signs.append(np.ones(1))
    return MLPModel(hidden=np.vstack(rows), output=np.concatenate(signs))


def init_features(cfg: MLPConfig, d: int) -> FeatureSample:
    """The unique half of the paired hidden init, as a kernel feature sample."""
    if cfg.width < 2:
        raise InvalidInput("paired init needs width >= 2")
    return sample_features(d, cfg.width // 2, cfg.seed)


def evaluate(model: MLPModel, x: Point) -> float:
    """Network output (1/sqrt(m)) sum_k a_k relu(<w_k, x_hat>)."""
    return float(evaluate_batch(model, x.coords[None, :])[0])


def evaluate_batch(model: MLPModel, xs: np.ndarray) -> np.ndarray:
    xs = np.asarray(xs, dtype=np.float64)
    if xs.ndim != 2 or xs.shape[1] != model.dim:
        raise DimensionError(f"expected (n, {model.dim}) inputs, got {xs.shape}")
    aug = np.hstack([xs, np.ones((xs.shape[0], 1))])
    z = aug @ model.hidden.T
    return np.maximum(z, 0.0) @ model.output / np.sqrt(model.width)


def train(
    model: MLPModel,
    ts: ShiftedTrainingSet,
    cfg: MLPConfig,
    target_loss: float | None = None,
) -> tuple[MLPModel, np.ndarray]:
    """Full-batch gradient descent on half the summed squared error.

    Returns the trained snapshot and the loss trace (one entry per step plus
    the initial loss). Aborts with DivergenceError if the loss exceeds ten
    times its initial value, and with NaNError on non-finite loss.
    """
    if ts.dim != model.dim:
        raise DimensionError(f"training dim {ts.dim} != model dim {model.dim}")
    a_in = ts.augmented
    y = ts.labels
    sq = np.sqrt(model.width)

    hidden = model.hidden.copy()
    out = model.output.copy()

    if cfg.lr is None:
        # Mean diagonal of the init-time tangent gram: per input i, the mean
        # over features of (|x_i|^2 + <w_k, x_i>^2) 1(<w_k, x_i> >= 0).
        z0 = a_in @ hidden.T
        contrib = ((a_in * a_in).sum(axis=1)[:, None] + z0**2) * (z0 >= 0.0)
        lr = 0.1 / float(contrib.mean(axis=1).mean())
    else:
        lr = cfg.lr

    losses = np.empty(cfg.steps + 1)
    f = np.maximum(a_in @ hidden.T, 0.0) @ out / sq
    loss0 = 0.5 * float(np.sum((f - y) ** 2))
    losses[0] = loss0
    abort_at = 10.0 * loss0 if loss0 > 0 else np.inf

    for step in range(cfg.steps):
        z = a_in @ hidden.T
        act = z >= 0.0
        relu = np.where(act, z, 0.0)
        resid = relu @ out / sq - y
        grad_out = relu.T @ resid / sq
        out_next = out - lr * grad_out
        if cfg.train_both_layers:
            grad_hidden = ((act * resid[:, None]) * out[None, :]).T @ a_in / sq
            hidden = hidden - lr * grad_hidden
        out = out_next
        loss = 0.5 * float(np.sum((np.maximum(a_in @ hidden.T, 0.0) @ out / sq - y) ** 2))
        losses[step + 1] = loss
        if not np.isfinite(loss):
            raise NaNError(f"loss became non-finite at step {step + 1}")
        if loss > abort_at:
            raise DivergenceError(f"loss {loss:.3e} exceeded 10x initial at step {step + 1}")
        if target_loss is not None and loss <= target_loss:
            losses = losses[: step + 2]
            break

    return MLPModel(hidden=hidden, output=out), losses


def parameter_displacement(before: MLPModel, after: MLPModel) -> float:
    """Relative parameter movement |theta_after - theta_before| / |theta_before|."""
    num = np.sqrt(
        np.sum((after.hidden - before.hidden) ** 2) + np.sum((after.output - before.output) ** 2)
    )
    den = np.sqrt(np.sum(before.hidden**2) + np.sum(before.output**2))
    return float(num / den)


def export_loss_trace(losses: np.ndarray, path) -> None:
    """Write (step, loss) rows as CSV with 17 significant digits."""
    with open(path, "w") as fh:
        fh.write("step,loss\n")
        for i, v in enumerate(np.asarray(losses, dtype=np.float64)):
            fh.write(f"{i},{v:.17g}\n")
