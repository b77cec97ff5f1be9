"""Gram assembly, Tikhonov solves, and the rank-one asymptotic closed forms.

The training gram of a far-shifted set approaches kappa * t^2 * J, a rank-one
matrix. Regularized with delta*I it inverts in closed form,

    (delta I + kappa t^2 J)^{-1} = (1/delta) I - t^2 kappa / (delta (n kappa t^2 + delta)) J,

and the product of labels with that inverse has an explicit per-entry formula.
Production solves never form an inverse; they factor K + delta*I and refine.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
import scipy.linalg as sla

from .errors import (
    DimensionError,
    InvalidInput,
    InvalidRegularization,
    NumericalFailure,
)
from .geometry import ShiftedTrainingSet
from .kernel import FeatureSample, KernelMode, MonteCarlo, _analytic_value, _mc_contribs

RESIDUAL_BOUND = 1e-8


@dataclass(frozen=True, eq=False)
class GramMatrix:
    """Symmetric kernel gram with the mode it was assembled under."""

    entries: np.ndarray
    mode: str = "analytic"
    features: FeatureSample | None = None

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=np.float64)
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise DimensionError(f"gram must be square, got {e.shape}")
        if not np.all(np.isfinite(e)):
            raise InvalidInput("gram contains non-finite entries")
        if not np.array_equal(e, e.T):
            raise InvalidInput("gram entries are not exactly symmetric")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def mean_diagonal(self) -> float:
        return float(np.mean(np.diag(self.entries)))

    @property
    def is_degenerate(self) -> bool:
        return bool(np.all(self.entries == 0.0))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries)[0])

    def dump_csv(self, path) -> None:
        """Row-major plain-text dump with 17 significant digits."""
        with open(path, "w") as fh:
            for row in self.entries:
                fh.write(",".join(f"{x:.17g}" for x in row) + "\n")


@dataclass(frozen=True)
class TikhonovConfig:
    """Regularization strength, either absolute or scaled by the mean diagonal."""

    delta: float
    mode: Literal["absolute", "relative"] = "absolute"

    def __post_init__(self):
        if self.delta <= 0:
            raise InvalidRegularization(f"delta must be positive, got {self.delta}")
        if self.mode not in ("absolute", "relative"):
            raise InvalidRegularization(f"unknown delta mode {self.mode!r}")

    def resolve(self, gram: GramMatrix) -> float:
        """Effective delta for a concrete gram."""
        if self.mode == "absolute":
            return float(self.delta)
        return float(self.delta) * gram.mean_diagonal


DEFAULT_TIKHONOV = TikhonovConfig(delta=1e-8, mode="relative")


@dataclass(frozen=True, eq=False)
class AlphaVector:
    """Solution of (K + delta I) alpha = Y, with solve diagnostics attached."""

    values: np.ndarray
    delta: float
    residual: float = 0.0
    features: FeatureSample | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if not np.all(np.isfinite(v)):
            raise InvalidInput("alpha contains non-finite entries")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.size


def assemble_gram(ts: ShiftedTrainingSet, mode: KernelMode) -> GramMatrix:
    """Pairwise kernel matrix of the shifted training inputs.

    Only the upper triangle is computed; the mirror makes symmetry exact in
    floating point. Monte Carlo entries share the sample's per-point
    pre-activations so gram entries match scalar `ntk` calls bit for bit.
    """
    a = ts.augmented
    n = ts.n
    out = np.zeros((n, n))
    if isinstance(mode, MonteCarlo):
        w = mode.features.weights
        if w.shape[1] != a.shape[1]:
            raise DimensionError("feature sample dimension does not match training set")
        for i in range(n):
            for j in range(i, n):
                out[i, j] = _mc_contribs(a[i], a[j], w).mean()
        tag, feats = "mc", mode.features
    else:
        for i in range(n):
            for j in range(i, n):
                out[i, j] = _analytic_value(a[i], a[j])
        tag, feats = "analytic", None
    out = np.triu(out) + np.triu(out, 1).T
    return GramMatrix(entries=out, mode=tag, features=feats)


def asymptotic_gram(n: int, kappa: float, t: float) -> GramMatrix:
    """The far-shift limit gram kappa * t^2 * J (all entries equal)."""
    if n < 1:
        raise DimensionError(f"n must be >= 1, got {n}")
    if kappa < 0 or t < 0:
        raise InvalidInput("kappa and t must be nonnegative")
    return GramMatrix(entries=np.full((n, n), float(kappa) * float(t) ** 2), mode="analytic")


def sherman_morrison_inverse(
    n: int, kappa: float, t: float, delta: float, dtype=np.float64
) -> np.ndarray:
    """Closed-form inverse of delta*I + kappa*t^2*J.

    The diagonal is evaluated as ((n-1) kappa t^2 + delta) / (delta (n kappa t^2 + delta)),
    which is the same quantity as 1/delta + off-diagonal but avoids the
    catastrophic cancellation of the naive difference when kappa t^2 >> delta.
    Pass dtype=np.longdouble for identity-residual studies below float64 ulp.
    """
    if delta <= 0:
        raise InvalidRegularization(f"delta must be positive, got {delta}")
    if n < 1:
        raise DimensionError(f"n must be >= 1, got {n}")
    if kappa < 0 or t < 0:
        raise InvalidInput("kappa and t must be nonnegative")
    one = dtype(1.0)
    kp, tt, dl, nn = dtype(kappa), dtype(t), dtype(delta), dtype(n)
    lead = kp * tt * tt
    denom = dl * (nn * lead + dl)
    off = -lead / denom
    diag = ((nn - one) * lead + dl) / denom
    out = np.full((n, n), off, dtype=dtype)
    out[np.diag_indices(n)] = diag
    return out


def _cholesky_solve_longdouble(g: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Unblocked Cholesky solve in extended precision (desk-scale n only)."""
    g = g.astype(np.longdouble)
    y = y.astype(np.longdouble)
    n = g.shape[0]
    chol = np.zeros_like(g)
    for j in range(n):
        s = g[j, j] - np.dot(chol[j, :j], chol[j, :j])
        if s <= 0:
            raise NumericalFailure("extended-precision Cholesky hit a non-positive pivot")
        chol[j, j] = np.sqrt(s)
        if j + 1 < n:
            chol[j + 1 :, j] = (g[j + 1 :, j] - chol[j + 1 :, :j] @ chol[j, :j]) / chol[j, j]
    z = np.zeros(n, dtype=np.longdouble)
    for i in range(n):
        z[i] = (y[i] - np.dot(chol[i, :i], z[:i])) / chol[i, i]
    x = np.zeros(n, dtype=np.longdouble)
    for i in range(n - 1, -1, -1):
        x[i] = (z[i] - np.dot(chol[i + 1 :, i], x[i + 1 :])) / chol[i, i]
    return x


def tikhonov_solve(
    gram: GramMatrix,
    cfg: TikhonovConfig,
    labels: np.ndarray,
    extended: bool = False,
) -> AlphaVector:
    """Solve (K + delta I) alpha = Y by Cholesky factorization.

    The float64 path applies two steps of iterative refinement with the
    residual accumulated in extended precision, which restores forward accuracy
    on the badly conditioned rank-one-plus-delta systems of the far-shift
    limit. With extended=True the whole solve runs in long double so that delta
    is not absorbed into the diagonal's float64 ulp; use it when validating
    closed forms at tolerances near 1e-8.
    """
    y = np.asarray(labels, dtype=np.float64)
    if y.ndim != 1 or y.size != gram.n:
        raise DimensionError(f"labels shape {y.shape} does not match gram size {gram.n}")
    delta = cfg.resolve(gram)
    ynorm = float(np.linalg.norm(y))

    if extended:
        g_ld = gram.entries.astype(np.longdouble) + np.longdouble(delta) * np.eye(gram.n, dtype=np.longdouble)
        alpha_ld = _cholesky_solve_longdouble(g_ld, y)
        resid = float(np.linalg.norm((g_ld @ alpha_ld - y.astype(np.longdouble)).astype(np.float64)))
        alpha = alpha_ld.astype(np.float64)
    else:
        g = gram.entries + delta * np.eye(gram.n)
        try:
            factor = sla.cho_factor(g)
        except np.linalg.LinAlgError as exc:
            raise NumericalFailure(
                f"Cholesky breakdown, condition estimate {np.linalg.cond(g):.3e}"
            ) from exc
        alpha = sla.cho_solve(factor, y)
        g_ld = g.astype(np.longdouble)
        y_ld = y.astype(np.longdouble)
        for _ in range(2):
            r = y_ld - g_ld @ alpha.astype(np.longdouble)
            alpha = (alpha.astype(np.longdouble) + sla.cho_solve(factor, np.asarray(r, dtype=np.float64))).astype(
                np.float64
            )
        resid = float(np.linalg.norm((g_ld @ alpha.astype(np.longdouble) - y_ld).astype(np.float64)))

    if ynorm > 0 and resid > RESIDUAL_BOUND * ynorm:
        raise NumericalFailure(
            f"solve residual {resid:.3e} exceeds {RESIDUAL_BOUND:.0e} * |Y|, "
            f"condition estimate {np.linalg.cond(gram.entries + delta * np.eye(gram.n)):.3e}"
        )
    return AlphaVector(values=alpha, delta=delta, residual=resid, features=gram.features)


def asymptotic_alpha(labels: np.ndarray, n: int, kappa: float, t: float, delta: float) -> AlphaVector:
    """Closed-form coefficients on the asymptotic gram:

        alpha_i = -(t^2 kappa) / (delta (n kappa t^2 + delta)) * sum_j Y_j + Y_i / delta.

    Evaluated in the algebraically identical arrangement

        alpha_i = (t^2 kappa (n Y_i - sum_j Y_j) + delta Y_i) / (delta (n kappa t^2 + delta)),

    whose terms never cancel catastrophically when kappa t^2 >> delta.
    """
    if delta <= 0:
        raise InvalidRegularization(f"delta must be positive, got {delta}")
    y = np.asarray(labels, dtype=np.float64)
    if y.ndim != 1 or y.size != n:
        raise DimensionError(f"labels shape {y.shape} does not match n={n}")
    lead = float(kappa) * float(t) ** 2
    total = y.sum()
    vals = (lead * (n * y - total) + delta * y) / (delta * (n * lead + delta))
    return AlphaVector(values=vals, delta=float(delta))
