"""Forward-difference directional derivatives, their Pascal-coefficient algebra,
and polynomial profile fitting with degree classification.

The z-th forward difference along v uses the sign-alternating binomial row
P_i = (-1)^(z-i) binom(z, i), so that

    D_v^z f(x0) ~= sum_i P_i f(x0 + i h v) / h^z.

Two exact integer/algebraic identities of that row are exposed as checks: the
row-to-previous-row correspondence P_i^(z) (z - i) = -z P_i^(z-1), and the
split of the point-weighted sum into an anchored term plus a lower-order
indicator sum. Note the minus sign in the correspondence: consecutive signed
rows alternate at fixed i, so the magnitude recurrence binom(z,i)(z-i) =
z binom(z-1,i) picks up a sign flip.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionError, EvaluationError, FitFailure, InvalidInput
from .geometry import AugmentedPoint, Direction, Point


@dataclass(frozen=True, eq=False)
class PascalCoefficients:
    """Signed stencil row of order z, stored as [P_z, P_{z-1}, ..., P_0]."""

    order: int
    coeffs: np.ndarray

    def coefficient(self, i: int) -> int:
        """P_i for i in 0..z (i indexes the stencil point x_i)."""
        if not 0 <= i <= self.order:
            raise IndexError(f"i={i} outside 0..{self.order}")
        return int(self.coeffs[self.order - i])

    def by_point(self) -> np.ndarray:
        """Coefficients reordered as [P_0, P_1, ..., P_z]."""
        return self.coeffs[::-1].copy()


def pascal_coefficients(z: int) -> PascalCoefficients:
    """Sign-alternating Pascal row of order z; index 0 multiplies the far point x_z."""
    if z < 0:
        raise InvalidInput(f"order must be >= 0, got {z}")
    coeffs = np.array([(-1) ** j * math.comb(z, j) for j in range(z + 1)], dtype=np.int64)
    return PascalCoefficients(order=z, coeffs=coeffs)


def pascal_shift_identity(z: int) -> bool:
    """Exact-integer check of P_i^(z) (z - i) = -z P_i^(z-1) for i = 0..z-1.

    i = z is excluded: the previous row has no coefficient at that index.
    """
    if z < 1:
        raise InvalidInput(f"order must be >= 1, got {z}")
    row = pascal_coefficients(z)
    prev = pascal_coefficients(z - 1)
    return all(
        row.coefficient(i) * (z - i) == -z * prev.coefficient(i) for i in range(z)
    )


def sigma_identity_check(
    x0: AugmentedPoint,
    v: Direction,
    h: float,
    indicators: Sequence[int],
    z: int,
) -> float:
    """Max-abs discrepancy between the two evaluations of the weighted stencil sum.

    Builds x_j = x0 + j*h*[v|0] and compares

        sum_j P_j x_j b_j   vs   x_z * sum_j P_j b_j + z*h*[v|0] * sum_{j<z} P'_j b_j

    where P' is the order z-1 row. The identity is exact algebra, so the
    returned discrepancy is pure rounding noise.
    """
    if z < 1:
        raise InvalidInput(f"order must be >= 1, got {z}")
    if h == 0:
        raise InvalidInput("step must be nonzero")
    bits = np.asarray(indicators, dtype=np.float64)
    if bits.size != z + 1:
        raise DimensionError(f"need {z + 1} indicator bits, got {bits.size}")
    vhat = v.augmented()
    if vhat.size != x0.coords.size:
        raise DimensionError("direction and point dimensions differ")
    pts = x0.coords[None, :] + np.arange(z + 1)[:, None] * (h * vhat)[None, :]
    p_row = pascal_coefficients(z).by_point().astype(np.float64)
    p_prev = pascal_coefficients(z - 1).by_point().astype(np.float64)
    direct = (p_row * bits)[:, None] * pts
    lhs = direct.sum(axis=0)
    rhs = pts[z] * np.sum(p_row * bits) + z * h * vhat * np.sum(p_prev * bits[:z])
    return float(np.abs(lhs - rhs).max())


@dataclass(frozen=True)
class DerivativeEstimate:
    """One forward-stencil derivative estimate."""

    order: int
    step: float
    value: float
    points_used: int


def default_step(z: int, x0: Point) -> float:
    """Balance truncation against rounding: h = eps^(1/(z+1)) * (1 + |x0|)."""
    eps = np.finfo(np.float64).eps
    return float(eps ** (1.0 / (z + 1)) * (1.0 + np.linalg.norm(x0.coords)))


def directional_derivative(
    f: Callable[[Point], float],
    x0: Point,
    v: Direction,
    z: int,
    h: float | None = None,
) -> DerivativeEstimate:
    """z-th directional derivative via the forward stencil x0, x0+hv, ..., x0+zhv."""
    if z < 1:
        raise InvalidInput(f"order must be >= 1, got {z}")
    if x0.dim != v.dim:
        raise DimensionError("point and direction dimensions differ")
    step = default_step(z, x0) if h is None else float(h)
    if step <= 0:
        raise InvalidInput(f"step must be positive, got {step}")
    weights = pascal_coefficients(z).by_point().astype(np.float64)
    acc = 0.0
    for i in range(z + 1):
        val = f(Point(x0.coords + i * step * v.coords))
        if not np.isfinite(val):
            raise EvaluationError(f"f returned {val!r} at stencil point {i}")
        acc += weights[i] * val
    return DerivativeEstimate(order=z, step=step, value=acc / step**z, points_used=z + 1)


@dataclass(frozen=True, eq=False)
class ExtrapolationProfile:
    """Sampled values of f along base + s*v with a least-squares polynomial fit.

    `coefficients[j]` multiplies s^j. `normalized[j]` multiplies (s/radius)^j;
    these carry the fit's conditioning and feed ratio diagnostics, since they
    compare term magnitudes at the window edge rather than raw derivatives.
    """

    base: Point
    direction: Direction
    radius: float
    offsets: np.ndarray
    values: np.ndarray
    coefficients: np.ndarray
    normalized: np.ndarray
    residual: float


@dataclass(frozen=True)
class DegreeClass:
    """Dominant polynomial degree of a profile plus cubic/quartic ratios."""

    label: str
    ratio32: float
    ratio42: float


def fit_profile(
    f: Callable[[Point], float],
    base: Point,
    v: Direction,
    radius: float,
    m: int = 41,
    degmax: int = 4,
) -> ExtrapolationProfile:
    """Fit f(base + s*v) by a degree-degmax polynomial over m symmetric offsets.

    The fit runs in the scaled variable u = s/radius for conditioning; physical
    coefficients are recovered by dividing by radius^j.
    """
    if radius <= 0:
        raise InvalidInput(f"radius must be positive, got {radius}")
    if degmax < 2:
        raise InvalidInput(f"degmax must be >= 2, got {degmax}")
    if m < degmax + 3:
        raise InvalidInput(f"need at least degmax+3={degmax + 3} samples, got {m}")
    if base.dim != v.dim:
        raise DimensionError("base point and direction dimensions differ")
    offsets = np.linspace(-radius, radius, m)
    vals = np.empty(m)
    for i, s in enumerate(offsets):
        y = f(Point(base.coords + s * v.coords))
        if not np.isfinite(y):
            raise EvaluationError(f"f returned {y!r} at offset {s}")
        vals[i] = y
    vander = np.vander(offsets / radius, degmax + 1, increasing=True)
    sol, _, rank, _ = np.linalg.lstsq(vander, vals, rcond=None)
    if rank < degmax + 1:
        raise FitFailure(f"rank-deficient fit: rank {rank} < {degmax + 1}")
    resid = float(np.sqrt(np.mean((vander @ sol - vals) ** 2)))
    coeffs = sol / radius ** np.arange(degmax + 1)
    return ExtrapolationProfile(
        base=base,
        direction=v,
        radius=float(radius),
        offsets=offsets,
        values=vals,
        coefficients=coeffs,
        normalized=sol,
        residual=resid,
    )


_LABELS = {0: "constant", 1: "linear", 2: "quadratic"}


def classify(profile: ExtrapolationProfile, tol: float = 0.05, floor: float = 1e-10) -> DegreeClass:
    """Dominant degree by thresholding window-edge term magnitudes.

    A term survives when its normalized coefficient exceeds tol times the
    largest term (or the floor, whichever is bigger); the highest survivor
    fixes the label. Ratios divide by max(|c2|, floor) to stay finite when the
    curvature vanishes, as it does along directions orthogonal to the shift.
    """
    mags = np.abs(profile.normalized)
    ref = max(float(mags.max()), floor)
    alive = np.nonzero(mags > tol * ref)[0]
    top = int(alive.max()) if alive.size else 0
    label = _LABELS.get(top, "higher")
    c2 = max(float(mags[2]), floor) if mags.size > 2 else floor
    ratio32 = float(mags[3]) / c2 if mags.size > 3 else 0.0
    ratio42 = float(mags[4]) / c2 if mags.size > 4 else 0.0
    return DegreeClass(label=label, ratio32=ratio32, ratio42=ratio42)
