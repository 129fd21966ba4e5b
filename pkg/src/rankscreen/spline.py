"""Normalized B-spline basis on a bounded support and regression fits under
squared-error or absolute-error loss.

The basis is clamped (boundary knots repeated degree+1 times) with interior
knots at equally spaced sample quantiles, so the functions are nonnegative
and sum to one everywhere on the support.  The absolute-loss fit runs
iteratively reweighted least squares on the smoothed objective
``mean(sqrt(r^2 + eps^2))``, started from the squared-loss solution; the
majorize-minimize structure makes the smoothed objective nonincreasing
across iterations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .empirical import as_finite_vector
from .errors import InvalidInput, OutOfSupport, SingularDesign

__all__ = [
    "SplineBasis",
    "SplineFit",
    "BasisConfig",
    "LadConfig",
    "basis_build",
    "basis_eval",
    "design_matrix",
    "fit_l2",
    "fit_l1",
    "predict",
    "l1_objective",
]

_SUPPORT_RTOL = 1e-9


@dataclass(frozen=True)
class BasisConfig:
    """Basis hyperparameters: polynomial degree and total basis dimension."""

    degree: int = 3
    n_basis: int = 4


@dataclass(frozen=True)
class LadConfig:
    """IRLS settings for the absolute-loss fit.

    ``track_objective`` stores the smoothed objective after every iteration
    in the fit metadata (diagnostic; off by default to keep bulk fits lean).
    """

    epsilon: float = 1e-6
    tol: float = 1e-8
    max_iter: int = 200
    track_objective: bool = False

    def __post_init__(self):
        if self.epsilon <= 0:
            raise InvalidInput("epsilon must be positive")
        if self.max_iter < 1:
            raise InvalidInput("max_iter must be >= 1")


@dataclass(frozen=True)
class SplineBasis:
    """Clamped B-spline basis on ``[lo, hi]``.

    Attributes
    ----------
    degree : int
        Polynomial degree (>= 1).
    knots : ndarray
        Full clamped knot vector of length ``n_basis + degree + 1``.
    interior_knots : ndarray
        The knots strictly inside the boundary.
    lo, hi : float
        Support endpoints, taken from the build sample.
    n_basis : int
        Number of basis functions (= degree + 1 + number of interior knots).
    """

    degree: int
    knots: np.ndarray
    interior_knots: np.ndarray
    lo: float
    hi: float
    n_basis: int


def basis_build(z_sample, degree: int = 3, n_basis: int = 4) -> SplineBasis:
    """Build a clamped basis with quantile-placed interior knots.

    Parameters
    ----------
    z_sample : array-like
        Sample of the exposure; its min/max become the support.
    degree : int
        Polynomial degree, >= 1.
    n_basis : int
        Total basis dimension; must be >= degree + 1.  The number of
        interior knots is ``n_basis - degree - 1``.
    """
    z = as_finite_vector(z_sample, "z_sample")
    if degree < 1:
        raise InvalidInput("degree must be >= 1")
    if n_basis < degree + 1:
        raise InvalidInput("n_basis must be >= degree + 1")
    if z.size < n_basis:
        raise InvalidInput("need at least n_basis sample points")
    lo, hi = float(z.min()), float(z.max())
    if lo == hi:
        raise InvalidInput("exposure sample is constant; no support to span")
    m = n_basis - degree - 1
    if m > 0:
        probs = np.arange(1, m + 1) / (m + 1)
        interior = np.quantile(z, probs)
        if interior.min() <= lo or interior.max() >= hi:
            raise InvalidInput(
                "too few distinct exposure values to place interior knots"
            )
    else:
        interior = np.empty(0)
    knots = np.concatenate([
        np.full(degree + 1, lo),
        interior,
        np.full(degree + 1, hi),
    ])
    return SplineBasis(degree=degree, knots=knots,
                       interior_knots=np.asarray(interior, dtype=float),
                       lo=lo, hi=hi, n_basis=n_basis)


def _clamp_to_support(basis: SplineBasis, z: np.ndarray) -> np.ndarray:
    span = basis.hi - basis.lo
    tol = _SUPPORT_RTOL * max(span, abs(basis.lo), abs(basis.hi), 1.0)
    if np.any(z < basis.lo - tol) or np.any(z > basis.hi + tol):
        bad = z[(z < basis.lo - tol) | (z > basis.hi + tol)][0]
        raise OutOfSupport(
            f"point {bad!r} outside support [{basis.lo}, {basis.hi}]"
        )
    return np.clip(z, basis.lo, basis.hi)


def design_matrix(basis: SplineBasis, z_col) -> np.ndarray:
    """Evaluate all basis functions at each point: (n, n_basis) matrix.

    Cox-de Boor recursion starting from interval indicators; the last
    interval is treated as closed so the right endpoint evaluates to the
    final basis function.
    """
    z = np.atleast_1d(np.asarray(z_col, dtype=float))
    z = _clamp_to_support(basis, z)
    t = basis.knots
    k = basis.degree
    n_intervals = len(t) - 1
    b = ((z[:, None] >= t[None, :-1]) & (z[:, None] < t[None, 1:])).astype(float)
    # close the final nonempty interval at the right boundary
    at_hi = z == basis.hi
    if np.any(at_hi):
        last = np.flatnonzero(t[:-1] < t[1:])[-1]
        b[at_hi, :] = 0.0
        b[at_hi, last] = 1.0
    for d in range(1, k + 1):
        nb = n_intervals - d
        new = np.zeros((z.size, nb))
        for i in range(nb):
            den1 = t[i + d] - t[i]
            if den1 > 0:
                new[:, i] += (z - t[i]) / den1 * b[:, i]
            den2 = t[i + d + 1] - t[i + 1]
            if den2 > 0:
                new[:, i] += (t[i + d + 1] - z) / den2 * b[:, i + 1]
        b = new
    return b


def basis_eval(basis: SplineBasis, z: float) -> np.ndarray:
    """Basis values at one point: nonnegative, summing to one."""
    return design_matrix(basis, np.array([z]))[0]


@dataclass(frozen=True)
class SplineFit:
    """Fitted spline regression of one target column on the exposure."""

    basis: SplineBasis
    coef: np.ndarray
    loss: str
    iterations: int = 0
    converged: bool = True
    ridged: bool = False
    meta: dict = field(default_factory=dict)


def _solve_normal_equations(gram: np.ndarray, rhs: np.ndarray):
    """Solve ``gram @ coef = rhs`` with a Cholesky PD check; on borderline
    failure add a trace-scaled ridge once, recording that it happened.

    A zero diagonal entry means some basis function has no support points,
    a structural rank deficiency that the ridge should not paper over.
    """
    if np.any(np.diag(gram) == 0.0):
        raise SingularDesign(
            "a basis function has no observations in its support; "
            "lower n_basis"
        )
    try:
        np.linalg.cholesky(gram)
        return np.linalg.solve(gram, rhs), False
    except np.linalg.LinAlgError:
        pass
    jitter = 1e-10 * np.trace(gram) / gram.shape[0]
    bumped = gram + jitter * np.eye(gram.shape[0])
    try:
        np.linalg.cholesky(bumped)
        return np.linalg.solve(bumped, rhs), True
    except np.linalg.LinAlgError:
        raise SingularDesign(
            "spline design is rank deficient; lower n_basis"
        ) from None


def fit_l2(basis: SplineBasis, z_col, w_col) -> SplineFit:
    """Least-squares spline fit via the normal equations.

    Residuals are orthogonal to every basis column up to solver tolerance.
    """
    z = as_finite_vector(z_col, "z_col")
    w = as_finite_vector(w_col, "w_col")
    if z.size != w.size:
        raise InvalidInput("z_col and w_col lengths differ")
    b = design_matrix(basis, z)
    coef, ridged = _solve_normal_equations(b.T @ b, b.T @ w)
    return SplineFit(basis=basis, coef=coef, loss="l2", ridged=ridged)


def l1_objective(basis: SplineBasis, coef: np.ndarray, z_col, w_col) -> float:
    """Mean absolute residual of a coefficient vector."""
    b = design_matrix(basis, np.asarray(z_col, dtype=float))
    return float(np.mean(np.abs(np.asarray(w_col, dtype=float) - b @ coef)))


def fit_l1(basis: SplineBasis, z_col, w_col,
           config: LadConfig = LadConfig()) -> SplineFit:
    """Least-absolute-deviation spline fit by smoothed IRLS.

    Starts from the squared-loss solution and iterates weighted
    least squares with weights ``1/sqrt(r^2 + eps^2)`` until the coefficient
    change drops below ``config.tol`` or ``config.max_iter`` is hit.
    Non-convergence is reported through the ``converged`` flag, not an error.
    The returned fit's exact L1 objective never exceeds the squared-loss
    solution's L1 objective by more than ``config.epsilon``.
    """
    z = as_finite_vector(z_col, "z_col")
    w = as_finite_vector(w_col, "w_col")
    if z.size != w.size:
        raise InvalidInput("z_col and w_col lengths differ")
    b = design_matrix(basis, z)
    coef, ridged = _solve_normal_equations(b.T @ b, b.T @ w)
    eps_sq = config.epsilon ** 2

    def smoothed(c):
        r = w - b @ c
        return float(np.mean(np.sqrt(r * r + eps_sq)))

    history = [smoothed(coef)] if config.track_objective else None
    converged = False
    iterations = 0
    for iterations in range(1, config.max_iter + 1):
        r = w - b @ coef
        weights = 1.0 / np.sqrt(r * r + eps_sq)
        bw = b * weights[:, None]
        new_coef, rid = _solve_normal_equations(bw.T @ b, bw.T @ w)
        ridged = ridged or rid
        step = float(np.max(np.abs(new_coef - coef)))
        coef = new_coef
        if history is not None:
            history.append(smoothed(coef))
        if step < config.tol:
            converged = True
            break
    meta = {"objective_history": history} if history is not None else {}
    return SplineFit(basis=basis, coef=coef, loss="l1",
                     iterations=iterations, converged=converged,
                     ridged=ridged, meta=meta)


def predict(fit: SplineFit, z_col) -> np.ndarray:
    """Fitted values ``B(z_i)^T coef`` at the given exposure points."""
    b = design_matrix(fit.basis, np.asarray(z_col, dtype=float))
    return b @ fit.coef
