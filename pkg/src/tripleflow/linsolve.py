"""Matrix-free preconditioned conjugate gradients.

Deliberately hand rolled rather than wrapping scipy: the operators are
closures over ghosted arrays, the preconditioners are spectral or diagonal,
and bitwise-reproducible runs require a fixed reduction order (numpy's
pairwise sums are deterministic for a fixed shape, which is all we use).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import PoissonNonconvergence


@dataclass
class CGResult:
    x: np.ndarray
    iterations: int
    residual: float
    converged: bool


def _dot(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.vdot(a.ravel(), b.ravel()))


def conjugate_gradient(
    apply_op: Callable[[np.ndarray], np.ndarray],
    b: np.ndarray,
    x0: np.ndarray | None = None,
    rtol: float = 1e-11,
    atol: float = 0.0,
    maxiter: int = 20000,
    precond: Callable[[np.ndarray], np.ndarray] | None = None,
    project: Callable[[np.ndarray], np.ndarray] | None = None,
    label: str = "cg",
) -> CGResult:
    """Solve ``A x = b`` for symmetric positive (semi)definite ``A``.

    ``project`` removes a known nullspace component (e.g. the mean for the
    all-Neumann pressure problem); it is applied to the right-hand side, the
    initial guess and each preconditioned residual, keeping the iteration in
    the orthogonal complement.

    Raises
    ------
    PoissonNonconvergence
        When the residual has not reached ``max(rtol * |b|, atol)`` within
        ``maxiter`` iterations.
    """
    if project is not None:
        b = project(b)
    x = np.zeros_like(b) if x0 is None else x0.copy()
    if project is not None:
        x = project(x)
    r = b - apply_op(x)
    if project is not None:
        r = project(r)
    bnorm = np.sqrt(_dot(b, b))
    target = max(rtol * bnorm, atol)
    rnorm = np.sqrt(_dot(r, r))
    if rnorm <= target:
        return CGResult(x, 0, rnorm, True)
    z = precond(r) if precond is not None else r
    if project is not None:
        z = project(z)
    p = z.copy()
    rz = _dot(r, z)
    for it in range(1, maxiter + 1):
        ap = apply_op(p)
        denom = _dot(p, ap)
        if denom <= 0.0:
            # A lost definiteness (or p is in the nullspace): give up loudly.
            raise PoissonNonconvergence(
                f"{label}: nonpositive curvature {denom:.3e} at iteration {it}"
            )
        alpha = rz / denom
        x += alpha * p
        r -= alpha * ap
        rnorm = np.sqrt(_dot(r, r))
        if rnorm <= target:
            return CGResult(x, it, rnorm, True)
        z = precond(r) if precond is not None else r
        if project is not None:
            z = project(z)
        rz_new = _dot(r, z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise PoissonNonconvergence(
        f"{label}: residual {rnorm:.3e} > target {target:.3e} "
        f"after {maxiter} iterations"
    )


def remove_mean(a: np.ndarray) -> np.ndarray:
    return a - a.mean()
