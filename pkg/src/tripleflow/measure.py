"""Extracting scalar observables from discrete fields.

Interface positions come from linear interpolation of level crossings,
angles from circle fits to pairwise level sets around the triple point, and
rates from least-squares line fits.  Everything here is read-only on the
state; measurement never feeds back into the dynamics.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import TriplePointNotFound
from .fields import ScalarField
from .grid import Grid2D
from .state import State


def level_crossings_1d(x: np.ndarray, f: np.ndarray, level: float = 0.5) -> np.ndarray:
    """Positions where a sampled 1D profile crosses ``level``, by linear interpolation."""
    g = np.asarray(f, dtype=float) - level
    sign_change = g[:-1] * g[1:] < 0.0
    idx = np.nonzero(sign_change)[0]
    t = g[idx] / (g[idx] - g[idx + 1])
    crossings = x[idx] + t * (x[idx + 1] - x[idx])
    exact = np.nonzero(g == 0.0)[0]
    if exact.size:
        crossings = np.sort(np.concatenate([crossings, x[exact]]))
    return crossings


def interface_position_x(field: ScalarField, level: float = 0.5) -> float:
    """Crossing of the y-averaged x profile; intended for quasi-1D fronts."""
    grid = field.grid
    prof = field.interior.mean(axis=1)
    x = grid.xc()[1:-1]
    pos = level_crossings_1d(x, prof, level)
    if pos.size == 0:
        raise ValueError(f"profile never crosses level {level}")
    return float(pos[0])


class LineFit(NamedTuple):
    slope: float
    intercept: float
    rms_residual: float


def fit_linear(t: np.ndarray, y: np.ndarray) -> LineFit:
    coeffs = np.polyfit(t, y, 1)
    resid = y - np.polyval(coeffs, t)
    return LineFit(float(coeffs[0]), float(coeffs[1]), float(np.sqrt(np.mean(resid**2))))


def fit_log_slope(y: np.ndarray, u: np.ndarray) -> LineFit:
    """Exponential rate of a positive profile via a line fit in log space."""
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0.0):
        raise ValueError("log-slope fit needs strictly positive samples")
    return fit_linear(np.asarray(y, dtype=float), np.log(u))


def total(field: ScalarField) -> float:
    return float(np.sum(field.interior)) * field.grid.cell_volume


def centroid(field: ScalarField) -> tuple[float, float]:
    grid = field.grid
    w = field.interior
    mass = float(np.sum(w))
    if mass == 0.0:
        raise ValueError("centroid of an identically zero field")
    x = grid.xc()[1:-1]
    y = grid.yc()[1:-1]
    xbar = float(np.sum(w * x[:, None])) / mass
    ybar = float(np.sum(w * y[None, :])) / mass
    return xbar, ybar


def droplet_pressure_jump(
    state: State,
    center: tuple[float, float],
    radius: float,
    eps: float,
    band: float | None = None,
) -> tuple[float, float]:
    """Mean pressure inside minus outside, masking the interface band.

    Cells within ``band`` (default ``2 eps``) of the nominal circle are
    excluded on both sides.  Returns the jump and the peak speed, the
    latter as the spurious-current magnitude near equilibrium.
    """
    if band is None:
        band = 2.0 * eps
    grid = state.grid
    x = grid.xc()[1:-1]
    y = grid.yc()[1:-1]
    dist = np.sqrt((x[:, None] - center[0]) ** 2 + (y[None, :] - center[1]) ** 2)
    inside = dist < radius - band
    outside = dist > radius + band
    if not inside.any() or not outside.any():
        raise ValueError("interface band mask leaves an empty side")
    p = state.p.interior
    jump = float(p[inside].mean() - p[outside].mean())
    return jump, state.v.max_speed()


def _paraboloid_vertex(patch: np.ndarray) -> tuple[float, float]:
    """Sub-cell minimum of a 3x3 sample patch; offsets clipped to one cell."""
    u, v = np.meshgrid([-1.0, 0.0, 1.0], [-1.0, 0.0, 1.0], indexing="ij")
    A = np.column_stack(
        [np.ones(9), u.ravel(), v.ravel(), u.ravel() ** 2, u.ravel() * v.ravel(), v.ravel() ** 2]
    )
    coef, *_ = np.linalg.lstsq(A, patch.ravel(), rcond=None)
    _, b, c, d, e, f = coef
    H = np.array([[2.0 * d, e], [e, 2.0 * f]])
    try:
        off = np.linalg.solve(H, -np.array([b, c]))
    except np.linalg.LinAlgError:
        return 0.0, 0.0
    return float(np.clip(off[0], -1.0, 1.0)), float(np.clip(off[1], -1.0, 1.0))


def triple_point(phi: tuple[ScalarField, ...], grid: Grid2D) -> tuple[float, float]:
    """Locate the junction as the minimum of max_i(phi_i), refined sub-cell.

    At a genuine three-phase junction every fraction is near 1/3, so the
    envelope dips well below its two-phase value of 1/2.
    """
    env = np.maximum(np.maximum(phi[0].interior, phi[1].interior), phi[2].interior)
    k, l = np.unravel_index(np.argmin(env), env.shape)
    if env[k, l] > 0.49:
        raise TriplePointNotFound(
            f"phase envelope never drops below 0.49 (min {env[k, l]:.3f})"
        )
    nx, ny = env.shape
    if 1 <= k < nx - 1 and 1 <= l < ny - 1:
        du, dv = _paraboloid_vertex(env[k - 1 : k + 2, l - 1 : l + 2])
    else:
        du = dv = 0.0
    x = grid.xc()[1:-1]
    y = grid.yc()[1:-1]
    return float(x[k] + du * grid.hx), float(y[l] + dv * grid.hy)


def pair_levelset_points(
    phi: tuple[ScalarField, ...],
    grid: Grid2D,
    i: int,
    j: int,
    tp: tuple[float, float],
    rmin: float,
    rmax: float,
    other_max: float = 0.45,
) -> np.ndarray:
    """Sample the phi_i = phi_j interface branch inside an annulus around ``tp``.

    Sign changes of phi_i - phi_j along grid edges give interpolated points;
    the third-phase bound keeps only the branch where i and j actually meet.
    """
    k_other = 3 - i - j
    D = phi[i].interior - phi[j].interior
    O = phi[k_other].interior
    x = grid.xc()[1:-1]
    y = grid.yc()[1:-1]
    pts = []
    for axis in (0, 1):
        if axis == 0:
            a, b = D[:-1, :], D[1:, :]
            oa, ob = O[:-1, :], O[1:, :]
        else:
            a, b = D[:, :-1], D[:, 1:]
            oa, ob = O[:, :-1], O[:, 1:]
        hit = a * b < 0.0
        kk, ll = np.nonzero(hit)
        t = a[kk, ll] / (a[kk, ll] - b[kk, ll])
        o_here = (1.0 - t) * oa[kk, ll] + t * ob[kk, ll]
        if axis == 0:
            px = x[kk] + t * grid.hx
            py = y[ll]
        else:
            px = x[kk]
            py = y[ll] + t * grid.hy
        keep = o_here < other_max
        pts.append(np.column_stack([px[keep], py[keep]]))
    p = np.concatenate(pts, axis=0)
    r = np.hypot(p[:, 0] - tp[0], p[:, 1] - tp[1])
    return p[(r > rmin) & (r < rmax)]


class CircleFit(NamedTuple):
    cx: float
    cy: float
    radius: float


def fit_circle(points: np.ndarray) -> CircleFit:
    """Algebraic least-squares circle through a point cloud."""
    x, y = points[:, 0], points[:, 1]
    A = np.column_stack([x, y, np.ones_like(x)])
    b = x**2 + y**2
    sol, *_ = np.linalg.lstsq(A, b, rcond=None)
    cx, cy = 0.5 * sol[0], 0.5 * sol[1]
    r2 = sol[2] + cx**2 + cy**2
    return CircleFit(float(cx), float(cy), float(np.sqrt(max(r2, 0.0))))


def _branch_tangent(points: np.ndarray, tp: tuple[float, float], rmax: float) -> np.ndarray:
    """Unit tangent of an interface branch at the junction, oriented outward."""
    fit = fit_circle(points)
    away = points.mean(axis=0) - np.asarray(tp)
    centered = points - points.mean(axis=0)
    _, svals, vt = np.linalg.svd(centered, full_matrices=False)
    line_rms = float(svals[1]) / np.sqrt(len(points))
    circle_rms = float(
        np.sqrt(
            np.mean(
                (np.hypot(points[:, 0] - fit.cx, points[:, 1] - fit.cy) - fit.radius)
                ** 2
            )
        )
    )
    # the algebraic circle fit is ill-conditioned on near-collinear clouds
    # and can return an arbitrary small radius, so compare actual residuals
    # instead of trusting the radius alone
    if (
        fit.radius > 50.0 * rmax
        or not np.isfinite(fit.radius)
        or circle_rms > 0.5 * line_rms
    ):
        t = vt[0]
    else:
        radial = np.asarray(tp) - np.array([fit.cx, fit.cy])
        t = np.array([-radial[1], radial[0]])
        t = t / np.linalg.norm(t)
    if float(np.dot(t, away)) < 0.0:
        t = -t
    return t / np.linalg.norm(t)


def _sample_bilinear(field: ScalarField, x: float, y: float) -> float:
    """Bilinear sample of an interior field at a physical point."""
    grid = field.grid
    u = (x - grid.origin[0]) / grid.hx - 0.5
    v = (y - grid.origin[1]) / grid.hy - 0.5
    u = min(max(u, 0.0), grid.nx - 1.0)
    v = min(max(v, 0.0), grid.ny - 1.0)
    k, l = int(u), int(v)
    k = min(k, grid.nx - 2)
    l = min(l, grid.ny - 2)
    fu, fv = u - k, v - l
    w = field.interior
    return float(
        (1 - fu) * (1 - fv) * w[k, l]
        + fu * (1 - fv) * w[k + 1, l]
        + (1 - fu) * fv * w[k, l + 1]
        + fu * fv * w[k + 1, l + 1]
    )


class AngleReport(NamedTuple):
    angles: tuple[float, float, float]
    tp: tuple[float, float]
    n_points: tuple[int, int, int]
    """Sample counts for the pairwise interfaces in order (1-2, 1-3, 2-3)."""


def contact_angles(
    phi: tuple[ScalarField, ...],
    grid: Grid2D,
    eps: float,
    rmin: float | None = None,
    rmax: float | None = None,
) -> AngleReport:
    """Wedge angle of each phase at the triple junction, in radians.

    Each pairwise interface is sampled in an annulus clear of the junction
    core, its tangent at the junction taken from a fitted circle, and the
    wedge of phase i spanned by its two adjacent interfaces.
    """
    if rmin is None:
        rmin = 3.0 * eps
    if rmax is None:
        rmax = 8.0 * eps
    tp = triple_point(phi, grid)
    pairs = {(0, 1): None, (0, 2): None, (1, 2): None}
    counts = {}
    for i, j in pairs:
        pts = pair_levelset_points(phi, grid, i, j, tp, rmin, rmax)
        if len(pts) < 4:
            raise TriplePointNotFound(
                f"interface {i + 1}-{j + 1} has only {len(pts)} samples near the junction"
            )
        pairs[(i, j)] = _branch_tangent(pts, tp, rmax)
        counts[(i, j)] = len(pts)
    angles = []
    for i in range(3):
        t1, t2 = (pairs[key] for key in pairs if i in key)
        cosang = float(np.clip(np.dot(t1, t2), -1.0, 1.0))
        beta = float(np.arccos(cosang))
        # the arccos branch is the wedge only if phase i sits between the
        # rays; probe the bisector to catch reflex wedges
        bis = t1 + t2
        norm = float(np.linalg.norm(bis))
        if norm > 1e-8:
            bis /= norm
            probe_x = tp[0] + 2.0 * eps * bis[0]
            probe_y = tp[1] + 2.0 * eps * bis[1]
            if _sample_bilinear(phi[i], probe_x, probe_y) < 0.5:
                beta = 2.0 * np.pi - beta
        angles.append(beta)
    return AngleReport(
        tuple(angles),
        tp,
        (counts[(0, 1)], counts[(0, 2)], counts[(1, 2)]),
    )


def state_change_rate(new: State, old: State, dt: float) -> float:
    """Relative sup-norm change per unit time across all evolved fields."""
    worst = 0.0
    for a, b in zip(new.phi, old.phi):
        worst = max(worst, float(np.max(np.abs(a.interior - b.interior))))
    worst = max(worst, float(np.max(np.abs(new.c.interior - old.c.interior))))
    worst = max(worst, float(np.max(np.abs(new.v.x - old.v.x))))
    worst = max(worst, float(np.max(np.abs(new.v.y - old.v.y))))
    return worst / dt
