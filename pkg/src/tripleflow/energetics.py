"""Free-energy ingredients of the three-phase mixture model.

The double well ``w_dw`` is the usual quartic ``18 phi^2 (1-phi)^2`` plus two
barrier terms that keep each fraction inside ``(-delta, 1+delta)``.  The
triple well evaluates the per-phase wells on the projected fractions
``P Phi`` so that its gradient satisfies ``sum_i dW_i / Sigma_i = 0``
identically; the phase solver leans on that identity to preserve the
partition of unity without any explicit reprojection.

Fractions are phase 1 and 2 for the fluids, 3 for the solid.  Functions
accept scalars or arrays of any matching shape.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import BarrierBlowup
from .params import ModelParams


def _maybe_scalar(out, *inputs):
    if all(np.isscalar(v) for v in inputs):
        return float(out)
    return out


def ell(x):
    """Barrier ``x^2 / (1 + x)`` on ``(-1, 0)``, zero for ``x >= 0``."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= -1.0):
        raise BarrierBlowup(f"barrier argument reached its pole (min {xa.min()})")
    out = np.where(xa < 0.0, xa * xa / (1.0 + xa), 0.0)
    return _maybe_scalar(out, x)


def ell_prime(x):
    """``d ell / dx``: ``(x^2 + 2x) / (1 + x)^2`` for negative arguments."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= -1.0):
        raise BarrierBlowup(f"barrier argument reached its pole (min {xa.min()})")
    denom = (1.0 + xa) * (1.0 + xa)
    out = np.where(xa < 0.0, (xa * xa + 2.0 * xa) / denom, 0.0)
    return _maybe_scalar(out, x)


def ell_second(x):
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= -1.0):
        raise BarrierBlowup(f"barrier argument reached its pole (min {xa.min()})")
    out = np.where(xa < 0.0, 2.0 / (1.0 + xa) ** 3, 0.0)
    return _maybe_scalar(out, x)


def w_dw(phi, delta: float):
    """Barrier-augmented double well with minima at 0 and 1."""
    pa = np.asarray(phi, dtype=float)
    out = (
        18.0 * pa * pa * (1.0 - pa) * (1.0 - pa)
        + delta * ell(pa / delta)
        + delta * ell((1.0 - pa) / delta)
    )
    return _maybe_scalar(out, phi)


def w_dw_prime(phi, delta: float):
    pa = np.asarray(phi, dtype=float)
    out = (
        36.0 * pa * (1.0 - pa) * (1.0 - 2.0 * pa)
        + ell_prime(pa / delta)
        - ell_prime((1.0 - pa) / delta)
    )
    return _maybe_scalar(out, phi)


def w_dw_second(phi, delta: float):
    pa = np.asarray(phi, dtype=float)
    out = (
        36.0 * (1.0 - 6.0 * pa + 6.0 * pa * pa)
        + ell_second(pa / delta) / delta
        + ell_second((1.0 - pa) / delta) / delta
    )
    return _maybe_scalar(out, phi)


def stabilization_bound(delta: float, lo: float = 0.0, hi: float = 1.0, n: int = 4001) -> float:
    """Max well curvature over ``[lo, hi]``, sampled densely.

    The default window is the physical range ``[0, 1]``, where the bound is
    36 (attained at the well bottoms).  Widening the window into the barrier
    region grows the bound like ``2/(delta (1 + x)^3)`` and chokes the time
    step, so out-of-range excursions are left to the step-rejection guard
    instead of the stabilization.
    """
    return float(np.max(w_dw_second(np.linspace(lo, hi, n), delta)))


def project_P(Phi, Sigmas: tuple[float, float, float], SigmaT: float):
    """Project fractions onto the partition-of-unity plane.

    ``(P Phi)_i = phi_i + (Sigma_T / Sigma_i) (1 - phi_1 - phi_2 - phi_3)``;
    the weights make the projection orthogonal in the ``Sigma``-weighted
    inner product, so it leaves plane-bound triples untouched.
    """
    slack = 1.0 - (np.asarray(Phi[0]) + np.asarray(Phi[1]) + np.asarray(Phi[2]))
    return tuple(
        _maybe_scalar(np.asarray(Phi[i]) + (SigmaT / Sigmas[i]) * slack, Phi[i])
        for i in range(3)
    )


def W(Phi, delta: float, Sigmas, SigmaT):
    """Triple well ``sum_i Sigma_i w_dw((P Phi)_i)``."""
    p = project_P(Phi, Sigmas, SigmaT)
    out = sum(Sigmas[i] * np.asarray(w_dw(p[i], delta)) for i in range(3))
    return _maybe_scalar(out, *Phi)


def dW_dphi(Phi, delta: float, Sigmas, SigmaT):
    """Gradient of the triple well; exact, not a finite difference.

    Differentiating through the projection gives
    ``dW_j = Sigma_j w'((P Phi)_j) - Sigma_T sum_i w'((P Phi)_i)``,
    which satisfies ``sum_j dW_j / Sigma_j = 0`` for every input because
    ``Sigma_T sum_j 1/Sigma_j = 1``.
    """
    p = project_P(Phi, Sigmas, SigmaT)
    wp = [np.asarray(w_dw_prime(p[i], delta)) for i in range(3)]
    total = wp[0] + wp[1] + wp[2]
    return tuple(
        _maybe_scalar(Sigmas[j] * wp[j] - SigmaT * total, *Phi) for j in range(3)
    )


def q_localizer(Phi):
    """Reaction localizer ``6 phi_1 phi_3``: peaks on the fluid1/solid interface,
    integrates to one across an equilibrium profile."""
    out = 6.0 * np.asarray(Phi[0]) * np.asarray(Phi[2])
    return _maybe_scalar(out, Phi[0], Phi[2])


def drag(phi_f_tilde, d0: float):
    """Friction coefficient: zero in pure fluid, ``d0`` in pure solid."""
    out = d0 * (1.0 - np.clip(np.asarray(phi_f_tilde, dtype=float), 0.0, 1.0))
    return _maybe_scalar(out, phi_f_tilde)


# ---- ion free energy and reactions --------------------------------------


def g_eval(c, params: ModelParams):
    return _maybe_scalar(params.g.g(np.asarray(c, dtype=float)), c)


def g_prime(c, params: ModelParams):
    return _maybe_scalar(params.g.g_prime(np.asarray(c, dtype=float)), c)


def reaction_rate_r(c, params: ModelParams):
    """Dissolution driving rate ``r(c) = g(c) + g'(c) (c* - c)``.

    For the quadratic ``g`` this vanishes at ``c = c0`` (saturation) and is
    positive between ``c0`` and the solid composition ``c*`` (growth).
    """
    ca = np.asarray(c, dtype=float)
    out = params.g.g(ca) + params.g.g_prime(ca) * (params.c_star - ca)
    return _maybe_scalar(out, c)


class Reactions(NamedTuple):
    R1: np.ndarray
    R2: np.ndarray
    R3: np.ndarray
    Rc: np.ndarray
    Rf: np.ndarray


def reaction_R1(Phi, c, mu1, mu3, params: ModelParams) -> Reactions:
    """All reaction sources, from the fluid-1 exchange rate.

    ``R1 = -(q/eps) (r(c) + alpha_t mu_1 - alpha_t mu_3)``; solid loses what
    fluid 1 gains (``R3 = -R1``), fluid 2 is inert, ions are released at the
    solid composition (``Rc = c* R1``) and the fluid volume source equals
    ``R1``.
    """
    q = q_localizer(Phi)
    rate = reaction_rate_r(c, params)
    r1 = -(np.asarray(q) / params.eps) * (
        rate + params.alpha_t * (np.asarray(mu1) - np.asarray(mu3))
    )
    r1 = np.asarray(r1)
    return Reactions(r1, np.zeros_like(r1), -r1, params.c_star * r1, r1)


# ---- delta-modified mixture quantities ----------------------------------


class MixtureFields(NamedTuple):
    phi_f_tilde: np.ndarray
    rho_f_tilde: np.ndarray
    gamma_tilde: np.ndarray
    phi_c_tilde: np.ndarray
    phi_f: np.ndarray
    rho_f: np.ndarray
    phi_c: np.ndarray
    rho: np.ndarray


def delta_modified(Phi, params: ModelParams) -> MixtureFields:
    """Fluid fraction, densities and viscosity with their small-delta shifts.

    The shifted quantities stay strictly positive even where the solid
    fraction is 1, which is what lets the flow and ion equations keep their
    parabolic character inside the solid.
    """
    d = params.delta_eff
    p1, p2, p3 = (np.asarray(Phi[i], dtype=float) for i in range(3))
    phi_f = p1 + p2
    phi_f_tilde = phi_f + 2.0 * d * p3
    rho_f = params.rho1 * p1 + params.rho2 * p2
    rho_f_tilde = rho_f + (params.rho1 + params.rho2) * d
    inv_gam = (
        p1 / params.gamma1
        + p2 / params.gamma2
        + p3 / params.gamma3
        + (1.0 / params.gamma1 + 1.0 / params.gamma2 + 1.0 / params.gamma3) * d
    )
    gamma_tilde = 1.0 / inv_gam
    phi_c_tilde = p1 + d
    rho = rho_f + params.rho3 * p3
    return MixtureFields(
        phi_f_tilde, rho_f_tilde, gamma_tilde, phi_c_tilde, phi_f, rho_f, p1 + 0.0, rho
    )
