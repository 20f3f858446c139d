"""Model parameters and their validation.

Conventions used throughout the package:

* phases are numbered 1, 2 (the two fluids) and 3 (the solid),
* ``sigma_ij`` are the pairwise interface tensions, ``Sigma_i`` the per-phase
  coefficients with ``sigma_ij = Sigma_i + Sigma_j``,
* ``eps`` is the diffuse-interface width scale and ``delta`` the small bulk
  regularization (defaults to ``eps`` when not given),
* the solid density must equal the density of fluid 1, since dissolution
  converts solid into fluid 1 without a volume source.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property

from .errors import (
    ConfigError,
    NegativeAlpha,
    NonpositiveCoefficient,
    TriangleViolation,
)


def derive_sigmas(
    sigma12: float, sigma13: float, sigma23: float
) -> tuple[float, float, float, float]:
    """Split pairwise tensions into per-phase coefficients.

    Solves ``sigma_ij = Sigma_i + Sigma_j`` for ``Sigma_1..3`` and returns
    them together with the harmonic combination ``Sigma_T`` defined by
    ``1/Sigma_T = sum_i 1/Sigma_i``.

    Raises
    ------
    TriangleViolation
        If any ``Sigma_i`` would be nonpositive, i.e. one tension exceeds
        the sum of the other two.
    """
    s1 = 0.5 * (sigma12 + sigma13 - sigma23)
    s2 = 0.5 * (sigma12 + sigma23 - sigma13)
    s3 = 0.5 * (sigma13 + sigma23 - sigma12)
    if s1 <= 0.0 or s2 <= 0.0 or s3 <= 0.0:
        raise TriangleViolation(
            f"tensions ({sigma12}, {sigma13}, {sigma23}) give phase "
            f"coefficients ({s1}, {s2}, {s3}); all must be positive"
        )
    st = 1.0 / (1.0 / s1 + 1.0 / s2 + 1.0 / s3)
    return s1, s2, s3, st


def alpha_tilde(alpha: float, eps: float) -> float:
    """Effective kinetic coefficient: ``alpha`` itself, or ``eps`` in the
    fast-reaction limit ``alpha == 0``."""
    if alpha < 0.0:
        raise NegativeAlpha(f"alpha must be >= 0, got {alpha}")
    return alpha if alpha > 0.0 else eps


@dataclass(frozen=True)
class GSpec:
    """Ion free-energy density ``g(c) = a * (c - c0)**2``.

    Only the quadratic form is supported; ``form`` is kept so config files
    state it explicitly.
    """

    a: float = 1.0
    c0: float = 0.0
    form: str = "quadratic"

    def g(self, c):
        d = c - self.c0
        return self.a * d * d

    def g_prime(self, c):
        return 2.0 * self.a * (c - self.c0)


@dataclass(frozen=True)
class ModelParams:
    """All physical constants plus the two numerical knobs the schemes need.

    Construction performs no checks; call :func:`validate` (or go through the
    config loader, which does) before handing an instance to the solvers.
    Derived quantities (``Sigmas``, ``alpha_t``) are cached properties and
    will raise lazily if the inputs are inconsistent.
    """

    rho1: float = 1.0
    rho2: float = 1.0
    rho3: float = 1.0
    gamma1: float = 1.0
    gamma2: float = 1.0
    gamma3: float = 1.0
    sigma12: float = 1.0
    sigma13: float = 1.0
    sigma23: float = 1.0
    eps: float = 0.0625
    delta: float | None = None
    D: float = 1.0
    alpha: float = 0.0
    d0: float = 1.0
    c_star: float = 1.0
    g: GSpec = field(default_factory=GSpec)
    dt: float = 1e-3
    t_end: float = 1.0
    # numerics
    stab_s: float | None = None  # None: use the default well curvature bound
    cg_rtol: float = 1e-11
    cg_maxiter: int = 20000

    @property
    def delta_eff(self) -> float:
        return self.eps if self.delta is None else self.delta

    @cached_property
    def Sigmas(self) -> tuple[float, float, float]:
        s1, s2, s3, _ = derive_sigmas(self.sigma12, self.sigma13, self.sigma23)
        return s1, s2, s3

    @cached_property
    def SigmaT(self) -> float:
        return derive_sigmas(self.sigma12, self.sigma13, self.sigma23)[3]

    @cached_property
    def alpha_t(self) -> float:
        return alpha_tilde(self.alpha, self.eps)

    def with_overrides(self, **kwargs) -> "ModelParams":
        return replace(self, **kwargs)


def validate(params: ModelParams) -> ModelParams:
    """Check a parameter set and return it unchanged.

    Raises the most specific error available: :class:`TriangleViolation` for
    an inadmissible tension triple, :class:`NegativeAlpha` for ``alpha < 0``,
    :class:`NonpositiveCoefficient` for any quantity that must be positive,
    and plain :class:`ConfigError` for structural problems.
    """
    positive = {
        "rho1": params.rho1,
        "rho2": params.rho2,
        "rho3": params.rho3,
        "gamma1": params.gamma1,
        "gamma2": params.gamma2,
        "gamma3": params.gamma3,
        "eps": params.eps,
        "D": params.D,
        "c_star": params.c_star,
        "g.a": params.g.a,
        "dt": params.dt,
        "cg_rtol": params.cg_rtol,
    }
    for name, value in positive.items():
        if not value > 0.0:
            raise NonpositiveCoefficient(f"{name} must be positive, got {value}")
    if params.d0 < 0.0:
        raise NonpositiveCoefficient(f"d0 must be >= 0, got {params.d0}")
    if params.t_end < 0.0:
        raise NonpositiveCoefficient(f"t_end must be >= 0, got {params.t_end}")
    if not 0.0 < params.delta_eff < 0.5:
        raise NonpositiveCoefficient(
            f"delta must lie in (0, 0.5), got {params.delta_eff}"
        )
    if params.stab_s is not None and params.stab_s <= 0.0:
        raise NonpositiveCoefficient(f"stab_s must be > 0, got {params.stab_s}")
    if params.g.form != "quadratic":
        raise ConfigError(f"unsupported g form {params.g.form!r}")
    if params.rho3 != params.rho1:
        raise ConfigError(
            f"rho3 must equal rho1 (dissolution conserves volume), "
            f"got rho1={params.rho1}, rho3={params.rho3}"
        )
    derive_sigmas(params.sigma12, params.sigma13, params.sigma23)
    alpha_tilde(params.alpha, params.eps)
    return params
