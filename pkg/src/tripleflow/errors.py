"""Exception types raised across the package.

Everything derives from :class:`TripleflowError` so callers (and the CLI) can
distinguish our failures from genuine bugs.  Solver-abort conditions map to
exit code 3 in the CLI; configuration problems map to 1.
"""

from __future__ import annotations


class TripleflowError(Exception):
    """Base class for all package errors."""


class ConfigError(TripleflowError):
    """Malformed or inconsistent run configuration (unknown key, bad value)."""


class TriangleViolation(ConfigError):
    """Pairwise surface tensions admit no positive phase coefficients."""


class NegativeAlpha(ConfigError):
    """Kinetic coefficient alpha must be >= 0."""


class NonpositiveCoefficient(ConfigError):
    """A density, viscosity, diffusivity or width that must be > 0 is not."""


class BadInitialSpec(ConfigError):
    """Initial-condition description is malformed or outside the domain."""


class UnsupportedBC(ConfigError):
    """Boundary tag combination the solver does not support."""


class BarrierBlowup(TripleflowError):
    """Barrier function evaluated at or beyond its pole."""


class NegativeConcentration(TripleflowError):
    """Ion concentration left the admissible range."""


class SolverAbort(TripleflowError):
    """Base for runtime failures that abort a run (CLI exit code 3)."""


class StepRejected(SolverAbort):
    """A time step produced inadmissible fields and retries were exhausted."""


class PoissonNonconvergence(SolverAbort):
    """Pressure (or another linear) solve failed to reach tolerance."""


class NonStationary(SolverAbort):
    """A relaxation run hit its step budget before reaching quasi-steady state."""


class TriplePointNotFound(SolverAbort):
    """No three-phase junction present when a measurement required one."""


class FrontLost(SolverAbort):
    """A tracked interface left the measurement window or vanished."""
