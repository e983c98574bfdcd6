"""Exception and warning types shared across the package.

Every computational failure mode maps to one subclass of ShellCalcError so
callers (and the CLI exit-code logic) can discriminate without string
matching.
"""

from __future__ import annotations


class ShellCalcError(Exception):
    """Base class for all package errors."""


class ConfigError(ShellCalcError):
    """Invalid run configuration. Carries the offending field path."""

    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"{path}: {reason}")


class NonConvergedError(ShellCalcError):
    """Adaptive quadrature could not reach its tolerance within budget."""

    def __init__(self, what: str, estimate: complex, error: float, tol: float):
        self.what = what
        self.estimate = estimate
        self.error = error
        self.tol = tol
        super().__init__(
            f"{what}: quadrature error {error:.3e} above tolerance {tol:.3e} "
            f"(estimate {estimate})"
        )


class SmoothnessViolationError(ShellCalcError):
    """Integrand is not C1 near the singular point; symmetric subtraction invalid."""


class InsufficientNError(ShellCalcError):
    """Regulator index n too small: bump support 2/n exceeds the certified radius."""

    def __init__(self, n: int, radius: float):
        self.n = n
        self.radius = radius
        super().__init__(
            f"n={n} gives bump support 2/n={2.0 / n:.4g} outside the certified "
            f"radius {radius:.4g}; increase n"
        )


class OnShellVanishingError(ShellCalcError):
    """The smeared current profile vanishes at zero off-shellness.

    This is not a numerical failure: it signals the trivial branch in which
    the asymptotic in- and out-states already coincide.
    """

    def __init__(self, value: complex, scale: float):
        self.value = value
        self.scale = scale
        super().__init__(
            f"current profile at kappa=0 is {abs(value):.3e} against scale "
            f"{scale:.3e}: no decay channel"
        )


class DegenerateMassesError(ShellCalcError):
    """The two model masses coincide; polarization factors are undefined."""


class PoleProximityError(ShellCalcError):
    """Packet supports cross (or come too close to) a propagator pole."""

    def __init__(self, term: str, margin: float, gap: float):
        self.term = term
        self.margin = margin
        self.gap = gap
        super().__init__(
            f"term {term}: pole margin {margin:.4g} below required gap {gap:.4g}; "
            f"shift packet centers or enable principal-value mode"
        )


class UnsupportedOrderError(ShellCalcError):
    """Correlation functions beyond four points are out of scope."""


class ZeroOverlapWarning(UserWarning):
    """Monte-Carlo amplitude estimate indistinguishable from zero."""
