"""Minkowski four-vector arithmetic and mass-shell geometry.

Conventions, fixed once for the whole package:

* metric signature (+, -, -, -), so k^2 = (k0)^2 - |kvec|^2;
* natural units, hbar = c = 1: masses, momenta and energies share one unit;
* the forward/backward mass shell of mass m is k^2 = m^2 with k0 > 0 / k0 < 0;
* "off-shellness" of a four-momentum relative to a mass m is
  kappa = k0 - omega(kvec, m), which vanishes exactly on the forward shell.

All functions are pure, accept numpy arrays where that is useful, and are safe
for unrestricted concurrent use.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["FourVector", "Mass", "omega", "minkowski_square", "off_shellness"]


@dataclass(frozen=True)
class Mass:
    """A nonnegative rest mass in natural units."""

    value: float

    def __post_init__(self):
        if not np.isfinite(self.value) or self.value < 0:
            raise ValueError(f"mass must be finite and >= 0, got {self.value}")

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class FourVector:
    """Minkowski momentum (k0, kvec) with signature (+,-,-,-)."""

    e: float
    p: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        arr = np.asarray(self.p, dtype=float)
        if arr.shape != (3,):
            raise ValueError(f"spatial part must be a 3-vector, got shape {arr.shape}")
        if not (np.isfinite(self.e) and np.all(np.isfinite(arr))):
            raise ValueError("four-vector components must be finite")
        object.__setattr__(self, "p", arr)

    @property
    def spatial_norm(self) -> float:
        return float(np.linalg.norm(self.p))


def omega(p, mass) -> float | np.ndarray:
    """Shell energy sqrt(|p|^2 + mass^2).

    ``p`` may be a single 3-vector or an array of shape (..., 3); the result
    follows the leading shape. Always >= mass.
    """
    m = float(mass)
    arr = np.asarray(p, dtype=float)
    sq = np.sum(arr * arr, axis=-1)
    out = np.sqrt(sq + m * m)
    return float(out) if out.ndim == 0 else out


def minkowski_square(v: FourVector) -> float:
    """k^2 = (k0)^2 - |kvec|^2 in the fixed (+,-,-,-) signature."""
    return float(v.e * v.e - np.dot(v.p, v.p))


def off_shellness(v: FourVector, mass) -> float:
    """kappa = k0 - omega(kvec, mass); zero exactly on the forward shell."""
    return float(v.e - omega(v.p, mass))
