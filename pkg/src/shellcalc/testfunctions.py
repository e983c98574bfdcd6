"""Test functions: the fixed bump, regulator sequences, and wave packets.

The bump phi(kappa) = kappa * B(|kappa|) is odd, C1, supported on
[-2, 2], and equals kappa itself on [-1, 1]; B tapers with a half-cosine.
Dividing the rescaled bump phi(n kappa) by a current profile produces the
regulator sequence used by the stability argument: the product
phi_n * profile collapses back to phi(n kappa), whose pairing with
1/(kappa + i0) is independent of n.

Wave packets factorize as temporal(kappa) * spatial(kvec) with kappa the
off-shellness relative to a reference mass. The conjugate flip
h(k) -> conj(h(-k)) needed for Hermitian pairings does not factorize, so it
is returned as a bare momentum-space callable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .distributions import C1, SMOOTH, LineFunction
from .errors import InsufficientNError
from .kinematics import Mass, omega

__all__ = [
    "make_bump",
    "BUMP_CEILING",
    "make_regulator",
    "constant_line",
    "gaussian_line",
    "odd_gaussian_line",
    "SpatialEnvelope",
    "WavePacket",
    "FlippedPacket",
    "conjugate_flip",
    "uniform_bound",
]

# sup |phi| over the line; the actual max is ~1.0884, any ceiling >= that
# works for the dominating majorant. Kept at 2 so the majorant matches the
# one used in the convergence argument.
BUMP_CEILING = 2.0


def _taper(u: np.ndarray) -> np.ndarray:
    """B(u): 1 on [0,1], half-cosine down to 0 on [1,2], 0 beyond."""
    u = np.abs(u)
    out = np.zeros_like(u)
    out = np.where(u <= 1.0, 1.0, out)
    mid = (u > 1.0) & (u < 2.0)
    out = np.where(mid, 0.5 * (1.0 + np.cos(np.pi * (u - 1.0))), out)
    return out


def make_bump() -> LineFunction:
    """The fixed odd C1 bump phi(kappa) = kappa * B(|kappa|), support [-2, 2].

    phi(kappa)/kappa = B(|kappa|) >= 0 everywhere and = 1 on [-1, 1], which
    pins its principal-value pairing at 2 * int_0^2 B = 3 (in particular >= 2).
    """

    def eval_(kappa: np.ndarray) -> np.ndarray:
        return kappa * _taper(kappa)

    return LineFunction(eval=eval_, support_radius=2.0, smoothness_class=C1)


def make_regulator(
    bump: LineFunction,
    n: int,
    profile: LineFunction,
    certified_radius: float,
) -> LineFunction:
    """Regulator phi_n(kappa) = phi(n kappa) / profile(kappa).

    Valid only once the rescaled support [-2/n, 2/n] fits inside the radius
    on which the profile is certified nonvanishing; outside the support the
    function is exactly zero (the profile is never evaluated there).
    """
    if n < 1:
        raise ValueError(f"regulator index must be >= 1, got {n}")
    support = bump.support_radius / n
    if support > certified_radius:
        raise InsufficientNError(n, certified_radius)

    def eval_(kappa: np.ndarray) -> np.ndarray:
        kappa = np.asarray(kappa, dtype=float)
        inside = np.abs(kappa) <= support
        out = np.zeros(kappa.shape, dtype=complex)
        if np.any(inside):
            k_in = kappa[inside]
            out[inside] = bump.eval(n * k_in) / profile.eval(k_in)
        return out

    return LineFunction(eval=eval_, support_radius=support, smoothness_class=C1)


def constant_line(value: float = 1.0) -> LineFunction:
    """Constant temporal factor (no off-shell suppression)."""

    def eval_(kappa: np.ndarray) -> np.ndarray:
        return np.full(np.shape(kappa), value, dtype=float)

    return LineFunction(eval=eval_, support_radius=np.inf, smoothness_class=SMOOTH)


def gaussian_line(width: float, amplitude: float = 1.0) -> LineFunction:
    """Gaussian temporal factor exp(-kappa^2 / (2 width^2))."""
    if width <= 0:
        raise ValueError("width must be positive")

    def eval_(kappa: np.ndarray) -> np.ndarray:
        return amplitude * np.exp(-0.5 * (np.asarray(kappa) / width) ** 2)

    return LineFunction(eval=eval_, support_radius=np.inf, smoothness_class=SMOOTH)


def odd_gaussian_line(width: float, amplitude: float = 1.0) -> LineFunction:
    """Odd temporal factor kappa * exp(-kappa^2 / (2 width^2)).

    Vanishes exactly at zero off-shellness: a packet built from it has no
    on-shell component, so shell measures of its own reference mass cannot
    see it, while off-shell pairings (propagator poles in particular) can.
    """
    if width <= 0:
        raise ValueError("width must be positive")

    def eval_(kappa: np.ndarray) -> np.ndarray:
        kappa = np.asarray(kappa, dtype=float)
        return amplitude * kappa * np.exp(-0.5 * (kappa / width) ** 2)

    return LineFunction(eval=eval_, support_radius=np.inf, smoothness_class=SMOOTH)


# |g| falls below 1e-12 * amplitude beyond this many widths from center
_ENVELOPE_DECADES = np.sqrt(2.0 * np.log(1e12))


@dataclass(frozen=True)
class SpatialEnvelope:
    """Gaussian envelope in 3-momentum: a * exp(-|k - center|^2 / (2 w^2))."""

    center: np.ndarray
    width: float
    amplitude: float = 1.0

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float)
        if c.shape != (3,) or not np.all(np.isfinite(c)):
            raise ValueError("center must be a finite 3-vector")
        if not (self.width > 0 and np.isfinite(self.width)):
            raise ValueError("width must be positive and finite")
        if not (self.amplitude > 0 and np.isfinite(self.amplitude)):
            raise ValueError("amplitude must be positive and finite")
        object.__setattr__(self, "center", c)

    def __call__(self, kvec: np.ndarray) -> np.ndarray:
        kvec = np.asarray(kvec, dtype=float)
        d2 = np.sum((kvec - self.center) ** 2, axis=-1)
        return self.amplitude * np.exp(-0.5 * d2 / self.width**2)

    @property
    def cutoff_radius(self) -> float:
        """Radius beyond which the envelope is below 1e-12 of its amplitude."""
        return float(np.linalg.norm(self.center) + _ENVELOPE_DECADES * self.width)

    def spherical_mean_sq(self, r: np.ndarray) -> np.ndarray:
        """Mean of |g(r Omega)|^2 over the unit sphere, in closed form.

        For a Gaussian the angular average is a^2 exp(-(r^2+c^2)/w^2) *
        sinh(2rc/w^2)/(2rc/w^2) with c = |center| (the sinhc factor is 1 for
        a centered envelope).
        """
        r = np.asarray(r, dtype=float)
        c = float(np.linalg.norm(self.center))
        w2 = self.width**2
        base = self.amplitude**2 * np.exp(-(r * r + c * c) / w2)
        if c == 0.0:
            return base
        x = 2.0 * r * c / w2
        small = np.abs(x) < 1e-6
        sinhc = np.where(small, 1.0 + x * x / 6.0, np.sinh(np.where(small, 1.0, x)) / np.where(small, 1.0, x))
        return base * sinhc


@dataclass(frozen=True)
class WavePacket:
    """Factorized packet h(k0, kvec) = temporal(k0 - omega_ref(kvec)) * spatial(kvec)."""

    temporal: LineFunction
    spatial: SpatialEnvelope
    reference_mass: Mass

    def __call__(self, k0: np.ndarray, kvec: np.ndarray) -> np.ndarray:
        kappa = np.asarray(k0, dtype=float) - omega(kvec, self.reference_mass)
        return self.temporal.eval(kappa) * self.spatial(kvec)

    def residual(self, k0: np.ndarray, kvec: np.ndarray) -> np.ndarray:
        """The packet divided by its spatial Gaussian (smooth and bounded)."""
        kappa = np.asarray(k0, dtype=float) - omega(kvec, self.reference_mass)
        return self.temporal.eval(kappa)

    @property
    def spatial_cutoff(self) -> float:
        return self.spatial.cutoff_radius


@dataclass(frozen=True)
class FlippedPacket:
    """h(k) -> conj(h(-k)), the momentum-space image of complex conjugation.

    The temporal x spatial split of the base packet does not survive (the
    flipped temporal argument acquires kvec dependence), but the spatial
    factor is still a Gaussian with mirrored center, so the Gaussian-plus-
    smooth-residual decomposition used by the correlator quadrature does.
    """

    base: WavePacket

    def __call__(self, k0: np.ndarray, kvec: np.ndarray) -> np.ndarray:
        return np.conj(
            self.base(-np.asarray(k0, dtype=float), -np.asarray(kvec, dtype=float))
        )

    def residual(self, k0: np.ndarray, kvec: np.ndarray) -> np.ndarray:
        return np.conj(
            self.base.residual(-np.asarray(k0, dtype=float), -np.asarray(kvec, dtype=float))
        )

    @property
    def spatial(self) -> SpatialEnvelope:
        b = self.base.spatial
        return SpatialEnvelope(center=-b.center, width=b.width, amplitude=b.amplitude)

    @property
    def spatial_cutoff(self) -> float:
        return self.base.spatial_cutoff


def conjugate_flip(f):
    """Flip a packet; WavePackets keep their Gaussian-residual structure."""
    if isinstance(f, FlippedPacket):
        return f.base
    if isinstance(f, WavePacket):
        return FlippedPacket(f)

    def flipped(k0: np.ndarray, kvec: np.ndarray) -> np.ndarray:
        return np.conj(f(-np.asarray(k0, dtype=float), -np.asarray(kvec, dtype=float)))

    return flipped


def uniform_bound(
    packet: WavePacket,
    sup_inverse_profile: float,
    *,
    radius: float = 1.0,
) -> Callable:
    """n-independent majorant of |regulator * spatial|^2.

    For every n >= 2/radius the regulated packet obeys
    |phi_n(kappa) g(k)|^2 <= (BUMP_CEILING * sup 1/|profile|)^2 on the strip
    |kappa| <= radius, zero outside. The returned callable is that majorant;
    its spectral pairing is the dominating integral for the collapse bound.
    """
    scale = (BUMP_CEILING * sup_inverse_profile) ** 2

    def bound(k0: np.ndarray, kvec: np.ndarray) -> np.ndarray:
        kappa = np.asarray(k0, dtype=float) - omega(kvec, packet.reference_mass)
        chi = (np.abs(kappa) <= radius).astype(float)
        g = packet.spatial(kvec)
        return scale * chi * np.abs(g) ** 2

    return bound
