"""Numerical realization of the singular momentum-space distributions.

Four pairings are provided:

* ``smear_mass_shell`` -- integration against the mass-shell measure
  delta_s^{+/-}(k) = theta(+/- k0) delta(k^2 - s^2), reduced to the standard
  d^3k / (2 omega_s) surface integral;
* ``principal_value`` -- PV integral of f(kappa)/kappa by symmetric
  subtraction, never sampling the singular point;
* ``boundary_value_pairing`` -- the distributional boundary values
  1/(kappa +/- i0) = PV(1/kappa) -/+ i pi delta(kappa), assembled exactly
  from the PV part and f(0) (the limit is taken analytically, never by
  small-epsilon numerics);
* ``spectral_pairing`` -- integration of a mass-shell smearing against a
  Kallen-Lehmann spectral measure (atoms plus piecewise-polynomial
  continuum).

Momentum-space integrands are vectorized callables ``f(k0, kvec)`` with
``k0`` of shape (N,) and ``kvec`` of shape (N, 3), returning an (N,) array.
Line integrands are vectorized callables of one real array.

Every pairing carries a quadrature error estimate, available through
``full_output=True``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np
import yaml

from .errors import NonConvergedError, SmoothnessViolationError
from .quadrature import adaptive_sphere_integral, quad_line

__all__ = [
    "LineFunction",
    "SpectralMeasure",
    "DensityPiece",
    "ShellSign",
    "smear_mass_shell",
    "principal_value",
    "boundary_value_pairing",
    "spectral_pairing",
]

ShellSign = Literal["+", "-"]

C0 = "C0"
C1 = "C1"
SMOOTH = "SMOOTH"


@dataclass(frozen=True)
class LineFunction:
    """A complex-valued function of the off-shellness variable kappa.

    ``eval`` must accept float arrays. ``support_radius`` is an R such that
    the function vanishes for |kappa| > R (np.inf if none is known).
    ``smoothness_class`` is one of "C0", "C1", "SMOOTH"; the symmetric
    subtraction underlying the principal value needs at least C1.
    """

    eval: Callable[[np.ndarray], np.ndarray]
    support_radius: float = np.inf
    smoothness_class: str = C1

    def __call__(self, kappa):
        return self.eval(np.asarray(kappa, dtype=float))


@dataclass(frozen=True)
class DensityPiece:
    """Polynomial continuum piece: value(s2) = sum_j coeffs[j] * s2**j on [a, b]."""

    interval: tuple[float, float]
    coeffs: tuple[float, ...]

    def __post_init__(self):
        a, b = self.interval
        if not (0.0 <= a <= b and np.isfinite(b)):
            raise ValueError(f"density interval must satisfy 0 <= a <= b < inf, got {self.interval}")
        object.__setattr__(self, "interval", (float(a), float(b)))
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))

    def value(self, s2):
        s2 = np.asarray(s2, dtype=float)
        out = np.zeros_like(s2)
        for j, c in reversed(list(enumerate(self.coeffs))):
            out = out * s2 + c
        return out


@dataclass(frozen=True)
class SpectralMeasure:
    """Kallen-Lehmann measure rho(ds^2): point masses plus a continuum density.

    In the default positive-metric mode all atom weights and the density must
    be nonnegative; ``signed=True`` lifts that restriction (used only by the
    indefinite-metric model).
    """

    atoms: tuple[tuple[float, float], ...] = ()
    density: tuple[DensityPiece, ...] = ()
    signed: bool = False

    def __post_init__(self):
        atoms = tuple((float(s2), float(w)) for s2, w in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "density", tuple(self.density))
        for s2, w in atoms:
            if s2 < 0:
                raise ValueError(f"atom position s2={s2} must be >= 0")
            if not self.signed and w < 0:
                raise ValueError(f"negative atom weight {w} requires signed mode")
        if not self.signed:
            for piece in self.density:
                a, b = piece.interval
                grid = np.linspace(a, b, 257)
                if np.min(piece.value(grid)) < 0:
                    raise ValueError(
                        f"density dips negative on [{a}, {b}]; requires signed mode"
                    )

    # -- serialization (schema documented in the README) -------------------

    def to_dict(self) -> dict:
        return {
            "atoms": [[s2, w] for s2, w in self.atoms],
            "density": [
                {"interval": list(p.interval), "coeffs": list(p.coeffs)}
                for p in self.density
            ],
            "signed": bool(self.signed),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SpectralMeasure":
        atoms = tuple((float(a[0]), float(a[1])) for a in d.get("atoms", []))
        density = tuple(
            DensityPiece(tuple(p["interval"]), tuple(p["coeffs"]))
            for p in d.get("density", [])
        )
        return cls(atoms=atoms, density=density, signed=bool(d.get("signed", False)))

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=True)

    @classmethod
    def from_yaml(cls, text: str) -> "SpectralMeasure":
        return cls.from_dict(yaml.safe_load(text))


def shell_energy(r, s: float):
    """omega_s(r) = sqrt(r^2 + s^2) for radial momentum r."""
    r = np.asarray(r, dtype=float)
    return np.sqrt(r * r + s * s)


def smear_mass_shell(
    s: float,
    sign: ShellSign,
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    spatial_cutoff: float,
    *,
    epsrel: float = 1e-6,
    epsabs: float = 1e-14,
    complex_valued: bool = True,
    full_output: bool = False,
):
    """integral of f against delta_s^{sign}: int_{|kvec|<=cutoff} f(sgn*omega, kvec) / (2 omega) d3k.

    The 3D integral is reduced to an adaptive radial integral of spherical
    averages; the sphere rule doubles its order until settled, the radial
    integral is QUADPACK with the stated tolerances.
    """
    s = float(s)
    if spatial_cutoff <= 0:
        raise ValueError("spatial_cutoff must be positive")
    sgn = {"+": 1.0, "-": -1.0}[sign]
    ang_err_max = 0.0

    def radial(r: float):
        nonlocal ang_err_max
        if r == 0.0:
            return 0.0 if not complex_valued else 0.0 + 0.0j
        w = float(shell_energy(r, s))

        def on_sphere(nodes: np.ndarray) -> np.ndarray:
            kvec = r * nodes
            k0 = np.full(kvec.shape[0], sgn * w)
            return f(k0, kvec)

        ang, aerr = adaptive_sphere_integral(
            on_sphere, rel_tol=min(1e-9, 0.05 * epsrel), abs_tol=1e-300
        )
        ang_err_max = max(ang_err_max, aerr)
        val = r * r * ang / (2.0 * w)
        return val if complex_valued else val.real

    if complex_valued:
        val, err = quad_line(
            radial, 0.0, spatial_cutoff, epsrel=epsrel, epsabs=epsabs,
            what="mass-shell smearing",
        )
    else:
        from scipy.integrate import quad

        v, err = quad(radial, 0.0, spatial_cutoff, epsrel=epsrel, epsabs=epsabs, limit=200)
        if err > max(epsabs, epsrel * abs(v)) * 10:
            raise NonConvergedError("mass-shell smearing", v, err, max(epsabs, epsrel * abs(v)))
        val = complex(v)
    err_total = err + abs(ang_err_max) * spatial_cutoff
    if full_output:
        return val, err_total
    return val


_PV_QUOTIENT_FLOOR = 1e-9


def principal_value(
    f: LineFunction,
    *,
    epsrel: float = 1e-8,
    epsabs: float = 1e-13,
    full_output: bool = False,
):
    """PV integral of f(kappa)/kappa over the line.

    Computed as int_0^R (f(kappa) - f(-kappa)) / kappa dkappa; the kappa -> 0
    limit of the integrand is filled by the symmetric difference quotient, so
    the singular point is never sampled. Requires f at least C1 near 0.
    """
    if f.smoothness_class == C0:
        raise SmoothnessViolationError(
            "principal value needs a C1 integrand: symmetric subtraction of a "
            "merely continuous function does not control the quotient at 0"
        )
    radius = f.support_radius
    upper = radius if np.isfinite(radius) else np.inf
    scale = min(1.0, radius) if np.isfinite(radius) else 1.0
    floor = _PV_QUOTIENT_FLOOR * scale

    def quotient(kappa: float):
        k = max(abs(kappa), floor)
        fp = f.eval(np.asarray([k]))[0]
        fm = f.eval(np.asarray([-k]))[0]
        return (fp - fm) / k

    val, err = quad_line(
        quotient, 0.0, upper, epsrel=epsrel, epsabs=epsabs,
        what="principal value",
    )
    if full_output:
        return val, err
    return val


def boundary_value_pairing(
    f: LineFunction,
    side: Literal["+i0", "-i0"],
    *,
    epsrel: float = 1e-8,
    full_output: bool = False,
):
    """Pairing of f with the boundary value 1/(kappa +/- i0).

    Sokhotski-Plemelj: 1/(kappa +/- i0) = PV(1/kappa) -/+ i pi delta(kappa),
    so the result is principal_value(f) -/+ i pi f(0). The i0 limit is exact;
    no small-epsilon parameter enters.
    """
    if side not in ("+i0", "-i0"):
        raise ValueError(f"side must be '+i0' or '-i0', got {side!r}")
    pv, err = principal_value(f, epsrel=epsrel, full_output=True)
    f0 = complex(f.eval(np.asarray([0.0]))[0])
    delta_term = -1j * np.pi * f0 if side == "+i0" else 1j * np.pi * f0
    val = pv + delta_term
    if full_output:
        return val, err
    return val


def spectral_pairing(
    rho: SpectralMeasure,
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    spatial_cutoff: float,
    *,
    epsrel: float = 1e-6,
    complex_valued: bool = True,
    full_output: bool = False,
):
    """integral over rho(ds^2) of the forward-shell smearing of f.

    Atoms contribute weight * smear_mass_shell(sqrt(s2), "+", f); each
    continuum piece contributes the 1D integral of density(s2) times the
    same smearing. Inner smears run one decade tighter than the outer
    tolerance.
    """
    inner_rel = 0.1 * epsrel
    total = 0.0 + 0.0j
    err_total = 0.0
    for s2, w in rho.atoms:
        if w == 0.0:
            continue
        v, e = smear_mass_shell(
            float(np.sqrt(s2)), "+", f, spatial_cutoff,
            epsrel=inner_rel, complex_valued=complex_valued, full_output=True,
        )
        total += w * v
        err_total += abs(w) * e

    for piece in rho.density:
        a, b = piece.interval

        def outer(s2: float):
            dens = float(piece.value(s2))
            if dens == 0.0:
                return 0.0 + 0.0j if complex_valued else 0.0
            v = smear_mass_shell(
                float(np.sqrt(s2)), "+", f, spatial_cutoff,
                epsrel=inner_rel, complex_valued=complex_valued,
            )
            return dens * v if complex_valued else dens * v.real

        if complex_valued:
            v, e = quad_line(
                outer, a, b, epsrel=epsrel, epsabs=1e-13, limit=100,
                what="spectral integral",
            )
        else:
            from scipy.integrate import quad

            vv, e = quad(outer, a, b, epsrel=epsrel, epsabs=1e-13, limit=100)
            if e > max(1e-13, epsrel * abs(vv)) * 10:
                raise NonConvergedError("spectral integral", vv, e, epsrel * abs(vv))
            v = complex(vv)
        total += v
        err_total += e

    if full_output:
        return total, err_total
    return total
