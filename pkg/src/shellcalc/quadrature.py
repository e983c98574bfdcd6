"""Quadrature building blocks used by the distribution pairings.

The package needs three kinds of integration:

* 1D adaptive integration with an error estimate (QUADPACK via scipy.quad),
  used for line integrals in the off-shellness variable and for radial /
  spectral integrals;
* product rules on the unit sphere (Gauss-Legendre in cos(theta), trapezoid
  in the azimuth) with order doubling until the result settles, used to
  reduce 3D momentum integrals to an adaptive radial one;
* whitened tensor Gauss-Hermite rules for integrals of an explicit Gaussian
  envelope times a smooth remainder, used for the multi-leg correlator
  integrals where the envelope is a product of packet Gaussians.

All reductions are deterministic ordered sums (numpy sums over fixed-layout
arrays, pairwise summation for lists of partial results), so results are
reproducible across runs and worker counts.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .errors import NonConvergedError

__all__ = [
    "quad_line",
    "sphere_integral",
    "adaptive_sphere_integral",
    "pairwise_sum",
    "gauss_hermite_gaussian_integral",
    "tensor_gauss_legendre",
    "cheb_interpolate",
]


def quad_line(
    f: Callable[[float], complex],
    a: float,
    b: float,
    *,
    epsrel: float = 1e-8,
    epsabs: float = 1e-12,
    limit: int = 200,
    what: str = "line integral",
    check: bool = True,
) -> tuple[complex, float]:
    """Adaptive 1D integral of a complex-valued function with error estimate.

    Raises NonConvergedError when the QUADPACK error estimate exceeds both
    the relative and absolute tolerances (only if ``check``).
    """
    val, err = quad(
        f, a, b, epsrel=epsrel, epsabs=epsabs, limit=limit, complex_func=True
    )
    # complex_func=True reports per-component error estimates as a complex number
    err = abs(complex(err).real) + abs(complex(err).imag)
    if check and err > max(epsabs, epsrel * abs(val)) * 10:
        raise NonConvergedError(what, val, err, max(epsabs, epsrel * abs(val)))
    return complex(val), float(err)


@lru_cache(maxsize=64)
def _leggauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


@lru_cache(maxsize=64)
def _sphere_grid(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Unit-sphere nodes (N,3) and weights (N,) for a product rule of given order.

    Gauss-Legendre in u = cos(theta) with ``order`` points, trapezoid with
    2*order equispaced azimuth points (exact for trigonometric polynomials).
    """
    u, wu = _leggauss(order)
    nphi = 2 * order
    phi = 2.0 * np.pi * np.arange(nphi) / nphi
    wphi = np.full(nphi, 2.0 * np.pi / nphi)
    su = np.sqrt(1.0 - u * u)
    # outer products, flattened in fixed (u, phi) order
    nx = np.outer(su, np.cos(phi)).ravel()
    ny = np.outer(su, np.sin(phi)).ravel()
    nz = np.outer(u, np.ones(nphi)).ravel()
    nodes = np.stack([nx, ny, nz], axis=-1)
    weights = np.outer(wu, wphi).ravel()
    return nodes, weights


def sphere_integral(h: Callable[[np.ndarray], np.ndarray], order: int) -> complex:
    """integral over the unit sphere of h(n) dOmega at a fixed product order.

    ``h`` receives an (N,3) array of unit vectors and returns (N,) values.
    """
    nodes, weights = _sphere_grid(order)
    vals = np.asarray(h(nodes))
    return complex(np.sum(weights * vals))


def adaptive_sphere_integral(
    h: Callable[[np.ndarray], np.ndarray],
    *,
    rel_tol: float = 1e-9,
    abs_tol: float = 0.0,
    start_order: int = 8,
    max_order: int = 256,
) -> tuple[complex, float]:
    """Sphere integral with order doubling until two levels agree.

    Returns (value, error_estimate); the estimate is the last inter-level
    difference. Does not raise: the caller folds the estimate into its own
    convergence check.
    """
    order = start_order
    prev = sphere_integral(h, order)
    while order < max_order:
        order *= 2
        cur = sphere_integral(h, order)
        diff = abs(cur - prev)
        if diff <= max(rel_tol * abs(cur), abs_tol):
            return cur, diff
        prev = cur
    return prev, abs(prev) * rel_tol  # smooth integrands never get here


def pairwise_sum(values: list[complex]) -> complex:
    """Sum a list in a fixed balanced-tree order (reproducible reduction)."""
    items = list(values)
    if not items:
        return 0.0 + 0.0j
    while len(items) > 1:
        paired = [
            items[i] + items[i + 1] if i + 1 < len(items) else items[i]
            for i in range(0, len(items), 2)
        ]
        items = paired
    return items[0]


@lru_cache(maxsize=64)
def _hermgauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.hermite.hermgauss(n)


def gauss_hermite_gaussian_integral(
    remainder: Callable[[np.ndarray], np.ndarray],
    A: np.ndarray,
    b: np.ndarray,
    logc: float,
    order: int,
    *,
    chunk: int = 4_000_000,
) -> complex:
    """integral over R^d of exp(-x.A.x/2 + b.x + logc) * remainder(x) dx.

    The Gaussian part is handled exactly by completing the square and
    whitening with the Cholesky factor of A; ``remainder`` (vectorized over
    an (N,d) array) is sampled on a tensor Gauss-Hermite grid of the given
    order per axis. Evaluation is chunked to bound memory.

    ``remainder`` may return shape (N,) for a single integrand or (N, k)
    for k integrands sharing the same Gaussian factor; the result is then
    a complex array of shape (k,) from a single sweep over the grid.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    d = A.shape[0]
    L = np.linalg.cholesky(A)
    xstar = np.linalg.solve(A, b)
    # exp(-x.A.x/2 + b.x) = exp(b.xstar/2) * exp(-z.A.z/2), x = xstar + z
    log_pref = logc + 0.5 * float(b @ xstar)
    # z = sqrt(2) L^{-T} u turns the exponent into -|u|^2
    jac = 2.0 ** (d / 2.0) / np.prod(np.diag(L))

    t, wt = _hermgauss(order)
    # tensor grid, chunked over the first axis
    total = 0.0 + 0.0j
    n_per_slab = order ** (d - 1)
    grids = np.meshgrid(*([t] * (d - 1)), indexing="ij")
    u_rest = np.stack([g.ravel() for g in grids], axis=-1) if d > 1 else np.zeros((1, 0))
    w_grids = np.meshgrid(*([wt] * (d - 1)), indexing="ij")
    w_rest = np.ones(1) if d == 1 else np.prod(
        np.stack([g.ravel() for g in w_grids], axis=-1), axis=-1
    )
    Linv_T = np.linalg.inv(L).T
    pref = np.exp(log_pref) * jac

    def weighted(vals: np.ndarray, w: np.ndarray):
        vals = np.asarray(vals)
        if vals.ndim == 1:
            return complex(np.sum(w * vals))
        return np.sum(w[:, None] * vals, axis=0)

    partials = []
    for i in range(order):
        u = np.empty((n_per_slab, d))
        u[:, 0] = t[i]
        if d > 1:
            u[:, 1:] = u_rest
        x = xstar[None, :] + np.sqrt(2.0) * u @ Linv_T.T
        w = wt[i] * w_rest
        if x.shape[0] > chunk:
            sub = [
                weighted(remainder(x[j : j + chunk]), w[j : j + chunk])
                for j in range(0, x.shape[0], chunk)
            ]
            partials.append(pairwise_sum(sub))
        else:
            partials.append(weighted(remainder(x), w))
    total = pairwise_sum(partials)
    return pref * total


def tensor_gauss_legendre(
    f: Callable[[np.ndarray], np.ndarray],
    lows: np.ndarray,
    highs: np.ndarray,
    order: int,
    *,
    chunk: int = 4_000_000,
) -> complex:
    """Tensor-product Gauss-Legendre integral of f over a box in R^d.

    ``f`` is vectorized over an (N,d) array. Used for fixed-grid reference
    evaluations and refinement checks.
    """
    lows = np.asarray(lows, dtype=float)
    highs = np.asarray(highs, dtype=float)
    d = lows.size
    t, wt = _leggauss(order)
    axes = [0.5 * (hi + lo) + 0.5 * (hi - lo) * t for lo, hi in zip(lows, highs)]
    waxes = [0.5 * (hi - lo) * wt for lo, hi in zip(lows, highs)]
    n_per_slab = order ** (d - 1)
    if d > 1:
        grids = np.meshgrid(*axes[1:], indexing="ij")
        x_rest = np.stack([g.ravel() for g in grids], axis=-1)
        w_grids = np.meshgrid(*waxes[1:], indexing="ij")
        w_rest = np.prod(np.stack([g.ravel() for g in w_grids], axis=-1), axis=-1)
    else:
        x_rest = np.zeros((1, 0))
        w_rest = np.ones(1)
    partials: list[complex] = []
    for i in range(order):
        x = np.empty((n_per_slab, d))
        x[:, 0] = axes[0][i]
        if d > 1:
            x[:, 1:] = x_rest
        w = waxes[0][i] * w_rest
        if x.shape[0] > chunk:
            sub = []
            for j in range(0, x.shape[0], chunk):
                vals = np.asarray(f(x[j : j + chunk]))
                sub.append(complex(np.sum(w[j : j + chunk] * vals)))
            partials.append(pairwise_sum(sub))
        else:
            vals = np.asarray(f(x))
            partials.append(complex(np.sum(w * vals)))
    return pairwise_sum(partials)


def cheb_interpolate(
    f_scalar: Callable[[float], complex], lo: float, hi: float, n: int
):
    """Chebyshev interpolant of a scalar function on [lo, hi] from n nodes.

    Returns a callable that accepts floats or arrays. Intended for smooth,
    expensive functions (each node costs one inner quadrature).
    """
    j = np.arange(n)
    x = np.cos(np.pi * (j + 0.5) / n)  # first-kind nodes on [-1, 1]
    xs = 0.5 * (hi + lo) + 0.5 * (hi - lo) * x
    ys = np.array([f_scalar(float(v)) for v in xs])
    if np.all(np.abs(ys.imag) == 0.0):
        ys = ys.real
    series = np.polynomial.chebyshev.Chebyshev.fit(xs, ys, deg=n - 1, domain=[lo, hi])
    return series
