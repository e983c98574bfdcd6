"""Shell smearing, principal values, boundary pairings, spectral integrals."""

import numpy as np
import pytest

from shellcalc import (
    DensityPiece,
    LineFunction,
    SpectralMeasure,
    boundary_value_pairing,
    principal_value,
    shell_energy,
    smear_mass_shell,
    spectral_pairing,
)
from shellcalc.distributions import C0, SMOOTH
from shellcalc.errors import SmoothnessViolationError

# references computed by tests/oracles.py, frozen by tests/freeze_oracles.py
SMEAR_RADIAL_GAUSSIAN = 1.8957945932929912  # fixed-grid Simpson, 16001 points
SMEAR_OFFCENTER = 1.3062144365686108  # cartesian Simpson, 361^3 grid
SPECTRAL_UNIFORM = 0.7021444296644975  # nested Simpson 2001 x 8001
PV_SHIFTED_GAUSS = 1.5045858139077795  # eps-ladder reference (tests/freeze_oracles.py, section I)


def smooth_line(fn):
    return LineFunction(eval=fn, support_radius=np.inf, smoothness_class=SMOOTH)


def test_smear_zero_integrand():
    val = smear_mass_shell(1.0, "+", lambda k0, kv: np.zeros(kv.shape[0]), 5.0)
    assert val == 0.0


def test_smear_radial_gaussian_reference():
    val = smear_mass_shell(
        1.0, "+", lambda k0, kv: np.exp(-np.sum(kv * kv, axis=-1)), 8.0, epsrel=1e-9
    )
    assert val == pytest.approx(SMEAR_RADIAL_GAUSSIAN, rel=1e-12)


def test_smear_backward_of_forward_supported():
    # integrand vanishing for k0 < 0 gives a zero backward-shell integral
    def f(k0, kv):
        return np.where(np.asarray(k0) > 0, 1.0, 0.0) * np.exp(-np.sum(kv * kv, axis=-1))

    assert smear_mass_shell(1.0, "-", f, 8.0) == 0.0


def test_smear_offcenter_reference():
    c = np.array([0.4, 0.0, 0.0])

    def f(k0, kv):
        return np.exp(-0.5 * ((np.asarray(k0) - 1.1) / 1.2) ** 2) * np.exp(
            -0.5 * np.sum((kv - c) ** 2, axis=-1) / 0.36
        )

    val = smear_mass_shell(0.8, "+", f, 8.0, epsrel=1e-9)
    assert val == pytest.approx(SMEAR_OFFCENTER, rel=1e-10)


def test_smear_backward_mirrors_forward():
    # f depending on k0 only through k0^2 pairs identically with both shells
    def f(k0, kv):
        return np.exp(-np.asarray(k0) ** 2) * np.exp(-np.sum(kv * kv, axis=-1))

    fwd = smear_mass_shell(1.3, "+", f, 8.0)
    bwd = smear_mass_shell(1.3, "-", f, 8.0)
    assert fwd == pytest.approx(bwd, rel=1e-12)


def test_smear_linearity():
    def f1(k0, kv):
        return np.exp(-np.sum(kv * kv, axis=-1))

    def f2(k0, kv):
        return np.exp(-2.0 * np.sum(kv * kv, axis=-1)) * np.asarray(k0)

    def combo(k0, kv):
        return 2.0 * f1(k0, kv) + 3.0j * f2(k0, kv)

    a = smear_mass_shell(1.0, "+", f1, 8.0, epsrel=1e-9)
    b = smear_mass_shell(1.0, "+", f2, 8.0, epsrel=1e-9)
    c = smear_mass_shell(1.0, "+", combo, 8.0, epsrel=1e-9)
    assert c == pytest.approx(2.0 * a + 3.0j * b, rel=1e-8)


def test_shell_energy():
    assert shell_energy(3.0, 4.0) == 5.0
    assert shell_energy(np.array([0.0, 3.0]), 4.0) == pytest.approx([4.0, 5.0])


def test_pv_even_function_vanishes():
    val = principal_value(smooth_line(lambda k: np.exp(-np.asarray(k) ** 2)))
    assert abs(val) < 1e-10


def test_pv_odd_over_kappa_is_gaussian_integral():
    val = principal_value(
        smooth_line(lambda k: np.asarray(k) * np.exp(-np.asarray(k) ** 2))
    )
    assert val == pytest.approx(np.sqrt(np.pi), rel=1e-10)


def test_pv_shifted_gaussian_reference():
    # The eps-ladder reference carries an O(eps^3) residual of its own, so
    # the band here is wider than the engine's internal agreement (1.3e-6).
    val = principal_value(smooth_line(lambda k: np.exp(-((np.asarray(k) - 0.5) ** 2))))
    assert val == pytest.approx(PV_SHIFTED_GAUSS, rel=5e-6)


def test_pv_rejects_c0():
    rough = LineFunction(
        eval=lambda k: np.abs(np.asarray(k)), support_radius=np.inf, smoothness_class=C0
    )
    with pytest.raises(SmoothnessViolationError):
        principal_value(rough)


def test_bv_centered_gaussian_is_minus_i_pi():
    val = boundary_value_pairing(
        smooth_line(lambda k: np.exp(-np.asarray(k) ** 2)), "+i0"
    )
    assert val == pytest.approx(-1j * np.pi, abs=1e-6)


def test_bv_sides_agree_when_f_vanishes_at_zero():
    line = smooth_line(lambda k: np.asarray(k) * np.exp(-np.asarray(k) ** 2))
    plus = boundary_value_pairing(line, "+i0")
    minus = boundary_value_pairing(line, "-i0")
    assert plus == pytest.approx(minus, abs=1e-10)


def test_bv_jump_is_minus_2_pi_i_f0():
    rng = np.random.default_rng(17)
    for _ in range(5):
        a = float(rng.uniform(0.5, 2.0))
        c = float(rng.uniform(-1.0, 1.0))

        def fn(k, a=a, c=c):
            return np.exp(-a * (np.asarray(k) - c) ** 2)

        line = smooth_line(fn)
        jump = boundary_value_pairing(line, "+i0") - boundary_value_pairing(line, "-i0")
        assert jump == pytest.approx(-2j * np.pi * fn(0.0), abs=1e-8)


def test_spectral_atom_collapses_to_single_smear():
    rho = SpectralMeasure(atoms=((1.0, 1.0),))

    def f(k0, kv):
        return np.exp(-np.sum(kv * kv, axis=-1)) * np.exp(-0.1 * np.asarray(k0) ** 2)

    paired = spectral_pairing(rho, f, 8.0, epsrel=1e-8)
    direct = smear_mass_shell(1.0, "+", f, 8.0, epsrel=1e-9)
    assert paired == pytest.approx(direct, rel=1e-8)


def test_spectral_zero_weights():
    rho = SpectralMeasure(atoms=((1.0, 0.0), (2.0, 0.0)))
    assert spectral_pairing(rho, lambda k0, kv: np.ones(kv.shape[0]), 3.0) == 0.0


def test_spectral_uniform_density_reference():
    rho = SpectralMeasure(density=(DensityPiece((0.8, 1.2), (1.0,)),))

    def f(k0, kv):
        return np.exp(-0.5 * (np.asarray(k0) - 1.2) ** 2) * np.exp(
            -np.sum(kv * kv, axis=-1)
        )

    val = spectral_pairing(rho, f, 8.0, epsrel=1e-8)
    assert val == pytest.approx(SPECTRAL_UNIFORM, rel=1e-10)


def test_spectral_positivity_on_packet_squares():
    # positive measure against |h|^2: nonnegative real, negligible imaginary
    rng = np.random.default_rng(23)
    rho = SpectralMeasure(
        atoms=((0.9, 0.4),), density=(DensityPiece((1.0, 1.5), (0.5, 0.1)),)
    )
    for _ in range(3):
        c = rng.uniform(-0.5, 0.5, size=3)
        w = float(rng.uniform(0.4, 1.0))

        def fsq(k0, kv, c=c, w=w):
            g = np.exp(-0.5 * np.sum((kv - c) ** 2, axis=-1) / (w * w))
            t = np.exp(-0.5 * (np.asarray(k0) - 1.0) ** 2)
            return np.abs(t * g) ** 2

        val = spectral_pairing(rho, fsq, 8.0)
        assert val.real >= 0.0
        assert abs(val.imag) <= 1e-10 * max(val.real, 1e-300)


def test_spectral_measure_rejects_negative_weight_unsigned():
    with pytest.raises(ValueError):
        SpectralMeasure(atoms=((1.0, -0.5),))


def test_spectral_measure_rejects_negative_density_unsigned():
    with pytest.raises(ValueError):
        SpectralMeasure(density=(DensityPiece((0.0, 1.0), (-1.0,)),))


def test_spectral_measure_signed_mode_permits_negatives():
    rho = SpectralMeasure(
        atoms=((1.0, -0.5),), density=(DensityPiece((0.0, 1.0), (-1.0,)),), signed=True
    )
    assert rho.signed


def test_spectral_measure_rejects_negative_position():
    with pytest.raises(ValueError):
        SpectralMeasure(atoms=((-1.0, 0.5),), signed=True)


def test_spectral_measure_dict_round_trip():
    rho = SpectralMeasure(
        atoms=((1.0, 0.25), (4.0, 0.5)),
        density=(DensityPiece((0.5, 2.0), (0.1, 0.02)),),
    )
    assert SpectralMeasure.from_dict(rho.to_dict()) == rho


def test_spectral_measure_yaml_round_trip():
    rho = SpectralMeasure(density=(DensityPiece((10.24, 23.04), (0.078125,)),))
    assert SpectralMeasure.from_yaml(rho.to_yaml()) == rho


def test_density_piece_polynomial_value():
    piece = DensityPiece((0.0, 4.0), (1.0, 2.0, 3.0))
    assert piece.value(2.0) == pytest.approx(1.0 + 4.0 + 12.0)


def test_density_piece_rejects_bad_interval():
    with pytest.raises(ValueError):
        DensityPiece((-1.0, 1.0), (1.0,))
    with pytest.raises(ValueError):
        DensityPiece((2.0, 1.0), (1.0,))


def test_line_function_vanishes_beyond_support():
    from shellcalc import make_bump

    bump = make_bump()
    probes = np.array([2.0001, 2.5, -3.0, 17.0])
    assert np.all(bump.eval(probes) == 0.0)
