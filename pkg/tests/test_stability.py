"""Regulator ladder, spectral norms, verdicts, and the in/out dichotomy."""

import numpy as np
import pytest
from scipy.integrate import quad

from shellcalc import (
    InsufficientNError,
    Mass,
    OnShellVanishingError,
    SpatialEnvelope,
    SpectralMeasure,
    StabilityReport,
    StabilityRow,
    WavePacket,
    constant_line,
    gaussian_line,
    in_out_difference,
    kl_norm,
    make_bump,
    make_regulator,
    onshell_nonzero_current,
    onshell_vanishing_current,
    regulated_pairing,
    run_stability,
)
from shellcalc.stability import YangFeldmanDecomposition, current_profile

# references computed by tests/oracles.py, frozen by tests/freeze_oracles.py
PROFILE_AT_ZERO_M1 = 1.6470840284899126  # fixed-grid radial Simpson, 20001 pts
KLNORM_DEMO_N4 = 57.23770075911833  # nested adaptive quad with kink splitting
KLNORM_DEMO_N16 = 13.25567598635287
INOUT_M1_WIDTH08 = 8.685276983045052j  # high-precision shell quadrature
JUMP_NARROW_PACKET = 0.6540601715149038j  # boundary-value jump, width-0.25 packet

# engine regression pins (same environment, tests/freeze_oracles.py log)
DEMO_KL_LADDER = (
    57.23770074020975,
    13.255675981890942,
    3.298279326190726,
    0.8243262363264967,
)
DEMO_BOUND_INTEGRAL = 2549.191202761339


def _mass1_current_and_envelope(width):
    current = onshell_nonzero_current(Mass(1.0))
    envelope = SpatialEnvelope(np.zeros(3), width, 1.0)
    return current, envelope


# ---------------------------------------------------------------------------
# current profiles


def test_profile_on_shell_value_matches_reference():
    current, envelope = _mass1_current_and_envelope(0.9)
    prof = current_profile(current, envelope, Mass(1.0))
    assert prof.on_shell_value == pytest.approx(PROFILE_AT_ZERO_M1, rel=1e-9)
    assert abs(complex(prof.on_shell_value).imag) < 1e-12


def test_profile_certificates_are_consistent():
    current, envelope = _mass1_current_and_envelope(0.9)
    prof = current_profile(current, envelope, Mass(1.0))
    # the certified strip is capped by the current's C1 strip (m/2 here)
    assert 0.0 < prof.certified_radius <= current.c1_radius
    half = 0.5 * abs(prof.on_shell_value)
    kappas = np.linspace(-0.99 * prof.certified_radius, 0.99 * prof.certified_radius, 41)
    assert np.all(np.abs(prof.line.eval(kappas)) >= half * (1.0 - 1e-9))
    # sup 1/|profile| is bounded by the half-value certificate
    assert prof.sup_inverse >= 1.0 / abs(prof.on_shell_value) - 1e-12
    assert prof.sup_inverse <= 2.0 / abs(prof.on_shell_value) + 1e-9


def test_profile_raises_when_current_vanishes_on_shell():
    current, envelope = _mass1_current_and_envelope(0.9)
    with pytest.raises(OnShellVanishingError) as excinfo:
        current_profile(onshell_vanishing_current(Mass(1.0)), envelope, Mass(1.0))
    assert excinfo.value.scale > 0.0
    assert abs(excinfo.value.value) < 1e-10 * excinfo.value.scale


# ---------------------------------------------------------------------------
# regulated pairings


def test_demo_pairing_is_three_and_n_invariant(demo_report):
    rows = demo_report.value.rows
    assert [row.n for row in rows] == [4, 16, 64, 256]
    values = [row.pairing_value for row in rows]
    for value in values:
        assert value.real == pytest.approx(3.0, abs=1e-9)
        assert abs(value.imag) <= 1e-6 * value.real
    spread = max(abs(a - b) for a in values for b in values)
    assert spread <= 1e-6 * abs(values[0])


def test_pairing_invariant_under_profile_rescaling():
    # doubling the envelope amplitude doubles the profile; the regulator
    # divides it back out, so the pairing must not move
    current = onshell_nonzero_current(Mass(4.0))
    base = current_profile(current, SpatialEnvelope(np.zeros(3), 0.1, 1.0), Mass(4.0))
    scaled = current_profile(current, SpatialEnvelope(np.zeros(3), 0.1, 2.0), Mass(4.0))
    assert scaled.on_shell_value == pytest.approx(2.0 * base.on_shell_value, rel=1e-9)
    p_base = regulated_pairing(base, 16)
    p_scaled = regulated_pairing(scaled, 16)
    assert p_scaled == pytest.approx(p_base, rel=1e-8)


def test_regulator_needs_enough_n_for_the_certified_strip():
    current, envelope = _mass1_current_and_envelope(0.9)
    prof = current_profile(current, envelope, Mass(1.0))
    # support of the scaled bump is 2/n; n = 3 overflows the certified strip
    with pytest.raises(InsufficientNError):
        make_regulator(make_bump(), 3, prof.line, prof.certified_radius)
    with pytest.raises(InsufficientNError):
        regulated_pairing(prof, 3)


# ---------------------------------------------------------------------------
# spectral ladder norms


def test_demo_kl_norms_match_quadrature_references(demo_report):
    rows = {row.n: row.kl_norm for row in demo_report.value.rows}
    assert rows[4] == pytest.approx(KLNORM_DEMO_N4, rel=2e-8)
    assert rows[16] == pytest.approx(KLNORM_DEMO_N16, rel=2e-8)


def test_demo_kl_ladder_regression(demo_report):
    norms = [row.kl_norm for row in demo_report.value.rows]
    for got, ref in zip(norms, DEMO_KL_LADDER):
        assert got == pytest.approx(ref, rel=1e-9)
    assert demo_report.value.rows[0].bound_integral == pytest.approx(
        DEMO_BOUND_INTEGRAL, rel=1e-9
    )


def test_demo_ladder_decreases_and_collapses(demo_report):
    norms = [row.kl_norm for row in demo_report.value.rows]
    assert all(b < a for a, b in zip(norms, norms[1:]))
    assert norms[-1] < 0.05 * norms[0]
    for row in demo_report.value.rows:
        assert row.kl_norm <= row.bound_integral + 1e-8


def test_kl_norm_of_pure_atom_at_mass_squared_vanishes():
    current = onshell_nonzero_current(Mass(4.0))
    envelope = SpatialEnvelope(np.zeros(3), 0.1, 1.0)
    prof = current_profile(current, envelope, Mass(4.0))
    atom = SpectralMeasure.from_dict(
        {"atoms": [[16.0, 1.0]], "density": [], "signed": False}
    )
    # the regulator vanishes at kappa = 0, which is where the atom sits
    assert kl_norm(prof, 4, envelope, Mass(4.0), atom) == pytest.approx(0.0, abs=1e-12)


def test_kl_norm_rejects_signed_measure():
    current = onshell_nonzero_current(Mass(4.0))
    envelope = SpatialEnvelope(np.zeros(3), 0.1, 1.0)
    prof = current_profile(current, envelope, Mass(4.0))
    signed = SpectralMeasure.from_dict(
        {
            "atoms": [],
            "density": [{"interval": [10.24, 23.04], "coeffs": [1.0 / 12.8]}],
            "signed": True,
        }
    )
    with pytest.raises(ValueError):
        kl_norm(prof, 4, envelope, Mass(4.0), signed)


# ---------------------------------------------------------------------------
# verdicts


def test_demo_report_demonstrates_contradiction(demo_report):
    report = demo_report.value
    assert report.verdict == "CONTRADICTION_DEMONSTRATED"
    assert "falls" in report.reason


def test_vanishing_current_is_consistent(rho_demo):
    report = run_stability(
        onshell_vanishing_current(Mass(4.0)),
        SpatialEnvelope(np.zeros(3), 0.1, 1.0),
        Mass(4.0),
        rho_demo,
    )
    assert report.verdict == "CONSISTENT"
    assert report.rows == ()
    assert "vanishes" in report.reason


def test_signed_measure_is_consistent():
    signed = SpectralMeasure.from_dict(
        {
            "atoms": [],
            "density": [
                {"interval": [10.24, 23.04], "coeffs": [1.0 / 12.8]},
                {"interval": [23.04, 25.0], "coeffs": [-0.01]},
            ],
            "signed": True,
        }
    )
    report = run_stability(
        onshell_nonzero_current(Mass(4.0)),
        SpatialEnvelope(np.zeros(3), 0.1, 1.0),
        Mass(4.0),
        signed,
        n_ladder=(4, 16),
    )
    assert report.verdict == "CONSISTENT"
    assert "signed" in report.reason
    assert len(report.rows) == 2


def test_run_stability_rejects_empty_ladder(rho_demo):
    with pytest.raises(ValueError):
        run_stability(
            onshell_nonzero_current(Mass(4.0)),
            SpatialEnvelope(np.zeros(3), 0.1, 1.0),
            Mass(4.0),
            rho_demo,
            n_ladder=(),
        )


def test_report_rows_must_increase_in_n():
    row = StabilityRow(
        n=4, pairing_value=3.0 + 0j, pairing_abs=3.0, kl_norm=1.0, bound_integral=2.0
    )
    row2 = StabilityRow(
        n=2, pairing_value=3.0 + 0j, pairing_abs=3.0, kl_norm=1.0, bound_integral=2.0
    )
    with pytest.raises(ValueError):
        StabilityReport(rows=(row, row2), verdict="CONSISTENT")


# ---------------------------------------------------------------------------
# in/out difference and the dichotomy


def test_in_out_difference_matches_reference():
    current, envelope = _mass1_current_and_envelope(0.8)
    packet = WavePacket(gaussian_line(1.0), envelope, Mass(1.0))
    cutoff = min(current.spatial_cutoff, envelope.cutoff_radius)
    diff = in_out_difference(current, packet, Mass(1.0), cutoff)
    assert diff == pytest.approx(INOUT_M1_WIDTH08, rel=1e-9)
    assert abs(diff.real) < 1e-12 * abs(diff)


def test_in_out_difference_vanishing_current_is_zero():
    current, envelope = _mass1_current_and_envelope(0.8)
    packet = WavePacket(gaussian_line(1.0), envelope, Mass(1.0))
    cutoff = min(current.spatial_cutoff, envelope.cutoff_radius)
    vanish = onshell_vanishing_current(Mass(1.0))
    assert abs(in_out_difference(vanish, packet, Mass(1.0), cutoff)) < 1e-12


def test_in_out_difference_constant_temporal_closed_form():
    # on the shell the product of demo current and unit-temporal packet is
    # exp(-|k|^2), so the difference reduces to a radial integral
    current = onshell_nonzero_current(Mass(1.0))
    packet = WavePacket(constant_line(1.0), SpatialEnvelope(np.zeros(3), 1.0, 1.0), Mass(1.0))
    cutoff = min(current.spatial_cutoff, packet.spatial_cutoff)
    diff = in_out_difference(current, packet, Mass(1.0), cutoff)
    radial, _ = quad(lambda r: r * r * np.exp(-r * r) / (2.0 * np.hypot(r, 1.0)), 0.0, cutoff)
    expected = 2.0 * np.pi * 4.0 * np.pi * radial
    assert abs(diff) == pytest.approx(expected, rel=1e-9)
    assert abs(diff) == pytest.approx(11.911628734009026, rel=1e-9)  # frozen engine pin


def test_in_out_difference_narrow_packet_closed_form():
    # same reduction for the width-0.25 packet used in the re-summation test
    current = onshell_nonzero_current(Mass(1.0))
    envelope = SpatialEnvelope(np.zeros(3), 0.25, 1.0)
    packet = WavePacket(gaussian_line(1.0), envelope, Mass(1.0))
    cutoff = min(current.spatial_cutoff, envelope.cutoff_radius)
    diff = in_out_difference(current, packet, Mass(1.0), cutoff)
    radial, _ = quad(
        lambda r: r * r * np.exp(-8.5 * r * r) / (2.0 * np.hypot(r, 1.0)), 0.0, cutoff
    )
    expected = 2.0 * np.pi * 4.0 * np.pi * radial
    assert abs(diff) == pytest.approx(expected, rel=1e-9)
    assert diff == pytest.approx(JUMP_NARROW_PACKET, rel=1e-9)


# ---------------------------------------------------------------------------
# Yang-Feldman re-summation


def test_yang_feldman_resummation_identity():
    # the truncation radius cancels between the two prescriptions, so a
    # short kappa range keeps the identity exact while saving quadrature time
    current = onshell_nonzero_current(Mass(1.0))
    envelope = SpatialEnvelope(np.zeros(3), 0.25, 1.0)
    packet = WavePacket(gaussian_line(1.0), envelope, Mass(1.0))
    split = YangFeldmanDecomposition(current, Mass(1.0))
    cutoff = min(current.spatial_cutoff, envelope.cutoff_radius)

    s_in = split.singular_pairing("in", packet, cutoff, kappa_cutoff=2.0)
    s_out = split.singular_pairing("out", packet, cutoff, kappa_cutoff=2.0)
    a_in = split.asymptotic_pairing("in", packet, cutoff)
    a_out = split.asymptotic_pairing("out", packet, cutoff)

    full_in = s_in + a_in
    full_out = s_out + a_out
    assert abs(full_in - full_out) <= 1e-10 * abs(full_in)

    # the boundary-value jump carried by the singular part is exactly the
    # mass-shell difference carried by the asymptotic part
    jump = s_in - s_out
    diff = in_out_difference(current, packet, Mass(1.0), cutoff)
    assert jump == pytest.approx(diff, rel=1e-10)
    assert jump == pytest.approx(JUMP_NARROW_PACKET, rel=1e-9)

    # for a real profile line the prescriptions are complex conjugates and
    # the retarded side carries the +i pi f(0) half of the jump
    assert s_out == pytest.approx(np.conjugate(s_in), rel=1e-12)
    assert s_in.imag > 0.0
    assert s_in.imag == pytest.approx(0.3270300857574519, rel=1e-9)  # frozen engine pin


def test_yang_feldman_rejects_backward_supported_current():
    current = onshell_nonzero_current(Mass(1.0))
    twosided = type(current)(
        eval=current.eval,
        c1_radius=current.c1_radius,
        spatial_cutoff=current.spatial_cutoff,
        backward_shell_zero=False,
    )
    split = YangFeldmanDecomposition(twosided, Mass(1.0))
    packet = WavePacket(gaussian_line(1.0), SpatialEnvelope(np.zeros(3), 0.5, 1.0), Mass(1.0))
    with pytest.raises(NotImplementedError):
        split.singular_pairing("in", packet, 5.0)
