"""Freeze addendum: asymmetric pv-mode 3pt literal and behavior probes.

Section M showed the pv-mode 3pt on exact decay kinematics is null by the
mirror symmetry of the fixture (engine estimate ~ -5e-9, oracle shifts
~1e-9), so it cannot serve as a nonzero literal. This addendum freezes a
deliberately asymmetric pv fixture instead, and probes the behaviors the
counterexample tests will assert (pole proximity, loose-abs_tol symmetry
null, generic-vs-fast 2pt adapter cost).
"""

import sys
import time

import numpy as np

sys.path.insert(0, "tests")
import oracles as orc  # noqa: E402

from shellcalc import (  # noqa: E402
    Mass,
    ModelParams,
    PoleProximityError,
    SpatialEnvelope,
    WavePacket,
    decay_packets,
    gaussian_line,
    truncated_2pt,
    truncated_3pt,
)

PARAMS = ModelParams(Mass(0.5), Mass(2.0))


def section(name):
    print(f"\n=== {name} ===", flush=True)
    return time.perf_counter()


def done(t0):
    print(f"    [{time.perf_counter() - t0:.2f}s]", flush=True)


def show(label, value, engine=None):
    print(f"{label} = {value!r}")
    if engine is not None:
        print(f"{label}__engine = {engine!r}")
        a, b = complex(value), complex(engine)
        diff = abs(a - b)
        rel = diff / max(abs(a), abs(b), 1e-300)
        print(f"{label}__diff = {diff:.3e}  rel = {rel:.3e}")


t0 = section("U asymmetric pv 3pt")
h1a = WavePacket(gaussian_line(1.2), SpatialEnvelope(np.array([0.1, 0.0, 0.0]), 0.12, 1.0), Mass(2.0))
h2a = WavePacket(gaussian_line(0.8), SpatialEnvelope(np.array([0.9, 0.0, 0.0]), 0.11, 0.9), Mass(0.5))
h3a = WavePacket(gaussian_line(1.0), SpatialEnvelope(np.array([-0.75, 0.05, 0.0]), 0.13, 1.1), Mass(0.5))
opk = (
    orc.OraclePacket((0.1, 0.0, 0.0), 0.12, 1.0, "gaussian", 1.2, 2.0),
    orc.OraclePacket((0.9, 0.0, 0.0), 0.11, 0.9, "gaussian", 0.8, 0.5),
    orc.OraclePacket((-0.75, 0.05, 0.0), 0.13, 1.1, "gaussian", 1.0, 0.5),
)
o14 = orc.threept_axiswise_gh((2, 1, 1), opk, 2.0, 0.5, 14, pole_mode="pv")
o18 = orc.threept_axiswise_gh((2, 1, 1), opk, 2.0, 0.5, 18, pole_mode="pv")
o18b = orc.threept_axiswise_gh(
    (2, 1, 1), opk, 2.0, 0.5, 18, pole_mode="pv", etas=(0.2, 0.1, 0.05)
)
print(f"asym_order_shift = {abs(o14 - o18):.3e}")
print(f"asym_ladder_shift = {abs(o18 - o18b):.3e}")
t_e = time.perf_counter()
e = truncated_3pt((2, 1, 1), (h1a, h2a, h3a), PARAMS, pole_mode="pv")
print(f"engine_seconds = {time.perf_counter() - t_e:.2f}")
show("threept_pv_asym", o18, e)
done(t0)

t0 = section("V decay-kinematics behavior probes")
h1, h2, h3 = decay_packets(PARAMS)
try:
    truncated_3pt((2, 1, 1), (h1, h2, h3), PARAMS)
    print("avoid_mode: NO ERROR (unexpected)")
except PoleProximityError as err:
    print(f"avoid_mode raises PoleProximityError: {err}")
t_e = time.perf_counter()
val = truncated_3pt((2, 1, 1), (h1, h2, h3), PARAMS, pole_mode="pv", abs_tol=1e-7)
print(f"pv_loose_absolute = {val!r}  [{time.perf_counter() - t_e:.2f}s]")
done(t0)

t0 = section("W generic-path 2pt adapter probe")


class OpaquePacket:
    """Same packet, hidden from the Gaussian fast-path type check."""

    def __init__(self, base):
        self.base = base
        self.spatial = base.spatial
        self.residual = base.residual
        self.spatial_cutoff = base.spatial_cutoff

    def __call__(self, k0, kvec):
        return self.base(k0, kvec)


pk1 = WavePacket(gaussian_line(4.0), SpatialEnvelope(np.array([0.3, 0.0, 0.0]), 0.8, 1.0), Mass(2.0))
pk2 = WavePacket(gaussian_line(4.0), SpatialEnvelope(np.array([-0.3, 0.0, 0.0]), 0.8, 1.0), Mass(2.0))
fast = truncated_2pt(2, 2, pk1, pk2, PARAMS)
t_e = time.perf_counter()
generic = truncated_2pt(2, 2, OpaquePacket(pk1), pk2, PARAMS)
print(f"generic_seconds = {time.perf_counter() - t_e:.2f}")
show("twopt_generic_vs_fast", fast, generic)
done(t0)
