"""Session-shared fixtures for the expensive end-to-end objects.

The demo stability report, the indefiniteness witness Gram matrix, and the
one-million-sample decay estimate are each computed once per session and
reused by both the per-module tests and the acceptance suite. Every fixture
also records its wall-clock cost so the acceptance tests can check the
stated time budgets without re-running the computation.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Any

import numpy as np
import pytest

from shellcalc import (
    Mass,
    ModelParams,
    SpatialEnvelope,
    SpectralMeasure,
    decay_amplitude,
    decay_packets,
    gram_matrix,
    indefiniteness_witness,
    onshell_nonzero_current,
    run_stability,
    single_field_family,
)


@dataclass(frozen=True)
class Timed:
    value: Any
    seconds: float


def _timed(fn):
    t0 = time.perf_counter()
    value = fn()
    return Timed(value, time.perf_counter() - t0)


@pytest.fixture(scope="session")
def params() -> ModelParams:
    return ModelParams(Mass(0.5), Mass(2.0))


@pytest.fixture(scope="session")
def rho_demo() -> SpectralMeasure:
    return SpectralMeasure.from_dict(
        {
            "atoms": [],
            "density": [{"interval": [10.24, 23.04], "coeffs": [1.0 / 12.8]}],
            "signed": False,
        }
    )


@pytest.fixture(scope="session")
def demo_report(rho_demo) -> Timed:
    current = onshell_nonzero_current(Mass(4.0))
    envelope = SpatialEnvelope(np.zeros(3), 0.1, 1.0)
    return _timed(lambda: run_stability(current, envelope, Mass(4.0), rho_demo))


@pytest.fixture(scope="session")
def witness_gram(params) -> Timed:
    family = indefiniteness_witness(params)
    return _timed(lambda: gram_matrix(family, params))


@pytest.fixture(scope="session")
def single_field_grams(params) -> Timed:
    def build():
        return {
            idx: gram_matrix(single_field_family(params, idx), params)
            for idx in (1, 2)
        }

    return _timed(build)


@pytest.fixture(scope="session")
def decay_run(params) -> Timed:
    h1, h2, h3 = decay_packets(params)
    return _timed(lambda: decay_amplitude(h1, h2, h3, params, 1_000_000, 11))
