"""Shared fixtures; the expensive closures are built once per session."""

from __future__ import annotations

import pytest

from ctxcert.analyze import zero_one_states
from ctxcert.catalog import (
    ceg_prime_system,
    ceg_system,
    kcbs_state,
    kcbs_system,
    lifted_ceg_system,
    twelve_generator_system,
)


@pytest.fixture(scope="session")
def q_ceg():
    return ceg_system()


@pytest.fixture(scope="session")
def q_ceg_prime():
    return ceg_prime_system()


@pytest.fixture(scope="session")
def q_twelve():
    return twelve_generator_system()


@pytest.fixture(scope="session")
def q_lift():
    return lifted_ceg_system()


@pytest.fixture(scope="session")
def q_kcbs():
    return kcbs_system()


@pytest.fixture(scope="session")
def kcbs_s01(q_kcbs):
    return zero_one_states(q_kcbs)


@pytest.fixture(scope="session")
def kcbs_quantum_state(q_kcbs):
    return q_kcbs.state_from_density(kcbs_state())
