"""Shared fixtures for the reference setup k = 0.01, c = 50, x(p) = 1/p.

The three trajectory fixtures are the workhorse simulations reused across
module and acceptance tests; they are session-scoped because each takes
hundreds of thousands of integrator steps.
"""

import pytest

from hopfdual import (
    ConstantHistory,
    ModelConfig,
    Reciprocal,
    find_equilibrium,
    hopf_expansion,
    linear_analysis,
    simulate,
    taylor_coefficients,
)

K = 0.01
C = 50.0


def reference_model(tau: float) -> ModelConfig:
    """The reference setup at a given delay."""
    return ModelConfig(k=K, c=C, tau=tau, demand=Reciprocal(w=1.0))


@pytest.fixture(scope="session")
def model():
    return reference_model(3.2)


@pytest.fixture(scope="session")
def eq(model):
    return find_equilibrium(model)


@pytest.fixture(scope="session")
def coeffs(model, eq):
    return taylor_coefficients(model, eq)


@pytest.fixture(scope="session")
def linear(coeffs):
    return linear_analysis(coeffs)


@pytest.fixture(scope="session")
def expansion(coeffs, linear):
    return hopf_expansion(coeffs, linear)


@pytest.fixture(scope="session")
def run_tau30():
    """Below onset: decays to equilibrium."""
    return simulate(reference_model(3.0), ConstantHistory(0.025), 2000.0, 0.01)


@pytest.fixture(scope="session")
def run_tau32():
    """Just above onset: settles onto the small limit cycle."""
    return simulate(reference_model(3.2), ConstantHistory(0.025), 5000.0, 0.01)


@pytest.fixture(scope="session")
def run_tau34():
    """Farther above onset: larger, slower cycle."""
    return simulate(reference_model(3.4), ConstantHistory(0.025), 5000.0, 0.01)
