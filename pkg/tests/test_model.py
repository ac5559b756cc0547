"""Equilibrium solving, canonical coefficients, and the numeric oracle."""

import dataclasses
import math

import pytest

from conftest import C, K, reference_model
from hopfdual import (
    ModelConfig,
    NoBracket,
    NumericWrapper,
    PowerLaw,
    Reciprocal,
    ValidationError,
    find_equilibrium,
    numeric_taylor_oracle,
    rhs,
    taylor_coefficients,
)


def test_model_config_validation():
    demand = Reciprocal(w=1.0)
    with pytest.raises(ValidationError):
        ModelConfig(k=0.0, c=C, tau=1.0, demand=demand)
    with pytest.raises(ValidationError):
        ModelConfig(k=K, c=-1.0, tau=1.0, demand=demand)
    with pytest.raises(ValidationError):
        ModelConfig(k=K, c=C, tau=-0.1, demand=demand)
    assert ModelConfig(k=K, c=C, tau=0.0, demand=demand).tau == 0.0


def test_equilibrium_reference(eq):
    assert eq.p_star == pytest.approx(0.02, abs=1e-12)
    assert abs(eq.residual) <= 1e-12 * C


def test_equilibrium_unit_capacity():
    m = ModelConfig(k=0.03, c=1.0, tau=1.0, demand=Reciprocal(w=1.0))
    assert find_equilibrium(m).p_star == pytest.approx(1.0, rel=1e-12)


def test_equilibrium_powerlaw():
    m = ModelConfig(k=K, c=C, tau=1.0, demand=PowerLaw(w=1.0, alpha=2.0))
    assert find_equilibrium(m).p_star == pytest.approx(4.0e-4, rel=1e-12)


def test_equilibrium_independent_of_gain_and_delay():
    base = find_equilibrium(reference_model(3.2))
    other = find_equilibrium(
        ModelConfig(k=5.0, c=C, tau=0.0, demand=Reciprocal(w=1.0))
    )
    assert other.p_star == pytest.approx(base.p_star, rel=1e-14)


def test_no_bracket_when_capacity_unreachable():
    bounded = NumericWrapper(
        func=lambda p: 2.0 / (1.0 + p), domain_lo=0.0, label="bounded"
    )
    m = ModelConfig(k=K, c=C, tau=1.0, demand=bounded)
    with pytest.raises(NoBracket):
        find_equilibrium(m)


def test_rhs_hand_values(model):
    assert rhs(model, 0.02, 0.02) == pytest.approx(0.0, abs=1e-15)
    assert rhs(model, 0.02, 0.01) == pytest.approx(0.01, rel=1e-12)
    assert rhs(model, 0.04, 0.04) == pytest.approx(-0.01, rel=1e-12)


def test_reference_coefficients(coeffs):
    assert coeffs.p_star == pytest.approx(0.02, abs=1e-12)
    assert coeffs.b2 == pytest.approx(-0.5, rel=1e-12)
    assert coeffs.b4 == pytest.approx(-12.5, rel=1e-12)
    assert coeffs.b5 == pytest.approx(25.0, rel=1e-12)
    assert coeffs.b8 == pytest.approx(1250.0 / 3.0, rel=1e-12)
    assert coeffs.b9 == pytest.approx(-1250.0, rel=1e-12)
    assert (coeffs.b1, coeffs.b3, coeffs.b6, coeffs.b7) == (0.0, 0.0, 0.0, 0.0)


def test_coefficients_double_with_gain():
    for demand in (Reciprocal(w=1.0), PowerLaw(w=1.0, alpha=2.0)):
        m1 = ModelConfig(k=K, c=C, tau=1.0, demand=demand)
        m2 = dataclasses.replace(m1, k=2.0 * K)
        eq1, eq2 = find_equilibrium(m1), find_equilibrium(m2)
        assert eq2.p_star == pytest.approx(eq1.p_star, rel=1e-12)
        c1 = taylor_coefficients(m1, eq1).as_dict()
        c2 = taylor_coefficients(m2, eq2).as_dict()
        for name, value in c1.items():
            assert c2[name] == pytest.approx(2.0 * value, rel=1e-12), name


def test_oracle_across_families():
    families = (
        Reciprocal(w=1.0),
        PowerLaw(w=1.0, alpha=2.0),
        NumericWrapper(func=lambda p: 1.0 / p, domain_lo=0.0, label="wrapped"),
    )
    for demand in families:
        m = ModelConfig(k=K, c=C, tau=1.0, demand=demand)
        e = find_equilibrium(m)
        closed = taylor_coefficients(m, e)
        oracle = numeric_taylor_oracle(m, e)
        assert oracle.b2 == pytest.approx(closed.b2, rel=1e-6), demand.name
        assert oracle.b5 == pytest.approx(closed.b5, rel=1e-5), demand.name
        assert oracle.b9 == pytest.approx(closed.b9, rel=1e-5), demand.name
        # the direct monomial coefficients carry the full multinomial
        # weight, so the uv and uv^2 entries are 2x and 3x the canonical b4, b8
        assert oracle.b4 == pytest.approx(2.0 * closed.b4, rel=1e-3), demand.name
        assert oracle.b8 == pytest.approx(3.0 * closed.b8, rel=1e-3), demand.name
        scale = max(abs(closed.b2), abs(closed.b4), abs(closed.b5),
                    abs(closed.b8), abs(closed.b9), 1.0)
        for name in ("b1", "b3", "b6", "b7"):
            assert abs(getattr(oracle, name)) <= 1e-8 * scale, (demand.name, name)


def test_oracle_preserves_p_star(model, eq):
    oracle = numeric_taylor_oracle(model, eq)
    assert oracle.p_star == eq.p_star


def test_equilibrium_residual_definition(model, eq):
    assert eq.residual == pytest.approx(
        abs(model.demand.x(eq.p_star) - model.c), abs=1e-15
    )
    assert eq.residual >= 0.0
