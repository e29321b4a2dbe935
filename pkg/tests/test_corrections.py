import warnings

import pytest

from gcasimir.corrections import (GradientBand, RoughnessParams, UncertaintyBudget, build_band,
                                  roughness_correct)
from gcasimir.graphene import GrapheneSheet
from gcasimir.lifshitz import ConvergenceError, SummationPolicy, SystemGeometry, gradient_finite_T
from gcasimir.reflection import BoundarySpec

R = 60350.0
REAL = GrapheneSheet(0.29, 0.24)


def test_roughness_factor_values():
    rough = RoughnessParams()
    assert rough.factor(250.0) == pytest.approx(1 + 10 * (0.81 + 2.25) / 62500, rel=1e-15)
    assert rough.factor(250.0) == pytest.approx(1.00049, abs=1e-6)
    assert rough.factor(700.0) == pytest.approx(1.0000625, rel=1e-3)
    assert RoughnessParams(0.0, 0.0).factor(100.0) == 1.0
    assert roughness_correct(2.0, RoughnessParams(0.0, 0.0), 300.0) == 2.0
    assert RoughnessParams(0.1, 0.0).factor(500.0) > 1.0


def test_roughness_validation():
    with pytest.raises(ValueError):
        RoughnessParams(-1.0, 0.0)
    with pytest.raises(ValueError):
        RoughnessParams().factor(0.0)
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        RoughnessParams(1.0, 1.0).factor(10.0)
    assert w


def test_zero_budget_gives_degenerate_band(sio2, au):
    g = SystemGeometry(R, 300.0)
    band = build_band(g, REAL, UncertaintyBudget.zero(), 294.0)
    raw = gradient_finite_T(g, BoundarySpec.coated(sio2, REAL), au, 294.0).value
    assert band.lower == band.upper == band.center
    assert band.center == pytest.approx(raw * RoughnessParams().factor(300.0), rel=1e-15)


def test_pfa_factor_on_lower_bound():
    g = SystemGeometry(R, 500.0)
    with_pfa = build_band(g, REAL, UncertaintyBudget(0.0, 0.0, 0.0, 0.0, True), 294.0)
    assert with_pfa.lower / with_pfa.upper == pytest.approx(0.99171, abs=1e-5)
    assert [s[0] for s in with_pfa.provenance][-1] == "proximity force approximation"


def test_widening_steps():
    g = SystemGeometry(R, 400.0)
    b = build_band(g, REAL, UncertaintyBudget(0.0, 0.0, 60.35, 0.005, False), 294.0)
    assert b.upper / b.center == pytest.approx(1.001 * 1.005, rel=1e-14)
    assert b.lower / b.center == pytest.approx(0.999 * 0.995, rel=1e-14)


@pytest.mark.parametrize("a", [250.0, 330.0, 410.0, 490.0, 570.0, 650.0, 700.0, 150.0, 200.0, 800.0])
def test_monotone_in_sheet_parameters(sio2, au, a):
    g = SystemGeometry(R, a)

    def f(gap, mu):
        return gradient_finite_T(g, BoundarySpec.coated(sio2, GrapheneSheet(gap, mu)), au, 294.0).value

    base = f(0.29, 0.24)
    assert f(0.29, 0.25) >= base
    assert f(0.34, 0.24) <= base


@pytest.mark.parametrize("T", [294.0, 0.0])
def test_band_contains_center(T):
    for a in (250.0, 500.0):
        b = build_band(SystemGeometry(R, a), REAL, UncertaintyBudget(), T)
        assert b.contains(b.center) and b.lower < b.upper
        assert b.center_T == T


def test_freestanding_band():
    b = build_band(SystemGeometry(R, 300.0), REAL, UncertaintyBudget(), 294.0, freestanding=True)
    coated = build_band(SystemGeometry(R, 300.0), REAL, UncertaintyBudget(), 294.0)
    assert b.contains(b.center) and b.center < coated.center


@pytest.mark.xfail(strict=True, reason="with this zero-temperature tensor the gap changes "
                   "F'(a, 0) more than F'(a, 294 K), so the T = 0 band is the wider one")
def test_zero_temperature_band_narrower():
    g = SystemGeometry(R, 250.0)
    warm = build_band(g, REAL, UncertaintyBudget(), 294.0)
    cold = build_band(g, REAL, UncertaintyBudget(), 0.0)
    assert cold.half_width / cold.center < warm.half_width / warm.center


def test_band_validation():
    with pytest.raises(ValueError):
        GradientBand(2.0, 1.0, 294.0)
    with pytest.raises(ValueError):
        UncertaintyBudget(gap_err=-0.1)


def test_unconverged_sum_raises():
    with pytest.raises(ConvergenceError):
        build_band(SystemGeometry(R, 300.0), REAL, UncertaintyBudget(), 294.0,
                   SummationPolicy(l_max_cap=3))
