import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gcasimir import _purecore
from gcasimir.constants import ALPHA, HBAR_C
from gcasimir.graphene import GrapheneSheet, PolarizationPair, SpectralContext, pt_exact, pt_order0
from gcasimir.materials import Oscillator, PermittivityModel
from gcasimir.reflection import (BoundarySpec, fresnel, graphene_dressed, reflection,
                                 te_zero_mode_magnitude)

V = 1.0 / 300.0
PRISTINE = GrapheneSheet.pristine()


def test_vacuum_is_transparent():
    ctx = SpectralContext.matsubara(3, 294.0, 0.01)
    assert fresnel(ctx, PermittivityModel.vacuum()) == (0.0, 0.0)


def test_static_dielectric():
    ctx = SpectralContext.at(0.0, 0.01)
    rtm, rte = fresnel(ctx, PermittivityModel.oscillator([Oscillator(3.0, 10.0, 0.0)]))
    assert rtm == pytest.approx(0.6, rel=1e-14) and rte == 0.0


def test_drude_metal_at_zero_frequency(au, au_plasma):
    ctx = SpectralContext.matsubara(0, 294.0, 0.002)
    rtm, rte = fresnel(ctx, au)
    assert 1.0 - rtm < 1e-6 and rte == 0.0
    rtm_p, rte_p = fresnel(ctx, au_plasma, zero_mode_te="plasma")
    kp = 9.0 / HBAR_C
    assert rte_p == pytest.approx(-((math.hypot(0.002, kp) - 0.002) / (math.hypot(0.002, kp) + 0.002)),
                                  rel=1e-12)


def test_transparent_sheet_reduces_to_fresnel(sio2):
    b = BoundarySpec.coated(sio2, GrapheneSheet(0.29, 0.24))
    for l, k in [(0, 0.003), (1, 0.002), (40, 0.1)]:
        ctx = SpectralContext.matsubara(l, 294.0, k)
        assert graphene_dressed(ctx, b, PolarizationPair(0.0, 0.0)) == pytest.approx(
            fresnel(ctx, sio2), rel=1e-15, abs=1e-300)


def test_pristine_static_tm_value():
    # sheet conductivity limit: pi alpha / (pi alpha + 2 v)
    ctx = SpectralContext.at(0.0, 0.002, vf_ratio=V)
    rtm, _ = graphene_dressed(ctx, BoundarySpec.freestanding(PRISTINE), pt_order0(ctx, PRISTINE))
    assert rtm == pytest.approx(math.pi * ALPHA / (math.pi * ALPHA + 2 * V), rel=1e-14)
    assert rtm == pytest.approx(0.7747, abs=1e-3)


def test_first_frequency_below_static_value():
    a, T = 300.0, 294.0
    b = BoundarySpec.freestanding(PRISTINE)
    c0 = SpectralContext.at(0.0, 1 / (2 * a), vf_ratio=V)
    c1 = SpectralContext.matsubara(1, T, 1 / (2 * a), V)
    r0, _ = graphene_dressed(c0, b, pt_order0(c0, PRISTINE))
    r1, _ = graphene_dressed(c1, b, pt_order0(c1, PRISTINE))
    # vacuum backing: R_TM = pi alpha q / (pi alpha q + 2 q~)
    assert r1 == pytest.approx(math.pi * ALPHA * c1.q / (math.pi * ALPHA * c1.q + 2 * c1.q_tilde), rel=1e-13)
    assert r1 < r0


def test_freestanding_identical_to_coated_vacuum():
    s = GrapheneSheet(0.29, 0.24)
    fs, cv = BoundarySpec.freestanding(s), BoundarySpec.coated(PermittivityModel.vacuum(), s)
    for l, k in [(0, 0.002), (1, 0.004), (17, 0.3)]:
        ctx = SpectralContext.matsubara(l, 294.0, k)
        assert reflection(ctx, fs) == reflection(ctx, cv)


@pytest.mark.parametrize("sheet", [GrapheneSheet(0.29, 0.24), PRISTINE], ids=["real", "pristine"])
def test_te_zero_mode_small(sio2, sheet):
    grid = np.geomspace(1e-4, 1e-1, 25)
    assert te_zero_mode_magnitude(BoundarySpec.coated(sio2, sheet), 294.0, grid) < 0.05
    assert te_zero_mode_magnitude(BoundarySpec.freestanding(sheet), 294.0, grid) < 0.05


def test_te_zero_mode_needs_sheet(sio2):
    with pytest.raises(ValueError):
        te_zero_mode_magnitude(BoundarySpec.bare(sio2), 294.0, [0.01])


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 500), st.floats(-5.0, 0.0), st.sampled_from(["au", "sio2", "free", "coated"]))
def test_coefficients_bounded(au, sio2, l, logk, which):
    k = 10 ** logk
    b = {"au": BoundarySpec.bare(au), "sio2": BoundarySpec.bare(sio2),
         "free": BoundarySpec.freestanding(GrapheneSheet(0.29, 0.24)),
         "coated": BoundarySpec.coated(sio2, GrapheneSheet(0.1, 0.3))}[which]
    ctx = SpectralContext.matsubara(l, 294.0, k)
    rtm, rte = reflection(ctx, b)
    assert abs(rtm) <= 1.0 and abs(rte) <= 1.0


def test_tm_monotone_in_tensor(sio2):
    b = BoundarySpec.coated(sio2, GrapheneSheet(0.29, 0.24))
    for l, k in [(0, 0.002), (1, 0.002), (5, 0.05)]:
        ctx = SpectralContext.matsubara(l, 294.0, k)
        pt = pt_exact(ctx, b.sheet)
        r = [graphene_dressed(ctx, b, pt.scaled(f))[0] for f in (0.5, 1.0, 2.0)]
        assert r[0] < r[1] < r[2]


def test_ideal_boundary():
    ctx = SpectralContext.matsubara(2, 294.0, 0.01)
    assert reflection(ctx, BoundarySpec.ideal()) == (1.0, 1.0)


def test_kernel_matches_python_formula(sio2):
    b = BoundarySpec.coated(sio2, GrapheneSheet(0.29, 0.24))
    for l, k in [(0, 0.002), (3, 0.01)]:
        ctx = SpectralContext.matsubara(l, 294.0, k)
        direct = graphene_dressed(ctx, b, pt_exact(ctx, b.sheet))
        assert reflection(ctx, b) == pytest.approx(direct, rel=1e-12)
        side = b.side(ctx.xi_energy)
        pure = _purecore.coefficients(side, ctx.kperp, ctx.q, ctx.zq, 294.0, 1e-9)
        assert pure[:2] == pytest.approx(direct, rel=1e-12)


def test_spec_validation(sio2):
    with pytest.raises(ValueError):
        BoundarySpec.coated(sio2, None)
    with pytest.raises(ValueError):
        BoundarySpec("freestanding", substrate=sio2, sheet=PRISTINE)
    with pytest.raises(ValueError):
        BoundarySpec("bare")
