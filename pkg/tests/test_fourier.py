"""Transform plans, transforms, and Plancherel."""

import random

import numpy as np
import pytest

from ultrawave import (
    SIDE_FREQ,
    SIDE_TIME,
    StepFunction,
    ZERO,
    ball,
    element,
    enumerate_window,
    evaluate,
    indicator,
    indicator_transform,
    inner_product,
    inverse_transform,
    norm_sq,
    pairing,
    stepfn_max_diff,
    transform,
    transform_plan,
)

from conftest import BASIC_CONFIGS, make_group


def random_stepfn(g, rng, m=1, r=1):
    values = {}
    for c in enumerate_window(g, -m * g.r0, (m + r) * g.r0):
        values[c] = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
    return StepFunction(g, SIDE_TIME, m, r, values)


@pytest.mark.parametrize("cfg", BASIC_CONFIGS)
def test_plan_matrix_unitary(cfg):
    g = make_group(*cfg)
    K = 2 * g.r0
    plan = transform_plan(g, K, -1)
    dim = g.residue_size ** K
    prod = plan.matrix @ plan.matrix.conj().T
    assert np.allclose(prod, dim * np.eye(dim), atol=1e-9)
    # matrix entries are the exact pairings
    pts = list(enumerate_window(g, -g.r0, K))
    for _ in range(12):
        i = random.randrange(dim)
        j = random.randrange(dim)
        want = pairing(g, pts[i], pts[j]).conjugate()
        assert abs(plan.matrix[i, j] - want) < 1e-12


@pytest.mark.parametrize("cfg", BASIC_CONFIGS)
def test_round_trip_and_plancherel(cfg):
    g = make_group(*cfg)
    rng = random.Random(11)
    for _ in range(12):
        f = random_stepfn(g, rng)
        F = transform(f)
        assert F.side == SIDE_FREQ
        assert (F.m, F.r) == (f.r, f.m)
        back = inverse_transform(F)
        assert stepfn_max_diff(back, f) < 1e-12
        h = random_stepfn(g, rng)
        assert inner_product(f, h) == pytest.approx(
            inner_product(F, transform(h)), abs=1e-12)
        assert norm_sq(F) == pytest.approx(norm_sq(f), abs=1e-12)


@pytest.mark.parametrize("cfg", BASIC_CONFIGS)
def test_dft_equals_cellwise(cfg):
    g = make_group(*cfg)
    rng = random.Random(2)
    f = random_stepfn(g, rng)
    a = transform(f, method="dft")
    b = transform(f, method="cellwise")
    assert stepfn_max_diff(a, b) < 1e-12


def test_transform_requires_time_side():
    g = make_group("qp", 2, 1, None)
    f = indicator(ball(g, SIDE_TIME, ZERO, 0))
    F = transform(f)
    with pytest.raises(ValueError):
        transform(F)
    with pytest.raises(ValueError):
        inverse_transform(f)


@pytest.mark.parametrize("cfg", BASIC_CONFIGS)
def test_unit_ball_transforms_to_unit_ball(cfg):
    # the subgroup indicator is its own transform (self-dual normalization)
    g = make_group(*cfg)
    F = transform(indicator(ball(g, SIDE_TIME, ZERO, 0)))
    want = indicator(ball(g, SIDE_FREQ, ZERO, 0))
    assert stepfn_max_diff(F, want) < 1e-14


@pytest.mark.parametrize("cfg", BASIC_CONFIGS)
def test_indicator_transform_closed_form(cfg):
    g = make_group(*cfg)
    one = (1, 0) if g.kind == "qpquad" else 1
    for b in [ball(g, SIDE_FREQ, element(g, {-g.r0: one}), 0),
              ball(g, SIDE_FREQ, element(g, {0: one}), 1),
              ball(g, SIDE_FREQ, element(g, {-g.r0: one, 0: one}), 1)]:
        closed = indicator_transform(b)
        generic = inverse_transform(indicator(b))
        assert stepfn_max_diff(closed, generic) < 1e-12
    # and on the time side
    tb = ball(g, SIDE_TIME, element(g, {-g.r0: one}), 0)
    assert stepfn_max_diff(indicator_transform(tb),
                           transform(indicator(tb))) < 1e-12


def test_lang_wavelet_values_exact():
    # binary Laurent field: the generator is +1 on one half, -1 on the other
    g = make_group("fpt", 2, 1, None)
    psi = inverse_transform(indicator(ball(g, SIDE_FREQ, element(g, {-1: 1}), 0)))
    assert psi.values[ZERO] == 1
    assert psi.values[element(g, {0: 1})] == -1
    assert len(psi.values) == 2


def test_scale_two_window():
    # r0 = 2 packs two digits per level and stays self-dual
    g = make_group("qp", 3, 2, None)
    f = indicator(ball(g, SIDE_TIME, element(g, {-1: 2}), 0))
    F = transform(f)
    back = inverse_transform(F)
    assert stepfn_max_diff(back, f) < 1e-13
    assert norm_sq(F) == pytest.approx(norm_sq(f))
