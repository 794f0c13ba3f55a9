"""Dilation, coset translation, and basis indexing."""

import json
import random

import pytest

from ultrawave import (
    BasisIndex,
    SIDE_TIME,
    ZERO,
    add,
    apply_basis_index,
    ball,
    coset_add,
    coset_index,
    cosets_of_depth,
    dilate,
    element,
    evaluate,
    indicator,
    inner_product,
    linear_combine,
    multiplier_w,
    norm_sq,
    pairing,
    restrict,
    stepfn_max_diff,
    transform,
    translate,
    translate_direct_oracle,
)
from ultrawave.operators import basis_index_from_json, basis_index_to_json

from conftest import BASIC_CONFIGS, make_group


def test_coset_reps():
    g = make_group("qp", 2, 1, None)
    s = element(g, {-2: 1, 1: 1})
    ci = coset_index(g, s)
    assert ci.rep == element(g, {-2: 1})
    assert ci.depth == 2
    assert coset_add(g, element(g, {-1: 1}), element(g, {-1: 1})) == ZERO
    assert len(cosets_of_depth(g, 2)) == 4
    assert cosets_of_depth(g, 0) == [ZERO]


@pytest.mark.parametrize("cfg", BASIC_CONFIGS)
def test_dilate_unitary_and_composes(cfg):
    g = make_group(*cfg)
    one = (1, 0) if g.kind == "qpquad" else 1
    f = linear_combine([1.0, -0.5j], [
        indicator(ball(g, SIDE_TIME, ZERO, 1)),
        indicator(ball(g, SIDE_TIME, element(g, {0: one}), 1))])
    for n in (-2, -1, 1, 2):
        df = dilate(f, n)
        assert norm_sq(df) == pytest.approx(norm_sq(f))
        assert (df.m, df.r) == (f.m - n, f.r + n)
        assert stepfn_max_diff(dilate(df, -n), f) < 1e-14
    assert stepfn_max_diff(dilate(dilate(f, 1), 1), dilate(f, 2)) < 1e-14


@pytest.mark.parametrize("cfg", BASIC_CONFIGS)
def test_translate_matches_direct_oracle(cfg):
    g = make_group(*cfg)
    rng = random.Random(17)
    depth = 1 if g.kind == "qpquad" else 2
    translates = cosets_of_depth(g, depth)
    for scale in (-1, 0, 1):
        for _ in range(4):
            digs = {pos: ((rng.randrange(g.p), rng.randrange(g.p))
                          if g.kind == "qpquad" else rng.randrange(g.p))
                    for pos in range(-g.r0, scale * g.r0) if rng.random() < 0.7}
            b = ball(g, SIDE_TIME, element(g, digs), scale)
            s = translates[rng.randrange(len(translates))]
            got = translate(indicator(b), s)
            want = translate_direct_oracle(b, s)
            assert stepfn_max_diff(got, want) < 1e-12


def test_translate_at_zero_is_identity():
    g = make_group("qp", 3, 1, None)
    f = indicator(ball(g, SIDE_TIME, element(g, {0: 1}), 1), 2 - 1j)
    assert stepfn_max_diff(translate(f, ZERO), f) < 1e-14


@pytest.mark.parametrize("cfg", [("qp", 2, 1, None), ("qp", 3, 1, None),
                                 ("fpt", 2, 1, None), ("fpt", 3, 1, None)])
def test_translate_group_law(cfg):
    g = make_group(*cfg)
    f = indicator(ball(g, SIDE_TIME, ZERO, 1))
    reps = cosets_of_depth(g, 2)
    for s in reps[:4]:
        for t in reps[:4]:
            twice = translate(translate(f, s), t)
            once = translate(f, coset_add(g, s, t))
            assert stepfn_max_diff(twice, once) < 1e-10


def test_translate_coset_invariance_is_exact():
    # adding a subgroup element to the translate changes nothing, bit for bit
    rng = random.Random(23)
    for cfg in BASIC_CONFIGS:
        g = make_group(*cfg)
        f = indicator(ball(g, SIDE_TIME, ZERO, 1))
        s = element(g, {-g.r0: (1, 0) if g.kind == "qpquad" else 1})
        base = translate(f, s)
        for _ in range(10):
            digs = {pos: ((rng.randrange(g.p), rng.randrange(g.p))
                          if g.kind == "qpquad" else rng.randrange(g.p))
                    for pos in range(0, 2 * g.r0) if rng.random() < 0.7}
            h = element(g, digs)
            shifted = translate(f, add(g, s, h))
            assert shifted == base


def test_translate_preserves_norm_and_inner_products():
    g = make_group("qp", 3, 1, None)
    rng = random.Random(7)
    f = linear_combine([rng.uniform(-1, 1) for _ in range(3)],
                       [indicator(ball(g, SIDE_TIME, element(g, {0: d}), 1))
                        for d in range(3)])
    s = element(g, {-2: 1, -1: 2})
    tf = translate(f, s)
    assert norm_sq(tf) == pytest.approx(norm_sq(f))


def test_multiplier_w_window_check():
    g = make_group("qp", 2, 1, None)
    s = element(g, {-2: 1})
    with pytest.raises(ValueError):
        multiplier_w(g, s, 0, 1)   # resolution too coarse for depth-2 translate
    w = multiplier_w(g, s, 0, 2)
    assert w.side == "freq"
    assert all(abs(abs(v) - 1) < 1e-14 for v in w.values.values())


def test_theta_shift_changes_section_consistently():
    # a different transversal section shifts each frequency tile by a
    # subgroup element; on a single-tile function this is a constant phase
    g = make_group("qp", 2, 1, None)
    sigma = element(g, {-1: 1})
    from ultrawave import inverse_transform
    psi = inverse_transform(indicator(ball(g, "freq", sigma, 0)))
    s = element(g, {-1: 1})
    h = element(g, {0: 1})
    plain = translate(psi, s)
    shifted = translate(psi, s, theta_shift={sigma: h})
    phase = pairing(g, s, h)
    assert stepfn_max_diff(shifted, linear_combine([phase], [plain])) < 1e-12
    assert abs(inner_product(shifted, shifted) - inner_product(plain, plain)) < 1e-12


def test_wrong_operator_order_differs():
    # tau and delta do not commute; the measured gap on this instance is
    # sqrt(2) in L2
    g = make_group("qp", 2, 1, None)
    from ultrawave import inverse_transform
    psi = inverse_transform(indicator(ball(g, "freq", element(g, {-1: 1}), 0)))
    s = element(g, {-2: 1})
    a = dilate(translate(psi, s), 1)
    b = translate(dilate(psi, 1), s)
    gap = norm_sq(linear_combine([1.0, -1.0], [a, b])) ** 0.5
    assert gap == pytest.approx(2 ** 0.5, abs=1e-12)


def test_apply_basis_index_order():
    g = make_group("qp", 2, 1, None)
    from ultrawave import inverse_transform
    psi = inverse_transform(indicator(ball(g, "freq", element(g, {-1: 1}), 0)))
    s = element(g, {-2: 1})
    idx = BasisIndex(n=1, s=s, i=1)
    got = apply_basis_index(psi, idx)
    want = dilate(translate(psi, s), 1)
    assert stepfn_max_diff(got, want) == 0
    blob = json.loads(json.dumps(basis_index_to_json(idx)))
    assert basis_index_from_json(g, blob) == idx
