"""End-to-end acceptance checks.

Each test prints exactly one PASS/FAIL line naming the check and the measured
quantity, then asserts.  Tolerances are pinned here and are not adjusted to
make anything pass.
"""

import random
from fractions import Fraction

import pytest

from ultrawave import (
    GroupDescriptor,
    SIDE_FREQ,
    SIDE_TIME,
    StepFunction,
    ZERO,
    add,
    ball,
    ballset,
    ballset_measure,
    build_wavelet_set,
    compare_example,
    coset_add,
    cosets_of_depth,
    element,
    enumerate_window,
    example_group,
    example_lambda_ball,
    example_partition,
    example_spec,
    fixed_point_residual,
    gram_matrix,
    haar_closed_form,
    haar_shannon_system,
    indicator,
    inner_product,
    norm_sq,
    parseval_capture,
    scaled_generator_system,
    stepfn_max_diff,
    transform,
    translate,
    translate_direct_oracle,
    inverse_transform,
    wavelet_set_system,
)

from conftest import BASIC_CONFIGS, make_group


def _report(name: str, ok: bool, detail: str) -> None:
    print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    assert ok, f"{name}: {detail}"


def _random_element(g, rng, lo, hi):
    digs = {}
    for pos in range(lo, hi):
        if rng.random() < 0.6:
            digs[pos] = ((rng.randrange(g.p), rng.randrange(g.p))
                         if g.kind == "qpquad" else rng.randrange(g.p))
    return element(g, digs)


def test_criterion_01_haar_equals_shannon(haar_systems):
    worst = 0.0
    for cfg in BASIC_CONFIGS:
        g = make_group(*cfg)
        system = haar_systems[cfg]
        for i in range(1, g.modulus):
            d = stepfn_max_diff(system.generators[i - 1],
                                haar_closed_form(g, i, ZERO))
            worst = max(worst, d)
    _report("haar-shannon-equality", worst < 1e-10,
            f"6 configs, max cell diff {worst:.3e} (tol 1e-10)")


def test_criterion_02_binary_laurent_generator():
    g = make_group("fpt", 2, 1, None)
    sigma = element(g, {-1: 1})
    psi = inverse_transform(indicator(ball(g, SIDE_FREQ, sigma, 0)))
    value_err = max(abs(psi.values.get(ZERO, 0) - 1),
                    abs(psi.values.get(element(g, {0: 1}), 0) + 1))
    back = transform(psi)
    round_trip = stepfn_max_diff(back, indicator(ball(g, SIDE_FREQ, sigma, 0)))
    ok = value_err < 1e-12 and round_trip < 1e-12
    _report("binary-laurent-generator", ok,
            f"values off by {value_err:.3e}, transform off by {round_trip:.3e} (tol 1e-12)")


def test_criterion_03_translate_oracle_sweep():
    worst = 0.0
    checked = 0
    for kind in ("qp", "fpt"):
        for p in (2, 3):
            g = GroupDescriptor(kind, p, r0=1)
            translates = cosets_of_depth(g, 3)
            for scale in range(-2, 3):
                for center in enumerate_window(g, -2 * g.r0,
                                               (scale + 2) * g.r0):
                    b = ball(g, SIDE_TIME, center, scale)
                    for s in translates:
                        d = stepfn_max_diff(translate(indicator(b), s),
                                            translate_direct_oracle(b, s))
                        worst = max(worst, d)
                        checked += 1
    g = GroupDescriptor("qpquad", 3, r0=1, u=2)
    for scale in range(-2, 3):
        for center in enumerate_window(g, -g.r0, g.r0):
            b = ball(g, SIDE_TIME, center, scale)
            for s in cosets_of_depth(g, 1):
                d = stepfn_max_diff(translate(indicator(b), s),
                                    translate_direct_oracle(b, s))
                worst = max(worst, d)
                checked += 1
    _report("translate-direct-oracle", worst < 1e-9,
            f"{checked} cases, max diff {worst:.3e} (tol 1e-9)")


def test_criterion_04_translation_group_law():
    worst = 0.0
    rng = random.Random(13)
    exact_failures = 0
    for kind in ("qp", "fpt"):
        for p in (2, 3):
            g = GroupDescriptor(kind, p, r0=1)
            psi = haar_shannon_system(g).generators[0]
            reps = cosets_of_depth(g, 2)
            for s in reps:
                for t in reps:
                    twice = translate(translate(psi, s), t)
                    once = translate(psi, coset_add(g, s, t))
                    worst = max(worst, stepfn_max_diff(twice, once))
            base = translate(psi, reps[1])
            for _ in range(10):
                h = _random_element(g, rng, 0, 2)
                if translate(psi, add(g, reps[1], h)) != base:
                    exact_failures += 1
    ok = worst < 1e-10 and exact_failures == 0
    _report("translation-group-law", ok,
            f"pair law max diff {worst:.3e} (tol 1e-10), "
            f"{exact_failures} coset-invariance mismatches (must be 0)")


def test_criterion_05_haar_gram_identity(haar_systems):
    worst = 0.0
    for cfg in [("qp", 2, 1, None), ("qp", 3, 1, None), ("fpt", 3, 1, None)]:
        rep = gram_matrix(haar_systems[cfg], -2, 2, 3)
        worst = max(worst, rep.max_diag_err, rep.max_offdiag_abs)
    bad = scaled_generator_system(haar_systems[("qp", 2, 1, None)], 1.1)
    control = gram_matrix(bad, -2, 2, 3).max_diag_err
    ok = worst < 1e-8 and abs(control - 0.21) < 1e-9
    _report("haar-gram-identity", ok,
            f"max deviation {worst:.3e} (tol 1e-8), "
            f"corrupted-generator control {control:.6f} (expect 0.21)")


def test_criterion_06_overlap_sets_closed_form():
    details = []
    ok = True
    for example_id, p, r, limit in [("qpwave", 2, 2, Fraction(1, 3)),
                                    ("qpwave3", None, None, Fraction(1, 2))]:
        g = example_group(example_id, p=p, r=r)
        res = build_wavelet_set(g, example_spec(example_id, g))
        for n in range(1, 7):
            want = ballset(g, SIDE_FREQ, [example_lambda_ball(example_id, g, n)])
            if res.lambdas[n - 1] != want:
                ok = False
        M = g.modulus
        total = sum(ballset_measure(l) for l in res.lambdas)
        partial = Fraction(M ** res.n_iters - 1, M ** res.n_iters * (M - 1))
        if total != partial:
            ok = False
        gap = limit - total
        if not 0 < gap < 2 * res.epsilon:
            ok = False
        details.append(f"{example_id}: 6 exact sets, measure gap {float(gap):.2e}")
    _report("overlap-set-closed-forms", ok, "; ".join(details))


def test_criterion_07_fixed_point_residual():
    eps = Fraction(1, 2 ** 40)
    details = []
    ok = True
    for example_id, p, r in [("qpwave", 2, 2), ("qpwave3", None, None)]:
        g = example_group(example_id, p=p, r=r)
        res = build_wavelet_set(g, example_spec(example_id, g, eps))
        resid = fixed_point_residual(g, res.omega,
                                     example_partition(example_id, g), eps)
        if float(resid) >= 2 ** -30:
            ok = False
        details.append(f"{example_id}: residual {float(resid):.3e}")
    _report("self-similarity-residual", ok,
            "; ".join(details) + " (tol 2^-30)")


def test_criterion_08_wavelet_set_gram():
    g = example_group("qpwave3")
    system = wavelet_set_system(g, example_spec("qpwave3", g),
                                materialize=False)
    rep = gram_matrix(system, -2, 2, 2, tol=1e-6)
    worst = max(rep.max_diag_err, rep.max_offdiag_abs)
    _report("wavelet-set-gram", rep.passed,
            f"max deviation {worst:.3e} (tol 1e-6, truncation tail "
            f"{float(system.dropped_measure):.1e})")


def test_criterion_09_closed_form_agreement():
    details = []
    ok = True
    for example_id, p, r in [("qpwave", 2, 1), ("qpextnwave", None, 1),
                             ("fptwave", 3, None), ("qpwave3", None, None)]:
        rep = compare_example(example_id, p=p, r=r, n_samples=64, seed=0)
        if rep.max_abs_diff >= 1e-6:
            ok = False
        details.append(f"{example_id} {rep.max_abs_diff:.1e}")
    _report("closed-form-agreement", ok,
            "64 samples each, max diffs " + ", ".join(details) + " (tol 1e-6)")


def test_criterion_10_plancherel_inversion():
    rng = random.Random(19)
    worst_rt = 0.0
    worst_pl = 0.0
    for cfg in BASIC_CONFIGS:
        g = make_group(*cfg)
        for _ in range(100):
            values = {c: complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
                      for c in enumerate_window(g, -g.r0, 2 * g.r0)}
            f = StepFunction(g, SIDE_TIME, 1, 1, values)
            F = transform(f)
            worst_rt = max(worst_rt, stepfn_max_diff(inverse_transform(F), f))
            worst_pl = max(worst_pl, abs(norm_sq(F) - norm_sq(f)))
    # exact-pairing path agrees with the matrix path on a 3^6-cell window
    g = make_group("qp", 3, 1, None)
    values = {c: complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
              for c in enumerate_window(g, -2, 6)}
    f = StepFunction(g, SIDE_TIME, 2, 4, values)
    cw = stepfn_max_diff(transform(f, method="dft"),
                         transform(f, method="cellwise"))
    ok = worst_rt < 1e-10 and worst_pl < 1e-10 and cw < 1e-10
    _report("plancherel-inversion", ok,
            f"600 functions: round trip {worst_rt:.3e}, energy {worst_pl:.3e}, "
            f"dft vs cellwise {cw:.3e} (tol 1e-10)")


def test_criterion_11_expansion_energy_capture(haar_systems):
    system = haar_systems[("qp", 2, 1, None)]
    g = system.group
    f = indicator(ball(g, SIDE_TIME, ZERO, 0))
    rep = parseval_capture(system, f, -20, 5, 4)
    _report("expansion-energy-capture", rep.fraction >= 0.9999,
            f"captured fraction {rep.fraction:.10f} (need >= 0.9999)")
