"""Dilation and coset-translation operators on step functions.

The dilation is (delta_n f)(x) = M**(n/2) f(A^n x).  The coset translation
tau_s acts on the frequency side: multiply the transform by the unimodular
multiplier w_s(gamma) = conj((s, eta(gamma))), where eta(gamma) keeps the
nonnegative digit positions of gamma.  Both are unitary; tau_s depends only
on the coset s + H, and replacing s by s + h with h in H leaves the computed
cell values bit-identical because the extra pairing phases are integers.

translate_direct_oracle implements the closed forms for tau_s on a ball
indicator directly (no transform), so the two paths check each other.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .groups import (
    Element,
    GroupDescriptor,
    add,
    d_prefix,
    depth_of,
    element_from_json,
    element_to_json,
    enumerate_window,
    negative_part,
    nonnegative_part,
    pairing_phase,
    restrict,
    shift_positions,
    unit_exp,
    window_size,
)
from .stepfn import (
    Ball,
    DEFAULT_CELL_GUARD,
    SIDE_TIME,
    StepFunction,
    ball,
    check_cell_guard,
    indicator,
    refine,
)
from .fourier import inverse_transform, transform


@dataclass(frozen=True)
class CosetIndex:
    """A coset of H in G, held by its canonical representative: the digits
    of s at negative positions."""

    group: GroupDescriptor
    rep: Element
    depth: int


def coset_index(g: GroupDescriptor, s: Element) -> CosetIndex:
    rep = negative_part(s)
    return CosetIndex(g, rep, depth_of(g, rep))


def coset_add(g: GroupDescriptor, s: Element, t: Element) -> Element:
    """Representative of [s] + [t]; carries past position 0 land in H and
    are discarded."""
    return negative_part(add(g, s, t))


def cosets_of_depth(g: GroupDescriptor, depth: int) -> list:
    """Canonical representatives of every coset of depth <= depth,
    modulus**depth of them, in index order (zero coset first)."""
    return list(enumerate_window(g, -depth * g.r0, depth * g.r0))


@dataclass(frozen=True)
class BasisIndex:
    """Label (n, [s], i) of the basis element delta^n tau_s psi_i."""

    n: int
    s: Element
    i: int


def basis_index_to_json(idx: BasisIndex) -> dict:
    return {"n": idx.n, "s": element_to_json(idx.s), "i": idx.i}


def basis_index_from_json(g: GroupDescriptor, obj: dict) -> BasisIndex:
    try:
        return BasisIndex(int(obj["n"]), element_from_json(g, obj["s"]), int(obj["i"]))
    except (TypeError, KeyError) as exc:
        raise ValueError(f"basis index JSON needs n/s/i: {exc}") from exc


def dilate(f: StepFunction, n: int) -> StepFunction:
    """Unitary dilation; window (m, r) becomes (m - n, r + n)."""
    if n == 0:
        return f
    g = f.group
    amp = float(g.modulus) ** (n / 2)
    shift = n * g.r0
    values = {shift_positions(c, shift): v * amp for c, v in f.values.items()}
    return StepFunction(g, f.side, f.m - n, f.r + n, values)


def _coset_rep(s) -> Element:
    return s.rep if isinstance(s, CosetIndex) else s


def multiplier_w(g: GroupDescriptor, s, m: int, r: int,
                 theta_shift: Optional[dict] = None,
                 cell_guard: int = DEFAULT_CELL_GUARD) -> StepFunction:
    """The multiplier w_s as a frequency-side step function on window (m, r).

    w_s(gamma) = conj((s, eta(gamma))); the window's fine scale r must be at
    least the coset depth for the cells to resolve w.
    """
    s = _coset_rep(s)
    d = depth_of(g, s)
    if r < d:
        raise ValueError(f"window fine scale {r} cannot resolve a depth-{d} coset")
    K = (m + r) * g.r0
    check_cell_guard(window_size(g, K), cell_guard)
    values = {}
    for center in enumerate_window(g, -m * g.r0, K):
        values[center] = unit_exp(-_eta_phase(g, s, center, theta_shift))
    return StepFunction(g, "freq", m, r, values)


def _eta_phase(g: GroupDescriptor, s: Element, gamma: Element,
               theta_shift: Optional[dict]) -> Fraction:
    """Phase of (s, eta(gamma)), with eta taken against a shifted transversal
    when theta_shift maps theta(gamma) to some h in H^perp."""
    phase = pairing_phase(g, s, nonnegative_part(gamma))
    if theta_shift:
        h = theta_shift.get(negative_part(gamma))
        if h is not None:
            phase = phase - pairing_phase(g, s, h)
    return phase


def translate(f: StepFunction, s, theta_shift: Optional[dict] = None,
              method: str = "dft",
              cell_guard: int = DEFAULT_CELL_GUARD) -> StepFunction:
    """Coset translation via the frequency side.

    s may be a CosetIndex, a canonical representative, or any Element of the
    coset; the output values are identical for all representatives.
    """
    s = _coset_rep(s)
    g = f.group
    if f.side != SIDE_TIME:
        raise ValueError("coset translation acts on time-side functions")
    F = transform(f, method, cell_guard)
    d = depth_of(g, s)
    F = refine(F, F.m, max(F.r, d), cell_guard)
    values = {}
    for center, v in F.values.items():
        values[center] = v * unit_exp(-_eta_phase(g, s, center, theta_shift))
    return inverse_transform(StepFunction(g, F.side, F.m, F.r, values),
                             method, cell_guard)


def translate_direct_oracle(b: Ball, s, cell_guard: int = DEFAULT_CELL_GUARD) -> StepFunction:
    """Closed-form action of tau_s on a ball indicator, no transform taken.

    For a coarse ball (scale r <= 0) the result is the indicator of the
    translated ball.  For a fine ball (r > 0) the mass spreads over the whole
    coset s + c + H with values M**(-r) * sum_i (x - c, sigma_i), the sum
    running over the depth-r transversal prefix.
    """
    if b.side != SIDE_TIME:
        raise ValueError("oracle acts on time-side balls")
    g = b.group
    s = _coset_rep(s)
    r = b.scale
    sc = add(g, s, b.center)
    if r <= 0:
        return indicator(ball(g, SIDE_TIME, sc, r))
    sigmas = d_prefix(g, r)
    check_cell_guard(len(sigmas) * len(sigmas), cell_guard)
    c_phases = [pairing_phase(g, b.center, sig) for sig in sigmas]
    measure = float(Fraction(1, g.modulus) ** r)
    values = {}
    for pat in enumerate_window(g, 0, r * g.r0):
        center = restrict(add(g, sc, pat), None, r * g.r0)
        total = 0j
        for sig, cph in zip(sigmas, c_phases):
            total += unit_exp(pairing_phase(g, center, sig) - cph)
        values[center] = total * measure
    m = depth_of(g, sc)
    return StepFunction(g, SIDE_TIME, m, r, values)


def apply_basis_index(psi: StepFunction, idx: BasisIndex,
                      method: str = "dft",
                      cell_guard: int = DEFAULT_CELL_GUARD) -> StepFunction:
    """delta^n tau_s psi, strictly in that operator order."""
    return dilate(translate(psi, idx.s, None, method, cell_guard), idx.n)
