"""Fourier transform of step functions.

The transform of a step function with window (m, r) is a step function on
the dual side with window (r, m).  Since every group here is self-dual, both
sides share the digit representation and the transform is a finite unitary
matrix applied to the cell vector.

Two methods: "dft" builds the full character matrix once per (group, window
length, sign) and reuses it; "cellwise" recomputes each pairing phase exactly
and serves as an independent cross-check.  Phases that are multiples of a
quarter turn get exact complex values, so indicator transforms over p = 2
come out with literal +/-1 and +/-1j entries.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .groups import (
    Element,
    GroupDescriptor,
    depth_of,
    element_of_index,
    index_of_element,
    pairing_phase,
    unit_exp,
    window_size,
)
from .stepfn import (
    Ball,
    DEFAULT_CELL_GUARD,
    SIDE_FREQ,
    SIDE_TIME,
    StepFunction,
    check_cell_guard,
    window_length,
    window_low,
)


def unit_exp_array(num: np.ndarray, den: int, sign: int) -> np.ndarray:
    """exp(sign * 2 pi i * num / den) with exact values at quarter turns."""
    num = np.mod(num, den)
    out = np.exp((sign * 2j * np.pi / den) * num)
    exact = (4 * num) % den == 0
    if np.any(exact):
        quarter = np.mod(4 * num[exact] // den, 4)
        table = np.array([1, 1j, -1, -1j]) if sign >= 0 else np.array([1, -1j, -1, 1j])
        out[exact] = table[quarter]
    return out


_PLAN_CACHE: dict = {}


@dataclass(frozen=True)
class TransformPlan:
    """Character matrix for one window length; entry [j, k] is the pairing
    of cell j against cell k as unit complex."""

    group: GroupDescriptor
    length: int
    sign: int
    matrix: np.ndarray


def transform_plan(g: GroupDescriptor, length: int, sign: int,
                   cell_guard: int = DEFAULT_CELL_GUARD) -> TransformPlan:
    dim = window_size(g, length)
    # guard applies per call, not just on first construction
    check_cell_guard(dim * dim, cell_guard)
    key = (g, length, sign)
    cached = _PLAN_CACHE.get(key)
    if cached is not None:
        return cached
    p = g.p
    if g.kind == "qpquad":
        den = p ** length
        idx = np.arange(dim, dtype=np.int64)
        a, b = idx // den, idx % den
        num = (2 * (np.outer(a, a) + g.u * np.outer(b, b))) % den
    elif g.kind == "fpt":
        den = p
        idx = np.arange(dim, dtype=np.int64)
        digits = np.empty((dim, length), dtype=np.int64)
        for col in range(length):
            digits[:, col] = (idx // p**col) % p
        num = (digits @ digits[:, ::-1].T) % p
    else:
        den = p ** length
        idx = np.arange(dim, dtype=np.int64)
        num = np.outer(idx, idx) % den
    plan = TransformPlan(g, length, sign, unit_exp_array(num, den, sign))
    _PLAN_CACHE[key] = plan
    return plan


def _dense_vector(f: StepFunction) -> np.ndarray:
    g = f.group
    K = window_length(g, f.m, f.r)
    lo = window_low(g, f.m)
    v = np.zeros(window_size(g, K), dtype=complex)
    for center, val in f.values.items():
        v[index_of_element(g, center, lo, K)] = val
    return v


def _sparse_values(g: GroupDescriptor, vec: np.ndarray, lo: int, length: int) -> dict:
    values = {}
    for k in np.nonzero(vec)[0]:
        values[element_of_index(g, int(k), lo, length)] = complex(vec[k])
    return values


def _apply(f: StepFunction, sign: int, out_side: str, method: str,
           cell_guard: int) -> StepFunction:
    g = f.group
    K = window_length(g, f.m, f.r)
    out_m, out_r = f.r, f.m
    measure = float(Fraction(1, g.modulus) ** f.r)
    out_lo = window_low(g, out_m)
    if not f.values:
        return StepFunction(g, out_side, out_m, out_r, {})
    if method == "dft":
        plan = transform_plan(g, K, sign, cell_guard)
        vec = plan.matrix @ _dense_vector(f)
        vec *= measure
        return StepFunction(g, out_side, out_m, out_r,
                            _sparse_values(g, vec, out_lo, K))
    if method == "cellwise":
        dim = window_size(g, K)
        check_cell_guard(dim * len(f.values), cell_guard)
        in_lo = window_low(g, f.m)
        values = {}
        for k in range(dim):
            gamma = element_of_index(g, k, out_lo, K)
            total = 0j
            for center, val in f.values.items():
                total += val * unit_exp(sign * pairing_phase(g, center, gamma))
            total *= measure
            if total != 0:
                values[gamma] = total
        return StepFunction(g, out_side, out_m, out_r, values)
    raise ValueError(f"unknown method {method!r}, expected 'dft' or 'cellwise'")


def transform(f: StepFunction, method: str = "dft",
              cell_guard: int = DEFAULT_CELL_GUARD) -> StepFunction:
    """Forward transform, time side to frequency side."""
    if f.side != SIDE_TIME:
        raise ValueError("forward transform expects a time-side function")
    return _apply(f, -1, SIDE_FREQ, method, cell_guard)


def inverse_transform(F: StepFunction, method: str = "dft",
                      cell_guard: int = DEFAULT_CELL_GUARD) -> StepFunction:
    """Inverse transform, frequency side to time side."""
    if F.side != SIDE_FREQ:
        raise ValueError("inverse transform expects a frequency-side function")
    return _apply(F, +1, SIDE_TIME, method, cell_guard)


def indicator_transform(b: Ball, cell_guard: int = DEFAULT_CELL_GUARD) -> StepFunction:
    """Closed-form transform of a ball indicator, no matrix involved.

    The image of 1 on (c + scale-r subgroup) is modulus**(-r) times the
    character of c restricted to the annihilator ball of scale -r.  A ball
    on the time side maps forward; one on the frequency side maps back, so
    indicator_transform(indicator ball of a frequency tile) is the wavelet
    profile itself.
    """
    g = b.group
    sign = -1 if b.side == SIDE_TIME else +1
    out_side = SIDE_FREQ if b.side == SIDE_TIME else SIDE_TIME
    out_m = b.scale
    out_r = max(depth_of(g, b.center), -b.scale)
    amp = float(Fraction(1, g.modulus) ** b.scale)
    K = window_length(g, out_m, out_r)
    lo = window_low(g, out_m)
    dim = window_size(g, K)
    check_cell_guard(dim, cell_guard)
    values = {}
    for k in range(dim):
        xi = element_of_index(g, k, lo, K)
        values[xi] = unit_exp(sign * pairing_phase(g, b.center, xi)) * amp
    return StepFunction(g, out_side, out_m, out_r, values)
