"""Ultrametric balls, finite disjoint ball unions, and step functions.

A ball of scale r is  center + pi^(r*r0) * O  (on either the time or the
frequency side; both sides carry the same digit structure because the groups
here are self-dual).  Its Haar measure is modulus**(-r), kept as an exact
Fraction.  Two balls are always nested or disjoint; a BallSet keeps the
canonical maximal-ball form, with every complete family of modulus siblings
merged into its parent.

A StepFunction has a window (m, r): support inside the scale -m ball about
zero and constant on scale-r balls.  Cells are keyed by their canonical
center element; missing cells are zero.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .groups import (
    Element,
    GroupDescriptor,
    add,
    depth_of,
    element,
    element_from_json,
    element_to_json,
    enumerate_window,
    group_from_json,
    group_to_json,
    restrict,
    shift_positions,
    window_size,
)

SIDE_TIME = "time"
SIDE_FREQ = "freq"
SIDES = (SIDE_TIME, SIDE_FREQ)

DEFAULT_CELL_GUARD = 1 << 22


class CellGuardError(Exception):
    """Raised when an operation would materialize too many cells."""


def check_cell_guard(count: int, guard: int = DEFAULT_CELL_GUARD) -> None:
    if count > guard:
        raise CellGuardError(f"operation needs {count} cells, guard is {guard}")


@dataclass(frozen=True)
class Ball:
    group: GroupDescriptor
    side: str
    center: Element
    scale: int


def ball(g: GroupDescriptor, side: str, center: Element, scale: int) -> Ball:
    """Canonical ball: digits of the center at positions >= scale*r0 are
    absorbed into the subgroup coset and dropped."""
    if side not in SIDES:
        raise ValueError(f"side must be one of {SIDES}")
    return Ball(g, side, restrict(center, None, scale * g.r0), scale)


def ball_measure(b: Ball) -> Fraction:
    return Fraction(1, b.group.modulus) ** b.scale


def ball_contains_point(b: Ball, x: Element) -> bool:
    return restrict(x, None, b.scale * b.group.r0) == b.center


def ball_contains_ball(outer: Ball, inner: Ball) -> bool:
    if outer.scale > inner.scale:
        return False
    return restrict(inner.center, None, outer.scale * outer.group.r0) == outer.center


def ball_intersect(a: Ball, b: Ball) -> Optional[Ball]:
    """The finer ball when nested, None when disjoint."""
    if a.scale <= b.scale:
        return b if ball_contains_ball(a, b) else None
    return a if ball_contains_ball(b, a) else None


def ball_children(b: Ball) -> list:
    g = b.group
    lo = b.scale * g.r0
    out = []
    for pattern in enumerate_window(g, lo, g.r0):
        out.append(Ball(g, b.side, Element(b.center.digits + pattern.digits), b.scale + 1))
    return out


def refine_ball_to_scale(b: Ball, scale: int) -> list:
    """Split into the sub-balls of the given scale (>= b.scale)."""
    if scale <= b.scale:
        return [b]
    g = b.group
    lo = b.scale * g.r0
    length = (scale - b.scale) * g.r0
    return [
        Ball(g, b.side, Element(b.center.digits + pat.digits), scale)
        for pat in enumerate_window(g, lo, length)
    ]


@dataclass(frozen=True)
class BallSet:
    """Canonical finite disjoint union of balls, sorted by (scale, center)."""

    group: GroupDescriptor
    side: str
    balls: tuple = ()


def _ball_sort_key(b: Ball):
    return (b.scale, b.center.digits)


def ballset(g: GroupDescriptor, side: str, balls_iter: Iterable[Ball]) -> BallSet:
    return BallSet(g, side, _normalize(g, side, balls_iter))


def _normalize(g: GroupDescriptor, side: str, balls_iter: Iterable[Ball]) -> tuple:
    # drop balls nested inside coarser ones, then merge complete sibling
    # families bottom-up; the result is the unique maximal-ball form
    by_scale: dict = {}
    for b in balls_iter:
        if b.group != g or b.side != side:
            raise ValueError("mixed groups or sides in ball set")
        by_scale.setdefault(b.scale, set()).add(restrict(b.center, None, b.scale * g.r0))
    if not by_scale:
        return ()
    kept: dict = {}
    for sc in sorted(by_scale):
        for center in by_scale[sc]:
            covered = any(
                restrict(center, None, s2 * g.r0) in kept[s2]
                for s2 in kept if s2 < sc
            )
            if not covered:
                kept.setdefault(sc, set()).add(center)
    M = g.modulus
    # merging a full sibling family may complete a family one scale up, so
    # sweep downward until the scale pointer passes the coarsest kept scale
    sc = max(kept)
    while kept and sc >= min(kept):
        families: dict = {}
        for center in kept.get(sc, ()):
            parent = restrict(center, None, (sc - 1) * g.r0)
            families.setdefault(parent, []).append(center)
        for parent, members in families.items():
            if len(members) == M:
                for c in members:
                    kept[sc].discard(c)
                kept.setdefault(sc - 1, set()).add(parent)
        if sc in kept and not kept[sc]:
            del kept[sc]
        sc -= 1
    out = [Ball(g, side, c, sc) for sc, centers in kept.items() for c in centers]
    return tuple(sorted(out, key=_ball_sort_key))


def ballset_measure(s: BallSet) -> Fraction:
    total = Fraction(0)
    for b in s.balls:
        total += ball_measure(b)
    return total


def ballset_member(s: BallSet, x: Element) -> bool:
    return any(ball_contains_point(b, x) for b in s.balls)


def ballset_union(a: BallSet, b: BallSet) -> BallSet:
    _check_same(a, b)
    return ballset(a.group, a.side, a.balls + b.balls)


def _scale_index(s: BallSet) -> dict:
    idx: dict = {}
    for b in s.balls:
        idx.setdefault(b.scale, set()).add(b.center)
    return idx


def ballset_intersect(a: BallSet, b: BallSet) -> BallSet:
    _check_same(a, b)
    g = a.group
    idx_b = _scale_index(b)
    idx_a = _scale_index(a)
    picks = []
    for x in a.balls:
        if any(sc <= x.scale and restrict(x.center, None, sc * g.r0) in idx_b[sc]
               for sc in idx_b):
            picks.append(x)
    for y in b.balls:
        if any(sc < y.scale and restrict(y.center, None, sc * g.r0) in idx_a[sc]
               for sc in idx_a):
            picks.append(y)
    return ballset(g, a.side, picks)


def ballset_subtract(a: BallSet, b: BallSet) -> BallSet:
    _check_same(a, b)
    g = a.group
    out = []
    for x in a.balls:
        inside = []
        gone = False
        for y in b.balls:
            inter = ball_intersect(x, y)
            if inter is None:
                continue
            if inter == x:
                gone = True
                break
            inside.append(inter)
        if gone:
            continue
        out.extend(_carve(x, inside))
    return ballset(g, a.side, out)


def _carve(b: Ball, holes: list) -> list:
    """Remove strictly finer balls from b by recursive splitting."""
    if not holes:
        return [b]
    shards = []
    for child in ball_children(b):
        child_holes = []
        covered = False
        for h in holes:
            if h == child:
                covered = True
                break
            if ball_contains_ball(child, h):
                child_holes.append(h)
        if covered:
            continue
        shards.extend(_carve(child, child_holes))
    return shards


def ballset_translate(s: BallSet, c: Element) -> BallSet:
    """Translate every ball by c (translation of a ball is a ball)."""
    return ballset(
        s.group, s.side,
        (ball(s.group, s.side, add(s.group, b.center, c), b.scale) for b in s.balls),
    )


def ballset_scale(s: BallSet, n: int) -> BallSet:
    """Apply the dilation A**n; every measure is multiplied by modulus**n."""
    g = s.group
    return ballset(
        g, s.side,
        (Ball(g, s.side, shift_positions(b.center, -n * g.r0), b.scale - n)
         for b in s.balls),
    )


def ballset_symmetric_difference_measure(a: BallSet, b: BallSet) -> Fraction:
    return ballset_measure(ballset_subtract(a, b)) + ballset_measure(ballset_subtract(b, a))


def _check_same(a: BallSet, b: BallSet) -> None:
    if a.group != b.group:
        raise ValueError("ball sets belong to different groups")
    if a.side != b.side:
        raise ValueError("mixed time/frequency sides")


# ---------------------------------------------------------------------------
# step functions

@dataclass(frozen=True)
class StepFunction:
    """Window (m, r): support in ball(0, -m), constant on scale-r balls.
    values maps canonical cell centers (digits in [-m*r0, r*r0)) to complex."""

    group: GroupDescriptor
    side: str
    m: int
    r: int
    values: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.m + self.r < 0:
            raise ValueError("window needs m + r >= 0")
        if self.side not in SIDES:
            raise ValueError(f"side must be one of {SIDES}")

    def cell_count(self) -> int:
        return len(self.values)

    def cell_measure(self) -> Fraction:
        return Fraction(1, self.group.modulus) ** self.r


def zero_stepfn(g: GroupDescriptor, side: str, m: int = 0, r: int = 0) -> StepFunction:
    return StepFunction(g, side, m, r, {})


def window_low(g: GroupDescriptor, m: int) -> int:
    return -m * g.r0


def window_length(g: GroupDescriptor, m: int, r: int) -> int:
    return (m + r) * g.r0


def indicator(b: Ball, amplitude: complex = 1.0) -> StepFunction:
    """Indicator of one ball: a single stored cell."""
    g = b.group
    lo = b.center.lowest_position()
    m = max(0, -b.scale, depth_of(g, b.center) if lo is not None and lo < 0 else 0)
    return StepFunction(g, b.side, m, b.scale, {b.center: complex(amplitude)})


def evaluate(f: StepFunction, x: Element) -> complex:
    g = f.group
    lo = x.lowest_position()
    if lo is not None and lo < window_low(g, f.m):
        return 0j  # outside the support ball
    return f.values.get(restrict(x, None, f.r * g.r0), 0j)


def refine(f: StepFunction, m: int, r: int,
           cell_guard: int = DEFAULT_CELL_GUARD) -> StepFunction:
    """Re-express f on a finer window (m >= f.m, r >= f.r); values unchanged."""
    if m < f.m or r < f.r:
        raise ValueError("refinement cannot coarsen the window")
    if m == f.m and r == f.r:
        return f
    g = f.group
    splits = window_size(g, (r - f.r) * g.r0)
    check_cell_guard(len(f.values) * splits, cell_guard)
    patterns = list(enumerate_window(g, f.r * g.r0, (r - f.r) * g.r0))
    values = {}
    for center, v in f.values.items():
        for pat in patterns:
            values[Element(center.digits + pat.digits)] = v
    return StepFunction(g, f.side, m, r, values)


def linear_combine(coeffs: Iterable[complex], fns: Iterable[StepFunction],
                   cell_guard: int = DEFAULT_CELL_GUARD) -> StepFunction:
    coeffs = list(coeffs)
    fns = list(fns)
    if not fns:
        raise ValueError("need at least one function")
    g = fns[0].group
    side = fns[0].side
    for f in fns:
        if f.group != g or f.side != side:
            raise ValueError("mixed groups or sides in linear combination")
    m = max(f.m for f in fns)
    r = max(f.r for f in fns)
    out: dict = {}
    for c, f in zip(coeffs, fns):
        rf = refine(f, m, r, cell_guard)
        for center, v in rf.values.items():
            out[center] = out.get(center, 0j) + c * v
    out = {k: v for k, v in out.items() if v != 0}
    check_cell_guard(len(out), cell_guard)
    return StepFunction(g, side, m, r, out)


def inner_product(f: StepFunction, h: StepFunction,
                  cell_guard: int = DEFAULT_CELL_GUARD) -> complex:
    """Haar inner product <f, h> = integral of f * conj(h); exact cell measures."""
    if f.group != h.group:
        raise ValueError("functions belong to different groups")
    if f.side != h.side:
        raise ValueError("mixed time/frequency sides")
    m = max(f.m, h.m)
    r = max(f.r, h.r)
    rf = refine(f, m, r, cell_guard)
    rh = refine(h, m, r, cell_guard)
    if len(rf.values) > len(rh.values):
        rf, rh = rh, rf
        conj_swap = True
    else:
        conj_swap = False
    measure = float(Fraction(1, f.group.modulus) ** r)
    total = 0j
    for center, v in rf.values.items():
        w = rh.values.get(center)
        if w is not None:
            total += v * w.conjugate()
    total *= measure
    return total.conjugate() if conj_swap else total


def norm_sq(f: StepFunction) -> float:
    measure = float(f.cell_measure())
    return sum((v.real * v.real + v.imag * v.imag) for v in f.values.values()) * measure


def stepfn_max_diff(f: StepFunction, h: StepFunction,
                    cell_guard: int = DEFAULT_CELL_GUARD) -> float:
    """Max pointwise |f - h| over the union of windows."""
    diff = linear_combine([1.0, -1.0], [f, h], cell_guard)
    return max((abs(v) for v in diff.values.values()), default=0.0)


def indicator_of_ballset(s: BallSet, amplitude: complex = 1.0,
                         cell_guard: int = DEFAULT_CELL_GUARD) -> StepFunction:
    if not s.balls:
        return zero_stepfn(s.group, s.side)
    return linear_combine(
        [amplitude] * len(s.balls),
        [indicator(b) for b in s.balls],
        cell_guard,
    )


# ---------------------------------------------------------------------------
# serialization

def _cell_digit_vector(g: GroupDescriptor, center: Element, m: int, r: int) -> list:
    lo = window_low(g, m)
    length = window_length(g, m, r)
    dd = dict(center.digits)
    out = []
    for i in range(length):
        c = dd.get(lo + i, (0, 0) if g.kind == "qpquad" else 0)
        out.append(list(c) if isinstance(c, tuple) else c)
    return out


def _element_from_digit_vector(g: GroupDescriptor, vec: list, m: int) -> Element:
    lo = window_low(g, m)
    digits = {}
    for i, c in enumerate(vec):
        digits[lo + i] = tuple(c) if isinstance(c, list) else c
    return element(g, digits)


def stepfn_to_json(f: StepFunction) -> dict:
    cells = []
    for center in sorted(f.values, key=lambda e: e.digits):
        v = f.values[center]
        cells.append({
            "digits": _cell_digit_vector(f.group, center, f.m, f.r),
            "re": v.real,
            "im": v.imag,
        })
    return {
        "group": group_to_json(f.group),
        "side": f.side,
        "m": f.m,
        "r": f.r,
        "cells": cells,
    }


def stepfn_from_json(obj: dict) -> StepFunction:
    try:
        g = group_from_json(obj["group"])
        side = obj["side"]
        m = int(obj["m"])
        r = int(obj["r"])
        raw = obj["cells"]
    except (TypeError, KeyError) as exc:
        raise ValueError(f"step function JSON needs group/side/m/r/cells: {exc}") from exc
    values = {}
    for i, cell in enumerate(raw):
        try:
            vec = cell["digits"]
            v = complex(cell["re"], cell["im"])
        except (TypeError, KeyError) as exc:
            raise ValueError(f"cells[{i}] needs digits/re/im: {exc}") from exc
        expected = window_length(g, m, r)
        if len(vec) != expected:
            raise ValueError(f"cells[{i}].digits has length {len(vec)}, window needs {expected}")
        values[_element_from_digit_vector(g, vec, m)] = v
    return StepFunction(g, side, m, r, values)


def stepfn_to_csv(f: StepFunction) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["digits", "re", "im"])
    for center in sorted(f.values, key=lambda e: e.digits):
        v = f.values[center]
        vec = _cell_digit_vector(f.group, center, f.m, f.r)
        flat = ";".join(
            f"{c[0]},{c[1]}" if isinstance(c, list) else str(c) for c in vec
        )
        writer.writerow([flat, repr(v.real), repr(v.imag)])
    return buf.getvalue()


def ball_to_json(b: Ball) -> dict:
    return {"center": element_to_json(b.center), "scale": b.scale}


def ballset_to_json(s: BallSet) -> dict:
    return {
        "group": group_to_json(s.group),
        "side": s.side,
        "balls": [ball_to_json(b) for b in s.balls],
    }


def ballset_from_json(obj: dict) -> BallSet:
    try:
        g = group_from_json(obj["group"])
        side = obj["side"]
        raw = obj["balls"]
    except (TypeError, KeyError) as exc:
        raise ValueError(f"ball set JSON needs group/side/balls: {exc}") from exc
    balls = []
    for i, item in enumerate(raw):
        try:
            balls.append(ball(g, side, element_from_json(g, item["center"]), int(item["scale"])))
        except (TypeError, KeyError) as exc:
            raise ValueError(f"balls[{i}] needs center/scale: {exc}") from exc
    return ballset(g, side, balls)
