"""Wavelet generators: the Haar/Shannon family and single wavelets from
frequency-side tiling sets.

Haar case: sigma_0..sigma_{M-1} are the depth-1 transversal prefix elements;
generator i is the inverse transform of the indicator of sigma_i + H^perp,
which works out to the character (x, sigma_i) restricted to H.

Tiling-set case: starting from Omega_0 = H^perp, repeatedly move the overlap
Lambda_n = Omega_{n-1} intersect union_i (A*)^{-i} Omega_{n-1} out of H^perp
by the piecewise shift T(gamma) = gamma + sigma on V_sigma.  The i-union and
the iteration are truncated once measures drop below a rational epsilon; the
dropped tail is estimated geometrically and reported, never hidden.

The iteration runs on an integer-interval encoding of ball unions (digit
strings ordered most-significant-first make every ball a contiguous block),
which keeps set algebra at thousands of balls exact and fast.  The public
BallSet API stays the source of truth at the boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .groups import (
    Element,
    GroupDescriptor,
    ZERO,
    d_prefix,
    depth_of,
    element,
    element_to_json,
    group_to_json,
    nonnegative_part,
    pairing_phase,
    restrict,
    unit_exp,
    val_diff,
)
from .stepfn import (
    Ball,
    BallSet,
    CellGuardError,
    DEFAULT_CELL_GUARD,
    SIDE_FREQ,
    StepFunction,
    ball,
    ballset,
    ballset_intersect,
    ballset_measure,
    ballset_symmetric_difference_measure,
    ballset_to_json,
    ballset_union,
    indicator_of_ballset,
    refine_ball_to_scale,
    stepfn_to_json,
)
from .fourier import inverse_transform


# ---------------------------------------------------------------------------
# interval encoding of ball unions
#
# Window: digit positions lo_pos .. lo_pos + t_pos - 1 (both multiples of the
# dilation step r0), one slot per position, two for the quadratic extension
# (position-major, base component first).  Lower positions are more
# significant, so a ball is the contiguous block of integers sharing its
# center's prefix.  All sets handled here live inside the bounding ball and
# are unions of balls no finer than the window floor.

def _slots(g: GroupDescriptor) -> int:
    return 2 if g.kind == "qpquad" else 1


def _iv_from_ballset(s: BallSet, lo_pos: int, t_pos: int) -> list:
    g = s.group
    sl = _slots(g)
    span = sl * t_pos
    p = g.p
    out = []
    for b in s.balls:
        fixed = b.scale * g.r0 - lo_pos
        if fixed < 0 or fixed > t_pos:
            raise ValueError("ball does not fit the interval window")
        start = 0
        for pos, coeff in b.center.digits:
            j = pos - lo_pos
            if j < 0:
                raise ValueError("ball center below the interval window")
            if g.kind == "qpquad":
                a, bb = coeff
                start += a * p ** (span - 1 - 2 * j)
                start += bb * p ** (span - 1 - (2 * j + 1))
            else:
                start += coeff * p ** (span - 1 - j)
        out.append((start, start + p ** (span - sl * fixed)))
    return _iv_norm(out)


def _iv_norm(ivs: list) -> list:
    ivs = sorted(iv for iv in ivs if iv[0] < iv[1])
    out = []
    for a, b in ivs:
        if out and a <= out[-1][1]:
            if b > out[-1][1]:
                out[-1] = (out[-1][0], b)
        else:
            out.append((a, b))
    return out


def _iv_union(*lists) -> list:
    merged = []
    for lst in lists:
        merged.extend(lst)
    return _iv_norm(merged)


def _iv_intersect(xs: list, ys: list) -> list:
    out = []
    i = j = 0
    while i < len(xs) and j < len(ys):
        a = max(xs[i][0], ys[j][0])
        b = min(xs[i][1], ys[j][1])
        if a < b:
            out.append((a, b))
        if xs[i][1] <= ys[j][1]:
            i += 1
        else:
            j += 1
    return out


def _iv_subtract(xs: list, ys: list) -> list:
    out = []
    j = 0
    for a, b in xs:
        cur = a
        while j < len(ys) and ys[j][1] <= cur:
            j += 1
        k = j
        while k < len(ys) and ys[k][0] < b:
            if ys[k][0] > cur:
                out.append((cur, ys[k][0]))
            cur = max(cur, ys[k][1])
            k += 1
        if cur < b:
            out.append((cur, b))
    return out


def _iv_length(ivs: list) -> int:
    return sum(b - a for a, b in ivs)


def _iv_measure(g: GroupDescriptor, ivs: list, lo_pos: int, t_pos: int) -> Fraction:
    expo = _slots(g) * (t_pos + lo_pos)
    L = _iv_length(ivs)
    if expo >= 0:
        return Fraction(L, g.p ** expo)
    return Fraction(L * g.p ** (-expo))


def _iv_scale_down(g: GroupDescriptor, ivs: list, i: int) -> list:
    """Image under (A*)^(-i); valid when every endpoint is divisible by the
    contraction factor, which the window headroom guarantees."""
    D = g.p ** (_slots(g) * i * g.r0)
    return _iv_norm([(a // D, b // D) for a, b in ivs])


def _iv_shift(ivs: list, offset: int) -> list:
    return [(a + offset, b + offset) for a, b in ivs]


def _sigma_offset(g: GroupDescriptor, sigma: Element, lo_pos: int, t_pos: int) -> int:
    # encode sigma + H^perp and read off its start index; sigma's digits all
    # sit below 0, so adding the offset never carries on subsets of H^perp
    only = ballset(g, SIDE_FREQ, [ball(g, SIDE_FREQ, sigma, 0)])
    return _iv_from_ballset(only, lo_pos, t_pos)[0][0]


def _iv_to_balls(g: GroupDescriptor, side: str, ivs: list,
                 lo_pos: int, t_pos: int) -> BallSet:
    sl = _slots(g)
    span = sl * t_pos
    p = g.p
    step = sl * g.r0
    balls = []
    for a, b in ivs:
        cur = a
        while cur < b:
            if cur == 0:
                kv = span
            else:
                kv = 0
                t = cur
                while t % p == 0:
                    t //= p
                    kv += 1
            size = b - cur
            kl = 0
            while p ** (kl + 1) <= size:
                kl += 1
            k = min(kv, kl, span)
            k -= k % step
            scale = (t_pos - k // sl + lo_pos) // g.r0
            digits = {}
            prefix_slots = span - k
            rest = cur // p ** k
            for sidx in range(prefix_slots - 1, -1, -1):
                c = rest % p
                rest //= p
                if c:
                    pos = lo_pos + sidx // sl
                    if sl == 2:
                        cur_pair = digits.get(pos, (0, 0))
                        if sidx % 2 == 0:
                            digits[pos] = (c, cur_pair[1])
                        else:
                            digits[pos] = (cur_pair[0], c)
                    else:
                        digits[pos] = c
            balls.append(Ball(g, side, element(g, digits), scale))
            cur += p ** k
    return BallSet(g, side, tuple(sorted(balls, key=lambda x: (x.scale, x.center.digits))))


# ---------------------------------------------------------------------------
# wavelet systems

@dataclass(frozen=True)
class WaveletSystem:
    """Generators plus the frequency-side bookkeeping needed to index and
    verify the basis delta^n tau_s psi_i."""

    group: GroupDescriptor
    label: str
    sigmas: tuple
    generators: tuple
    spectra: tuple
    amplitudes: tuple
    omega: BallSet
    epsilon: Optional[Fraction] = None
    n_iters: Optional[int] = None
    dropped_measure: Optional[Fraction] = None

    def l2_error_bound(self) -> float:
        if not self.dropped_measure:
            return 0.0
        return float(self.dropped_measure) ** 0.5


def haar_shannon_system(g: GroupDescriptor,
                        cell_guard: int = DEFAULT_CELL_GUARD) -> WaveletSystem:
    """The M-1 generators whose transforms are indicators of the depth-1
    coset tiles of the frequency side."""
    sigmas = d_prefix(g, 1)
    generators = []
    spectra = []
    for sig in sigmas[1:]:
        tile = ball(g, SIDE_FREQ, sig, 0)
        generators.append(inverse_transform(indicator_of_ballset(
            ballset(g, SIDE_FREQ, [tile])), cell_guard=cell_guard))
        spectra.append(ballset(g, SIDE_FREQ, [tile]))
    omega = ballset(g, SIDE_FREQ, [b for s in spectra for b in s.balls])
    return WaveletSystem(g, "haar", tuple(sigmas), tuple(generators),
                         tuple(spectra), tuple(1.0 + 0j for _ in generators), omega)


def haar_closed_form(g: GroupDescriptor, i: int, s: Element) -> StepFunction:
    """tau_s psi_i directly: the character of sigma_i on the coset s + H,
    cells at scale 1."""
    sigmas = d_prefix(g, 1)
    if not 1 <= i < len(sigmas):
        raise ValueError(f"generator number {i} out of range 1..{len(sigmas) - 1}")
    sig = sigmas[i]
    from .groups import add, enumerate_window
    values = {}
    for pat in enumerate_window(g, 0, g.r0):
        center = restrict(add(g, s, pat), None, g.r0)
        values[center] = unit_exp(pairing_phase(g, center, sig))
    m = depth_of(g, s)
    return StepFunction(g, "time", m, 1, values)


# ---------------------------------------------------------------------------
# tiling-set construction

@dataclass(frozen=True)
class WaveletSetSpec:
    """Partition {V_sigma} of H^perp indexed by the nonzero depth-1 prefix
    elements, an iteration cap, and the truncation tolerance."""

    partition: tuple
    n_iter: int = 64
    epsilon: Fraction = Fraction(1, 2 ** 40)


def validate_partition(g: GroupDescriptor, partition) -> None:
    allowed = set(d_prefix(g, 1)[1:])
    hperp = ballset(g, SIDE_FREQ, [ball(g, SIDE_FREQ, ZERO, 0)])
    seen = set()
    union = BallSet(g, SIDE_FREQ, ())
    for sigma, vs in partition:
        if sigma not in allowed:
            raise ValueError(f"{sigma!r} is not a nonzero depth-1 prefix element")
        if sigma in seen:
            raise ValueError(f"duplicate partition label {sigma!r}")
        seen.add(sigma)
        if ballset_measure(ballset_intersect(union, vs)) != 0:
            raise ValueError("partition pieces overlap")
        union = ballset_union(union, vs)
    if ballset_symmetric_difference_measure(union, hperp) != 0:
        raise ValueError("partition pieces do not cover the unit tile")


@dataclass(frozen=True)
class WaveletSetResult:
    omega: BallSet
    lambdas: tuple
    epsilon: Fraction
    n_iters: int
    dropped_measure: Fraction
    i_max: int


def truncation_depth(g: GroupDescriptor, epsilon: Fraction) -> int:
    """Largest i with modulus**(-i) >= epsilon (at least 1)."""
    i = 1
    q = Fraction(1, g.modulus)
    cur = q
    while cur * q >= epsilon:
        cur *= q
        i += 1
    return i


def _max_scale(s: BallSet) -> int:
    return max((b.scale for b in s.balls), default=0)


def build_wavelet_set(g: GroupDescriptor, spec: WaveletSetSpec) -> WaveletSetResult:
    validate_partition(g, spec.partition)
    lo = -g.r0
    i_max = truncation_depth(g, spec.epsilon)
    omega = ballset(g, SIDE_FREQ, [ball(g, SIDE_FREQ, ZERO, 0)])
    lambdas = []
    dropped = Fraction(0)
    n_done = 0
    for _ in range(spec.n_iter):
        t_pos = (_max_scale(omega) + i_max + 2) * g.r0
        om = _iv_from_ballset(omega, lo, t_pos)
        shifted = [_iv_scale_down(g, om, i) for i in range(1, i_max + 1)]
        lam = _iv_intersect(om, _iv_union(*shifted))
        lam_measure = _iv_measure(g, lam, lo, t_pos)
        if lam_measure < spec.epsilon:
            break
        moved = []
        for sigma, vs in spec.partition:
            piece = _iv_intersect(lam, _iv_from_ballset(vs, lo, t_pos))
            if piece:
                moved.append(_iv_shift(piece, _sigma_offset(g, sigma, lo, t_pos)))
        om = _iv_union(_iv_subtract(om, lam), *moved)
        omega = _iv_to_balls(g, SIDE_FREQ, om, lo, t_pos)
        lambdas.append(_iv_to_balls(g, SIDE_FREQ, lam, lo, t_pos))
        n_done += 1
        last_measure = lam_measure
    if lambdas:
        dropped = last_measure / (g.modulus - 1)
    return WaveletSetResult(omega, tuple(lambdas), spec.epsilon, n_done, dropped, i_max)


def wavelet_set_system(g: GroupDescriptor, spec: WaveletSetSpec,
                       cell_guard: int = DEFAULT_CELL_GUARD,
                       materialize: bool = True) -> WaveletSystem:
    result = build_wavelet_set(g, spec)
    gen = None
    if materialize:
        try:
            gen = wavelet_from_set(result.omega, cell_guard)
        except CellGuardError:
            # deep truncations have no compactly supported representation of
            # tractable size; exact evaluation still works ball by ball
            gen = None
    sigmas = d_prefix(g, 1)
    return WaveletSystem(
        g, "waveletset", tuple(sigmas), (gen,), (result.omega,), (1.0 + 0j,),
        result.omega, result.epsilon, result.n_iters, result.dropped_measure)


def wavelet_from_set(omega: BallSet, cell_guard: int = DEFAULT_CELL_GUARD) -> StepFunction:
    """Inverse transform of the indicator of the frequency set."""
    return inverse_transform(indicator_of_ballset(omega, 1.0, cell_guard),
                             cell_guard=cell_guard)


def fixed_point_map(g: GroupDescriptor, omega: BallSet, partition,
                    i_max: int) -> BallSet:
    """One application of the defining self-similarity: rebuild the set from
    its own contracted copies and the piecewise shift."""
    lo = -g.r0
    t_pos = (_max_scale(omega) + i_max + 2) * g.r0
    om = _iv_from_ballset(omega, lo, t_pos)
    shifted = [_iv_scale_down(g, om, i) for i in range(1, i_max + 1)]
    union = _iv_union(*shifted)
    hperp = _iv_from_ballset(
        ballset(g, SIDE_FREQ, [ball(g, SIDE_FREQ, ZERO, 0)]), lo, t_pos)
    pieces = [_iv_subtract(hperp, union)]
    for sigma, vs in partition:
        part = _iv_intersect(union, _iv_from_ballset(vs, lo, t_pos))
        if part:
            pieces.append(_iv_shift(part, _sigma_offset(g, sigma, lo, t_pos)))
    return _iv_to_balls(g, SIDE_FREQ, _iv_union(*pieces), lo, t_pos)


# ---------------------------------------------------------------------------
# exact evaluation straight from the ball description

def wavelet_eval(g: GroupDescriptor, omega: BallSet, x: Element) -> complex:
    """psi(x) summed ball by ball; exact given the truncated set."""
    total = 0j
    vx = x.lowest_position()
    for b in omega.balls:
        if vx is not None and vx < -b.scale * g.r0:
            continue
        total += unit_exp(pairing_phase(g, x, b.center)) * float(Fraction(1, g.modulus) ** b.scale)
    return total


class TranslatedWaveletEvaluator:
    """Pointwise tau_s psi from the frequency set: per ball, the integral of
    (x, gamma) conj((s, eta(gamma))) is a character value times the ball
    measure, gated by the valuation of x - s."""

    def __init__(self, g: GroupDescriptor, omega: BallSet, s: Element):
        self.g = g
        self.s = s
        d = depth_of(g, s)
        balls = []
        for b in omega.balls:
            balls.extend(refine_ball_to_scale(b, max(b.scale, d)))
        self.terms = []
        for b in balls:
            eta = nonnegative_part(b.center)
            w = unit_exp(-pairing_phase(g, s, eta))
            self.terms.append((b.center, w * float(Fraction(1, g.modulus) ** b.scale),
                               -b.scale * g.r0))

    def __call__(self, x: Element) -> complex:
        g = self.g
        vd = val_diff(g, x, self.s)
        total = 0j
        for center, amp, floor in self.terms:
            if vd is not None and vd < floor:
                continue
            total += unit_exp(pairing_phase(g, x, center)) * amp
        return total


# ---------------------------------------------------------------------------
# worked configurations and their closed forms

EXAMPLE_IDS = ("qpwave", "qpextnwave", "fptwave", "qpwave3")


def example_group(example_id: str, p: Optional[int] = None,
                  r: Optional[int] = None) -> GroupDescriptor:
    if example_id == "qpwave":
        return GroupDescriptor("qp", p or 2, r0=r or 1)
    if example_id == "qpextnwave":
        return GroupDescriptor("qpquad", 3, r0=r or 1, u=2)
    if example_id == "fptwave":
        return GroupDescriptor("fpt", p or 3, r0=1)
    if example_id == "qpwave3":
        return GroupDescriptor("qp", 3, r0=1)
    raise ValueError(f"unknown example id {example_id!r}")


def _sigma_one(g: GroupDescriptor) -> Element:
    if g.kind == "qpquad":
        return element(g, {-g.r0: (1, 0)})
    return element(g, {-g.r0: 1})


def default_partition(g: GroupDescriptor):
    """Single piece: move all of H^perp by the first nonzero depth-1 shift."""
    full = ballset(g, SIDE_FREQ, [ball(g, SIDE_FREQ, ZERO, 0)])
    return ((_sigma_one(g), full),)


def example_partition(example_id: str, g: GroupDescriptor):
    full = ballset(g, SIDE_FREQ, [ball(g, SIDE_FREQ, ZERO, 0)])
    if example_id in ("qpwave", "qpextnwave", "fptwave"):
        return default_partition(g)
    if example_id == "qpwave3":
        v13 = ballset(g, SIDE_FREQ, [ball(g, SIDE_FREQ, ZERO, 1),
                                     ball(g, SIDE_FREQ, element(g, {0: 2}), 1)])
        v23 = ballset(g, SIDE_FREQ, [ball(g, SIDE_FREQ, element(g, {0: 1}), 1)])
        return ((element(g, {-1: 1}), v13), (element(g, {-1: 2}), v23))
    raise ValueError(f"unknown example id {example_id!r}")


def example_spec(example_id: str, g: GroupDescriptor,
                 epsilon: Fraction = Fraction(1, 2 ** 40),
                 n_iter: int = 200) -> WaveletSetSpec:
    return WaveletSetSpec(example_partition(example_id, g), n_iter, epsilon)


def _geometric_center(g: GroupDescriptor, n: int) -> Element:
    """1 + pi^r0 + ... + pi^((n-2) r0) as an element (zero when n <= 1)."""
    if g.kind == "qpquad":
        return element(g, {k * g.r0: (1, 0) for k in range(n - 1)})
    return element(g, {k * g.r0: 1 for k in range(n - 1)})


def _alternating_center(g: GroupDescriptor, n: int, start: int) -> Element:
    """start, 3-start, start, ... at positions 0..n-2 (the two overlap
    patterns of the three-adic example)."""
    return element(g, {k: start if k % 2 == 0 else 3 - start for k in range(n - 1)})


def example_lambda_ball(example_id: str, g: GroupDescriptor, n: int) -> Ball:
    """Closed-form description of the n-th moved piece."""
    if example_id in ("qpwave", "qpextnwave", "fptwave"):
        return ball(g, SIDE_FREQ, _geometric_center(g, n), n)
    if example_id == "qpwave3":
        start = 1 if n % 2 == 0 else 2
        return ball(g, SIDE_FREQ, _alternating_center(g, n, start), n)
    raise ValueError(f"unknown example id {example_id!r}")


def _pair_diff(g: GroupDescriptor, x: Element, s: Element, c: Element) -> complex:
    """(x - s, c) via bilinearity."""
    return unit_exp(pairing_phase(g, x, c) - pairing_phase(g, s, c))


def _tail_depth(g: GroupDescriptor, x: Element, s: Element) -> int:
    vd = val_diff(g, x, s)
    if vd is None or vd >= -g.r0:
        return 1
    return -(vd // g.r0) if vd % g.r0 == 0 else (-vd + g.r0 - 1) // g.r0


def example_closed_form(example_id: str, g: GroupDescriptor,
                        s: Element, x: Element) -> complex:
    """The explicit two- or four-term value of tau_s psi at x."""
    vd = val_diff(g, x, s)
    ind = 1.0 if vd is None or vd >= 0 else 0.0
    N = _tail_depth(g, x, s)
    M = g.modulus
    if example_id in ("qpwave", "qpextnwave"):
        fac = unit_exp(pairing_phase(g, x, _sigma_one(g))) - 1
        t1 = fac / M ** N * _pair_diff(g, x, s, _geometric_center(g, N))
        t2 = fac / (M ** N * (M - 1)) * _pair_diff(g, x, s, _geometric_center(g, N + 1))
        return ind + t1 + t2
    if example_id == "fptwave":
        p = g.p
        fac = unit_exp(pairing_phase(g, x, _sigma_one(g))) - 1
        bsum = 0
        for k in range(1, N + 1):
            bsum += ((x.digit_at(-k) or 0) - (s.digit_at(-k) or 0)) % p
        c = (bsum - (((x.digit_at(-N) or 0) - (s.digit_at(-N) or 0)) % p)) % p
        d = bsum % p
        bracket = (p - 1) * unit_exp(Fraction(c, p)) + unit_exp(Fraction(d, p))
        return ind + fac / (p ** N * (p - 1)) * bracket
    if example_id == "qpwave3":
        third = unit_exp(pairing_phase(g, x, element(g, {-1: 1}))) - 1
        two_third = unit_exp(pairing_phase(g, x, element(g, {-1: 2}))) - 1
        if N % 2 == 0:
            lead, other, a, b = two_third, third, 1, 2
        else:
            lead, other, a, b = third, two_third, 2, 1
        cN = _alternating_center(g, N, a)
        # appending digit 2 at position N-1 continues the alternation
        cN2 = _alternating_center(g, N + 1, a)
        cN1 = _alternating_center(g, N + 1, b)
        t1 = lead / 3 ** N * _pair_diff(g, x, s, cN)
        t2 = lead / (8 * 3 ** N) * _pair_diff(g, x, s, cN2)
        t3 = other / (8 * 3 ** (N - 1)) * _pair_diff(g, x, s, cN1)
        return ind + t1 + t2 + t3
    raise ValueError(f"unknown example id {example_id!r}")


# ---------------------------------------------------------------------------
# serialization

def system_to_json(system: WaveletSystem) -> dict:
    out = {
        "group": group_to_json(system.group),
        "label": system.label,
        "sigmas": [element_to_json(sig) for sig in system.sigmas],
        "omega": ballset_to_json(system.omega),
        "spectra": [ballset_to_json(sp) for sp in system.spectra],
        "generators": [stepfn_to_json(gen) if gen is not None else None
                       for gen in system.generators],
        "truncation": None,
    }
    if system.epsilon is not None:
        out["truncation"] = {
            "epsilon": str(system.epsilon),
            "dropped_measure": str(system.dropped_measure),
            "n_iters": system.n_iters,
            "l2_error_bound": system.l2_error_bound(),
        }
    return out
