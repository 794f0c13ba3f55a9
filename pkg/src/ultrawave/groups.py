"""Exact arithmetic on totally disconnected local fields, viewed as additive
groups with a distinguished compact open subgroup.

Three families are supported, all self-dual (the annihilator of the subgroup
is the subgroup itself):

* ``qp``     -- p-adic numbers, subgroup = p-adic integers.
* ``fpt``    -- formal Laurent series over F_p, subgroup = power series ring.
* ``qpquad`` -- unramified quadratic extension Q_p(sqrt(u)) for odd p and a
  quadratic nonresidue u, subgroup = its ring of integers.

Elements are finite digit expansions  sum_n c_n * pi^n  where pi is the
uniformizer (p, t, or p) and the digits c_n live in [0, p-1] (pairs of such
for ``qpquad``).  All structural operations (addition, multiplication,
characters, pairings) are exact: character values are produced from an exact
rational phase that is reduced mod 1 before exponentiation.

Everything in this module is an immutable value; concurrent use needs no
locking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Union

Coeff = Union[int, tuple]  # int for qp/fpt, (a, b) pair for qpquad

KINDS = ("qp", "fpt", "qpquad")

TWO_PI = 2.0 * math.pi


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class GroupDescriptor:
    """Configuration of one group: family, prime, dilation block size r0.

    The dilation operator A is multiplication by pi**(-r0); its modulus is
    M = q**r0 where q is the residue field size (p, or p**2 for qpquad).
    """

    kind: str
    p: int
    r0: int = 1
    u: Optional[int] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}, expected one of {KINDS}")
        if not _is_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if self.r0 < 1:
            raise ValueError("r0 must be >= 1")
        if self.kind == "qpquad":
            if self.p == 2:
                raise ValueError("qpquad requires an odd prime")
            if self.u is None or not 1 <= self.u <= self.p - 1:
                raise ValueError("qpquad requires a nonresidue u in [1, p-1]")
            if pow(self.u, (self.p - 1) // 2, self.p) != self.p - 1:
                raise ValueError(f"u={self.u} is a quadratic residue mod {self.p}")
        elif self.u is not None:
            raise ValueError("u is only meaningful for kind qpquad")

    @property
    def residue_size(self) -> int:
        """Size q of the digit alphabet at one position."""
        return self.p * self.p if self.kind == "qpquad" else self.p

    @property
    def modulus(self) -> int:
        """M = q**r0, the index [A H : H] of the dilated subgroup."""
        return self.residue_size ** self.r0


@dataclass(frozen=True)
class Element:
    """A finite digit expansion, stored as a sorted tuple of (position, digit).

    Zero digits are never stored, so equality and hashing see canonical form.
    The element denotes the exact value  sum_n c_n * pi^n.
    """

    digits: tuple = ()

    def is_zero(self) -> bool:
        return not self.digits

    def positions(self) -> tuple:
        return tuple(n for n, _ in self.digits)

    def lowest_position(self) -> Optional[int]:
        return self.digits[0][0] if self.digits else None

    def highest_position(self) -> Optional[int]:
        return self.digits[-1][0] if self.digits else None

    def digit_at(self, n: int):
        for pos, c in self.digits:
            if pos == n:
                return c
        return None

    def __repr__(self):
        if not self.digits:
            return "Element(0)"
        body = " + ".join(f"{c}*pi^{n}" for n, c in self.digits)
        return f"Element({body})"


ZERO = Element()


def _coeff_is_zero(c: Coeff) -> bool:
    return c == 0 or c == (0, 0)


def _canonical(digits: Iterable) -> Element:
    kept = tuple(sorted((n, c) for n, c in digits if not _coeff_is_zero(c)))
    return Element(kept)


def element(g: GroupDescriptor, digits: dict) -> Element:
    """Build an element from {position: digit}, validating digit ranges."""
    p = g.p
    for n, c in digits.items():
        if not isinstance(n, int):
            raise ValueError(f"digit position {n!r} is not an integer")
        if g.kind == "qpquad":
            if not (isinstance(c, tuple) and len(c) == 2):
                raise ValueError("qpquad digits must be (a, b) pairs")
            a, b = c
            if not (0 <= a < p and 0 <= b < p):
                raise ValueError(f"digit {c} out of range for p={p}")
        else:
            if not isinstance(c, int) or not 0 <= c < p:
                raise ValueError(f"digit {c!r} out of range for p={p}")
    if g.kind == "qpquad":
        digits = {n: tuple(c) for n, c in digits.items()}
    return _canonical(digits.items())


def restrict(x: Element, lo: Optional[int], hi: Optional[int]) -> Element:
    """Keep only digits at positions n with lo <= n < hi (None = unbounded)."""
    return Element(tuple(
        (n, c) for n, c in x.digits
        if (lo is None or n >= lo) and (hi is None or n < hi)
    ))


def negative_part(x: Element) -> Element:
    return restrict(x, None, 0)


def nonnegative_part(x: Element) -> Element:
    return restrict(x, 0, None)


def shift_positions(x: Element, k: int) -> Element:
    return Element(tuple((n + k, c) for n, c in x.digits))


# ---------------------------------------------------------------------------
# exact value semantics

def frac_p(q: Fraction, p: int) -> Fraction:
    """Fractional part of a rational with p-power denominator: the unique
    representative in [0, 1) congruent to q modulo the p-adic integers."""
    num, den = q.numerator, q.denominator
    d = den
    while d % p == 0:
        d //= p
    if d != 1:
        raise ValueError(f"denominator {den} is not a power of {p}")
    return Fraction(num % den, den)


def _fraction_valuation(q: Fraction, p: int) -> Optional[int]:
    if q == 0:
        return None
    num, den = q.numerator, q.denominator
    v = 0
    while den % p == 0:
        den //= p
        v -= 1
    if v == 0:
        while num % p == 0:
            num //= p
            v += 1
    return v


def to_fraction(g: GroupDescriptor, x: Element) -> Fraction:
    """Exact rational value of a qp element."""
    if g.kind != "qp":
        raise ValueError("to_fraction applies to kind qp only")
    return _digits_to_fraction(x.digits, g.p)


def _digits_to_fraction(digits, p: int) -> Fraction:
    if not digits:
        return Fraction(0)
    lo = digits[0][0]
    total = 0
    for n, c in digits:
        total += c * p ** (n - lo)
    return Fraction(total * p ** lo) if lo >= 0 else Fraction(total, p ** (-lo))


def to_fraction_pair(g: GroupDescriptor, x: Element) -> tuple:
    """Exact rational component values (a, b) of a qpquad element a + b*sqrt(u)."""
    if g.kind != "qpquad":
        raise ValueError("to_fraction_pair applies to kind qpquad only")
    pa = tuple((n, c[0]) for n, c in x.digits if c[0])
    pb = tuple((n, c[1]) for n, c in x.digits if c[1])
    return _digits_to_fraction(pa, g.p), _digits_to_fraction(pb, g.p)


def _fraction_to_digits(v: Fraction, p: int) -> dict:
    if v < 0:
        raise ValueError("negative rationals have no finite expansion")
    if v == 0:
        return {}
    den = v.denominator
    k = 0
    while den % p == 0:
        den //= p
        k += 1
    if den != 1:
        raise ValueError(f"denominator of {v} is not a power of {p}")
    m = v.numerator
    digits = {}
    pos = -k
    while m:
        m, c = divmod(m, p)
        if c:
            digits[pos] = c
        pos += 1
    return digits


def from_fraction(g: GroupDescriptor, v) -> Element:
    if g.kind != "qp":
        raise ValueError("from_fraction applies to kind qp only")
    return _canonical(_fraction_to_digits(Fraction(v), g.p).items())


def from_fraction_pair(g: GroupDescriptor, va, vb) -> Element:
    if g.kind != "qpquad":
        raise ValueError("from_fraction_pair applies to kind qpquad only")
    da = _fraction_to_digits(Fraction(va), g.p)
    db = _fraction_to_digits(Fraction(vb), g.p)
    merged = {n: (da.get(n, 0), db.get(n, 0)) for n in set(da) | set(db)}
    return _canonical(merged.items())


# ---------------------------------------------------------------------------
# group operations

def add(g: GroupDescriptor, a: Element, b: Element) -> Element:
    """Exact sum; carries propagate upward for qp/qpquad, positionwise mod p
    for fpt.  Finite expansions are closed under addition."""
    if a.is_zero():
        return b
    if b.is_zero():
        return a
    if g.kind == "fpt":
        out = dict(a.digits)
        for n, c in b.digits:
            out[n] = (out.get(n, 0) + c) % g.p
        return _canonical(out.items())
    # digit supports that do not collide cannot carry
    if not set(a.positions()) & set(b.positions()):
        return _canonical(a.digits + b.digits)
    if g.kind == "qp":
        return from_fraction(g, to_fraction(g, a) + to_fraction(g, b))
    aa, ab = to_fraction_pair(g, a)
    ba, bb = to_fraction_pair(g, b)
    return from_fraction_pair(g, aa + ba, ab + bb)


def _negate_component_digits(digits: dict, p: int, window: int) -> dict:
    """Digit expansion of minus a nonnegative value, truncated at `window`."""
    if not digits:
        return {}
    lo = min(digits)
    m = 0
    for n, c in digits.items():
        m += c * p ** (n - lo)
    span = window - lo + 1
    if span <= 0:
        return {}
    rep = (-m) % p ** span
    out = {}
    pos = lo
    while rep:
        rep, c = divmod(rep, p)
        if c:
            out[pos] = c
        pos += 1
    return out


def negate(g: GroupDescriptor, a: Element, window: Optional[int] = None) -> Element:
    """Additive inverse.  Exact for fpt.  For qp/qpquad the true inverse has
    an infinite expansion, so digits are produced only up to position
    `window` (default: 8 places past the highest digit); callers that need
    differences should prefer pairing bilinearity or `val_diff`, which are
    exact."""
    if g.kind == "fpt":
        return Element(tuple((n, g.p - c) for n, c in a.digits))
    if a.is_zero():
        return ZERO
    if window is None:
        window = (a.highest_position() or 0) + 8
    if g.kind == "qp":
        comp = _negate_component_digits(dict(a.digits), g.p, window)
        return _canonical(comp.items())
    da = {n: c[0] for n, c in a.digits if c[0]}
    db = {n: c[1] for n, c in a.digits if c[1]}
    na = _negate_component_digits(da, g.p, window)
    nb = _negate_component_digits(db, g.p, window)
    merged = {n: (na.get(n, 0), nb.get(n, 0)) for n in set(na) | set(nb)}
    return _canonical(merged.items())


def mul(g: GroupDescriptor, a: Element, b: Element) -> Element:
    """Exact product of finite expansions (again a finite expansion)."""
    if a.is_zero() or b.is_zero():
        return ZERO
    if g.kind == "qp":
        return from_fraction(g, to_fraction(g, a) * to_fraction(g, b))
    if g.kind == "fpt":
        out = {}
        for n, c in a.digits:
            for m, d in b.digits:
                k = n + m
                out[k] = (out.get(k, 0) + c * d) % g.p
        return _canonical(out.items())
    aa, ab = to_fraction_pair(g, a)
    ba, bb = to_fraction_pair(g, b)
    return from_fraction_pair(g, aa * ba + g.u * ab * bb, aa * bb + ab * ba)


def apply_A(g: GroupDescriptor, x: Element, n: int = 1) -> Element:
    """Apply the dilation A**n, i.e. multiply by pi**(-n*r0)."""
    return shift_positions(x, -n * g.r0)


def valuation(g: GroupDescriptor, x: Element) -> Optional[int]:
    """Lowest digit position (None for zero).  x lies in pi^k * O iff
    valuation >= k."""
    return x.lowest_position()


def val_diff(g: GroupDescriptor, a: Element, b: Element) -> Optional[int]:
    """Valuation of a - b, computed exactly without materializing a - b."""
    if g.kind == "fpt":
        da, db = dict(a.digits), dict(b.digits)
        diff = [n for n in set(da) | set(db) if da.get(n, 0) != db.get(n, 0)]
        return min(diff) if diff else None
    if g.kind == "qp":
        return _fraction_valuation(to_fraction(g, a) - to_fraction(g, b), g.p)
    aa, ab = to_fraction_pair(g, a)
    ba, bb = to_fraction_pair(g, b)
    va = _fraction_valuation(aa - ba, g.p)
    vb = _fraction_valuation(ab - bb, g.p)
    if va is None:
        return vb
    if vb is None:
        return va
    return min(va, vb)


# ---------------------------------------------------------------------------
# characters and pairings

_EXACT_PHASES = {(0, 1): 1.0 + 0.0j, (1, 2): -1.0 + 0.0j,
                 (1, 4): 1.0j, (3, 4): -1.0j}


def unit_exp(phase: Fraction) -> complex:
    """exp(2*pi*i*phase) with quarter-turn phases returned exactly."""
    phase = phase % 1
    exact = _EXACT_PHASES.get((phase.numerator, phase.denominator))
    if exact is not None:
        return exact
    t = TWO_PI * (phase.numerator / phase.denominator)
    return complex(math.cos(t), math.sin(t))


def character_phase(g: GroupDescriptor, x: Element) -> Fraction:
    """Exact phase in [0, 1) of the standard character at x."""
    if g.kind == "qp":
        return frac_p(to_fraction(g, x), g.p)
    if g.kind == "fpt":
        c = x.digit_at(-1) or 0
        return Fraction(c, g.p)
    a, _ = to_fraction_pair(g, x)  # character of the trace 2a
    return frac_p(2 * a, g.p)


def character(g: GroupDescriptor, x: Element) -> complex:
    """The standard unitary character: trivial on the subgroup, nontrivial on
    pi^(-1) * O."""
    return unit_exp(character_phase(g, x))


def pairing_phase(g: GroupDescriptor, x: Element, gamma: Element) -> Fraction:
    """Exact phase of the duality pairing (x, gamma) = character(x * gamma)."""
    if g.kind == "qp":
        return frac_p(to_fraction(g, x) * to_fraction(g, gamma), g.p)
    if g.kind == "fpt":
        gd = dict(gamma.digits)
        total = 0
        for n, c in x.digits:
            d = gd.get(-1 - n)
            if d is not None:
                total += c * d
        return Fraction(total % g.p, g.p)
    xa, xb = to_fraction_pair(g, x)
    ga, gb = to_fraction_pair(g, gamma)
    return frac_p(2 * (xa * ga + g.u * xb * gb), g.p)


def pairing(g: GroupDescriptor, x: Element, gamma: Element) -> complex:
    return unit_exp(pairing_phase(g, x, gamma))


# ---------------------------------------------------------------------------
# digit-window enumeration and the standard transversal

def window_size(g: GroupDescriptor, length: int) -> int:
    """Number of elements whose digits live in a window of `length` positions."""
    return g.residue_size ** length


def element_of_index(g: GroupDescriptor, idx: int, lo: int, length: int) -> Element:
    """Inverse of index_of_element.  Digit at position lo+i is base-p digit i
    of the index, so higher positions are more significant; for qpquad the
    a-component digits are more significant than all b-component digits."""
    p = g.p
    if g.kind == "qpquad":
        half = p ** length
        j1, j2 = divmod(idx, half)
        digits = {}
        for i in range(length):
            a = (j1 // p ** i) % p
            b = (j2 // p ** i) % p
            if a or b:
                digits[lo + i] = (a, b)
        return _canonical(digits.items())
    digits = {}
    for i in range(length):
        c = (idx // p ** i) % p
        if c:
            digits[lo + i] = c
    return _canonical(digits.items())


def index_of_element(g: GroupDescriptor, x: Element, lo: int, length: int) -> int:
    p = g.p
    if g.kind == "qpquad":
        j1 = j2 = 0
        for n, (a, b) in x.digits:
            if not lo <= n < lo + length:
                raise ValueError(f"digit at position {n} outside window")
            j1 += a * p ** (n - lo)
            j2 += b * p ** (n - lo)
        return j1 * p ** length + j2
    j = 0
    for n, c in x.digits:
        if not lo <= n < lo + length:
            raise ValueError(f"digit at position {n} outside window")
        j += c * p ** (n - lo)
    return j


def enumerate_window(g: GroupDescriptor, lo: int, length: int) -> Iterator[Element]:
    for idx in range(window_size(g, length)):
        yield element_of_index(g, idx, lo, length)


def d_prefix(g: GroupDescriptor, depth: int) -> list:
    """The standard transversal elements with digits confined to positions
    [-depth*r0, -1]: exactly modulus**depth coset representatives for the
    dual group modulo the annihilator, listed in digit-lexicographic order
    (position -1 most significant), starting with zero."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    return list(enumerate_window(g, -depth * g.r0, depth * g.r0))


def theta_eta(g: GroupDescriptor, gamma: Element) -> tuple:
    """Split gamma = theta + eta with theta the negative-position truncation
    (a standard transversal representative) and eta in the annihilator.
    Exact for every kind: negative and nonnegative positions never interact."""
    return negative_part(gamma), nonnegative_part(gamma)


def depth_of(g: GroupDescriptor, x: Element) -> int:
    """Least d >= 0 with all digits of x at positions >= -d*r0."""
    lo = x.lowest_position()
    if lo is None or lo >= 0:
        return 0
    return (-lo + g.r0 - 1) // g.r0


# ---------------------------------------------------------------------------
# serialization

def element_to_json(x: Element) -> dict:
    positions = [n for n, _ in x.digits]
    coeffs = [list(c) if isinstance(c, tuple) else c for _, c in x.digits]
    return {"positions": positions, "coeffs": coeffs}


def element_from_json(g: GroupDescriptor, obj: dict) -> Element:
    try:
        positions = obj["positions"]
        coeffs = obj["coeffs"]
    except (TypeError, KeyError) as exc:
        raise ValueError(f"element JSON needs positions/coeffs: {exc}") from exc
    if len(positions) != len(coeffs):
        raise ValueError("element JSON: positions and coeffs differ in length")
    digits = {}
    for n, c in zip(positions, coeffs):
        digits[n] = tuple(c) if isinstance(c, list) else c
    return element(g, digits)


def group_to_json(g: GroupDescriptor) -> dict:
    return {"kind": g.kind, "p": g.p, "u": g.u, "r0": g.r0}


def group_from_json(obj: dict) -> GroupDescriptor:
    try:
        return GroupDescriptor(kind=obj["kind"], p=obj["p"],
                               r0=obj.get("r0", 1), u=obj.get("u"))
    except (TypeError, KeyError) as exc:
        raise ValueError(f"group JSON needs kind/p/r0: {exc}") from exc
