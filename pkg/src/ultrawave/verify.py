"""Verification harness: Gram matrices of basis slices, energy capture for
expansions of test functions, and closed-form spot checks.

Inner products of basis functions delta^n tau_s psi_i are computed on the
frequency side, where each basis function is an explicit step function on a
scaled copy of the generator's spectrum.  Intersections of scaled spectra are
exact ball unions; each piece, refined until both character factors are
constant, contributes a product of two table lookups times its measure.  No
transforms or large matrices are involved, so windows that would be far out
of reach cell by cell stay cheap.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional

from .groups import (
    Element,
    GroupDescriptor,
    apply_A,
    depth_of,
    element,
    element_to_json,
    enumerate_window,
    group_to_json,
    nonnegative_part,
    pairing_phase,
    restrict,
    unit_exp,
)
from .stepfn import (
    DEFAULT_CELL_GUARD,
    SIDE_FREQ,
    SIDE_TIME,
    StepFunction,
    ball,
    ballset,
    ballset_scale,
    ballset_symmetric_difference_measure,
    linear_combine,
    norm_sq,
    refine_ball_to_scale,
)
from .fourier import transform
from .operators import cosets_of_depth
from .wavelets import (
    TranslatedWaveletEvaluator,
    WaveletSystem,
    _iv_from_ballset,
    _iv_intersect,
    _iv_to_balls,
    build_wavelet_set,
    example_closed_form,
    example_group,
    example_spec,
    fixed_point_map,
    truncation_depth,
)


# ---------------------------------------------------------------------------
# basis bookkeeping shared by the Gram and expansion paths

def _character_table(g: GroupDescriptor, s: Element, depth: int) -> dict:
    """eta -> conj((s, eta)) over the depth-digit prefix window."""
    return {eta: unit_exp(-pairing_phase(g, s, eta))
            for eta in enumerate_window(g, 0, depth * g.r0)}


class _BasisSlice:
    """All indices (n, s, i) for n in [nmin, nmax], coset reps of the given
    depth, and every generator, with scaled spectra pre-encoded as integer
    intervals over a common window."""

    def __init__(self, system: WaveletSystem, nmin: int, nmax: int, depth: int,
                 extra_lo: int = 0, extra_hi: int = 0):
        if nmin > nmax:
            raise ValueError("empty dilation range")
        g = system.group
        self.system = system
        self.g = g
        self.nmin, self.nmax, self.depth = nmin, nmax, depth
        self.cosets = cosets_of_depth(g, depth)
        self.coset_depths = [depth_of(g, s) for s in self.cosets]
        self.tables = [_character_table(g, s, d)
                       for s, d in zip(self.cosets, self.coset_depths)]
        self.indices = [(n, si, gi)
                        for n in range(nmin, nmax + 1)
                        for si in range(len(self.cosets))
                        for gi in range(len(system.spectra))]
        max_sc = max(b.scale for sp in system.spectra for b in sp.balls)
        self.lo = min(-(1 + max(0, nmax)) * g.r0, extra_lo)
        hi_scale = max(max_sc + max(0, -nmin), extra_hi) + depth + 2
        self.t_pos = hi_scale * g.r0 - self.lo
        self.scaled = {}
        for gi, sp in enumerate(system.spectra):
            for n in range(nmin, nmax + 1):
                self.scaled[(gi, n)] = _iv_from_ballset(
                    ballset_scale(sp, n), self.lo, self.t_pos)

    def key_of(self, center: Element, n: int, si: int, wrong_order: bool) -> Element:
        d = self.coset_depths[si]
        if wrong_order:
            return restrict(nonnegative_part(center), 0, d * self.g.r0)
        return restrict(nonnegative_part(apply_A(self.g, center, -n)), 0, d * self.g.r0)


@dataclass
class GramReport:
    config: dict
    matrix_size: int
    max_diag_err: float
    max_offdiag_abs: float
    runtime_ms: float
    tol: float
    passed: bool
    entries: Optional[list] = None

    def to_json(self) -> dict:
        out = {
            "config": self.config,
            "matrix_size": self.matrix_size,
            "max_diag_err": self.max_diag_err,
            "max_offdiag_abs": self.max_offdiag_abs,
            "runtime_ms": self.runtime_ms,
            "tol": self.tol,
            "passed": self.passed,
        }
        if self.entries is not None:
            out["entries"] = [
                {"a": list(a), "b": list(b), "re": v.real, "im": v.imag}
                for a, b, v in self.entries]
        return out


def gram_matrix(system: WaveletSystem, nmin: int, nmax: int, depth: int,
                wrong_order: bool = False, keep_entries: bool = False,
                tol: float = 1e-8) -> GramReport:
    """Hermitian Gram matrix of the basis slice; reports the worst deviation
    from the identity."""
    start = time.perf_counter()
    g = system.group
    sl = _BasisSlice(system, nmin, nmax, depth)
    M = g.modulus
    amps = system.amplitudes
    size = len(sl.indices)
    max_diag = 0.0
    max_off = 0.0
    entries = [] if keep_entries else None
    for a in range(size):
        n1, s1, g1 = sl.indices[a]
        d1 = sl.coset_depths[s1]
        t1 = sl.tables[s1]
        iv1 = sl.scaled[(g1, n1)]
        for b in range(a, size):
            n2, s2, g2 = sl.indices[b]
            common = _iv_intersect(iv1, sl.scaled[(g2, n2)])
            if not common:
                val = 0j
            else:
                d2 = sl.coset_depths[s2]
                t2 = sl.tables[s2]
                if wrong_order:
                    rho = max(d1, d2)
                else:
                    rho = max(d1 - n1, d2 - n2)
                acc = 0j
                for piece in _iv_to_balls(g, SIDE_FREQ, common, sl.lo, sl.t_pos).balls:
                    for cell in refine_ball_to_scale(piece, max(piece.scale, rho)):
                        ka = sl.key_of(cell.center, n1, s1, wrong_order)
                        kb = sl.key_of(cell.center, n2, s2, wrong_order)
                        acc += t1[ka] * t2[kb].conjugate() * float(Fraction(1, M) ** cell.scale)
                val = (float(M) ** (-(n1 + n2) / 2) * amps[g1]
                       * amps[g2].conjugate() * acc)
            if a == b:
                max_diag = max(max_diag, abs(val - 1))
            else:
                max_off = max(max_off, abs(val))
            if keep_entries and (a == b or abs(val) > 1e-14):
                entries.append((sl.indices[a], sl.indices[b], val))
    runtime = (time.perf_counter() - start) * 1000
    config = {
        "group": group_to_json(g),
        "label": system.label,
        "nmin": nmin, "nmax": nmax, "depth": depth,
        "wrong_order": wrong_order,
    }
    if system.dropped_measure is not None:
        config["dropped_measure"] = float(system.dropped_measure)
    passed = max(max_diag, max_off) < tol
    return GramReport(config, size, max_diag, max_off, runtime, tol, passed, entries)


def scaled_generator_system(system: WaveletSystem, factor: float) -> WaveletSystem:
    """Corrupt the first generator by a scalar; any honest Gram check must
    flag the diagonal."""
    amps = list(system.amplitudes)
    amps[0] = amps[0] * factor
    gens = list(system.generators)
    if gens[0] is not None:
        gens[0] = linear_combine([factor], [gens[0]])
    return replace(system, amplitudes=tuple(amps), generators=tuple(gens))


# ---------------------------------------------------------------------------
# expansion energy capture

@dataclass
class ParsevalReport:
    config: dict
    total_energy: float
    captured_energy: float
    fraction: float
    by_depth: list
    runtime_ms: float
    coeffs: Optional[list] = None

    def to_json(self) -> dict:
        out = {
            "config": self.config,
            "total_energy": self.total_energy,
            "captured_energy": self.captured_energy,
            "fraction": self.fraction,
            "by_depth": self.by_depth,
            "runtime_ms": self.runtime_ms,
        }
        if self.coeffs is not None:
            out["coeffs"] = [{"index": list(ix), "re": c.real, "im": c.imag}
                             for ix, c in self.coeffs]
        return out


def parseval_capture(system: WaveletSystem, f: StepFunction,
                     nmin: int, nmax: int, depth: int,
                     keep_coeffs: bool = False,
                     cell_guard: int = DEFAULT_CELL_GUARD) -> ParsevalReport:
    """Expansion coefficients <f, delta^n tau_s psi_i> over the index slice,
    computed against the transform of f on the frequency side."""
    start = time.perf_counter()
    g = system.group
    if f.side != SIDE_TIME:
        raise ValueError("expected a time-side function")
    F = transform(f, cell_guard=cell_guard)
    sl = _BasisSlice(system, nmin, nmax, depth,
                     extra_lo=-F.m * g.r0, extra_hi=F.r + 1)
    M = g.modulus
    cell_ivs = []
    for center, v in F.values.items():
        cb = ballset(g, SIDE_FREQ, [ball(g, SIDE_FREQ, center, F.r)])
        cell_ivs.append((_iv_from_ballset(cb, sl.lo, sl.t_pos), v))
    total = norm_sq(f)
    captured = 0.0
    by_depth: dict = {}
    coeffs = [] if keep_coeffs else None
    for n, si, gi in sl.indices:
        d = sl.coset_depths[si]
        table = sl.tables[si]
        iv_b = sl.scaled[(gi, n)]
        acc = 0j
        for iv_cell, v in cell_ivs:
            common = _iv_intersect(iv_cell, iv_b)
            if not common:
                continue
            rho = max(d - n, F.r)
            for piece in _iv_to_balls(g, SIDE_FREQ, common, sl.lo, sl.t_pos).balls:
                for cell in refine_ball_to_scale(piece, max(piece.scale, rho)):
                    ka = sl.key_of(cell.center, n, si, False)
                    acc += v * table[ka].conjugate() * float(Fraction(1, M) ** cell.scale)
        coeff = float(M) ** (-n / 2) * system.amplitudes[gi].conjugate() * acc
        if coeff != 0:
            captured += abs(coeff) ** 2
            by_depth[depth_of(g, sl.cosets[si])] = (
                by_depth.get(depth_of(g, sl.cosets[si]), 0.0) + abs(coeff) ** 2)
        if keep_coeffs:
            coeffs.append(((n, si, gi), coeff))
    runtime = (time.perf_counter() - start) * 1000
    config = {
        "group": group_to_json(g),
        "label": system.label,
        "nmin": nmin, "nmax": nmax, "depth": depth,
    }
    fraction = captured / total if total else 0.0
    by_depth_rows = [{"coset_depth": k, "energy": v}
                     for k, v in sorted(by_depth.items())]
    return ParsevalReport(config, total, captured, fraction, by_depth_rows,
                          runtime, coeffs)


# ---------------------------------------------------------------------------
# closed-form comparison and self-similarity residual

@dataclass
class CompareReport:
    config: dict
    n_samples: int
    max_abs_diff: float
    runtime_ms: float
    rows: Optional[list] = None

    def to_json(self) -> dict:
        out = {
            "config": self.config,
            "n_samples": self.n_samples,
            "max_abs_diff": self.max_abs_diff,
            "runtime_ms": self.runtime_ms,
        }
        if self.rows is not None:
            out["rows"] = [{"s": element_to_json(s), "x": element_to_json(x),
                            "abs_diff": d} for s, x, d in self.rows]
        return out


def _sample_points(g: GroupDescriptor, rng, count: int, lo_mult: int = 3,
                   hi_mult: int = 2) -> list:
    out = []
    for _ in range(count):
        digs = {}
        for pos in range(-lo_mult * g.r0, hi_mult * g.r0):
            if rng.random() < 0.6:
                if g.kind == "qpquad":
                    digs[pos] = (rng.randrange(g.p), rng.randrange(g.p))
                else:
                    digs[pos] = rng.randrange(g.p)
        out.append(element(g, digs))
    return out


def compare_example(example_id: str, p: Optional[int] = None,
                    r: Optional[int] = None, n_samples: int = 64,
                    seed: int = 0, epsilon: Fraction = Fraction(1, 2 ** 40),
                    keep_rows: bool = False) -> CompareReport:
    """Translated-wavelet values from the constructed set versus the explicit
    closed form, on a deterministic sample of translates and points."""
    import random
    start = time.perf_counter()
    g = example_group(example_id, p=p, r=r)
    result = build_wavelet_set(g, example_spec(example_id, g, epsilon))
    rng = random.Random(seed)
    translates = cosets_of_depth(g, 2)
    max_diff = 0.0
    rows = [] if keep_rows else None
    done = 0
    evaluators = {}
    while done < n_samples:
        s = translates[done % len(translates)]
        if s not in evaluators:
            evaluators[s] = TranslatedWaveletEvaluator(g, result.omega, s)
        x = _sample_points(g, rng, 1)[0]
        diff = abs(evaluators[s](x) - example_closed_form(example_id, g, s, x))
        max_diff = max(max_diff, diff)
        if keep_rows:
            rows.append((s, x, diff))
        done += 1
    runtime = (time.perf_counter() - start) * 1000
    config = {
        "example": example_id,
        "group": group_to_json(g),
        "epsilon": str(epsilon),
        "n_iters": result.n_iters,
        "dropped_measure": float(result.dropped_measure),
        "seed": seed,
    }
    return CompareReport(config, n_samples, max_diff, runtime, rows)


def fixed_point_residual(g: GroupDescriptor, omega, partition,
                         epsilon: Fraction) -> Fraction:
    """Measure of the symmetric difference between the set and one
    application of its defining self-similarity, truncated at epsilon."""
    i_max = truncation_depth(g, epsilon)
    phi = fixed_point_map(g, omega, partition, i_max)
    return ballset_symmetric_difference_measure(omega, phi)
