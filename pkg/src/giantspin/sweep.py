"""Parallel-field sweeps: exact and angle-model levels, level matchings, blocked regime.

Level matchings are detected on the exact spectrum. At resonance k the
metastable state m = +S meets m = -S + k; in the sorted spectrum of their
(m + S) mod 2 sector these two dressed levels are identified by counting the
other diabatic levels A m - D m^2 lying below the pair's mean energy. For even
k both states share a sector and the gap is a true anticrossing; for odd k
they do not and the levels cross.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import analytics
from .angle_model import assemble, inverse_mass_poly, potential, _solve_levels
from .core import (
    GiantSpinError,
    ModelDomainError,
    NumericalError,
    ParameterError,
    SpinParams,
    UnsupportedConfigurationError,
    zeeman_energy,
)
from .giant_spin import build_giant_spin, sector_blocks
from .linalg import eigvalsh, tridiagonal_eigenvalue

DEFAULT_MATCHING_TOL = 0.5
DEFAULT_SWEEP_POINTS = 241
DEFAULT_SWEEP_FACTOR = 1.2
RESONANCE_WINDOW = 0.3
BLOCKED_RTOL = 1e-12


@dataclass(frozen=True)
class Matching:
    lower: int
    upper: int
    gap: float


@dataclass(frozen=True)
class SweepRecord:
    H_par: float
    levels_exact: tuple[float, ...]
    levels_angle: tuple[float, ...] | None
    matchings: tuple[Matching, ...]
    blocked: bool
    min_inverse_mass: float


@dataclass(frozen=True)
class ResonanceMatch:
    k: int
    seed: float
    H_min_gap: float | None
    gap: float | None

    @property
    def found(self) -> bool:
        return self.H_min_gap is not None

    @property
    def offset(self) -> float | None:
        return None if self.H_min_gap is None else abs(self.H_min_gap - self.seed)


def blocked_state(params: SpinParams) -> tuple[float, bool]:
    """(min over phi of I(phi), blocked) with a relative zero tolerance."""
    poly = inverse_mass_poly(params)
    low = poly.minimum()
    scale = abs(poly.c0) + abs(poly.c1) + abs(poly.c2)
    return low, low <= BLOCKED_RTOL * scale


def default_field_grid(
    params: SpinParams, points: int = DEFAULT_SWEEP_POINTS, factor: float = DEFAULT_SWEEP_FACTOR
) -> np.ndarray:
    """0 to factor * cutoff field, uniform."""
    return np.linspace(0.0, factor * analytics.field_cutoff(params), points)


def _annotate(exc: GiantSpinError, H: float) -> GiantSpinError:
    for cls in (ModelDomainError, ParameterError, UnsupportedConfigurationError, NumericalError):
        if isinstance(exc, cls):
            return cls(f"at H_par={H:g} T: {exc}")
    return GiantSpinError(f"at H_par={H:g} T: {exc}")


def _record(args) -> SweepRecord:
    params, H, include_angle, n_levels, matching_tol, kmax = args
    p = params.with_field(H)
    try:
        gs = build_giant_spin(p)
        levels = eigvalsh(gs.matrix, min(n_levels, gs.dim))
        angle = None
        if include_angle:
            ham = assemble(p, kmax)
            angle = tuple(lv.energy for lv in _solve_levels(ham, n_levels, vectors=False))
    except GiantSpinError as exc:
        raise _annotate(exc, H) from exc
    gaps = np.diff(levels)
    matchings = tuple(
        Matching(i, i + 1, float(g)) for i, g in enumerate(gaps) if g < matching_tol
    )
    low, blocked = blocked_state(p)
    return SweepRecord(float(H), tuple(float(x) for x in levels), angle, matchings, blocked, low)


def sweep_field(
    params: SpinParams,
    H_values: Sequence[float],
    include_angle: bool = False,
    n_levels: int = 10,
    matching_tol: float = DEFAULT_MATCHING_TOL,
    kmax: int | None = None,
    workers: int = 1,
) -> list[SweepRecord]:
    """One record per field value, in input order.

    ``workers > 1`` evaluates field points in separate processes; output order
    and values are unaffected.
    """
    H_values = [float(h) for h in H_values]
    if any(not math.isfinite(h) or h < 0 for h in H_values):
        raise ParameterError("field values must be finite and non-negative")
    if not matching_tol > 0:
        raise ParameterError("matching_tol must be positive")
    if n_levels < 1:
        raise ParameterError("n_levels must be positive")
    if include_angle:
        params.require_angle_domain()
    jobs = [(params, h, include_angle, n_levels, matching_tol, kmax) for h in H_values]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_record, jobs))
    return [_record(job) for job in jobs]


def diabatic_energy(params: SpinParams, m: float) -> float:
    return zeeman_energy(params) * m - params.D * m * m


def resonance_gap(params: SpinParams, k: int, H: float) -> float:
    """Gap between the dressed m = +S and m = -S + k levels at field H.

    Signed for crossings (odd k): the result is |difference|, so it touches zero
    at the crossing; for even k it is the anticrossing gap.
    """
    p = params.with_field(H)
    S = p.S
    m1, m2 = S, -S + k
    mid = 0.5 * (diabatic_energy(p, m1) + diabatic_energy(p, m2))
    sectors = sector_blocks(p)

    def locate(m_target: float) -> tuple[int, int]:
        r = int(round(m_target + S)) % 2
        _, ms = sectors[r]
        below = sum(
            1 for m in ms if m not in (m1, m2) and diabatic_energy(p, m) < mid
        )
        return r, below

    r1, i1 = locate(m1)
    r2, i2 = locate(m2)
    if r1 == r2:
        block = sectors[r1][0]
        return tridiagonal_eigenvalue(block, i1 + 1) - tridiagonal_eigenvalue(block, i1)
    return abs(tridiagonal_eigenvalue(sectors[r1][0], i1) - tridiagonal_eigenvalue(sectors[r2][0], i2))


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_min(f, lo: float, hi: float, xtol: float = 1e-9, max_iter: int = 200):
    """Bounded golden-section search; returns (x, f(x))."""
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= xtol:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    x = c if fc <= fd else d
    return x, min(fc, fd)


def locate_matchings(
    params: SpinParams, k_max_resonance: int, window: float = RESONANCE_WINDOW, xtol: float = 1e-9
) -> list[ResonanceMatch]:
    """Minimum-gap fields for k = 0 ... k_max_resonance, seeded at k * H0.

    k = 0 is the zero-field ground doublet. Brackets are +-window around the
    seed and are clipped below the cutoff field; a minimum on the bracket edge
    (or an empty bracket) is reported as not found.
    """
    if k_max_resonance < 1:
        raise ParameterError("k_max_resonance must be >= 1")
    H0 = analytics.resonance_increment(params)
    cutoff = analytics.field_cutoff(params)
    base = params.with_field(0.0)
    out = [ResonanceMatch(0, 0.0, 0.0, resonance_gap(base, 0, 0.0))]
    for k in range(1, k_max_resonance + 1):
        seed = k * H0
        if k > 2 * params.S - 1:
            out.append(ResonanceMatch(k, seed, None, None))
            continue
        lo, hi = (1 - window) * seed, min((1 + window) * seed, cutoff)
        if lo >= hi:
            out.append(ResonanceMatch(k, seed, None, None))
            continue
        x, gap = golden_section_min(lambda h: resonance_gap(base, k, h), lo, hi, xtol)
        edge = 10 * xtol
        if x - lo <= edge or hi - x <= edge:
            out.append(ResonanceMatch(k, seed, None, None))
        else:
            out.append(ResonanceMatch(k, seed, x, gap))
    return out


def single_minimum_check(params: SpinParams) -> bool:
    """True iff V(phi) has exactly one local minimum on the circle, at phi = 0.

    Uses V = f(cos phi) with f(x) = -a x^2 - b x + const: phi = 0 is a minimum
    iff f'(1) < 0, phi = pi iff f'(-1) > 0, and an interior stationary point of
    f gives a pair of minima iff f is convex there. A vanishing f'(-1) at the
    merge field is a degenerate inflection and does not count as a minimum.
    """
    ss = params.spin_square
    a = (params.D - params.E) * ss
    b = math.sqrt(ss) * zeeman_energy(params)
    tol = 1e-12 * (abs(a) + abs(b))

    def classify_end(slope: float) -> bool:
        if abs(slope) <= tol:
            return a < 0  # f'' = -2a
        return slope > 0

    at_zero = classify_end(2 * a + b)  # -f'(1)
    at_pi = classify_end(2 * a - b)  # f'(-1)
    interior = 0
    if a != 0:
        x = -b / (2 * a)
        if -1 < x < 1 and abs(abs(x) - 1) > 1e-12 and a < 0:
            interior = 2
    return at_zero and not at_pi and interior == 0


def minima_offset_from_potential(params: SpinParams) -> float:
    """V(pi) - V(0) evaluated directly through the potential."""
    return float(potential(math.pi, params) - potential(0.0, params))
