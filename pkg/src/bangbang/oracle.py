"""Independent evidence for the synthesized sequences.

:func:`brute_force` searches bang-bang schedules with every duration free and
knows nothing about the closed forms. :func:`suboptimal_sequence` builds the
simple baseline whose interior On pulses are all pi in modified time.
"""
from dataclasses import dataclass
import math

import numpy as np
from scipy.optimize import minimize

from . import su2
from ._backend import kernels
from .errors import DomainError, InfeasibleError
from .params import ProblemParams
from .synthesis import (
    DurationSet,
    Regime,
    RegimeKind,
    SynthesisReport,
    TERMINAL_TOL,
    _guarded,
    classify,
    synthesize,
)

FEASIBILITY_TOL = 1e-6
PENALTY_WEIGHT = 1e3
DEFAULT_GRID = {0: 40, 1: 40, 2: 16}
DEFAULT_REFINE_ITERS = 600
DEFAULT_STARTS = 6
POLISH_ITERS = 6000
_CHUNK = 1 << 16


@dataclass
class SearchResult:
    """Best schedule found; durations are physical and alternate On/Off starting with On."""

    best_duration: float
    best_schedule: list
    residual: float
    evaluations: int
    n_off: int = 0

    @property
    def off_durations(self) -> list:
        return [seg.duration for seg in self.best_schedule if seg.level is su2.Level.OFF]


def _grid_axes(r, n_off, points):
    w = math.hypot(1.0, r)
    axes = []
    for j in range(2 * n_off + 1):
        period = 2.0 * math.pi / w if j % 2 == 0 else 2.0 * math.pi
        axes.append(np.linspace(period / points, period, points))
    return axes


def _grid_seeds(r, n_off, points, starts):
    """Indices of the ``starts`` best grid points under the penalised objective."""
    axes = _grid_axes(r, n_off, points)
    dims = len(axes)
    total = points ** dims
    best_val = np.empty(0)
    best_idx = np.empty(0, dtype=np.int64)
    for lo in range(0, total, _CHUNK):
        idx = np.arange(lo, min(lo + _CHUNK, total), dtype=np.int64)
        digits = np.unravel_index(idx, (points,) * dims)
        block = np.column_stack([axes[j][digits[j]] for j in range(dims)])
        z = kernels.schedule_z_batch(np.ascontiguousarray(block), 1.0, r)
        val = block.sum(axis=1) + PENALTY_WEIGHT * np.maximum(0.0, np.abs(z) - FEASIBILITY_TOL)
        best_val = np.concatenate([best_val, val])
        best_idx = np.concatenate([best_idx, idx])
        # Ties broken by grid index so the selection is deterministic.
        order = np.lexsort((best_idx, best_val))[:starts]
        best_val, best_idx = best_val[order], best_idx[order]
    digits = np.unravel_index(best_idx, (points,) * dims)
    seeds = np.column_stack([axes[j][digits[j]] for j in range(dims)])
    return seeds, total


def _closing(prefix, r):
    d, gap = kernels.closing_on_duration(np.ascontiguousarray(prefix, dtype=float), 1.0, r)
    return d, gap


def _reduced_objective(prefix, r):
    # Final On solved exactly, so every evaluated schedule is feasible when it exists.
    prefix = np.abs(prefix)
    d, gap = _closing(prefix, r)
    if math.isnan(d):
        return float(prefix.sum()) + PENALTY_WEIGHT * gap + 2.0 * math.pi
    return float(prefix.sum()) + d


def brute_force(
    r: float,
    n_off: int,
    coarse_grid: int = None,
    refine_iters: int = DEFAULT_REFINE_ITERS,
    starts: int = DEFAULT_STARTS,
    detuning: float = 1.0,
) -> SearchResult:
    """Minimum-duration schedule On [Off On]*n_off with all 2*n_off + 1 durations free.

    Stages: a coarse grid over every duration scored by total duration plus
    ``1e3 * max(0, |z| - 1e-6)``; Nelder-Mead on that penalised objective from
    the best grid points; then Nelder-Mead over the first ``2 * n_off``
    durations with the last On pulse set to the shortest one closing onto the
    equator.
    """
    if n_off not in (0, 1, 2):
        raise DomainError(f"brute force supports n_off in {{0, 1, 2}}, got {n_off}")
    if not r > 0.0:
        raise DomainError(f"ratio must be positive, got {r}")
    points = DEFAULT_GRID[n_off] if coarse_grid is None else int(coarse_grid)
    if points < 2:
        raise ValueError("coarse_grid must be at least 2")
    seeds, evaluations = _grid_seeds(r, n_off, points, starts)

    def penalised(x):
        return kernels.schedule_objective(np.ascontiguousarray(x, dtype=float), 1.0, r, FEASIBILITY_TOL, PENALTY_WEIGHT)

    candidates = []
    for seed in seeds:
        res = minimize(
            penalised, seed, method="Nelder-Mead",
            options=dict(maxiter=refine_iters, xatol=1e-10, fatol=1e-12, adaptive=True),
        )
        evaluations += res.nfev
        x = np.abs(res.x)
        if n_off == 0:
            d, _ = _closing(np.empty(0), r)
            schedule = np.array([d]) if not math.isnan(d) else x
        else:
            pol = minimize(
                _reduced_objective, x[:-1], args=(r,), method="Nelder-Mead",
                options=dict(maxiter=POLISH_ITERS, xatol=1e-12, fatol=1e-14, adaptive=True),
            )
            evaluations += pol.nfev
            prefix = np.abs(pol.x)
            d, _ = _closing(prefix, r)
            schedule = np.append(prefix, d) if not math.isnan(d) else x
        z = float(kernels.schedule_z_batch(np.ascontiguousarray(schedule[None, :]), 1.0, r)[0])
        candidates.append((float(schedule.sum()), abs(z), schedule))

    feasible = [c for c in candidates if c[1] <= FEASIBILITY_TOL]
    if not feasible:
        raise InfeasibleError(
            f"no schedule with {n_off} Off pulses reached |z| <= {FEASIBILITY_TOL} at r = {r}"
        )
    # min() keeps the first of equal totals, i.e. the best-ranked grid seed.
    total, residual, schedule = min(feasible, key=lambda c: c[0])
    params = ProblemParams.from_ratio(r, detuning)
    segs = []
    for j, d in enumerate(schedule):
        if j % 2 == 0:
            segs.append(su2.FieldSegment.on(float(d) / detuning, params))
        else:
            segs.append(su2.FieldSegment.off(float(d) / detuning))
    return SearchResult(total, segs, residual, int(evaluations), n_off)


def suboptimal_first_on(r: float) -> tuple:
    """``(n, s)`` of the baseline: number of Off pulses and first On duration (modified time)."""
    if not 0.0 < r < 1.0:
        raise DomainError(f"the suboptimal baseline needs 0 < r < 1, got {r}; use a single On pulse")
    alpha = 2.0 * math.atan(r)
    # alpha in [pi / (2(n+1)), pi / (2n)) is the same interval as r_max(n+1) <= r < r_max(n).
    n = classify(r, r_floor=0.0).n_off
    a, b = math.cos((n + 1) * alpha), math.cos(n * alpha)
    s = math.acos(_guarded((a + b) / (a - b), "suboptimal first-On cosine"))
    return n, s


def suboptimal_sequence(r: float, detuning: float = 1.0) -> SynthesisReport:
    """Baseline On(s) followed by n copies of [Off(pi / detuning), On(pi in modified time)]."""
    n, s = suboptimal_first_on(r)
    params = ProblemParams.from_ratio(r, detuning)
    w = params.on_frequency
    off = su2.FieldSegment.off(math.pi / detuning)
    segs = [su2.FieldSegment.on(s / w, params)]
    for _ in range(n):
        segs += [off, su2.FieldSegment.on(math.pi / w, params)]
    sequence = su2.build_sequence(segs)
    total = n * math.pi + (s + n * math.pi) / math.sqrt(r * r + 1.0)
    durations = DurationSet(n, s, math.pi, math.pi, math.pi, total)
    rotation = su2.sequence_rotation(sequence, params)
    final = su2.apply(rotation, su2.NORTH_POLE)
    if abs(final.z) > TERMINAL_TOL:
        raise DomainError(f"suboptimal sequence for r={r} ends at z={final.z}")
    return SynthesisReport(
        params, Regime(RegimeKind.SUBOPTIMAL, n), durations, sequence, rotation, final,
        diagnostics={"alpha": 2.0 * math.atan(r)},
    )


def suboptimal_duration(r: float) -> float:
    return suboptimal_sequence(r).durations.total


def deviation(r: float) -> float:
    """Percent excess duration of the baseline over the optimal sequence."""
    t_sub = suboptimal_duration(r)
    t_opt = synthesize(ProblemParams.from_ratio(r)).durations.total
    return 100.0 * (t_sub - t_opt) / t_opt
