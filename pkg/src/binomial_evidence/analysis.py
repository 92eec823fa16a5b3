"""Transition points, favored hypothesis, iso-E inversion and grid sweeps."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

from .core import HALF, HCClass, HypothesisContrast, Observation
from .eos import (
    DEFAULT_MODEL,
    EvidenceModel,
    EvidenceResult,
    Favored,
    evidence_E,
    log_evidence,
)
from .errors import DegenerateMinimum, EvidenceError, NotBracketable
from .quadrature import DEFAULT_QUADRATURE, QuadratureConfig

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
TIE_TOL = 1e-9
SCAN_POINTS = 512
TRP_TOL = 1e-7


def golden_section_minimize(
    f: Callable[[float], float], a: float, b: float, tol: float = 1e-7
) -> tuple[float, float]:
    """Minimise a unimodal ``f`` on ``[a, b]``; returns ``(x, f(x))``.

    Stops once the bracket is narrower than ``tol``.
    """
    a, b = min(a, b), max(a, b)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    candidates = [(f(x), x), (fc, c), (fd, d)]
    fx, x = min(candidates)
    return float(x), float(fx)


@dataclass(frozen=True)
class TransitionPoint:
    ratio: float
    E: float


@dataclass(frozen=True)
class TransitionPoints:
    """Minimisers of x/n -> E at fixed n, sorted by ratio."""

    hc: HypothesisContrast
    n: float
    points: tuple[TransitionPoint, ...]

    @property
    def ratios(self) -> tuple[float, ...]:
        return tuple(p.ratio for p in self.points)

    def __len__(self):
        return len(self.points)


def _interior_minima(f, lo, hi, intervals, mirror_right=False):
    """Brackets around local minima of ``f`` on a uniform grid.

    With ``mirror_right`` the right endpoint is a symmetry centre, so a grid
    minimum sitting on it counts as interior and is returned as ``(hi, hi)``.
    """
    grid = [float(r) for r in np.linspace(lo, hi, intervals + 1)]
    vals = [f(r) for r in grid]
    brackets = []
    for i in range(1, intervals):
        if vals[i] < vals[i - 1] and vals[i] <= vals[i + 1]:
            brackets.append((grid[i - 1], grid[i + 1]))
    if mirror_right and vals[-1] < vals[-2]:
        brackets.append((hi, hi))
    return brackets


@lru_cache(maxsize=1024)
def find_trp(
    hc: HypothesisContrast,
    n: float,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
    model: EvidenceModel = DEFAULT_MODEL,
    scan_points: int = SCAN_POINTS,
    tol: float = TRP_TOL,
) -> TransitionPoints:
    """Locate the transition point(s) for contrast ``hc`` at sample size ``n``.

    A uniform scan of at least ``scan_points`` ratios brackets every local
    minimum of log E, and golden-section search refines each to ``tol``.
    I_a is scanned on [0, 1/2]; I_b on [0, 1/2] with 1/2 treated as a symmetry
    centre; Class II on both half-intervals independently.

    Raises:
        DegenerateMinimum: the scan did not find exactly one (Class I) or two
            (Class II) interior minima.
    """
    n = float(n)

    def f(r):
        return log_evidence(hc, Observation.from_ratio(n, r), cfg, model)

    if hc.nested:
        half = max(scan_points // 2, 2)
        brackets = _interior_minima(f, 0.0, HALF, half) + _interior_minima(f, HALF, 1.0, half)
        expected = 2
    else:
        brackets = _interior_minima(f, 0.0, HALF, scan_points, mirror_right=hc.hc_class is HCClass.I_B)
        expected = 1

    points = []
    for a, b in brackets:
        if a == b:
            points.append(TransitionPoint(a, math.exp(f(a))))
            continue
        r, log_e = golden_section_minimize(f, a, b, tol)
        points.append(TransitionPoint(r, math.exp(log_e)))
    if len(points) != expected:
        raise DegenerateMinimum(
            f"{hc.label()} at n={n:g}: expected {expected} transition point(s), "
            f"found {len(points)} at {[round(p.ratio, 6) for p in points]}",
            found=[p.ratio for p in points],
        )
    return TransitionPoints(hc, n, tuple(points))


def favored(
    hc: HypothesisContrast,
    obs: Observation,
    trp: TransitionPoints,
    tie_tol: float = TIE_TOL,
) -> Favored:
    """Which hypothesis the data favour, judged against the transition points."""
    r = obs.ratio()
    if hc.hc_class is HCClass.I_B:
        cuts = (HALF,)
    else:
        cuts = trp.ratios
    if min(abs(r - t) for t in cuts) < tie_tol:
        return Favored.BOUNDARY
    if not hc.nested:
        return Favored.H1 if r < cuts[0] else Favored.H2
    lo, hi = cuts[0], cuts[-1]
    return Favored.H2 if lo < r < hi else Favored.H1


def iso_sample_size(
    hc: HypothesisContrast,
    ratio: float,
    target_E: float,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
    model: EvidenceModel = DEFAULT_MODEL,
    n_bracket: tuple[float, float] = (1e-3, 1e6),
    rtol: float = 1e-8,
) -> float:
    """Sample size n at which E(hc, n, ratio * n) reaches ``target_E``.

    Doubles an upper bound from ``n_bracket[0]`` until E reaches the target,
    then bisects to relative width ``rtol``.  On the side of the transition
    point where E is not monotone in n this returns the smallest crossing
    found by the doubling.

    Raises:
        NotBracketable: E already exceeds the target at the lower bracket
            end, or never reaches it below the upper end.
    """
    if not target_E > 0:
        raise ValueError(f"target E must be positive, got {target_E!r}")
    goal = math.log(target_E)
    n_min, n_max = n_bracket

    def g(n):
        return log_evidence(hc, Observation.from_ratio(n, ratio), cfg, model) - goal

    lo = n_min
    if g(lo) >= 0:
        raise NotBracketable(
            f"E >= {target_E:g} already at n={n_min:g} for {hc.label()} at x/n={ratio:g}"
        )
    hi = max(2.0 * lo, 1.0)
    while g(hi) < 0:
        lo, hi = hi, 2.0 * hi
        if hi > n_max:
            raise NotBracketable(
                f"E stays below {target_E:g} up to n={n_max:g} for {hc.label()} at x/n={ratio:g}"
            )
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if g(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class ContourSpec:
    """An iso-E contour request: one target E over a grid of ratios."""

    target_E: float
    ratios: tuple[float, ...]
    n_bracket: tuple[float, float] = (1e-3, 1e6)
    tol: float = 1e-8

    def __post_init__(self):
        object.__setattr__(self, "ratios", tuple(float(r) for r in self.ratios))
        lo, hi = self.n_bracket
        if not (0 < lo < hi):
            raise ValueError(f"n bracket must satisfy 0 < lo < hi, got {self.n_bracket!r}")
        if not self.target_E > 0:
            raise ValueError(f"target E must be positive, got {self.target_E!r}")


@dataclass(frozen=True)
class ContourPoint:
    ratio: float
    n: float | None
    error: str = ""
    apex: bool = False


def _refine_apex(hc, spec, cfg, model, lo, hi):
    def neg_n(r):
        try:
            return -iso_sample_size(hc, r, spec.target_E, cfg, model, spec.n_bracket, rtol=1e-13)
        except NotBracketable:
            return math.inf

    r, neg = golden_section_minimize(neg_n, lo, hi, tol=1e-7)
    return r, -neg


def iso_contour(
    hc: HypothesisContrast,
    spec: ContourSpec,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
    model: EvidenceModel = DEFAULT_MODEL,
    refine_apex: bool = True,
) -> list[ContourPoint]:
    """Solve for n along a grid of ratios at fixed E.

    Unbracketable ratios are kept with ``n=None`` and the error text.  The
    largest n on the grid marks the apex; with ``refine_apex`` the apex is
    re-located by golden-section search between its grid neighbours and
    inserted as an extra point flagged ``apex=True``.
    """
    points = []
    for r in spec.ratios:
        try:
            n = iso_sample_size(hc, r, spec.target_E, cfg, model, spec.n_bracket, spec.tol)
            points.append(ContourPoint(r, n))
        except NotBracketable as exc:
            points.append(ContourPoint(r, None, str(exc)))
    solved = [i for i, p in enumerate(points) if p.n is not None]
    if not solved:
        return points
    k = max(solved, key=lambda i: points[i].n)
    if not refine_apex or len(points) < 3:
        points[k] = ContourPoint(points[k].ratio, points[k].n, apex=True)
        return points
    at_centre = hc.symmetric and abs(points[k].ratio - HALF) < 1e-12 and (k == 0 or k == len(points) - 1)
    if at_centre:
        points[k] = ContourPoint(points[k].ratio, points[k].n, apex=True)
        return points
    lo = points[max(k - 1, 0)].ratio
    hi = points[min(k + 1, len(points) - 1)].ratio
    r, n = _refine_apex(hc, spec, cfg, model, lo, hi)
    points.append(ContourPoint(r, n, apex=True))
    points.sort(key=lambda p: p.ratio)
    return points


@dataclass(frozen=True)
class SweepRow:
    n: float
    ratio: float
    result: EvidenceResult | None
    error: str = ""


def sweep_evidence(
    hc: HypothesisContrast,
    ns: Iterable[float],
    ratios: Sequence[float],
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
    model: EvidenceModel = DEFAULT_MODEL,
    classify: bool = True,
) -> list[SweepRow]:
    """Evaluate E over the grid ``ns x ratios`` (n-major order).

    Errors in one cell are recorded in its row and do not stop the sweep.
    """
    rows = []
    for n in ns:
        for r in ratios:
            try:
                res = evidence_E(hc, Observation.from_ratio(n, r), cfg, model, classify)
                rows.append(SweepRow(float(n), float(r), res))
            except EvidenceError as exc:
                rows.append(SweepRow(float(n), float(r), None, f"{type(exc).__name__}: {exc}"))
    return rows
