"""Equations of state: evidence E from S, V, b and the constants c1, c2.

Class I uses the ideal-gas form ``E = (exp(S) / V**c2) ** (1/c1)``; Class II
the Van der Waals form with ``V - b`` in place of ``V``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .core import HypothesisContrast, Observation
from .errors import DegenerateMinimum, NonPositiveDenominator
from .quadrature import DEFAULT_QUADRATURE, QuadratureConfig
from .state import CALIBRATED_B_NUMERATOR, StateFunctions, state_functions


class Favored(str, enum.Enum):
    H1 = "H1"
    H2 = "H2"
    BOUNDARY = "boundary"


@dataclass(frozen=True)
class EvidenceModel:
    """Knobs of the equation of state.

    The defaults are the calibrated model.  ``c1`` overrides the
    degrees-of-freedom constant, ``apply_correction=False`` forces b = 0, and
    ``b_numerator`` sets the constant in b's baseline term.  The overrides
    exist for negative controls and sensitivity checks.
    """

    c1: float | None = None
    c2: float = 1.0
    apply_correction: bool = True
    b_numerator: float = CALIBRATED_B_NUMERATOR

    def __post_init__(self):
        if self.c1 is not None and not self.c1 > 0:
            raise ValueError(f"c1 must be positive, got {self.c1!r}")
        if not self.c2 > 0:
            raise ValueError(f"c2 must be positive, got {self.c2!r}")
        if not self.b_numerator >= 0:
            raise ValueError(f"b_numerator must be non-negative, got {self.b_numerator!r}")


DEFAULT_MODEL = EvidenceModel()


def dof_c1(hc: HypothesisContrast) -> float:
    """Degrees-of-freedom constant c1.

    Starts from 1 and adds the summed interval lengths (nested contrasts) or
    their difference (non-nested contrasts): 1.5, 1.0, 2.0 and 2 + w for
    I_a, I_b, II_a and II_b.
    """
    lo1, hi1 = hc.interval(1)
    lo2, hi2 = hc.interval(2)
    len1, len2 = hi1 - lo1, hi2 - lo2
    if hc.nested:
        return 1.0 + len1 + len2
    return 1.0 + (len1 - len2)


@dataclass(frozen=True)
class EvidenceResult:
    """One evaluation of the equation of state.

    ``log_V`` carries V when V itself overflows (very large n far from 1/2).
    """

    E: float
    S: float
    V: float
    b: float
    c1: float
    c2: float
    hc: HypothesisContrast
    obs: Observation
    log_V: float
    favored: Favored | None = None
    trp: tuple[float, ...] = field(default=())
    note: str = ""

    @property
    def log_E(self) -> float:
        return math.log(self.E)

    def recompute(self) -> float:
        """E rebuilt from the stored S, V, b, c1, c2."""
        return math.exp((self.S - self.c2 * _log_denominator(self.log_V, self.b)) / self.c1)


def _log_denominator(log_V: float, b: float) -> float:
    q = b * math.exp(-log_V) if log_V < 709.0 else 0.0
    if q >= 1.0:
        raise NonPositiveDenominator(f"V - b <= 0 (V = exp({log_V:.6g}), b = {b:.6g})")
    return log_V + math.log1p(-q)


def _evaluate(hc, obs, cfg, model) -> tuple[float, StateFunctions, float]:
    sf = state_functions(hc, obs, cfg, model.b_numerator)
    b = sf.b if model.apply_correction else 0.0
    if b != sf.b:
        sf = StateFunctions(sf.S, sf.V, b, sf.log_V, sf.min_fisher_info, sf.r1, sf.r2)
    c1 = dof_c1(hc) if model.c1 is None else model.c1
    log_e = (sf.S - model.c2 * _log_denominator(sf.log_V, b)) / c1
    return log_e, sf, c1


def log_evidence(
    hc: HypothesisContrast,
    obs: Observation,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
    model: EvidenceModel = DEFAULT_MODEL,
) -> float:
    """log E without the transition-point classification (cheap path)."""
    return _evaluate(hc, obs, cfg, model)[0]


def evidence_value(
    hc: HypothesisContrast,
    obs: Observation,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
    model: EvidenceModel = DEFAULT_MODEL,
) -> float:
    return math.exp(log_evidence(hc, obs, cfg, model))


def evidence_E(
    hc: HypothesisContrast,
    obs: Observation,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
    model: EvidenceModel = DEFAULT_MODEL,
    classify: bool = True,
) -> EvidenceResult:
    """Evaluate the equation of state for one observation.

    With ``classify=True`` the favored hypothesis is filled in from the
    transition points at this ``n`` (computed once per ``(hc, n)`` and
    cached).

    Raises:
        NonConvergence: from the V quadrature.
        NonPositiveDenominator: V - b <= 0.

    When the transition points at this ``n`` do not have the expected
    structure (Class II at very small n, where both minima merge at 1/2),
    E is still returned with ``favored=None`` and the reason in ``note``.
    """
    log_e, sf, c1 = _evaluate(hc, obs, cfg, model)
    favored = None
    points: tuple[float, ...] = ()
    note = ""
    if classify:
        from .analysis import favored as classify_favored, find_trp

        try:
            trp = find_trp(hc, obs.n, cfg, model)
        except DegenerateMinimum as exc:
            note = f"unclassified: {exc}"
        else:
            favored = classify_favored(hc, obs, trp)
            points = trp.ratios
    return EvidenceResult(
        E=math.exp(log_e),
        S=sf.S,
        V=sf.V,
        b=sf.b,
        c1=c1,
        c2=model.c2,
        hc=hc,
        obs=obs,
        log_V=sf.log_V,
        favored=favored,
        trp=points,
        note=note,
    )
