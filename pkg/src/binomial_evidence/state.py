"""State variables of a binomial likelihood-ratio graph: S, V and b.

``S`` is the maximum log likelihood ratio, ``V`` the area under the
likelihood-ratio curve, and ``b`` the Van der Waals-style correction
subtracted from ``V`` for nested contrasts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import xlog1py, xlogy

from .core import (
    HCClass,
    HypothesisContrast,
    Observation,
    constrained_mle,
    log_likelihood,
    unconstrained_mle,
)
from .errors import InvalidClass
from .quadrature import DEFAULT_QUADRATURE, QuadratureConfig, integrate_exp

#: Numerator of the baseline term r2 * numerator / sqrt(MinFI(n)) as written.
LITERAL_B_NUMERATOR = math.sqrt(2.0 * math.pi)
#: Numerator that reproduces the published n = 50 values of E for II_b
#: (2.75 at x/n = 0.4, 2.78 at x/n = 0.5) and keeps two transition points.
CALIBRATED_B_NUMERATOR = math.log(4.0)



@dataclass(frozen=True)
class StateFunctions:
    S: float
    V: float
    b: float
    log_V: float
    min_fisher_info: float
    r1: float | None = None
    r2: float | None = None


def entropy_S(hc: HypothesisContrast, obs: Observation) -> float:
    """Maximum log likelihood ratio, log L(theta_hat) - log L(theta_hat_i)."""
    top = log_likelihood(unconstrained_mle(hc, obs), obs)
    return max(top - log_likelihood(constrained_mle(hc, obs), obs), 0.0)


def _breakpoints(obs: Observation, lo: float, hi: float) -> list[float]:
    r = obs.ratio()
    mode = min(max(r, lo), hi)
    scale = max(math.sqrt(r * (1.0 - r) / obs.n), 1.0 / obs.n)
    # geometric spacing away from the peak so no panel is much wider than
    # its distance to the mode; otherwise both rules miss a thin tail
    pts = [mode]
    step = scale
    while step < hi - lo:
        pts.extend((mode - step, mode + step))
        step *= 2.0
    return pts


def log_volume(
    hc: HypothesisContrast,
    obs: Observation,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
) -> float:
    """log V, safe for sample sizes where V itself overflows."""
    lo, hi = hc.domain()
    n, x = obs.n, obs.x

    def log_f(t):
        return xlogy(x, t) + xlog1py(n - x, -t)

    mode = min(max(obs.ratio(), lo), hi)
    peak = log_likelihood(mode, obs)
    area, _ = integrate_exp(log_f, lo, hi, shift=peak, breakpoints=_breakpoints(obs, lo, hi), cfg=cfg)
    return peak - log_likelihood(constrained_mle(hc, obs), obs) + math.log(area)


def volume_V(
    hc: HypothesisContrast,
    obs: Observation,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
) -> float:
    """Area under L(theta) / L(theta_hat_i) over [0, 1/2] (I_a) or [0, 1].

    Returns ``inf`` if the area exceeds the float range; use
    :func:`log_volume` in that regime.
    """
    lv = log_volume(hc, obs, cfg)
    return math.exp(lv) if lv < 709.0 else math.inf


def min_fisher_info(n: float) -> float:
    """Minimum over theta of n / (theta (1 - theta)), reached at theta = 1/2."""
    if not n > 0:
        raise ValueError(f"n must be positive, got {n!r}")
    return 4.0 * n


def rate_constants(hc: HypothesisContrast) -> tuple[float, float]:
    """(r1, r2) for a nested contrast of Theta2 width w.

    r1 = 2 - w sets the curvature of b over Theta2 and
    r2 = 2 r1 - (2 + w) / 2 its level at the Theta2 boundaries, so that
    r1 - r2 / 2 = (2 + w) / 4 stays within [1/2, 3/4].
    """
    if not hc.nested:
        raise InvalidClass(f"rate constants are defined for Class II only, got {hc.tag()}")
    w = hc.width()
    r1 = 2.0 - w
    return r1, 2.0 * r1 - 0.5 * (2.0 + w)


def _in_region_b(hc, obs, cfg, numerator):
    r1, r2 = rate_constants(hc)
    return r1 * volume_V(hc, obs, cfg) - r2 * numerator / math.sqrt(min_fisher_info(obs.n))


@lru_cache(maxsize=4096)
def _anchor_b(hc: HypothesisContrast, n: float, cfg: QuadratureConfig, numerator: float) -> float:
    # b(theta2_left) from the synthetic observation sitting on the boundary;
    # equals b(theta2_right) because the interval is symmetric.
    return _in_region_b(hc, Observation.from_ratio(n, hc.theta2_left), cfg, numerator)


def correction_b(
    hc: HypothesisContrast,
    obs: Observation,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
    numerator: float = CALIBRATED_B_NUMERATOR,
) -> float:
    """Van der Waals correction b; identically 0 for Class I.

    Inside Theta2 ``b = r1 V - r2 * numerator / sqrt(MinFI(n))``.  Outside it
    ``b`` falls linearly in x/n from its boundary value to 0 at x/n = 0 (left)
    or x/n = 1 (right).  The boundary value is the in-region formula applied
    to the observation ``x = n * theta2_j`` with the same ``n``, which keeps
    ``b`` continuous across the boundaries.
    """
    if not hc.nested:
        return 0.0
    r = obs.ratio()
    left, right = hc.theta2_left, hc.theta2_right
    if left <= r <= right:
        return _in_region_b(hc, obs, cfg, numerator)
    anchor = _anchor_b(hc, obs.n, cfg, numerator)
    if r < left:
        return anchor * r / left
    return anchor * (1.0 - r) / (1.0 - right)


def state_functions(
    hc: HypothesisContrast,
    obs: Observation,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
    numerator: float = CALIBRATED_B_NUMERATOR,
) -> StateFunctions:
    """S, V and b together, sharing one quadrature for V."""
    lv = log_volume(hc, obs, cfg)
    V = math.exp(lv) if lv < 709.0 else math.inf
    r1 = r2 = None
    b = 0.0
    if hc.nested:
        r1, r2 = rate_constants(hc)
        r = obs.ratio()
        if hc.theta2_left <= r <= hc.theta2_right:
            b = r1 * V - r2 * numerator / math.sqrt(min_fisher_info(obs.n))
        else:
            b = correction_b(hc, obs, cfg, numerator)
    return StateFunctions(
        S=entropy_S(hc, obs),
        V=V,
        b=b,
        log_V=lv,
        min_fisher_info=min_fisher_info(obs.n),
        r1=r1,
        r2=r2,
    )
