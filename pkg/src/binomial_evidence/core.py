"""Binomial likelihood primitives, constrained maxima and KL divergences.

Observations are continuous: ``n`` and ``x`` may be any reals with
``0 <= x <= n`` and ``n > 0``.  The binomial coefficient is left out of the
likelihood everywhere because it cancels from every likelihood ratio.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from scipy.special import rel_entr, xlogy

HALF = 0.5


class HCClass(str, enum.Enum):
    """The four hypothesis-contrast classes.

    Class I is non-nested, class II nested; (a) is composite vs simple and
    (b) composite vs composite.
    """

    I_A = "1a"
    I_B = "1b"
    II_A = "2a"
    II_B = "2b"

    @property
    def nested(self) -> bool:
        return self in (HCClass.II_A, HCClass.II_B)

    @classmethod
    def parse(cls, tag: str) -> "HCClass":
        key = tag.strip().lower().replace("_", "").replace("class", "")
        aliases = {"ia": "1a", "ib": "1b", "iia": "2a", "iib": "2b"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown hypothesis-contrast class {tag!r}") from None


@dataclass(frozen=True)
class Observation:
    """``x`` heads out of ``n`` tosses, both treated as continuous."""

    n: float
    x: float

    def __post_init__(self):
        n, x = float(self.n), float(self.x)
        if not (n > 0 and math.isfinite(n)):
            raise ValueError(f"n must be a positive finite real, got {self.n!r}")
        if not (0.0 <= x <= n):
            raise ValueError(f"x must lie in [0, n], got x={self.x!r} with n={self.n!r}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "x", x)

    @classmethod
    def from_ratio(cls, n: float, ratio: float) -> "Observation":
        if not (0.0 <= ratio <= 1.0):
            raise ValueError(f"ratio must lie in [0, 1], got {ratio!r}")
        # keep x inside [0, n] despite rounding in n * ratio
        return cls(n, min(n * ratio, float(n)))

    def ratio(self) -> float:
        return min(max(self.x / self.n, 0.0), 1.0)

    def mirrored(self) -> "Observation":
        """The observation with heads and tails swapped."""
        return Observation(self.n, self.n - self.x)


@dataclass(frozen=True)
class HypothesisContrast:
    """H1: theta in Theta1 versus H2: theta in Theta2.

    Only the symmetric, 1/2-focused contrasts are representable:

    ======  ================  =================
    class   Theta1            Theta2
    ======  ================  =================
    I_a     [0, 1/2]          {1/2}
    I_b     [0, 1/2]          (1/2, 1]
    II_a    [0, 1]            {1/2}
    II_b    [0, 1]            [l, r], l + r = 1
    ======  ================  =================

    Use the classmethod constructors rather than building instances directly.
    """

    hc_class: HCClass
    theta2_left: float = HALF
    theta2_right: float = HALF

    def __post_init__(self):
        cls = HCClass(self.hc_class)
        object.__setattr__(self, "hc_class", cls)
        left, right = float(self.theta2_left), float(self.theta2_right)
        if cls is HCClass.II_B:
            if not (0.0 < left < HALF < right < 1.0):
                raise ValueError(f"II_b needs 0 < left < 1/2 < right < 1, got [{left}, {right}]")
            if abs(left + right - 1.0) > 1e-12:
                raise ValueError(f"II_b interval must be symmetric about 1/2, got [{left}, {right}]")
            # snap to exact symmetry so mirrored observations give identical results
            right = 1.0 - left
        elif cls is HCClass.I_B:
            left, right = HALF, 1.0
        else:
            left = right = HALF
        object.__setattr__(self, "theta2_left", left)
        object.__setattr__(self, "theta2_right", right)

    @classmethod
    def one_a(cls) -> "HypothesisContrast":
        return cls(HCClass.I_A)

    @classmethod
    def one_b(cls) -> "HypothesisContrast":
        return cls(HCClass.I_B)

    @classmethod
    def two_a(cls) -> "HypothesisContrast":
        return cls(HCClass.II_A)

    @classmethod
    def two_b(cls, left: float, right: float | None = None) -> "HypothesisContrast":
        if right is None:
            right = 1.0 - left
        return cls(HCClass.II_B, left, right)

    @classmethod
    def two_b_width(cls, width: float) -> "HypothesisContrast":
        return cls.two_b(HALF - width / 2.0, HALF + width / 2.0)

    @property
    def nested(self) -> bool:
        return self.hc_class.nested

    @property
    def symmetric(self) -> bool:
        """True when E(n, x) = E(n, n - x) by construction."""
        return self.hc_class is not HCClass.I_A

    def width(self) -> float:
        return self.theta2_right - self.theta2_left

    def interval(self, side: int) -> tuple[float, float]:
        """Closed hull of Theta_side (I_b's half-open Theta2 is closed here)."""
        if side == 1:
            return (0.0, HALF) if self.hc_class in (HCClass.I_A, HCClass.I_B) else (0.0, 1.0)
        if side == 2:
            return self.theta2_left, self.theta2_right
        raise ValueError(f"side must be 1 or 2, got {side!r}")

    def domain(self) -> tuple[float, float]:
        """Theta1 union Theta2; also the integration range for V."""
        return (0.0, HALF) if self.hc_class is HCClass.I_A else (0.0, 1.0)

    def tag(self) -> str:
        return self.hc_class.value

    def label(self) -> str:
        if self.hc_class is HCClass.II_B:
            return f"2b[{self.theta2_left:g},{self.theta2_right:g}]"
        return self.hc_class.value


def _clamp(value: float, lo: float, hi: float) -> float:
    return min(max(value, lo), hi)


def log_likelihood(theta: float, obs: Observation) -> float:
    """x log(theta) + (n - x) log(1 - theta), with 0 log 0 = 0."""
    if not (0.0 <= theta <= 1.0):
        raise ValueError(f"theta must lie in [0, 1], got {theta!r}")
    return float(xlogy(obs.x, theta) + xlogy(obs.n - obs.x, 1.0 - theta))


def denominator_side(hc: HypothesisContrast, obs: Observation) -> int:
    """Which hypothesis sits in the denominator of the likelihood ratio.

    Always H2, except for I_b where the hypothesis the data disagree with is
    used: H2 for x/n <= 1/2 and H1 for x/n > 1/2.
    """
    if hc.hc_class is HCClass.I_B and obs.ratio() > HALF:
        return 1
    return 2


def constrained_mle(hc: HypothesisContrast, obs: Observation, side: int | None = None) -> float:
    """Maximiser of L(theta) restricted to Theta_side.

    With ``side=None`` the denominator rule of :func:`denominator_side` picks
    the side.  Because L is unimodal with mode x/n, the restricted maximiser
    is x/n clamped into the interval.
    """
    if side is None:
        side = denominator_side(hc, obs)
    lo, hi = hc.interval(side)
    return _clamp(obs.ratio(), lo, hi)


def unconstrained_mle(hc: HypothesisContrast, obs: Observation) -> float:
    """Maximiser of L(theta) over Theta1 union Theta2."""
    lo, hi = hc.domain()
    return _clamp(obs.ratio(), lo, hi)


def kld(theta1: float, theta2: float, n: float) -> float:
    """KL divergence between Binomial(n, theta1) and Binomial(n, theta2).

    Closed form ``n*[t1 log(t1/t2) + (1-t1) log((1-t1)/(1-t2))]``; ``+inf``
    when theta2 puts zero mass where theta1 does not.
    """
    for t in (theta1, theta2):
        if not (0.0 <= t <= 1.0):
            raise ValueError(f"theta must lie in [0, 1], got {t!r}")
    per_toss = float(rel_entr(theta1, theta2) + rel_entr(1.0 - theta1, 1.0 - theta2))
    return n * max(per_toss, 0.0)


def kld_obs(obs: Observation, theta_hat_i: float) -> float:
    """Observed KL divergence, i.e. the log of the maximum likelihood ratio.

    Evaluated as the likelihood difference at x/n and at ``theta_hat_i``.
    """
    return log_likelihood(obs.ratio(), obs) - log_likelihood(theta_hat_i, obs)
