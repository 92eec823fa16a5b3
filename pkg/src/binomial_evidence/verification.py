"""Independent oracles, identity checks, negative controls and the BBP suite.

Every check returns a :class:`VerificationReport` rather than raising, so a
full run always yields a complete picture.  ``deviation`` holds the check's
figure of merit.  For tolerance checks it is the worst observed error.  For
ordering and monotonicity checks it is the worst margin, so a negative value
flags the violation.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .analysis import ContourSpec, find_trp, iso_contour
from .core import (
    HALF,
    HCClass,
    HypothesisContrast,
    Observation,
    constrained_mle,
    kld,
    log_likelihood,
)
from .eos import DEFAULT_MODEL, EvidenceModel, evidence_value, log_evidence
from .errors import EvidenceError, OutOfRange
from .quadrature import DEFAULT_QUADRATURE, QuadratureConfig
from .state import correction_b, entropy_S, log_volume

ORACLE_MAX_N = 60

STANDARD_HCS = (
    HypothesisContrast.one_a(),
    HypothesisContrast.one_b(),
    HypothesisContrast.two_a(),
    HypothesisContrast.two_b(0.4, 0.6),
)

BBP_I_NS = (5, 10, 20, 50, 100, 200)
BBP_II_NS = (25, 50, 100, 200, 400)
BBP_IV_NS = (10, 20, 40, 80, 160)
BBP_IV_RATIOS = (0.05, 0.1, 0.25, 0.35, 0.45)
BBP_IV_STEP = 5.0
TRP_REFERENCE_N = 50.0


@dataclass
class VerificationReport:
    name: str
    passed: bool
    deviation: float
    grid: str
    details: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: deviation={self.deviation:.3g} ({self.grid})"


# ---------------------------------------------------------------- oracles


def _exact_beta_integral(n: int, x: int, upper: Fraction) -> Fraction:
    """Integral of t^x (1-t)^(n-x) over [0, upper] as an exact rational.

    Uses B(x+1, n-x+1) = x!(n-x)!/(n+1)! and, for upper = 1/2, the finite
    binomial sum for the regularized incomplete beta with integer arguments.
    """
    beta = Fraction(math.factorial(x) * math.factorial(n - x), math.factorial(n + 1))
    if upper == 1:
        return beta
    m = n + 1
    tail = sum(math.comb(m, j) * upper**j * (1 - upper) ** (m - j) for j in range(x + 1, m + 1))
    return beta * tail


def v_oracle(n: int, x: int, upper: float, theta: float) -> float:
    """V for integer data from exact rational arithmetic (no quadrature).

    Args:
        n, x: integer sample size and head count, ``0 <= x <= n <= 60``.
        upper: integration limit, 0.5 or 1.
        theta: the denominator parameter theta_hat_i.

    Raises:
        OutOfRange: non-integer data, n > 60, or an unsupported upper limit.
    """
    if int(n) != n or int(x) != x:
        raise OutOfRange(f"oracle needs integer n and x, got n={n!r}, x={x!r}")
    n, x = int(n), int(x)
    if not (0 <= x <= n and 0 < n <= ORACLE_MAX_N):
        raise OutOfRange(f"oracle needs 0 <= x <= n <= {ORACLE_MAX_N}, got n={n}, x={x}")
    if upper not in (0.5, 1.0):
        raise OutOfRange(f"upper must be 0.5 or 1, got {upper!r}")
    area = _exact_beta_integral(n, x, Fraction(upper).limit_denominator(2))
    log_area = math.log(area.numerator) - math.log(area.denominator)
    denom = log_likelihood(theta, Observation(n, x))
    return math.exp(log_area - denom)


def binomial_kld_sum(theta1: float, theta2: float, n: int) -> float:
    """KL divergence by explicit summation over the binomial support."""
    total = 0.0
    lr_head = math.log(theta1 / theta2) if theta1 > 0 else 0.0
    lr_tail = math.log((1 - theta1) / (1 - theta2)) if theta1 < 1 else 0.0
    for k in range(n + 1):
        p = math.comb(n, k) * theta1**k * (1 - theta1) ** (n - k)
        if p == 0.0:
            continue
        total += p * (k * lr_head + (n - k) * lr_tail)
    return total


# ------------------------------------------------------------ identities


def kld_identity_grid() -> list[tuple[HypothesisContrast, Observation]]:
    """The 200-point (hc, observation) grid used for the S = KLD_obs check."""
    ns = (1.0, 7.5, 30.0, 120.0, 500.0)
    cases = []
    for hc in STANDARD_HCS:
        hi = HALF if hc.hc_class is HCClass.I_A else 1.0
        for n in ns:
            for r in np.linspace(0.0, hi, 10):
                cases.append((hc, Observation.from_ratio(n, float(r))))
    return cases


def check_kld_identity(
    cases: Iterable[tuple[HypothesisContrast, Observation]] | None = None,
    tol: float = 1e-12,
    sum_tol: float = 1e-10,
) -> VerificationReport:
    """S against the closed-form KLD at (x/n, theta_hat_i); for integer
    ``n <= 12`` also the closed form against brute-force summation."""
    cases = kld_identity_grid() if cases is None else list(cases)
    worst = 0.0
    details = []
    for hc, obs in cases:
        theta_i = constrained_mle(hc, obs)
        s = entropy_S(hc, obs)
        closed = kld(obs.ratio(), theta_i, obs.n)
        dev = abs(s - closed)
        if float(obs.n).is_integer() and obs.n <= 12 and float(obs.x).is_integer():
            dev_sum = abs(closed - binomial_kld_sum(obs.ratio(), theta_i, int(obs.n)))
            if dev_sum > sum_tol:
                details.append(f"{hc.label()} n={obs.n:g} x={obs.x:g}: summation off by {dev_sum:.3g}")
            dev = max(dev, dev_sum)
        if abs(s - closed) > tol:
            details.append(f"{hc.label()} n={obs.n:g} x={obs.x:g}: |S - KLD| = {abs(s - closed):.3g}")
        worst = max(worst, dev)
    return VerificationReport(
        "kld_identity", not details, worst, f"{len(cases)} (hc, n, x) cells", details
    )


def check_kld_summation(max_n: int = 12, tol: float = 1e-10) -> VerificationReport:
    """Closed-form KLD against summation for every integer cell n <= max_n."""
    worst = 0.0
    details = []
    cells = 0
    for hc in STANDARD_HCS:
        for n in range(1, max_n + 1):
            for x in range(n + 1):
                obs = Observation(n, x)
                theta_i = constrained_mle(hc, obs)
                dev = abs(kld(obs.ratio(), theta_i, n) - binomial_kld_sum(obs.ratio(), theta_i, n))
                worst = max(worst, dev)
                cells += 1
                if dev > tol:
                    details.append(f"{hc.label()} n={n} x={x}: {dev:.3g}")
    return VerificationReport("kld_summation", not details, worst, f"{cells} integer cells, n<={max_n}", details)


def check_oracle_agreement(
    hcs: Sequence[HypothesisContrast] = STANDARD_HCS,
    max_n: int = ORACLE_MAX_N,
    rel_tol: float = 1e-8,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
) -> VerificationReport:
    """Quadrature V against the exact-rational oracle on all integer cells."""
    worst = 0.0
    details = []
    cells = 0
    for hc in hcs:
        upper = hc.domain()[1]
        for n in range(1, max_n + 1):
            for x in range(n + 1):
                obs = Observation(n, x)
                expected = v_oracle(n, x, upper, constrained_mle(hc, obs))
                got = math.exp(log_volume(hc, obs, cfg))
                dev = abs(got / expected - 1.0)
                worst = max(worst, dev)
                cells += 1
                if dev > rel_tol:
                    details.append(f"{hc.label()} n={n} x={x}: rel {dev:.3g}")
    return VerificationReport(
        "oracle_agreement", not details, worst, f"{cells} cells, n<={max_n}, {len(hcs)} setups", details
    )


def closed_form_E(hc: HypothesisContrast, n: float) -> float:
    """E at x = 0, where b vanishes and S and V are elementary."""
    if hc.hc_class is HCClass.I_A:
        return ((n + 1) * 2**n / (2**n - 0.5)) ** (2.0 / 3.0)
    if hc.hc_class is HCClass.I_B:
        return n + 1
    return (n + 1) ** (1.0 / (2.0 + hc.width()))


def check_closed_forms(
    ns: Sequence[float] = (1, 3, 7, 15, 63),
    rel_tol: float = 1e-8,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
) -> VerificationReport:
    worst = 0.0
    details = []
    for hc in STANDARD_HCS:
        for n in ns:
            got = evidence_value(hc, Observation(n, 0.0), cfg)
            dev = abs(got / closed_form_E(hc, n) - 1.0)
            worst = max(worst, dev)
            if dev > rel_tol:
                details.append(f"{hc.label()} n={n}: rel {dev:.3g}")
    return VerificationReport("closed_forms_x0", not details, worst, f"n in {tuple(ns)}, x=0", details)


def mlr_negative_control(
    hc: HypothesisContrast,
    ratio: float,
    n_grid: Sequence[float],
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
    model: EvidenceModel = DEFAULT_MODEL,
    rel_tol: float = 1e-9,
) -> VerificationReport:
    """log MLR grows linearly in n while E's increments shrink.

    Passes when (a) the log-MLR increments over the equally spaced grid are
    constant to ``rel_tol``, so log MLR cannot show diminishing returns, and
    (b) the E increments over the same grid strictly decrease.
    """
    ns = [float(n) for n in n_grid]
    steps = np.diff(ns)
    if len(ns) < 3 or not np.allclose(steps, steps[0], rtol=1e-12):
        raise ValueError("n grid must hold at least 3 equally spaced values")
    obs = [Observation.from_ratio(n, ratio) for n in ns]
    log_mlr = [entropy_S(hc, o) for o in obs]
    inc = np.diff(log_mlr)
    lin_dev = float(np.max(np.abs(inc / inc[0] - 1.0))) if inc[0] != 0 else math.inf
    e_inc = np.diff([evidence_value(hc, o, cfg, model) for o in obs])
    decreasing = bool(np.all(np.diff(e_inc) < 0))
    details = [f"log MLR increments {np.round(inc, 12).tolist()}", f"E increments {e_inc.tolist()}"]
    if lin_dev > rel_tol:
        details.append("log MLR increments not constant")
    if not decreasing:
        details.append("E increments not strictly decreasing")
    return VerificationReport(
        f"mlr_control[{hc.label()}, x/n={ratio:g}]",
        lin_dev <= rel_tol and decreasing,
        lin_dev,
        f"n in {tuple(ns)}",
        details,
    )


# ------------------------------------------------------------- BBP suite


def _E(hc, n, r, cfg, model):
    return evidence_value(hc, Observation.from_ratio(n, r), cfg, model)


def _trp_target(hc):
    return hc.theta2_left if hc.hc_class is HCClass.II_B else HALF


def bbp_monotone_in_n(hc, cfg=DEFAULT_QUADRATURE, model=DEFAULT_MODEL, ns=BBP_I_NS) -> VerificationReport:
    """BBP(i): at fixed x/n, E strictly increases with n."""
    name = f"bbp_i[{hc.label()}]"
    try:
        t = find_trp(hc, TRP_REFERENCE_N, cfg, model).ratios[0]
    except EvidenceError as exc:
        return VerificationReport(name, False, math.nan, "reference TrP", [str(exc)])
    ratios = [0.0, 0.1, 0.25, t - 0.05, t + 0.05]
    worst = math.inf
    details = []
    for r in ratios:
        es = [_E(hc, n, r, cfg, model) for n in ns]
        margin = float(np.min(np.diff(es) / es[:-1]))
        worst = min(worst, margin)
        if margin <= 0:
            details.append(f"x/n={r:.4g}: E not increasing in n: {np.round(es, 6).tolist()}")
    return VerificationReport(name, not details, worst, f"x/n in {np.round(ratios, 4).tolist()}, n in {ns}", details)


def bbp_transition_points(hc, cfg=DEFAULT_QUADRATURE, model=DEFAULT_MODEL, ns=BBP_II_NS) -> VerificationReport:
    """BBP(ii): TrP count, local-minimum shape, symmetry and drift with n."""
    name = f"bbp_ii[{hc.label()}]"
    details = []
    distances = []
    worst = math.inf
    for n in ns:
        try:
            trp = find_trp(hc, n, cfg, model)
        except EvidenceError as exc:
            return VerificationReport(name, False, math.nan, f"n in {ns}", [str(exc)])
        for p in trp.points:
            h = 0.01
            left = _E(hc, n, max(p.ratio - h, 0.0), cfg, model)
            right = _E(hc, n, min(p.ratio + h, 1.0), cfg, model)
            margin = min(left, right) / p.E - 1.0
            worst = min(worst, margin)
            if margin <= 0:
                details.append(f"n={n}: E not locally minimal at {p.ratio:.6f}")
        if hc.nested:
            asym = abs(sum(trp.ratios) - 1.0)
            if asym > 1e-6:
                details.append(f"n={n}: TrPs not symmetric (sum - 1 = {asym:.3g})")
        distances.append(abs(trp.ratios[0] - _trp_target(hc)))
    if hc.hc_class is HCClass.I_B:
        if max(distances) > 1e-6:
            details.append(f"I_b TrP away from 1/2: {distances}")
    elif not all(b < a for a, b in zip(distances, distances[1:])):
        details.append(f"TrP distance to target not shrinking with n: {np.round(distances, 6).tolist()}")
    return VerificationReport(name, not details, worst, f"n in {ns}", details)


def bbp_iso_contours(
    hc, cfg=DEFAULT_QUADRATURE, model=DEFAULT_MODEL, targets=(2.0, 4.0), ratios=None
) -> VerificationReport:
    """BBP(iii): along an iso-E contour n rises to the TrP and falls after;
    higher E contours lie above lower ones."""
    name = f"bbp_iii[{hc.label()}]"
    ratios = tuple(np.linspace(0.0, HALF, 26)) if ratios is None else tuple(ratios)
    details = []
    profiles = []
    for target in targets:
        pts = [p for p in iso_contour(hc, ContourSpec(target, ratios), cfg, model, refine_apex=False)]
        missing = [p.ratio for p in pts if p.n is None]
        if missing:
            details.append(f"E={target:g}: unbracketable at x/n={missing}")
            continue
        ns = np.array([p.n for p in pts])
        k = int(np.argmax(ns))
        if not (np.all(np.diff(ns[: k + 1]) > 0) and np.all(np.diff(ns[k:]) < 0)):
            details.append(f"E={target:g}: contour not unimodal: {np.round(ns, 4).tolist()}")
        profiles.append(ns)
    worst = math.nan
    if len(profiles) == len(targets) and len(profiles) > 1:
        gaps = [float(np.min(hi / lo - 1.0)) for lo, hi in zip(profiles, profiles[1:])]
        worst = min(gaps)
        if worst <= 0:
            details.append("higher-E contour not strictly above lower-E contour")
    return VerificationReport(name, not details, worst, f"E in {targets}, {len(ratios)} ratios on [0, 1/2]", details)


def bbp_diminishing_increments(
    hc, cfg=DEFAULT_QUADRATURE, model=DEFAULT_MODEL, ns=BBP_IV_NS, ratios=BBP_IV_RATIOS
) -> VerificationReport:
    """BBP(iv): E(n + 5) - E(n) strictly decreases in n at interior x/n."""
    name = f"bbp_iv[{hc.label()}]"
    boundaries = {hc.theta2_left, hc.theta2_right} if hc.nested else set()
    used = [r for r in ratios if r not in boundaries]
    details = []
    worst = math.inf
    for r in used:
        inc = np.array([_E(hc, n + BBP_IV_STEP, r, cfg, model) - _E(hc, n, r, cfg, model) for n in ns])
        margin = float(np.min(-np.diff(inc) / np.abs(inc[:-1])))
        worst = min(worst, margin)
        if margin <= 0:
            details.append(f"x/n={r:g}: increments not decreasing: {np.round(inc, 6).tolist()}")
    return VerificationReport(name, not details, worst, f"x/n in {tuple(used)}, n in {ns}", details)


def check_symmetry(
    hc, cfg=DEFAULT_QUADRATURE, model=DEFAULT_MODEL, ns=(5, 20, 50, 200), ratios=(0.0, 0.05, 0.1, 0.2, 0.3, 0.4, 0.45),
    rel_tol: float = 1e-9,
) -> VerificationReport:
    """E(n, x) = E(n, n - x) for contrasts symmetric about 1/2."""
    worst = 0.0
    details = []
    for n in ns:
        for r in ratios:
            obs = Observation.from_ratio(n, r)
            a = evidence_value(hc, obs, cfg, model)
            b = evidence_value(hc, obs.mirrored(), cfg, model)
            dev = abs(a / b - 1.0)
            worst = max(worst, dev)
            if dev > rel_tol:
                details.append(f"n={n} x/n={r}: rel {dev:.3g}")
    return VerificationReport(f"symmetry[{hc.label()}]", not details, worst, f"n in {ns}, x/n in {ratios}", details)


def check_class_ordering(
    cfg=DEFAULT_QUADRATURE, model=DEFAULT_MODEL, ns=(5, 10, 20, 50, 100, 200), ratios=None
) -> VerificationReport:
    """E under I_a exceeds II_a, and I_b exceeds II_b, for x/n <= 1/2."""
    ratios = tuple(float(r) for r in np.linspace(0.0, HALF, 26)) if ratios is None else ratios
    one_a, one_b, two_a, two_b = STANDARD_HCS
    worst = math.inf
    details = []
    for n in ns:
        for r in ratios:
            for upper, lower in ((one_a, two_a), (one_b, two_b)):
                margin = _E(upper, n, r, cfg, model) / _E(lower, n, r, cfg, model) - 1.0
                worst = min(worst, margin)
                if margin <= 0:
                    details.append(f"n={n} x/n={r:.3f}: {upper.label()} <= {lower.label()}")
    return VerificationReport("class_ordering", not details, worst, f"n in {ns}, {len(ratios)} ratios", details)


def continuity_grid() -> tuple[tuple[float, ...], tuple[float, ...]]:
    """10 x 10 (n, ratio) grid for the II_b -> II_a continuity check."""
    ns = tuple(float(round(v, 6)) for v in np.geomspace(5.0, 500.0, 10))
    ratios = tuple(float(r) for r in np.linspace(0.0, HALF, 10))
    return ns, ratios


def check_continuity(
    cfg=DEFAULT_QUADRATURE, model=DEFAULT_MODEL, width: float = 0.02, rel_tol: float = 0.05
) -> VerificationReport:
    """II_b with a narrow Theta2 gives nearly the same E as II_a."""
    narrow = HypothesisContrast.two_b_width(width)
    two_a = HypothesisContrast.two_a()
    ns, ratios = continuity_grid()
    worst = 0.0
    for n in ns:
        for r in ratios:
            a = _E(two_a, n, r, cfg, model)
            worst = max(worst, abs(_E(narrow, n, r, cfg, model) / a - 1.0))
    details = [] if worst < rel_tol else [f"max relative difference {worst:.4f}"]
    return VerificationReport(
        f"continuity[w={width:g}]", worst < rel_tol, worst, f"{len(ns)}x{len(ratios)} (n, x/n) grid", details
    )


def check_trp_placement(cfg=DEFAULT_QUADRATURE, model=DEFAULT_MODEL, n: float = 50.0) -> VerificationReport:
    """II_b's TrPs lie strictly outside II_a's at the same n."""
    try:
        inner = find_trp(HypothesisContrast.two_a(), n, cfg, model).ratios
        outer = find_trp(STANDARD_HCS[3], n, cfg, model).ratios
    except EvidenceError as exc:
        return VerificationReport("trp_placement", False, math.nan, f"n={n:g}", [str(exc)])
    margin = min(inner[0] - outer[0], outer[1] - inner[1])
    return VerificationReport(
        "trp_placement", margin > 0, margin, f"n={n:g}", [f"II_a {inner}", f"II_b {outer}"]
    )


def check_denominator_positive(
    cfg=DEFAULT_QUADRATURE, model=DEFAULT_MODEL, ns=(5, 10, 25, 50, 100, 250, 500)
) -> VerificationReport:
    """V - b > 0 for the Class II contrasts on a grid over (0, 1)."""
    ratios = [float(r) for r in np.linspace(0.01, 0.99, 50)]
    worst = math.inf
    details = []
    for hc in (HypothesisContrast.two_a(), *(HypothesisContrast.two_b_width(w) for w in (0.02, 0.2, 0.4, 0.6))):
        for n in ns:
            for r in ratios:
                obs = Observation.from_ratio(n, r)
                lv = log_volume(hc, obs, cfg)
                b = correction_b(hc, obs, cfg, model.b_numerator) if model.apply_correction else 0.0
                margin = 1.0 - b * math.exp(-lv)
                worst = min(worst, margin)
                if margin <= 0:
                    details.append(f"{hc.label()} n={n} x/n={r:.3f}: V - b <= 0")
    return VerificationReport("v_minus_b_positive", not details, worst, f"n in {ns}, 50 ratios", details)


def run_bbp_suite(
    hcs: Sequence[HypothesisContrast] = STANDARD_HCS,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
    model: EvidenceModel = DEFAULT_MODEL,
    cross_class: bool = True,
) -> list[VerificationReport]:
    """Every BBP family per contrast, plus the cross-class properties."""
    reports = []
    for hc in hcs:
        reports.append(bbp_monotone_in_n(hc, cfg, model))
        reports.append(bbp_transition_points(hc, cfg, model))
        reports.append(bbp_iso_contours(hc, cfg, model))
        reports.append(bbp_diminishing_increments(hc, cfg, model))
        if hc.symmetric:
            reports.append(check_symmetry(hc, cfg, model))
    if cross_class:
        reports.append(check_class_ordering(cfg, model))
        reports.append(check_continuity(cfg, model))
        reports.append(check_trp_placement(cfg, model))
        reports.append(check_denominator_positive(cfg, model))
    return reports


def run_all(cfg: QuadratureConfig = DEFAULT_QUADRATURE, model: EvidenceModel = DEFAULT_MODEL) -> list[VerificationReport]:
    """Identities, oracles, negative controls and the BBP suite."""
    reports = [
        check_kld_identity(),
        check_kld_summation(),
        check_oracle_agreement(cfg=cfg),
        check_closed_forms(cfg=cfg),
        mlr_negative_control(STANDARD_HCS[0], 0.0, (10, 20, 30), cfg, model),
        mlr_negative_control(STANDARD_HCS[0], 0.1, (20, 40, 60), cfg, model),
    ]
    reports.extend(run_bbp_suite(cfg=cfg, model=model))
    return reports
