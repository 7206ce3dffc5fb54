"""Regime classification and numerical ratio tests for the three series.

The deformed exponentials and the Wbar series converge simultaneously in two
parameter regimes, (i) |q| <= 1 with |p| = 1 and (ii) |q| = 1 with |p| >= 1;
outside them at least one of the series diverges. The tests here corroborate
that numerically with median ratio estimates computed from log-magnitude term
sequences (so super-exponential growth never overflows). They are evidence,
not proof; verdicts near |ratio| = 1 are honestly Inconclusive.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Sequence

import numpy as np

from .defexp import convergence_radius
from .errors import InvalidParameterError
from .qnumbers import DeformationParams, log_abs_numbers
from .unity import format_float

MODULUS_TOL = 1e-9
DEFAULT_WINDOW = 50


class Regime(Enum):
    REGIME_I = "RegimeI"
    REGIME_II = "RegimeII"
    DEGENERATE = "Degenerate"
    OUTSIDE = "Outside"


class RatioVerdict(Enum):
    CONVERGENT = "Convergent"
    DIVERGENT = "Divergent"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class RatioTestResult:
    verdict: RatioVerdict
    estimate: float
    sigma: float
    n_ratios: int
    tail_samples: tuple[float, ...] = ()


@dataclass(frozen=True)
class Prop1Row:
    Q: complex
    y: float
    verdict: Optional[RatioVerdict]
    estimate: float
    expected: RatioVerdict
    consistent: bool
    skipped: Optional[str] = None


@dataclass(frozen=True)
class RegimeVerdict:
    """One sweep row: classification, per-series verdicts, contradiction flag.

    ``evidence`` holds the trailing term-ratio samples of the worst series
    evaluation per family, for audit of near-marginal calls.
    """

    params: DeformationParams
    regime: Regime
    v_exp1: Optional[RatioVerdict]
    v_exp2: Optional[RatioVerdict]
    v_wbar: Optional[RatioVerdict]
    estimates: tuple[float, float, float]
    boundary_margin: float
    contradiction: bool
    note: str = ""
    evidence: dict = None


def classify_regime(params: DeformationParams) -> Regime:
    """Case analysis on (|q|, |p|) with a 1e-9 tolerance band."""
    if params.is_degenerate:
        return Regime.DEGENERATE
    aq = abs(params.q)
    ap = abs(params.p)
    if aq <= 1.0 + MODULUS_TOL and abs(ap - 1.0) <= MODULUS_TOL:
        return Regime.REGIME_I
    if abs(aq - 1.0) <= MODULUS_TOL and ap >= 1.0 - MODULUS_TOL:
        return Regime.REGIME_II
    return Regime.OUTSIDE


def boundary_margin(params: DeformationParams) -> float:
    """Distance of the deformed-number growth rate max(|q|, 1/|p|) from 1.

    Points in the two convergence regimes sit exactly at the marginal rate
    and are decided by the factorial damping of the series, so they carry a
    zero margin by construction. Outside points with a tiny nonzero margin
    are the genuinely hard band: their asymptotic behavior only emerges
    beyond any fixed term budget, so Inconclusive verdicts are honest there.
    """
    growth = max(abs(params.q), 1.0 / abs(params.p))
    return abs(growth - 1.0)


def ratio_test_logmag(log_terms: np.ndarray, window: int = DEFAULT_WINDOW) -> RatioTestResult:
    """Median-based lim sup |t_{n+1}/t_n| estimate from log-magnitudes.

    The 3-sigma decision band is applied on the log scale, which agrees with
    the linear-scale band to first order once the ratios have settled and
    stays meaningful when they grow without bound.
    """
    logs = np.asarray(log_terms, dtype=float)
    logs = logs[np.isfinite(logs)]
    if len(logs) < 2 * window:
        raise InvalidParameterError(
            f"need at least {2 * window} finite nonzero terms, got {len(logs)}"
        )
    log_ratios = np.diff(logs)[-window:]
    med = float(np.median(log_ratios))
    sig = float(np.std(log_ratios))
    if med < -3.0 * sig:
        verdict = RatioVerdict.CONVERGENT
    elif med > 3.0 * sig:
        verdict = RatioVerdict.DIVERGENT
    else:
        verdict = RatioVerdict.INCONCLUSIVE
    with np.errstate(over="ignore"):
        tail = tuple(float(v) for v in np.exp(log_ratios[-5:]))
    return RatioTestResult(verdict=verdict, estimate=math.exp(med), sigma=sig,
                           n_ratios=len(log_ratios), tail_samples=tail)


def ratio_test(terms: Iterable[complex], window: int = DEFAULT_WINDOW) -> RatioTestResult:
    """Ratio test on literal series terms (zeros are dropped as non-informative)."""
    mags = np.abs(np.fromiter((complex(t) for t in terms), dtype=complex))
    mags = mags[mags > 0]
    if len(mags) == 0:
        raise InvalidParameterError("degenerate term sequence: all zeros")
    with np.errstate(divide="ignore"):
        return ratio_test_logmag(np.log(mags), window=window)


# ----------------------------------------------------------------------
# log-magnitude term sequences for the three series


def _wbar_log_terms(params: DeformationParams, y: float, count: int) -> np.ndarray:
    if y == 0:
        raise InvalidParameterError("y must be nonzero for a ratio test")
    la = log_abs_numbers(params, count)
    cum = np.cumsum(la)
    n = np.arange(1, count + 1, dtype=float)
    lgam = np.array([math.lgamma(k + 1) for k in range(1, count + 1)])
    logs = cum + n * math.log(abs(y)) - lgam - math.log(math.pi)
    return np.concatenate([[-math.log(math.pi)], logs])


def _exp_log_terms(params: DeformationParams, x: float, count: int) -> np.ndarray:
    # |x**n / [n]!| and x**n / |[n]|! have identical magnitudes, so one
    # sequence serves both deformed exponentials
    la = log_abs_numbers(params, count)
    cum = np.cumsum(la)
    n = np.arange(1, count + 1, dtype=float)
    logs = n * math.log(abs(x)) - cum
    return np.concatenate([[0.0], logs])


def _has_resonance(params: DeformationParams, count: int) -> bool:
    # [n] cancels catastrophically exactly when (qp)**n returns to 1
    if params.is_degenerate:
        return params.q == 0
    w = params.q * params.p
    base = w if abs(w) <= 1.0 else 1.0 / w
    wpow = 1.0 + 0.0j
    for _ in range(count):
        wpow *= base
        if abs(wpow - 1.0) <= 1e-8 * (abs(wpow) + 1.0):
            return True
    return False


# ----------------------------------------------------------------------
# proposition checks


def proposition1_check(Q: complex, y_samples: Sequence[float], *,
                       n_terms: int = 400, window: int = 100) -> list[Prop1Row]:
    """Wbar ratio tests for the symmetric one-parameter deformation.

    Expected behavior: Divergent for |Q| != 1, Convergent on the unit circle
    away from roots of unity. Root-of-unity resonances are skipped with a
    notation instead of producing a misleading verdict.
    """
    Q = complex(Q)
    if Q == 0 or Q == 1 or Q == -1:
        raise InvalidParameterError("Q must differ from 0 and +-1")
    params = DeformationParams(q=Q, p=Q)
    on_circle = abs(abs(Q) - 1.0) <= MODULUS_TOL
    expected = RatioVerdict.CONVERGENT if on_circle else RatioVerdict.DIVERGENT
    rows = []
    resonant = _has_resonance(params, n_terms)
    for y in y_samples:
        if resonant:
            rows.append(Prop1Row(Q=Q, y=float(y), verdict=None,
                                 estimate=math.nan, expected=expected,
                                 consistent=True,
                                 skipped="root-of-unity degeneracy"))
            continue
        logs = _wbar_log_terms(params, float(y), n_terms)
        res = ratio_test_logmag(logs, window=window)
        rows.append(Prop1Row(Q=Q, y=float(y), verdict=res.verdict,
                             estimate=res.estimate, expected=expected,
                             consistent=res.verdict is expected))
    return rows


_ORDER = {RatioVerdict.CONVERGENT: 0, RatioVerdict.INCONCLUSIVE: 1,
          RatioVerdict.DIVERGENT: 2}


def _worst(verdicts: list[RatioVerdict]) -> RatioVerdict:
    return max(verdicts, key=lambda v: _ORDER[v])


def proposition2_check(grid: Sequence[DeformationParams],
                       y_samples: Sequence[float] = (0.5, 1.0, 2.0),
                       x_fractions: Sequence[float] = (0.5,), *,
                       n_terms: int = 300, window: int = DEFAULT_WINDOW
                       ) -> list[RegimeVerdict]:
    """Classify every grid point and ratio-test all three series there.

    exp series are sampled at x = fraction * R inside the nominal disk (a
    fixed x = 5 * fraction stands in when R is infinite). A contradiction is
    a regime-(i)/(ii) point with a Divergent series, or an outside point
    where no series diverges; Inconclusive rows are flagged through the
    boundary margin instead.
    """
    if not grid:
        raise InvalidParameterError("grid must be nonempty")
    rows = []
    for params in grid:
        regime = classify_regime(params)
        radius = convergence_radius(params)
        note = ""
        if _has_resonance(params, n_terms):
            rows.append(RegimeVerdict(
                params=params, regime=regime, v_exp1=None, v_exp2=None,
                v_wbar=None, estimates=(math.nan,) * 3,
                boundary_margin=boundary_margin(params),
                contradiction=False, note="root-of-unity degeneracy; skipped"))
            continue

        exp_verdicts = []
        exp_estimates = []
        exp_tail = ()
        for frac in x_fractions:
            x = frac * radius if math.isfinite(radius) else 5.0 * frac
            res = ratio_test_logmag(_exp_log_terms(params, x, n_terms), window)
            exp_verdicts.append(res.verdict)
            exp_estimates.append(res.estimate)
            exp_tail = res.tail_samples
        v_exp = _worst(exp_verdicts)

        wbar_verdicts = []
        wbar_estimates = []
        wbar_tail = ()
        for y in y_samples:
            res = ratio_test_logmag(_wbar_log_terms(params, y, n_terms), window)
            wbar_verdicts.append(res.verdict)
            wbar_estimates.append(res.estimate)
            wbar_tail = res.tail_samples
        v_wbar = _worst(wbar_verdicts)

        if regime in (Regime.REGIME_I, Regime.REGIME_II):
            contradiction = (v_exp is RatioVerdict.DIVERGENT or
                             v_wbar is RatioVerdict.DIVERGENT)
        elif regime is Regime.OUTSIDE:
            contradiction = not (v_exp is RatioVerdict.DIVERGENT or
                                 v_wbar is RatioVerdict.DIVERGENT)
        else:
            contradiction = False
            note = "degenerate branch; not covered by the regime dichotomy"

        rows.append(RegimeVerdict(
            params=params, regime=regime, v_exp1=v_exp, v_exp2=v_exp,
            v_wbar=v_wbar,
            estimates=(max(exp_estimates), max(exp_estimates),
                       max(wbar_estimates)),
            boundary_margin=boundary_margin(params),
            contradiction=contradiction, note=note,
            evidence={"exp_ratio_tail": exp_tail,
                      "wbar_ratio_tail": wbar_tail}))
    return rows


def default_parameter_grid() -> list[DeformationParams]:
    """Deterministic 100-point sweep covering both regimes and all outside cases.

    Points keep a margin of at least 0.05 from the regime boundaries and from
    the degenerate set, so every verdict is expected to be decisive.
    """
    pts: list[DeformationParams] = []

    def add(q_mod, q_phase, p_mod, p_phase):
        q = q_mod * complex(math.cos(q_phase), math.sin(q_phase))
        p = p_mod * complex(math.cos(p_phase), math.sin(p_phase))
        pts.append(DeformationParams(q=q, p=p))

    for q_mod in (0.3, 0.55, 0.8, 0.95):            # regime (i): 36 points
        for q_phase in (0.0, 0.9, 2.1):
            for p_phase in (0.4, 1.7, 2.9):
                add(q_mod, q_phase, 1.0, p_phase)
    for q_phase in (0.3, 1.1, 2.4):                 # regime (ii): 18 points
        for p_mod in (1.15, 1.5, 2.2):
            for p_phase in (0.6, 2.0):
                add(1.0, q_phase, p_mod, p_phase)
    for q_mod in (1.15, 1.6):                       # outside, |q| > 1: 8
        for q_phase in (0.5, 1.9):
            for p_phase in (0.8, 2.5):
                add(q_mod, q_phase, 1.0, p_phase)
    for q_mod in (0.5, 0.85):                       # outside, both inside: 8
        for p_mod in (0.5, 0.8):
            for phases in ((0.7, 1.3), (2.2, 0.5)):
                add(q_mod, phases[0], p_mod, phases[1])
    for q_mod in (0.45, 0.75):                      # outside, [n] -> 0: 8
        for p_mod in (1.3, 2.0):
            for phases in ((0.6, 1.1), (1.8, 2.6)):
                add(q_mod, phases[0], p_mod, phases[1])
    for q_mod in (0.45, 0.7, 0.9):                  # regime (i) fill: 6
        for p_phase in (0.9, 2.3):
            add(q_mod, 2.8, 1.0, p_phase)
    for q_phase in (0.85, 1.55):                    # regime (ii) fill: 4
        for p_mod in (1.25, 1.9):
            add(1.0, q_phase, p_mod, 1.2)
    for q_phase in (1.0, 2.2):                      # outside fill: 12
        for p_phase in (1.5, 0.3):
            add(1.3, q_phase, 1.0, p_phase)
    for q_mod in (0.6, 0.9):
        for p_mod in (0.55, 0.75):
            add(q_mod, 1.4, p_mod, 2.0)
    for p_mod in (1.4, 2.4):
        for p_phase in (0.2, 1.9):
            add(0.65, 0.35, p_mod, p_phase)
    assert len(pts) == 100
    return pts


# ----------------------------------------------------------------------
# report export


def _verdict_str(v: Optional[RatioVerdict]) -> str:
    return v.value if v is not None else "Skipped"


def regime_report_to_csv(rows: Sequence[RegimeVerdict], file_or_path) -> None:
    close = False
    if not hasattr(file_or_path, "write"):
        file_or_path = open(file_or_path, "w", newline="", encoding="utf-8")
        close = True
    try:
        writer = csv.writer(file_or_path, lineterminator="\n")
        writer.writerow(["q_re", "q_im", "p_re", "p_im", "regime",
                         "v_exp1", "v_exp2", "v_wbar", "ratio_estimates"])
        for row in rows:
            q, p = row.params.q, row.params.p
            writer.writerow([
                format_float(q.real), format_float(q.imag),
                format_float(p.real), format_float(p.imag),
                row.regime.value,
                _verdict_str(row.v_exp1), _verdict_str(row.v_exp2),
                _verdict_str(row.v_wbar),
                ";".join(format_float(e) for e in row.estimates),
            ])
    finally:
        if close:
            file_or_path.close()


def regime_report_to_json(rows: Sequence[RegimeVerdict], file_or_path) -> None:
    payload = []
    for row in rows:
        payload.append({
            "q": [row.params.q.real, row.params.q.imag],
            "p": [row.params.p.real, row.params.p.imag],
            "regime": row.regime.value,
            "v_exp1": _verdict_str(row.v_exp1),
            "v_exp2": _verdict_str(row.v_exp2),
            "v_wbar": _verdict_str(row.v_wbar),
            "estimates": [format_float(e) for e in row.estimates],
            "boundary_margin": format_float(row.boundary_margin),
            "contradiction": row.contradiction,
            "note": row.note,
        })
    close = False
    if not hasattr(file_or_path, "write"):
        file_or_path = open(file_or_path, "w", encoding="utf-8")
        close = True
    try:
        json.dump(payload, file_or_path, indent=2)
        file_or_path.write("\n")
    finally:
        if close:
            file_or_path.close()
