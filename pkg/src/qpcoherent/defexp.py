"""Deformed exponential series and their convergence disk.

Two series are attached to the deformation: sum x**n / [n]! and
sum x**n / |[n]|!. Both reduce to exp(x) in the classical limit and share the
convergence radius R = 1/|q - 1/p| (infinite on the degenerate branch).
Partial sums are accumulated in extended precision so that alternating
classical inputs (x < 0) keep full double accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .errors import InvalidParameterError, RootOfUnityDegeneracyError
from .qnumbers import DeformationParams, QNumberSequence, iter_numbers


class Verdict(Enum):
    CONVERGED = "Converged"
    TRUNCATED = "Truncated"
    DIVERGENT_INPUT = "DivergentInput"


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy: hard cap, relative tail tolerance, warm-up length."""

    n_max: int = 500
    tol: float = 1e-12
    min_terms: int = 10

    def __post_init__(self):
        if self.n_max < 1 or self.min_terms < 1 or self.min_terms > self.n_max:
            raise InvalidParameterError("need 1 <= min_terms <= n_max")
        if not self.tol > 0:
            raise InvalidParameterError("tol must be positive")


@dataclass(frozen=True)
class SeriesEvaluation:
    value: complex
    terms_used: int
    tail_bound: float
    verdict: Verdict

    @property
    def converged(self) -> bool:
        return self.verdict is Verdict.CONVERGED


DEFAULT_CONTROL = SeriesControl()

_NAN = complex(math.nan, math.nan)


def convergence_radius(params: DeformationParams) -> float:
    """Radius of the convergence disk, 1/|q - 1/p|; +inf on the degenerate branch."""
    if params.is_degenerate:
        return math.inf
    return 1.0 / abs(params.denom)


def _sum_series(
    x: complex,
    params: DeformationParams,
    ctrl: SeriesControl,
    use_abs: bool,
    seq: Optional[QNumberSequence],
) -> SeriesEvaluation:
    radius = convergence_radius(params)
    ax = abs(x)
    if ax >= radius:
        return SeriesEvaluation(_NAN, 0, math.inf, Verdict.DIVERGENT_INPUT)

    r_geom = ax / radius if math.isfinite(radius) else 0.0
    # extended precision keeps cancellation error below the 1e-12 tail targets
    total = np.clongdouble(1.0)
    term = np.clongdouble(1.0)
    prev_abs = 1.0
    xl = np.clongdouble(x)

    if seq is not None:
        numbers = ((seq.numbers[n], seq.resonance_index == n) for n in range(1, seq.n_max + 1))
    else:
        numbers = iter_numbers(params)

    n = 0
    tail = math.inf
    for value, resonant in numbers:
        n += 1
        if n > ctrl.n_max:
            n -= 1
            break
        if resonant or value == 0:
            raise RootOfUnityDegeneracyError(n)
        term = term * (xl / np.clongdouble(abs(value) if use_abs else value))
        total = total + term
        at = float(abs(term))
        if n >= ctrl.min_terms and at <= prev_abs:
            if r_geom > 0.0:
                r = r_geom
            else:
                r = at / prev_abs if prev_abs > 0 else 0.0
            if r < 1.0:
                tail = at * r / (1.0 - r)
                budget = ctrl.tol * max(float(abs(total)), 1.0)
                if at <= budget and tail <= budget:
                    return SeriesEvaluation(complex(total), n, tail, Verdict.CONVERGED)
        prev_abs = at
    return SeriesEvaluation(complex(total), n, tail, Verdict.TRUNCATED)


def exp1(
    x: complex,
    params: DeformationParams,
    ctrl: SeriesControl = DEFAULT_CONTROL,
    *,
    seq: Optional[QNumberSequence] = None,
) -> SeriesEvaluation:
    """Evaluate sum x**n / [n]! with tail control.

    Inputs on or beyond the convergence disk return a DivergentInput verdict
    rather than raising; a vanishing [n] below the truncation raises
    RootOfUnityDegeneracyError. An existing QNumberSequence can be shared
    read-only via ``seq``.
    """
    return _sum_series(complex(x), params, ctrl, use_abs=False, seq=seq)


def exp2(
    x: complex,
    params: DeformationParams,
    ctrl: SeriesControl = DEFAULT_CONTROL,
    *,
    seq: Optional[QNumberSequence] = None,
) -> SeriesEvaluation:
    """Evaluate sum x**n / |[n]|!.

    For real x >= 0 (the normalization use, x = |z|**2) all terms are positive
    and partial sums are monotone. Complex arguments are accepted with the
    identical contract; they arise in overlaps through conj(z) * z'.
    """
    return _sum_series(complex(x), params, ctrl, use_abs=True, seq=seq)
