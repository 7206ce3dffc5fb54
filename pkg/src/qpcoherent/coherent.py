"""Coherent-state candidates for the deformed oscillator.

A state with label z has number-basis coefficients z**n / sqrt([n]!), where
sqrt([n]!) is accumulated as the product of the per-step principal roots
sqrt([1]) ... sqrt([n]). That branch choice matches the ladder matrices, so
the annihilator eigenvalue property a|z> = z|z> holds to rounding on the
truncated space by construction. Normalization divides by the square root of
sum |z|**(2n) / |[n]|!.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .defexp import DEFAULT_CONTROL, SeriesControl, Verdict, convergence_radius, exp2
from .errors import (
    InvalidParameterError,
    LabelOutOfDiskError,
    OverlapInconsistencyError,
    ParameterMismatchError,
    RootOfUnityDegeneracyError,
    SeriesDivergenceError,
)
from .fock import FockOperators
from .qnumbers import DeformationParams, iter_numbers

# states never report a tail below the double-rounding floor
_TAIL_FLOOR = 1e-14


@dataclass(frozen=True)
class CoherentState:
    z: complex
    params: DeformationParams
    coeffs: np.ndarray
    normalized: bool
    norm_const: float
    tail_bound: float

    @property
    def dim(self) -> int:
        return len(self.coeffs)


def _norm_series(z: complex, params: DeformationParams, ctrl: SeriesControl):
    ev = exp2(abs(z) ** 2, params, ctrl)
    if ev.verdict is Verdict.DIVERGENT_INPUT:
        raise LabelOutOfDiskError(
            f"|z|^2 = {abs(z)**2:.6g} is not inside the convergence disk "
            f"(radius {convergence_radius(params):.6g})"
        )
    if ev.verdict is Verdict.TRUNCATED:
        raise SeriesDivergenceError(
            "normalization series did not converge within the term cap"
        )
    return ev


def make_state(
    z: complex,
    params: DeformationParams,
    dim: int | None = None,
    normalize: bool = True,
    *,
    ctrl: SeriesControl | None = None,
) -> CoherentState:
    """Construct the state with label z on a truncated number basis.

    When ``dim`` is omitted it is chosen so the normalization-series tail is
    below the series tolerance (1e-13 by default), tying the Fock truncation
    to a certified tail. Labels with |z|^2 >= R are rejected.
    """
    z = complex(z)
    if ctrl is None:
        ctrl = SeriesControl(n_max=DEFAULT_CONTROL.n_max, tol=1e-13,
                             min_terms=DEFAULT_CONTROL.min_terms)
    radius = convergence_radius(params)
    if abs(z) ** 2 >= radius:
        raise LabelOutOfDiskError(
            f"|z|^2 = {abs(z)**2:.6g} >= convergence radius {radius:.6g}"
        )
    ev = _norm_series(z, params, ctrl)
    if dim is None:
        dim = ev.terms_used + 1
    elif dim < 1:
        raise InvalidParameterError("dim must be positive")

    coeffs = np.zeros(dim, dtype=complex)
    scale = 1.0 / math.sqrt(ev.value.real) if normalize else 1.0
    coeffs[0] = scale
    gen = iter_numbers(params)
    for n in range(1, dim):
        value, resonant = next(gen)
        if resonant or value == 0:
            raise RootOfUnityDegeneracyError(n)
        coeffs[n] = coeffs[n - 1] * z / np.sqrt(value)
    coeffs.flags.writeable = False

    if normalize:
        captured = float(np.sum(np.abs(coeffs) ** 2))
        tail = max(abs(1.0 - captured), ev.tail_bound / ev.value.real, _TAIL_FLOOR)
        norm_const = scale
    else:
        tail = max(ev.tail_bound, _TAIL_FLOOR)
        norm_const = 1.0
    return CoherentState(z=z, params=params, coeffs=coeffs,
                         normalized=normalize, norm_const=norm_const,
                         tail_bound=tail)


def _check_pair(s1: CoherentState, s2: CoherentState) -> None:
    if s1.params.q != s2.params.q or s1.params.p != s2.params.p:
        raise ParameterMismatchError("states carry different deformation parameters")
    if not (s1.normalized and s2.normalized):
        raise InvalidParameterError("overlap is defined for normalized states")


def _extended_coeffs(state: CoherentState, length: int) -> np.ndarray:
    # the recurrence does not depend on the truncation, so a shorter state can
    # be continued; the normalization constant is already dim-independent
    if length <= state.dim:
        return state.coeffs[:length]
    out = np.zeros(length, dtype=complex)
    out[: state.dim] = state.coeffs
    gen = iter_numbers(state.params)
    for n in range(1, length):
        value, resonant = next(gen)
        if n < state.dim:
            continue
        if resonant or value == 0:
            raise RootOfUnityDegeneracyError(n)
        out[n] = out[n - 1] * state.z / np.sqrt(value)
    return out


def overlap(s1: CoherentState, s2: CoherentState) -> complex:
    """<z1|z2> as the coefficient-space inner product.

    Both coefficient vectors are carried to the longer truncation so the
    cross series conj(z1) z2 is not cut short by the smaller label. The
    closed form N(|z1|^2) N(|z2|^2) exp2(conj(z1) z2) is evaluated alongside
    and the two must agree within ten times the combined tails; disagreement
    raises OverlapInconsistencyError.
    """
    _check_pair(s1, s2)
    m = max(s1.dim, s2.dim)
    ip = complex(np.vdot(_extended_coeffs(s1, m), _extended_coeffs(s2, m)))
    cross = exp2(np.conj(s1.z) * s2.z, s1.params,
                 SeriesControl(n_max=1000, tol=1e-13, min_terms=10))
    if cross.verdict is not Verdict.CONVERGED:
        raise SeriesDivergenceError("cross exponential did not converge")
    closed = s1.norm_const * s2.norm_const * cross.value
    budget = 10.0 * (s1.tail_bound + s2.tail_bound + cross.tail_bound) + 1e-13
    if abs(ip - closed) > budget:
        raise OverlapInconsistencyError(
            f"coefficient overlap {ip} vs closed form {closed} "
            f"differ by {abs(ip - closed):.3e} > {budget:.3e}"
        )
    return ip


def label_distance_sq(s1: CoherentState, s2: CoherentState) -> float:
    """Squared norm distance 2 (1 - Re <z1|z2>), clamped at zero."""
    return max(0.0, 2.0 * (1.0 - overlap(s1, s2).real))


def coefficient_distance_sq(s1: CoherentState, s2: CoherentState) -> float:
    """Direct ||c1 - c2||^2 for cross-validation against label_distance_sq."""
    _check_pair(s1, s2)
    m = max(s1.dim, s2.dim)
    c1 = np.zeros(m, dtype=complex)
    c2 = np.zeros(m, dtype=complex)
    c1[: s1.dim] = s1.coeffs
    c2[: s2.dim] = s2.coeffs
    return float(np.sum(np.abs(c1 - c2) ** 2))


def _check_state_ops(state: CoherentState, ops: FockOperators) -> None:
    if ops.dim != state.dim:
        raise ParameterMismatchError(
            f"operator truncation {ops.dim} != state truncation {state.dim}"
        )
    if ops.params is not None:
        if ops.params.q != state.params.q or ops.params.p != state.params.p:
            raise ParameterMismatchError("operators and state parameters differ")


def annihilator_residual(state: CoherentState, ops: FockOperators) -> float:
    """||a c - z c||_2 over components 0..dim-2.

    The last component is excluded: it is pure truncation (the matrix cannot
    reach coefficient dim), and is available via annihilator_edge_defect.
    """
    _check_state_ops(state, ops)
    r = ops.a @ state.coeffs - state.z * state.coeffs
    return float(np.linalg.norm(r[: state.dim - 1]))


def annihilator_edge_defect(state: CoherentState, ops: FockOperators) -> float:
    """|(a c - z c)[dim-1]|, the truncation-edge component."""
    _check_state_ops(state, ops)
    r = ops.a @ state.coeffs - state.z * state.coeffs
    return float(abs(r[state.dim - 1]))
