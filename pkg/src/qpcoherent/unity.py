"""Resolution-of-unity machinery: target moments, weight recovery, audits.

The identity decomposition over coherent-state labels reduces, after the
exact angular integral, to the one-dimensional moment problem

    integral_0^R x**n Wt(x) dx = |[n]|! / pi,   n = 0, 1, 2, ...

on x = |z|**2, with R the convergence radius (a Hausdorff problem for finite
R, Stieltjes for R = inf). Two independent recovery routes are provided:

* moment matching in an orthogonal-polynomial basis (shifted Legendre on
  [0, R], Laguerre functions L_j(x) exp(-x) on [0, inf)), which is the
  trusted route, and
* the regularized inverse Fourier transform of
  Wbar(y) = sum |[n]|! (iy)**n / (pi n!), with a Gaussian damper exp(-eps y^2)
  and a finite window, which makes the formal transform executable.

Positivity of the recovered weight is measured (min_value), never enforced.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

from ._quad import adaptive_gl, composite_gl, panel_nodes
from .defexp import SeriesControl, SeriesEvaluation, Verdict, convergence_radius
from .errors import (
    IllConditionedError,
    InvalidParameterError,
    QuadratureError,
    RootOfUnityDegeneracyError,
    SeriesDivergenceError,
)
from .qnumbers import DeformationParams, iter_numbers, qp_sequence

CONDITION_LIMIT = 1e12

#: series cap for pointwise exp2 values on dense grids; terms decay like
#: (x/R)**n, so points near the support edge legitimately need many terms
_GRID_SERIES_CAP = 400_000


class Basis(Enum):
    SHIFTED_LEGENDRE = "ShiftedLegendre"
    GENERALIZED_LAGUERRE = "GeneralizedLaguerre"


class Method(Enum):
    MOMENT_RECONSTRUCTION = "MomentReconstruction"
    FOURIER_INVERSION = "FourierInversion"


@dataclass(frozen=True)
class MomentSet:
    """Target moments |[n]|!/pi with their support interval."""

    params: DeformationParams
    n_max: int
    moments: np.ndarray
    support: tuple[float, float]


@dataclass(frozen=True)
class QuadratureSpec:
    nodes: int = 64
    rtol: float = 1e-8
    max_doublings: int = 12


@dataclass(frozen=True)
class WeightFunction:
    """A recovered auxiliary weight Wt, evaluable anywhere on its support."""

    support: tuple[float, float]
    basis: Optional[Basis]
    coeffs: Optional[np.ndarray]
    grid_x: np.ndarray
    grid_w: np.ndarray
    min_value: float
    method: Method
    diagnostics: dict = field(default_factory=dict)
    _fourier_nodes: Optional[np.ndarray] = None
    _fourier_weights: Optional[np.ndarray] = None

    def evaluate(self, x) -> np.ndarray:
        """Wt at arbitrary points, using the richest available representation."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if self.coeffs is not None and self.basis is Basis.SHIFTED_LEGENDRE:
            R = self.support[1]
            return np.polynomial.legendre.legval(2.0 * x / R - 1.0, self.coeffs)
        if self.coeffs is not None and self.basis is Basis.GENERALIZED_LAGUERRE:
            return np.polynomial.laguerre.lagval(x, self.coeffs) * np.exp(-x)
        if self._fourier_nodes is not None:
            phase = np.exp(-1j * np.outer(self._fourier_nodes, x))
            return (self._fourier_weights @ phase).real / (2.0 * math.pi)
        return np.interp(x, self.grid_x, self.grid_w)


def format_float(v: float) -> str:
    """Fixed 17-significant-digit scientific notation for diffable output."""
    return f"{v:.16e}"


# ----------------------------------------------------------------------
# target moments and the Wbar series


def target_moments(params: DeformationParams, n_max: int) -> MomentSet:
    """Moments mu_n = |[n]|!/pi for n = 0..n_max."""
    seq = qp_sequence(n_max, params)
    if seq.resonance_index is not None:
        raise RootOfUnityDegeneracyError(seq.resonance_index)
    if seq.overflow_index is not None:
        raise InvalidParameterError(
            f"|[n]|! overflows at n = {seq.overflow_index}; lower n_max"
        )
    moments = seq.abs_factorials / math.pi
    moments.flags.writeable = False
    return MomentSet(params=params, n_max=n_max, moments=moments,
                     support=(0.0, convergence_radius(params)))


def wbar_series(y: float, params: DeformationParams,
                ctrl: SeriesControl | None = None) -> SeriesEvaluation:
    """Evaluate Wbar(y) = sum |[n]|! (iy)**n / (pi n!) with tail control.

    Outside the bounded-|[n]| regimes the terms eventually grow; that is
    reported as a DivergentInput verdict, not an exception, so sweeps can
    tabulate it.
    """
    if ctrl is None:
        ctrl = SeriesControl(n_max=2000, tol=1e-12, min_terms=10)
    iy = 1j * float(y)
    total = np.clongdouble(1.0 / math.pi)
    term = np.clongdouble(1.0 / math.pi)
    prev_abs = float(abs(term))
    tail = math.inf
    ratios: list[float] = []
    gen = iter_numbers(params)
    n = 0
    for value, _resonant in gen:
        n += 1
        if n > ctrl.n_max:
            n -= 1
            break
        term = term * np.clongdouble(iy) * np.clongdouble(abs(value) / n)
        total = total + term
        at = float(abs(term))
        ratios.append(at / prev_abs if prev_abs > 0 else 0.0)
        if len(ratios) > 10:
            ratios.pop(0)
        if at > 1e140:
            return SeriesEvaluation(complex(total), n, math.inf,
                                    Verdict.DIVERGENT_INPUT)
        if n >= ctrl.min_terms and at <= prev_abs:
            r = at / prev_abs if prev_abs > 0 else 0.0
            if r < 1.0:
                tail = at * r / (1.0 - r)
                budget = ctrl.tol * max(float(abs(total)), 1.0)
                if at <= budget and tail <= budget:
                    return SeriesEvaluation(complex(total), n, tail,
                                            Verdict.CONVERGED)
        prev_abs = at
    verdict = Verdict.TRUNCATED
    if ratios and float(np.median(ratios)) > 1.02:
        verdict = Verdict.DIVERGENT_INPUT
    return SeriesEvaluation(complex(total), n, tail, verdict)


def _wbar_values(y: np.ndarray, params: DeformationParams,
                 ctrl: SeriesControl) -> np.ndarray:
    """Vectorized Wbar over an array of real ordinates.

    The terms peak near exp(R |y|) while the sum stays O(1), so beyond
    moderate |y| the alternating sum has no correct digits in double
    precision; that cancellation is detected and reported rather than
    returning noise.
    """
    y = np.asarray(y, dtype=float)
    term = np.full(y.shape, 1.0 / math.pi, dtype=complex)
    total = term.copy()
    peak = np.full(y.shape, 1.0 / math.pi)
    streak = np.zeros(y.shape, dtype=int)
    iy = 1j * y
    gen = iter_numbers(params)
    for n in range(1, ctrl.n_max + 1):
        value, _ = next(gen)
        term *= iy * (abs(value) / n)
        total += term
        at = np.abs(term)
        peak = np.maximum(peak, at)
        if np.max(at) > 1e140:
            raise SeriesDivergenceError(
                "Wbar series diverges for these parameters; no inverse transform"
            )
        small = at <= ctrl.tol * np.maximum(np.abs(total), 1.0)
        streak = np.where(small, streak + 1, 0)
        if n >= ctrl.min_terms and np.all(streak >= 2):
            noise = np.max(2.3e-16 * peak / np.maximum(np.abs(total), 1e-300))
            if noise > 1e-2:
                raise SeriesDivergenceError(
                    f"Wbar cancellation noise {noise:.2e} at |y| up to "
                    f"{float(np.max(np.abs(y))):.3g}; reduce y_cut"
                )
            return total
    raise SeriesDivergenceError(
        f"Wbar series not converged within {ctrl.n_max} terms"
    )


def _exp2_values(x: np.ndarray, params: DeformationParams,
                 n_cap: int = _GRID_SERIES_CAP, tol: float = 1e-12) -> np.ndarray:
    """Vectorized sum x**n/|[n]|! for real nonnegative x strictly inside the disk."""
    x = np.asarray(x, dtype=float)
    radius = convergence_radius(params)
    if np.any(x < 0) or np.any(x >= radius):
        raise InvalidParameterError("grid points must satisfy 0 <= x < radius")
    term = np.ones(x.shape, dtype=float)
    total = term.copy()
    streak = np.zeros(x.shape, dtype=int)
    gen = iter_numbers(params)
    for n in range(1, n_cap + 1):
        value, resonant = next(gen)
        if resonant or value == 0:
            raise RootOfUnityDegeneracyError(n)
        term *= x / abs(value)
        total += term
        small = term <= tol * np.maximum(total, 1.0)
        streak = np.where(small, streak + 1, 0)
        if n >= 10 and np.all(streak >= 2):
            return total
    raise SeriesDivergenceError(f"exp2 grid evaluation not converged in {n_cap} terms")


# ----------------------------------------------------------------------
# moment-matching reconstruction

_LD = np.longdouble


def _legendre_moment_matrix(degree: int, R: float) -> np.ndarray:
    # M[n, j] = integral_0^R x**n P_j(2x/R - 1) dx
    #         = R**(n+1) (n!)^2 / ((n-j)! (n+j+1)!),  zero for j > n,
    # built through the ratio M[n,j]/M[n,j-1] = (n-j+1)/(n+j+1) so no
    # factorial ever materializes.
    d1 = degree + 1
    M = np.zeros((d1, d1), dtype=_LD)
    Rl = _LD(R)
    lead = Rl
    for n in range(d1):
        val = lead / _LD(n + 1)
        M[n, 0] = val
        for j in range(1, n + 1):
            val = val * _LD(n - j + 1) / _LD(n + j + 1)
            M[n, j] = val
        lead = lead * Rl
    return M


def _laguerre_moment_matrix(degree: int) -> np.ndarray:
    # M[n, j] = integral_0^inf x**n L_j(x) exp(-x) dx = (-1)**j C(n, j) n!
    d1 = degree + 1
    M = np.zeros((d1, d1), dtype=_LD)
    for n in range(d1):
        fact = _LD(math.factorial(n))
        binom = _LD(1)
        for j in range(n + 1):
            M[n, j] = ((-1) ** j) * binom * fact
            binom = binom * _LD(n - j) / _LD(j + 1)
    return M


def _solve_lower_triangular(M: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    n = len(rhs)
    c = np.zeros(n, dtype=_LD)
    for i in range(n):
        c[i] = (rhs[i] - M[i, :i] @ c[:i]) / M[i, i]
    return c


def weight_from_moments(moments: MomentSet, degree: int, *,
                        grid_points: int = 801,
                        x_max: float | None = None) -> WeightFunction:
    """Basis expansion whose first degree+1 moments match the targets exactly.

    Finite support uses shifted Legendre polynomials on [0, R]; infinite
    support uses Laguerre functions on [0, inf). Both moment systems are
    lower triangular and are solved in extended precision; the relative
    moment residuals and the equilibrated condition estimate are reported in
    the diagnostics. A condition estimate beyond 1e12 raises
    IllConditionedError (lower the degree).
    """
    if degree < 0 or degree > moments.n_max:
        raise InvalidParameterError("need 0 <= degree <= moments.n_max")
    R = moments.support[1]
    finite = math.isfinite(R)
    d1 = degree + 1
    M = _legendre_moment_matrix(degree, R) if finite else _laguerre_moment_matrix(degree)
    rhs = moments.moments[:d1].astype(_LD)

    scale = 1.0 / np.max(np.abs(M), axis=1)
    Ms = M * scale[:, None]
    cond = float(np.linalg.cond(Ms.astype(float)))
    if cond > CONDITION_LIMIT:
        raise IllConditionedError(
            f"moment system condition estimate {cond:.3e} exceeds {CONDITION_LIMIT:.0e}"
        )
    c = _solve_lower_triangular(Ms, rhs * scale)
    resid = np.abs(M @ c - rhs) / np.maximum(np.abs(rhs), _LD(1e-300))
    coeffs = c.astype(float)
    coeffs.flags.writeable = False

    if finite:
        grid_x = np.linspace(0.0, R, grid_points, endpoint=False)
        basis = Basis.SHIFTED_LEGENDRE
    else:
        span = x_max if x_max is not None else max(20.0, 2.0 * degree)
        grid_x = np.linspace(0.0, span, grid_points)
        basis = Basis.GENERALIZED_LAGUERRE
    wf = WeightFunction(
        support=moments.support, basis=basis, coeffs=coeffs,
        grid_x=grid_x, grid_w=np.zeros_like(grid_x), min_value=0.0,
        method=Method.MOMENT_RECONSTRUCTION,
        diagnostics={
            "degree": degree,
            "condition_estimate": cond,
            "moment_residuals": resid.astype(float),
        },
    )
    grid_w = wf.evaluate(grid_x)
    grid_x.flags.writeable = False
    grid_w.flags.writeable = False
    return WeightFunction(
        support=wf.support, basis=wf.basis, coeffs=wf.coeffs,
        grid_x=grid_x, grid_w=grid_w, min_value=float(np.min(grid_w)),
        method=wf.method, diagnostics=wf.diagnostics,
    )


# ----------------------------------------------------------------------
# regularized Fourier inversion


def weight_from_fourier(
    params: DeformationParams,
    y_cut: float,
    damping: float,
    x_grid: np.ndarray | None = None,
    *,
    ctrl: SeriesControl | None = None,
    wbar: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    rtol: float = 1e-6,
    nodes: int = 64,
    max_doublings: int = 10,
    decay_tol: float = 1e-6,
) -> WeightFunction:
    """(1/2pi) integral_{-Y}^{Y} exp(-iyx) exp(-eps y^2) Wbar(y) dy on a grid.

    ``wbar`` overrides the series evaluator (used with closed forms). On the
    classical degenerate branch the exact transform 1/(pi (1 - iy)) is used,
    since the series is just its Taylor expansion at 0. The imaginary part of
    the result and the window decay |Wbar(+-Y)| exp(-eps Y^2) are reported as
    diagnostics; a warning is issued when the window does not decay below
    ``decay_tol``.
    """
    if y_cut <= 0 or damping <= 0:
        raise InvalidParameterError("y_cut and damping must be positive")
    radius = convergence_radius(params)
    if x_grid is None:
        span = radius if math.isfinite(radius) else 20.0
        x_grid = np.linspace(0.0, span, 513, endpoint=False)
    x_grid = np.asarray(x_grid, dtype=float)

    if wbar is not None:
        wbar_fn = wbar
    elif params.is_degenerate and abs(abs(params.q) - 1.0) < 1e-9:
        wbar_fn = lambda y: 1.0 / (math.pi * (1.0 - 1j * np.asarray(y)))
    else:
        series_ctrl = ctrl or SeriesControl(n_max=4000, tol=1e-12, min_terms=10)
        wbar_fn = lambda y: _wbar_values(y, params, series_ctrl)

    def integrand(ys: np.ndarray) -> np.ndarray:
        vals = wbar_fn(ys) * np.exp(-damping * ys ** 2)
        return np.exp(-1j * np.outer(x_grid, ys)) * vals[None, :]

    F, panels = adaptive_gl(integrand, -y_cut, y_cut, nodes=nodes,
                            rtol=rtol, max_doublings=max_doublings)
    F = F / (2.0 * math.pi)

    edge = np.array([-y_cut, y_cut])
    window_decay = float(np.max(np.abs(wbar_fn(edge))) *
                         math.exp(-damping * y_cut ** 2))
    if window_decay > decay_tol:
        warnings.warn(
            f"integrand at the window edge is {window_decay:.3e} > {decay_tol:g}; "
            "increase y_cut or damping", stacklevel=2)

    ys, ws = panel_nodes(-y_cut, y_cut, panels, nodes)
    fw = ws * wbar_fn(ys) * np.exp(-damping * ys ** 2)
    wtilde = F.real
    for arr in (x_grid, wtilde, ys, fw):
        arr.flags.writeable = False
    return WeightFunction(
        support=(0.0, radius), basis=None, coeffs=None,
        grid_x=x_grid, grid_w=wtilde, min_value=float(np.min(wtilde)),
        method=Method.FOURIER_INVERSION,
        diagnostics={
            "y_cut": y_cut,
            "damping": damping,
            "panels": panels,
            "imag_max": float(np.max(np.abs(F.imag))),
            "window_decay": window_decay,
            "grid_imag": F.imag,
        },
        _fourier_nodes=ys,
        _fourier_weights=fw,
    )


def fourier_damping_refinement(
    params: DeformationParams,
    y_cut: float,
    dampings: Sequence[float],
    x_grid: np.ndarray | None = None,
    **kwargs,
) -> tuple[list[WeightFunction], list[float]]:
    """Inversions at a decreasing damping ladder, with successive sup-changes.

    The second return value holds sup|W_k - W_{k-1}| between consecutive
    damping levels; a plateau indicates the window, not the damper, limits
    the resolution, and growth under refinement flags a target that is not a
    pointwise function (edge atoms, signed parts).
    """
    if len(dampings) < 2 or any(b >= a for a, b in zip(dampings, dampings[1:])):
        raise InvalidParameterError("dampings must strictly decrease")
    weights = [weight_from_fourier(params, y_cut, eps, x_grid, **kwargs)
               for eps in dampings]
    changes = [float(np.max(np.abs(b.grid_w - a.grid_w)))
               for a, b in zip(weights, weights[1:])]
    return weights, changes


def physical_weight(wtilde: WeightFunction, params: DeformationParams,
                    *, series_cap: int = _GRID_SERIES_CAP) -> WeightFunction:
    """Pointwise W(x) = exp2(x) * Wt(x) on the stored grid (grid-only result)."""
    vals = _exp2_values(wtilde.grid_x, params, n_cap=series_cap)
    w_phys = wtilde.grid_w * vals
    w_phys.flags.writeable = False
    diag = dict(wtilde.diagnostics)
    diag["physical"] = True
    return WeightFunction(
        support=wtilde.support, basis=None, coeffs=None,
        grid_x=wtilde.grid_x, grid_w=w_phys, min_value=float(np.min(w_phys)),
        method=wtilde.method, diagnostics=diag,
    )


# ----------------------------------------------------------------------
# resolution-of-unity audits


def _integration_upper(weight: WeightFunction, dim: int) -> float:
    upper = weight.support[1]
    if math.isfinite(upper):
        return upper
    # Laguerre-type decay: pick a cutoff with negligible x**n exp(-x) tail
    return max(float(np.max(weight.grid_x)), 3.0 * dim + 60.0)


def moment_ratios(weight: WeightFunction, params: DeformationParams, dim: int,
                  quad: QuadratureSpec | None = None) -> tuple[np.ndarray, int]:
    """M_n = pi * integral x**n Wt dx / |[n]|! for n < dim, by panel doubling.

    Doubling stops when two successive sweeps of the full ratio vector agree
    to ``quad.rtol`` in sup norm; exceeding the doubling cap raises
    QuadratureError (the weight representation is too coarse for x**n).
    """
    quad = quad or QuadratureSpec()
    seq = qp_sequence(dim, params)
    if seq.resonance_index is not None and seq.resonance_index < dim:
        raise RootOfUnityDegeneracyError(seq.resonance_index)
    upper = _integration_upper(weight, dim)
    powers = np.arange(dim)

    def f(xs: np.ndarray) -> np.ndarray:
        return xs[None, :] ** powers[:, None] * weight.evaluate(xs)[None, :]

    prev = None
    panels = 1
    for _ in range(quad.max_doublings + 1):
        integrals = composite_gl(f, 0.0, upper, panels, quad.nodes)
        ratios = math.pi * integrals / seq.abs_factorials[:dim]
        if prev is not None and float(np.max(np.abs(ratios - prev))) <= quad.rtol:
            return ratios, panels
        prev = ratios
        panels *= 2
    raise QuadratureError(
        f"moment ratios did not stabilize at rtol={quad.rtol:g} "
        f"within {panels // 2} panels"
    )


def resolution_residual(weight: WeightFunction, params: DeformationParams,
                        dim: int, quad: QuadratureSpec | None = None) -> float:
    """max_n |M_n - 1| over n < dim; zero means the identity is resolved."""
    ratios, _ = moment_ratios(weight, params, dim, quad)
    return float(np.max(np.abs(ratios - 1.0)))


def identity_matrix_2d(weight: WeightFunction, params: DeformationParams,
                       dim: int, *, n_theta: int | None = None,
                       r_panels: int = 4, nodes: int = 32) -> np.ndarray:
    """Coarse full polar quadrature of the reconstructed identity operator.

    Cross-checks the reduced radial form: the angular trapezoid sum is exact
    for the harmonics in play, so off-diagonal entries should vanish and the
    diagonal should match moment_ratios within quadrature error.
    """
    K = n_theta if n_theta is not None else 4 * dim
    if K < 2 * dim:
        raise InvalidParameterError("n_theta must be at least 2*dim")
    seq = qp_sequence(dim, params)
    if seq.resonance_index is not None and seq.resonance_index < dim:
        raise RootOfUnityDegeneracyError(seq.resonance_index)
    upper = _integration_upper(weight, dim)
    r_max = math.sqrt(upper)
    rs, ws = panel_nodes(0.0, r_max, r_panels, nodes)
    g = ws * rs * weight.evaluate(rs ** 2)

    sigma = np.ones(dim, dtype=complex)
    roots = np.sqrt(seq.numbers[1:dim].astype(complex))
    for n in range(1, dim):
        sigma[n] = sigma[n - 1] * roots[n - 1]
    A = rs[None, :] ** np.arange(dim)[:, None] / sigma[:, None]

    radial = (np.conj(A) * g[None, :]) @ A.T
    theta = 2.0 * math.pi * np.arange(K) / K
    phases = np.exp(1j * np.outer(np.arange(dim), theta))
    angular = (2.0 * math.pi / K) * (np.conj(phases) @ phases.T)
    return radial * angular


# ----------------------------------------------------------------------
# export


def _as_file(file_or_path, mode="w"):
    if hasattr(file_or_path, "write"):
        return file_or_path, False
    return open(file_or_path, mode, encoding="utf-8"), True


def weight_to_csv(weight: WeightFunction, params: DeformationParams,
                  file_or_path, *, series_cap: int = _GRID_SERIES_CAP) -> None:
    """Columns x, wtilde, w_physical (plus wtilde_imag for Fourier results)."""
    phys = physical_weight(weight, params, series_cap=series_cap)
    imag = weight.diagnostics.get("grid_imag")
    fh, own = _as_file(file_or_path)
    try:
        header = "x,wtilde,w_physical"
        if imag is not None:
            header += ",wtilde_imag"
        fh.write(header + "\n")
        for i, x in enumerate(weight.grid_x):
            row = [format_float(x), format_float(weight.grid_w[i]),
                   format_float(phys.grid_w[i])]
            if imag is not None:
                row.append(format_float(imag[i]))
            fh.write(",".join(row) + "\n")
    finally:
        if own:
            fh.close()


def weight_to_json(weight: WeightFunction, file_or_path) -> None:
    upper = weight.support[1]
    payload = {
        "method": weight.method.value,
        "basis": weight.basis.value if weight.basis else None,
        "support": [weight.support[0], upper if math.isfinite(upper) else None],
        "coefficients": None if weight.coeffs is None else
            [format_float(c) for c in weight.coeffs],
        "min_value": format_float(weight.min_value),
        "diagnostics": {
            k: (format_float(v) if isinstance(v, float) else v)
            for k, v in weight.diagnostics.items()
            if not isinstance(v, np.ndarray)
        },
        "grid": {
            "x": [format_float(v) for v in weight.grid_x],
            "wtilde": [format_float(v) for v in weight.grid_w],
        },
    }
    fh, own = _as_file(file_or_path)
    try:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    finally:
        if own:
            fh.close()
