import cmath
import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from qpcoherent import (
    DeformationParams,
    InvalidParameterError,
    RootOfUnityDegeneracyError,
    SeriesControl,
    Verdict,
    convergence_radius,
    exp1,
    exp2,
    qp_sequence,
)

from oracles import ref_exp1, ref_exp2

QUON = DeformationParams(0.5, 1.0)
CLASSICAL = DeformationParams(1.0, 1.0)
TIGHT = SeriesControl(n_max=800, tol=1e-14, min_terms=10)

# mpmath, 60 digits, 200-term partial sums
EXP1_QUON_AT_1 = 3.4627466194550636
EXP2_PHASE077_AT_HALF = 1.6698143445547687


def test_radius_values():
    assert convergence_radius(QUON) == pytest.approx(2.0, abs=1e-15)
    assert convergence_radius(CLASSICAL) == math.inf
    params = DeformationParams(cmath.exp(1j * math.pi / 3), 1.0)
    assert convergence_radius(params) == pytest.approx(1.0, rel=1e-12)


def test_series_control_validation():
    with pytest.raises(InvalidParameterError):
        SeriesControl(n_max=5, tol=1e-10, min_terms=9)
    with pytest.raises(InvalidParameterError):
        SeriesControl(tol=0.0)


def test_exp1_classical_matches_exp():
    # the stopping rule budgets the tail relative to the partial sum, so the
    # achievable absolute error scales with max(1, e**x)
    ctrl = SeriesControl(n_max=500, tol=1e-12, min_terms=10)
    for x in np.linspace(-10.0, 10.0, 41):
        ev = exp1(x, CLASSICAL, ctrl)
        assert ev.verdict is Verdict.CONVERGED
        assert abs(ev.value - math.exp(x)) <= 1e-10 * max(1.0, math.exp(x))
        if x >= 0:
            assert abs(ev.value - math.exp(x)) <= 1e-10 * math.exp(x)


def test_exp1_quon_against_oracle():
    ev = exp1(1.0, QUON, TIGHT)
    assert ev.verdict is Verdict.CONVERGED
    assert ev.value.real == pytest.approx(EXP1_QUON_AT_1, abs=5e-13)
    assert complex(ref_exp1(1.0, 0.5, 1.0)) == pytest.approx(EXP1_QUON_AT_1, abs=1e-15)


def test_exp1_outside_disk_is_a_verdict():
    ev = exp1(3.0, QUON)
    assert ev.verdict is Verdict.DIVERGENT_INPUT
    assert math.isnan(ev.value.real)
    assert ev.terms_used == 0


def test_exp1_converged_tail_contract():
    ev = exp1(1.2, QUON, SeriesControl(n_max=500, tol=1e-10, min_terms=10))
    assert ev.verdict is Verdict.CONVERGED
    assert ev.tail_bound <= 1e-10 * max(abs(ev.value), 1.0)


def test_exp2_at_zero_is_exactly_one():
    assert exp2(0.0, QUON).value == 1.0 + 0.0j


def test_exp2_equals_exp1_for_positive_real_numbers():
    # quon deformed numbers are real positive, so the two series coincide
    e1 = exp1(1.0, QUON, TIGHT)
    e2 = exp2(1.0, QUON, TIGHT)
    assert e1.value == pytest.approx(e2.value, rel=1e-14)


def test_exp2_complex_phase_against_oracle():
    params = DeformationParams(cmath.exp(0.77j), 1.0)
    ev = exp2(0.5, params, TIGHT)
    assert ev.verdict is Verdict.CONVERGED
    assert ev.value.real == pytest.approx(EXP2_PHASE077_AT_HALF, abs=1e-12)
    ref = ref_exp2(0.5, cmath.exp(0.77j), 1.0, terms=300)
    assert ref.real == pytest.approx(EXP2_PHASE077_AT_HALF, abs=1e-15)


def test_root_of_unity_degeneracy_raises():
    # q = exp(i pi/4), p = 1 makes [8] vanish
    params = DeformationParams(cmath.exp(1j * math.pi / 4), 1.0)
    with pytest.raises(RootOfUnityDegeneracyError) as err:
        exp2(0.5, params, SeriesControl(n_max=50, tol=1e-12, min_terms=10))
    assert err.value.index == 8


def test_shared_sequence_gives_identical_values():
    seq = qp_sequence(500, QUON)
    a = exp1(0.9, QUON)
    b = exp1(0.9, QUON, seq=seq)
    assert a.value == b.value and a.terms_used == b.terms_used


def test_verdict_flips_across_radius():
    points = [
        DeformationParams(0.5, 1.0),
        DeformationParams(0.7 * cmath.exp(0.4j), cmath.exp(1.1j)),
        DeformationParams(cmath.exp(0.5j), 1.6),
        DeformationParams(0.9, cmath.exp(2.0j)),
    ]
    for params in points:
        R = convergence_radius(params)
        inside = exp1(0.9 * R, params)
        outside = exp1(1.1 * R, params)
        assert inside.verdict is Verdict.CONVERGED
        assert outside.verdict is Verdict.DIVERGENT_INPUT


def test_term_ratios_approach_radius_ratio():
    # the stopping analysis relies on |term_{n+1}/term_n| -> |x|/R
    for params in (QUON, DeformationParams(cmath.exp(0.8j), 1.7)):
        R = convergence_radius(params)
        x = 0.6 * R
        seq = qp_sequence(220, params)
        ratios = [abs(x) / abs(seq.numbers[n]) for n in range(200, 220)]
        np.testing.assert_allclose(ratios, abs(x) / R, rtol=1e-6)


@given(st.floats(0.05, 0.85), st.floats(0.0, 6.2))
def test_exp2_dominates_exp1(frac, phase):
    params = DeformationParams(0.5, cmath.exp(0.9j))
    R = convergence_radius(params)
    x = frac * R * cmath.exp(1j * phase)
    e1 = exp1(x, params, TIGHT)
    e2 = exp2(abs(x), params, TIGHT)
    assume(e1.verdict is Verdict.CONVERGED and e2.verdict is Verdict.CONVERGED)
    assert abs(e1.value) <= e2.value.real * (1 + 1e-12) + 1e-12
