import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phasebound.kinetics import KineticFunction
from phasebound.material import DomainError, State
from phasebound.riemann_full import (
    NoSolutionError,
    WaveKind,
    averaged_strain,
    boundary_states,
    fan_entropy_production,
    h_infinity,
    kinetic_residual,
    solve_case_1a2,
    solve_riemann,
    solve_subsonic_speed,
    theta,
)

from _cases import PATTERNS, check_fan, right_velocity, sample_full


def test_averaged_strain_examples(law):
    assert averaged_strain(law, State(0.3, 0.7), State(0.3, 0.7)) == pytest.approx(0.7)
    assert averaged_strain(law, State(0, 0.5), State(-0.5, 2.5)) == pytest.approx(1.0)
    assert averaged_strain(law, State(0, 0.2), State(0, 0.4)) == pytest.approx(0.3)
    with pytest.raises(DomainError):
        averaged_strain(law, State(0, 1.5), State(0, 0.4))


def test_subsonic_speed_small_h_tends_to_c3(law, phimax):
    Vs = [solve_subsonic_speed(law, phimax, h) for h in (1e-2, 1e-4, 1e-6)]
    assert all(abs(V - law.c3) < 10 * h for V, h in zip(Vs, (1e-2, 1e-4, 1e-6)))
    assert Vs[0] < Vs[1] < Vs[2] <= law.c3


def test_subsonic_speed_solves_kinetic_relation(law, phimax):
    for h in (0.05, 0.3, 0.9, 1.3, 2.0):
        V = solve_subsonic_speed(law, phimax, h)
        assert -law.c3 < V <= law.c3
        if V != 0.0:
            assert theta(law, h, V) == pytest.approx(phimax(V), abs=1e-11)
        else:
            lo, hi = phimax.at_zero()
            assert lo - 1e-12 <= theta(law, h, 0.0) <= hi + 1e-12


def test_case_1a1_example_is_stationary(law, phimax):
    # theta(0) = 1.5 (2 - h^2) = 1.5 = phi(0+) for h = 1
    fan = solve_riemann(law, phimax, State(0, 0.5), State(-0.5, 2.5))
    assert fan.case == "1a1"
    V = fan.waves[1].speed
    assert V == 0.0
    wm_, wp_ = fan.states[1].w, fan.states[2].w
    assert wm_ == pytest.approx((law.c3 + V) / (law.c1 + V))
    assert wp_ == pytest.approx((law.c1 - V) / (law.c3 - V))
    rh, kin, ok = check_fan(law, fan, "1a1")
    assert ok and rh < 1e-12 and kin < 1e-12


def test_case_1a1_small_h_limit_states(law, phimax):
    uL = State(0.1, 0.3)
    wR = 2.5
    fan = solve_riemann(law, phimax, uL, State(right_velocity(law, uL, wR, 1e-7), wR))
    um, up = fan.states[1], fan.states[2]
    assert um.v == pytest.approx(uL.v - law.c1 * uL.w, abs=1e-6)
    assert um.w == pytest.approx(0.0, abs=1e-6)
    assert up.w == pytest.approx(math.sqrt(phimax.derivative_at_c3() / law.c3), abs=1e-6)
    assert up.w == pytest.approx(law.wm, abs=1e-6)


def test_case_1a2_examples(law, phimax):
    uL, wR = State(0.0, 0.4), 2.5
    fan = solve_riemann(law, phimax, uL, State(right_velocity(law, uL, wR, 0.0), wR))
    assert fan.case == "1a2"
    assert fan.waves[1].speed == pytest.approx(law.c3, abs=1e-14)
    fan = solve_riemann(law, phimax, uL, State(right_velocity(law, uL, wR, -0.2), wR))
    V = fan.waves[1].speed
    assert law.c3 <= V < law.c1
    # jump relations across the boundary with u- on the phase-1 characteristic
    rh, _, ok = check_fan(law, fan, "1a2")
    assert ok and rh < 1e-12
    # dense scan of the jump relations for the speed, independent of the solver
    grid = np.linspace(law.c3, law.c1, 200001)[:-1]
    h = -0.2
    wl = h * (law.c3 + grid) / (law.c1 + grid)
    # RH: sigma(wR) - sigma(wl) = V^2 (wR - wl)
    res = law.k3 * wR - law.k1 * wl - grid**2 * (wR - wl)
    i = np.flatnonzero(np.sign(res[:-1]) != np.sign(res[1:]))
    assert i.size == 1
    assert V == pytest.approx(grid[i[0]], abs=2e-5)
    assert V == pytest.approx((law.c3 * wR - law.c1 * h) / (wR - h), rel=1e-14)


def test_case_1a2_limit_and_existence(law, phimax):
    uL, wR = State(0.2, 0.3), 2.5
    fan = solve_riemann(law, phimax, uL, State(right_velocity(law, uL, wR, -1e-8), wR))
    assert fan.waves[1].speed == pytest.approx(law.c3, abs=1e-6)
    assert fan.states[1].w == pytest.approx(0.0, abs=1e-6)
    assert fan.states[1].v == pytest.approx(uL.v - law.c1 * uL.w, abs=1e-6)
    hinf = h_infinity(law, wR)
    with pytest.raises(NoSolutionError):
        solve_case_1a2(law, phimax, uL, State(right_velocity(law, uL, wR, hinf - 0.01), wR))
    fan = solve_case_1a2(law, phimax, uL, State(right_velocity(law, uL, wR, hinf + 0.01), wR))
    assert fan.states[1].w > -1.0


def test_case_1b1_examples(law, phimax):
    fan = solve_riemann(law, phimax, State(0, 0.2), State(0, 0.4))
    assert fan.case == "1b1"
    assert fan.states[1] == (pytest.approx(0.2), pytest.approx(0.3))
    const = solve_riemann(law, phimax, State(0.1, 0.2), State(0.1, 0.2))
    assert const.waves == () and const.states == (State(0.1, 0.2),)
    with pytest.raises(NoSolutionError):
        solve_riemann(law, phimax, State(0.0, 0.0), State(-6.0, 0.0))


def test_case_1b1_tie_at_wM(law, phimax):
    uL = State(0.0, 0.5)
    fan = solve_riemann(law, phimax, uL, State(right_velocity(law, uL, 0.5, law.wM), 0.5))
    assert fan.case == "1b1"
    assert fan.states[1].w == pytest.approx(law.wM, abs=1e-15)


def test_case_1b2_symmetric(law, phimax):
    fan = solve_riemann(law, phimax, State(0, 0.9), State(2.4, 0.9))
    assert fan.case == "1b2"
    assert averaged_strain(law, fan.left, fan.right) == pytest.approx(1.5)
    Vp, V = fan.waves[1].speed, fan.waves[2].speed
    assert Vp == pytest.approx(-V, abs=1e-10)
    u1, u2, u3 = fan.states[1], fan.states[2], fan.states[3]
    assert u1.w == pytest.approx(u3.w, abs=1e-10)
    assert u2.v == pytest.approx(0.5 * (fan.left.v + fan.right.v), abs=1e-10)
    rh, kin, ok = check_fan(law, fan, "1b2")
    assert ok and rh < 1e-10 and kin < 1e-9


def test_case_1b2_limit(law, phimax):
    uL = State(0.0, 0.5)
    fan = solve_riemann(law, phimax, uL, State(right_velocity(law, uL, 0.6, law.wM + 1e-8), 0.6))
    assert fan.case == "1b2"
    assert abs(fan.waves[1].speed) < 1e-6 and abs(fan.waves[2].speed) < 1e-6
    assert fan.states[1].w == pytest.approx(law.wM, abs=1e-6)
    assert fan.states[3].w == pytest.approx(law.wM, abs=1e-6)
    assert fan.states[2].w == pytest.approx(law.k1 / law.k3 * law.wM, abs=1e-5)


def test_case_1c1_example(law, phimax):
    fan = solve_riemann(law, phimax, State(0, 2.2), State(0, 2.6))
    assert fan.case == "1c1"
    assert fan.speeds.tolist() == [-law.c3, law.c3]
    # the jump relations across -c3 and +c3 fix v* = vL + c3 (h - wL) = 0.2
    assert fan.states[1] == (pytest.approx(0.2), pytest.approx(2.4))
    rh, _, ok = check_fan(law, fan, "1c1")
    assert ok and rh < 1e-14


def test_constant_phase3(law, phimax):
    fan = solve_riemann(law, phimax, State(0.3, 2.4), State(0.3, 2.4))
    assert fan.waves == ()


def test_spinodal_input_rejected(law, phimax):
    with pytest.raises(DomainError):
        solve_riemann(law, phimax, State(0, 1.5), State(0, 2.4))


@pytest.mark.parametrize("case", ["1a1", "1a2"])
def test_case_1d_is_reflection(law, phimax, case):
    rng = np.random.default_rng(3)
    for _ in range(20):
        uL, uR = sample_full(case, rng)
        fan = solve_riemann(law, phimax, uL, uR)
        d = solve_riemann(law, phimax, State(-uR.v, uR.w), State(-uL.v, uL.w))
        assert d.case == "1d" + case[2:]
        back = d.reflected()
        assert np.allclose(back.speeds, fan.speeds, atol=1e-14)
        assert np.allclose(np.array(back.states), np.array(fan.states), atol=1e-14)
        assert d.boundary()[0].speed == pytest.approx(-fan.boundary()[0].speed, abs=1e-15)


@pytest.mark.parametrize("case", sorted(c for c in PATTERNS if c.startswith("1")))
def test_random_fans_are_admissible(law, phimax, case):
    rng = np.random.default_rng(11)
    for _ in range(100):
        uL, uR = sample_full(case, rng)
        fan = solve_riemann(law, phimax, uL, uR)
        rh, kin, ok = check_fan(law, fan, case)
        assert ok, (case, uL, uR, fan)
        assert rh <= 1e-10 and kin <= 1e-9
        scale = max(1.0, *(abs(x) for s in fan.states for x in law.entropy_pair(s)))
        assert max(fan_entropy_production(law, fan)) <= 1e-12 * scale
        for i in fan.boundary_indices():
            a, b = fan.states[i], fan.states[i + 1]
            assert law.phase(a.w) != law.phase(b.w)


def test_tabulated_kinetics_fans(law):
    kf = KineticFunction.from_function(law, lambda V: 3.0 * V * abs(V))
    rng = np.random.default_rng(5)
    for case in ("1a1", "1b2", "1c2", "1d1"):
        for _ in range(20):
            uL, uR = sample_full(case, rng)
            fan = solve_riemann(law, kf, uL, uR)
            for wv, a, b in zip(fan.waves, fan.states, fan.states[1:]):
                if wv.kind is WaveKind.SUBSONIC:
                    assert kinetic_residual(law, kf, a, b, wv.speed) <= 1e-9


def _fan_at(law, phimax, uL, wR, h):
    return solve_riemann(law, phimax, uL, State(right_velocity(law, uL, wR, h), wR))


def test_seam_continuity_at_h_zero(law, phimax):
    uL, wR = State(0.1, 0.3), 2.5
    minus = _fan_at(law, phimax, uL, wR, -1e-9)
    plus = _fan_at(law, phimax, uL, wR, 1e-9)
    assert (minus.case, plus.case) == ("1a2", "1a1")
    assert minus.states[1] == (pytest.approx(plus.states[1].v, abs=1e-6), pytest.approx(plus.states[1].w, abs=1e-6))
    assert minus.waves[1].speed == pytest.approx(plus.waves[1].speed, abs=1e-6)


def test_seam_continuity_at_wM(law, phimax):
    uL, wR = State(0.1, 0.3), 0.6
    below = _fan_at(law, phimax, uL, wR, law.wM - 1e-9)
    above = _fan_at(law, phimax, uL, wR, law.wM + 1e-9)
    assert (below.case, above.case) == ("1b1", "1b2")
    mid = below.states[1]
    for s in (above.states[1], above.states[3]):
        assert s.w == pytest.approx(mid.w, abs=1e-6)
    # the outer contacts carry the 1b1 middle state; the thin phase-3 layer
    # in between has vanishing width
    assert above.states[1].v == pytest.approx(mid.v, abs=1e-6)


def test_boundary_states(law, phimax):
    for V in (-0.6, 0.3, 0.9, 1.0, 1.2):
        uL, uR = boundary_states(law, phimax, V)
        fan = solve_riemann(law, phimax, uL, uR)
        b = fan.boundary()
        assert b[0].speed == pytest.approx(V, abs=1e-9)
        assert np.allclose(b[1], uL, atol=1e-9) and np.allclose(b[2], uR, atol=1e-9)
    uL, uR = boundary_states(law, phimax, 1.0)
    assert uL.w == 0.0 and uR.w == pytest.approx(law.wm)
    with pytest.raises(DomainError):
        boundary_states(law, phimax, 0.0)
    with pytest.raises(DomainError):
        boundary_states(law, phimax, 2.0)


@settings(max_examples=60, deadline=None)
@given(st.floats(-0.5, 0.99), st.floats(2.0, 3.5), st.floats(-0.5, 2.5), st.floats(-1, 1))
def test_evaluate_matches_sample(law, phimax, wl, wr, h, vl):
    uL = State(vl, wl)
    try:
        fan = _fan_at(law, phimax, uL, wr, h)
    except NoSolutionError:
        return
    x = np.linspace(-3, 3, 61)
    v, w = fan.evaluate(1.5, x)
    for xi, vi, wi in zip(x, v, w):
        s = fan.sample(xi / 1.5)
        assert (vi, wi) == (s.v, s.w)
