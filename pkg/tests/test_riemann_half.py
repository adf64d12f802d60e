import numpy as np
import pytest

from phasebound.material import MaterialLaw, State
from phasebound.riemann_full import WaveKind, kinetic_residual, solve_riemann
from phasebound.riemann_half import boundary_averaged_strain, mirror_state, solve_half

from _cases import C3, PATTERNS, check_fan, rh_residual, sample_half


def test_mirror_state():
    assert mirror_state(State(0.3, 2.1)) == (-0.3, 2.1)
    assert mirror_state(State(0.0, 0.7)) == (0.0, 0.7)
    u = State(-0.4, 0.8)
    assert mirror_state(mirror_state(u)) == u
    with pytest.raises(ValueError):
        mirror_state(u, "top")


def test_boundary_averaged_strain(law):
    assert boundary_averaged_strain(law, State(0.5, 2.0)) == pytest.approx(2.5)
    assert boundary_averaged_strain(law, State(0.0, 0.3)) == pytest.approx(0.3)
    assert boundary_averaged_strain(law, State(-0.4, 0.8)) == pytest.approx(0.6)
    assert boundary_averaged_strain(law, State(-0.4, 0.8), "right") == pytest.approx(1.0)


def test_case_2a1_example(law, phimax):
    fan = solve_half(law, phimax, State(0.5, 2.0))
    assert fan.case == "2a1"
    assert fan.states[0] == (0.0, pytest.approx(2.5))
    assert [w.kind for w in fan.waves] == [WaveKind.CONTACT_RIGHT]


def _wall_oracle(law, phi, u0, n=20001):
    """Scan-and-bisect for the wall boundary speed of phase-3 data with h0 < wmcr.

    For a trial speed the jump relations, the phase-3 contact to ``u0`` and
    the zero wall velocity fix ``w-, w+, v+`` linearly; the kinetic relation
    then selects the speed.
    """
    c3 = law.c3
    h0 = u0.w + u0.v / c3
    C = 0.5 * (law.k1 - law.k3)

    def states(V):
        # unknowns (w-, w+); v+ = c3 (h0 - w+)
        A = np.array([[-V, V - c3], [-law.k1, law.k3 - V * c3]])
        b = np.array([-c3 * h0, -V * c3 * h0])
        wm_, wp_ = np.linalg.solve(A, b)
        return wm_, wp_, c3 * (h0 - wp_)

    def g(V):
        wm_, wp_, _ = states(V)
        return C * (law.wM * law.wm - wm_ * wp_) - phi(V)

    grid = np.linspace(1e-9, c3 * (1 - 1e-12), n)
    vals = np.array([g(V) for V in grid])
    i = np.flatnonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))[0]
    a, b = grid[i], grid[i + 1]
    for _ in range(200):
        m = 0.5 * (a + b)
        if np.sign(g(m)) == np.sign(g(a)):
            a = m
        else:
            b = m
    V = 0.5 * (a + b)
    return V, states(V)


def test_case_2a2_example(law, phimax):
    u0 = State(-1.5, 2.0)
    assert boundary_averaged_strain(law, u0) == pytest.approx(0.5)
    fan = solve_half(law, phimax, u0)
    assert fan.case.startswith("2a2")
    V, (wm_, wp_, vp) = _wall_oracle(law, phimax, u0)
    assert fan.waves[0].speed == pytest.approx(V, abs=1e-9)
    assert fan.states[0] == (0.0, pytest.approx(wm_, abs=1e-9))
    assert fan.states[1] == (pytest.approx(vp, abs=1e-9), pytest.approx(wp_, abs=1e-9))
    rh, kin, ok = check_fan(law, fan, "2a2")
    assert ok and rh < 1e-10 and kin < 1e-9


def test_equilibrium_data(law, phimax):
    for w0 in (2.0, 2.7, 0.4, -0.3):
        fan = solve_half(law, phimax, State(0.0, w0))
        assert fan.states[0] == (0.0, w0)
        assert all(s == (0.0, w0) for s in fan.states)


def test_threshold_ties_do_not_nucleate(phimax):
    law = MaterialLaw(4.0, 1.0, 1.0, 2.0, wMcr=0.9, wmcr=2.2)
    assert solve_half(law, phimax.__class__(law), State(C3 * (2.2 - 2.4), 2.4)).case == "2a1"
    assert solve_half(law, phimax.__class__(law), State(2.0 * (0.9 - 0.5), 0.5)).case == "2b1"
    assert solve_half(law, phimax.__class__(law), State(2.0 * (0.95 - 0.5), 0.5)).case.startswith("2b2")


@pytest.mark.parametrize("case", sorted(c for c in PATTERNS if c.startswith("2")))
def test_random_half_fans(law, phimax, case):
    rng = np.random.default_rng(17)
    for _ in range(100):
        u0 = sample_half(case, rng)
        fan = solve_half(law, phimax, u0)
        rh, kin, ok = check_fan(law, fan, case)
        assert ok, (case, u0, fan)
        assert rh <= 1e-10 and kin <= 1e-9
        assert fan.states[0].v == 0.0
        assert fan.right == u0
        for i in fan.boundary_indices():
            wv = fan.waves[i]
            if wv.kind is WaveKind.SUBSONIC:
                assert kinetic_residual(law, phimax, fan.states[i], fan.states[i + 1], wv.speed) <= 1e-9


@pytest.mark.parametrize("case", ["2a1", "2b1"])
def test_reflection_principle(law, phimax, case):
    rng = np.random.default_rng(23)
    for _ in range(50):
        u0 = sample_half(case, rng)
        half = solve_half(law, phimax, u0)
        full = solve_riemann(law, phimax, mirror_state(u0), u0)
        x = np.linspace(0.0, 3.0, 301)[1:]
        vh, wh = half.evaluate(1.0, x)
        vf, wf = full.evaluate(1.0, x)
        assert np.allclose(vh, vf, atol=1e-10) and np.allclose(wh, wf, atol=1e-10)


@pytest.mark.parametrize("case", sorted(c for c in PATTERNS if c.startswith("2")))
def test_right_end_is_mirror_of_left_end(law, phimax, case):
    rng = np.random.default_rng(29)
    for _ in range(20):
        u0 = sample_half(case, rng)
        left = solve_half(law, phimax, u0)
        right = solve_half(law, phimax, mirror_state(u0), "right")
        assert right.states[-1].v == 0.0
        back = right.reflected()
        assert np.allclose(back.speeds, left.speeds, atol=1e-14)
        assert np.allclose(np.array(back.states), np.array(left.states), atol=1e-14)


def test_compressed_phase3_gives_supersonic_wall_boundary(law, phimax):
    fan = solve_half(law, phimax, State(-2.5, 2.2))
    assert fan.case == "2a2-supersonic"
    V = fan.waves[0].speed
    assert law.c3 <= V < law.c1
    assert rh_residual(law, fan.states[0], fan.states[1], V) < 1e-12
    assert fan.states[0].v == 0.0
