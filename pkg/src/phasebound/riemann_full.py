"""Exact whole-line Riemann solver for the trilinear law.

The solution of a Riemann problem is a :class:`WaveFan`: a sequence of
constant states separated by contact discontinuities travelling at the sound
speed of their phase, and by at most two phase boundaries.  Subsonic phase
boundaries are closed by the kinetic relation; supersonic ones by the jump
relations alone.  Nucleation inside a single phase is decided by the averaged
strain ``h``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from phasebound.kinetics import KineticFunction, entropy_dissipation_rate
from phasebound.material import DomainError, MaterialLaw, Phase, State


class RiemannError(RuntimeError):
    """A Riemann problem could not be solved."""


class NoSolutionError(RiemannError):
    """The data lie outside the existence region of the relevant case."""


class WaveKind(enum.Enum):
    CONTACT_LEFT = "contact-"
    CONTACT_RIGHT = "contact+"
    SUBSONIC = "subsonic"
    SUPERSONIC = "supersonic"

    @property
    def is_boundary(self) -> bool:
        return self in (WaveKind.SUBSONIC, WaveKind.SUPERSONIC)

    def mirrored(self) -> "WaveKind":
        if self is WaveKind.CONTACT_LEFT:
            return WaveKind.CONTACT_RIGHT
        if self is WaveKind.CONTACT_RIGHT:
            return WaveKind.CONTACT_LEFT
        return self


@dataclass(frozen=True)
class Wave:
    speed: float
    kind: WaveKind


@dataclass(frozen=True)
class WaveFan:
    """Self-similar solution ``u(t, x) = U(x/t)``.

    ``states[i]`` lies between ``waves[i-1]`` and ``waves[i]``.
    """

    states: tuple[State, ...]
    waves: tuple[Wave, ...]
    case: str = ""

    def __post_init__(self):
        if len(self.states) != len(self.waves) + 1:
            raise ValueError("a wave fan needs exactly one more state than waves")

    @property
    def speeds(self) -> np.ndarray:
        return np.array([wv.speed for wv in self.waves], dtype=float)

    @property
    def left(self) -> State:
        return self.states[0]

    @property
    def right(self) -> State:
        return self.states[-1]

    def boundary_indices(self) -> list[int]:
        return [i for i, wv in enumerate(self.waves) if wv.kind.is_boundary]

    def boundary(self) -> tuple[Wave, State, State] | None:
        """The single phase boundary of the fan with its two adjacent states."""
        idx = self.boundary_indices()
        if not idx:
            return None
        if len(idx) > 1:
            raise RiemannError("fan carries more than one phase boundary")
        i = idx[0]
        return self.waves[i], self.states[i], self.states[i + 1]

    def sample(self, xi: float, side: int = -1) -> State:
        """State at ``x/t = xi``.  ``side=-1`` takes the left limit ``x - 0``."""
        count = 0
        for wv in self.waves:
            if wv.speed < xi or (side > 0 and wv.speed == xi):
                count += 1
            else:
                break
        return self.states[count]

    def evaluate(self, t: float, x) -> tuple[np.ndarray, np.ndarray]:
        """Velocity and strain arrays at time ``t > 0`` and positions ``x``."""
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self.speeds, x / t, side="left")
        vs = np.array([s.v for s in self.states])
        ws = np.array([s.w for s in self.states])
        return vs[idx], ws[idx]

    def reflected(self) -> "WaveFan":
        """Image under ``(v, w)(x) -> (-v, w)(-x)``."""
        states = tuple(State(0.0 - s.v, s.w) for s in reversed(self.states))
        waves = tuple(Wave(0.0 - wv.speed, wv.kind.mirrored()) for wv in reversed(self.waves))
        return WaveFan(states, waves, self.case)


def mirror(u: State) -> State:
    return State(0.0 - u[0], u[1])


def constant_fan(u: State, case: str = "constant") -> WaveFan:
    return WaveFan((State(*u),), (), case)


# -- jump relations and small helpers ----------------------------------------------


def rh_residuals(law: MaterialLaw, um: State, up: State, V: float) -> tuple[float, float]:
    """Residuals of the two jump relations across a wave of speed ``V``."""
    dv = up[0] - um[0]
    dw = up[1] - um[1]
    return V * dw + dv, V * dv + law.sigma(up[1]) - law.sigma(um[1])


def averaged_strain(law: MaterialLaw, uL: State, uR: State) -> float:
    cl = law.wave_speed(uL[1])
    cr = law.wave_speed(uR[1])
    return (cl * uL[1] + cr * uR[1] + uR[0] - uL[0]) / (cl + cr)


def _snap(law: MaterialLaw, w: float, phase: Phase) -> float:
    """Push a strain that missed its phase by rounding back onto the knot."""
    if phase is Phase.H1 and w > law.wM and w - law.wM <= 1e-12 * law.wM:
        return law.wM
    if phase is Phase.H3 and w < law.wm and law.wm - w <= 1e-12 * law.wm:
        return law.wm
    return w


def _require(law: MaterialLaw, w: float, phase: Phase, what: str) -> None:
    if not w > -1.0 or law.phase(w) is not phase:
        raise NoSolutionError(f"{what}: strain {w} is not in phase {phase.name}")


def same_phase_middle(law: MaterialLaw, phase: Phase, vl, wl, vr, wr):
    """Middle state of the two-contact solution between states of one phase.

    Works on scalars or arrays; returns ``(v*, w*)``.  No phase check is done
    here; callers decide whether ``w*`` requires nucleation.
    """
    c = law.c1 if phase is Phase.H1 else law.c3
    h = 0.5 * (wl + wr) + (vr - vl) / (2.0 * c)
    return vl + c * (h - wl), h


def _decreasing_root(g, lo: float, hi: float, jump_at_zero: bool) -> float:
    """Root of a decreasing function ``g(V, side)`` with ``g(lo) > 0 > g(hi)``.

    When ``g`` jumps down across 0 and straddles zero there, 0 is returned.
    """
    if jump_at_zero and lo < 0.0 < hi:
        g_minus, g_plus = g(0.0, -1), g(0.0, 1)
        if g_minus >= 0.0 >= g_plus:
            return 0.0
        if g_plus > 0.0:
            lo = 0.0
        else:
            hi = 0.0
    side_lo = 1 if lo == 0.0 else -1
    side_hi = -1 if hi == 0.0 else 1
    g_lo, g_hi = g(lo, side_lo), g(hi, side_hi)
    if g_lo == 0.0:
        return lo
    if g_hi == 0.0:
        return hi
    if not (g_lo > 0.0 > g_hi):
        raise NoSolutionError(f"no sign change of the kinetic residual on [{lo}, {hi}]")
    return brentq(lambda x: g(x, side_lo if x == lo else side_hi), lo, hi,
                  xtol=1e-300, rtol=4.0 * np.finfo(float).eps, maxiter=500)


# -- phase 1 on the left, phase 3 on the right --------------------------------------


def theta(law: MaterialLaw, h: float, V: float) -> float:
    """Dissipation of the single-boundary fan as a function of its speed."""
    c1, c3 = law.c1, law.c3
    if V >= c3:
        return -math.inf
    ratio = (c3 + V) * (c1 - V) / ((c1 + V) * (c3 - V))
    return 0.5 * (law.k1 - law.k3) * (law.wM * law.wm - ratio * h * h)


def solve_subsonic_speed(law: MaterialLaw, kinetic: KineticFunction, h: float) -> float:
    """Speed ``V`` of the subsonic boundary solving ``theta(V) = phi(V)``."""
    if not h > 0.0:
        raise DomainError(f"subsonic boundary requires h > 0, got {h}")
    c3 = law.c3
    hi = c3 * (1.0 - 4.0 * np.finfo(float).eps)

    def g(V, side):
        return theta(law, h, V) - kinetic(V, side)

    if g(hi, 1) >= 0.0:
        # h is so small that the root is within rounding of c3.
        return hi
    return _decreasing_root(g, kinetic.v_min, hi, kinetic.jumps_at_zero)


def solve_case_1a1(law: MaterialLaw, kinetic: KineticFunction, uL: State, uR: State,
                   h: float | None = None) -> WaveFan:
    """Contact, subsonic boundary, contact (``h > 0``)."""
    c1, c3 = law.c1, law.c3
    if h is None:
        h = averaged_strain(law, uL, uR)
    V = solve_subsonic_speed(law, kinetic, h)
    wm_ = _snap(law, (c3 + V) / (c1 + V) * h, Phase.H1)
    wp_ = _snap(law, (c1 - V) / (c3 - V) * h, Phase.H3)
    _require(law, wm_, Phase.H1, "case 1a1 left boundary state")
    _require(law, wp_, Phase.H3, "case 1a1 right boundary state")
    um = State(uL[0] - c1 * uL[1] + c1 * wm_, wm_)
    up = State(uR[0] + c3 * uR[1] - c3 * wp_, wp_)
    return WaveFan(
        (State(*uL), um, up, State(*uR)),
        (Wave(-c1, WaveKind.CONTACT_LEFT), Wave(V, WaveKind.SUBSONIC), Wave(c3, WaveKind.CONTACT_RIGHT)),
        "1a1",
    )


def h_infinity(law: MaterialLaw, wR: float) -> float:
    """Lower end of the existence window of the supersonic case."""
    c1, c3 = law.c1, law.c3
    disc = c3 * c3 * wR * wR + (c1 * c1 + c3 * c3) * wR + c1 * c1
    return (c3 * wR - c1 - math.sqrt(disc)) / (c1 + c3)


def supersonic_speed(law: MaterialLaw, wR: float, h: float) -> float:
    return (law.c3 * wR - law.c1 * h) / (wR - h)


def solve_case_1a2(law: MaterialLaw, kinetic: KineticFunction, uL: State, uR: State,
                   h: float | None = None) -> WaveFan:
    """Contact followed by a supersonic boundary (``h <= 0``)."""
    c1 = law.c1
    if h is None:
        h = averaged_strain(law, uL, uR)
    if h > 0.0:
        raise DomainError(f"supersonic case requires h <= 0, got {h}")
    wR = uR[1]
    V = supersonic_speed(law, wR, h)
    wm_ = h * (law.c3 + V) / (c1 + V)
    if not wm_ > -1.0:
        raise NoSolutionError(
            f"supersonic boundary needs h > h_inf = {h_infinity(law, wR)}, got h = {h}"
        )
    um = State(uL[0] - c1 * uL[1] + c1 * wm_, wm_)
    return WaveFan(
        (State(*uL), um, State(*uR)),
        (Wave(-c1, WaveKind.CONTACT_LEFT), Wave(V, WaveKind.SUPERSONIC)),
        "1a2",
    )


# -- single phase data -------------------------------------------------------------


def _two_contact_fan(law: MaterialLaw, phase: Phase, uL: State, uR: State, case: str) -> WaveFan:
    c = law.c1 if phase is Phase.H1 else law.c3
    vs, ws = same_phase_middle(law, phase, uL[0], uL[1], uR[0], uR[1])
    return WaveFan(
        (State(*uL), State(vs, ws), State(*uR)),
        (Wave(-c, WaveKind.CONTACT_LEFT), Wave(c, WaveKind.CONTACT_RIGHT)),
        case,
    )


def solve_case_1b1(law: MaterialLaw, kinetic: KineticFunction, uL: State, uR: State,
                   h: float | None = None) -> WaveFan:
    """Two phase-1 contacts (``-1 < h <= wM``)."""
    if h is None:
        h = averaged_strain(law, uL, uR)
    if not h > -1.0:
        raise NoSolutionError(f"no solution for phase-1 data with h = {h} <= -1")
    return _two_contact_fan(law, Phase.H1, uL, uR, "1b1")


def solve_case_1c1(law: MaterialLaw, kinetic: KineticFunction, uL: State, uR: State,
                   h: float | None = None) -> WaveFan:
    """Two phase-3 contacts (``h >= wm``)."""
    return _two_contact_fan(law, Phase.H3, uL, uR, "1c1")


def _nucleation_states(law: MaterialLaw, outer: Phase, uL: State, uR: State, Vp: float, V: float):
    """States of the four-wave fan for given inner boundary speeds ``Vp < 0 < V``."""
    if outer is Phase.H1:
        c, ko, ki = law.c1, law.k1, law.k3
    else:
        c, ko, ki = law.c3, law.k3, law.k1
    A = uL[0] - c * uL[1]
    B = uR[0] + c * uR[1]
    r1 = (ko - Vp * Vp) / (ki - Vp * Vp)
    r2 = (ki - V * V) / (ko - V * V)
    w1 = (B - A) / (c - Vp * (r1 - 1.0) - V * r1 * (r2 - 1.0) + c * r1 * r2)
    w2 = r1 * w1
    w3 = r2 * w2
    v1 = A + c * w1
    v2 = v1 - Vp * (w2 - w1)
    v3 = B - c * w3
    return State(v1, w1), State(v2, w2), State(v3, w3)


def _nucleation_residuals(law, kinetic, outer, uL, uR, Vp, V):
    u1, u2, u3 = _nucleation_states(law, outer, uL, uR, Vp, V)
    inner = Phase.H3 if outer is Phase.H1 else Phase.H1
    r1 = 0.5 * (law.k1 - law.k3) * (law.wM * law.wm - u1.w * u2.w)
    r2 = 0.5 * (law.k1 - law.k3) * (law.wM * law.wm - u2.w * u3.w)
    if outer is Phase.H1:
        rate1, rate2 = r1, -r2
    else:
        rate1, rate2 = -r1, r2
    return (rate1 - kinetic.target(Vp, outer, side=-1),
            rate2 - kinetic.target(V, inner, side=1))


def _nucleation_fan(law, kinetic, outer, uL, uR, h, case) -> WaveFan:
    c3 = law.c3
    if outer is Phase.H1:
        c, ko, ki = law.c1, law.k1, law.k3
    else:
        c, ko, ki = law.c3, law.k3, law.k1
    C = 0.5 * (law.k1 - law.k3)
    wMwm = law.wM * law.wm
    s_max = min(c3 * (1.0 - 4.0 * np.finfo(float).eps), -kinetic.v_min)

    def w1_of(s):
        r = (ko - s * s) / (ki - s * s)
        return r, c * h / (c + s * (r - 1.0))

    if outer is Phase.H1:
        # Left boundary H1 -> H3 at -s: C (wM wm - w1 w2) = phi(-s).
        def g(s, side):
            r, w1 = w1_of(s)
            return C * (wMwm - r * w1 * w1) - kinetic(-s, -side)
        sign = 1.0
    else:
        # Right boundary H1 -> H3 at +s: C (wM wm - w2 w3) = phi(s).
        def g(s, side):
            r, w1 = w1_of(s)
            return C * (wMwm - r * w1 * w1) - kinetic(s, side)
        sign = -1.0
    lo_val = g(0.0, 1)
    hi_val = g(s_max, 1)
    if lo_val == 0.0:
        s = 0.0
    elif sign * lo_val < 0.0 < sign * hi_val:
        s = brentq(lambda x: g(x, 1), 0.0, s_max, xtol=1e-300,
                   rtol=4.0 * np.finfo(float).eps, maxiter=500)
    else:
        raise NoSolutionError(f"case {case}: no nucleation speed for h = {h}")
    Vp, V = -s, s
    res = _nucleation_residuals(law, kinetic, outer, uL, uR, Vp, V)
    scale = max(1.0, C * wMwm)
    if max(abs(res[0]), abs(res[1])) > 1e-11 * scale:
        Vp, V = _newton_polish(law, kinetic, outer, uL, uR, Vp, V, scale)
    u1, u2, u3 = _nucleation_states(law, outer, uL, uR, Vp, V)
    inner = Phase.H3 if outer is Phase.H1 else Phase.H1
    w1 = _snap(law, u1.w, outer)
    w2 = _snap(law, u2.w, inner)
    w3 = _snap(law, u3.w, outer)
    u1 = State(uL[0] - c * uL[1] + c * w1, w1)
    u3 = State(uR[0] + c * uR[1] - c * w3, w3)
    u2 = State(u2.v, w2)
    _require(law, w1, outer, f"case {case} state u1")
    _require(law, w2, inner, f"case {case} state u2")
    _require(law, w3, outer, f"case {case} state u3")
    return WaveFan(
        (State(*uL), u1, u2, u3, State(*uR)),
        (Wave(-c, WaveKind.CONTACT_LEFT), Wave(Vp, WaveKind.SUBSONIC),
         Wave(V, WaveKind.SUBSONIC), Wave(c, WaveKind.CONTACT_RIGHT)),
        case,
    )


def _newton_polish(law, kinetic, outer, uL, uR, Vp, V, scale, iters: int = 20):
    """Damped Newton on the two kinetic residuals with independent speeds."""
    lim = law.c3 * (1.0 - 1e-12)

    def F(x):
        return np.array(_nucleation_residuals(law, kinetic, outer, uL, uR, x[0], x[1]))

    x = np.array([Vp, V])
    r = F(x)
    for _ in range(iters):
        if np.max(np.abs(r)) <= 1e-11 * scale:
            break
        J = np.empty((2, 2))
        for j in range(2):
            step = 1e-7 * law.c3
            e = np.zeros(2)
            e[j] = step
            J[:, j] = (F(x + e) - F(x - e)) / (2.0 * step)
        dx = np.linalg.solve(J, -r)
        damp = 1.0
        while damp > 1e-6:
            xn = x + damp * dx
            if -lim < xn[0] < 0.0 < xn[1] < lim:
                rn = F(xn)
                if np.max(np.abs(rn)) < np.max(np.abs(r)):
                    x, r = xn, rn
                    break
            damp *= 0.5
        else:
            break
    if np.max(np.abs(r)) > 1e-9 * scale:
        raise RiemannError(f"nucleation solve did not converge, residuals {r.tolist()}")
    return float(x[0]), float(x[1])


def solve_case_1b2(law: MaterialLaw, kinetic: KineticFunction, uL: State, uR: State,
                   h: float | None = None) -> WaveFan:
    """Nucleation of a phase-3 layer inside phase-1 data (``h > wM``)."""
    if h is None:
        h = averaged_strain(law, uL, uR)
    return _nucleation_fan(law, kinetic, Phase.H1, uL, uR, h, "1b2")


def solve_case_1c2(law: MaterialLaw, kinetic: KineticFunction, uL: State, uR: State,
                   h: float | None = None) -> WaveFan:
    """Nucleation of a phase-1 layer inside phase-3 data (``h < wm``)."""
    if h is None:
        h = averaged_strain(law, uL, uR)
    if not h > 0.0:
        raise NoSolutionError(f"no solution for phase-3 data with h = {h} <= 0")
    return _nucleation_fan(law, kinetic, Phase.H3, uL, uR, h, "1c2")


# -- dispatch ----------------------------------------------------------------------


def solve_riemann(law: MaterialLaw, kinetic: KineticFunction, uL: State, uR: State) -> WaveFan:
    """Admissible solution of the Riemann problem with data ``uL | uR``."""
    uL, uR = State(float(uL[0]), float(uL[1])), State(float(uR[0]), float(uR[1]))
    pl, pr = law.stable_phase(uL.w), law.stable_phase(uR.w)
    if uL == uR:
        return constant_fan(uL)
    if pl is Phase.H3 and pr is Phase.H1:
        fan = solve_riemann(law, kinetic, mirror(uR), mirror(uL)).reflected()
        return WaveFan(fan.states, fan.waves, "1d" + fan.case[2:])
    h = averaged_strain(law, uL, uR)
    if pl is Phase.H1 and pr is Phase.H3:
        return (solve_case_1a1 if h > 0.0 else solve_case_1a2)(law, kinetic, uL, uR, h)
    if pl is Phase.H1:
        return (solve_case_1b1 if h <= law.wM else solve_case_1b2)(law, kinetic, uL, uR, h)
    return (solve_case_1c1 if h >= law.wm else solve_case_1c2)(law, kinetic, uL, uR, h)


def boundary_states(law: MaterialLaw, kinetic: KineticFunction, V: float,
                    vL: float = 0.0, wR: float | None = None) -> tuple[State, State]:
    """Data ``uL* | uR*`` joined by a single phase boundary of speed ``V``.

    Subsonic speeds use the kinetic relation; ``V = c3`` gives the
    characteristic boundary with ``wL* = 0``; supersonic speeds in
    ``]c3, c1[`` need the right strain ``wR`` (default ``wm + 0.5``).
    """
    c1, c3 = law.c1, law.c3
    C = 0.5 * (law.k1 - law.k3)
    if V == 0.0:
        raise DomainError("a stationary boundary is not determined by its speed")
    if -c3 < V < c3:
        q = (law.k1 - V * V) / (law.k3 - V * V)
        P = law.wM * law.wm - kinetic(V) / C
        wl = _snap(law, math.sqrt(P / q), Phase.H1)
        wr = _snap(law, math.sqrt(P * q), Phase.H3)
    elif V == c3:
        wl, wr = 0.0, math.sqrt(kinetic.derivative_at_c3() / c3)
    elif c3 < V < c1:
        wr = law.wm + 0.5 if wR is None else wR
        wl = (c3 * c3 - V * V) * wr / (c1 * c1 - V * V)
    else:
        raise DomainError(f"boundary speed must lie in ]-c3, c1[, got {V}")
    _require(law, wl, Phase.H1, "boundary data left state")
    _require(law, wr, Phase.H3, "boundary data right state")
    return State(vL, wl), State(vL - V * (wr - wl), wr)


def fan_entropy_production(law: MaterialLaw, fan: WaveFan) -> list[float]:
    """``[F] - V [U]`` across every wave of a fan (non-positive when admissible)."""
    out = []
    for i, wv in enumerate(fan.waves):
        Um, Fm = law.entropy_pair(fan.states[i])
        Up, Fp = law.entropy_pair(fan.states[i + 1])
        out.append((Fp - Fm) - wv.speed * (Up - Um))
    return out


def kinetic_residual(law: MaterialLaw, kinetic: KineticFunction, um: State, up: State, V: float) -> float:
    """Mismatch between the dissipation rate and the kinetic target at speed ``V``."""
    rate = entropy_dissipation_rate(law, um, up)
    left = law.stable_phase(um[1])
    if V == 0.0:
        lo = kinetic.target(0.0, left, side=-1)
        hi = kinetic.target(0.0, left, side=1)
        lo, hi = min(lo, hi), max(lo, hi)
        return max(0.0, lo - rate, rate - hi)
    return abs(rate - kinetic.target(V, left))
