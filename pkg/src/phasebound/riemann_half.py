"""Riemann problem on a half line with a fixed end (zero velocity at the wall).

For a left end the domain is ``x > 0`` and the data are the constant state
``u0``.  A new phase may nucleate at the wall when the averaged strain ``h0``
crosses the critical initiation thresholds of the material law.  A right end
is handled by the reflection ``(v, w)(x) -> (-v, w)(-x)``.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq

from phasebound.kinetics import KineticFunction
from phasebound.material import MaterialLaw, Phase, State
from phasebound.riemann_full import (
    NoSolutionError,
    Wave,
    WaveFan,
    WaveKind,
    _require,
    _snap,
    mirror,
)

SIDES = ("left", "right")


def mirror_state(u: State, side: str = "left") -> State:
    """Ghost state across the wall: same strain, opposite velocity."""
    if side not in SIDES:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    return mirror(u)


def boundary_averaged_strain(law: MaterialLaw, u0: State, side: str = "left") -> float:
    c = law.wave_speed(u0[1])
    if side == "left":
        return u0[1] + u0[0] / c
    if side == "right":
        return u0[1] - u0[0] / c
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def solve_half(law: MaterialLaw, kinetic: KineticFunction, u0: State, side: str = "left") -> WaveFan:
    """Admissible wall solution; ``states[0]`` (left end) is the wall trace."""
    u0 = State(float(u0[0]), float(u0[1]))
    if side == "right":
        fan = _solve_left(law, kinetic, mirror(u0))
        return fan.reflected()
    if side != "left":
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    return _solve_left(law, kinetic, u0)


def _solve_left(law: MaterialLaw, kinetic: KineticFunction, u0: State) -> WaveFan:
    phase = law.stable_phase(u0.w)
    h0 = boundary_averaged_strain(law, u0)
    if phase is Phase.H3:
        if h0 >= law.wmcr:
            return _contact_fan(law, u0, h0, law.c3, "2a1")
        if h0 > 0.0:
            return _wall_nucleation(law, kinetic, u0, h0, Phase.H3)
        return _wall_supersonic(law, u0)
    if h0 <= law.wMcr:
        if not h0 > -1.0:
            raise NoSolutionError(f"no wall solution for phase-1 data with h0 = {h0} <= -1")
        return _contact_fan(law, u0, h0, law.c1, "2b1")
    return _wall_nucleation(law, kinetic, u0, h0, Phase.H1)


def _contact_fan(law: MaterialLaw, u0: State, h0: float, c: float, case: str) -> WaveFan:
    if u0.v == 0.0:
        return WaveFan((u0,), (), case)
    return WaveFan((State(0.0, h0), u0), (Wave(c, WaveKind.CONTACT_RIGHT),), case)


def _wall_states(law: MaterialLaw, outer: Phase, h0: float, V: float) -> tuple[float, float]:
    """Wall strain and strain behind the boundary for a boundary speed ``V``."""
    c1, c3 = law.c1, law.c3
    if outer is Phase.H3:
        wn = c3 * (c3 + V) * h0 / (c1 * c1 + c3 * V)
        wp = c3 * (c1 * c1 - V * V) * h0 / ((c1 * c1 + c3 * V) * (c3 - V))
    else:
        wn = c1 * (c1 + V) * h0 / (c3 * c3 + c1 * V)
        wp = c1 * (c3 * c3 - V * V) * h0 / ((c3 * c3 + c1 * V) * (c1 - V))
    return wn, wp


def _wall_nucleation(law: MaterialLaw, kinetic: KineticFunction, u0: State, h0: float,
                     outer: Phase) -> WaveFan:
    """Subsonic boundary leaving the wall into data of phase ``outer``."""
    C = 0.5 * (law.k1 - law.k3)
    wMwm = law.wM * law.wm
    inner = Phase.H1 if outer is Phase.H3 else Phase.H3
    c_out = law.c3 if outer is Phase.H3 else law.c1
    hi = law.c3 * (1.0 - 4.0 * np.finfo(float).eps)
    if outer is Phase.H1:
        hi = min(hi, -kinetic.v_min)

    def g(V, side=1):
        wn, wp = _wall_states(law, outer, h0, V)
        if outer is Phase.H3:
            # Phase 1 at the wall on the left of the boundary: rate = phi(V).
            return C * (wMwm - wn * wp) - kinetic(V, side)
        # Phase 3 at the wall: rate = -C (wM wm - w- w+) = -phi(-V).
        return -C * (wMwm - wn * wp) + kinetic(-V, -side)

    g0 = g(0.0, 1)
    case = "2a2" if outer is Phase.H3 else "2b2"
    if g0 <= 0.0:
        V = 0.0
        case += "-stationary"
    else:
        if g(hi) >= 0.0:
            V = hi
        else:
            V = brentq(g, 0.0, hi, xtol=1e-300, rtol=4.0 * np.finfo(float).eps, maxiter=500)
    wn, wp = _wall_states(law, outer, h0, V)
    wn = _snap(law, wn, inner)
    wp = _snap(law, wp, outer)
    _require(law, wn, inner, f"case {case} wall state")
    _require(law, wp, outer, f"case {case} state behind the boundary")
    um = State(0.0, wn)
    up = State(c_out * h0 - c_out * wp, wp)
    # the contact is kept even at zero strength so the wave pattern is fixed per case
    return WaveFan((um, up, u0), (Wave(V, WaveKind.SUBSONIC), Wave(c_out, WaveKind.CONTACT_RIGHT)), case)


def _wall_supersonic(law: MaterialLaw, u0: State) -> WaveFan:
    """Phase-3 data compressed so hard (``h0 <= 0``) that the boundary is supersonic."""
    v0, w0 = u0
    dk = law.k1 - law.k3
    V = (dk * w0 - math.sqrt(dk * dk * w0 * w0 + 4.0 * law.k1 * v0 * v0)) / (2.0 * v0)
    wn = w0 + v0 / V
    if not (wn > -1.0 and V < law.c1):
        raise NoSolutionError(f"no supersonic wall solution for u0 = {tuple(u0)}")
    _require(law, wn, Phase.H1, "supersonic wall state")
    return WaveFan((State(0.0, wn), u0), (Wave(V, WaveKind.SUPERSONIC),), "2a2-supersonic")
