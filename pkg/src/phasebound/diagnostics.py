"""Wave strengths, Glimm functionals, stability monitors and admissibility residuals.

Strengths are measured by the jump of the strain ``w`` across a wave: ``E1``
for contacts of the left-moving family, ``E2`` for the right-moving family and
``E0`` for phase boundaries.  Norms of states use ``|v| + |w|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from phasebound.glimm import GlimmRun
from phasebound.kinetics import KineticFunction
from phasebound.material import MaterialLaw, State
from phasebound.riemann_full import (
    WaveFan,
    WaveKind,
    averaged_strain,
    kinetic_residual as _fan_kinetic_residual,
    solve_riemann,
)


@dataclass(frozen=True)
class WaveStrengths:
    E0: float = 0.0
    E1: float = 0.0
    E2: float = 0.0
    V: float | None = None


def wave_strengths(fan: WaveFan, law: MaterialLaw | None = None, kinetic: KineticFunction | None = None,
                   characteristic_mode: bool = False) -> WaveStrengths:
    """Signed strain jumps of a fan grouped by wave family.

    In characteristic mode a fan made of a contact and a supersonic boundary
    is split virtually into a boundary part and a right-moving part, with the
    boundary carrying the strain it would have if the data were exactly
    characteristic.
    """
    E0 = E1 = E2 = 0.0
    V = None
    for i, wv in enumerate(fan.waves):
        dw = fan.states[i + 1].w - fan.states[i].w
        if wv.kind is WaveKind.CONTACT_LEFT:
            E1 += dw
        elif wv.kind is WaveKind.CONTACT_RIGHT:
            E2 += dw
        else:
            E0 += dw
            V = wv.speed if V is None else V
    if characteristic_mode and V is not None:
        kinds = [wv.kind for wv in fan.waves]
        if WaveKind.SUPERSONIC in kinds and WaveKind.CONTACT_RIGHT not in kinds:
            if law is None or kinetic is None:
                raise ValueError("characteristic mode needs the material law and kinetic function")
            wplus0 = math.sqrt(kinetic.derivative_at_c3() / law.c3)
            h = averaged_strain(law, fan.left, fan.right)
            i = kinds.index(WaveKind.SUPERSONIC)
            w_minus = fan.states[i].w
            shift = 2.0 * law.c3 * h / (law.c1 + law.c3)
            E2 = fan.right.w - wplus0 - shift
            E0 = wplus0 + shift - w_minus
    return WaveStrengths(E0, E1, E2, V)


# -- per-strip wave bookkeeping ------------------------------------------------------


@dataclass
class StripWaves:
    pos: np.ndarray
    E1: np.ndarray
    E2: np.ndarray
    chi: float
    V: float
    E0: float


def strip_waves(run: GlimmRun, n: int, characteristic_mode: bool = False) -> StripWaves:
    """Strengths of the fans centred on every interface of strip ``n``."""
    law = run.law
    lev = run.levels[n]
    vl, wl, vr, wr = run.interface_states(n)
    c = np.where(law.phase_array(wl) == 1, law.c1, law.c3)
    hs = 0.5 * (wl + wr) + (vr - vl) / (2.0 * c)
    E1 = hs - wl
    E2 = wr - hs
    E0 = 0.0
    V = math.nan
    for idx, fan in ((lev.boundary_index, lev.boundary_fan), (run.wall_interface(n), lev.wall_fan)):
        if idx is None or fan is None:
            continue
        s = wave_strengths(fan, law, run.kinetic, characteristic_mode)
        E1[idx], E2[idx] = s.E1, s.E2
        if s.V is not None:
            E0 += s.E0
            V = s.V
    return StripWaves(run.interface_positions(n), E1, E2, lev.chi, V, E0)


@dataclass(frozen=True)
class FunctionalReport:
    L: float
    B: float
    Q: float
    K: float

    @property
    def G(self) -> float:
        return self.L + self.K * self.Q

    @property
    def Bfun(self) -> float:
        return self.B + self.K * self.Q


def functional_L(sw: StripWaves) -> float:
    return float(np.sum(np.abs(sw.E1)) + np.sum(np.abs(sw.E2)))


def functional_Q(sw: StripWaves, law: MaterialLaw) -> float:
    """Interaction potential of the small waves with the phase boundary."""
    if math.isnan(sw.chi):
        return 0.0
    ramp = max(sw.V - law.c3, 0.0)
    left = sw.pos < sw.chi
    right = ~left
    at = sw.pos == sw.chi
    total = np.sum(np.abs(sw.E2[left])) + np.sum(np.abs(sw.E1[right & ~at])) + ramp * np.sum(np.abs(sw.E2[right]))
    return float(total)


def functionals(run: GlimmRun, K: float = 1.0, characteristic_mode: bool = False) -> dict[str, np.ndarray]:
    """Series of ``L``, ``B`` and ``Q`` over all strips of a run."""
    L, B, Q = [], [], []
    for n in range(len(run.levels)):
        sw = strip_waves(run, n, characteristic_mode)
        L.append(functional_L(sw))
        B.append(abs(sw.E0))
        Q.append(functional_Q(sw, run.law))
    L, B, Q = np.array(L), np.array(B), np.array(Q)
    return {"L": L, "B": B, "Q": Q, "G": L + K * Q, "Bfun": B + K * Q}


def monotonicity_violations(series: dict[str, np.ndarray], K: float, rtol: float = 1e-12) -> list[tuple[str, int, float]]:
    """Levels where ``L + K Q`` or ``B + K Q`` increases beyond rounding."""
    out = []
    for name, base in (("G", series["L"]), ("Bfun", series["B"])):
        f = base + K * series["Q"]
        tol = rtol * max(1.0, float(np.max(np.abs(f))))
        inc = np.diff(f)
        for n in np.flatnonzero(inc > tol):
            out.append((name, int(n), float(inc[n])))
    return out


def calibrate_K(series_list: list[dict[str, np.ndarray]], k_max: float = 1e3) -> float | None:
    """Smallest power of two ``K <= k_max`` making every series non-increasing."""
    K = 1.0
    while K <= k_max:
        if all(not monotonicity_violations(s, K) for s in series_list):
            return K
        K *= 2.0
    return None


def diamond_potential(run: GlimmRun, n: int) -> float | None:
    """Potential of the diamond centred on the boundary interface of level ``n`` (``n >= 1``)."""
    law = run.law
    lev, prev = run.levels[n], run.levels[n - 1]
    if lev.boundary_index is None or math.isnan(prev.chi):
        return None
    vl, wl, vr, wr = run.interface_states(n)
    i = lev.boundary_index
    uW, uE = State(vl[i], wl[i]), State(vr[i], wr[i])
    centres = 0.5 * (run.edges(n - 1)[:-1] + run.edges(n - 1)[1:])
    j = int(np.argmin(np.abs(centres - lev.chi)))
    uS = State(prev.v[j], prev.w[j])
    path = prev.chi + prev.chidot * run.tau
    if lev.chi < path:
        s = wave_strengths(solve_riemann(law, run.kinetic, uW, uS))
        return abs(s.E2)
    sw = wave_strengths(solve_riemann(law, run.kinetic, uW, uS))
    se = wave_strengths(solve_riemann(law, run.kinetic, uS, uE))
    ramp = max((sw.V if sw.V is not None else 0.0) - law.c3, 0.0)
    return abs(se.E1) + ramp * abs(se.E2)


# -- total variation monitors -----------------------------------------------------


def _reference(run: GlimmRun, w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    uL, uR = run.data.base
    law = run.law
    pL = law.phase(uL.w)
    if law.phase(uR.w) is pL:
        return np.full(w.shape, uL.v), np.full(w.shape, uL.w)
    left = law.phase_array(w) == int(pL)
    return np.where(left, uL.v, uR.v), np.where(left, uL.w, uR.w)


def _deviation(run: GlimmRun, v: np.ndarray, w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    rv, rw = _reference(run, w)
    return v - rv, w - rw


def data_norms(run: GlimmRun) -> tuple[float, float]:
    """``N1`` and ``N2`` of the initial data of a run."""
    tl, tr = run.data.total_variation()
    dl, dr = run.data.sup_deviation()
    n1 = tl + tr
    fan = None
    uL, uR = run.data.base
    if run.law.phase(uL.w) is not run.law.phase(uR.w):
        fan = solve_riemann(run.law, run.kinetic, uL, uR)
    b = fan.boundary() if fan is not None else None
    if b is not None and abs(b[0].speed - run.law.c3) <= 1e-12:
        n1 += dl + dr
    return n1, dl + dr


@dataclass
class TVReport:
    tv_level: np.ndarray
    tv_strip: np.ndarray
    sup: np.ndarray
    l1_step: np.ndarray
    l1_step_deviation: np.ndarray
    N1: float
    N2: float

    @property
    def tv_max(self) -> float:
        return float(max(np.max(self.tv_level), np.max(self.tv_strip)))


def _fan_states_tv(run: GlimmRun, fan: WaveFan) -> tuple[float, float]:
    v = np.array([s.v for s in fan.states])
    w = np.array([s.w for s in fan.states])
    dv, dw = _deviation(run, v, w)
    tv = float(np.sum(np.abs(np.diff(dv)) + np.abs(np.diff(dw))))
    return tv, float(np.max(np.abs(dv) + np.abs(dw)))


def tv_monitor(run: GlimmRun) -> TVReport:
    law = run.law
    nlev = len(run.levels)
    tv_level = np.zeros(nlev)
    tv_strip = np.zeros(nlev)
    sup = np.zeros(nlev)
    for n, lev in enumerate(run.levels):
        dv, dw = _deviation(run, lev.v, lev.w)
        tv_level[n] = np.sum(np.abs(np.diff(dv)) + np.abs(np.diff(dw)))
        sup[n] = np.max(np.abs(dv) + np.abs(dw))
        vl, wl, vr, wr = run.interface_states(n)
        c = np.where(law.phase_array(wl) == 1, law.c1, law.c3)
        hs = 0.5 * (wl + wr) + (vr - vl) / (2.0 * c)
        vs = vl + c * (hs - wl)
        contrib = np.abs(vs - vl) + np.abs(hs - wl) + np.abs(vr - vs) + np.abs(wr - hs)
        mid_v, mid_w = _deviation(run, vs, hs)
        mids = np.abs(mid_v) + np.abs(mid_w)
        for idx, fan in ((lev.boundary_index, lev.boundary_fan), (run.wall_interface(n), lev.wall_fan)):
            if idx is None or fan is None:
                continue
            contrib[idx], mids[idx] = _fan_states_tv(run, fan)
        # Jumps between neighbouring fans vanish: the outer states are shared cells.
        tv_strip[n] = float(np.sum(contrib))
        sup[n] = max(sup[n], float(np.max(mids)))
    l1 = np.zeros(max(nlev - 1, 0))
    l1d = np.zeros(max(nlev - 1, 0))
    for n in range(nlev - 1):
        l1[n] = level_l1(run, n, run, n + 1)
        l1d[n] = level_l1(run, n, run, n + 1, deviation=True)
    N1, N2 = data_norms(run)
    return TVReport(tv_level, tv_strip, sup, l1, l1d, N1, N2)


def time_modulus(run: GlimmRun, lags=(1, 4, 16, 64), deviation: bool = True) -> list[tuple[int, int, float]]:
    """``(n, n + lag, L1 distance)`` for all level pairs at the given lags."""
    out = []
    for lag in lags:
        for n in range(0, len(run.levels) - lag, max(1, lag // 2)):
            out.append((n, n + lag, level_l1(run, n, run, n + lag, deviation=deviation)))
    return out


# -- exact L1 distances ------------------------------------------------------------


def pc_l1(edges_a, va, wa, edges_b, vb, wb, lo: float | None = None, hi: float | None = None) -> float:
    """Exact L1 distance of two piecewise-constant functions (constant outside their grids)."""
    edges_a, edges_b = np.asarray(edges_a, float), np.asarray(edges_b, float)
    lo = min(edges_a[0], edges_b[0]) if lo is None else lo
    hi = max(edges_a[-1], edges_b[-1]) if hi is None else hi
    pts = np.unique(np.concatenate([edges_a, edges_b, [lo, hi]]))
    pts = pts[(pts >= lo) & (pts <= hi)]
    mid = 0.5 * (pts[:-1] + pts[1:])
    ia = np.clip(np.searchsorted(edges_a, mid, side="right") - 1, 0, len(va) - 1)
    ib = np.clip(np.searchsorted(edges_b, mid, side="right") - 1, 0, len(vb) - 1)
    dens = np.abs(np.asarray(va)[ia] - np.asarray(vb)[ib]) + np.abs(np.asarray(wa)[ia] - np.asarray(wb)[ib])
    return float(np.sum(dens * np.diff(pts)))


def level_l1(run_a: GlimmRun, n_a: int, run_b: GlimmRun, n_b: int, lo=None, hi=None,
             deviation: bool = False) -> float:
    ea, va, wa = run_a.cells(n_a)
    eb, vb, wb = run_b.cells(n_b)
    if deviation:
        va, wa = _deviation(run_a, va, wa)
        vb, wb = _deviation(run_b, vb, wb)
    return pc_l1(ea, va, wa, eb, vb, wb, lo, hi)


def l1_distance(run_a: GlimmRun, run_b: GlimmRun, t: float, A: float, B: float) -> float:
    """L1 distance on ``[A, B]`` of two runs on the same grid at the level nearest ``t``."""
    if run_a.h != run_b.h or run_a.tau != run_b.tau:
        raise ValueError("runs live on different grids")
    n = run_a.level_at(t)
    if run_a.levels[n].m0 != run_b.levels[n].m0:
        raise ValueError("runs live on different grids")
    return level_l1(run_a, n, run_b, n, A, B)


def fan_l1_distance(fan_a: WaveFan, fan_b: WaveFan, t: float, A: float, B: float,
                    shift_a: float = 0.0, shift_b: float = 0.0) -> float:
    """Exact L1 distance on ``[A, B]`` of two self-similar solutions at time ``t > 0``."""
    def grid(fan, shift):
        xs = shift + fan.speeds * t
        return (np.concatenate([[-np.inf], xs, [np.inf]]),
                np.array([s.v for s in fan.states]), np.array([s.w for s in fan.states]))
    ea, va, wa = grid(fan_a, shift_a)
    eb, vb, wb = grid(fan_b, shift_b)
    pts = np.unique(np.concatenate([ea[1:-1], eb[1:-1], [A, B]]))
    pts = pts[(pts >= A) & (pts <= B)]
    mid = 0.5 * (pts[:-1] + pts[1:])
    ia = np.searchsorted(ea[1:-1], mid, side="right")
    ib = np.searchsorted(eb[1:-1], mid, side="right")
    dens = np.abs(va[ia] - vb[ib]) + np.abs(wa[ia] - wb[ib])
    return float(np.sum(dens * np.diff(pts)))


# -- boundary speed, kinetic and entropy residuals ---------------------------------


def _windowed_tv(pieces, values, lo: float, hi: float) -> float:
    """Variation of a piecewise-constant sequence from jumps strictly inside ``]lo, hi[``."""
    total = 0.0
    for k in range(1, len(pieces)):
        x = pieces[k][0]
        if lo < x < hi:
            total += float(np.sum(np.abs(np.asarray(values[k]) - np.asarray(values[k - 1]))))
    return total


def boundary_speed_tv(run: GlimmRun, T: float) -> tuple[float, float]:
    """Total variation of the boundary slopes on ``[0, T]`` and the data bound it is compared with."""
    chidot = run.chidot
    n_max = min(len(chidot) - 1, int(math.ceil(T / run.tau - 1e-9)) - 1)
    seg = chidot[: n_max + 1]
    seg = seg[~np.isnan(seg)]
    lhs = float(np.sum(np.abs(np.diff(seg)))) if seg.size > 1 else 0.0
    law = run.law
    pieces = run.data.pieces
    if pieces is None:
        raise ValueError("the data bound needs piecewise-constant initial data")
    jump = run.data.jump if run.data.jump is not None else 0.0
    reach = run.lam * T + 2.0 * run.h
    left_inv = [p[1].v - law.c1 * p[1].w for p in pieces]
    right_vals = [(p[1].v, p[1].w) for p in pieces]
    rhs = _windowed_tv(pieces, left_inv, jump - reach, jump)
    rhs += _windowed_tv(pieces, right_vals, jump, jump + reach)
    uL, uR = run.data.base
    fan = solve_riemann(law, run.kinetic, uL, uR) if law.phase(uL.w) is not law.phase(uR.w) else None
    b = fan.boundary() if fan is not None else None
    if b is not None and abs(b[0].speed - law.c3) <= 1e-12:
        rhs += sum(run.data.sup_deviation())
    return lhs, rhs


def kinetic_residuals(run: GlimmRun) -> np.ndarray:
    """Per-slab kinetic residual of the tracked boundary (NaN where not subsonic)."""
    out = np.full(len(run.levels), np.nan)
    for n, lev in enumerate(run.levels):
        for fan in (lev.boundary_fan, lev.wall_fan):
            if fan is None:
                continue
            for i, wv in enumerate(fan.waves):
                if wv.kind is WaveKind.SUBSONIC:
                    r = _fan_kinetic_residual(run.law, run.kinetic, fan.states[i], fan.states[i + 1], wv.speed)
                    out[n] = r if math.isnan(out[n]) else max(out[n], r)
    return out


def _bump(s):
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = np.abs(s) < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - s[inside] ** 2))
    return out


@dataclass(frozen=True)
class Bump:
    """Tensor bump ``b((t - t0)/rt) b((x - x0)/rx)`` with maximum 1."""

    t0: float
    x0: float
    rt: float
    rx: float

    def __call__(self, t, x):
        return _bump((np.asarray(t) - self.t0) / self.rt) * _bump((np.asarray(x) - self.x0) / self.rx)

    def x_antiderivative(self, m: int = 8001):
        """Grid and cumulative integral of the spatial factor (trapezoid rule)."""
        xs = np.linspace(self.x0 - self.rx, self.x0 + self.rx, m)
        return xs, cumulative_trapezoid(_bump((xs - self.x0) / self.rx), xs, initial=0.0)


def random_bumps(rng: np.random.Generator, count: int, t_end: float, x_range: tuple[float, float],
                 path=None) -> list[Bump]:
    """Random bumps inside ``]0, t_end[ x x_range``; half of them centred on ``path(t)``."""
    out = []
    for k in range(count):
        rt = rng.uniform(0.1, 0.25) * t_end
        t0 = rng.uniform(rt, t_end - rt)
        rx = rng.uniform(0.1, 0.4)
        if path is not None and k % 2 == 0:
            x0 = float(path(t0)) + rng.uniform(-0.5, 0.5) * rx
        else:
            x0 = rng.uniform(x_range[0] + rx, x_range[1] - rx)
        out.append(Bump(t0, x0, rt, rx))
    return out


_GL8_X, _GL8_W = np.polynomial.legendre.leggauss(8)


def entropy_pairing(run: GlimmRun, bumps: list[Bump], per_level: bool = False) -> np.ndarray:
    """Pairing of ``dU/dt + dF/dx`` (as a measure on the run) with each bump.

    Contributions come from the phase-boundary lines inside every strip and
    from the jumps of ``U`` at the sampling times; contacts dissipate nothing.
    With ``per_level`` the result has one row per strip (the strip plus the
    restart that closes it) and the columns sum to the total pairing.
    """
    law = run.law
    tau, h = run.tau, run.h
    prims = [b.x_antiderivative() for b in bumps]
    out = np.zeros((len(run.levels), len(bumps)))

    def U(v, w):
        return law.energy(w) + 0.5 * v * v

    def I(k, a, b):
        xs, cum = prims[k]
        return np.interp(b, xs, cum) - np.interp(a, xs, cum)

    for n in range(len(run.levels) - 1):
        lev = run.levels[n]
        t_lo, t_hi = n * tau, (n + 1) * tau
        active = [k for k, b in enumerate(bumps) if b.t0 - b.rt < t_hi and b.t0 + b.rt > t_lo]
        fans = []
        for idx, fan in ((lev.boundary_index, lev.boundary_fan), (run.wall_interface(n), lev.wall_fan)):
            if idx is not None and fan is not None:
                fans.append((run.interface_positions(n)[idx], idx, fan))
        # Dissipation along the boundary lines of strip n.
        for k in active:
            b = bumps[k]
            for p, _, fan in fans:
                for i, wv in enumerate(fan.waves):
                    if not wv.kind.is_boundary:
                        continue
                    Um, Fm = law.entropy_pair(fan.states[i])
                    Up, Fp = law.entropy_pair(fan.states[i + 1])
                    D = (Fp - Fm) - wv.speed * (Up - Um)
                    s = 0.5 * tau * (1.0 + _GL8_X)
                    out[n, k] += D * 0.5 * tau * float(np.dot(_GL8_W, b(t_lo + s, p + wv.speed * s)))
        # Jump of U between the end of strip n and level n+1.
        t_next = t_hi
        jump_active = [k for k in active if abs(t_next - bumps[k].t0) < bumps[k].rt]
        if not jump_active:
            continue
        new = run.levels[n + 1]
        vl, wl, vr, wr = run.interface_states(n)
        c = np.where(law.phase_array(wl) == 1, law.c1, law.c3)
        hs = 0.5 * (wl + wr) + (vr - vl) / (2.0 * c)
        vs = vl + c * (hs - wl)
        pos = run.interface_positions(n)
        Un = U(new.v, new.w)
        Ul, Um_, Ur = U(vl, wl), U(vs, hs), U(vr, wr)
        special = {idx: fan for _, idx, fan in fans}
        for k in jump_active:
            b = bumps[k]
            tfac = float(_bump(np.array([(t_next - b.t0) / b.rt]))[0])
            sel = np.flatnonzero((pos + h > b.x0 - b.rx) & (pos - h < b.x0 + b.rx))
            if sel.size == 0:
                continue
            p = pos[sel]
            ct = c[sel] * tau
            old = Ul[sel] * I(k, p - h, p - ct) + Um_[sel] * I(k, p - ct, p + ct) + Ur[sel] * I(k, p + ct, p + h)
            for j, i in enumerate(sel):
                if i in special:
                    fan = special[i]
                    xs = np.concatenate([[pos[i] - h], pos[i] + fan.speeds * tau, [pos[i] + h]])
                    xs = np.clip(xs, pos[i] - h, pos[i] + h)
                    us = np.array([U(s.v, s.w) for s in fan.states])
                    old[j] = float(np.sum(us * I(k, xs[:-1], xs[1:])))
            total = np.sum(Un[sel] * I(k, p - h, p + h) - old)
            out[n, k] += tfac * float(total)
    return out if per_level else out.sum(axis=0)
