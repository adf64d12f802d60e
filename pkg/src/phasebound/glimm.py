"""Glimm random-choice scheme with phase-boundary tracking.

Cells of level ``n`` are ``[m h, (m+2) h)`` with ``m + n`` even, so the cells
of level ``n+1`` are centred on the interfaces of level ``n``.  In each time
strip every interface carries an exact Riemann fan; the next level takes the
value of the fan at ``x = (m + 1 + a_{n+1}) h - 0``, that is at self-similar
coordinate ``xi = a_{n+1} * lam`` with the left-limit convention.

The cell count is kept fixed by alternately padding one constant ghost cell
on the left (even ``n``) and on the right (odd ``n``).  With a wall the
padding parity is chosen so that the wall is a cell edge at even levels; the
ghost interface is then replaced by the half-line Riemann solution.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from phasebound.kinetics import KineticFunction
from phasebound.material import MaterialLaw, Phase, State
from phasebound.riemann_full import RiemannError, WaveFan, boundary_states, solve_riemann
from phasebound.riemann_half import solve_half


class GlimmError(RuntimeError):
    """The scheme left the regime it was designed for."""

    def __init__(self, message: str, dump: dict | None = None):
        super().__init__(message)
        self.dump = dump or {}


class MultipleBoundaryError(GlimmError):
    pass


class SpinodalError(GlimmError):
    pass


# -- equidistributed sequences ---------------------------------------------------


def van_der_corput(n: int) -> float:
    """Binary radical inverse of ``n``."""
    if n < 0:
        raise ValueError("radical inverse needs n >= 0")
    x, f = 0.0, 0.5
    while n:
        if n & 1:
            x += f
        n >>= 1
        f *= 0.5
    return x


_LCG_A = 6364136223846793005
_LCG_C = 1442695040888963407
_MASK = (1 << 64) - 1


class Sequence:
    """Sampling sequence ``a_n`` in ``]-1, 1[`` for ``n >= 1``."""

    def __init__(self, kind: str = "van_der_corput", seed: int = 0):
        if kind not in ("van_der_corput", "linear_congruential"):
            raise ValueError(f"unknown sequence type {kind!r}")
        self.kind = kind
        self.seed = int(seed)
        self._lcg = [self.seed & _MASK]

    def __call__(self, n: int) -> float:
        if n < 1:
            raise ValueError("sequence index starts at 1")
        if self.kind == "van_der_corput":
            return 2.0 * van_der_corput(n) - 1.0
        while len(self._lcg) <= n:
            self._lcg.append((_LCG_A * self._lcg[-1] + _LCG_C) & _MASK)
        u = ((self._lcg[n] >> 11) + 0.5) / float(1 << 53)
        return 2.0 * u - 1.0


def equidistributed_value(sequence: Sequence, n: int) -> float:
    return sequence(n)


# -- configuration and initial data ------------------------------------------------


DOMAINS = ("full", "half-left", "half-right")


@dataclass(frozen=True)
class GlimmConfig:
    h: float
    t_end: float
    xmin: float = -3.0
    xmax: float = 3.0
    lam: float | None = None
    sequence: str = "van_der_corput"
    seed: int = 0
    domain: str = "full"
    report_xmin: float | None = None
    report_xmax: float | None = None

    def __post_init__(self):
        if not self.h > 0.0:
            raise ValueError("grid.h must be positive")
        if not self.t_end > 0.0:
            raise ValueError("time.t_end must be positive")
        if not self.xmax > self.xmin:
            raise ValueError("grid.xmax must exceed grid.xmin")
        if self.domain not in DOMAINS:
            raise ValueError(f"domain must be one of {DOMAINS}, got {self.domain!r}")
        Sequence(self.sequence, self.seed)

    def speed_ratio(self, law: MaterialLaw) -> float:
        lam = law.c1 / 0.9 if self.lam is None else float(self.lam)
        if not lam > law.c1:
            raise ValueError(f"CFL condition requires lambda > c1 = {law.c1}, got {lam}")
        return lam


@dataclass
class InitialData:
    """Piecewise smooth data ``u0(x)`` with at most one phase jump.

    ``u0`` maps an array of positions to ``(v, w)`` arrays; ``breaks`` lists
    its discontinuities; ``jump`` is the position of the phase change (or
    ``None``) and ``base`` the unperturbed states on either side of it.
    """

    u0: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]
    breaks: np.ndarray
    jump: float | None
    base: tuple[State, State]
    pieces: list[tuple[float, State]] | None = None

    @classmethod
    def piecewise(cls, xs, states, jump: float | None = None, base=None) -> "InitialData":
        """State ``states[i]`` on ``[xs[i], xs[i+1])``; the first and last extend to infinity."""
        xs = np.asarray(xs, dtype=float)
        st = [State(float(s[0]), float(s[1])) for s in states]
        if xs.size != len(st) or xs.size == 0:
            raise ValueError("piecewise data need one start position per state")
        if np.any(np.diff(xs) <= 0.0):
            raise ValueError("piecewise data positions must be strictly increasing")
        vs = np.array([s.v for s in st])
        ws = np.array([s.w for s in st])

        def u0(x):
            idx = np.clip(np.searchsorted(xs, x, side="right") - 1, 0, len(st) - 1)
            return vs[idx], ws[idx]

        if base is None:
            base = (st[0], st[-1])
        return cls(u0, xs[1:].copy(), jump, (State(*base[0]), State(*base[1])), list(zip(xs.tolist(), st)))

    @classmethod
    def riemann(cls, uL: State, uR: State, x0: float = 0.0) -> "InitialData":
        return cls.piecewise([-math.inf, x0], [uL, uR], None if uL == uR else x0)

    @classmethod
    def from_table(cls, path: str | Path, law: MaterialLaw) -> "InitialData":
        """Rows ``x v w``: the state holds from ``x`` to the next row."""
        data = np.loadtxt(path, comments="#", ndmin=2)
        if data.shape[1] != 3:
            raise ValueError(f"{path}: initial table needs three columns x v w")
        xs, states = data[:, 0], [State(v, w) for v, w in data[:, 1:]]
        return cls.piecewise(xs, states, _find_jump(law, xs, states))

    @classmethod
    def boundary(cls, law: MaterialLaw, kinetic: KineticFunction, V: float,
                 vL: float = 0.0, wR: float | None = None) -> "InitialData":
        """Pure single-boundary data with boundary speed ``V``."""
        uL, uR = boundary_states(law, kinetic, V, vL, wR)
        return cls.riemann(uL, uR)

    @classmethod
    def perturbed(cls, law: MaterialLaw, uL: State, uR: State, n1: float, rng: np.random.Generator,
                  pieces: int = 8, width: float = 1.0, sides: str = "both",
                  family: str = "any") -> "InitialData":
        """Base boundary ``uL | uR`` plus a random piecewise-constant perturbation.

        The perturbation is supported in ``[-width, width]`` and scaled so that the
        total variation of the data away from the jump equals ``n1``.  With
        ``family="left-invariant"`` the left perturbation keeps ``v - c1 w``
        fixed, so it only carries waves that move towards the right.
        """
        if sides not in ("both", "left", "right"):
            raise ValueError(f"sides must be both, left or right, got {sides!r}")
        if family not in ("any", "left-invariant"):
            raise ValueError(f"unknown perturbation family {family!r}")
        base_l, base_r = np.array(uL, dtype=float), np.array(uR, dtype=float)
        step = width / pieces
        xs: list[float] = [-math.inf]
        offsets: list[np.ndarray] = [np.zeros(2)]
        if sides in ("both", "left"):
            dw = rng.uniform(-1.0, 1.0, pieces)
            dv = law.c1 * dw if family == "left-invariant" else rng.uniform(-1.0, 1.0, pieces)
            xs += [-width + k * step for k in range(pieces)]
            offsets += list(np.column_stack([dv, dw]))
        n_left = len(xs)
        xs.append(0.0)
        if sides in ("both", "right"):
            d = rng.uniform(-1.0, 1.0, (pieces, 2))
            xs += [k * step for k in range(1, pieces)] + [width]
            offsets += list(d) + [np.zeros(2)]
        else:
            offsets.append(np.zeros(2))
        tv = np.abs(np.diff(np.array(offsets[:n_left]), axis=0)).sum() \
            + np.abs(np.diff(np.array(offsets[n_left:]), axis=0)).sum()
        scale = n1 / tv if tv > 0.0 else 0.0
        states = [State(*(base_l + scale * d)) for d in offsets[:n_left]] \
            + [State(*(base_r + scale * d)) for d in offsets[n_left:]]
        return cls.piecewise(xs, states, 0.0, base=(State(*uL), State(*uR)))

    def total_variation(self) -> tuple[float, float]:
        """Variation of the data on each side of the phase jump (``|dv| + |dw|``)."""
        if self.pieces is None:
            raise ValueError("total variation is only available for piecewise-constant data")
        tl = tr = 0.0
        for (x0, a), (x1, b) in zip(self.pieces[:-1], self.pieces[1:]):
            jump = abs(b.v - a.v) + abs(b.w - a.w)
            if self.jump is not None and x1 == self.jump:
                continue
            if self.jump is None or x1 < self.jump:
                tl += jump
            else:
                tr += jump
        return tl, tr

    def sup_deviation(self) -> tuple[float, float]:
        """Largest distance of the data from the base state on each side of the jump."""
        if self.pieces is None:
            raise ValueError("deviation is only available for piecewise-constant data")
        dl = dr = 0.0
        for x0, s in self.pieces:
            left = self.jump is None or x0 < self.jump
            b = self.base[0] if left else self.base[1]
            d = abs(s.v - b.v) + abs(s.w - b.w)
            if left:
                dl = max(dl, d)
            else:
                dr = max(dr, d)
        return dl, dr


def _find_jump(law: MaterialLaw, xs, states) -> float | None:
    phases = [law.stable_phase(s.w) for s in states]
    changes = [i for i in range(1, len(phases)) if phases[i] is not phases[i - 1]]
    if len(changes) > 1:
        raise ValueError("initial data may contain a single phase jump only")
    return float(xs[changes[0]]) if changes else None


_GL_X, _GL_W = np.polynomial.legendre.leggauss(4)


def _interval_mean(u0, a: float, b: float, breaks: np.ndarray) -> tuple[float, float]:
    pts = np.concatenate([[a], breaks[(breaks > a) & (breaks < b)], [b]])
    sv = sw = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        x = 0.5 * (lo + hi) + 0.5 * (hi - lo) * _GL_X
        v, w = u0(x)
        frac = (hi - lo) / (b - a)
        # Constant pieces are copied exactly so knot values survive averaging.
        mv = v[0] if np.all(v == v[0]) else 0.5 * float(np.dot(_GL_W, v))
        mw = w[0] if np.all(w == w[0]) else 0.5 * float(np.dot(_GL_W, w))
        sv += frac * mv
        sw += frac * mw
    return sv, sw


def project_initial(law: MaterialLaw, data: InitialData, cfg: GlimmConfig):
    """Level-0 cell means ``(m0, v, w, jump_edge)`` on ``[m0 h + 2 j h, ...)``.

    The phase jump is snapped to the nearest level-0 cell edge and cells are
    averaged over their part on their own side of the jump only.
    """
    h = cfg.h
    m0 = 2 * math.floor(cfg.xmin / (2.0 * h) + 1e-9)
    ncell = math.ceil((cfg.xmax - m0 * h) / (2.0 * h) - 1e-9)
    edges = (m0 + 2 * np.arange(ncell + 1)) * h
    v = np.empty(ncell)
    w = np.empty(ncell)
    jump_edge = None
    if data.jump is not None:
        jump_edge = int(np.argmin(np.abs(edges - data.jump)))
    for j in range(ncell):
        a, b = edges[j], edges[j + 1]
        if jump_edge is not None:
            if j < jump_edge:
                b = min(b, data.jump)
            else:
                a = max(a, data.jump)
        if b > a:
            v[j], w[j] = _interval_mean(data.u0, a, b, data.breaks)
        else:
            x = np.array([data.jump + (-1e-12 if j < jump_edge else 1e-12)])
            vv, ww = data.u0(x)
            v[j], w[j] = vv[0], ww[0]
    codes = law.phase_array(w)
    bad = np.flatnonzero(codes == 2)
    if bad.size:
        raise SpinodalError(f"cell average in the spinodal at cell {bad[0]} (w = {w[bad[0]]})",
                            {"cell": int(bad[0]), "w": float(w[bad[0]])})
    if jump_edge is not None:
        left_ok = np.all(codes[:jump_edge] == codes[0])
        right_ok = np.all(codes[jump_edge:] == codes[-1])
        if not (left_ok and right_ok):
            raise SpinodalError("cell averages change phase away from the phase jump")
    return m0, v, w, jump_edge


# -- run history -----------------------------------------------------------------------


@dataclass
class Level:
    n: int
    m0: int
    v: np.ndarray
    w: np.ndarray
    a: float
    left_ghost: bool = True
    boundary_index: int | None = None
    boundary_fan: WaveFan | None = None
    wall_fan: WaveFan | None = None
    chi: float = math.nan
    chidot: float = math.nan


@dataclass
class GlimmRun:
    law: MaterialLaw
    kinetic: KineticFunction
    config: GlimmConfig
    data: InitialData
    lam: float
    tau: float
    levels: list[Level] = field(default_factory=list)

    @property
    def h(self) -> float:
        return self.config.h

    @property
    def nsteps(self) -> int:
        return len(self.levels) - 1

    def edges(self, n: int) -> np.ndarray:
        lev = self.levels[n]
        return (lev.m0 + 2 * np.arange(lev.v.size + 1)) * self.h

    def interface_positions(self, n: int) -> np.ndarray:
        """Centres of the Riemann problems solved in strip ``n``."""
        lev = self.levels[n]
        N = lev.v.size
        if lev.left_ghost:
            return (lev.m0 + 2 * np.arange(N)) * self.h
        return (lev.m0 + 2 * np.arange(N) + 2) * self.h

    def interface_states(self, n: int):
        """Left and right states ``(vl, wl, vr, wr)`` of every strip-``n`` interface."""
        lev = self.levels[n]
        v, w = lev.v, lev.w
        if lev.left_ghost:
            return np.r_[v[:1], v[:-1]], np.r_[w[:1], w[:-1]], v, w
        return v, w, np.r_[v[1:], v[-1:]], np.r_[w[1:], w[-1:]]

    def wall_interface(self, n: int) -> int | None:
        lev = self.levels[n]
        if self.config.domain == "half-left" and lev.left_ghost:
            return 0
        if self.config.domain == "half-right" and not lev.left_ghost:
            return lev.v.size - 1
        return None

    @property
    def times(self) -> np.ndarray:
        return self.tau * np.arange(len(self.levels))

    @property
    def chi(self) -> np.ndarray:
        return np.array([lev.chi for lev in self.levels])

    @property
    def chidot(self) -> np.ndarray:
        return np.array([lev.chidot for lev in self.levels])

    @property
    def samples(self) -> np.ndarray:
        return np.array([lev.a for lev in self.levels])

    def chi_at(self, t) -> np.ndarray:
        """Piecewise-linear boundary path, right-continuous at the sampling times."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        n = np.clip(np.floor(t / self.tau + 1e-12).astype(int), 0, self.nsteps)
        return self.chi[n] + self.chidot[n] * (t - n * self.tau)

    def cells(self, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Edges, velocities and strains of level ``n``."""
        lev = self.levels[n]
        return self.edges(n), lev.v, lev.w

    def level_at(self, t: float) -> int:
        return int(min(self.nsteps, max(0, round(t / self.tau))))


def _fan_at_interface(run: GlimmRun, lev: Level, i: int, vl, wl, vr, wr) -> WaveFan:
    try:
        return solve_riemann(run.law, run.kinetic, State(vl[i], wl[i]), State(vr[i], wr[i]))
    except (RiemannError, ValueError) as exc:
        raise GlimmError(f"Riemann solve failed at level {lev.n}, interface {i}: {exc}",
                         {"level": lev.n, "interface": i,
                          "uL": (float(vl[i]), float(wl[i])), "uR": (float(vr[i]), float(wr[i]))}) from exc


def _strip_fans(run: GlimmRun, lev: Level):
    """Classify every interface of a level and solve the non-trivial ones.

    Returns middle states of same-phase interfaces plus the boundary and wall fans.
    """
    law = run.law
    vl, wl, vr, wr = run.interface_states(lev.n)
    pl = law.phase_array(wl)
    pr = law.phase_array(wr)
    if np.any(pl == 2) or np.any(pr == 2):
        cell = int(np.flatnonzero(law.phase_array(lev.w) == 2)[0])
        raise SpinodalError(f"spinodal state at level {lev.n}, cell {cell}",
                            {"level": lev.n, "cell": cell, "w": float(lev.w[cell])})
    wall = run.wall_interface(lev.n)
    cross = np.flatnonzero(pl != pr)
    if wall is not None:
        cross = cross[cross != wall]
    if cross.size > 1:
        raise MultipleBoundaryError(
            f"level {lev.n} has {cross.size} phase-boundary interfaces at {cross.tolist()}",
            {"level": lev.n, "interfaces": cross.tolist()},
        )
    c = np.where(pl == 1, law.c1, law.c3)
    h = 0.5 * (wl + wr) + (vr - vl) / (2.0 * c)
    vs = vl + c * (h - wl)
    same = pl == pr
    if wall is not None:
        same[wall] = False
    nucleate = same & (((pl == 1) & ((h > law.wM) | (h <= -1.0))) | ((pl == 3) & (h < law.wm)))
    if np.any(nucleate):
        i = int(np.flatnonzero(nucleate)[0])
        raise MultipleBoundaryError(
            f"nucleation inside a single phase at level {lev.n}, interface {i} (h = {h[i]})",
            {"level": lev.n, "interface": i, "h": float(h[i]),
             "uL": (float(vl[i]), float(wl[i])), "uR": (float(vr[i]), float(wr[i]))},
        )
    pos = run.interface_positions(lev.n)
    lev.boundary_index = None
    lev.boundary_fan = None
    lev.wall_fan = None
    lev.chi = math.nan
    lev.chidot = math.nan
    if cross.size == 1:
        i = int(cross[0])
        fan = _fan_at_interface(run, lev, i, vl, wl, vr, wr)
        lev.boundary_index = i
        lev.boundary_fan = fan
        b = fan.boundary()
        lev.chi = float(pos[i])
        lev.chidot = b[0].speed if b is not None else math.nan
    if wall is not None:
        u0 = State(float(vr[wall]), float(wr[wall])) if lev.left_ghost else State(float(vl[wall]), float(wl[wall]))
        side = "left" if lev.left_ghost else "right"
        try:
            fan = solve_half(law, run.kinetic, u0, side)
        except (RiemannError, ValueError) as exc:
            raise GlimmError(f"wall Riemann solve failed at level {lev.n}: {exc}",
                             {"level": lev.n, "u0": tuple(u0)}) from exc
        lev.wall_fan = fan
        if fan.boundary_indices():
            if cross.size:
                raise MultipleBoundaryError(f"wall nucleation at level {lev.n} beside an existing boundary",
                                            {"level": lev.n})
            lev.chi = float(pos[wall])
            lev.chidot = fan.boundary()[0].speed
    return (vl, wl, vr, wr), (vs, h), c, same


def advance_strip(run: GlimmRun, n: int):
    """Solve all Riemann problems of strip ``n`` (stored on the level record)."""
    return _strip_fans(run, run.levels[n])


def sample_step(run: GlimmRun, n: int, a: float, strip=None) -> Level:
    """Level ``n+1`` from the strip-``n`` solution sampled at ``xi = a * lam``."""
    lev = run.levels[n]
    if strip is None:
        strip = _strip_fans(run, lev)
    (vl, wl, vr, wr), (vs, ws), c, same = strip
    xi = a * run.lam
    take_left = xi <= -c
    take_mid = ~take_left & (xi <= c)
    nv = np.where(take_left, vl, np.where(take_mid, vs, vr))
    nw = np.where(take_left, wl, np.where(take_mid, ws, wr))
    if lev.boundary_index is not None:
        s = lev.boundary_fan.sample(xi)
        nv[lev.boundary_index], nw[lev.boundary_index] = s.v, s.w
    wall = run.wall_interface(n)
    if wall is not None:
        if lev.left_ghost:
            s = lev.wall_fan.sample(abs(xi), side=1)
        else:
            s = lev.wall_fan.sample(-abs(xi), side=-1)
        nv[wall], nw[wall] = s.v, s.w
    m0 = lev.m0 - 1 if lev.left_ghost else lev.m0 + 1
    return Level(n + 1, m0, nv, nw, a, left_ghost=_left_ghost(run.config, n + 1))


def _left_ghost(cfg: GlimmConfig, n: int) -> bool:
    return (n % 2 == 0) != (cfg.domain == "half-right")


def _check_extent(cfg: GlimmConfig, lam: float):
    reach = lam * cfg.t_end
    lo = cfg.xmin if cfg.domain == "half-left" else cfg.xmin + reach
    hi = cfg.xmax if cfg.domain == "half-right" else cfg.xmax - reach
    rlo = lo if cfg.report_xmin is None else cfg.report_xmin
    rhi = hi if cfg.report_xmax is None else cfg.report_xmax
    if rlo < lo - 1e-12 or rhi > hi + 1e-12 or not rhi > rlo:
        raise ValueError(
            f"domain [{cfg.xmin}, {cfg.xmax}] too small: the reported window [{rlo}, {rhi}] must lie "
            f"inside [{lo}, {hi}], which excludes the numerical domain of dependence of the truncation edges"
        )
    return rlo, rhi


def report_window(cfg: GlimmConfig, law: MaterialLaw) -> tuple[float, float]:
    """Interval of reported cells, validated against the domain of dependence."""
    return _check_extent(cfg, cfg.speed_ratio(law))


def run(law: MaterialLaw, kinetic: KineticFunction, data: InitialData, cfg: GlimmConfig,
        check_characteristic: bool = True) -> GlimmRun:
    """Run the scheme from ``t = 0`` to ``t_end``."""
    lam = cfg.speed_ratio(law)
    _check_extent(cfg, lam)
    if cfg.domain != "full":
        wall = cfg.xmin if cfg.domain == "half-left" else cfg.xmax
        if abs(wall / (2.0 * cfg.h) - round(wall / (2.0 * cfg.h))) > 1e-9:
            raise ValueError(f"the wall at x = {wall} must lie on an even grid point of spacing {cfg.h}")
        if cfg.domain == "half-right":
            span = (cfg.xmax - cfg.xmin) / (2.0 * cfg.h)
            if abs(span - round(span)) > 1e-9:
                raise ValueError("with a right wall, xmax - xmin must be a multiple of 2h")
    if check_characteristic and data.jump is not None:
        _check_characteristic(law, kinetic, data)
    tau = cfg.h / lam
    nsteps = math.ceil(cfg.t_end / tau - 1e-9)
    seq = Sequence(cfg.sequence, cfg.seed)
    m0, v, w, _ = project_initial(law, data, cfg)
    out = GlimmRun(law, kinetic, cfg, data, lam, tau)
    out.levels.append(Level(0, m0, v, w, math.nan, left_ghost=_left_ghost(cfg, 0)))
    for n in range(nsteps):
        strip = _strip_fans(out, out.levels[n])
        out.levels.append(sample_step(out, n, seq(n + 1), strip))
    _strip_fans(out, out.levels[-1])
    return out


def _check_characteristic(law: MaterialLaw, kinetic: KineticFunction, data: InitialData):
    uL, uR = data.base
    if law.phase(uL.w) is not Phase.H1 or law.phase(uR.w) is not Phase.H3:
        return
    try:
        fan = solve_riemann(law, kinetic, uL, uR)
    except RiemannError:
        return
    b = fan.boundary()
    if b is not None and abs(b[0].speed - law.c3) <= 1e-12 * law.c3:
        target = math.sqrt(kinetic.derivative_at_c3() / law.c3)
        if abs(uL.w) > 1e-9 or abs(uR.w - target) > 1e-9 * max(1.0, target):
            warnings.warn(
                f"characteristic boundary without wL* = 0 and wR* = {target}; "
                "the stability estimates do not cover this configuration",
                RuntimeWarning,
                stacklevel=3,
            )
