"""Kinetic relations: entropy-dissipation functions and their admissible band.

A kinetic function prescribes the entropy dissipation across a subsonic phase
boundary as a function of its speed ``V`` in ``]-c3, c3]``.  Admissible
functions are increasing and lie between the lower bound ``psi_min`` (for
``V <= 0``) and the upper bound ``psi_max`` (for ``V >= 0``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from phasebound.material import DomainError, MaterialLaw, Phase, State

#: Relative margin keeping evaluations away from the divergence at ``-c3``.
LEFT_MARGIN = 1e-12


def psi_min(law: MaterialLaw, V: float) -> float:
    """Lower admissibility bound on ``]-c3, 0]``; diverges to -inf at ``-c3``."""
    if not (-law.c3 < V <= 0.0):
        raise DomainError(f"psi_min is defined on ]-c3, 0], got V={V}")
    V2 = V * V
    return 0.5 * (law.k1 - law.k3) * law.wM * (law.wm - (law.k1 - V2) / (law.k3 - V2) * law.wM)


def psi_max(law: MaterialLaw, V: float) -> float:
    """Upper admissibility bound on ``[0, c3]``."""
    if not (0.0 <= V <= law.c3):
        raise DomainError(f"psi_max is defined on [0, c3], got V={V}")
    V2 = V * V
    return 0.5 * (law.k1 - law.k3) * law.wm * (law.wM - (law.k3 - V2) / (law.k1 - V2) * law.wm)


def _psi_min_array(law: MaterialLaw, V: np.ndarray) -> np.ndarray:
    V2 = V * V
    return 0.5 * (law.k1 - law.k3) * law.wM * (law.wm - (law.k1 - V2) / (law.k3 - V2) * law.wM)


def _psi_max_array(law: MaterialLaw, V: np.ndarray) -> np.ndarray:
    V2 = V * V
    return 0.5 * (law.k1 - law.k3) * law.wm * (law.wM - (law.k3 - V2) / (law.k1 - V2) * law.wm)


@dataclass(frozen=True)
class KineticFunction:
    """An admissible entropy-dissipation function.

    ``kind`` is ``"max_dissipation"`` (the band edges themselves, with a jump
    at ``V = 0``) or ``"tabulated"`` (a strictly increasing piecewise-linear
    table, clamped into the admissible band, never extrapolated).
    """

    law: MaterialLaw
    kind: str = "max_dissipation"
    table_V: np.ndarray | None = field(default=None, repr=False)
    table_phi: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind == "max_dissipation":
            return
        if self.kind != "tabulated":
            raise ValueError(f"unknown kinetic function kind {self.kind!r}")
        if self.table_V is None or self.table_phi is None:
            raise ValueError("a tabulated kinetic function needs V and phi columns")
        V = np.array(self.table_V, dtype=float)
        phi = np.array(self.table_phi, dtype=float)
        if V.ndim != 1 or V.shape != phi.shape or V.size < 2:
            raise ValueError("kinetic table needs two equal-length columns with at least two rows")
        if not (np.all(np.isfinite(V)) and np.all(np.isfinite(phi))):
            raise ValueError("kinetic table contains non-finite values")
        if np.any(np.diff(V) <= 0.0):
            raise ValueError("kinetic table speeds must be strictly increasing")
        if np.any(np.diff(phi) <= 0.0):
            raise ValueError("kinetic table values must be strictly increasing")
        law = self.law
        if V[0] <= -law.c3:
            raise ValueError("kinetic table must start strictly above -c3")
        if abs(V[-1] - law.c3) > 1e-12 * law.c3:
            raise ValueError(f"kinetic table must end at V = c3 = {law.c3}")
        V[-1] = law.c3
        top = psi_max(law, law.c3)
        if abs(phi[-1] - top) > 1e-9 * max(1.0, abs(top)):
            raise ValueError(f"kinetic table must satisfy phi(c3) = psi_max(c3) = {top}, got {phi[-1]}")
        tol = 1e-12 * max(1.0, abs(top))
        neg = V <= 0.0
        if np.any(phi[neg] > tol) or np.any(phi[neg] < _psi_min_array(law, V[neg]) - tol):
            raise ValueError("kinetic table leaves the admissible band psi_min <= phi <= 0 for V <= 0")
        pos = V >= 0.0
        if np.any(phi[pos] < -tol) or np.any(phi[pos] > _psi_max_array(law, V[pos]) + tol):
            raise ValueError("kinetic table leaves the admissible band 0 <= phi <= psi_max for V >= 0")
        V.setflags(write=False)
        phi.setflags(write=False)
        object.__setattr__(self, "table_V", V)
        object.__setattr__(self, "table_phi", phi)

    @classmethod
    def from_file(cls, law: MaterialLaw, path: str | Path) -> "KineticFunction":
        """Read a two-column text table ``V phi``; ``#`` starts a comment."""
        data = np.loadtxt(path, comments="#", ndmin=2)
        if data.shape[1] != 2:
            raise ValueError(f"{path}: kinetic table must have exactly two columns")
        return cls(law, "tabulated", data[:, 0], data[:, 1])

    @classmethod
    def from_function(cls, law: MaterialLaw, f, n: int = 2001, v_min: float | None = None) -> "KineticFunction":
        """Tabulate a callable on ``[v_min, c3]`` (default ``-(1 - 1e-9) c3``)."""
        lo = -(1.0 - 1e-9) * law.c3 if v_min is None else v_min
        V = np.linspace(lo, law.c3, n)
        return cls(law, "tabulated", V, np.array([f(x) for x in V]))

    # -- evaluation -----------------------------------------------------------

    @property
    def v_min(self) -> float:
        """Smallest speed at which the function may be evaluated."""
        floor = -self.law.c3 + LEFT_MARGIN * self.law.c3
        if self.kind == "tabulated":
            return max(floor, float(self.table_V[0]))
        return floor

    @property
    def v_max(self) -> float:
        return self.law.c3

    @property
    def jumps_at_zero(self) -> bool:
        return self.kind == "max_dissipation"

    def __call__(self, V: float, side: int = 1) -> float:
        """Evaluate ``phi(V)``; at ``V == 0`` ``side`` selects the one-sided limit."""
        if not (self.v_min <= V <= self.v_max):
            raise DomainError(f"kinetic function evaluated outside its domain: V={V}")
        law = self.law
        if self.kind == "max_dissipation":
            if V < 0.0 or (V == 0.0 and side < 0):
                return psi_min(law, V)
            return psi_max(law, V)
        val = float(np.interp(V, self.table_V, self.table_phi))
        if V <= 0.0:
            val = min(max(val, psi_min(law, V)), 0.0)
        if V >= 0.0:
            val = max(min(val, psi_max(law, V)), 0.0)
        return val

    def at_zero(self) -> tuple[float, float]:
        """The one-sided limits ``(phi(0-), phi(0+))``."""
        return self(0.0, side=-1), self(0.0, side=1)

    def values(self, V: np.ndarray) -> np.ndarray:
        """Vectorised evaluation (right limit at ``V == 0``)."""
        V = np.asarray(V, dtype=float)
        if np.any(V < self.v_min) or np.any(V > self.v_max):
            raise DomainError("kinetic function evaluated outside its domain")
        law = self.law
        neg = V < 0.0
        if self.kind == "max_dissipation":
            return np.where(neg, _psi_min_array(law, np.where(neg, V, 0.0)),
                            _psi_max_array(law, np.where(neg, 0.0, V)))
        val = np.interp(V, self.table_V, self.table_phi)
        lo = _psi_min_array(law, np.where(neg, V, 0.0))
        hi = _psi_max_array(law, np.where(V > 0.0, V, 0.0))
        val = np.where(V <= 0.0, np.clip(val, lo, 0.0), val)
        return np.where(V >= 0.0, np.clip(val, 0.0, hi), val)

    def derivative_at_c3(self) -> float:
        """Left derivative of ``phi`` at ``c3``."""
        law = self.law
        if self.kind == "max_dissipation":
            c3, dk = law.c3, law.k1 - law.k3
            return dk * law.wm**2 * c3 * dk / (law.k1 - c3 * c3) ** 2
        step = 1e-6 * law.c3
        return (self(law.c3) - self(law.c3 - step)) / step

    def target(self, V: float, left_phase: Phase, side: int | None = None) -> float:
        """Prescribed dissipation rate across a boundary of speed ``V``.

        ``phi(V)`` when the state behind the boundary on the left is in phase 1,
        ``-phi(-V)`` when it is in phase 3.
        """
        if left_phase is Phase.H1:
            return self(V, 1 if side is None else side)
        return -self(-V, -1 if side is None else -side)


def phi_right_derivative_at_c3(kf: KineticFunction) -> float:
    return kf.derivative_at_c3()


def entropy_dissipation_rate(law: MaterialLaw, uL: State, uR: State) -> float:
    """Dissipation rate ``int_{w-}^{w+} (sigma - mean(sigma)) dy`` across a jump.

    Equal to ``(k1-k3)/2 (wM wm - w- w+)`` when the left state is in phase 1
    and the right in phase 3; zero between two states of one phase; it changes
    sign when the two states are swapped.
    """
    wl, wr = uL[1], uR[1]
    pl, pr = law.stable_phase(wl), law.stable_phase(wr)
    if pl is pr:
        return 0.0
    val = 0.5 * (law.k1 - law.k3) * (law.wM * law.wm - wl * wr)
    return val if pl is Phase.H1 else -val
