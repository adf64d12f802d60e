"""Trilinear stress law, phases, energy and entropy pair.

The stress is ``k1*w`` in phase 1 (``-1 < w <= wM``), ``k3*w`` in phase 3
(``w >= wm``) and linear on the spinodal interval in between.  Knots belong to
the adjacent stable phase.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np


class DomainError(ValueError):
    """Raised when an argument leaves the domain of a constitutive function."""


class Phase(enum.IntEnum):
    H1 = 1
    SPINODAL = 2
    H3 = 3


class State(NamedTuple):
    """A state ``u = (v, w)``: velocity and strain."""

    v: float
    w: float


@dataclass(frozen=True)
class MaterialLaw:
    """Trilinear constitutive law with its derived constants.

    ``wMcr`` and ``wmcr`` are the critical initiation strains used by the
    half-space solver; they default to ``wM`` and ``wm``.
    """

    k1: float
    k3: float
    wM: float
    wm: float
    wMcr: float | None = None
    wmcr: float | None = None
    c1: float = field(init=False, repr=False)
    c3: float = field(init=False, repr=False)
    sigmaM: float = field(init=False, repr=False)
    sigmam: float = field(init=False, repr=False)
    sigma0: float = field(init=False, repr=False)

    def __post_init__(self):
        k1, k3, wM, wm = (float(x) for x in (self.k1, self.k3, self.wM, self.wm))
        if not all(math.isfinite(x) for x in (k1, k3, wM, wm)):
            raise ValueError("material constants must be finite")
        if not 0.0 < k3 < k1:
            raise ValueError(f"material law requires 0 < k3 < k1 (got k1={k1}, k3={k3})")
        if not 0.0 < wM < wm:
            raise ValueError(f"material law requires 0 < wM < wm (got wM={wM}, wm={wm})")
        sigmaM, sigmam = k1 * wM, k3 * wm
        if sigmam > sigmaM:
            raise ValueError(
                f"material law requires k3*wm <= k1*wM so the spinodal branch decreases "
                f"(got {sigmam} > {sigmaM})"
            )
        sigma0 = math.sqrt(sigmaM * sigmam)
        wMcr = wM if self.wMcr is None else float(self.wMcr)
        wmcr = wm if self.wmcr is None else float(self.wmcr)
        # Small slack so that thresholds given as sigma0/k exactly still validate.
        eps = 1e-12 * max(1.0, wm)
        if not sigma0 / k1 - eps <= wMcr <= wM:
            raise ValueError(f"wMcr must lie in [sigma0/k1, wM] = [{sigma0 / k1}, {wM}], got {wMcr}")
        if not wm <= wmcr <= sigma0 / k3 + eps:
            raise ValueError(f"wmcr must lie in [wm, sigma0/k3] = [{wm}, {sigma0 / k3}], got {wmcr}")
        for name, value in (
            ("k1", k1), ("k3", k3), ("wM", wM), ("wm", wm), ("wMcr", wMcr), ("wmcr", wmcr),
            ("c1", math.sqrt(k1)), ("c3", math.sqrt(k3)),
            ("sigmaM", sigmaM), ("sigmam", sigmam), ("sigma0", sigma0),
        ):
            object.__setattr__(self, name, value)

    # -- classification -------------------------------------------------------

    def phase(self, w: float) -> Phase:
        if not w > -1.0:
            raise DomainError(f"strain must exceed -1, got {w}")
        if w <= self.wM:
            return Phase.H1
        if w >= self.wm:
            return Phase.H3
        return Phase.SPINODAL

    def phase_array(self, w: np.ndarray) -> np.ndarray:
        """Vectorised phase codes (1, 2 or 3); raises on ``w <= -1``."""
        w = np.asarray(w, dtype=float)
        if np.any(~(w > -1.0)):
            raise DomainError("strain must exceed -1")
        return np.where(w <= self.wM, 1, np.where(w >= self.wm, 3, 2))

    def stable_phase(self, w: float) -> Phase:
        p = self.phase(w)
        if p is Phase.SPINODAL:
            raise DomainError(f"strain {w} lies in the spinodal interval ]{self.wM}, {self.wm}[")
        return p

    # -- constitutive functions ------------------------------------------------

    def sigma(self, w):
        """Stress; accepts scalars or arrays."""
        w_arr = np.asarray(w, dtype=float)
        if np.any(~(w_arr > -1.0)):
            raise DomainError("stress is defined for w > -1 only")
        slope = (self.sigmam - self.sigmaM) / (self.wm - self.wM)
        out = np.where(
            w_arr <= self.wM,
            self.k1 * w_arr,
            np.where(w_arr >= self.wm, self.k3 * w_arr, self.sigmaM + slope * (w_arr - self.wM)),
        )
        return float(out) if out.ndim == 0 else out

    def energy(self, w):
        """Stored energy ``W(w)``, the integral of the stress from 0."""
        w_arr = np.asarray(w, dtype=float)
        if np.any(~(w_arr > -1.0)):
            raise DomainError("energy is defined for w > -1 only")
        wM, wm = self.wM, self.wm
        slope = (self.sigmam - self.sigmaM) / (self.wm - self.wM)
        WM = 0.5 * self.k1 * wM**2
        d = w_arr - wM
        spin = WM + self.sigmaM * d + 0.5 * slope * d**2
        Wm = WM + 0.5 * (self.sigmaM + self.sigmam) * (wm - wM)
        upper = Wm + 0.5 * self.k3 * (w_arr**2 - wm**2)
        out = np.where(w_arr <= wM, 0.5 * self.k1 * w_arr**2, np.where(w_arr >= wm, upper, spin))
        return float(out) if out.ndim == 0 else out

    def wave_speed(self, w: float) -> float:
        return self.c1 if self.stable_phase(w) is Phase.H1 else self.c3

    def entropy_pair(self, u: State) -> tuple[float, float]:
        """Mathematical entropy ``U = W + v^2/2`` and its flux ``F = -sigma*v``."""
        v, w = u
        self.stable_phase(w)
        return self.energy(w) + 0.5 * v * v, -self.sigma(w) * v

    def params(self) -> dict[str, float]:
        return {
            "k1": self.k1, "k3": self.k3, "wM": self.wM, "wm": self.wm,
            "wMcr": self.wMcr, "wmcr": self.wmcr,
        }


REFERENCE_LAW = MaterialLaw(k1=4.0, k3=1.0, wM=1.0, wm=2.0)
