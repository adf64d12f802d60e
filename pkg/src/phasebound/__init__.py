"""Exact Riemann solvers and a Glimm random-choice scheme for elastodynamics
with a trilinear stress law and a propagating phase boundary."""

from phasebound.material import DomainError, MaterialLaw, Phase, State
from phasebound.kinetics import KineticFunction, entropy_dissipation_rate
from phasebound.riemann_full import Wave, WaveFan, WaveKind, solve_riemann
from phasebound.riemann_half import solve_half

__all__ = [
    "DomainError",
    "KineticFunction",
    "MaterialLaw",
    "Phase",
    "State",
    "Wave",
    "WaveFan",
    "WaveKind",
    "entropy_dissipation_rate",
    "solve_half",
    "solve_riemann",
]

__version__ = "0.1.0"
