"""Numerical kernels shared by the beamformer block updates."""

from .eigen import grq_max, rayleigh_quotient
from .fractional import (
    DinkelbachResult,
    FractionalBranch,
    QuadraticFractionalProblem,
    dinkelbach,
    mm_minorize,
)
from .manifold import (
    CadmmResult,
    ManifoldBranch,
    ManifoldProblem,
    PathTerm,
    PhaseConstraint,
    cadmm_phase,
    rsd_unit_modulus,
    unit_modulus,
)
from .qcqp import ConcaveBranch, QcqpResult, QuadConstraint, solve_epigraph_qcqp

__all__ = [
    "CadmmResult",
    "ConcaveBranch",
    "DinkelbachResult",
    "FractionalBranch",
    "ManifoldBranch",
    "ManifoldProblem",
    "PathTerm",
    "PhaseConstraint",
    "QcqpResult",
    "QuadConstraint",
    "QuadraticFractionalProblem",
    "cadmm_phase",
    "dinkelbach",
    "grq_max",
    "mm_minorize",
    "rayleigh_quotient",
    "rsd_unit_modulus",
    "solve_epigraph_qcqp",
    "unit_modulus",
]
