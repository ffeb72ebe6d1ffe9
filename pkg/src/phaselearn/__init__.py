"""Classical simulation of phase-state learning from separable and entangled measurements."""

from phaselearn.f2poly import F2Poly, derivative, eval_matrix, random_poly, random_sparse_poly, stitch
from phaselearn.oracle import Noise, PhaseOracle
from phaselearn.zqpoly import ZqPoly, derivative_q, equivalent

__version__ = "0.1.0"

__all__ = [
    "F2Poly",
    "ZqPoly",
    "PhaseOracle",
    "Noise",
    "derivative",
    "derivative_q",
    "equivalent",
    "eval_matrix",
    "random_poly",
    "random_sparse_poly",
    "stitch",
]
