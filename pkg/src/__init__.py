"""
Semi-groupes de la chaleur et de Poisson associés aux polynômes de Jacobi.
"""

__version__ = "1.0.0"
__author__ = "Yan"
__description__ = "Noyau de la chaleur discret, opérateurs maximaux et vérifications numériques pour les polynômes de Jacobi"

from .errors import ConvergenceError, InvariantViolation, JacobiHeatError, ValidationError
from .jacobi_core import CoefficientTable, FiniteSequence, JacobiParams
from .quadrature import QuadratureRule, gauss_jacobi_rule
from .kernel import (
    KernelQuery,
    FrakISpec,
    heat_kernel,
    heat_kernel_block,
    linearization_coefficients,
)
from .semigroup import TimeGrid, apply_heat, apply_poisson
from .analysis import WeightSeq, BoundReport, estimate_bound_constant
from .export import ExportManager
from .verification import InvariantSuiteRunner

__all__ = [
    "JacobiHeatError",
    "ValidationError",
    "ConvergenceError",
    "InvariantViolation",
    "JacobiParams",
    "CoefficientTable",
    "FiniteSequence",
    "QuadratureRule",
    "gauss_jacobi_rule",
    "KernelQuery",
    "FrakISpec",
    "heat_kernel",
    "heat_kernel_block",
    "linearization_coefficients",
    "TimeGrid",
    "apply_heat",
    "apply_poisson",
    "WeightSeq",
    "BoundReport",
    "estimate_bound_constant",
    "ExportManager",
    "InvariantSuiteRunner",
]
