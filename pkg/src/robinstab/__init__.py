"""Stability analysis and pattern synthesis for semilinear Robin problems on
rotationally symmetric domains."""

__version__ = "0.1.0"

from . import geometry, nonlinearity, stationary, spectrum, criteria, pattern, evolution  # noqa: E402
from ._kernels import BACKEND  # noqa: E402
from .geometry import build_domain  # noqa: E402
from .nonlinearity import Nonlinearity, build_nonlinearity  # noqa: E402
from .stationary import RadialSolution, solve_stationary, validate  # noqa: E402
from .spectrum import lambda1_full, eigen_mode  # noqa: E402
from .criteria import assess  # noqa: E402
from .pattern import construct_pattern  # noqa: E402
from .evolution import evolve_radial, evolve_2d  # noqa: E402

__all__ = ["geometry", "nonlinearity", "stationary", "spectrum", "criteria", "pattern",
           "evolution", "BACKEND", "build_domain", "Nonlinearity", "build_nonlinearity",
           "RadialSolution", "solve_stationary", "validate", "lambda1_full", "eigen_mode",
           "assess", "construct_pattern", "evolve_radial", "evolve_2d", "__version__"]
