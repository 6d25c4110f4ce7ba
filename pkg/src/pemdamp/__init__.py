"""Passive vibration damping of beams with piezoelectric transducers and lattice networks."""

__version__ = "0.1.0"

from .exceptions import InfeasibleTargetError, ModelInputError, SolverError  # noqa: E402

__all__ = ["__version__", "InfeasibleTargetError", "ModelInputError", "SolverError"]
