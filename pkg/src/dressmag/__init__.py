"""Dressed-state single-atom magnetometry."""

from . import config, dynamics, estimation, kernels, linalg, model, protocols, scenarios

__version__ = "0.1.0"

__all__ = ["config", "dynamics", "estimation", "kernels", "linalg", "model", "protocols", "scenarios",
           "__version__"]
