"""Guessing- and list-ambiguity analysis of two-hint secret storage."""

from .errors import ParameterError, SizeError
from .kernels import BACKEND
from .pmf import (
    CondPMF,
    JointPMF,
    adjoin_uniform,
    arimoto_conditional_entropy,
    iid_extension,
    posterior_family,
    renyi_entropy,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CondPMF",
    "JointPMF",
    "ParameterError",
    "SizeError",
    "adjoin_uniform",
    "arimoto_conditional_entropy",
    "iid_extension",
    "posterior_family",
    "renyi_entropy",
]
