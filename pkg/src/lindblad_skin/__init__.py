"""Quadratic fermionic Lindbladians by third quantization, with the dissipative SSH chain."""

from .errors import (CARViolation, ConfigError, LindbladSkinError, NormalizationFailure,
                     NumericalFailure, PairingFailure, ResidueTooLarge, SizeLimit,
                     UnstableDrift, UnsupportedRegime)
from .majorana import MajoranaForm, majorana_form
from .model import (BoundaryCondition, HamiltonianSpec, JumpOperatorSpec, ModelSpec, SshParams,
                    ssh_model)
from .thirdq import RapidityDecomposition, StructureMatrix, decompose, rapidity_decompose

__all__ = [
    "BoundaryCondition", "CARViolation", "ConfigError", "HamiltonianSpec", "JumpOperatorSpec",
    "LindbladSkinError", "MajoranaForm", "ModelSpec", "NormalizationFailure", "NumericalFailure",
    "PairingFailure", "RapidityDecomposition", "ResidueTooLarge", "SizeLimit", "SshParams",
    "StructureMatrix", "UnstableDrift", "UnsupportedRegime", "decompose", "majorana_form",
    "rapidity_decompose", "ssh_model",
]
__version__ = "0.1.0"
