"""
Network package

    - diffnet: value + input-Jacobian forward pass and its reverse pass
    - checkpoint: binary checkpoint container
"""

from large_deviation_prefactors.network.checkpoint import (
    load_checkpoint,
    read_checkpoint,
    save_checkpoint,
)
from large_deviation_prefactors.network.diffnet import (
    EvalWithJacobian,
    NetworkGradient,
    NetworkParams,
    forward,
    forward_with_input_jacobian,
    init_network,
    parameter_gradient,
)

__all__ = [
    "EvalWithJacobian",
    "NetworkGradient",
    "NetworkParams",
    "forward",
    "forward_with_input_jacobian",
    "init_network",
    "load_checkpoint",
    "parameter_gradient",
    "read_checkpoint",
    "save_checkpoint",
]
