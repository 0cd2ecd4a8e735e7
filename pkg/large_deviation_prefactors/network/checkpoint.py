"""
Network checkpoints

Self-describing binary container:

    MAGIC (8 bytes) | format version (uint16 LE) | header length (uint32 LE)
    | header JSON (CheckpointHeader) | parameters as little-endian float64

The header carries the architecture, init seed and training metadata (epoch,
loss, stable point, config digest). Round trips are bit-exact.
"""

import struct
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel, Field, ValidationError

from large_deviation_prefactors.models.architecture import Architecture
from large_deviation_prefactors.network.diffnet import NetworkParams
from large_deviation_prefactors.utils.errors import CheckpointError

MAGIC = b"LDPNET\x00\x00"
FORMAT_VERSION = 1
_PREAMBLE = struct.Struct("<HI")


class CheckpointHeader(BaseModel):
    """Header block of a checkpoint file."""

    format_version: int = Field(default=FORMAT_VERSION)
    architecture: Architecture
    seed: int
    n_parameters: int
    metadata: dict[str, Any] = Field(default_factory=dict, description="Training metadata")


def save_checkpoint(
    params: NetworkParams, path: str | Path, metadata: dict[str, Any] | None = None
) -> Path:
    """
    Write params to `path`.

    Args:
        params: Network parameters
        path: Output file
        metadata: Training metadata (epoch, losses, x_bar, ...), JSON-serializable

    Returns:
        Path written
    """
    header = CheckpointHeader(
        architecture=params.architecture,
        seed=params.seed,
        n_parameters=params.n_parameters,
        metadata=metadata or {},
    )
    header_bytes = header.model_dump_json(by_alias=True).encode("utf-8")
    payload = params.flatten().astype("<f8").tobytes()

    output_path = Path(path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    with open(output_path, "wb") as f:
        f.write(MAGIC)
        f.write(_PREAMBLE.pack(FORMAT_VERSION, len(header_bytes)))
        f.write(header_bytes)
        f.write(payload)
    return output_path


def read_checkpoint(
    path: str | Path, expected_input_dim: int | None = None
) -> tuple[NetworkParams, CheckpointHeader]:
    """
    Read params and header from `path`.

    Raises:
        FileNotFoundError: if the file does not exist
        CheckpointError: bad magic, unsupported version, corrupt header/payload,
            or input dimension different from `expected_input_dim`
    """
    input_path = Path(path)
    if not input_path.exists():
        raise FileNotFoundError(f"Checkpoint not found: {path}")
    raw = input_path.read_bytes()

    if raw[: len(MAGIC)] != MAGIC:
        raise CheckpointError(f"{path}: not a network checkpoint (bad magic)")
    offset = len(MAGIC)
    if len(raw) < offset + _PREAMBLE.size:
        raise CheckpointError(f"{path}: truncated preamble")
    version, header_len = _PREAMBLE.unpack_from(raw, offset)
    if version != FORMAT_VERSION:
        raise CheckpointError(
            f"{path}: checkpoint format version {version}, this build reads {FORMAT_VERSION}"
        )
    offset += _PREAMBLE.size

    try:
        header = CheckpointHeader.model_validate_json(raw[offset : offset + header_len])
    except ValidationError as exc:
        raise CheckpointError(f"{path}: corrupt header ({exc.error_count()} errors)") from exc
    offset += header_len

    payload = raw[offset:]
    if len(payload) != 8 * header.n_parameters:
        raise CheckpointError(
            f"{path}: payload holds {len(payload)} bytes, header declares "
            f"{header.n_parameters} float64 parameters"
        )
    if expected_input_dim is not None and header.architecture.input_dim != expected_input_dim:
        raise CheckpointError(
            f"{path}: network input dimension {header.architecture.input_dim}, "
            f"expected {expected_input_dim}"
        )

    flat = np.frombuffer(payload, dtype="<f8").astype(np.float64)
    try:
        params = NetworkParams.from_flat(header.architecture, flat, header.seed)
    except ValueError as exc:
        raise CheckpointError(f"{path}: {exc}") from exc
    if not np.all(np.isfinite(flat)):
        raise CheckpointError(f"{path}: non-finite parameters")
    return params, header


def load_checkpoint(path: str | Path, expected_input_dim: int | None = None) -> NetworkParams:
    """Read only the parameters of a checkpoint (see read_checkpoint)."""
    params, _ = read_checkpoint(path, expected_input_dim)
    return params
