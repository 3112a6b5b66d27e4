import hashlib
import json
import logging
import struct
from pathlib import Path
from typing import Dict, Optional, Tuple

import numpy as np

from common.errors import ContractError

logger = logging.getLogger(__name__)

CHECKPOINT_FORMAT = "spectral-pinn-checkpoint"
CHECKPOINT_VERSION = 1


def config_hash(resolved_config: dict) -> str:
    payload = json.dumps(resolved_config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def save_checkpoint(
    path, tensors: Dict[str, np.ndarray], seed: int, cfg_hash: str, extra: Optional[dict] = None
) -> Path:
    """Write ``<u64 header length><json header><little-endian float64 payload>``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "seed": int(seed),
        "config_hash": cfg_hash,
        "tensors": [{"name": name, "shape": list(t.shape)} for name, t in tensors.items()],
    }
    if extra:
        header["extra"] = extra
    header_bytes = json.dumps(header, sort_keys=True).encode("utf-8")
    payload = b"".join(np.ascontiguousarray(t, dtype="<f8").tobytes() for t in tensors.values())

    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as f:
        f.write(struct.pack("<Q", len(header_bytes)))
        f.write(header_bytes)
        f.write(payload)
    tmp.replace(path)
    logger.debug(f"Checkpoint with {len(tensors)} tensors written to {path}")
    return path


def load_checkpoint(path) -> Tuple[Dict[str, np.ndarray], dict]:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except FileNotFoundError:
        logger.error(f"Checkpoint not found: {path}")
        raise
    (header_len,) = struct.unpack("<Q", raw[:8])
    header = json.loads(raw[8 : 8 + header_len].decode("utf-8"))
    if header.get("format") != CHECKPOINT_FORMAT:
        raise ContractError(f"{path} is not a checkpoint file")

    payload = np.frombuffer(raw[8 + header_len :], dtype="<f8")
    tensors, offset = {}, 0
    for entry in header["tensors"]:
        shape = tuple(entry["shape"])
        size = int(np.prod(shape, dtype=np.int64))
        if offset + size > payload.size:
            raise ContractError(f"Checkpoint {path} is truncated at tensor '{entry['name']}'")
        tensors[entry["name"]] = payload[offset : offset + size].reshape(shape).astype(np.float64)
        offset += size
    if offset != payload.size:
        raise ContractError(f"Checkpoint {path} has {payload.size - offset} trailing values")
    return tensors, header
