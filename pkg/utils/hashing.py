"""
Hashing utilities
Deterministic digests for run manifests and spec files
"""

import hashlib
import json
from typing import Any

from config import logger


def canonical_json(payload: Any) -> str:
    """Serialize with sorted keys and no whitespace so equal inputs give equal text"""
    return json.dumps(payload, sort_keys=True, separators=(',', ':'), default=str)


def canonical_hash(payload: Any) -> str:
    """
    SHA-256 digest of the canonical JSON form

    Args:
        payload: Any JSON-serializable structure

    Returns:
        Hex digest (64 characters)
    """
    digest = hashlib.sha256(canonical_json(payload).encode()).hexdigest()
    logger.debug(f"canonical hash {digest[:12]}")
    return digest


def file_hash(path: str) -> str:
    """SHA-256 digest of a file's bytes"""
    sha = hashlib.sha256()
    with open(path, 'rb') as handle:
        for chunk in iter(lambda: handle.read(65536), b''):
            sha.update(chunk)
    return sha.hexdigest()
