"""Content-addressed artifact cache.

Keys are sha256 hashes of canonical JSON job descriptors; values are files
with a versioned header carrying their own payload hash, so corruption is
detected on read.  Cached reports are returned byte-identical.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

import numpy as np

from .errors import CorruptCache

MAGIC = b"MTCACHE1\n"


def job_key(descriptor: dict) -> str:
    blob = json.dumps(descriptor, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def default_cache_dir() -> Path:
    env = os.environ.get("MT_CACHE")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "mt"


def cache_put(cache_dir: Path, key: str, name: str, payload: bytes) -> Path:
    d = Path(cache_dir) / key
    d.mkdir(parents=True, exist_ok=True)
    digest = hashlib.sha256(payload).hexdigest().encode()
    path = d / name
    path.write_bytes(MAGIC + digest + b"\n" + payload)
    return path


def cache_get(cache_dir: Path, key: str, name: str) -> bytes | None:
    path = Path(cache_dir) / key / name
    if not path.exists():
        return None
    raw = path.read_bytes()
    if not raw.startswith(MAGIC):
        raise CorruptCache(f"bad header in {path}")
    rest = raw[len(MAGIC):]
    digest, _, payload = rest.partition(b"\n")
    if hashlib.sha256(payload).hexdigest().encode() != digest:
        raise CorruptCache(f"hash mismatch in {path}")
    return payload


def cache_list(cache_dir: Path, key: str) -> list[str]:
    d = Path(cache_dir) / key
    if not d.is_dir():
        return []
    return sorted(p.name for p in d.iterdir())


# -- level serialization --------------------------------------------------------


def serialize_level(level) -> bytes:
    """Versioned JSON: base generators, kernel module, cocycle table."""
    base = level.base
    doc = {
        "version": 1,
        "p": level.p,
        "name": level.name,
        "base_name": base.name,
        "base_degree": base.degree,
        "base_gens": [[int(x) for x in base.elements[g]] for g in base.gen_indices],
        "module_mats": [m.tolist() for m in level.kernel_module.mats],
        "psi": level.psi.tolist(),
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()


def deserialize_level(payload: bytes):
    from .frattini import level_from_pair_model
    from .gmodules import GModule
    from .groups import FiniteGroup
    from .perms import Perm

    doc = json.loads(payload.decode())
    if doc.get("version") != 1:
        raise CorruptCache(f"unknown level format version {doc.get('version')}")
    gens = [Perm(tuple(images)) for images in doc["base_gens"]]
    base = FiniteGroup(gens, name=doc.get("base_name", ""))
    module = GModule(base, doc["p"],
                     [np.array(m, dtype=np.int64) for m in doc["module_mats"]],
                     check=False)
    psi = np.array(doc["psi"], dtype=np.int64)
    if psi.size == 0:
        psi = psi.reshape(base.order, base.order, 0)
    return level_from_pair_model(base, module, psi, doc["p"], name=doc["name"])
