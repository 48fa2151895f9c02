"""Binary spectrum cache.

Layout (all little-endian)::

    offset  size  field
    0       8     magic b"QBOXCACH"
    8       4     format version (uint32)
    12      4     nmax (uint32)
    16      4     number of eigenvalues n (uint32)
    20      4     solver version (uint32)
    24      8     eps (binary64)
    32      8n    eigenvalues (binary64)
    32+8n   8n^2  eigenvectors, row-major (binary64)
    ...     32    SHA-256 of every preceding byte
"""

from __future__ import annotations

import hashlib
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from .errors import CacheError
from .spectral import SpectralResult

MAGIC = b"QBOXCACH"
FORMAT_VERSION = 1
SOLVER_VERSION = 1
HEADER = struct.Struct("<8sIIIId")
DIGEST_SIZE = 32


def cache_key(nmax: int, eps: float, solver_version: int = SOLVER_VERSION) -> str:
    """Canonical, collision-free key; float.hex keeps every bit of eps."""
    return f"nmax={int(nmax)};eps={float(eps).hex()};solver={solver_version};format={FORMAT_VERSION}"


def cache_path(cache_dir, nmax: int, eps: float) -> Path:
    name = f"qbox_n{int(nmax)}_eps{float(eps).hex()}_s{SOLVER_VERSION}_f{FORMAT_VERSION}.bin"
    return Path(cache_dir) / name


def encode(result: SpectralResult) -> bytes:
    E = np.ascontiguousarray(result.eigenvalues, dtype="<f8")
    U = np.ascontiguousarray(result.eigenvectors, dtype="<f8")
    n = len(E)
    if U.shape != (n, n):
        raise CacheError(f"eigenvector block has shape {U.shape}, expected {(n, n)}")
    body = HEADER.pack(MAGIC, FORMAT_VERSION, int(result.nmax or 0), n, SOLVER_VERSION, float(result.eps))
    body += E.tobytes() + U.tobytes()
    return body + hashlib.sha256(body).digest()


def decode(blob: bytes) -> SpectralResult:
    if len(blob) < HEADER.size + DIGEST_SIZE:
        raise CacheError("cache entry truncated")
    body, digest = blob[:-DIGEST_SIZE], blob[-DIGEST_SIZE:]
    if hashlib.sha256(body).digest() != digest:
        raise CacheError("cache checksum mismatch")
    magic, fmt, nmax, n, solver, eps = HEADER.unpack_from(body)
    if magic != MAGIC:
        raise CacheError("bad magic bytes")
    if fmt != FORMAT_VERSION or solver != SOLVER_VERSION:
        raise CacheError(f"cache version {fmt}/{solver} does not match {FORMAT_VERSION}/{SOLVER_VERSION}")
    if len(body) != HEADER.size + 8 * (n + n * n):
        raise CacheError("cache payload size does not match header")
    off = HEADER.size
    E = np.frombuffer(body, dtype="<f8", count=n, offset=off).astype(float)
    U = np.frombuffer(body, dtype="<f8", count=n * n, offset=off + 8 * n).reshape(n, n).astype(float)
    return SpectralResult(eps, nmax or None, E, U)


def store(result: SpectralResult, cache_dir) -> Path:
    """Write atomically: temp file in the target directory, then rename."""
    path = cache_path(cache_dir, result.nmax or 0, result.eps)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".bin")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(encode(result))
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    return path


def load(cache_dir, nmax: int, eps: float) -> SpectralResult | None:
    """Return the cached spectrum, None if absent; raise CacheError if unreadable."""
    path = cache_path(cache_dir, nmax, eps)
    if not path.exists():
        return None
    result = decode(path.read_bytes())
    if result.nmax != nmax or result.eps != eps:
        raise CacheError(f"{path.name} holds nmax={result.nmax}, eps={result.eps}")
    return result
