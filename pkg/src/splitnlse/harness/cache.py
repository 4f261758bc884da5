"""Binary reference-solution cache.

Layout (little-endian)::

    8s   magic  b"NLSR0001"
    f64  a, f64 b, u64 N, f64 tau_e, f64 T
    u32  scheme id, f64 beta, f64 sigma, u32 potential id, u32 oversample q
    2N x f64  interleaved (re, im) coefficients in canonical order l = -N/2..N/2-1
"""
from __future__ import annotations

import os
import struct
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import CacheError
from ..spectral import Grid, SpectralField

MAGIC = b"NLSR0001"
_HEADER = struct.Struct("<8sddQddIddII")

SCHEME_IDS = {"ltfs": 1, "stfs": 2, "ewi1": 3}
POTENTIAL_IDS = {"zero": 0, "box4": 1, "fracpow076": 2, "fracpow151w": 3, "fracpow251w": 4,
                 "harmonic": 5}
_SCHEME_KEYS = {v: k for k, v in SCHEME_IDS.items()}
_POTENTIAL_KEYS = {v: k for k, v in POTENTIAL_IDS.items()}


@dataclass(frozen=True)
class CacheHeader:
    a: float
    b: float
    N: int
    tau_e: float
    T: float
    scheme: str
    beta: float
    sigma: float
    potential: str
    oversample_q: int

    def pack(self):
        try:
            sid = SCHEME_IDS[self.scheme]
            pid = POTENTIAL_IDS[self.potential]
        except KeyError as exc:
            raise CacheError(f"cannot cache runs with {exc.args[0]!r}") from None
        return _HEADER.pack(MAGIC, self.a, self.b, self.N, self.tau_e, self.T, sid,
                            self.beta, self.sigma, pid, self.oversample_q)


@dataclass(frozen=True, eq=False)
class ReferenceCache:
    path: Path
    header: CacheHeader
    field: SpectralField


def write_cache(path, header, field):
    """Atomically write ``field`` under ``header``: temp file in the same directory, then rename."""
    path = Path(path)
    if field.grid.N != header.N:
        raise CacheError("field size does not match header N")
    payload = np.empty(2 * header.N, dtype="<f8")
    payload[0::2] = field.coeffs.real
    payload[1::2] = field.coeffs.imag
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=path.name + ".", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(header.pack())
            fh.write(payload.tobytes())
            fh.flush()
            os.fsync(fh.fileno())
        # mkstemp creates 0600; use the mode an ordinary open() would give
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return ReferenceCache(path, header, field)


def read_cache(path):
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise CacheError(f"cannot read reference cache {path}: {exc}") from exc
    if len(data) < _HEADER.size or data[:8] != MAGIC:
        raise CacheError(f"{path} is not a reference cache (bad magic); delete it or recompute")
    (_, a, b, N, tau_e, T, sid, beta, sigma, pid, q) = _HEADER.unpack_from(data)
    if len(data) != _HEADER.size + 16 * N:
        raise CacheError(f"{path} is truncated or padded (expected {N} coefficients); recompute")
    if sid not in _SCHEME_KEYS or pid not in _POTENTIAL_KEYS:
        raise CacheError(f"{path} has unknown scheme/potential ids; recompute")
    header = CacheHeader(a, b, N, tau_e, T, _SCHEME_KEYS[sid], beta, sigma, _POTENTIAL_KEYS[pid], q)
    raw = np.frombuffer(data, dtype="<f8", offset=_HEADER.size)
    coeffs = raw[0::2] + 1j * raw[1::2]
    try:
        grid = Grid(a, b, N)
    except ValueError as exc:
        raise CacheError(f"{path} has an invalid grid header: {exc}") from exc
    return ReferenceCache(path, header, SpectralField(grid, coeffs))
