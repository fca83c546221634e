"""Raw cube file: a 64-byte little-endian header followed by the complex payload.

Header: magic b"FMCWRAW1", version (u32), n (u32), m (u32), then fs, t_sweep,
f_center, bw and v as f64, padded with 4 reserved zero bytes. The payload holds
n * m complex samples as interleaved f64 (re, im), fast time contiguous per
sweep, sweeps in increasing m.
"""
import logging
import os
import struct
from dataclasses import dataclass
from dataclasses import replace
from typing import Union

import numpy as np

from .errors import FormatError
from .errors import IoError
from .radar import RadarParams
from .radar import ValidatedParams
from .radar import validate_params
from .simulator import DataCube

logger = logging.getLogger(__name__)

MAGIC = b"FMCWRAW1"
VERSION = 1

_HEADER = struct.Struct("<8sIII5d4x")
HEADER_SIZE = _HEADER.size

_PAYLOAD_DTYPE = np.dtype("<c16")


@dataclass(frozen=True)
class CubeHeader:
    version: int
    n: int
    m: int
    fs: float
    t_sweep: float
    f_center: float
    bw: float
    v_platform: float

    def pack(self) -> bytes:
        return _HEADER.pack(
            MAGIC,
            self.version,
            self.n,
            self.m,
            self.fs,
            self.t_sweep,
            self.f_center,
            self.bw,
            self.v_platform,
        )

    @classmethod
    def unpack(cls, raw: bytes) -> "CubeHeader":
        if len(raw) < HEADER_SIZE:
            raise FormatError(f"truncated header ({len(raw)} bytes)")
        magic, version, n, m, fs, t_sweep, f_center, bw, v = _HEADER.unpack(
            raw[:HEADER_SIZE]
        )
        if magic != MAGIC:
            raise FormatError(f"bad magic {magic!r}", payload={"magic": repr(magic)})
        if version != VERSION:
            raise FormatError(
                f"unsupported version {version}", payload={"version": version}
            )
        return cls(version, n, m, fs, t_sweep, f_center, bw, v)

    @property
    def payload_size(self) -> int:
        return 16 * self.n * self.m


def write_cube(path: Union[str, os.PathLike], cube: DataCube) -> int:
    """Write `cube` to `path`, returns the number of bytes written."""
    p = cube.params_snapshot
    header = CubeHeader(
        version=VERSION,
        n=cube.n,
        m=cube.m,
        fs=p.fs,
        t_sweep=p.t_sweep,
        f_center=p.f_center,
        bw=p.bw,
        v_platform=p.v_platform,
    )
    # Column-major view: fast time contiguous per sweep
    payload = np.ascontiguousarray(cube.data.T, dtype=_PAYLOAD_DTYPE).tobytes()
    try:
        with open(path, "wb") as f:
            f.write(header.pack())
            f.write(payload)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc.strerror}", payload={"path": str(path)})

    size = HEADER_SIZE + len(payload)
    logger.info(f"wrote {path} ({cube.n}x{cube.m}, {size} bytes)")
    return size


def read_cube(
    path: Union[str, os.PathLike], params: Union[RadarParams, ValidatedParams]
) -> DataCube:
    """Read a cube; the header overrides the waveform fields of `params`."""
    try:
        with open(path, "rb") as f:
            raw = f.read()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc.strerror}", payload={"path": str(path)})

    header = CubeHeader.unpack(raw)
    body = raw[HEADER_SIZE:]
    if len(body) != header.payload_size:
        raise FormatError(
            f"payload is {len(body)} bytes, header implies {header.payload_size}",
            payload={"path": str(path)},
        )

    base = params.params if isinstance(params, ValidatedParams) else params
    vp = validate_params(
        replace(
            base,
            fs=header.fs,
            t_sweep=header.t_sweep,
            f_center=header.f_center,
            bw=header.bw,
            v_platform=header.v_platform,
            m_sweeps=header.m,
        )
    )
    if vp.n_samples != header.n:
        raise FormatError(
            f"header n={header.n} disagrees with round(t_sweep * fs) = {vp.n_samples}"
        )

    data = np.frombuffer(body, dtype=_PAYLOAD_DTYPE).reshape(header.m, header.n).T
    if not np.all(np.isfinite(data)):
        raise FormatError("payload holds non-finite samples", payload={"path": str(path)})
    logger.info(f"read {path} ({header.n}x{header.m})")
    return DataCube(data=data.astype(np.complex128), params_snapshot=vp)
