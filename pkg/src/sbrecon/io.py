"""Binary file formats for images, measurements and masks.

Raw arrays: magic ``b"SBR1"``, then little-endian ``uint32`` flags (bit 0 set
for complex data), ``uint32`` ndim, ``ndim`` ``uint32`` dims, then the data as
little-endian float64 in row-major order (complex values interleaved re, im).

Masks: little-endian ``uint32`` n and line_count, then ``n*n`` bytes of 0/1.
"""

import struct

import numpy as np

MAGIC = b"SBR1"
_FLAG_COMPLEX = 1


def write_raw(path, arr):
    arr = np.asarray(arr)
    is_complex = np.iscomplexobj(arr)
    flags = _FLAG_COMPLEX if is_complex else 0
    header = MAGIC + struct.pack("<II", flags, arr.ndim)
    header += struct.pack(f"<{arr.ndim}I", *arr.shape)
    if is_complex:
        data = np.ascontiguousarray(arr, dtype="<c16")
    else:
        data = np.ascontiguousarray(arr, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(data.tobytes())


def read_raw(path):
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:4] != MAGIC:
        raise ValueError(f"{path}: not a raw array file (bad magic)")
    flags, ndim = struct.unpack_from("<II", blob, 4)
    dims = struct.unpack_from(f"<{ndim}I", blob, 12)
    offset = 12 + 4 * ndim
    dtype = "<c16" if flags & _FLAG_COMPLEX else "<f8"
    count = int(np.prod(dims)) if ndim else 1
    expected = offset + count * np.dtype(dtype).itemsize
    if len(blob) != expected:
        raise ValueError(f"{path}: expected {expected} bytes, found {len(blob)}")
    data = np.frombuffer(blob, dtype=dtype, count=count, offset=offset)
    return data.reshape(dims).astype(np.complex128 if flags & _FLAG_COMPLEX else np.float64)


def write_mask(path, mask, line_count=0):
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim != 2 or mask.shape[0] != mask.shape[1]:
        raise ValueError("mask must be square")
    with open(path, "wb") as fh:
        fh.write(struct.pack("<II", mask.shape[0], int(line_count)))
        fh.write(mask.astype(np.uint8).tobytes())


def read_mask(path):
    """Return ``(mask, line_count)``."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 8:
        raise ValueError(f"{path}: truncated mask file")
    n, lines = struct.unpack_from("<II", blob, 0)
    if len(blob) != 8 + n * n:
        raise ValueError(f"{path}: expected {8 + n * n} bytes, found {len(blob)}")
    body = np.frombuffer(blob, dtype=np.uint8, offset=8)
    if np.any(body > 1):
        raise ValueError(f"{path}: mask bytes must be 0 or 1")
    return body.reshape(n, n).astype(bool), lines
