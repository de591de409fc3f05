"""Dense array containers and NPY v1.0 file I/O.

Features are (C, H, W) float grids, label masks are (H, W) integer grids,
and binary masks are (H, W) booleans.  Files use the NPY v1.0 container,
little-endian, C order, restricted to the dtypes '<f4', '<f8', '|u1',
'<i4', '<u2'.  All values are immutable after construction.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    FormatError,
    UnsupportedDtypeError,
    ValidationError,
)

NPY_MAGIC = b"\x93NUMPY"

# descr -> numpy dtype for the supported subset
_DESCR_TO_DTYPE = {
    "<f4": np.dtype("<f4"),
    "<f8": np.dtype("<f8"),
    "|u1": np.dtype("|u1"),
    "<i4": np.dtype("<i4"),
    "<u2": np.dtype("<u2"),
}
_DTYPE_TO_DESCR = {v: k for k, v in _DESCR_TO_DTYPE.items()}

FLOAT_DTYPES = (np.dtype("<f4"), np.dtype("<f8"))
INT_DTYPES = (np.dtype("|u1"), np.dtype("<i4"), np.dtype("<u2"))

DEFAULT_IGNORE_VALUE = 255


def read_npy(path) -> np.ndarray:
    """Read an NPY v1.0 file into a C-ordered array of a supported dtype."""
    data = Path(path).read_bytes()
    if len(data) < 10 or data[:6] != NPY_MAGIC:
        raise FormatError(f"{path}: not an NPY file (bad magic)")
    major, minor = data[6], data[7]
    if (major, minor) != (1, 0):
        raise FormatError(f"{path}: unsupported NPY version {major}.{minor}")
    header_len = int.from_bytes(data[8:10], "little")
    header_end = 10 + header_len
    if len(data) < header_end:
        raise FormatError(f"{path}: truncated header")
    try:
        header_text = data[10:header_end].decode("ascii")
        header = ast.literal_eval(header_text.strip())
    except (UnicodeDecodeError, ValueError, SyntaxError) as exc:
        raise FormatError(f"{path}: unparseable header") from exc
    if not isinstance(header, dict) or set(header) != {
        "descr",
        "fortran_order",
        "shape",
    }:
        raise FormatError(f"{path}: header keys must be descr/fortran_order/shape")
    descr = header["descr"]
    if descr not in _DESCR_TO_DTYPE:
        raise UnsupportedDtypeError(f"{path}: unsupported dtype {descr!r}")
    if header["fortran_order"] is not False:
        raise FormatError(f"{path}: fortran_order must be False")
    shape = header["shape"]
    if not (
        isinstance(shape, tuple)
        and all(isinstance(n, int) and n >= 0 for n in shape)
    ):
        raise FormatError(f"{path}: bad shape {shape!r}")
    dtype = _DESCR_TO_DTYPE[descr]
    count = int(np.prod(shape, dtype=np.int64)) if shape else 1
    expected = count * dtype.itemsize
    payload = data[header_end:]
    if len(payload) != expected:
        raise FormatError(
            f"{path}: payload is {len(payload)} bytes, expected {expected}"
        )
    arr = np.frombuffer(payload, dtype=dtype).reshape(shape)
    return arr.copy()  # decouple from the file buffer, writable C order


def write_npy(path, arr: np.ndarray) -> None:
    """Write an array to an NPY v1.0 file (C order, supported dtypes only)."""
    arr = np.asarray(arr, order="C")  # keeps 0-d arrays 0-d
    dtype = arr.dtype.newbyteorder("<") if arr.dtype.byteorder == ">" else arr.dtype
    if dtype not in _DTYPE_TO_DESCR:
        raise UnsupportedDtypeError(f"cannot save dtype {arr.dtype}")
    descr = _DTYPE_TO_DESCR[dtype]
    header = "{'descr': %r, 'fortran_order': False, 'shape': %r, }" % (
        descr,
        tuple(int(n) for n in arr.shape),
    )
    # pad so magic+version+len+header is a multiple of 64, ending in newline
    unpadded = len(NPY_MAGIC) + 2 + 2 + len(header) + 1
    pad = (-unpadded) % 64
    header = header + " " * pad + "\n"
    with open(path, "wb") as fh:
        fh.write(NPY_MAGIC)
        fh.write(bytes((1, 0)))
        fh.write(len(header).to_bytes(2, "little"))
        fh.write(header.encode("ascii"))
        fh.write(arr.astype(dtype, copy=False).tobytes(order="C"))


@dataclass(frozen=True)
class FeatureTensor:
    """Real-valued (C, H, W) grid; every element finite."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.ndim != 3:
            raise ValidationError(f"feature tensor must be 3D, got shape {arr.shape}")
        if arr.dtype not in FLOAT_DTYPES:
            arr = arr.astype(np.float64)
        if any(n <= 0 for n in arr.shape):
            raise ValidationError(f"feature tensor dims must be positive: {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("feature tensor contains NaN/Inf")
        object.__setattr__(self, "data", arr)

    @property
    def channels(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]


@dataclass(frozen=True)
class LabelMask:
    """Integer (H, W) label grid; ignore_value marks unlabeled pixels."""

    data: np.ndarray
    ignore_value: int | None = DEFAULT_IGNORE_VALUE

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.ndim != 2:
            raise ValidationError(f"label mask must be 2D, got shape {arr.shape}")
        if arr.dtype not in INT_DTYPES:
            if not np.issubdtype(arr.dtype, np.integer):
                raise ValidationError(f"label mask dtype must be integer: {arr.dtype}")
            arr = arr.astype(np.int32)
        if any(n <= 0 for n in arr.shape):
            raise ValidationError(f"label mask dims must be positive: {arr.shape}")
        bad = arr < 0
        if self.ignore_value is not None:
            bad &= arr != self.ignore_value
        if np.any(bad):
            raise ValidationError("label mask contains negative labels")
        object.__setattr__(self, "data", arr)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    def validate_classes(self, n_classes: int) -> None:
        labels = self.data
        if self.ignore_value is not None:
            labels = labels[labels != self.ignore_value]
        if labels.size and int(labels.max()) >= n_classes:
            raise ValidationError(
                f"label {int(labels.max())} out of range for {n_classes} classes"
            )

    def present_classes(self) -> list[int]:
        labels = np.unique(self.data)
        if self.ignore_value is not None:
            labels = labels[labels != self.ignore_value]
        return [int(v) for v in labels]


@dataclass(frozen=True)
class BinaryMask:
    """Boolean (H, W) grid."""

    bits: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.bits)
        if arr.ndim != 2:
            raise ValidationError(f"binary mask must be 2D, got shape {arr.shape}")
        object.__setattr__(self, "bits", arr.astype(bool))

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    def count(self) -> int:
        return int(self.bits.sum())


def load_array(path, ignore_value: int | None = DEFAULT_IGNORE_VALUE):
    """Load an NPY file as a FeatureTensor or LabelMask.

    2D integer arrays become LabelMask, 2D float arrays become a
    single-channel FeatureTensor, 3D float arrays become (C, H, W)
    FeatureTensors.  Anything else is rejected.
    """
    arr = read_npy(path)
    if arr.ndim == 2:
        if arr.dtype in INT_DTYPES:
            return LabelMask(arr, ignore_value=ignore_value)
        return FeatureTensor(arr[np.newaxis, :, :])
    if arr.ndim == 3:
        if arr.dtype in INT_DTYPES:
            raise UnsupportedDtypeError(
                f"{path}: 3D integer arrays have no interpretation here"
            )
        return FeatureTensor(arr)
    raise ValidationError(f"{path}: expected 2D or 3D array, got {arr.ndim}D")


def save_array(obj, path) -> None:
    """Save a FeatureTensor, LabelMask, or BinaryMask to NPY."""
    if isinstance(obj, FeatureTensor):
        write_npy(path, obj.data)
    elif isinstance(obj, LabelMask):
        write_npy(path, obj.data)
    elif isinstance(obj, BinaryMask):
        write_npy(path, obj.bits.astype(np.uint8))
    else:
        write_npy(path, np.asarray(obj))


def class_mask(mask: LabelMask, class_id: int) -> BinaryMask:
    """Binary mask of pixels equal to class_id; ignored pixels are cleared."""
    bits = mask.data == class_id
    if mask.ignore_value is not None:
        bits &= mask.data != mask.ignore_value
    return BinaryMask(bits)
