"""b-bit quantization of scalars and sequences.

``[x]_b`` keeps the integer part of ``x`` and the first ``b`` bits of its
fractional part. All arithmetic goes through ``floor(x * 2**b) / 2**b``,
which is exact in binary floating point for any ``x`` whose scaled value
stays finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, InvalidInputError


@dataclass(frozen=True)
class QuantSpec:
    """Bit depth ``b`` and bounded source interval.

    The interval is ``[lo, hi]`` when ``closed`` is true and ``[lo, hi)``
    otherwise.
    """

    b: int
    lo: float
    hi: float
    closed: bool = True

    def __post_init__(self):
        if not isinstance(self.b, (int, np.integer)) or isinstance(self.b, bool) or self.b < 1:
            raise InvalidInputError(f"b must be a positive integer, got {self.b!r}")
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise InvalidInputError("source interval must be finite")
        if not self.lo < self.hi:
            raise InvalidInputError(f"need lo < hi, got [{self.lo}, {self.hi}]")

    @property
    def step(self) -> float:
        return 2.0 ** -self.b

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        upper = x <= self.hi if self.closed else x < self.hi
        return (x >= self.lo) & upper


def quantize_scalar(x: float, b: int) -> float:
    """Return ``[x]_b``; satisfies ``[x]_b <= x < [x]_b + 2**-b``."""
    if b < 1:
        raise InvalidInputError(f"b must be >= 1, got {b}")
    x = float(x)
    if not math.isfinite(x):
        raise InvalidInputError(f"cannot quantize non-finite value {x}")
    scaled = x * 2.0 ** b
    if not math.isfinite(scaled):
        raise InvalidInputError(f"{x} overflows at b={b}")
    return math.floor(scaled) / 2.0 ** b


def _quantize_array(x: np.ndarray, b: int) -> np.ndarray:
    scale = 2.0 ** b
    return np.floor(x * scale) / scale


def _grid_bounds(spec: QuantSpec) -> tuple[int, int]:
    """Integer grid indices (in units of 2**-b) of the smallest and largest
    attainable quantized values."""
    scale = 2.0 ** spec.b
    first = math.floor(spec.lo * scale)
    if spec.closed:
        last = math.floor(spec.hi * scale)
    else:
        last = math.ceil(spec.hi * scale) - 1
    return first, last


def build_alphabet(spec: QuantSpec) -> np.ndarray:
    """Sorted grid ``X_b = {[x]_b : x in X}``."""
    first, last = _grid_bounds(spec)
    return np.arange(first, last + 1, dtype=np.int64) / 2.0 ** spec.b


@dataclass(frozen=True, eq=False)
class QuantizedSequence:
    """A sequence over ``X_b``.

    ``indices`` gives each value's position in ``build_alphabet(spec)``.
    """

    values: np.ndarray
    spec: QuantSpec
    indices: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float).reshape(-1)
        if not np.all(np.isfinite(values)):
            raise InvalidInputError("quantized values must be finite")
        if not np.array_equal(_quantize_array(values, self.spec.b), values):
            raise InvalidInputError("values are not on the b-bit grid")
        first, last = _grid_bounds(self.spec)
        idx = np.rint(values * 2.0 ** self.spec.b).astype(np.int64) - first
        if idx.size and (idx.min() < 0 or idx.max() > last - first):
            raise DomainError("values fall outside the quantized alphabet")
        values.setflags(write=False)
        idx.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "indices", idx)

    @classmethod
    def from_indices(cls, indices, spec: QuantSpec) -> "QuantizedSequence":
        first, _ = _grid_bounds(spec)
        values = (np.asarray(indices, dtype=np.int64) + first) / 2.0 ** spec.b
        return cls(values, spec)

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def alphabet(self) -> np.ndarray:
        return build_alphabet(self.spec)

    def __len__(self):
        return self.values.size

    def __eq__(self, other):
        if not isinstance(other, QuantizedSequence):
            return NotImplemented
        return self.spec == other.spec and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash((self.spec, self.values.tobytes()))


def quantize_sequence(x: Iterable[float], spec: QuantSpec) -> QuantizedSequence:
    """Elementwise ``[x_i]_b``; every entry must lie in the source interval."""
    x = np.asarray(list(x) if not isinstance(x, np.ndarray) else x, dtype=float).reshape(-1)
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("signal contains non-finite values")
    inside = spec.contains(x)
    if not np.all(inside):
        bad = np.flatnonzero(~inside)[0]
        raise DomainError(f"x[{bad}] = {x[bad]} lies outside the source interval")
    return QuantizedSequence(_quantize_array(x, spec.b), spec)


def read_signal(path) -> np.ndarray:
    """Read a signal file: one decimal real per line, blank lines ignored."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return np.array([float(s) for s in lines if s.strip()], dtype=float)


def write_signal(path, x: Sequence[float]) -> None:
    text = "".join(f"{float(v)!r}\n" for v in np.asarray(x, dtype=float))
    Path(path).write_text(text, encoding="utf-8")
