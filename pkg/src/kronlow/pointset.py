"""Point-set constructions in the half-open unit cube [0,1)^d.

Families provided: Kronecker lattices (optionally shifted, i.e. indexed
from 1 instead of 0), the 2-D Fibonacci set (golden-ratio Kronecker
set), and the unscrambled Sobol' sequence for d <= 10.  A self-describing
CSV format is used for serialization.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import TextIO

import numpy as np

GOLDEN_RATIO = (1.0 + math.sqrt(5.0)) / 2.0

SOBOL_MAX_DIM = 10
_SOBOL_BITS = 32

# Direction-number seeds for Sobol' dimensions 2..10 as (s, a, m_1..m_s):
# s = degree of the primitive polynomial, a = its interior coefficient bits,
# m = initial odd direction integers.  Dimension 1 is the van der Corput
# sequence in base 2.  Values are the first rows of the Joe/Kuo
# "new-joe-kuo-6" table, the de-facto published standard.
_SOBOL_SEEDS: list[tuple[int, int, list[int]]] = [
    (1, 0, [1]),                # dim 2
    (2, 1, [1, 3]),             # dim 3
    (3, 1, [1, 3, 1]),          # dim 4
    (3, 2, [1, 1, 1]),          # dim 5
    (4, 1, [1, 1, 3, 3]),       # dim 6
    (4, 4, [1, 3, 5, 13]),      # dim 7
    (5, 2, [1, 1, 5, 5, 17]),   # dim 8
    (5, 4, [1, 1, 5, 5, 5]),    # dim 9
    (5, 7, [1, 1, 7, 11, 19]),  # dim 10
]


class PointSetFormatError(ValueError):
    """Raised by load_csv on malformed input; message carries the line number."""


def _frac(x: np.ndarray | float):
    """Fractional part x - floor(x), mapped into [0, 1)."""
    return x - np.floor(x)


@dataclass
class PointSet:
    """n points in [0,1)^d stored as an (n, d) float matrix."""

    d: int
    n: int
    coords: np.ndarray

    def __post_init__(self) -> None:
        self.coords = np.ascontiguousarray(self.coords, dtype=np.float64)
        if self.coords.ndim != 2 or self.coords.shape != (self.n, self.d):
            raise ValueError(
                f"coords shape {self.coords.shape} does not match n={self.n}, d={self.d}"
            )
        if self.n < 1 or self.d < 1:
            raise ValueError("point set needs n >= 1 and d >= 1")
        if not np.isfinite(self.coords).all():
            raise ValueError("coordinates must be finite")
        if (self.coords < 0.0).any() or (self.coords >= 1.0).any():
            raise ValueError("coordinates must lie in [0, 1)")

    @classmethod
    def from_coords(cls, coords) -> "PointSet":
        coords = np.atleast_2d(np.asarray(coords, dtype=np.float64))
        return cls(d=coords.shape[1], n=coords.shape[0], coords=coords)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PointSet):
            return NotImplemented
        return (
            self.n == other.n
            and self.d == other.d
            and np.array_equal(self.coords, other.coords)
        )


@dataclass
class KroneckerParams:
    """Parameter vector (p_1, ..., p_d) of a Kronecker set plus the shift flag.

    Only the fractional part of each parameter is meaningful, so parameters
    are reduced mod 1 on construction.  ``shifted`` selects the index range
    {1, ..., n} instead of {0, ..., n-1}.
    """

    params: np.ndarray
    shifted: bool = False

    def __post_init__(self) -> None:
        self.params = np.asarray(self.params, dtype=np.float64).reshape(-1)
        if self.params.size < 1:
            raise ValueError("at least one parameter required")
        if not np.isfinite(self.params).all():
            raise ValueError("Kronecker parameters must be finite")
        self.params = _frac(self.params)

    @property
    def d(self) -> int:
        return self.params.size


def kronecker_set(n: int, params: KroneckerParams) -> PointSet:
    """Build the Kronecker point set {(frac(i*p_1), ..., frac(i*p_d))}.

    The index i runs over {1, ..., n} when ``params.shifted`` is set and
    over {0, ..., n-1} otherwise.  Degenerate parameters (rational, zero)
    are allowed; they may produce duplicate points, which simply score a
    bad discrepancy.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    idx = np.arange(1, n + 1, dtype=np.float64) if params.shifted else np.arange(n, dtype=np.float64)
    coords = _frac(np.outer(idx, params.params))
    return PointSet(d=params.d, n=n, coords=coords)


def kronecker_with_unit_first(n: int, *tail: float, shifted: bool = True) -> PointSet:
    """Kronecker set with the first parameter fixed to 1/n.

    The first coordinate of point i is computed exactly as (i mod n)/n,
    which is the exact value of frac(i/n); evaluating 1/n as a double
    first and multiplying would drift by an ulp for some n (e.g. n=49).
    Remaining coordinates use the generic construction with parameters
    ``tail`` = (p_2, ..., p_d).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rest = KroneckerParams(np.asarray(tail, dtype=np.float64), shifted=shifted) if tail else None
    idx = np.arange(1, n + 1, dtype=np.float64) if shifted else np.arange(n, dtype=np.float64)
    first = np.mod(idx, n) / n
    if rest is None:
        coords = first[:, None]
    else:
        coords = np.column_stack([first, _frac(np.outer(idx, rest.params))])
    return PointSet(d=coords.shape[1], n=n, coords=coords)


def fibonacci_set(n: int) -> PointSet:
    """The 2-D Fibonacci point set {(i/n, frac(i*phi)) : i = 0..n-1}.

    Implemented as the unshifted Kronecker set with parameters (1/n, phi),
    so the identity with kronecker_set holds coordinate-for-coordinate.
    """
    return kronecker_set(n, KroneckerParams(np.array([1.0 / n, GOLDEN_RATIO]), shifted=False))


def sobol_set(n: int, d: int) -> PointSet:
    """First ``n`` points of the unscrambled Sobol' sequence in ``d`` dimensions.

    Uses gray-code ordering with the embedded direction-number table;
    point 0 is the origin.  Supported for 1 <= d <= 10.

    Parameters
    ----------
    n : int
        Number of points (>= 1).
    d : int
        Dimension; limited by the embedded direction-number table.
    """
    if not 1 <= d <= SOBOL_MAX_DIM:
        raise ValueError(f"sobol_set supports 1 <= d <= {SOBOL_MAX_DIM}, got d={d}")
    if n < 1:
        raise ValueError("n must be >= 1")

    nbits = _SOBOL_BITS
    # v[j][i] = direction integer i (1-based) of dimension j, scaled by 2^(nbits-i)
    v: list[list[int]] = []
    for j in range(d):
        vj = [0] * (nbits + 1)
        if j == 0:
            for i in range(1, nbits + 1):
                vj[i] = 1 << (nbits - i)
        else:
            s, a, m = _SOBOL_SEEDS[j - 1]
            for i in range(1, s + 1):
                vj[i] = m[i - 1] << (nbits - i)
            for i in range(s + 1, nbits + 1):
                vj[i] = vj[i - s] ^ (vj[i - s] >> s)
                for k in range(1, s):
                    if (a >> (s - 1 - k)) & 1:
                        vj[i] ^= vj[i - k]
        v.append(vj)

    scale = float(1 << nbits)
    coords = np.zeros((n, d), dtype=np.float64)
    state = [0] * d
    for i in range(1, n):
        # gray-code step: flip the direction indexed by the lowest zero bit of i-1
        c = 1
        val = i - 1
        while val & 1:
            val >>= 1
            c += 1
        for j in range(d):
            state[j] ^= v[j][c]
            coords[i, j] = state[j] / scale
    return PointSet(d=d, n=n, coords=coords)


_HEADER_RE = re.compile(r"^d=(\d+),n=(\d+)\s*$")


def save_csv(pointset: PointSet, destination: str | Path | TextIO) -> None:
    """Write a point set as CSV: header ``d=<d>,n=<n>``, one point per row.

    Coordinates are written with shortest round-trip precision, so a
    save/load cycle reproduces the matrix bit-for-bit.
    """
    lines = [f"d={pointset.d},n={pointset.n}"]
    for row in pointset.coords:
        lines.append(",".join(repr(float(c)) for c in row))
    text = "\n".join(lines) + "\n"
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        Path(destination).write_text(text)


def load_csv(source: str | Path | TextIO) -> PointSet:
    """Read a point set written by save_csv.

    Raises PointSetFormatError naming the offending 1-based line for a bad
    header, wrong field count, unparsable numbers, or coordinates outside
    [0, 1).
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = Path(source).read_text()
    lines = text.splitlines()
    if not lines:
        raise PointSetFormatError("line 1: empty input, expected header d=<d>,n=<n>")
    m = _HEADER_RE.match(lines[0])
    if not m:
        raise PointSetFormatError(f"line 1: bad header {lines[0]!r}, expected d=<d>,n=<n>")
    d, n = int(m.group(1)), int(m.group(2))
    body = [ln for ln in lines[1:] if ln.strip() != ""]
    if len(body) != n:
        raise PointSetFormatError(
            f"line {len(lines)}: expected {n} point rows, found {len(body)}"
        )
    coords = np.empty((n, d), dtype=np.float64)
    for i, line in enumerate(body):
        lineno = i + 2
        fields = line.split(",")
        if len(fields) != d:
            raise PointSetFormatError(
                f"line {lineno}: expected {d} fields, found {len(fields)}"
            )
        try:
            row = [float(f) for f in fields]
        except ValueError as exc:
            raise PointSetFormatError(f"line {lineno}: {exc}") from None
        for c in row:
            if not 0.0 <= c < 1.0:
                raise PointSetFormatError(
                    f"line {lineno}: coordinate {c!r} outside [0, 1)"
                )
        coords[i] = row
    return PointSet(d=d, n=n, coords=coords)
