"""Truncated wavelet transforms, the diagnostic curve C, scattering intensity.

T_j(f_i, R) sums f_i(x / R^j) over the points of the pattern. Sums of many
signed, nearly cancelling terms are the core numeric risk, so reductions
use a canonical point order and a fixed-block pairwise scheme: results are
bit-identical under any permutation of the input points.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ZeroFrequency, ZeroTransformSum
from .tapers import hermite_function_values

_SUM_BLOCK = 1024


def _canonical_order(points):
    """Lexicographic order by coordinates; ties broken by later columns."""
    if len(points) == 0:
        return points
    keys = tuple(points[:, col] for col in range(points.shape[1] - 1, -1, -1))
    return points[np.lexsort(keys)]


def blocked_sum(values, axis=0):
    """Fixed-block pairwise reduction (block 1024) along an axis.

    Zero-padding to a whole number of blocks leaves the sum unchanged and
    makes the reduction tree independent of how the caller batched the data.
    """
    values = np.asarray(values, dtype=np.float64)
    values = np.moveaxis(values, axis, 0)
    n = values.shape[0]
    if n == 0:
        return np.zeros(values.shape[1:])
    n_blocks = -(-n // _SUM_BLOCK)
    padded = np.zeros((n_blocks * _SUM_BLOCK,) + values.shape[1:])
    padded[:n] = values
    per_block = padded.reshape((n_blocks, _SUM_BLOCK) + values.shape[1:]).sum(axis=1)
    return per_block.sum(axis=0)


@dataclass(frozen=True)
class TransformValue:
    j: float
    taper: tuple
    value: float


@dataclass(frozen=True)
class TransformGrid:
    """Transforms for every (scale, taper) pair; values has shape (|J|, |I|)."""

    scales: np.ndarray
    indices: tuple
    values: np.ndarray
    R: float

    def value(self, i, j):
        row = int(np.argmin(np.abs(self.scales - j)))
        if abs(self.scales[row] - j) > 1e-12:
            raise KeyError(f"scale {j} not on the grid")
        return float(self.values[row, self.indices.index(tuple(i))])


@dataclass(frozen=True)
class CurveC:
    """The diagnostic curve C(j) = log(sum_i T_j^2) / log R."""

    grid: np.ndarray
    values: np.ndarray
    R: float
    taper_set_id: str

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write("j,C\n")
            for j, v in zip(self.grid, self.values):
                fh.write(f"{float(j)!r},{float(v)!r}\n")


def taper_set_id(set_):
    return f"hermite(d={set_.dim},imax={set_.i_max},c={set_.spatial_scale!r})"


def wavelet_transform(p, set_, i, j):
    """T_j(f_i, R) = sum over points of f_i(x / R^j)."""
    R = p.half_width
    if not R > 1:
        raise DomainError(f"wavelet_transform requires window half-width > 1, got {R}")
    if not j > 0:
        raise DomainError("scale j must be positive")
    i = tuple(i)
    if len(p) == 0:
        return 0.0
    pts = _canonical_order(p.points)
    y = (set_.spatial_scale / R**j) * pts
    n_max = max(max(i), 1)
    val = np.ones(len(pts))
    for l, n in enumerate(i):
        val = val * hermite_function_values(n_max, y[:, l])[:, n]
    return float(blocked_sum(val))


def transform_grid(p, set_, J):
    """All transforms T_j(f_i, R) for j in J and i in the taper set.

    Batched: per scale, each coordinate's Hermite orders 0..i_max-1 are
    evaluated once by recurrence and recombined across indices, so the cost
    is n * |J| * (2 i_max + |I|) rather than n * |J| * |I| * i_max.
    """
    R = p.half_width
    if not R > 1:
        raise DomainError(f"transform_grid requires window half-width > 1, got {R}")
    J = np.asarray(J, dtype=np.float64)
    if np.any(J <= 0):
        raise DomainError("all scales must be positive")
    idx = np.asarray(set_.indices, dtype=np.intp)
    out = np.zeros((len(J), len(set_.indices)))
    if len(p) == 0:
        return TransformGrid(scales=J, indices=set_.indices, values=out, R=R)
    pts = _canonical_order(p.points)
    n_max = set_.i_max - 1
    for row, j in enumerate(J):
        y = (set_.spatial_scale / R**j) * pts
        prod = hermite_function_values(n_max, y[:, 0])[:, idx[:, 0]]
        for l in range(1, set_.dim):
            prod = prod * hermite_function_values(n_max, y[:, l])[:, idx[:, l]]
        out[row] = blocked_sum(prod, axis=0)
    return TransformGrid(scales=J, indices=set_.indices, values=out, R=R)


def curve_C(p, set_, grid):
    """C(j) on a grid of scales; errors if the squared sum vanishes anywhere."""
    tg = transform_grid(p, set_, grid)
    sq = np.sum(tg.values**2, axis=1)
    if np.any(sq == 0.0):
        bad = float(np.asarray(grid)[int(np.argmax(sq == 0.0))])
        raise ZeroTransformSum(f"all transforms vanished at scale j={bad}")
    values = np.log(sq) / np.log(p.half_width)
    return CurveC(
        grid=np.asarray(grid, dtype=np.float64),
        values=values,
        R=p.half_width,
        taper_set_id=taper_set_id(set_),
    )


def scattering_intensity(p, k, normalization_exponent=1):
    """|sum_x e^{-i k.x}|^2 normalized by window volume to the given power.

    Diagnostics only; exponent 1 is the standard convention, 2 matches a
    literal reading of the source formula. Not used by the estimator.
    """
    k = np.asarray(k, dtype=np.float64)
    if np.all(k == 0):
        raise ZeroFrequency("scattering intensity undefined at k = 0")
    if normalization_exponent not in (1, 2):
        raise DomainError("normalization exponent must be 1 or 2")
    phases = p.points @ k
    re = blocked_sum(np.cos(phases))
    im = blocked_sum(np.sin(phases))
    vol = p.window.volume(p.dim)
    return float((re * re + im * im) / vol**normalization_exponent)
