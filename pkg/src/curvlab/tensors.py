"""Dense tensor values at a point, with declared index variance and symmetries.

Components are plain float64 ndarrays of shape (n,) * rank.  Symmetries are
declared, then validated on construction; they are never silently enforced,
so a violated declaration surfaces immediately instead of being averaged away.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SYMMETRY_TOL = 1e-12

# ("sym", i, j) / ("antisym", i, j): behaviour under swapping axes i and j.
# ("pair", i, j, k, l): invariance under exchanging the blocks (i,j) <-> (k,l).
Symmetry = tuple


def symmetry_residual(components: np.ndarray, symmetry: Symmetry) -> float:
    kind = symmetry[0]
    if kind == "sym":
        _, i, j = symmetry
        return float(np.max(np.abs(components - np.swapaxes(components, i, j))))
    if kind == "antisym":
        _, i, j = symmetry
        return float(np.max(np.abs(components + np.swapaxes(components, i, j))))
    if kind == "pair":
        _, i, j, k, l = symmetry
        perm = list(range(components.ndim))
        perm[i], perm[j], perm[k], perm[l] = perm[k], perm[l], perm[i], perm[j]
        return float(np.max(np.abs(components - np.transpose(components, perm))))
    raise ValueError(f"unknown symmetry kind {kind!r}")


@dataclass(frozen=True)
class TensorValue:
    """Components of a tensor at a single point.

    variance holds one flag per index: 'l' (lower/covariant) or 'u'
    (upper/contravariant).  Rank-0 values are stored as 0-d arrays.
    """

    components: np.ndarray
    variance: tuple[str, ...]
    symmetries: tuple[Symmetry, ...] = field(default=())

    def __post_init__(self):
        comp = np.asarray(self.components, dtype=float)
        object.__setattr__(self, "components", comp)
        if comp.ndim != len(self.variance):
            raise ValueError(
                f"rank mismatch: {comp.ndim} axes vs variance {self.variance}"
            )
        if any(v not in ("l", "u") for v in self.variance):
            raise ValueError(f"variance flags must be 'l'/'u', got {self.variance}")
        for sym in self.symmetries:
            resid = symmetry_residual(comp, sym)
            if resid > SYMMETRY_TOL:
                raise ValueError(f"declared symmetry {sym} violated by {resid:.3e}")

    @property
    def rank(self) -> int:
        return self.components.ndim

    @property
    def dim(self) -> int:
        return self.components.shape[0] if self.rank else 0

    def __array__(self, dtype=None, copy=None):
        if dtype is None and not copy:
            return self.components
        return np.array(self.components, dtype=dtype)


def scalar_value(x: float) -> TensorValue:
    return TensorValue(np.asarray(float(x)), ())
