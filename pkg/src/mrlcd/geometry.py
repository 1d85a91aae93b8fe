"""Compressible/incompressible split of the sphere and deterministic spread blocks."""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, StructuralError

__all__ = [
    "SphereParams",
    "SpreadAssignment",
    "as_unit_vector",
    "ceil_n",
    "floor_n",
    "sparse_residual",
    "is_compressible",
    "qualifying_indices",
    "spread_assignment",
]

UNIT_TOL = 1e-12


def ceil_n(x):
    """``ceil`` that ignores float noise such as ``0.1 * 30 = 3.0000000000000004``."""
    r = round(x)
    if abs(x - r) <= 1e-9 * max(1.0, abs(x)):
        return int(r)
    return math.ceil(x)


def floor_n(x):
    r = round(x)
    if abs(x - r) <= 1e-9 * max(1.0, abs(x)):
        return int(r)
    return math.floor(x)


def as_unit_vector(v, tol=UNIT_TOL):
    """Validate that ``v`` is a finite 1-D vector of Euclidean norm 1."""
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise ParameterError(f"expected a non-empty 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ParameterError("vector has non-finite coordinates")
    nrm = float(np.linalg.norm(v))
    if abs(nrm - 1.0) > tol:
        raise ParameterError(f"expected a unit vector, got norm {nrm!r}")
    return v


def default_c_spread(c0, c1):
    """A spread constant that makes the qualifying-index count at least ``2*ceil(c*n)``.

    For incompressible v, coordinates above 1/sqrt(c0 n) number at most c0 n,
    and coordinates below c1/sqrt(2n) carry squared mass at most c1^2/2, so
    the window holds squared mass above c1^2/2 with each term at most
    1/(c0 n): more than c0 c1^2 n / 2 indices.  Taking c = c0 c1^2 / 8
    leaves room for the ceiling once n >= 8 / (c0 c1^2).
    """
    return min(c0 * c1 * c1 / 8.0, 1.0 / 6.0)


@dataclass(frozen=True)
class SphereParams:
    """``c0``/``c1`` define Comp(c0, c1); ``c_spread`` sizes Spread(v).

    The asymptotic theory wants ``c_spread < 1/5``; desk-scale experiments
    need several blocks per vector, so any value in (0, 1) is accepted.
    ``c_spread=None`` picks :func:`default_c_spread`.
    """

    c0: float = 0.5
    c1: float = 0.5
    c_spread: float = None

    def __post_init__(self):
        for name in ("c0", "c1"):
            val = getattr(self, name)
            if not 0.0 < val < 1.0:
                raise ParameterError(f"{name} must lie in (0, 1), got {val}")
        if self.c_spread is None:
            object.__setattr__(self, "c_spread", default_c_spread(self.c0, self.c1))
        if not 0.0 < self.c_spread < 1.0:
            raise ParameterError(f"c_spread must lie in (0, 1), got {self.c_spread}")

    def window(self, n):
        """Magnitude window ``[c1/sqrt(2n), 1/sqrt(c0 n)]`` for spread coordinates."""
        return self.c1 / math.sqrt(2.0 * n), 1.0 / math.sqrt(self.c0 * n)

    def to_dict(self):
        return {"c0": self.c0, "c1": self.c1, "c_spread": self.c_spread}


@dataclass(frozen=True)
class SpreadAssignment:
    spread: tuple
    lam: float
    block_size: int
    blocks: tuple
    covered: tuple

    @property
    def n_blocks(self):
        return len(self.blocks)

    def to_dict(self):
        return {
            "spread": list(self.spread),
            "lambda": self.lam,
            "block_size": self.block_size,
            "blocks": [list(b) for b in self.blocks],
            "covered": list(self.covered),
        }


def sparse_residual(v, k):
    """Distance from ``v`` to the nearest vector with at most ``k`` nonzeros.

    The nearest such vector keeps the ``k`` largest-magnitude coordinates, so
    the distance is the norm of what remains.
    """
    v = np.asarray(v, dtype=np.float64)
    n = v.size
    if not 0 <= k <= n:
        raise ParameterError(f"k must lie in [0, {n}], got {k}")
    sq = np.sort(v * v)
    return float(math.sqrt(math.fsum(sq[: n - k])))


def is_compressible(v, params):
    """True iff ``v`` lies within ``c1`` (inclusive) of a vector supported on at most ``c0 n`` indices."""
    v = as_unit_vector(v)
    return sparse_residual(v, floor_n(params.c0 * v.size)) <= params.c1


def qualifying_indices(v, params):
    """Ascending indices whose magnitude lies in the spread window."""
    v = np.asarray(v, dtype=np.float64)
    lo, hi = params.window(v.size)
    mag = np.abs(v)
    return np.flatnonzero((mag >= lo) & (mag <= hi))


def spread_assignment(v, params, lam):
    """Spread(v), the covered prefix Spread_lambda(v) and its blocks.

    Spread(v) is the first ``ceil(c_spread n)`` qualifying indices in
    ascending order.  Blocks have size ``r = ceil(lam n)`` (equal to
    ``floor(lam n)`` whenever ``lam n`` is an integer) and are consecutive
    runs of Spread(v); the covered prefix is the largest multiple of ``r``
    not exceeding ``|Spread(v)|``.  Only the qualifying index set matters,
    never the coordinate values.
    """
    v = as_unit_vector(v)
    n = v.size
    if not lam > 0.0:
        raise ParameterError(f"lambda must be positive, got {lam}")
    if floor_n(lam * n) < 1:
        raise ParameterError(f"lambda * n must be at least 1, got {lam * n}")
    size = ceil_n(params.c_spread * n)
    r = ceil_n(lam * n)
    if r > size:
        raise ParameterError(
            f"block size ceil(lambda n) = {r} exceeds |Spread(v)| = {size}; lower lambda or raise c_spread"
        )
    if is_compressible(v, params):
        raise StructuralError("vector is compressible for these (c0, c1)")
    q = qualifying_indices(v, params)
    if q.size < size:
        raise StructuralError(
            f"only {q.size} qualifying indices, need {size}; c_spread too large for (c0, c1)"
        )
    spread = tuple(int(k) for k in q[:size])
    covered = spread[: (size // r) * r]
    blocks = tuple(covered[j : j + r] for j in range(0, len(covered), r))
    return SpreadAssignment(spread, float(lam), r, blocks, covered)
