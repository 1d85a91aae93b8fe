"""Arithmetic structure of unit vectors: LCD brackets, median-of-blocks LCD, thresholds.

LCD values are infima of open sets cut out by a strict inequality between
two continuous functions, so the solver returns a certified bracket
``[lo, hi]`` rather than a point: the condition holds at ``hi`` and every
grid cell below ``lo`` is certified free of solutions.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .anticonc import (
    AtomDistribution,
    descending_sup,
    largest_half_gap_below,
    levy_exact,
    levy_left,
    weighted_sum_atoms,
)
from .ensembles import EntryLaw
from .errors import ParameterError
from .geometry import as_unit_vector, spread_assignment

__all__ = [
    "LcdParams",
    "LcdBracket",
    "MrlcdReport",
    "ThresholdReport",
    "MedianThresholdReport",
    "AdmissibilityReport",
    "lattice_distance",
    "lcd_gap",
    "lcd",
    "default_theta_max",
    "mrlcd",
    "level_membership",
    "level_set_member",
    "threshold",
    "threshold_from_atoms",
    "median_threshold",
    "is_admissible",
]

FOUND = "found"
EXCEEDED = "exceeded-horizon"


def default_theta_max(dim, L):
    """Search horizon ``10 exp(dim / (12 L^2))``.

    A generic unit vector in dimension ``dim`` has ``dist(theta x, Z^dim)``
    near ``sqrt(dim/12)``, which the right-hand side reaches at about
    ``L exp(dim/(12 L^2))``.
    """
    return 10.0 * math.exp(dim / (12.0 * L * L))


@dataclass(frozen=True)
class LcdParams:
    """``theta_max=None`` means :func:`default_theta_max` for the input's dimension."""

    L: float = 1.0
    theta_max: float = None
    grid_step: float = 1e-2
    bisect_tol: float = 1e-7

    def __post_init__(self):
        if not self.L >= 1.0:
            raise ParameterError(f"L must be >= 1, got {self.L}")
        if not 0.0 < self.bisect_tol < self.grid_step:
            raise ParameterError("need 0 < bisect_tol < grid_step")
        if self.theta_max is not None and not self.grid_step < self.theta_max:
            raise ParameterError("need grid_step < theta_max")

    def horizon(self, dim):
        return self.theta_max if self.theta_max is not None else default_theta_max(dim, self.L)

    def to_dict(self):
        return {
            "L": self.L,
            "theta_max": self.theta_max,
            "grid_step": self.grid_step,
            "bisect_tol": self.bisect_tol,
        }


@dataclass(frozen=True)
class LcdBracket:
    lo: float
    hi: float
    status: str = FOUND

    def __post_init__(self):
        if self.status not in (FOUND, EXCEEDED):
            raise ParameterError(f"unknown status {self.status!r}")
        if not self.lo <= self.hi:
            raise ParameterError(f"bracket lo={self.lo} exceeds hi={self.hi}")

    @property
    def found(self):
        return self.status == FOUND

    def sort_key(self):
        return (0 if self.found else 1, self.lo)

    def to_dict(self):
        return {"lo": self.lo, "hi": None if math.isinf(self.hi) else self.hi, "status": self.status}


def lattice_distance(x, theta):
    """``dist(theta x, Z^N)``; ``theta`` may be a 1-D array, giving one distance per entry."""
    x = np.asarray(x, dtype=np.float64)
    th = np.asarray(theta, dtype=np.float64)
    if np.any(th < 0):
        raise ParameterError("theta must be >= 0")
    y = np.multiply.outer(th, x)
    r = y - np.rint(y)
    return np.sqrt(np.einsum("...i,...i->...", r, r))


def _rhs(theta, L):
    s = np.log(np.maximum(np.asarray(theta, dtype=np.float64) / L, 1.0))
    return L * np.sqrt(s)


def lcd_gap(x, theta, L):
    """``dist(theta x, Z^N) - L sqrt(log_+(theta/L))``; negative exactly on the LCD set."""
    return lattice_distance(x, theta) - _rhs(theta, L)


class _Scanner:
    """Cell test and left-first refinement for the LCD gap function.

    On a cell ``[a, b]`` the distance term is ``|x|``-Lipschitz, so it is at
    least ``(d(a) + d(b) - |x| (b - a)) / 2`` throughout, while the
    right-hand side is increasing and so at most its value at ``b``.  A cell
    whose resulting lower bound is nonnegative holds no solution.
    """

    def __init__(self, x, L, tol):
        self.x = x
        self.L = L
        self.tol = tol
        self.lip = float(np.linalg.norm(x))

    def d(self, th):
        return lattice_distance(self.x, th)

    def gap(self, th):
        return float(lcd_gap(self.x, th, self.L))

    def slack(self, b):
        # floating error of the distance evaluation
        return 1e-12 * (1.0 + b)

    def lower_bound(self, a, b, da, db):
        return (da + db - self.lip * (b - a)) / 2.0 - _rhs(b, self.L)

    def refine(self, a, b):
        """First solution bracket inside ``[a, b]``, or None if the cell is clear."""
        stack = [(a, b, float(self.d(a)), float(self.d(b)))]
        while stack:
            a, b, da, db = stack.pop()
            if self.lower_bound(a, b, da, db) >= self.slack(b):
                continue
            w = b - a
            if w <= self.tol:
                if db - float(_rhs(b, self.L)) < 0:
                    return a, b
                m = 0.5 * (a + b)
                if w <= 4e-16 * b or m <= a or m >= b:
                    # float floor: only a tangency can sit here, and the set is strict
                    continue
            m = 0.5 * (a + b)
            dm = float(self.d(m))
            stack.append((m, b, dm, db))
            stack.append((a, m, da, dm))
        return None


def lcd(x, params=None, chunk=4096):
    """Certified bracket for ``D_L(x)``.

    Scans ``[start, theta_max]`` in cells of width ``grid_step``, where
    ``start = max(L, 1/(2 |x|_inf))``: below ``L`` the right-hand side is 0,
    and below ``1/(2|x|_inf)`` the distance equals ``theta`` which beats
    ``L sqrt(log(theta/L))`` everywhere.  Suspicious cells are bisected
    left-first down to ``bisect_tol``.
    """
    params = params or LcdParams()
    x = as_unit_vector(x)
    L = params.L
    theta_max = params.horizon(x.size)
    start = max(L, 1.0 / (2.0 * float(np.max(np.abs(x)))))
    if start >= theta_max:
        return LcdBracket(theta_max, math.inf, EXCEEDED)
    sc = _Scanner(x, L, params.bisect_tol)
    n_cells = int(math.ceil((theta_max - start) / params.grid_step))
    k0 = 0
    while k0 < n_cells:
        k1 = min(n_cells, k0 + chunk)
        th = start + params.grid_step * np.arange(k0, k1 + 1)
        th[-1] = min(th[-1], theta_max)
        d = sc.d(th)
        lb = (d[:-1] + d[1:] - sc.lip * np.diff(th)) / 2.0 - _rhs(th[1:], L)
        bad = np.flatnonzero(lb < 1e-12 * (1.0 + th[1:]))
        for k in bad:
            hit = sc.refine(float(th[k]), float(th[k + 1]))
            if hit is not None:
                return LcdBracket(hit[0], hit[1], FOUND)
        k0 = k1
    return LcdBracket(theta_max, math.inf, EXCEEDED)


def _upper_median(keys):
    """Indices sorted by key, and the position of the upper median."""
    order = sorted(range(len(keys)), key=lambda j: (keys[j], j))
    return order, len(keys) // 2


@dataclass(frozen=True)
class MrlcdReport:
    median_value: LcdBracket
    per_block: tuple
    upper_half: tuple
    lower_half: tuple
    median_index: int
    median_block: tuple
    lam: float = None
    params: dict = field(default=None, compare=False)

    @property
    def n_blocks(self):
        return len(self.per_block)

    def to_dict(self):
        return {
            "median": self.median_value.to_dict(),
            "median_index": self.median_index,
            "median_block": list(self.median_block),
            "upper_half": list(self.upper_half),
            "lower_half": list(self.lower_half),
            "lambda": self.lam,
            "params": self.params,
            "per_block": [{"block": list(b), "lcd": br.to_dict()} for b, br in self.per_block],
        }


def _halves(values, keys, mid_pos, order, close):
    med = order[mid_pos]
    upper = set(order[mid_pos:])
    lower = set(order[: mid_pos + 1])
    for j in range(len(values)):
        if close(values[j], values[med]):
            upper.add(j)
            lower.add(j)
    return med, tuple(sorted(upper)), tuple(sorted(lower))


def mrlcd(v, params, sphere, lam):
    """Upper median of the LCDs of the normalized spread blocks of ``v``.

    Blocks are ordered by bracket ``lo`` (exceeded-horizon brackets above
    every found one, ties by block index) and the median is the element at
    0-based position ``m // 2``, the smallest value of the upper half.
    Blocks whose brackets agree with the median within ``bisect_tol`` join
    both halves.  Block indices are 0-based.
    """
    v = as_unit_vector(v)
    assign = spread_assignment(v, sphere, lam)
    per_block = []
    for blk in assign.blocks:
        idx = np.array(blk)
        sub = v[idx]
        per_block.append((blk, lcd(sub / np.linalg.norm(sub), params)))
    brackets = [br for _, br in per_block]
    order, mid = _upper_median([br.sort_key() for br in brackets])
    tol = params.bisect_tol

    def close(a, b):
        if a.found != b.found:
            return False
        return (not a.found) or abs(a.lo - b.lo) <= tol

    med, upper, lower = _halves(brackets, None, mid, order, close)
    return MrlcdReport(
        median_value=brackets[med],
        per_block=tuple(per_block),
        upper_half=upper,
        lower_half=lower,
        median_index=med,
        median_block=per_block[med][0],
        lam=float(lam),
        params=params.to_dict(),
    )


def level_membership(bracket, D):
    """Whether the value bracketed by ``bracket`` lies in ``[D, 2D]``.

    True or False when the bracket decides it, None when it straddles an end.
    """
    if not D >= 1:
        raise ParameterError(f"D must be >= 1, got {D}")
    if bracket.hi < D or bracket.lo > 2 * D:
        return False
    if bracket.found and bracket.lo >= D and bracket.hi <= 2 * D:
        return True
    return None


def level_set_member(v, D, params, sphere, lam):
    return level_membership(mrlcd(v, params, sphere, lam).median_value, D)


@dataclass(frozen=True)
class ThresholdReport:
    """``certificate`` is ``(t_star, levy_at_t_star)`` with ``levy > L t_star``, or None when value is 0."""

    value: float
    p: float
    L: float
    certificate: tuple = None

    def __float__(self):
        return float(self.value)

    def to_dict(self):
        cert = None
        if self.certificate is not None:
            cert = {"t_star": self.certificate[0], "levy_at_t_star": self.certificate[1]}
        return {"value": self.value, "p": self.p, "L": self.L, "certificate": cert}


def threshold_from_atoms(d: AtomDistribution, L, tol=1e-12, p=None):
    """``sup{t in (0,1): L(S, t) > L t}`` for the atom law ``d`` of ``S``.

    The descent of :func:`descending_sup` started at ``min(1, 1/L)`` lands
    exactly on the supremum, since above ``1/L`` the inequality cannot hold.
    The witness is taken just inside the last constant piece of ``L(S, .)``.
    """
    if not L >= 1:
        raise ParameterError(f"L must be >= 1, got {L}")
    T = descending_sup(d, L, min(1.0, 1.0 / L))
    if T <= 0.0:
        return ThresholdReport(0.0, p, float(L), None)
    b = largest_half_gap_below(d, T)
    t_star = T - min(tol / 2.0, (T - b) / 2.0)
    return ThresholdReport(float(T), p, float(L), (float(t_star), levy_exact(d, t_star).value))


def threshold(x, p, L, tol=1e-12):
    """Threshold of a unit vector under i.i.d. ``Ber(p) - Ber'(p)`` weights, from its exact atom law."""
    x = as_unit_vector(x)
    d = weighted_sum_atoms(x, EntryLaw.signed_bernoulli(p))
    return threshold_from_atoms(d, L, tol, p=float(p))


@dataclass(frozen=True)
class MedianThresholdReport:
    value: float
    per_block: tuple
    upper_half: tuple
    lower_half: tuple
    median_index: int
    median_block: tuple
    p: float = None
    L: float = None

    def __float__(self):
        return float(self.value)

    def to_dict(self):
        return {
            "value": self.value,
            "p": self.p,
            "L": self.L,
            "median_index": self.median_index,
            "median_block": list(self.median_block),
            "upper_half": list(self.upper_half),
            "lower_half": list(self.lower_half),
            "per_block": [{"block": list(b), "threshold": r.to_dict()} for b, r in self.per_block],
        }


def median_threshold(v, p, L, sphere, lam, tol=1e-12):
    """Upper median of per-block thresholds, with the same ordering rules as :func:`mrlcd`."""
    v = as_unit_vector(v)
    assign = spread_assignment(v, sphere, lam)
    per_block = []
    for blk in assign.blocks:
        sub = v[np.array(blk)]
        per_block.append((blk, threshold(sub / np.linalg.norm(sub), p, L, tol)))
    vals = [r.value for _, r in per_block]
    order, mid = _upper_median(vals)
    med, upper, lower = _halves(vals, None, mid, order, lambda a, b: abs(a - b) <= tol)
    return MedianThresholdReport(
        value=vals[med],
        per_block=tuple(per_block),
        upper_half=upper,
        lower_half=lower,
        median_index=med,
        median_block=per_block[med][0],
        p=float(p),
        L=float(L),
    )


@dataclass(frozen=True)
class AdmissibilityReport:
    """Truthy iff admissible; otherwise ``clause`` (1-4) and 1-based ``index`` locate the first failure."""

    admissible: bool
    clause: int = None
    index: int = None
    reason: str = ""

    def __bool__(self):
        return self.admissible


def _runs(sorted_vals):
    """Maximal runs of consecutive integers."""
    runs = []
    for a in sorted_vals:
        if runs and a == runs[-1][1] + 1:
            runs[-1][1] = a
        else:
            runs.append([a, a])
    return runs


def is_admissible(sets, N, n, K, delta):
    """Check that ``A_1 x ... x A_n`` is ``(N, n, K, delta)``-admissible.

    Clauses, in order: (1) origin symmetry and ``A_i`` inside ``(-nN, nN)``;
    (2) an integer interval of size at least ``2N+1`` for ``i > delta n``;
    (3) two integer intervals of total size at least ``2N`` avoiding
    ``[-N, N]`` for ``i <= delta n``; (4) ``prod |A_i| <= (K N)^n``,
    compared exactly.
    """
    sets = [sorted({int(a) for a in s}) for s in sets]
    if len(sets) != n:
        raise ParameterError(f"expected n = {n} sets, got {len(sets)}")
    if N < 1 or K < 1 or not 0 <= delta <= 1:
        raise ParameterError("need N >= 1, K >= 1, 0 <= delta <= 1")
    for i, s in enumerate(sets, 1):
        ss = set(s)
        if any(-a not in ss for a in s):
            return AdmissibilityReport(False, 1, i, "not origin-symmetric")
        if s and (s[0] <= -n * N or s[-1] >= n * N):
            return AdmissibilityReport(False, 1, i, f"element outside (-{n * N}, {n * N})")
    cut = delta * n
    for i, s in enumerate(sets, 1):
        runs = _runs(s)
        if i > cut:
            if len(runs) != 1 or len(s) < 2 * N + 1:
                return AdmissibilityReport(False, 2, i, "not an integer interval of size >= 2N+1")
        else:
            if len(runs) != 2 or len(s) < 2 * N:
                return AdmissibilityReport(False, 3, i, "not two integer intervals of total size >= 2N")
            if any(-N <= a <= N for a in s):
                return AdmissibilityReport(False, 3, i, "meets [-N, N]")
    size = math.prod(len(s) for s in sets)
    if Fraction(size) > (Fraction(K) * N) ** n:
        return AdmissibilityReport(False, 4, None, "product size exceeds (KN)^n")
    return AdmissibilityReport(True)
