"""Lévy concentration of weighted sums: exact atom laws, Monte Carlo, and bound evaluators.

For weights ``w`` and i.i.d. signs ``b_i`` from a discrete law,
``weighted_sum_atoms`` returns the exact law of ``sum_i w_i b_i`` as sorted
atoms; ``levy_exact`` then evaluates ``sup_x P[|S - x| <= eps]`` with a
sliding window.  Windows are closed throughout.
"""

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import CapacityError, NumericError, ParameterError, PreconditionError
from .rng import make_rng

__all__ = [
    "ATOM_RTOL",
    "AtomDistribution",
    "ConcentrationEstimate",
    "merge_atoms",
    "weighted_sum_atoms",
    "levy_exact",
    "levy_left",
    "largest_half_gap_below",
    "descending_sup",
    "levy_ratio_sup",
    "centered_mass",
    "centered_ratio_sup",
    "levy_affine_majorant",
    "levy_mc",
    "hoeffding_radius",
    "tensorization_bound",
    "rogozin_bound",
    "mrlcd_anticonc_bound",
    "esseen_levy_bound",
]

# Atoms closer than ATOM_RTOL * max(1, |value|) are one atom; the same slack
# decides whether an atom sits on a closed window's edge.
ATOM_RTOL = 1e-9

ATOM_CAPS = {"rademacher": 26, "signed_bernoulli": 16}


def _tol(x):
    return ATOM_RTOL * np.maximum(1.0, np.abs(x))


@dataclass(frozen=True)
class AtomDistribution:
    values: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        p = np.asarray(self.probs, dtype=np.float64)
        if v.ndim != 1 or v.shape != p.shape or v.size == 0:
            raise ParameterError("values and probs must be equal-length non-empty 1-D arrays")
        if np.any(p <= 0):
            raise ParameterError("atom probabilities must be positive")
        if v.size > 1 and np.any(np.diff(v) <= 0):
            raise ParameterError("atom values must be strictly increasing")
        if abs(math.fsum(p) - 1.0) > 1e-12:
            raise ParameterError(f"probabilities sum to {math.fsum(p)!r}, not 1")
        v.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "probs", p)

    def __len__(self):
        return self.values.size

    @property
    def diameter(self):
        return float(self.values[-1] - self.values[0])

    def prob_at(self, x):
        """Mass of the atom at ``x`` (0 if there is none)."""
        k = np.searchsorted(self.values, x - _tol(x))
        if k < self.values.size and abs(self.values[k] - x) <= _tol(x):
            return float(self.probs[k])
        return 0.0

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["value", "prob"])
        for a, b in zip(self.values, self.probs):
            w.writerow([repr(float(a)), repr(float(b))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        rows = list(csv.reader(io.StringIO(text)))
        body = [r for r in rows[1:] if r]
        return cls(np.array([float(r[0]) for r in body]), np.array([float(r[1]) for r in body]))


@dataclass(frozen=True)
class ConcentrationEstimate:
    value: float
    method: str
    trials: int = None
    hoeffding_radius: float = None

    def __float__(self):
        return float(self.value)


def merge_atoms(values, probs):
    """Sort raw outcomes and fuse values within ``ATOM_RTOL`` of their neighbour.

    A fused atom sits at the probability-weighted mean of its members.
    """
    values = np.asarray(values, dtype=np.float64).ravel()
    probs = np.asarray(probs, dtype=np.float64).ravel()
    keep = probs > 0
    values, probs = values[keep], probs[keep]
    # fused groups use a weighted mean, so the order inside a group is irrelevant
    order = np.argsort(values)
    v = values[order]
    p = probs[order]
    if v.size == 0:
        raise ParameterError("no atoms with positive probability")
    new = np.empty(v.size, dtype=bool)
    new[0] = True
    new[1:] = np.diff(v) > _tol(v[:-1])
    starts = np.flatnonzero(new)
    mass = np.add.reduceat(p, starts)
    centre = np.add.reduceat(v * p, starts) / mass
    mass = mass / math.fsum(mass)
    return AtomDistribution(centre, mass)


def _law_atoms(law):
    atoms = law.atoms()
    if atoms is None:
        raise ParameterError(f"law {law.kind!r} has no finite atom set; use levy_mc")
    return atoms


def _enumerate(weights, a, pa):
    vals = np.zeros(1)
    pr = np.ones(1)
    for w in weights:
        vals = (vals[None, :] + w * a[:, None]).ravel()
        pr = (pr[None, :] * pa[:, None]).ravel()
        d = merge_atoms(vals, pr)
        vals, pr = np.array(d.values), np.array(d.probs)
    return vals, pr


def weighted_sum_atoms(weights, law, cap=None):
    """Exact law of ``sum_i w_i b_i`` for i.i.d. Rademacher or SignedBernoulli ``b_i``.

    Meet in the middle: each half of the weights is enumerated (merging as it
    goes), then the two half-laws are convolved by an outer sum and merged.
    Dimension caps are 26 (Rademacher) and 16 (SignedBernoulli) unless
    ``cap`` overrides them.
    """
    w = np.asarray(weights, dtype=np.float64).ravel()
    if not np.all(np.isfinite(w)):
        raise ParameterError("weights must be finite")
    a, pa = _law_atoms(law)
    limit = ATOM_CAPS[law.kind] if cap is None else cap
    if w.size > limit:
        raise CapacityError(
            f"dimension {w.size} exceeds the exact-enumeration cap {limit} for {law.kind}; use levy_mc"
        )
    if w.size == 0:
        return AtomDistribution(np.zeros(1), np.ones(1))
    half = w.size // 2
    lv, lp = _enumerate(w[:half], a, pa)
    rv, rp = _enumerate(w[half:], a, pa)
    vals = (lv[:, None] + rv[None, :]).ravel()
    del lv
    pr = (lp[:, None] * rp[None, :]).ravel()
    return merge_atoms(vals, pr)


def levy_exact(d, eps):
    """``sup_x P[|S - x| <= eps]`` for an atom law.

    The supremum is attained by a window whose left edge is an atom, so a
    two-pointer sweep over the sorted atoms is exact.
    """
    if eps < 0:
        raise ParameterError(f"eps must be >= 0, got {eps}")
    v = d.values
    cum = np.concatenate([[0.0], np.cumsum(d.probs)])
    edge = v + 2.0 * eps
    j = np.searchsorted(v, edge + _tol(edge), side="right")
    mass = cum[j] - cum[:-1]
    return ConcentrationEstimate(float(min(1.0, mass.max())), "exact")


def levy_left(d, t):
    """Left limit ``lim_{s -> t-} L(S, s)``: windows of span strictly below ``2t``."""
    v = d.values
    cum = np.concatenate([[0.0], np.cumsum(d.probs)])
    edge = v + 2.0 * t
    j = np.searchsorted(v, edge - _tol(edge), side="left")
    mass = cum[j] - cum[:-1]
    return float(min(1.0, mass.max()))


def largest_half_gap_below(d, t):
    """Largest ``(v_j - v_i)/2`` strictly below ``t``; these are where ``L(S, .)`` can jump."""
    v = d.values
    edge = v + 2.0 * t
    j = np.searchsorted(v, edge - _tol(edge), side="left") - 1
    return float(np.max(v[j] - v) / 2.0)


def descending_sup(d, slope, t_top):
    """``sup{t in (0, t_top): L(S, t) > slope * t}`` by a monotone fixed-point descent.

    Start at ``t_top`` and iterate ``t <- L(S, t-)/slope``.  No point of
    ``[t_next, t)`` can satisfy the inequality because ``L`` is nondecreasing,
    so the sequence only decreases, and it stops exactly at the supremum,
    where the left limit equals ``slope * t``.  Returns 0.0 when the set is empty.
    """
    t = float(t_top)
    for _ in range(100000):
        if t <= 0.0:
            return 0.0
        nxt = min(t, levy_left(d, t) / slope)
        if nxt >= t * (1.0 - 1e-15):
            return t
        t = nxt
    raise NumericError("threshold descent did not terminate")


def levy_ratio_sup(d, t_min):
    """``sup_{t >= t_min} L(S, t) / t``, exact.

    Beyond ``t_min`` the ratio peaks where a window ``[v_i, v_j]`` is
    exactly filled, giving ``2 (F_j - G_i) / (v_j - v_i)`` with ``G_i`` the
    mass below ``v_i`` and ``F_j`` the mass up to ``v_j``.  For each ``j``
    the best ``i`` is the tangent point from ``(v_j, F_j)`` to the lower
    hull of the points ``(v_i, G_i)`` with ``v_j - v_i >= 2 t_min``; that
    prefix only grows with ``j``, so the hull is built incrementally and
    the whole search is ``O(A log A)``.
    """
    if not t_min > 0:
        raise ParameterError("t_min must be positive")
    best = levy_exact(d, t_min).value / t_min
    v = d.values.tolist()
    cum = np.concatenate([[0.0], np.cumsum(d.probs)]).tolist()
    stop = np.searchsorted(d.values, d.values - 2.0 * t_min, side="right").tolist()
    hx, hy = [], []
    added = 0
    for j, p in enumerate(stop):
        while added < p:
            x, y = v[added], cum[added]
            while len(hx) >= 2 and (hy[-1] - hy[-2]) * (x - hx[-2]) >= (y - hy[-2]) * (hx[-1] - hx[-2]):
                hx.pop()
                hy.pop()
            hx.append(x)
            hy.append(y)
            added += 1
        if not hx:
            continue
        qx, qy = v[j], cum[j + 1]
        # first hull edge whose extension passes on or above the query point
        lo, hi = 0, len(hx) - 1
        while lo < hi:
            k = (lo + hi) // 2
            if (hy[k + 1] - hy[k]) * (qx - hx[k]) >= (qy - hy[k]) * (hx[k + 1] - hx[k]):
                hi = k
            else:
                lo = k + 1
        r = 2.0 * (qy - hy[lo]) / (qx - hx[lo])
        if r > best:
            best = r
    return best


def centered_mass(d, psi, t):
    """``P[|S - psi| <= t]``."""
    dist = np.abs(d.values - psi)
    return float(min(1.0, d.probs[dist <= t + _tol(t)].sum()))


def centered_ratio_sup(d, psi, t_min):
    """``sup_{t >= t_min} P[|S - psi| <= t] / t``; the step function jumps only at ``|v - psi|``."""
    dist = np.abs(d.values - psi)
    order = np.argsort(dist, kind="stable")
    ds = dist[order]
    cum = np.cumsum(d.probs[order])
    best = centered_mass(d, psi, t_min) / t_min
    above = ds > t_min
    if np.any(above):
        # at a tie of distances the cumulative mass must include every tied atom
        last = np.searchsorted(ds, ds[above] + _tol(ds[above]), side="right") - 1
        best = max(best, float(np.max(np.minimum(cum[last], 1.0) / ds[above])))
    return best


def levy_affine_majorant(d, eps):
    """A line ``(a, b)`` with ``a s + b >= L(S, s)`` for every ``s >= 0``, tight to the concave majorant at ``eps``.

    ``L(S, .)`` is a nondecreasing step function whose jumps sit at half-gaps
    between atoms; its least concave majorant is the upper hull of the
    points ``(h, L(S, h))``, flat after the last jump.  The returned line
    extends the hull edge over ``eps``.
    """
    v = d.values
    gaps = np.unique(((v[None, :] - v[:, None])[np.triu_indices(v.size, 1)]) / 2.0)
    hs = np.concatenate([[0.0], gaps])
    gs = np.array([levy_exact(d, h).value for h in hs])
    if eps >= hs[-1]:
        return 0.0, 1.0
    hull = []
    for pt in zip(hs, gs):
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point when it lies on or below the chord
            if (y2 - y1) * (pt[0] - x1) <= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        if x1 <= eps < x2:
            a = (y2 - y1) / (x2 - x1)
            return float(a), float(y1 - a * x1)
    return 0.0, 1.0


def hoeffding_radius(trials, confidence=0.99):
    """Two-sided Hoeffding half-width for a Bernoulli mean."""
    return math.sqrt(math.log(2.0 / (1.0 - confidence)) / (2.0 * trials))


def levy_mc(weights, law, eps, trials, seed, chunk=200000):
    """Monte Carlo Lévy concentration: exact supremum over the empirical measure.

    Windows anchored at every sampled value cover all candidates, so the
    returned value is the empirical supremum; its expectation sits slightly
    above the true concentration.
    """
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    if eps < 0:
        raise ParameterError(f"eps must be >= 0, got {eps}")
    w = np.asarray(weights, dtype=np.float64).ravel()
    rng = make_rng(seed)
    s = np.empty(trials)
    for start in range(0, trials, chunk):
        m = min(chunk, trials - start)
        s[start : start + m] = law.sample(rng, (m, w.size)) @ w
    s.sort()
    edge = s + 2.0 * eps
    j = np.searchsorted(s, edge + _tol(edge), side="right")
    best = int(np.max(j - np.arange(trials)))
    return ConcentrationEstimate(best / trials, "monte-carlo", trials, hoeffding_radius(trials))


def tensorization_bound(coeffs, eps):
    """``e^N prod_k (a_k eps + b_k)`` for ``coeffs = [(a_1, b_1), ...]``."""
    if eps < 0:
        raise ParameterError("eps must be >= 0")
    coeffs = list(coeffs)
    out = math.e ** len(coeffs)
    for a, b in coeffs:
        if a < 0 or b < 0:
            raise ParameterError("a_k and b_k must be nonnegative")
        out *= a * eps + b
    return out


def rogozin_bound(components, r, C=1.0):
    """``C r (sum_i r_i^2 (1 - l_i) / l_i^2)^{-1/2}`` for ``components = [(r_i, l_i), ...]``.

    ``l_i`` is the concentration of the i-th summand at width ``r_i``.
    Returns ``inf`` when every ``l_i`` is 1.
    """
    components = list(components)
    if not components:
        raise ParameterError("need at least one component")
    rmax = max(ri for ri, _ in components)
    if r < rmax:
        raise PreconditionError(f"r = {r} is below max r_i = {rmax}")
    total = 0.0
    for ri, li in components:
        if not ri > 0 or not 0 < li <= 1:
            raise ParameterError(f"bad component (r_i={ri}, levy_i={li})")
        total += ri * ri * (1.0 - li) / (li * li)
    if total == 0.0:
        return math.inf
    return C * r / math.sqrt(total)


def mrlcd_anticonc_bound(eps, J_size, n, lam, L, mrlcd, C=1.0, clamp=False):
    """``C L (eps / sqrt(|J|/n) + sqrt(lam n / |J|) / mrlcd)``."""
    if not (eps >= 0 and J_size > 0 and n > 0 and lam > 0 and L > 0 and mrlcd > 0):
        raise ParameterError("all arguments must be positive (eps may be 0)")
    if J_size > n:
        raise ParameterError(f"|J| = {J_size} exceeds n = {n}")
    frac = J_size / n
    val = C * L * (eps / math.sqrt(frac) + math.sqrt(lam * n / J_size) / mrlcd)
    return min(1.0, max(0.0, val)) if clamp else val


def _kinks(law, w, radius):
    """Points in (0, 2] where ``|phi(theta w / radius)|`` has a corner."""
    if w == 0:
        return []
    if law.kind in ("rademacher", "perturbed_rademacher"):
        period, offset = math.pi, math.pi / 2
    elif law.kind == "uniform":
        period, offset = 2 * math.pi / (law.b - law.a), 2 * math.pi / (law.b - law.a)
    else:
        return []
    scale = radius / abs(w)
    pts = []
    x = offset
    while x * scale < 2.0 and len(pts) < 5000:
        pts.append(x * scale)
        x += period
    return pts


def esseen_levy_bound(weights, law, radius, C=1.0):
    """Esseen-type bound ``C * int_{-2}^{2} prod_i |phi(theta w_i / radius)| dtheta``.

    Dominates ``L(sum w_i b_i, radius)`` up to the constant ``C``.  The
    integrand is even, so twice the integral over [0, 2] is used, split at
    the corners of ``|phi|``.
    """
    if not radius > 0:
        raise ParameterError("radius must be positive")
    w = np.asarray(weights, dtype=np.float64).ravel()
    nz = w[w != 0]
    if nz.size == 0:
        return 4.0 * C

    def f(theta):
        return float(np.prod(law.char_abs(theta * nz / radius)))

    pts = sorted({p for wi in nz for p in _kinks(law, wi, radius)})
    edges = [0.0] + [p for p in pts if 0.0 < p < 2.0] + [2.0]
    if len(edges) > 20000:
        edges = [0.0, 2.0]
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        if b - a <= 0:
            continue
        val, err, *rest = integrate.quad(f, a, b, epsrel=1e-8, epsabs=1e-13, limit=500, full_output=1)
        if len(rest) >= 2 and rest[0] and err > 1e-6 * max(abs(val), 1e-12):
            raise NumericError(f"quadrature did not converge on [{a}, {b}]: {rest[1]}")
        total += val
    return 2.0 * C * total
