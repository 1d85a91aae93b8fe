"""Brute-force reference implementations, written independently of the package code."""

import itertools
import math

import numpy as np
from scipy.optimize import brentq


def direct_atoms(weights, values, probs, tol=1e-9):
    """Enumerate every outcome of sum w_i b_i, then group equal sums (plain Python)."""
    out = []
    for combo in itertools.product(range(len(values)), repeat=len(weights)):
        s = math.fsum(w * values[c] for w, c in zip(weights, combo))
        pr = math.prod(probs[c] for c in combo)
        out.append((s, pr))
    out.sort()
    vals, prs = [], []
    for s, pr in out:
        if vals and abs(s - vals[-1][-1]) <= tol * max(1.0, abs(vals[-1][-1])):
            vals[-1].append(s)
            prs[-1].append(pr)
        else:
            vals.append([s])
            prs.append([pr])
    merged_v = [math.fsum(v * p for v, p in zip(vs, ps)) / math.fsum(ps) for vs, ps in zip(vals, prs)]
    merged_p = [math.fsum(ps) for ps in prs]
    return np.array(merged_v), np.array(merged_p)


RAD = ([-1.0, 1.0], [0.5, 0.5])


def sb(p):
    q = p * (1 - p)
    return [-1.0, 0.0, 1.0], [q, 1 - 2 * q, q]


def levy_brute(values, probs, eps, tol=1e-9):
    """Max over windows [v_i, v_i + 2 eps] by explicit double loop."""
    v = np.asarray(values, dtype=float)
    p = np.asarray(probs, dtype=float)
    a = v[:, None]
    top = a + 2 * eps
    inside = (v[None, :] >= a - tol) & (v[None, :] <= top + tol * np.maximum(1, np.abs(top)))
    return min(float((inside * p[None, :]).sum(axis=1).max()), 1.0)


def levy_strict_window(values, probs, t):
    """Max mass in windows of span strictly below 2t."""
    best = 0.0
    for a in values:
        m = sum(p for v, p in zip(values, probs) if a <= v < a + 2 * t - 1e-12)
        best = max(best, m)
    return best


def threshold_pieces(values, probs, L, diameter=False):
    """sup{t in (0,1): g(t) > L t} by walking the constant pieces of g.

    ``diameter=True`` uses windows of length t instead of radius t.
    """
    values = list(values)
    scale = 1.0 if diameter else 2.0
    cuts = sorted({(b - a) / scale for a in values for b in values if b >= a})
    best = 0.0
    for k, h in enumerate(cuts):
        nxt = cuts[k + 1] if k + 1 < len(cuts) else math.inf
        g = levy_brute(values, probs, h * scale / 2.0)
        top = min(nxt, g / L, 1.0)
        if top > h or (h == 0 and top > 0):
            best = max(best, top)
    return best


def lattice_dist(x, theta):
    y = theta * np.asarray(x)
    return math.sqrt(sum((a - round(a)) ** 2 for a in y))


def lcd_dense(x, L, step=1e-5, upto=None, start=None):
    """First grid point where dist(theta x, Z^N) < L sqrt(log(theta/L)); returns (previous, hit)."""
    x = np.asarray(x, dtype=np.float64)
    th0 = L if start is None else start
    upto = upto if upto is not None else th0 + 50
    chunk = 200000
    k = 0
    prev = th0
    while True:
        th = th0 + step * np.arange(k, k + chunk)
        th = th[th <= upto]
        if th.size == 0:
            return None
        y = np.multiply.outer(th, x)
        d = np.sqrt(((y - np.round(y)) ** 2).sum(axis=1))
        rhs = L * np.sqrt(np.log(np.maximum(th / L, 1.0)))
        hit = np.flatnonzero(d < rhs)
        if hit.size:
            j = hit[0]
            return (th[j - 1] if j > 0 else prev), th[j]
        prev = th[-1]
        k += chunk


def two_equal_root():
    """Root of sqrt(2) - theta = sqrt(log theta) on (1, sqrt 2)."""
    return brentq(lambda t: math.sqrt(2) - t - math.sqrt(math.log(t)), 1 + 1e-12, math.sqrt(2), xtol=1e-15)


def all_ones_block_root(m):
    """Root of sqrt(m) dist(theta / sqrt(m), Z) = sqrt(log theta) just below theta = sqrt(m)."""
    r = math.sqrt(m)
    return brentq(lambda t: r * abs(t / r - 1) - math.sqrt(math.log(t)), r / 2 + 1e-9, r, xtol=1e-15)


def centered_ratio_brute(values, probs, psi, t_min):
    """sup_{t >= t_min} P[|S - psi| <= t] / t over t_min and every |v - psi| beyond it."""
    cands = [t_min] + [abs(v - psi) for v in values if abs(v - psi) > t_min]
    best = 0.0
    for t in cands:
        m = sum(p for v, p in zip(values, probs) if abs(v - psi) <= t + 1e-9 * max(1, t))
        best = max(best, min(m, 1.0) / t)
    return best


def levy_ratio_brute(values, probs, t_min):
    """sup_{t >= t_min} L(S, t)/t over t_min and every half-gap beyond it."""
    cands = [t_min] + sorted({(b - a) / 2 for a in values for b in values if (b - a) / 2 > t_min})
    return max(levy_brute(values, probs, t) / t for t in cands)


def decoupling_loops(G, J, eps):
    """Both sides of the decoupling inequality by explicit loops; returns (lhs, rhs)."""
    G = np.asarray(G, dtype=float)
    n = G.shape[0]
    cube = list(itertools.product((-1, 1), repeat=n))
    q = [float(np.array(x) @ G @ np.array(x)) for x in cube]
    lhs = max(sum(1 for b in q if a <= b <= a + 2 * eps) for a in q) / len(cube)
    Jc = [i for i in range(n) if i not in J]

    def part(x, idx):
        z = np.zeros(n)
        z[idx] = np.array(x)[idx]
        return z

    hits = 0
    for x in cube:
        for xp in cube:
            xc, xpc, xj = part(x, Jc), part(xp, Jc), part(x, list(J))
            v = (xpc @ G @ xpc - xc @ G @ xc) / 2
            if abs((G @ (xc - xpc)) @ xj - v) <= eps:
                hits += 1
    return lhs, hits / len(cube) ** 2


def direct_atoms_np(weights, values, probs, tol=1e-9):
    """Full outcome table by index arithmetic, grouped after one sort."""
    w = np.asarray(weights, dtype=float)
    vals = np.asarray(values, dtype=float)
    prs = np.asarray(probs, dtype=float)
    k, n = vals.size, w.size
    idx = (np.arange(k**n)[:, None] // k ** np.arange(n)[None, :]) % k
    s = (vals[idx] * w).sum(axis=1)
    p = prs[idx].prod(axis=1)
    order = np.argsort(s, kind="stable")
    s, p = s[order], p[order]
    new = np.concatenate([[True], np.diff(s) > tol * np.maximum(1, np.abs(s[:-1]))])
    starts = np.flatnonzero(new)
    mass = np.add.reduceat(p, starts)
    return np.add.reduceat(s * p, starts) / mass, mass


def levy_right_sweep(values, probs, eps, tol=1e-9):
    """Max mass of [v_j - 2 eps, v_j] over right edges v_j."""
    v = np.asarray(values, dtype=float)
    cum = np.concatenate([[0.0], np.cumsum(probs)])
    left = v - 2 * eps
    i = np.searchsorted(v, left - tol * np.maximum(1, np.abs(left)), side="left")
    return min(float((cum[1:] - cum[i]).max()), 1.0)


def ratio_at_most(values, probs, t_min, K, tol=1e-9):
    """Whether L(S, t) <= K t for every t >= t_min.

    A window [v_i, v_j] of half-width h >= t_min breaks it iff
    cum[j+1] - K v_j / 2 > cum[i] - K v_i / 2, so compare against suffix maxima.
    """
    v = np.asarray(values, dtype=float)
    cum = np.concatenate([[0.0], np.cumsum(probs)])
    if levy_right_sweep(v, probs, t_min, tol) > K * t_min:
        return False
    a = cum[1:] - K * v / 2
    suffix = np.maximum.accumulate(a[::-1])[::-1]
    first = np.searchsorted(v, v + 2 * t_min, side="left")
    ok = first < v.size
    b = cum[:-1] - K * v / 2
    slack = 1e-12 * max(1.0, K * float(np.abs(v).max()))
    return bool(np.all(suffix[first[ok]] <= b[ok] + slack))


def threshold_on_grid(values, probs, L, h=1e-4):
    """Largest grid point k h in (0, 1) with L(S, k h) > L k h, or 0.

    Walks down from the top; since L(S, .) is nondecreasing, a miss at t
    with L(S, t) = g rules out every grid point in [g / L, t].
    """
    k = int(round(1 / h)) - 1
    while k >= 1:
        t = k * h
        g = levy_right_sweep(values, probs, t)
        if g > L * t:
            return t
        k = min(k - 1, math.ceil(g / (L * h) * (1 + 1e-12)) - 1)
    return 0.0
