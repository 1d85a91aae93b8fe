"""Seeded experiment runners.

Trial ``t`` draws all of its randomness from ``derive_seed(master_seed, t)``,
so records do not depend on whether trials run serially or in a process
pool; pooled results are returned in trial order.
"""

import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from functools import partial

import numpy as np

from ..anticonc import (
    hoeffding_radius,
    levy_affine_majorant,
    levy_exact,
    weighted_sum_atoms,
)
from ..arithmetic import LcdParams, lcd, median_threshold, mrlcd, threshold
from ..ensembles import (
    EntryLaw,
    distance_to_rowspan,
    quadratic_form_statistic,
    sample_symmetric,
    singular_extremes,
)
from ..errors import CapacityError, PreconditionError, StructuralError
from ..rng import derive_seed, make_rng
from ..rounding import levy_round, randomized_round
from .report import ExperimentReport

__all__ = [
    "run_sval_tail",
    "singularity_exact",
    "run_singularity",
    "bareiss_det",
    "decoupling_sides",
    "run_decoupling_check",
    "replacement_ratio",
    "run_replacement_check",
    "run_tensorization_check",
    "run_structure_scan",
    "run_denominator_check",
    "run_quadratic_smallball",
    "run_lcd",
    "run_mrlcd",
    "run_threshold",
    "run_round",
    "REPLACEMENT_P_MAX",
]

REPLACEMENT_P_MAX = (2.0 - math.sqrt(2.0)) / 4.0
ZERO_RTOL = 1e-10


def _map(fn, items, workers):
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return [fn(i) for i in items]
    chunk = max(1, len(items) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items, chunksize=chunk))


def _prob_row(eps, hits, total):
    p = hits / total if total else float("nan")
    r = hoeffding_radius(total) if total else float("nan")
    return {"eps": eps, "hits": hits, "total": total, "prob": p, "radius": r}


def _fit_power(rows, power=0.125, floor=0.0):
    """Least C with ``prob <= C eps^power + floor`` on every row with eps > 0."""
    vals = [(r["prob"] - floor) / r["eps"] ** power for r in rows if r["eps"] > 0 and r["total"]]
    return max([0.0] + vals)


def _random_unit(rng, n):
    g = rng.standard_normal(n)
    return g / np.linalg.norm(g)


def _finish(name, cfg, summary, records, table, violations, t0):
    return ExperimentReport(name, cfg.to_dict(), summary, records, table, int(violations), time.perf_counter() - t0)


# ---------------------------------------------------------------- smallest singular value tail


def _sval_trial(t, n, law, master):
    s = derive_seed(master, t)
    r = singular_extremes(sample_symmetric(n, law, s))
    return {"trial": t, "s_min": r.s_min, "s_max": r.s_max}


def run_sval_tail(cfg):
    """Empirical ``P[s_n(A) <= eps / sqrt(n)]`` over the eps grid.

    At ``eps = 0`` a matrix counts as singular when ``s_min <= 1e-10 s_max``.
    The fitted constant is the least C with ``prob <= C eps^(1/8) + floor``
    (``floor`` from ``extra['tail_floor']``, default 0); it is reported,
    never asserted.  Violations count decreases along the grid.
    """
    t0 = time.perf_counter()
    if cfg.n > 512 or cfg.trials > 10**6:
        raise CapacityError("sval-tail caps: n <= 512, trials <= 1e6")
    recs = _map(partial(_sval_trial, n=cfg.n, law=cfg.law, master=cfg.master_seed), range(cfg.trials), cfg.workers)
    smin = np.array([r["s_min"] for r in recs])
    smax = np.array([r["s_max"] for r in recs])
    root = math.sqrt(cfg.n)
    table = []
    for eps in cfg.eps_grid:
        hit = smin <= ZERO_RTOL * smax if eps == 0 else smin <= eps / root
        table.append(_prob_row(eps, int(hit.sum()), cfg.trials))
    drops = sum(1 for a, b in zip(table, table[1:]) if b["prob"] < a["prob"])
    summary = {
        "monotone": drops == 0,
        "fitted_C": _fit_power(table, floor=cfg.get("tail_floor", 0.0)),
        "tail_floor": cfg.get("tail_floor", 0.0),
    }
    return _finish("sval-tail", cfg, summary, recs, table, drops, t0)


# ---------------------------------------------------------------- exact singularity


def bareiss_det(rows):
    """Determinant of an integer matrix by fraction-free elimination."""
    a = [list(map(int, r)) for r in rows]
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def singularity_exact(n):
    """Exact fraction of singular symmetric ``n x n`` sign matrices (``n <= 5``)."""
    if n < 1 or int(n) != n:
        raise PreconditionError("n must be a positive integer")
    if n > 5:
        raise CapacityError(f"exhaustive enumeration is capped at n = 5, got {n}")
    iu = list(zip(*np.triu_indices(n)))
    singular = 0
    total = 0
    for signs in itertools.product((-1, 1), repeat=len(iu)):
        m = [[0] * n for _ in range(n)]
        for (i, j), s in zip(iu, signs):
            m[i][j] = s
            m[j][i] = s
        singular += bareiss_det(m) == 0
        total += 1
    return Fraction(singular, total)


def run_singularity(cfg):
    t0 = time.perf_counter()
    frac = singularity_exact(cfg.n)
    summary = {"n": cfg.n, "probability": str(frac), "numerator": frac.numerator,
               "denominator": frac.denominator, "value": float(frac)}
    return _finish("singularity-exact", cfg, summary, [], [summary], 0, t0)


# ---------------------------------------------------------------- decoupling


def _sign_cube(n):
    return np.array(list(itertools.product((-1.0, 1.0), repeat=n)))


def decoupling_sides(G, J, eps_grid):
    """Exact counts for both sides of the decoupling inequality.

    Returns ``(lhs, rhs, size)``: ``lhs[e] / size`` is the Lévy concentration
    of ``<GX, X>`` at ``eps_grid[e]`` and ``rhs[e] / size**2`` is
    ``P[|<G P_Jc (X - X'), P_J X> - v| <= eps]`` over independent sign
    vectors ``X, X'`` with ``v = (<G P_Jc X', P_Jc X'> - <G P_Jc X, P_Jc X>)/2``.
    The inequality ``lhs^2 <= rhs`` is then an integer comparison.
    """
    G = np.asarray(G, dtype=np.float64)
    n = G.shape[0]
    if G.shape != (n, n) or not np.array_equal(G, G.T):
        raise PreconditionError("G must be a symmetric square matrix")
    if n > 8:
        raise CapacityError("exact decoupling enumeration is capped at n = 8")
    inJ = np.zeros(n, dtype=bool)
    inJ[list(J)] = True
    X = _sign_cube(n)
    XJ = X * inJ
    XC = X * ~inJ
    Q = np.einsum("ki,ij,kj->k", X, G, X)
    QC = np.einsum("ki,ij,kj->k", XC, G, XC)
    M = XJ @ G @ XC.T  # M[a, b] = <G P_Jc X_b, P_J X_a>
    bil = np.diag(M)[:, None] - M
    v = (QC[None, :] - QC[:, None]) / 2.0
    dev = np.sort(np.abs(bil - v).ravel())
    Qs = np.sort(Q)
    idx = np.arange(Qs.size)
    lhs, rhs = [], []
    for eps in eps_grid:
        rhs.append(int(np.searchsorted(dev, eps, side="right")))
        lhs.append(int(np.max(np.searchsorted(Qs, Qs + 2.0 * eps, side="right") - idx)))
    return lhs, rhs, X.shape[0]


def _decouple_trial(t, n_max, master, eps_grid, entry_max):
    rng = make_rng(derive_seed(master, t))
    n = 2 + t % (n_max - 1)
    U = rng.integers(-entry_max, entry_max + 1, size=(n, n))
    G = np.triu(U) + np.triu(U, 1).T
    out = []
    for size in range(1, n):
        J = sorted(int(j) for j in rng.choice(n, size=size, replace=False))
        lhs, rhs, m = decoupling_sides(G, J, eps_grid)
        bad = [e for e, (a, b) in enumerate(zip(lhs, rhs)) if a * a > b]
        margin = min(Fraction(b, m * m) - Fraction(a * a, m * m) for a, b in zip(lhs, rhs))
        out.append({"trial": t, "n": n, "J": J, "violations": len(bad), "min_margin": float(margin)})
    return out


def run_decoupling_check(cfg):
    """Exact decoupling check over seeded symmetric integer matrices.

    Matrix ``t`` has size ``2 + t mod (n - 1)`` and entries uniform in
    ``[-entry_max, entry_max]``; each gets one random ``J`` of every size
    from 1 to ``size - 1``.
    """
    t0 = time.perf_counter()
    if cfg.n < 2 or cfg.n > 8:
        raise CapacityError("decoupling needs 2 <= n <= 8")
    fn = partial(_decouple_trial, n_max=cfg.n, master=cfg.master_seed, eps_grid=cfg.eps_grid,
                 entry_max=int(cfg.get("entry_max", 3)))
    recs = [r for chunk in _map(fn, range(cfg.trials), cfg.workers) for r in chunk]
    viol = sum(r["violations"] for r in recs)
    summary = {"cases": len(recs), "eps_points": len(cfg.eps_grid), "violations": viol,
               "min_margin": min(r["min_margin"] for r in recs)}
    return _finish("decouple", cfg, summary, recs, recs, viol, t0)


# ---------------------------------------------------------------- replacement


def replacement_ratio(v, p, r):
    """``L(sum b_i v_i, r) / L(sum b'_i v_i, r)`` with Rademacher ``b`` and ``Ber(p) - Ber'(p)`` ``b'``."""
    if not 0 < p <= REPLACEMENT_P_MAX:
        raise PreconditionError(f"p = {p} outside (0, (2 - sqrt 2)/4]")
    rad = weighted_sum_atoms(v, EntryLaw.rademacher())
    sb = weighted_sum_atoms(v, EntryLaw.signed_bernoulli(p))
    return levy_exact(rad, r).value / levy_exact(sb, r).value


def _replace_trial(t, max_dim, master, p_values, r_grid):
    rng = make_rng(derive_seed(master, t))
    dim = 1 + t % max_dim
    v = _random_unit(rng, dim)
    rad = weighted_sum_atoms(v, EntryLaw.rademacher())
    worst = 0.0
    for p in p_values:
        sb = weighted_sum_atoms(v, EntryLaw.signed_bernoulli(p))
        for r in r_grid:
            worst = max(worst, levy_exact(rad, r).value / levy_exact(sb, r).value)
    return {"trial": t, "dim": dim, "max_ratio": worst}


def run_replacement_check(cfg):
    """Exact Rademacher / signed-Bernoulli concentration ratios over a seeded unit-vector family.

    Uses ``extra['p_values']`` (default ``[cfg.p]``), ``extra['r_grid']``
    (default 20 geometric points from 1e-6 to 2) and ``extra['cap']``
    (default 100).  A ratio that is not finite or exceeds the cap is a violation.
    """
    t0 = time.perf_counter()
    p_values = [float(p) for p in cfg.get("p_values", [cfg.p])]
    bad_p = [p for p in p_values if not 0 < p <= REPLACEMENT_P_MAX]
    if bad_p:
        raise PreconditionError(f"p values {bad_p} outside (0, (2 - sqrt 2)/4]")
    if cfg.n > 12:
        raise CapacityError("replacement check is capped at dimension 12")
    r_grid = [float(r) for r in cfg.get("r_grid", np.geomspace(1e-6, 2.0, 20))]
    cap = float(cfg.get("cap", 100.0))
    fn = partial(_replace_trial, max_dim=cfg.n, master=cfg.master_seed, p_values=p_values, r_grid=r_grid)
    recs = _map(fn, range(cfg.trials), cfg.workers)
    ratios = [r["max_ratio"] for r in recs]
    viol = sum(1 for x in ratios if not math.isfinite(x) or x > cap)
    summary = {"max_ratio": max(ratios), "cap": cap, "p_values": p_values, "r_grid": r_grid}
    return _finish("replace", cfg, summary, recs, recs, viol, t0)


# ---------------------------------------------------------------- tensorization


def _tensor_trial(t, N_max, master, eps_grid, terms):
    rng = make_rng(derive_seed(master, t))
    N = 1 + t % N_max
    W = rng.uniform(0.1, 2.0, size=(N, terms))
    law = EntryLaw.rademacher()
    coords = [weighted_sum_atoms(W[k], law) for k in range(N)]
    # joint atoms: the product law of the coordinates
    grids = np.array(list(itertools.product(*[range(len(d)) for d in coords])))
    pts = np.stack([coords[k].values[grids[:, k]] for k in range(N)], axis=1)
    prob = np.prod([coords[k].probs[grids[:, k]] for k in range(N)], axis=0)
    # face-type centres: each coordinate at an atom or at 0
    cand = [np.concatenate([d.values, [0.0]]) for d in coords]
    centres = np.array(list(itertools.product(*cand)))
    d2 = ((pts[None, :, :] - centres[:, None, :]) ** 2).sum(axis=2)
    root = math.sqrt(N)
    out = []
    for eps in eps_grid:
        R = eps * root
        lower = float(np.max((d2 <= R * R * (1 + 1e-12)) @ prob))
        # a ball of radius R sits inside a cube of half-side R
        upper = float(np.prod([levy_exact(d, R).value for d in coords]))
        point = math.e**N * float(np.prod([levy_exact(d, eps).value for d in coords]))
        affine = math.e**N * float(np.prod([a * eps + b for a, b in (levy_affine_majorant(d, eps) for d in coords)]))
        out.append({"trial": t, "N": N, "eps": eps, "lhs_lower": lower, "lhs_upper": upper,
                    "rhs_pointwise": point, "rhs_affine": affine})
    return out


def run_tensorization_check(cfg):
    """Tensorization inequality for vectors of independent Rademacher-weighted coordinates.

    Coordinate ``k`` is ``sum_j W_kj xi_kj`` with ``extra['terms']`` terms
    (default 1).  The ball concentration is bracketed between the best
    face-type centre (lower) and the cube product of one-dimensional
    concentrations (upper); a violation is an upper value above either
    right-hand side: ``e^N prod L(X_k, eps)`` (pointwise) or ``e^N prod
    (a_k eps + b_k)`` with ``(a_k, b_k)`` a line above ``L(X_k, .)`` on all
    of ``[0, inf)`` that touches its concave majorant at ``eps``.
    """
    t0 = time.perf_counter()
    if cfg.n > 6:
        raise CapacityError("tensorization check is capped at N = 6")
    fn = partial(_tensor_trial, N_max=cfg.n, master=cfg.master_seed, eps_grid=cfg.eps_grid,
                 terms=int(cfg.get("terms", 1)))
    recs = [r for chunk in _map(fn, range(cfg.trials), cfg.workers) for r in chunk]
    slack = 1e-12
    v_point = sum(r["lhs_upper"] > r["rhs_pointwise"] * (1 + slack) for r in recs)
    v_affine = sum(r["lhs_upper"] > r["rhs_affine"] * (1 + slack) for r in recs)
    refuted = sum(r["lhs_lower"] > min(r["rhs_pointwise"], r["rhs_affine"]) * (1 + slack) for r in recs)
    summary = {"cases": len(recs), "violations_pointwise": v_point, "violations_affine": v_affine,
               "refuted": refuted, "max_ratio_pointwise": max(r["lhs_upper"] / r["rhs_pointwise"] for r in recs)}
    return _finish("tensorize", cfg, summary, recs, recs, v_point + v_affine, t0)


# ---------------------------------------------------------------- structure scan


def _lcd_params(cfg):
    return LcdParams(L=cfg.L, theta_max=cfg.get("theta_max"), grid_step=cfg.get("grid_step", 1e-2),
                     bisect_tol=cfg.get("bisect_tol", 1e-7))


def _structure_of(v, cfg, params, with_threshold):
    try:
        rep = mrlcd(v, params, cfg.sphere, cfg.lam)
    except StructuralError as exc:
        return {"ok": False, "reason": str(exc)}
    out = {"ok": True, "lo": rep.median_value.lo, "hi": rep.median_value.hi,
           "status": rep.median_value.status, "blocks": rep.n_blocks}
    if with_threshold:
        out["median_threshold"] = median_threshold(v, cfg.p, cfg.get("threshold_L", cfg.L), cfg.sphere, cfg.lam).value
    return out


def _structure_trial(t, cfg, params, with_threshold):
    s = derive_seed(cfg.master_seed, t)
    A = np.asarray(sample_symmetric(cfg.n, cfg.law, derive_seed(s, 0)))
    rng = make_rng(derive_seed(s, 1))
    X = cfg.law.sample(rng, cfg.n)
    rec = {"trial": t}
    try:
        y = np.linalg.solve(A, X)
        ok = np.all(np.isfinite(y)) and np.linalg.norm(A @ y - X) <= 1e-8 * np.linalg.norm(X)
    except np.linalg.LinAlgError:
        ok = False
    if not ok:
        rec["x0"] = {"ok": False, "reason": "solve failed"}
    else:
        rec["x0"] = _structure_of(y / np.linalg.norm(y), cfg, params, with_threshold)
    rec["random"] = _structure_of(_random_unit(make_rng(derive_seed(s, 2)), cfg.n), cfg, params, with_threshold)
    return rec


def run_structure_scan(cfg):
    """MRLCD (and optionally the median threshold) of ``A^{-1} X`` against two baselines.

    Baselines are the all-ones vector and a fresh uniformly random unit
    vector per trial.  The headline is the fraction of trials whose
    median bracket lies entirely above the all-ones bracket; it must reach
    ``extra['min_exceed_fraction']`` (default 0.9).
    """
    t0 = time.perf_counter()
    if cfg.n > 256:
        raise CapacityError("structure scan is capped at n = 256")
    params = _lcd_params(cfg)
    with_thr = bool(cfg.get("threshold", False))
    ones = _structure_of(np.ones(cfg.n) / math.sqrt(cfg.n), cfg, params, with_thr)
    fn = partial(_structure_trial, cfg=cfg, params=params, with_threshold=with_thr)
    recs = _map(fn, range(cfg.trials), cfg.workers)
    good = [r for r in recs if r["x0"]["ok"]]
    skipped = len(recs) - len(good)
    summary = {"all_ones": ones, "skipped": skipped, "usable": len(good)}
    if ones["ok"] and good:
        frac = sum(r["x0"]["lo"] > ones["hi"] for r in good) / len(good)
        rnd = [r for r in recs if r["random"]["ok"]]
        summary["x0_exceeds_ones"] = frac
        summary["random_exceeds_ones"] = sum(r["random"]["lo"] > ones["hi"] for r in rnd) / max(1, len(rnd))
        summary["x0_exceeds_random"] = sum(
            r["x0"]["lo"] > r["random"]["hi"] for r in good if r["random"]["ok"]) / len(good)
        summary["x0_median_lo"] = [r["x0"]["lo"] for r in good]
        summary["random_median_lo"] = [r["random"]["lo"] for r in rnd]
    else:
        frac = 0.0
        summary["x0_exceeds_ones"] = frac
    need = float(cfg.get("min_exceed_fraction", 0.9))
    summary["min_exceed_fraction"] = need
    table = [{"trial": r["trial"], "x0_lo": r["x0"].get("lo"), "x0_hi": r["x0"].get("hi"),
              "random_lo": r["random"].get("lo"), "random_hi": r["random"].get("hi")} for r in recs]
    return _finish("structure-scan", cfg, summary, recs, table, int(frac < need), t0)


# ---------------------------------------------------------------- denominator events


def _denominator_trial(t, cfg):
    s = derive_seed(cfg.master_seed, t)
    A = np.asarray(sample_symmetric(cfg.n, cfg.law, derive_seed(s, 0)))
    X = cfg.law.sample(make_rng(derive_seed(s, 1)), cfg.n)
    ev = np.linalg.eigvalsh(A)
    rec = {"trial": t, "op_norm": float(np.max(np.abs(ev)))}
    # numerically singular, by the same rule the tail experiment uses at eps = 0
    if np.min(np.abs(ev)) <= ZERO_RTOL * rec["op_norm"]:
        rec["skipped"] = True
        return rec
    try:
        y = np.linalg.solve(A, X)
        hs_inv = float(np.linalg.norm(np.linalg.inv(A)))
    except np.linalg.LinAlgError:
        rec["skipped"] = True
        return rec
    if not np.all(np.isfinite(y)) or np.linalg.norm(A @ y - X) > 1e-8 * np.linalg.norm(X):
        rec["skipped"] = True
        return rec
    hs_eig = math.sqrt(math.fsum(1.0 / ev**2))
    cond = float(np.max(np.abs(ev)) / np.min(np.abs(ev)))
    rec.update(skipped=False, norm=float(np.linalg.norm(y)), hs=hs_eig,
               hs_gap=abs(hs_eig - hs_inv) / hs_eig, hs_tol=1e-10 + 1e-13 * cond)
    return rec


def run_denominator_check(cfg):
    """Frequencies of three events for ``|A^{-1}X|``, conditioned on ``|A| <= K sqrt(n)``.

    (a) ``|A^{-1}X| >= c`` (``c`` from ``extra['c_lower']``, default 0.1);
    (b) ``|A^{-1}X| <= eps^{-1/2} |A^{-1}|_HS``, asserted at rate
    ``>= 1 - eps - radius`` because ``E|A^{-1}X|^2 = |A^{-1}|_HS^2`` for
    isotropic X; (c) ``|A^{-1}X| >= eps |A^{-1}|_HS``.  ``|A^{-1}|_HS`` is
    computed from eigenvalues and cross-checked against the explicit inverse.
    """
    t0 = time.perf_counter()
    if cfg.n > 256:
        raise CapacityError("denominator check is capped at n = 256")
    recs = _map(partial(_denominator_trial, cfg=cfg), range(cfg.trials), cfg.workers)
    bound = cfg.K * math.sqrt(cfg.n)
    kept = [r for r in recs if not r["skipped"] and r["op_norm"] <= bound]
    skipped = sum(1 for r in recs if r["skipped"])
    m = len(kept)
    c_lower = float(cfg.get("c_lower", 0.1))
    norms = np.array([r["norm"] for r in kept])
    hs = np.array([r["hs"] for r in kept])
    rad = hoeffding_radius(m) if m else float("nan")
    table = []
    viol = 0
    for eps in cfg.eps_grid:
        row = {"eps": eps, "conditioned": m, "radius": rad}
        if m and eps > 0:
            row["rate_lower_c"] = float(np.mean(norms >= c_lower))
            row["rate_upper_hs"] = float(np.mean(norms <= hs / math.sqrt(eps)))
            row["rate_lower_hs"] = float(np.mean(norms >= eps * hs))
            row["upper_hs_ok"] = row["rate_upper_hs"] >= 1.0 - eps - rad
            viol += not row["upper_hs_ok"]
        table.append(row)
    hs_gap = max([r["hs_gap"] for r in kept], default=0.0)
    viol += sum(r["hs_gap"] > r["hs_tol"] for r in kept)
    summary = {"conditioned": m, "skipped": skipped, "c_lower": c_lower, "hs_cross_check_max_rel_gap": hs_gap,
               "fitted_c": float(norms.min()) if m else None,
               "fitted_ratio_lower": float((norms / hs).min()) if m else None}
    return _finish("denominator", cfg, summary, recs, table, viol, t0)


# ---------------------------------------------------------------- quadratic small ball


def _quadratic_trial(t, cfg, u_mode):
    s = derive_seed(cfg.master_seed, t)
    M = np.asarray(sample_symmetric(cfg.n + 1, cfg.law, derive_seed(s, 0)))
    A = M[1:, 1:]
    x = M[1:, 0]
    rec = {"trial": t, "op_norm": singular_extremes(A).s_max}
    try:
        stat_diag = quadratic_form_statistic(A, x, M[0, 0])
    except PreconditionError:
        rec["skipped"] = True
        return rec
    dist = distance_to_rowspan(M, 0)
    if u_mode == "zero":
        stat = quadratic_form_statistic(A, x, 0.0)
    elif u_mode == "realized":
        stat = 0.0
    else:
        stat = stat_diag
    rec.update(skipped=False, stat=stat, identity_gap=abs(stat_diag - dist),
               s_min_full=singular_extremes(M).s_min, dist=dist)
    return rec


def run_quadratic_smallball(cfg):
    """Small-ball frequencies of ``|<A^{-1}X, X> - u| / sqrt(1 + |A^{-1}X|^2)``.

    The matrix is the lower-right ``n x n`` block of a symmetric ``(n+1)``
    sample, X its first column below the corner and ``u`` set by
    ``extra['u']``: ``"diag"`` (the corner entry, default), ``"zero"`` or
    ``"realized"``.  Per trial the ``"diag"`` statistic must match the
    distance from the first row to the span of the others within 1e-8 and
    dominate the smallest singular value of the full matrix.
    """
    t0 = time.perf_counter()
    if cfg.n > 256:
        raise CapacityError("quadratic small-ball check is capped at n = 256")
    u_mode = cfg.get("u", "diag")
    recs = _map(partial(_quadratic_trial, cfg=cfg, u_mode=u_mode), range(cfg.trials), cfg.workers)
    done = [r for r in recs if not r["skipped"]]
    skipped = len(recs) - len(done)
    bound = cfg.K * math.sqrt(cfg.n)
    kept = [r for r in done if r["op_norm"] <= bound]
    stats = np.array([r["stat"] for r in kept])
    table = [_prob_row(eps, int(np.sum(stats <= eps)), len(kept)) for eps in cfg.eps_grid]
    gap = max([r["identity_gap"] for r in done], default=0.0)
    sval_bad = sum(r["s_min_full"] > r["dist"] * (1 + 1e-9) + 1e-12 for r in done)
    drops = sum(1 for a, b in zip(table, table[1:]) if b["prob"] < a["prob"])
    viol = int(gap > 1e-8) + sval_bad + drops
    summary = {"u": u_mode, "conditioned": len(kept), "skipped": skipped, "identity_max_gap": gap,
               "sval_domination_failures": sval_bad, "monotone": drops == 0, "fitted_C": _fit_power(table)}
    return _finish("quadratic", cfg, summary, recs, table, viol, t0)


# ---------------------------------------------------------------- single-vector commands


def _vector(cfg, key="vector"):
    v = cfg.get(key)
    if v is not None:
        return np.asarray(v, dtype=np.float64)
    return _random_unit(make_rng(derive_seed(cfg.master_seed, 0)), cfg.n)


def _unit(v):
    return v / np.linalg.norm(v)


def run_lcd(cfg):
    t0 = time.perf_counter()
    v = _unit(_vector(cfg))
    br = lcd(v, _lcd_params(cfg))
    summary = {"vector": v, "lcd": br.to_dict()}
    return _finish("lcd", cfg, summary, [], [br.to_dict()], 0, t0)


def run_mrlcd(cfg):
    t0 = time.perf_counter()
    v = _unit(_vector(cfg))
    rep = mrlcd(v, _lcd_params(cfg), cfg.sphere, cfg.lam)
    table = [{"block": i, **br.to_dict()} for i, (_, br) in enumerate(rep.per_block)]
    return _finish("mrlcd", cfg, rep.to_dict(), [], table, 0, t0)


def run_threshold(cfg):
    t0 = time.perf_counter()
    v = _unit(_vector(cfg))
    if cfg.get("median", False):
        rep = median_threshold(v, cfg.p, cfg.L, cfg.sphere, cfg.lam)
    else:
        rep = threshold(v, cfg.p, cfg.L)
    d = rep.to_dict()
    return _finish("threshold", cfg, d, [], [{"value": d["value"]}], 0, t0)


def run_round(cfg):
    """Round ``extra['y']`` (default: a random unit vector scaled by ``extra['scale']``, default 10).

    A signed-Bernoulli law uses the Lévy-concentration form of (R2); any
    other atomic law uses the ``psi``-centred form.
    """
    t0 = time.perf_counter()
    y = cfg.get("y")
    y = np.asarray(y, dtype=np.float64) if y is not None else float(cfg.get("scale", 10.0)) * _vector(cfg)
    consts = (float(cfg.get("C_cert", 8.0)), float(cfg.get("c_cert", 0.125)))
    tries = int(cfg.get("max_attempts", 1000))
    if cfg.law.kind == "signed_bernoulli":
        res = levy_round(y, cfg.law.p, cfg.get("mu"), consts, tries, cfg.master_seed)
    else:
        res = randomized_round(y, cfg.law, float(cfg.get("psi", 0.0)), cfg.get("mu"), consts, tries, cfg.master_seed)
    return _finish("round", cfg, res.to_dict(), [], res.history, 0, t0)
