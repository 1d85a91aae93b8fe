"""Randomized rounding of real vectors to integer vectors with certified small-ball checks.

Each attempt rounds ``y_i`` up with probability ``frac(y_i)`` and down
otherwise, then checks, exactly over the atom law of the weighted sum:

* (R1) ``max |y - y'| <= 1`` (true by construction),
* (R2) the small-ball function of ``sum b_i y'_i`` at every ``t >= sqrt(n)``
  stays below ``C_cert * mu * t``,
* (R3) the concentration at width ``sqrt(n)`` keeps at least ``c_cert`` of
  its value before rounding.

(R2) is checked on the continuum ``t >= sqrt(n)``, not on a grid: the
small-ball function is a right-continuous step function, so the supremum
of its ratio to ``t`` is attained at ``sqrt(n)`` or at one of its jumps.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .anticonc import centered_ratio_sup, levy_exact, levy_ratio_sup, weighted_sum_atoms
from .ensembles import EntryLaw
from .errors import CertificationError, ParameterError, PreconditionError
from .rng import make_rng

__all__ = ["RoundingResult", "randomized_round", "levy_round"]


@dataclass
class RoundingResult:
    y_prime: np.ndarray
    attempts: int
    checks: dict
    constants_used: tuple
    mu: float
    mode: str
    history: list = field(default_factory=list, repr=False)

    def to_dict(self):
        return {
            "y_prime": [int(a) for a in self.y_prime],
            "attempts": self.attempts,
            "checks": self.checks,
            "constants_used": {"C_cert": self.constants_used[0], "c_cert": self.constants_used[1]},
            "mu": self.mu,
            "mode": self.mode,
            "history": self.history,
        }


def _check_law(law):
    atoms = law.atoms()
    if atoms is None:
        raise ParameterError(f"law {law.kind!r} is not atomic; exact checks need a finite atom set")
    if np.any(np.abs(atoms[0]) > 1):
        raise PreconditionError("law must be supported in [-1, 1]")


def _round_loop(y, law, ratio_sup, mu, constants, max_attempts, seed, mode):
    y = np.asarray(y, dtype=np.float64).ravel()
    if not np.all(np.isfinite(y)) or y.size == 0:
        raise ParameterError("y must be a non-empty finite vector")
    C_cert, c_cert = constants
    if not (C_cert > 0 and c_cert > 0):
        raise ParameterError("certification constants must be positive")
    if max_attempts < 1:
        raise ParameterError("max_attempts must be >= 1")
    _check_law(law)
    n = y.size
    root = math.sqrt(n)
    d_y = weighted_sum_atoms(y, law)
    mu_min = ratio_sup(d_y, root)
    if mu is None:
        mu = mu_min
    elif mu < mu_min * (1.0 - 1e-12):
        raise PreconditionError(f"mu = {mu} is below the smallest valid value {mu_min} for this y")
    levy_y = levy_exact(d_y, root).value

    base = np.floor(y)
    frac = y - base
    rng = make_rng(seed)
    history = []
    best = None
    for attempt in range(1, max_attempts + 1):
        # one uniform per coordinate every attempt, so the stream depends on the seed alone
        u = rng.random(n)
        yp = (base + (u < frac)).astype(np.int64)
        d_p = weighted_sum_atoms(yp.astype(np.float64), law)
        r1 = float(np.max(np.abs(y - yp)))
        r2 = ratio_sup(d_p, root) / mu
        r3 = levy_exact(d_p, root).value / levy_y
        rec = {
            "attempt": attempt,
            "y_prime": yp.tolist(),
            "R1": r1,
            "R2": r2,
            "R3": r3,
            "R1_pass": r1 <= 1.0,
            "R2_pass": r2 <= C_cert,
            "R3_pass": r3 >= c_cert,
        }
        history.append(rec)
        score = max(r2 / C_cert, c_cert / r3)
        if best is None or score < best[0]:
            best = (score, yp, rec)
        if rec["R1_pass"] and rec["R2_pass"] and rec["R3_pass"]:
            return RoundingResult(yp, attempt, rec, (C_cert, c_cert), float(mu), mode, history)
    failed = RoundingResult(best[1], max_attempts, best[2], (C_cert, c_cert), float(mu), mode, history)
    raise CertificationError(
        f"no attempt passed (R2) <= {C_cert} and (R3) >= {c_cert} in {max_attempts} tries; "
        f"best R2={best[2]['R2']:.4g}, R3={best[2]['R3']:.4g}",
        best=failed,
    )


def randomized_round(y, law, psi=0.0, mu=None, constants=(8.0, 0.125), max_attempts=1000, seed=0):
    """Round ``y`` coordinatewise at random until (R1)-(R3) hold for the ``psi``-centred small ball.

    ``mu`` defaults to the smallest value satisfying the hypothesis,
    ``sup_{t >= sqrt(n)} P[|sum b_i y_i - psi| <= t] / t``.  Raises
    CertificationError (carrying the best attempt) when ``max_attempts``
    attempts all fail.
    """

    def ratio(d, t_min):
        return centered_ratio_sup(d, psi, t_min)

    return _round_loop(y, law, ratio, mu, constants, max_attempts, seed, "centered")


def levy_round(y, p, mu=None, constants=(8.0, 0.125), max_attempts=1000, seed=0):
    """As :func:`randomized_round` with ``Ber(p) - Ber'(p)`` weights and (R2) on the Lévy concentration."""
    return _round_loop(y, EntryLaw.signed_bernoulli(p), levy_ratio_sup, mu, constants, max_attempts, seed, "levy")
