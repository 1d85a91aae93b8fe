"""Random symmetric matrices and the dense linear algebra built on them.

Entry laws, seeded sampling of symmetric matrices, extreme singular values,
distances from a row to the span of the other rows, and the quadratic-form
expression for that distance.
"""

import csv
import io
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import mpmath
import numpy as np

from .errors import NumericError, ParameterError, PreconditionError
from .rng import make_rng

__all__ = [
    "EntryLaw",
    "SymmetricMatrixSample",
    "SingularValueResult",
    "DistanceIdentity",
    "sample_symmetric",
    "singular_extremes",
    "distance_to_rowspan",
    "quadratic_form_statistic",
    "quadratic_distance_identity",
    "matrix_to_csv",
    "matrix_from_csv",
]

LAW_KINDS = ("rademacher", "gaussian", "signed_bernoulli", "uniform", "perturbed_rademacher")

# Condition number above which the double-precision routes are redone in mpmath.
_ILL_CONDITIONED = 1e6
_MP_DPS = 50


@dataclass(frozen=True)
class EntryLaw:
    """One law from the entry catalog.

    Use the classmethod constructors rather than filling fields by hand.
    ``perturbed_rademacher`` is a Rademacher sign plus an independent
    N(0, sigma^2); its default sigma of 1e-12 stands in for a variance that
    would underflow at any useful dimension.
    """

    kind: str
    mean: float = 0.0
    variance: float = 1.0
    p: float = 0.5
    sigma: float = 0.0
    a: float = -math.sqrt(3.0)
    b: float = math.sqrt(3.0)

    def __post_init__(self):
        if self.kind not in LAW_KINDS:
            raise ParameterError(f"unknown law {self.kind!r}; expected one of {LAW_KINDS}")
        if self.kind == "signed_bernoulli" and not 0.0 < self.p < 1.0:
            raise ParameterError(f"SignedBernoulli needs p in (0, 1), got {self.p}")
        if self.kind == "perturbed_rademacher" and not self.sigma >= 0.0:
            raise ParameterError(f"sigma must be >= 0, got {self.sigma}")
        if self.kind == "gaussian" and not self.variance > 0.0:
            raise ParameterError(f"variance must be > 0, got {self.variance}")
        if self.kind == "uniform" and not self.a < self.b:
            raise ParameterError(f"Uniform needs a < b, got ({self.a}, {self.b})")

    @classmethod
    def rademacher(cls):
        return cls("rademacher")

    @classmethod
    def gaussian(cls, mean=0.0, variance=1.0):
        return cls("gaussian", mean=float(mean), variance=float(variance))

    @classmethod
    def signed_bernoulli(cls, p):
        return cls("signed_bernoulli", p=float(p))

    @classmethod
    def uniform(cls, a=-math.sqrt(3.0), b=math.sqrt(3.0)):
        return cls("uniform", a=float(a), b=float(b))

    @classmethod
    def perturbed_rademacher(cls, sigma=1e-12):
        return cls("perturbed_rademacher", sigma=float(sigma))

    @classmethod
    def parse(cls, text):
        """Parse ``name`` or ``name:arg1,arg2`` as used on the command line.

        >>> EntryLaw.parse("signed_bernoulli:0.1").p
        0.1
        """
        name, _, rest = text.strip().partition(":")
        name = name.lower().replace("-", "_")
        args = [float(x) for x in rest.split(",") if x.strip()]
        ctor = {
            "rademacher": cls.rademacher,
            "rad": cls.rademacher,
            "gaussian": cls.gaussian,
            "normal": cls.gaussian,
            "signed_bernoulli": cls.signed_bernoulli,
            "uniform": cls.uniform,
            "perturbed_rademacher": cls.perturbed_rademacher,
        }.get(name)
        if ctor is None:
            raise ParameterError(f"unknown law {text!r}")
        try:
            return ctor(*args)
        except TypeError as exc:
            raise ParameterError(f"bad arguments for law {text!r}") from exc

    def to_dict(self):
        out = {"kind": self.kind}
        if self.kind == "gaussian":
            out.update(mean=self.mean, variance=self.variance)
        elif self.kind == "signed_bernoulli":
            out["p"] = self.p
        elif self.kind == "uniform":
            out.update(a=self.a, b=self.b)
        elif self.kind == "perturbed_rademacher":
            out["sigma"] = self.sigma
        return out

    @classmethod
    def from_dict(cls, d):
        if isinstance(d, str):
            return cls.parse(d)
        d = dict(d)
        return cls(d.pop("kind"), **d)

    @property
    def is_atomic(self):
        return self.kind in ("rademacher", "signed_bernoulli")

    def atoms(self):
        """``(values, probs)`` for the atomic laws, ``None`` otherwise."""
        if self.kind == "rademacher":
            return np.array([-1.0, 1.0]), np.array([0.5, 0.5])
        if self.kind == "signed_bernoulli":
            q = self.p * (1.0 - self.p)
            return np.array([-1.0, 0.0, 1.0]), np.array([q, 1.0 - 2.0 * q, q])
        return None

    def var(self):
        if self.kind == "rademacher":
            return 1.0
        if self.kind == "gaussian":
            return self.variance
        if self.kind == "signed_bernoulli":
            return 2.0 * self.p * (1.0 - self.p)
        if self.kind == "uniform":
            return (self.b - self.a) ** 2 / 12.0
        return 1.0 + self.sigma**2

    def sample(self, rng, size):
        if self.kind == "rademacher":
            return rng.integers(0, 2, size=size).astype(np.float64) * 2.0 - 1.0
        if self.kind == "gaussian":
            return rng.normal(self.mean, math.sqrt(self.variance), size=size)
        if self.kind == "signed_bernoulli":
            return (rng.random(size) < self.p).astype(np.float64) - (rng.random(size) < self.p)
        if self.kind == "uniform":
            return rng.uniform(self.a, self.b, size=size)
        signs = rng.integers(0, 2, size=size).astype(np.float64) * 2.0 - 1.0
        return signs + self.sigma * rng.standard_normal(size)

    def char_abs(self, t):
        """Modulus of the characteristic function at ``t`` (vectorised)."""
        t = np.asarray(t, dtype=np.float64)
        if self.kind == "rademacher":
            return np.abs(np.cos(t))
        if self.kind == "gaussian":
            return np.exp(-0.5 * self.variance * t * t)
        if self.kind == "signed_bernoulli":
            q = self.p * (1.0 - self.p)
            return np.abs(1.0 - 2.0 * q + 2.0 * q * np.cos(t))
        if self.kind == "uniform":
            half = 0.5 * (self.b - self.a) * t
            return np.abs(np.sinc(half / np.pi))
        return np.abs(np.cos(t)) * np.exp(-0.5 * self.sigma**2 * t * t)


@dataclass(frozen=True)
class SymmetricMatrixSample:
    n: int
    entries: np.ndarray = field(repr=False)
    law: EntryLaw
    seed: int

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)


class SingularValueResult(NamedTuple):
    s_min: float
    s_max: float
    method: str


class DistanceIdentity(NamedTuple):
    direct: float
    formula: float


def sample_symmetric(n, law, seed):
    """Draw the upper triangle (diagonal included) i.i.d. from ``law`` and mirror it.

    Entries are generated in ``np.triu_indices(n)`` order from ``make_rng(seed)``,
    so ``(n, law, seed)`` fixes the matrix bit for bit.
    """
    if int(n) != n or n < 1:
        raise ParameterError(f"n must be a positive integer, got {n}")
    n = int(n)
    rng = make_rng(seed)
    iu = np.triu_indices(n)
    vals = law.sample(rng, iu[0].size)
    m = np.zeros((n, n))
    m[iu] = vals
    m[iu[1], iu[0]] = vals
    m.setflags(write=False)
    return SymmetricMatrixSample(n, m, law, int(seed))


def _as_matrix(m):
    a = np.asarray(m.entries if isinstance(m, SymmetricMatrixSample) else m, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ParameterError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NumericError("matrix has non-finite entries")
    return a


def singular_extremes(m):
    """Smallest and largest singular values.

    Symmetric input goes through a symmetric eigendecomposition (singular
    values are the absolute eigenvalues); forming M^T M would square the
    condition number.
    """
    a = _as_matrix(m)
    if np.array_equal(a, a.T):
        s = np.abs(np.linalg.eigvalsh(a))
        return SingularValueResult(float(s.min()), float(s.max()), "full-decomposition")
    s = np.linalg.svd(a, compute_uv=False)
    return SingularValueResult(float(s[-1]), float(s[0]), "bidiagonal")


def _mp_matrix(a):
    return mpmath.matrix([[mpmath.mpf(float(x)) for x in row] for row in a])


def _mp_projection_residual(others, row):
    """Norm of ``row`` minus its projection on span(others), in high precision."""
    with mpmath.workdps(_MP_DPS):
        basis = []
        scale = max((abs(float(x)) for r in others for x in r), default=1.0) or 1.0
        tol = mpmath.mpf(10) ** (-(_MP_DPS - 15)) * scale
        for r in others:
            w = [mpmath.mpf(float(x)) for x in r]
            for _ in range(2):
                for q in basis:
                    c = mpmath.fsum(qi * wi for qi, wi in zip(q, w))
                    w = [wi - c * qi for wi, qi in zip(w, q)]
            nw = mpmath.sqrt(mpmath.fsum(wi * wi for wi in w))
            if nw > tol:
                basis.append([wi / nw for wi in w])
        w = [mpmath.mpf(float(x)) for x in row]
        for _ in range(2):
            for q in basis:
                c = mpmath.fsum(qi * wi for qi, wi in zip(q, w))
                w = [wi - c * qi for wi, qi in zip(w, q)]
        return float(mpmath.sqrt(mpmath.fsum(wi * wi for wi in w)))


def distance_to_rowspan(m, i):
    """Euclidean distance from row ``i`` (0-based) to the span of the other rows.

    Computed by orthogonal projection.  When the other rows are close to
    linearly dependent the double-precision basis is unreliable, so the
    projection is repeated in 50-digit arithmetic on the exact entries.
    """
    a = _as_matrix(m)
    n = a.shape[0]
    if not 0 <= i < n:
        raise ParameterError(f"row index {i} out of range for n={n}")
    row = a[i]
    others = np.delete(a, i, axis=0)
    if others.shape[0] == 0:
        return float(np.linalg.norm(row))
    u, s, _ = np.linalg.svd(others.T, full_matrices=False)
    if s[0] == 0.0:
        return float(np.linalg.norm(row))
    if s[-1] < _ILL_CONDITIONED**-1 * s[0]:
        return _mp_projection_residual(others, row)
    r = row - u @ (u.T @ row)
    r = r - u @ (u.T @ r)
    return float(np.linalg.norm(r))


def quadratic_form_statistic(a_minor, x, u):
    """``|<A^{-1}x, x> - u| / sqrt(1 + |A^{-1}x|^2)`` for a symmetric invertible ``A``.

    Falls back to 50-digit arithmetic when ``A`` is ill conditioned; raises
    :class:`PreconditionError` if ``A`` is singular.
    """
    a = np.asarray(a_minor, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if a.size == 0:
        return abs(float(u))
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(x)) and math.isfinite(u)):
        raise NumericError("non-finite input")
    ev = np.abs(np.linalg.eigvalsh(a))
    if ev.max() > 0 and ev.min() > ev.max() / _ILL_CONDITIONED:
        y = np.linalg.solve(a, x)
        return float(abs(y @ x - u) / math.sqrt(1.0 + y @ y))
    with mpmath.workdps(_MP_DPS):
        am = _mp_matrix(a)
        xm = mpmath.matrix([mpmath.mpf(float(v)) for v in x])
        try:
            y = mpmath.lu_solve(am, xm)
        except ZeroDivisionError:
            raise PreconditionError("minor is singular") from None
        if not all(mpmath.isfinite(v) for v in y):
            raise PreconditionError("minor is singular")
        yx = mpmath.fsum(y[k] * xm[k] for k in range(len(x)))
        yy = mpmath.fsum(y[k] ** 2 for k in range(len(x)))
        return float(abs(yx - mpmath.mpf(float(u))) / mpmath.sqrt(1 + yy))


def quadratic_distance_identity(m, i):
    """Row-span distance of row ``i`` computed two ways.

    ``direct`` is :func:`distance_to_rowspan`; ``formula`` deletes row and
    column ``i`` to get the minor A', takes X = column i without its diagonal
    entry and evaluates ``|<A'^{-1}X, X> - m_ii| / sqrt(1 + |A'^{-1}X|^2)``.
    """
    a = _as_matrix(m)
    n = a.shape[0]
    if not 0 <= i < n:
        raise ParameterError(f"row index {i} out of range for n={n}")
    keep = [k for k in range(n) if k != i]
    minor = a[np.ix_(keep, keep)]
    x = a[keep, i]
    try:
        formula = quadratic_form_statistic(minor, x, a[i, i])
    except PreconditionError:
        raise PreconditionError(f"minor obtained by deleting row/column {i} is singular") from None
    return DistanceIdentity(distance_to_rowspan(a, i), formula)


def matrix_to_csv(m, fh=None):
    """Row-major CSV with shortest round-trip decimal floats.

    Writes to ``fh`` if given, otherwise returns the text.
    """
    a = _as_matrix(m)
    buf = fh if fh is not None else io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in a:
        w.writerow(repr(float(x)) for x in row)
    if fh is None:
        return buf.getvalue()
    return None


def matrix_from_csv(text_or_fh):
    fh = io.StringIO(text_or_fh) if isinstance(text_or_fh, str) else text_or_fh
    return np.array([[float(x) for x in row] for row in csv.reader(fh) if row])
