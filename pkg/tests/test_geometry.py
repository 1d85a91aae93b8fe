import itertools
import math

import numpy as np
import pytest

from mrlcd.errors import ParameterError, StructuralError
from mrlcd.geometry import (
    SphereParams,
    as_unit_vector,
    default_c_spread,
    is_compressible,
    qualifying_indices,
    sparse_residual,
    spread_assignment,
)
from mrlcd.rng import make_rng


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def test_sparse_residual_anchors():
    e1 = np.eye(8)[0]
    assert sparse_residual(e1, 1) == 0.0
    assert sparse_residual(np.ones(8) / math.sqrt(8), 4) == pytest.approx(1 / math.sqrt(2))


def test_sparse_residual_matches_support_search():
    rng = make_rng(11)
    for _ in range(20):
        v = unit(rng.standard_normal(8))
        for k in range(9):
            best = min(
                math.sqrt(sum(v[i] ** 2 for i in range(8) if i not in s)) for s in itertools.combinations(range(8), k)
            )
            assert sparse_residual(v, k) == pytest.approx(best, abs=1e-14)


def test_compressibility_cases():
    p = SphereParams(0.5, 0.5)
    assert is_compressible(np.eye(6)[0], p)
    for n in (4, 16, 64):
        assert not is_compressible(np.ones(n) / math.sqrt(n), p)


def test_compressible_boundary_is_closed():
    # residual after dropping the top coordinate is exactly 0.6, made representable by construction
    v = np.array([0.8, 0.6, 0.0, 0.0])
    assert sparse_residual(v, 1) == 0.6
    assert is_compressible(v, SphereParams(0.25, 0.6))
    assert not is_compressible(v, SphereParams(0.25, 0.59))


def test_unit_vector_validation():
    with pytest.raises(ParameterError):
        as_unit_vector([1.0, 1.0])
    with pytest.raises(ParameterError):
        as_unit_vector([np.nan, 1.0])


def test_params_validation():
    with pytest.raises(ParameterError):
        SphereParams(0.0, 0.5)
    with pytest.raises(ParameterError):
        SphereParams(0.5, 0.5, 1.0)
    assert SphereParams(0.5, 0.5).c_spread == default_c_spread(0.5, 0.5) == 1 / 64


def test_spread_all_ones_sixteen():
    a = spread_assignment(np.ones(16) / 4, SphereParams(0.5, 0.5, 1 / 8), 1 / 8)
    assert a.spread == (0, 1)
    assert a.blocks == ((0, 1),)
    assert a.block_size == 2


def test_spread_rejects_compressible():
    with pytest.raises(StructuralError):
        spread_assignment(np.eye(16)[0], SphereParams(0.5, 0.5, 1 / 8), 1 / 8)


def test_spread_rejects_bad_lambda():
    v = np.ones(16) / 4
    with pytest.raises(ParameterError):
        spread_assignment(v, SphereParams(0.5, 0.5, 1 / 8), 1 / 32)
    with pytest.raises(ParameterError):
        spread_assignment(v, SphereParams(0.5, 0.5, 1 / 8), 1 / 4)


def test_spread_window_against_direct_scan():
    params = SphereParams(0.1, 0.1, 0.5)
    rng = make_rng(2)
    for _ in range(25):
        v = unit(rng.standard_normal(64))
        a = spread_assignment(v, params, 1 / 8)
        lo, hi = 0.1 / math.sqrt(128), 1 / math.sqrt(6.4)
        direct = [k for k in range(64) if lo <= abs(v[k]) <= hi]
        assert list(a.spread) == direct[:32]
        assert all(lo <= abs(v[k]) <= hi for k in a.spread)
        assert sorted(i for b in a.blocks for i in b) == list(a.covered)
        assert len(a.covered) % 8 == 0 and len(a.covered) >= params.c_spread * 64 / 2


def test_spread_depends_only_on_qualifying_set():
    params = SphereParams(0.1, 0.1, 0.5)
    rng = make_rng(4)
    v = unit(rng.standard_normal(64))
    w = np.abs(v) * np.where(rng.random(64) < 0.5, -1, 1)
    # same magnitudes, random signs
    assert np.array_equal(qualifying_indices(v, params), qualifying_indices(w, params))
    assert spread_assignment(v, params, 1 / 8) == spread_assignment(w, params, 1 / 8)


def test_default_spread_constant_gives_enough_indices():
    params = SphereParams(0.5, 0.5)
    rng = make_rng(8)
    for trial in range(60):
        n = 64 + 3 * trial
        v = rng.standard_normal(n) * rng.uniform(0.2, 3.0, n)
        v = unit(v)
        if is_compressible(v, params):
            continue
        assert qualifying_indices(v, params).size >= 2 * math.ceil(params.c_spread * n)
