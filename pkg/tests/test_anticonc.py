import math

import numpy as np
import pytest
from scipy import integrate, stats

from mrlcd.anticonc import (
    AtomDistribution,
    centered_ratio_sup,
    esseen_levy_bound,
    hoeffding_radius,
    levy_affine_majorant,
    levy_exact,
    levy_left,
    levy_mc,
    levy_ratio_sup,
    merge_atoms,
    mrlcd_anticonc_bound,
    rogozin_bound,
    tensorization_bound,
    weighted_sum_atoms,
)
from mrlcd.ensembles import EntryLaw
from mrlcd.errors import CapacityError, ParameterError, PreconditionError
from mrlcd.rng import derive_seed, make_rng

from oracles import RAD, centered_ratio_brute, direct_atoms, levy_brute, levy_ratio_brute, sb

R = EntryLaw.rademacher()
SB1 = EntryLaw.signed_bernoulli(0.1)


def test_four_ones_rademacher():
    d = weighted_sum_atoms([1, 1, 1, 1], R)
    assert list(d.values) == [-4, -2, 0, 2, 4]
    assert list(d.probs) == [1 / 16, 4 / 16, 6 / 16, 4 / 16, 1 / 16]
    assert levy_exact(d, 0).value == 0.375
    # radius 1 covers two neighbouring atoms 2 apart
    assert levy_exact(d, 1).value == 0.625
    assert levy_exact(d, 2).value == 0.875
    assert levy_exact(d, 4).value == 1.0


def test_single_weight_and_signed_bernoulli():
    d = weighted_sum_atoms([1], R)
    assert list(d.values) == [-1, 1] and list(d.probs) == [0.5, 0.5]
    assert levy_exact(d, 0).value == 0.5
    d = weighted_sum_atoms([1, 1], SB1)
    assert d.prob_at(0.0) == pytest.approx(0.6886, abs=1e-15)


def test_window_covering_support_is_one():
    rng = make_rng(1)
    for _ in range(20):
        d = weighted_sum_atoms(rng.standard_normal(6), R)
        assert levy_exact(d, d.diameter / 2).value == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("law,atoms", [(R, RAD), (SB1, sb(0.1)), (EntryLaw.signed_bernoulli(0.3), sb(0.3))])
def test_meet_in_middle_matches_direct_enumeration(law, atoms):
    rng = make_rng(5)
    top = 12 if law.kind == "rademacher" else 8
    for dim in range(1, top + 1):
        w = rng.standard_normal(dim)
        d = weighted_sum_atoms(w, law)
        v, p = direct_atoms(w, *atoms)
        assert len(d) == v.size
        assert np.max(np.abs(d.values - v)) <= 1e-12
        assert np.max(np.abs(d.probs - p)) <= 1e-12


def test_structured_weights_merge():
    d = weighted_sum_atoms([0.1] * 10, R)
    v, p = direct_atoms([0.1] * 10, *RAD)
    assert len(d) == 11
    assert np.allclose(d.values, v, atol=1e-12) and np.allclose(d.probs, p, atol=1e-15)


def test_capacity_caps():
    with pytest.raises(CapacityError, match="levy_mc"):
        weighted_sum_atoms(np.ones(27), R)
    with pytest.raises(CapacityError):
        weighted_sum_atoms(np.ones(17), SB1)
    with pytest.raises(ParameterError):
        weighted_sum_atoms([1.0], EntryLaw.gaussian())


def test_symmetry_of_symmetric_laws():
    rng = make_rng(9)
    for law in (R, SB1):
        d = weighted_sum_atoms(rng.standard_normal(7), law)
        assert np.allclose(d.values, -d.values[::-1], atol=1e-12)
        assert np.allclose(d.probs, d.probs[::-1], atol=1e-12)


def test_levy_matches_brute_force():
    rng = make_rng(3)
    for _ in range(30):
        d = weighted_sum_atoms(rng.standard_normal(rng.integers(1, 7)), SB1)
        for eps in rng.uniform(0, 2, 5):
            assert levy_exact(d, eps).value == pytest.approx(levy_brute(d.values, d.probs, eps), abs=1e-12)


def test_small_eps_is_max_atom():
    rng = make_rng(12)
    for _ in range(20):
        d = weighted_sum_atoms(rng.standard_normal(5), R)
        gap = np.min(np.diff(d.values))
        assert levy_exact(d, 0.49 * gap).value == pytest.approx(d.probs.max())


def test_left_limit_and_ratio_helpers():
    d = weighted_sum_atoms([1, 1, 1, 1], R)
    assert levy_left(d, 1.0) == 0.375
    assert levy_left(d, 1.0 + 1e-6) == 0.625
    rng = make_rng(21)
    for _ in range(25):
        d = weighted_sum_atoms(rng.uniform(-3, 3, rng.integers(1, 5)), SB1)
        t0 = rng.uniform(0.05, 2)
        assert levy_ratio_sup(d, t0) == pytest.approx(levy_ratio_brute(d.values, d.probs, t0), rel=1e-12)
        psi = rng.uniform(-1, 1)
        assert centered_ratio_sup(d, psi, t0) == pytest.approx(centered_ratio_brute(d.values, d.probs, psi, t0),
                                                                rel=1e-12)


def test_mc_four_ones():
    e = levy_mc([1, 1, 1, 1], R, 0.0, 100000, seed=17)
    assert e.method == "monte-carlo" and e.trials == 100000
    assert e.hoeffding_radius == pytest.approx(math.sqrt(math.log(200) / 200000))
    assert abs(e.value - 0.375) <= e.hoeffding_radius


def test_mc_continuous_laws():
    e = levy_mc([1.0], EntryLaw.gaussian(), 0.0, 20000, seed=1)
    assert e.value <= e.hoeffding_radius
    e = levy_mc(np.ones(2) / math.sqrt(2), EntryLaw.gaussian(), 1.0, 100000, seed=2)
    target = stats.norm.cdf(1) - stats.norm.cdf(-1)
    assert target == pytest.approx(0.6827, abs=1e-4)
    assert abs(e.value - target) <= e.hoeffding_radius


def test_mc_deterministic_in_seed():
    a = levy_mc([0.3, 0.5], SB1, 0.1, 5000, seed=4)
    b = levy_mc([0.3, 0.5], SB1, 0.1, 5000, seed=4)
    assert a == b


def test_tensorization_arithmetic():
    assert tensorization_bound([(1, 0)], 1) == pytest.approx(math.e)
    assert tensorization_bound([(1, 0), (1, 0)], 0.5) == pytest.approx(math.e**2 / 4)
    assert tensorization_bound([(0, 1)] * 3, 0.7) == pytest.approx(math.e**3)


def test_rogozin_arithmetic():
    assert rogozin_bound([(1, 0.5)] * 2, 1) == pytest.approx(0.5)
    assert rogozin_bound([(1, 1.0)] * 3, 1) == math.inf
    # each term contributes 0.5 / 0.25 = 2
    assert rogozin_bound([(1, 0.5)] * 8, 1) == pytest.approx(0.25)
    assert rogozin_bound([(1, 0.5)] * 4, 2) == pytest.approx(2 / math.sqrt(8))
    with pytest.raises(PreconditionError):
        rogozin_bound([(2, 0.5)], 1)


def test_mrlcd_bound_arithmetic():
    n, D = 16, 7.0
    assert mrlcd_anticonc_bound(0, n, n, 1 / n, 1, D) == pytest.approx(1 / math.sqrt(n) / D)
    assert mrlcd_anticonc_bound(0, n, n, 1 / n, 1, math.inf) == 0.0
    assert mrlcd_anticonc_bound(0.1, 32, 64, 1 / 16, 2, 10) == pytest.approx(0.35355, abs=1e-5)
    assert mrlcd_anticonc_bound(5, 32, 64, 1 / 16, 2, 10, clamp=True) == 1.0


def test_esseen_anchors():
    one = esseen_levy_bound([1.0], R, 1.0)
    quad, _ = integrate.quad(lambda t: abs(math.cos(t)), -2, 2, points=[-math.pi / 2, math.pi / 2])
    assert one == pytest.approx(quad, rel=1e-9)
    assert one >= 1.0
    assert esseen_levy_bound([1, 1, 1, 1], R, 1.0) >= 0.625
    assert esseen_levy_bound([0, 0], R, 1.0) == 4.0


def test_esseen_dominates_exact_on_seeded_family():
    worst = 0.0
    for s in range(60):
        rng = make_rng(derive_seed(77, s))
        law = R if s % 2 == 0 else EntryLaw.signed_bernoulli(rng.uniform(0.02, 0.14))
        w = rng.standard_normal(rng.integers(1, 9))
        r = rng.uniform(0.05, 2.0)
        exact = levy_exact(weighted_sum_atoms(w, law), r).value
        worst = max(worst, exact / esseen_levy_bound(w, law, r))
    assert worst <= 1.0


def test_affine_majorant_dominates():
    rng = make_rng(6)
    for _ in range(20):
        d = weighted_sum_atoms(rng.uniform(0.1, 2, rng.integers(1, 4)), R)
        for eps in rng.uniform(0, 3, 5):
            a, b = levy_affine_majorant(d, eps)
            assert a >= 0 and b >= 0
            assert a * eps + b >= levy_exact(d, eps).value - 1e-12
            for s in np.linspace(0, 5, 101):
                assert a * s + b >= levy_exact(d, s).value - 1e-12


def test_atom_distribution_validation_and_csv():
    with pytest.raises(ParameterError):
        AtomDistribution([1.0, 0.0], [0.5, 0.5])
    with pytest.raises(ParameterError):
        AtomDistribution([0.0, 1.0], [0.5, 0.4])
    d = merge_atoms([0.3, 0.1, 0.3 + 1e-12], [0.25, 0.5, 0.25])
    assert len(d) == 2
    assert d.prob_at(0.3) == pytest.approx(0.5)
    back = AtomDistribution.from_csv(d.to_csv())
    assert np.array_equal(back.values, d.values) and np.array_equal(back.probs, d.probs)


def test_hoeffding_radius_formula():
    assert hoeffding_radius(10**5) == pytest.approx(math.sqrt(math.log(2 / 0.01) / (2 * 10**5)))
