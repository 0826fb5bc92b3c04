import numpy as np
import pytest

from nonspecific.core import EvidenceStore, discount
from nonspecific.errors import InputError, NoMembershipError, RepartitionError
from nonspecific.discounting import (
    CredibilityVector,
    discount_store,
    falsity_discount,
    subset_credibilities,
    subset_discount,
)
from nonspecific.metaconflict import minimize
from nonspecific.specifier import MULTI_MEMBER, SINGLETON_INCREASE, MembershipSpecification, specify_all


@pytest.fixture(scope="module")
def specs(bakers, bakers_partition):
    return {s.q: s for s in specify_all(bakers_partition, bakers.prior, bakers.evidences)}


def spec_of(pls, bel_home=0.0, home=1, case=MULTI_MEMBER):
    per = {j: (0.0, p) for j, p in enumerate(pls, start=1)}
    per[home] = (bel_home, per[home][1])
    return MembershipSpecification("q", home, case, per, 0.0)


@pytest.mark.parametrize("q, mass, expected", [("e2", 0.5354, "bi"), ("e3", 0.4639, "ro")])
def test_falsity_discount_bakers(ev, specs, q, mass, expected):
    d, alpha = falsity_discount(ev[q], specs[q])
    assert alpha == pytest.approx(1 - specs[q].falsity)
    (prop, m), = d.bpa.focal.items()
    assert expected in prop.action
    assert m == pytest.approx(mass, abs=5e-4)
    assert d.bpa.theta_mass == pytest.approx(1 - m)


def test_falsity_discount_identity(ev, specs):
    d, alpha = falsity_discount(ev["e1"], specs["e1"])
    assert alpha == 1.0 and d == ev["e1"]
    with pytest.raises(InputError):
        falsity_discount(ev["e1"], specs["e2"])


@pytest.mark.parametrize("q, a1, a2", [
    ("e1", 0.0981, 0.7321),
    ("e4", 0.3870, 0.5420),
])
def test_credibilities_bakers(specs, q, a1, a2):
    cv = subset_credibilities(specs[q])
    assert cv.alpha[1] == pytest.approx(a1, abs=5e-4)
    assert cv.alpha[2] == pytest.approx(a2, abs=5e-4)
    assert cv.alpha[3] == 0.0


def test_subset_discount_bakers(ev, specs):
    cv = subset_credibilities(specs["e1"])
    (_, m), = subset_discount(ev["e1"], cv, 2).bpa.focal.items()
    assert m == pytest.approx(0.5856, abs=5e-4)
    e2, _ = falsity_discount(ev["e2"], specs["e2"])
    (_, m), = subset_discount(e2, subset_credibilities(specs["e2"]), 1).bpa.focal.items()
    assert m == pytest.approx(0.2308, abs=5e-4)


def test_subset_discount_edges(ev):
    cv = CredibilityVector("e1", {1: 0.0, 2: 1.0})
    assert len(subset_discount(ev["e1"], cv, 1).bpa.focal) == 0
    assert subset_discount(ev["e1"], cv, 2) == ev["e1"]
    with pytest.raises(KeyError):
        subset_discount(ev["e1"], cv, 3)
    with pytest.raises(InputError):
        subset_discount(ev["e2"], cv, 1)


def test_zero_plausibility_everywhere():
    with pytest.raises(NoMembershipError):
        subset_credibilities(spec_of([0.0, 0.0]))


def test_credibility_axioms_on_random_specs():
    rng = np.random.default_rng(17)
    for _ in range(1000):
        n = int(rng.integers(1, 6))
        pls = rng.uniform(0, 1, n)
        pls[rng.random(n) < 0.2] = 0.0
        home = int(rng.integers(1, n + 1))
        pls[home - 1] = max(pls[home - 1], 0.01)
        bel = float(rng.uniform(0, pls[home - 1])) if rng.random() < 0.3 else 0.0
        spec = spec_of(pls.tolist(), bel, home, SINGLETON_INCREASE if bel else MULTI_MEMBER)
        alpha = subset_credibilities(spec).alpha
        for j in range(1, n + 1):
            assert 0.0 <= alpha[j] <= 1.0
            if pls[j - 1] == 0.0:
                assert alpha[j] == (bel if j == home else 0.0)
        assert alpha[home] >= bel

        # a single possible subset with plausibility a: credibility a
        a = float(rng.uniform(0.01, 1))
        only = [0.0] * n
        only[home - 1] = a
        assert subset_credibilities(spec_of(only, 0.0, home)).alpha[home] == pytest.approx(a, abs=1e-12)
        only[home - 1] = 1.0
        assert subset_credibilities(spec_of(only, 0.0, home)).alpha[home] == 1.0

        # n fully plausible subsets: 1/n each
        even = subset_credibilities(spec_of([1.0] * n, 0.0, home)).alpha
        assert all(v == pytest.approx(1 / n, abs=1e-12) for v in even.values())


def test_double_discount_multiplies(ev):
    rng = np.random.default_rng(23)
    for _ in range(100):
        a1, a2 = rng.random(2)
        for e in ev.values():
            twice = discount(discount(e.bpa, a1), a2)
            assert twice.isclose(discount(e.bpa, a1 * a2), 1e-9)


def test_discount_store_locks_repartition(bakers, specs):
    store = EvidenceStore(bakers.evidences)
    alphas = discount_store(store, specs.values())
    assert store.discounted
    assert alphas["e2"] == pytest.approx(0.7648, abs=5e-4)
    assert alphas["e3"] == pytest.approx(0.7732, abs=5e-4)
    assert [e.id for e in store] == ["e1", "e2", "e3", "e4"]
    with pytest.raises(RepartitionError):
        minimize(store, bakers.prior)


def test_discount_store_requires_every_spec(bakers, specs):
    store = EvidenceStore(bakers.evidences)
    with pytest.raises(InputError):
        discount_store(store, [specs["e1"]])
    assert not store.discounted
