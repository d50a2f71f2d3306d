import numpy as np
import pytest
from hypothesis import given, strategies as st

from _builders import random_family, random_povm
from povmlab.errors import DimensionMismatch, NotContinuous, SpaceMismatch, UnknownAtom
from povmlab.operators import psd_sqrt
from povmlab.povm import POVM
from povmlab.sampling import random_masses
from povmlab.sequential import (
    DisjointUnionSpace,
    IndexedPOVMFamily,
    evaluate_composite,
    pair_label,
    sequential_compose,
    split_pair_label,
)
from povmlab.spaces import FiniteMeasurableSpace, FiniteMeasure

seeds = st.integers(0, 2**32 - 1)
labels = st.text(alphabet="ab/c", max_size=4)


@given(labels, labels.filter(lambda y: not y.startswith("/")))
def test_pair_label_round_trip(x, y):
    assert split_pair_label(pair_label(x, y)) == (x, y)


def test_pair_label_escaping():
    assert pair_label("a/b", "c") == "a//b/c"
    assert pair_label("a", "b/c") != pair_label("a/b", "c")
    assert split_pair_label(pair_label("a/", "b")) == ("a/", "b")
    with pytest.raises(ValueError):
        pair_label("a", "/b")


def test_family_checks(rng):
    X = FiniteMeasurableSpace.of_size(2)
    with pytest.raises(SpaceMismatch):
        IndexedPOVMFamily(X, (random_povm(rng, 2, 2),))
    with pytest.raises(DimensionMismatch):
        IndexedPOVMFamily(X, (random_povm(rng, 2, 2), random_povm(rng, 3, 2)))


def test_union_space_labels(rng):
    X = FiniteMeasurableSpace(("p", "q"))
    fam = IndexedPOVMFamily(X, (random_povm(rng, 2, 1, "y"), random_povm(rng, 2, 2, "y")))
    U = DisjointUnionSpace(fam)
    assert U.atoms == ("p/y0", "q/y0", "q/y1")
    assert U.union(["q"]) == ("q/y0", "q/y1")
    assert U.union(["p", "q"], {"q": ["y1"]}) == ("p/y0", "q/y1")
    with pytest.raises(UnknownAtom):
        U.pair_index("p", "y1")


class TestCompose:
    def test_trivial_first_stage(self, rng):
        A = POVM.from_effects(("*",), [np.eye(3)])
        B = random_povm(rng, 3, 4, "y")
        AB = sequential_compose(A, FiniteMeasure(A.space, [1.0]), IndexedPOVMFamily.constant(A.space, B))
        assert np.abs(AB.effects - B.effects).max() <= 1e-12

    def test_explicit_formula(self, rng):
        A = random_povm(rng, 2, 3)
        mu = FiniteMeasure(A.space, random_masses(rng, 3))
        fam = random_family(rng, A.space, 2)
        AB = sequential_compose(A, mu, fam)
        for (x, y), E in zip(AB.space.pairs, AB.effects):
            i = A.space.index(x)
            root = psd_sqrt(A.effects[i] / mu.mass[i])
            expected = mu.mass[i] * root @ fam[x].effect(y) @ root
            assert np.abs(E - expected).max() <= 1e-12

    def test_null_index_atom(self, rng):
        A = POVM.from_effects(("a", "b"), [np.eye(2), np.zeros((2, 2))])
        mu = FiniteMeasure(A.space, [1.0, 0.0])
        AB = sequential_compose(A, mu, random_family(rng, A.space, 2))
        zero_block = [E for (x, _), E in zip(AB.space.pairs, AB.effects) if x == "b"]
        assert all(np.array_equal(E, np.zeros((2, 2))) for E in zero_block)

    def test_not_continuous(self, rng):
        A = random_povm(rng, 2, 2)
        with pytest.raises(NotContinuous):
            sequential_compose(A, FiniteMeasure(A.space, [1.0, 0.0]), random_family(rng, A.space, 2))

    def test_dimension(self, rng):
        A = random_povm(rng, 2, 2)
        with pytest.raises(DimensionMismatch):
            sequential_compose(A, FiniteMeasure.counting(A.space), random_family(rng, A.space, 3))

    def test_evaluate_edges(self, rng):
        A = random_povm(rng, 2, 3)
        AB = sequential_compose(A, FiniteMeasure.counting(A.space), random_family(rng, A.space, 2))
        assert np.abs(evaluate_composite(AB, A.space.atoms) - np.eye(2)).max() <= 1e-10
        assert np.array_equal(evaluate_composite(AB, []), np.zeros((2, 2)))
        with pytest.raises(UnknownAtom):
            evaluate_composite(AB, ["nowhere"])
        with pytest.raises(UnknownAtom):
            evaluate_composite(AB, ["x0"], {"x0": ["nowhere"]})

    @given(seeds)
    def test_laws(self, seed):
        rng = np.random.default_rng(seed)
        d, n = int(rng.integers(1, 5)), int(rng.integers(1, 6))
        A = random_povm(rng, d, n)
        mu = FiniteMeasure(A.space, random_masses(rng, n))
        fam = random_family(rng, A.space, d)
        AB = sequential_compose(A, mu, fam)

        # effect bounds
        w = np.linalg.eigvalsh(AB.effects)
        assert w.min() >= -1e-10 and w.max() <= 1 + 1e-10
        # unit and marginal
        assert np.abs(evaluate_composite(AB, A.space.atoms) - np.eye(d)).max() <= 1e-10
        assert np.abs(AB.marginal() - A.effects).max() <= 1e-10
        # additivity over disjoint pieces
        M = list(A.space.atoms)
        N1, N2 = {}, {}
        for x in M:
            ys = fam[x].space.atoms
            pick = rng.uniform(size=len(ys)) < 0.5
            N1[x] = [y for y, p in zip(ys, pick) if p]
            N2[x] = [y for y, p in zip(ys, pick) if not p]
        whole = evaluate_composite(AB, M)
        parts = evaluate_composite(AB, M, N1) + evaluate_composite(AB, M, N2)
        assert np.abs(whole - parts).max() <= 1e-12
