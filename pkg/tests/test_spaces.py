import numpy as np
import pytest
from hypothesis import given, strategies as st

from povmlab.errors import NotADistribution, NotAMorphism, SpaceMismatch, UnknownAtom
from povmlab.spaces import (
    AtomMap,
    BoundedFunction,
    Distribution,
    FiniteMeasurableSpace,
    FiniteMeasure,
    IntegrableFunction,
    KleisliMap,
    MeasureMorphism,
    check_measure_morphism,
    integrate,
    kleisli_extension,
    l1_action,
    linfty_action,
    pushforward_measure,
)

XY = FiniteMeasurableSpace(("a", "b"))
ONE = FiniteMeasurableSpace(("y",))


class TestSpace:
    def test_duplicates_rejected(self):
        with pytest.raises(ValueError):
            FiniteMeasurableSpace(("a", "a"))

    def test_index_unknown(self):
        with pytest.raises(UnknownAtom):
            XY.index("z")

    def test_subsets(self):
        subs = list(FiniteMeasurableSpace.of_size(3).subsets())
        assert len(subs) == 8
        assert len(set(map(frozenset, subs))) == 8


class TestMeasure:
    def test_call(self):
        mu = FiniteMeasure(XY, [0.5, 0.5])
        assert mu(["a"]) == 0.5 and mu(["a", "b"]) == 1.0 and mu([]) == 0.0

    def test_null_atoms(self):
        mu = FiniteMeasure.from_mapping(XY, {"a": 2.0})
        assert mu.null_atoms == ("b",)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            FiniteMeasure(XY, [1.0, -0.1])

    def test_shape(self):
        with pytest.raises(SpaceMismatch):
            FiniteMeasure(XY, [1.0])


class TestFunctions:
    def test_integrate(self):
        mu = FiniteMeasure(XY, [0.5, 0.5])
        f = BoundedFunction(XY, [1, 3])
        assert integrate(f, mu) == pytest.approx(2.0)
        assert integrate(f, mu, ["b"]) == pytest.approx(1.5)

    def test_null_atom_quotient(self):
        mu = FiniteMeasure(XY, [1.0, 0.0])
        f, g = BoundedFunction(XY, [1, 5], mu), BoundedFunction(XY, [1, -7], mu)
        assert f == g
        assert f("b") == 0

    def test_without_measure_compares_everywhere(self):
        assert BoundedFunction(XY, [1, 5]) != BoundedFunction(XY, [1, 6])

    def test_immutable(self):
        f = BoundedFunction(XY, [1, 2])
        with pytest.raises(AttributeError):
            f.values = np.zeros(2)
        with pytest.raises(ValueError):
            f.values[0] = 3


class TestDistribution:
    def test_point_mass(self):
        d = Distribution.point_mass(XY, "b")
        assert d.as_dict() == {"a": 0.0, "b": 1.0}

    def test_rejects_unnormalized(self):
        with pytest.raises(NotADistribution):
            Distribution(XY, [0.5, 0.6])
        with pytest.raises(NotADistribution):
            Distribution(XY, [1.5, -0.5])

    def test_kleisli_extension(self):
        Y = FiniteMeasurableSpace(("p", "q", "r"))
        f = KleisliMap(XY, Y, [[0.5, 0.5, 0.0], [0.0, 0.0, 1.0]])
        out = kleisli_extension(f, Distribution(XY, [0.5, 0.5]))
        assert np.allclose(out.prob, [0.25, 0.25, 0.5])

    def test_kleisli_identity(self):
        d = Distribution(XY, [0.3, 0.7])
        assert kleisli_extension(KleisliMap.identity(XY), d).allclose(d, 0)

    def test_kleisli_rows_checked(self):
        with pytest.raises(NotADistribution):
            KleisliMap(XY, XY, [[1.0, 0.0], [0.5, 0.4]])

    def test_pullback(self):
        f = KleisliMap(XY, XY, [[0.25, 0.75], [1.0, 0.0]])
        q = BoundedFunction(XY, [1.0, 0.0])
        assert np.allclose(f.pullback(q).values, [0.25, 1.0])

    def test_deterministic(self):
        f = AtomMap.from_mapping(XY, ONE, {"a": "y", "b": "y"})
        assert np.allclose(KleisliMap.deterministic(f).kernel, [[1.0], [1.0]])


class TestMorphisms:
    def test_pushforward(self):
        f = AtomMap.from_mapping(XY, ONE, {"a": "y", "b": "y"})
        mu = FiniteMeasure(XY, [0.5, 0.25])
        assert np.allclose(pushforward_measure(f, mu).mass, [0.75])

    def test_preimage(self):
        Y = FiniteMeasurableSpace(("p", "q"))
        f = AtomMap.from_mapping(XY, Y, {"a": "q", "b": "q"})
        assert f.preimage(["q"]) == ("a", "b")
        assert f.preimage(["p"]) == ()

    def test_partial_map_rejected(self):
        with pytest.raises(SpaceMismatch):
            AtomMap.from_mapping(XY, ONE, {"a": "y"})

    def test_null_preimage_rule(self):
        f = AtomMap.from_mapping(XY, XY, {"a": "a", "b": "b"})
        mu = FiniteMeasure(XY, [1.0, 1.0])
        nu = FiniteMeasure(XY, [1.0, 0.0])
        assert not check_measure_morphism(f, mu, nu)
        assert check_measure_morphism(f, FiniteMeasure(XY, [1.0, 0.0]), nu)
        with pytest.raises(NotAMorphism):
            MeasureMorphism(f, mu, nu)

    def test_l1_collapse(self):
        mu = FiniteMeasure(XY, [0.5, 0.5])
        f = MeasureMorphism(AtomMap.from_mapping(XY, ONE, {"a": "y", "b": "y"}), mu, FiniteMeasure(ONE, [1.0]))
        out = l1_action(f, IntegrableFunction(XY, [2.0, 4.0], mu))
        # (2·½ + 4·½) / 1
        assert out("y") == pytest.approx(3.0)

    def test_linfty_composition(self):
        mu = FiniteMeasure(XY, [0.5, 0.5])
        f = MeasureMorphism(AtomMap.from_mapping(XY, ONE, {"a": "y", "b": "y"}), mu, FiniteMeasure(ONE, [1.0]))
        out = linfty_action(f, BoundedFunction(ONE, [7.0]))
        assert np.allclose(out.values, [7.0, 7.0])


@st.composite
def morphisms(draw):
    """Random measure morphism; some ν atoms are null with null preimages."""
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    nx, ny = draw(st.integers(1, 6)), draw(st.integers(1, 5))
    X, Y = FiniteMeasurableSpace.of_size(nx, "x"), FiniteMeasurableSpace.of_size(ny, "y")
    targets = rng.integers(0, ny, nx)
    nu = rng.uniform(0.1, 2.0, ny)
    nu[rng.uniform(size=ny) < 0.3] = 0.0
    mu = rng.uniform(0.1, 2.0, nx)
    mu[nu[targets] == 0] = 0.0
    f = MeasureMorphism(AtomMap(X, Y, tuple(targets)), FiniteMeasure(X, mu), FiniteMeasure(Y, nu))
    return f, rng


@given(morphisms())
def test_l1_defining_equation(data):
    f, rng = data
    phi = IntegrableFunction(f.map.domain, rng.normal(size=len(f.map.domain)), f.source)
    pushed = l1_action(f, phi)
    # on ν-positive sets the density reproduces the preimage integrals
    for N in f.map.codomain.subsets():
        lhs = integrate(pushed, f.target, N)
        rhs = integrate(phi, f.source, f.map.preimage(N))
        assert abs(lhs - rhs) <= 1e-12 * (1 + abs(rhs))


@given(morphisms())
def test_pairing_adjunction(data):
    f, rng = data
    phi = BoundedFunction(f.map.codomain, rng.normal(size=len(f.map.codomain)), f.target)
    psi = IntegrableFunction(f.map.domain, rng.normal(size=len(f.map.domain)), f.source)
    lhs = np.dot(linfty_action(f, phi).values * psi.values, f.source.mass)
    rhs = np.dot(phi.values * l1_action(f, psi).values, f.target.mass)
    assert abs(lhs - rhs) <= 1e-12 * (1 + abs(lhs))


@given(st.integers(0, 2**32 - 1))
def test_kleisli_associative(seed):
    rng = np.random.default_rng(seed)
    S = [FiniteMeasurableSpace.of_size(n) for n in rng.integers(1, 5, 3)]
    f = KleisliMap(S[0], S[1], rng.dirichlet(np.ones(len(S[1])), len(S[0])))
    g = KleisliMap(S[1], S[2], rng.dirichlet(np.ones(len(S[2])), len(S[1])))
    d = Distribution(S[0], rng.dirichlet(np.ones(len(S[0]))))
    fg = KleisliMap(S[0], S[2], f.kernel @ g.kernel)
    assert kleisli_extension(g, kleisli_extension(f, d)).allclose(kleisli_extension(fg, d), 1e-12)


@given(st.integers(0, 2**32 - 1))
def test_canonicalization_idempotent(seed):
    rng = np.random.default_rng(seed)
    mass = rng.uniform(size=4) * (rng.uniform(size=4) < 0.6)
    mu = FiniteMeasure(FiniteMeasurableSpace.of_size(4), mass)
    f = BoundedFunction(mu.space, rng.normal(size=4), mu)
    g = BoundedFunction(mu.space, f.values, mu)
    assert np.array_equal(f.values, g.values)
    assert np.all(f.values[mass == 0] == 0)
