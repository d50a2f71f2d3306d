"""Random instance builders shared by the unit and acceptance tests."""

import numpy as np

from povmlab.duality import VnMap
from povmlab.effects import FiniteBoolean, HilbertEffects, UnitInterval
from povmlab.povm import POVM
from povmlab.sampling import random_isometry, random_masses, random_povm_effects, random_pvm_effects
from povmlab.sequential import IndexedPOVMFamily
from povmlab.spaces import AtomMap, FiniteMeasurableSpace, FiniteMeasure, KleisliMap, MeasureMorphism


def random_povm(rng, d, n, prefix="x"):
    return POVM(FiniteMeasurableSpace.of_size(n, prefix), random_povm_effects(rng, d, n))


def random_pvm(rng, d, n):
    return POVM(FiniteMeasurableSpace.of_size(n), random_pvm_effects(rng, d, n))


def commuting_quadruple(rng, dH=None, dK=None, nX=None, nY=None):
    """``(A, B, f, g)`` making both squares commute.

    ``B_y = g C_y g† + q_y (id - g g†)`` with ``C_y = Σ_x f(x)(y) A_x`` and a
    distribution ``q`` on ``Y``; then ``g† B_y g = C_y``.
    """
    dH = dH or int(rng.integers(1, 4))
    dK = dK or dH + int(rng.integers(0, 3))
    nX = nX or int(rng.integers(1, 5))
    nY = nY or int(rng.integers(2, 5))
    A = random_povm(rng, dH, nX, "x")
    Y = FiniteMeasurableSpace.of_size(nY, "y")
    f = KleisliMap(A.space, Y, rng.dirichlet(np.ones(nY), nX))
    g = random_isometry(rng, dH, dK)
    C = np.tensordot(f.kernel.T, A.effects, axes=1)
    q = rng.dirichlet(np.ones(nY))
    perp = np.eye(dK) - g @ g.conj().T
    B = POVM(Y, [g @ Cy @ g.conj().T + qy * perp for Cy, qy in zip(C, q)])
    return A, B, f, g


def perturb(B, eps=1e-2):
    """Move an ``eps`` share of ``B_{y1}`` into ``B_{y0}``; still a POVM."""
    E = np.array(B.effects)
    E[0] = E[0] + eps * E[1]
    E[1] = (1 - eps) * E[1]
    return POVM(B.space, E)


def random_vn_map(rng, d=None, n=None, null_fraction=0.0):
    d = d or int(rng.integers(1, 5))
    n = n or int(rng.integers(1, 6))
    space = FiniteMeasurableSpace.of_size(n)
    mass = random_masses(rng, n)
    null = rng.uniform(size=n) < null_fraction
    if null.all():
        null[0] = False
    mass[null] = 0.0
    effects = np.zeros((n, d, d), dtype=complex)
    effects[~null] = random_povm_effects(rng, d, int((~null).sum()))
    return VnMap(FiniteMeasure(space, mass), effects)


def random_measure_morphism(rng, mu, nY=None):
    """Map ``(X, μ) -> (Y, ν)``; ν is the pushforward of μ rescaled by random positive factors."""
    nY = nY or int(rng.integers(1, 5))
    Y = FiniteMeasurableSpace.of_size(nY, "y")
    f = AtomMap(mu.space, Y, tuple(rng.integers(0, nY, len(mu.space))))
    pushed = mu.mass @ f.matrix()
    nu = np.where(pushed > 0, pushed * rng.uniform(0.5, 2.0, nY), rng.choice([0.0, 1.0], nY))
    return MeasureMorphism(f, mu, FiniteMeasure(Y, nu))


def random_family(rng, index, d, max_outcomes=4, prefix="y"):
    povms = [random_povm(rng, d, int(rng.integers(1, max_outcomes + 1)), prefix) for _ in index.atoms]
    return IndexedPOVMFamily(index, tuple(povms))


# fault-injected structures; each breaks one law


class HalvingComplement(UnitInterval):
    name = "[0,1] with x -> 1 - x/2"

    def _orthocomplement(self, x):
        return 1.0 - float(x) / 2


class SquaredScalars(HilbertEffects):
    def _scalar_mul(self, r, x):
        return r * r * x


class OverlappingUnion(FiniteBoolean):
    def _oplus(self, x, y):
        return x | y


HALVING = HalvingComplement()
