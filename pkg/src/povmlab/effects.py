"""Effect algebras and effect modules as checkable structures.

Three carriers ship with the package:

* :class:`UnitInterval`: real numbers in ``[0, 1]`` with partial addition;
* :class:`HilbertEffects`: operators ``0 <= A <= id`` on ``C^d``;
* :class:`FiniteBoolean`: subsets of a finite atom set, with disjoint union.

The partial sum returns ``None`` when undefined; this is a normal outcome,
not an error.  The ``check_*`` functions sample elements from a seeded
generator and report every law that failed, so a deliberately broken
instance can be detected.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from numbers import Real
from typing import Any, Callable, Iterable

import numpy as np

from .errors import CarrierMismatch, ScalarOutOfRange
from .operators import hermitian_part, operator_norm
from .sampling import random_effect, random_effect_split, rng_from
from .tolerance import Tolerance, resolve

Element = Any


class EffectAlgebra:
    """Base class; subclasses supply the carrier-specific operations."""

    name = "effect-algebra"

    def __init__(self, tol: Tolerance | None = None):
        self.tol = resolve(tol)

    # carrier-specific -------------------------------------------------
    @property
    def zero(self) -> Element:
        raise NotImplementedError

    def contains(self, x: Element) -> bool:
        raise NotImplementedError

    def _oplus(self, x: Element, y: Element) -> Element | None:
        raise NotImplementedError

    def _orthocomplement(self, x: Element) -> Element:
        raise NotImplementedError

    def _leq(self, x: Element, y: Element) -> bool:
        raise NotImplementedError

    def _eq(self, x: Element, y: Element) -> bool:
        raise NotImplementedError

    def random_element(self, rng: np.random.Generator) -> Element:
        raise NotImplementedError

    def random_split(self, rng: np.random.Generator, parts: int) -> list[Element]:
        """``parts`` elements whose iterated sum is defined."""
        raise NotImplementedError

    # public, carrier-checked ------------------------------------------
    @property
    def one(self) -> Element:
        return self._orthocomplement(self.zero)

    def require(self, *xs: Element) -> None:
        for x in xs:
            if not self.contains(x):
                raise CarrierMismatch(f"{x!r} is not an element of {self.name}")

    def oplus(self, x: Element, y: Element) -> Element | None:
        self.require(x, y)
        return self._oplus(x, y)

    def orthocomplement(self, x: Element) -> Element:
        self.require(x)
        return self._orthocomplement(x)

    def leq(self, x: Element, y: Element) -> bool:
        self.require(x, y)
        return self._leq(x, y)

    def eq(self, x: Element, y: Element) -> bool:
        self.require(x, y)
        return self._eq(x, y)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name})"


class EffectModule(EffectAlgebra):
    def _scalar_mul(self, r: float, x: Element) -> Element:
        raise NotImplementedError

    def scalar_mul(self, r: float, x: Element) -> Element:
        if not (0.0 <= r <= 1.0):
            raise ScalarOutOfRange(f"scalar {r!r} outside [0, 1]")
        self.require(x)
        return self._scalar_mul(r, x)


class UnitInterval(EffectModule):
    name = "[0,1]"

    @property
    def zero(self) -> float:
        return 0.0

    def contains(self, x) -> bool:
        if isinstance(x, (bool, np.bool_)) or not isinstance(x, Real):
            return False
        return -self.tol.psd <= float(x) <= 1 + self.tol.psd

    def _oplus(self, x, y):
        s = float(x) + float(y)
        if s > 1 + self.tol.psd:
            return None
        return min(s, 1.0)

    def _orthocomplement(self, x):
        return 1.0 - float(x)

    def _leq(self, x, y):
        return float(x) <= float(y) + self.tol.psd

    def _eq(self, x, y):
        return abs(float(x) - float(y)) <= self.tol.recon

    def _scalar_mul(self, r, x):
        return r * float(x)

    def random_element(self, rng):
        return float(rng.uniform())

    def random_split(self, rng, parts):
        return [float(v) for v in rng.dirichlet(np.ones(parts)) * rng.uniform()]


class HilbertEffects(EffectModule):
    """Effects on ``C^d``; the order and partial sum are checked spectrally."""

    def __init__(self, dim: int, tol: Tolerance | None = None):
        super().__init__(tol)
        if dim < 1:
            raise ValueError("dimension must be positive")
        self.dim = dim
        self.name = f"Ef(C^{dim})"

    @property
    def zero(self):
        return np.zeros((self.dim, self.dim), dtype=complex)

    def contains(self, x) -> bool:
        if not isinstance(x, np.ndarray) or x.shape != (self.dim, self.dim):
            return False
        if operator_norm(x - x.conj().T) > self.tol.herm:
            return False
        w = np.linalg.eigvalsh(hermitian_part(x))
        return w[0] >= -self.tol.psd and w[-1] <= 1 + self.tol.psd

    def _oplus(self, x, y):
        s = x + y
        if np.linalg.eigvalsh(hermitian_part(s))[-1] > 1 + self.tol.psd:
            return None
        return s

    def _orthocomplement(self, x):
        return np.eye(self.dim) - x

    def _leq(self, x, y):
        return np.linalg.eigvalsh(hermitian_part(y - x))[0] >= -self.tol.psd

    def _eq(self, x, y):
        return operator_norm(x - y) <= self.tol.recon

    def _scalar_mul(self, r, x):
        return r * x

    def random_element(self, rng):
        return random_effect(rng, self.dim)

    def random_split(self, rng, parts):
        return random_effect_split(rng, self.dim, parts)


class FiniteBoolean(EffectAlgebra):
    """Power set of a finite atom set; ``x ⊕ y`` is the union of disjoint sets."""

    def __init__(self, atoms: Iterable[str], tol: Tolerance | None = None):
        super().__init__(tol)
        self.atoms = frozenset(atoms)
        self._order = sorted(self.atoms)
        self.name = f"Bool({len(self.atoms)} atoms)"

    @property
    def zero(self):
        return frozenset()

    def contains(self, x) -> bool:
        return isinstance(x, frozenset) and x <= self.atoms

    def _oplus(self, x, y):
        return None if x & y else x | y

    def _orthocomplement(self, x):
        return self.atoms - x

    def _leq(self, x, y):
        return x <= y

    def _eq(self, x, y):
        return x == y

    def random_element(self, rng):
        return frozenset(a for a in self._order if rng.uniform() < 0.5)

    def random_split(self, rng, parts):
        blocks: list[set] = [set() for _ in range(parts)]
        for a in self._order:
            k = int(rng.integers(0, parts + 1))
            if k < parts:
                blocks[k].add(a)
        return [frozenset(b) for b in blocks]


@dataclass(frozen=True)
class Violation:
    law: str
    detail: str


@dataclass
class AxiomReport:
    structure: str
    samples: int
    seed: int | None
    violations: list[Violation] = field(default_factory=list)
    counts: dict[str, int] = field(default_factory=dict)

    max_recorded = 25

    @property
    def ok(self) -> bool:
        return not self.counts

    def fail(self, law: str, detail: str) -> None:
        self.counts[law] = self.counts.get(law, 0) + 1
        if len(self.violations) < self.max_recorded:
            self.violations.append(Violation(law, detail))

    def to_dict(self) -> dict:
        return {
            "structure": self.structure,
            "samples": self.samples,
            "seed": self.seed,
            "ok": self.ok,
            "violation_counts": dict(self.counts),
            "violations": [{"law": v.law, "detail": v.detail} for v in self.violations],
        }


def _short(x) -> str:
    if isinstance(x, np.ndarray):
        return np.array2string(x, precision=3, suppress_small=True).replace("\n", "")
    if isinstance(x, frozenset):
        return "{" + ",".join(sorted(x)) + "}"
    return repr(x)


def check_effect_algebra_axioms(ea: EffectAlgebra, sample_count: int = 1000, seed=0) -> AxiomReport:
    """Sample elements and test the effect-algebra laws.

    Associativity uses the usual reading: if ``x ⊕ y`` and ``(x ⊕ y) ⊕ z``
    are defined then so are ``y ⊕ z`` and ``x ⊕ (y ⊕ z)``, and the two
    results agree.
    """
    rng = rng_from(seed)
    report = AxiomReport(ea.name, sample_count, seed if isinstance(seed, int) else None)
    zero, one = ea.zero, ea.one

    def associativity(x, y, z):
        xy = ea._oplus(x, y)
        if xy is None:
            return
        left = ea._oplus(xy, z)
        if left is None:
            return
        yz = ea._oplus(y, z)
        right = None if yz is None else ea._oplus(x, yz)
        if right is None:
            report.fail("associativity", f"(x⊕y)⊕z defined but x⊕(y⊕z) not: x={_short(x)}, y={_short(y)}, z={_short(z)}")
        elif not ea._eq(left, right):
            report.fail("associativity", f"(x⊕y)⊕z ≠ x⊕(y⊕z) for x={_short(x)}")

    for _ in range(sample_count):
        x, y = ea.random_element(rng), ea.random_element(rng)

        a, b = ea._oplus(x, y), ea._oplus(y, x)
        if (a is None) != (b is None):
            report.fail("commutativity", f"definedness differs for x={_short(x)}, y={_short(y)}")
        elif a is not None and not ea._eq(a, b):
            report.fail("commutativity", f"x⊕y ≠ y⊕x for x={_short(x)}, y={_short(y)}")

        for s in (ea._oplus(x, zero), ea._oplus(zero, x)):
            if s is None or not ea._eq(s, x):
                report.fail("zero-unit", f"x⊕0 ≠ x for x={_short(x)}")
                break

        xc = ea._orthocomplement(x)
        if not ea.contains(xc):
            report.fail("complement", f"x⊥ left the carrier for x={_short(x)}")
        else:
            s = ea._oplus(x, xc)
            if s is None or not ea._eq(s, one):
                report.fail("complement", f"x⊕x⊥ ≠ 1 for x={_short(x)}")
        if a is not None and ea._eq(a, one) and not ea._eq(y, xc):
            report.fail("complement-uniqueness", f"x⊕y = 1 but y ≠ x⊥ for x={_short(x)}")

        if ea._oplus(x, one) is not None and not ea._eq(x, zero):
            report.fail("zero-one", f"x⊕1 defined for nonzero x={_short(x)}")

        associativity(*ea.random_split(rng, 3))
        associativity(x, y, ea.random_element(rng))

    if ea._oplus(zero, one) is None:
        report.fail("zero-one", "0⊕1 undefined")
    return report


def check_module_axioms(em: EffectModule, sample_count: int = 1000, seed=0) -> AxiomReport:
    rng = rng_from(seed)
    report = AxiomReport(em.name, sample_count, seed if isinstance(seed, int) else None)
    for _ in range(sample_count):
        x = em.random_element(rng)
        r, s = float(rng.uniform()), float(rng.uniform())

        if not em._eq(em._scalar_mul(r, em._scalar_mul(s, x)), em._scalar_mul(r * s, x)):
            report.fail("associativity", f"r·(s·x) ≠ (rs)·x for r={r:.3f}, s={s:.3f}")

        s = s * (1 - r)
        split = em._oplus(em._scalar_mul(r, x), em._scalar_mul(s, x))
        if split is None or not em._eq(em._scalar_mul(r + s, x), split):
            report.fail("distributivity-scalars", f"(r+s)·x ≠ r·x ⊕ s·x for r={r:.3f}, s={s:.3f}")

        y, z = em.random_split(rng, 2)
        yz = em._oplus(y, z)
        if yz is not None:
            right = em._oplus(em._scalar_mul(r, y), em._scalar_mul(r, z))
            if right is None or not em._eq(em._scalar_mul(r, yz), right):
                report.fail("distributivity-elements", f"r·(x⊕y) ≠ r·x ⊕ r·y for r={r:.3f}")

        if not em._eq(em._scalar_mul(1.0, x), x):
            report.fail("unit", f"1·x ≠ x for x={_short(x)}")
    return report


def check_morphism(
    f: Callable[[Element], Element],
    src: EffectAlgebra,
    dst: EffectAlgebra,
    sample_count: int = 1000,
    seed=0,
    module_mode: bool = False,
) -> AxiomReport:
    """Test that ``f`` preserves 0, orthocomplement and defined sums.

    With ``module_mode`` both structures must be effect modules and scalar
    multiplication is checked as well.
    """
    if module_mode and not (isinstance(src, EffectModule) and isinstance(dst, EffectModule)):
        raise CarrierMismatch("module_mode needs effect modules on both sides")
    rng = rng_from(seed)
    report = AxiomReport(f"{src.name} -> {dst.name}", sample_count, seed if isinstance(seed, int) else None)

    def image(x):
        fx = f(x)
        if not dst.contains(fx):
            report.fail("codomain", f"f({_short(x)}) = {_short(fx)} is not in {dst.name}")
            return None
        return fx

    f0 = image(src.zero)
    if f0 is not None and not dst._eq(f0, dst.zero):
        report.fail("zero", f"f(0) = {_short(f0)}")

    for _ in range(sample_count):
        x = src.random_element(rng)
        fx, fxc = image(x), image(src._orthocomplement(x))
        if fx is None or fxc is None:
            continue
        if not dst._eq(fxc, dst._orthocomplement(fx)):
            report.fail("orthocomplement", f"f(x⊥) ≠ f(x)⊥ for x={_short(x)}")

        for a, b in (src.random_split(rng, 2), (x, src.random_element(rng))):
            ab = src._oplus(a, b)
            if ab is None:
                continue
            fa, fb, fab = image(a), image(b), image(ab)
            if fa is None or fb is None or fab is None:
                continue
            s = dst._oplus(fa, fb)
            if s is None:
                report.fail("additivity", f"f(x)⊕f(y) undefined for x={_short(a)}, y={_short(b)}")
            elif not dst._eq(s, fab):
                report.fail("additivity", f"f(x⊕y) ≠ f(x)⊕f(y) for x={_short(a)}, y={_short(b)}")

        if module_mode:
            r = float(rng.uniform())
            frx = image(src._scalar_mul(r, x))
            if frx is not None and not dst._eq(frx, dst._scalar_mul(r, fx)):
                report.fail("scalar", f"f(r·x) ≠ r·f(x) for r={r:.3f}")
    return report
