"""Finite measurable spaces and what lives on them.

A space is an ordered tuple of distinct atom labels; its σ-algebra is the
full power set, and subsets are given as iterables of labels.  Functions
modulo null sets are stored by their canonical representative, which is
zero on every null atom.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import chain, combinations
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import NotADistribution, NotAMorphism, SpaceMismatch, UnknownAtom
from .tolerance import Tolerance, resolve


def _readonly(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class FiniteMeasurableSpace:
    atoms: tuple[str, ...]

    def __post_init__(self):
        atoms = tuple(self.atoms)
        if not atoms:
            raise ValueError("a space needs at least one atom")
        if any(not isinstance(a, str) or not a for a in atoms):
            raise ValueError("atom labels must be non-empty strings")
        if len(set(atoms)) != len(atoms):
            raise ValueError("atom labels must be distinct")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "_index", {a: i for i, a in enumerate(atoms)})

    @classmethod
    def of_size(cls, n: int, prefix: str = "x") -> "FiniteMeasurableSpace":
        return cls(tuple(f"{prefix}{i}" for i in range(n)))

    def __len__(self) -> int:
        return len(self.atoms)

    def __iter__(self):
        return iter(self.atoms)

    def __contains__(self, label) -> bool:
        return label in self._index

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise UnknownAtom(f"unknown atom {label!r}") from None

    def indices(self, subset: Iterable[str]) -> list[int]:
        return sorted({self.index(a) for a in subset})

    def mask(self, subset: Iterable[str]) -> np.ndarray:
        m = np.zeros(len(self), dtype=bool)
        m[self.indices(subset)] = True
        return m

    def subsets(self):
        """All subsets, as tuples of labels (2^n of them)."""
        return chain.from_iterable(combinations(self.atoms, k) for k in range(len(self) + 1))


def _same_space(a: FiniteMeasurableSpace, b: FiniteMeasurableSpace, what: str = "") -> None:
    if a != b:
        raise SpaceMismatch(f"spaces differ{': ' + what if what else ''}")


@dataclass(frozen=True, eq=False)
class FiniteMeasure:
    space: FiniteMeasurableSpace
    mass: np.ndarray

    def __post_init__(self):
        mass = np.asarray(self.mass, dtype=float)
        if mass.shape != (len(self.space),):
            raise SpaceMismatch(f"{mass.size} masses for {len(self.space)} atoms")
        if not np.all(np.isfinite(mass)) or np.any(mass < 0):
            raise ValueError("masses must be finite and nonnegative")
        object.__setattr__(self, "mass", _readonly(mass, float))

    @classmethod
    def from_mapping(cls, space: FiniteMeasurableSpace, mass: Mapping[str, float]) -> "FiniteMeasure":
        values = np.zeros(len(space))
        for label, m in mass.items():
            values[space.index(label)] = m
        return cls(space, values)

    @classmethod
    def counting(cls, space: FiniteMeasurableSpace) -> "FiniteMeasure":
        return cls(space, np.ones(len(space)))

    @classmethod
    def uniform(cls, space: FiniteMeasurableSpace, total: float = 1.0) -> "FiniteMeasure":
        return cls(space, np.full(len(space), total / len(space)))

    def __call__(self, subset: Iterable[str]) -> float:
        return float(self.mass[self.space.indices(subset)].sum())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FiniteMeasure)
            and self.space == other.space
            and np.array_equal(self.mass, other.mass)
        )

    __hash__ = None

    @property
    def total(self) -> float:
        return float(self.mass.sum())

    @property
    def positive(self) -> np.ndarray:
        return self.mass > 0

    @property
    def null_atoms(self) -> tuple[str, ...]:
        return tuple(a for a, m in zip(self.space.atoms, self.mass) if m == 0)


class _ClassFunction:
    """Complex function on atoms, modulo equality almost everywhere."""

    __slots__ = ("space", "measure", "values")

    def __init__(self, space: FiniteMeasurableSpace, values, measure: FiniteMeasure | None = None):
        if measure is not None:
            _same_space(space, measure.space, "function vs measure")
        vals = np.array(values, dtype=complex)
        if vals.shape != (len(space),):
            raise SpaceMismatch(f"{vals.size} values for {len(space)} atoms")
        if not np.all(np.isfinite(vals)):
            raise ValueError("function values must be finite")
        if measure is not None:
            vals[~measure.positive] = 0
        vals.setflags(write=False)
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "measure", measure)
        object.__setattr__(self, "values", vals)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    @classmethod
    def from_mapping(cls, space, values: Mapping[str, complex], measure=None):
        arr = np.zeros(len(space), dtype=complex)
        for label, v in values.items():
            arr[space.index(label)] = v
        return cls(space, arr, measure)

    @classmethod
    def indicator(cls, space, subset: Iterable[str], measure=None):
        return cls(space, space.mask(subset).astype(complex), measure)

    @classmethod
    def constant(cls, space, c: complex, measure=None):
        return cls(space, np.full(len(space), c, dtype=complex), measure)

    def __call__(self, label: str) -> complex:
        return complex(self.values[self.space.index(label)])

    def _support(self) -> np.ndarray:
        if self.measure is None:
            return np.ones(len(self.space), dtype=bool)
        return self.measure.positive

    def __eq__(self, other) -> bool:
        if type(other) is not type(self) or other.space != self.space:
            return False
        if (self.measure is None) != (other.measure is None):
            return False
        if self.measure is not None and self.measure != other.measure:
            return False
        s = self._support()
        return bool(np.array_equal(self.values[s], other.values[s]))

    __hash__ = None

    def allclose(self, other, atol: float) -> bool:
        _same_space(self.space, other.space)
        s = self._support() & other._support()
        return bool(np.all(np.abs(self.values[s] - other.values[s]) <= atol))

    @property
    def real_values(self) -> np.ndarray:
        return self.values.real

    def __repr__(self) -> str:
        return f"{type(self).__name__}({dict(zip(self.space.atoms, self.values.tolist()))})"


class BoundedFunction(_ClassFunction):
    """Element of L∞(X, μ); with ``measure=None`` no null-set quotient is taken."""


class IntegrableFunction(_ClassFunction):
    """Element of L¹(X, μ)."""


def integrate(f: _ClassFunction, mu: FiniteMeasure, subset: Iterable[str] | None = None) -> complex:
    """``Σ_x f(x) μ({x})``, optionally restricted to ``subset``."""
    _same_space(f.space, mu.space, "integrand vs measure")
    weights = mu.mass if subset is None else mu.mass * mu.space.mask(subset)
    return complex(np.dot(f.values, weights))


@dataclass(frozen=True, eq=False)
class Distribution:
    space: FiniteMeasurableSpace
    prob: np.ndarray
    tol: Tolerance | None = None

    def __post_init__(self):
        tol = resolve(self.tol)
        p = np.asarray(self.prob, dtype=float)
        if p.shape != (len(self.space),):
            raise SpaceMismatch(f"{p.size} probabilities for {len(self.space)} atoms")
        if np.any(p < -tol.prob) or np.any(p > 1 + tol.prob) or not np.all(np.isfinite(p)):
            raise NotADistribution("probabilities must lie in [0, 1]")
        if abs(p.sum() - 1) > tol.prob:
            raise NotADistribution(f"probabilities sum to {p.sum()!r}")
        object.__setattr__(self, "prob", _readonly(p, float))

    @classmethod
    def point_mass(cls, space, label: str) -> "Distribution":
        p = np.zeros(len(space))
        p[space.index(label)] = 1.0
        return cls(space, p)

    @classmethod
    def uniform(cls, space) -> "Distribution":
        return cls(space, np.full(len(space), 1.0 / len(space)))

    def __call__(self, label: str) -> float:
        return float(self.prob[self.space.index(label)])

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.space.atoms, self.prob.tolist()))

    def allclose(self, other: "Distribution", atol: float) -> bool:
        _same_space(self.space, other.space)
        return bool(np.all(np.abs(self.prob - other.prob) <= atol))


@dataclass(frozen=True, eq=False)
class KleisliMap:
    """Stochastic kernel ``X -> G(Y)``: row ``i`` is the distribution of atom ``i``."""

    domain: FiniteMeasurableSpace
    codomain: FiniteMeasurableSpace
    kernel: np.ndarray
    tol: Tolerance | None = None

    def __post_init__(self):
        tol = resolve(self.tol)
        K = np.asarray(self.kernel, dtype=float)
        if K.shape != (len(self.domain), len(self.codomain)):
            raise SpaceMismatch(f"kernel shape {K.shape} does not match the spaces")
        for row in K:
            Distribution(self.codomain, row, tol)
        object.__setattr__(self, "kernel", _readonly(K, float))

    @classmethod
    def identity(cls, space) -> "KleisliMap":
        return cls(space, space, np.eye(len(space)))

    @classmethod
    def deterministic(cls, f: "AtomMap") -> "KleisliMap":
        K = np.zeros((len(f.domain), len(f.codomain)))
        K[np.arange(len(f.domain)), f.targets] = 1.0
        return cls(f.domain, f.codomain, K)

    def row(self, label: str) -> Distribution:
        return Distribution(self.codomain, self.kernel[self.domain.index(label)])

    def pullback(self, q: _ClassFunction) -> BoundedFunction:
        """Predicate ``x ↦ Σ_y f(x)(y) q(y)`` on the domain."""
        _same_space(q.space, self.codomain, "predicate vs kernel codomain")
        return BoundedFunction(self.domain, self.kernel @ q.values)


def kleisli_extension(f: KleisliMap, d: Distribution) -> Distribution:
    _same_space(f.domain, d.space, "distribution vs kernel domain")
    return Distribution(f.codomain, d.prob @ f.kernel)


@dataclass(frozen=True, eq=False)
class AtomMap:
    """Function between atom sets, stored as codomain indices."""

    domain: FiniteMeasurableSpace
    codomain: FiniteMeasurableSpace
    targets: tuple[int, ...]

    def __post_init__(self):
        t = tuple(int(i) for i in self.targets)
        if len(t) != len(self.domain):
            raise SpaceMismatch("map must be total on the domain")
        if any(not 0 <= i < len(self.codomain) for i in t):
            raise UnknownAtom("map target outside the codomain")
        object.__setattr__(self, "targets", t)

    @classmethod
    def from_mapping(cls, domain, codomain, mapping: Mapping[str, str]) -> "AtomMap":
        missing = [a for a in domain.atoms if a not in mapping]
        if missing:
            raise SpaceMismatch(f"map undefined on {missing}")
        return cls(domain, codomain, tuple(codomain.index(mapping[a]) for a in domain.atoms))

    @classmethod
    def identity(cls, space) -> "AtomMap":
        return cls(space, space, tuple(range(len(space))))

    def __call__(self, label: str) -> str:
        return self.codomain.atoms[self.targets[self.domain.index(label)]]

    def preimage(self, subset: Iterable[str]) -> tuple[str, ...]:
        hit = set(self.codomain.indices(subset))
        return tuple(a for a, t in zip(self.domain.atoms, self.targets) if t in hit)

    def matrix(self) -> np.ndarray:
        """0/1 matrix ``F[x, y] = [f(x) = y]``."""
        F = np.zeros((len(self.domain), len(self.codomain)))
        F[np.arange(len(self.domain)), self.targets] = 1.0
        return F


def pushforward_measure(f: AtomMap, mu: FiniteMeasure) -> FiniteMeasure:
    _same_space(f.domain, mu.space, "map domain vs measure")
    return FiniteMeasure(f.codomain, mu.mass @ f.matrix())


def check_measure_morphism(f: AtomMap, mu: FiniteMeasure, nu: FiniteMeasure) -> bool:
    """True iff every ν-null atom has a μ-null preimage."""
    _same_space(f.codomain, nu.space, "map codomain vs target measure")
    pushed = pushforward_measure(f, mu).mass
    return bool(np.all(pushed[~nu.positive] == 0))


@dataclass(frozen=True, eq=False)
class MeasureMorphism:
    """A map ``(X, μ) -> (Y, ν)`` whose pushforward of μ is ν-continuous."""

    map: AtomMap
    source: FiniteMeasure
    target: FiniteMeasure

    def __post_init__(self):
        if not check_measure_morphism(self.map, self.source, self.target):
            raise NotAMorphism("a ν-null atom has a preimage of positive μ-measure")


def linfty_action(f: MeasureMorphism, phi: BoundedFunction) -> BoundedFunction:
    """``φ ∘ f`` as an element of L∞(X, μ)."""
    _same_space(phi.space, f.map.codomain, "function vs morphism codomain")
    return BoundedFunction(f.map.domain, phi.values[list(f.map.targets)], f.source)


def l1_action(f: MeasureMorphism, phi: IntegrableFunction) -> IntegrableFunction:
    """Density of ``N ↦ ∫_{f⁻¹N} φ dμ`` with respect to ν."""
    _same_space(phi.space, f.map.domain, "function vs morphism domain")
    lam = (phi.values * f.source.mass) @ f.map.matrix()
    nu = f.target.mass
    out = np.zeros(len(nu), dtype=complex)
    pos = nu > 0
    out[pos] = lam[pos] / nu[pos]
    return IntegrableFunction(f.map.codomain, out, f.target)


def as_predicate(p: _ClassFunction | Sequence[float] | np.ndarray, space: FiniteMeasurableSpace) -> np.ndarray:
    """Values of a [0,1]-valued function as a real array (range is not checked here)."""
    if isinstance(p, _ClassFunction):
        _same_space(p.space, space, "predicate vs space")
        vals = p.values
    else:
        vals = np.asarray(p, dtype=complex)
        if vals.shape != (len(space),):
            raise SpaceMismatch(f"{vals.size} values for {len(space)} atoms")
    return vals
