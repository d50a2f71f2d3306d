"""Sequential composition of a POVM with an outcome-indexed family of POVMs.

Measuring ``A`` first and then, on outcome ``x``, the POVM ``B_x`` gives a
POVM on the disjoint union of the ``Y_x``.  With ``D = dA/dμ`` its effect
on the pair atom ``(x, y)`` is ``μ({x}) √D(x) B_x({y}) √D(x)``.

Pair atoms are labelled ``"x/y"``; a ``/`` inside a user label is written
as ``//``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import BadParameter, DimensionMismatch, SpaceMismatch, UnknownAtom
from .operators import psd_sqrt
from .povm import POVM, rn_derivative
from .spaces import FiniteMeasurableSpace, FiniteMeasure
from .tolerance import Tolerance, resolve

SEPARATOR = "/"


def escape(label: str) -> str:
    return label.replace(SEPARATOR, SEPARATOR * 2)


def pair_label(x: str, y: str) -> str:
    """``"x/y"`` with ``/`` doubled inside labels.

    An outcome label may not start with ``/``: ``"a///b"`` would then
    decode both as ``("a/", "b")`` and ``("a", "/b")``.
    """
    if y.startswith(SEPARATOR):
        raise BadParameter(f"outcome label {y!r} may not start with {SEPARATOR!r}")
    return f"{escape(x)}{SEPARATOR}{escape(y)}"


def split_pair_label(label: str) -> tuple[str, str]:
    """Inverse of :func:`pair_label` (the first unpaired separator splits)."""
    i, n = 0, len(label)
    while i < n:
        if label[i] == SEPARATOR:
            if i + 1 < n and label[i + 1] == SEPARATOR:
                i += 2
                continue
            return label[:i].replace("//", "/"), label[i + 1 :].replace("//", "/")
        i += 1
    raise ValueError(f"{label!r} is not a pair label")


@dataclass(frozen=True, eq=False)
class IndexedPOVMFamily:
    """One POVM ``B_x`` per atom ``x`` of ``index``, all on the same ``C^d``."""

    index: FiniteMeasurableSpace
    povms: tuple[POVM, ...]

    def __post_init__(self):
        povms = tuple(self.povms)
        if len(povms) != len(self.index):
            raise SpaceMismatch(f"{len(povms)} POVMs for {len(self.index)} index atoms")
        dims = {B.hilbert_dim for B in povms}
        if len(dims) != 1:
            raise DimensionMismatch(f"family mixes Hilbert dimensions {sorted(dims)}")
        object.__setattr__(self, "povms", povms)

    @classmethod
    def constant(cls, index: FiniteMeasurableSpace, B: POVM) -> "IndexedPOVMFamily":
        return cls(index, (B,) * len(index))

    @property
    def hilbert_dim(self) -> int:
        return self.povms[0].hilbert_dim

    def __getitem__(self, x: str) -> POVM:
        return self.povms[self.index.index(x)]


class DisjointUnionSpace(FiniteMeasurableSpace):
    """The union of the ``Y_x``, with atoms ``"x/y"`` and a pair lookup."""

    def __init__(self, family: IndexedPOVMFamily):
        pairs = tuple((x, y) for x, B in zip(family.index.atoms, family.povms) for y in B.space.atoms)
        super().__init__(tuple(pair_label(x, y) for x, y in pairs))
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "_pair_index", {p: i for i, p in enumerate(pairs)})

    def pair_index(self, x: str, y: str) -> int:
        try:
            return self._pair_index[(x, y)]
        except KeyError:
            raise UnknownAtom(f"no outcome ({x!r}, {y!r})") from None

    def union(self, M: Iterable[str], N: Mapping[str, Iterable[str]] | None = None) -> tuple[str, ...]:
        """Atoms of ``⋃_{x ∈ M} N_x``; a missing ``N_x`` means all of ``Y_x``."""
        chosen = []
        for x in M:
            ys = None if N is None else N.get(x)
            if ys is None:
                hits = [i for i, (px, _) in enumerate(self.pairs) if px == x]
                if not hits:
                    raise UnknownAtom(f"unknown index atom {x!r}")
                chosen.extend(hits)
            else:
                chosen.extend(self.pair_index(x, y) for y in ys)
        return tuple(self.atoms[i] for i in sorted(set(chosen)))


class SequentialComposite(POVM):
    """``(A;B)`` together with the pieces it was built from."""

    first: POVM
    measure: FiniteMeasure
    family: IndexedPOVMFamily
    root_density: np.ndarray

    @property
    def union(self) -> DisjointUnionSpace:
        return self.space

    def marginal(self) -> np.ndarray:
        """Effects of the first-stage marginal, ``Σ_y (A;B)_{(x, y)}`` per ``x``."""
        out = np.zeros((len(self.family.index), self.hilbert_dim, self.hilbert_dim), dtype=complex)
        index = self.family.index
        for (x, _), E in zip(self.space.pairs, self.effects):
            out[index.index(x)] += E
        return out


def sequential_compose(
    A: POVM, mu: FiniteMeasure, B: IndexedPOVMFamily, tol: Tolerance | None = None
) -> SequentialComposite:
    """Measure ``A``, then ``B_x`` on outcome ``x``.

    Raises ``NotContinuous`` if ``A`` has no derivative with respect to ``μ``
    and ``DimensionMismatch`` if the family acts on another Hilbert space.
    Pair atoms over a null index atom carry the zero effect.
    """
    tol = resolve(tol or A.tol)
    if B.index != A.space:
        raise SpaceMismatch("family must be indexed by the outcome space of A")
    if B.hilbert_dim != A.hilbert_dim:
        raise DimensionMismatch(f"A acts on C^{A.hilbert_dim}, family on C^{B.hilbert_dim}")
    density = rn_derivative(A, mu, tol)
    roots = psd_sqrt(density.values, tol)
    space = DisjointUnionSpace(B)
    effects = []
    for x, root, m, Bx in zip(A.space.atoms, roots, mu.mass, B.povms):
        effects.extend(m * (root @ Bx.effects @ root))
    AB = SequentialComposite(space, np.array(effects), tol)
    AB.first, AB.measure, AB.family = A, mu, B
    roots.setflags(write=False)
    AB.root_density = roots
    return AB


def evaluate_composite(
    AB: SequentialComposite, M: Iterable[str], N: Mapping[str, Iterable[str]] | None = None
) -> np.ndarray:
    """``(A;B)(⋃_{x ∈ M} N_x)``; ``N`` defaults to the whole ``Y_x`` for each ``x``."""
    M = list(M)
    for x in M:
        AB.family.index.index(x)
    return AB.evaluate(AB.union.union(M, N))
