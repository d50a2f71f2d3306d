"""POVMs on finite outcome spaces.

A :class:`POVM` assigns an effect to each atom; the effects sum to the
identity.  Its value on a subset is the sum over the subset, which makes it
a morphism of σ-effect algebras from the power set into the effects.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Literal, Sequence

import numpy as np

from .errors import (
    NotAPOVM,
    NotContinuous,
    NotPSD,
    RangeError,
    Singular,
    SpaceMismatch,
    TooLarge,
)
from .operators import dagger, hermitian_part, psd_inverse_sqrt
from .spaces import (
    BoundedFunction,
    FiniteMeasurableSpace,
    FiniteMeasure,
    as_predicate,
)
from .tolerance import Tolerance, resolve

BRUTE_FORCE_LIMIT = 10


def _stack(effects, n: int | None = None) -> np.ndarray:
    try:
        arr = np.array(effects, dtype=complex)
    except ValueError:
        raise NotAPOVM("effects must be square matrices of one size") from None
    if arr.ndim != 3 or arr.shape[1] != arr.shape[2] or arr.shape[1] == 0:
        raise NotAPOVM(f"effects must be square matrices of one size, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise SpaceMismatch(f"{arr.shape[0]} effects for {n} atoms")
    if not np.all(np.isfinite(arr)):
        raise NotAPOVM("effects have non-finite entries")
    return arr


def _max_norm(stack: np.ndarray) -> float:
    if stack.size == 0:
        return 0.0
    return float(np.linalg.norm(stack, ord=2, axis=(-2, -1)).max())


class POVM:
    """Finite POVM: one effect per atom of ``space``.

    Parameters
    ----------
    space : FiniteMeasurableSpace
        Outcome space.
    effects : array_like, shape (n, d, d)
        Effect for each atom, in the order of ``space.atoms``.
    tol : Tolerance, optional
        Thresholds for the Hermitian, spectral and normalization checks.

    Raises
    ------
    NotAPOVM
        If an operator is not an effect or the effects do not sum to the
        identity within ``tol.norm``.  Use :func:`repair_normalization` to
        fix an almost-normalized family explicitly.
    """

    def __init__(self, space: FiniteMeasurableSpace, effects, tol: Tolerance | None = None):
        self.tol = resolve(tol)
        E = _stack(effects, len(space))
        herm = _max_norm(E - dagger(E))
        if herm > self.tol.herm:
            raise NotAPOVM(f"effect not Hermitian (defect {herm:.3e})")
        E = hermitian_part(E)
        w = np.linalg.eigvalsh(E)
        lo, hi = float(w.min()), float(w.max())
        if lo < -self.tol.psd or hi > 1 + self.tol.psd:
            raise NotAPOVM(f"effect spectrum [{lo:.3e}, {hi:.3e}] not inside [0, 1]")
        residual = float(np.linalg.norm(E.sum(axis=0) - np.eye(E.shape[1]), 2))
        if residual > self.tol.norm:
            raise NotAPOVM(f"effects sum to id only within {residual:.3e}")
        E.setflags(write=False)
        self.space = space
        self.effects = E
        self.normalization_residual = residual

    @classmethod
    def from_effects(cls, atoms: Sequence[str], effects, tol: Tolerance | None = None) -> "POVM":
        return cls(FiniteMeasurableSpace(tuple(atoms)), effects, tol)

    @property
    def hilbert_dim(self) -> int:
        return self.effects.shape[1]

    def __len__(self) -> int:
        return len(self.space)

    def __iter__(self) -> Iterator[tuple[str, np.ndarray]]:
        return iter(zip(self.space.atoms, self.effects))

    def effect(self, label: str) -> np.ndarray:
        return self.effects[self.space.index(label)]

    def evaluate(self, subset: Iterable[str]) -> np.ndarray:
        """``A(M) = Σ_{x ∈ M} A_x``; the empty set gives the zero operator."""
        idx = self.space.indices(subset)
        return self.effects[idx].sum(axis=0) if idx else np.zeros((self.hilbert_dim,) * 2, dtype=complex)

    def allclose(self, other: "POVM", atol: float) -> bool:
        return (
            self.space == other.space
            and self.effects.shape == other.effects.shape
            and bool(np.all(np.abs(self.effects - other.effects) <= atol))
        )

    def __repr__(self) -> str:
        return f"POVM(d={self.hilbert_dim}, atoms={list(self.space.atoms)})"


def is_pvm(A: POVM, tol: Tolerance | None = None) -> bool:
    tol = resolve(tol)
    E = A.effects
    return _max_norm(E @ E - E) <= tol.recon


def check_mu_continuous(A: POVM, mu: FiniteMeasure, tol: Tolerance | None = None) -> bool:
    if A.space != mu.space:
        raise SpaceMismatch("POVM and measure live on different spaces")
    null = ~mu.positive
    return _max_norm(A.effects[null]) <= resolve(tol).norm


@dataclass(frozen=True, eq=False)
class OperatorDensity:
    """Positive-operator-valued density with respect to ``measure``."""

    space: FiniteMeasurableSpace
    measure: FiniteMeasure
    values: np.ndarray

    def __call__(self, label: str) -> np.ndarray:
        return self.values[self.space.index(label)]

    def integrate(self, subset: Iterable[str] | None = None) -> np.ndarray:
        """``Σ_{x ∈ M} density(x) μ({x})``."""
        w = self.measure.mass if subset is None else self.measure.mass * self.space.mask(subset)
        return np.tensordot(w, self.values, axes=1)


def rn_derivative(A: POVM, mu: FiniteMeasure, tol: Tolerance | None = None) -> OperatorDensity:
    """Radon-Nikodym derivative ``dA/dμ``: ``A_x / μ({x})``, zero on null atoms."""
    if not check_mu_continuous(A, mu, tol):
        raise NotContinuous("the POVM charges a μ-null atom; no derivative exists")
    pos = mu.positive
    values = np.zeros_like(A.effects)
    values[pos] = A.effects[pos] / mu.mass[pos, None, None]
    values.setflags(write=False)
    return OperatorDensity(A.space, mu, values)


def set_partitions(n: int) -> Iterator[list[list[int]]]:
    """All partitions of ``range(n)`` into non-empty blocks (restricted growth strings)."""
    if n == 0:
        yield []
        return
    labels = [0] * n

    def rec(i: int, k: int):
        if i == n:
            blocks: list[list[int]] = [[] for _ in range(k)]
            for j, b in enumerate(labels):
                blocks[b].append(j)
            yield blocks
            return
        for b in range(k + 1):
            labels[i] = b
            yield from rec(i + 1, max(k, b + 1))

    yield from rec(1, 1)


def variation(A: POVM, mode: Literal["closed_form", "brute_force"] = "closed_form") -> float:
    """Supremum over finite partitions of ``Σ_i ‖A(X_i)‖``.

    The singleton partition is the finest, and merging blocks can only lower
    the sum (triangle inequality), so the closed form is ``Σ_x ‖A_x‖``.  The
    brute-force mode enumerates every partition and serves as its oracle.
    """
    norms = np.linalg.norm(A.effects, ord=2, axis=(-2, -1))
    if mode == "closed_form":
        return float(norms.sum())
    if mode != "brute_force":
        raise ValueError(f"unknown mode {mode!r}")
    n = len(A)
    if n > BRUTE_FORCE_LIMIT:
        raise TooLarge(f"brute force is limited to {BRUTE_FORCE_LIMIT} atoms, got {n}")
    block_norm: dict[int, float] = {}
    best = 0.0
    for blocks in set_partitions(n):
        total = 0.0
        for b in blocks:
            key = sum(1 << i for i in b)
            if key not in block_norm:
                block_norm[key] = float(np.linalg.norm(A.effects[b].sum(axis=0), 2))
            total += block_norm[key]
        best = max(best, total)
    return best


def integrate_along(A: POVM, p, tol: Tolerance | None = None) -> np.ndarray:
    """``∫ p dA = Σ_x p(x) A_x`` for a predicate ``p : X -> [0, 1]``."""
    tol = resolve(tol)
    vals = as_predicate(p, A.space)
    if np.any(np.abs(vals.imag) > tol.psd) or np.any(vals.real < -tol.psd) or np.any(vals.real > 1 + tol.psd):
        raise RangeError("predicate values must be real and inside [0, 1]")
    return np.tensordot(vals.real, A.effects, axes=1)


def module_morphism_to_povm(
    phi: Callable[[BoundedFunction], np.ndarray],
    space: FiniteMeasurableSpace,
    tol: Tolerance | None = None,
) -> POVM:
    """Recover the POVM ``M ↦ Φ(1_M)`` from an effect-module morphism ``Φ``."""
    effects = [phi(BoundedFunction.indicator(space, [a])) for a in space.atoms]
    return POVM(space, effects, tol)


def repair_normalization(
    raw, space: FiniteMeasurableSpace | None = None, tol: Tolerance | None = None
) -> POVM:
    """Turn nearly normalized positive operators into a POVM.

    Uses the symmetric correction ``A_x = S^{-1/2} raw_x S^{-1/2}`` with
    ``S = Σ raw_x``.
    """
    tol = resolve(tol)
    R = _stack(raw)
    if space is None:
        space = FiniteMeasurableSpace.of_size(R.shape[0])
    R = hermitian_part(R)
    lowest = float(np.linalg.eigvalsh(R).min())
    if lowest < -tol.psd:
        raise NotAPOVM(f"raw operator has eigenvalue {lowest:.3e}")
    try:
        T = psd_inverse_sqrt(R.sum(axis=0), tol)
    except NotPSD as exc:
        raise Singular(str(exc)) from None
    return POVM(space, T @ R @ T, tol)
