"""Seeded random instances: effects, states, POVMs, isometries, kernels."""

from __future__ import annotations

import numpy as np

from .operators import dagger, operator_norm


def rng_from(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def complex_gaussian(rng: np.random.Generator, *shape: int) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_psd(rng: np.random.Generator, d: int, rank: int | None = None) -> np.ndarray:
    G = complex_gaussian(rng, d, rank or d)
    return G @ dagger(G)


def random_effect(rng: np.random.Generator, d: int) -> np.ndarray:
    """``W / (‖W‖ + s)`` with ``W = G G†`` and ``s ~ U[0, 1]``."""
    W = random_psd(rng, d)
    return W / (operator_norm(W) + rng.uniform())


def random_effect_split(rng: np.random.Generator, d: int, parts: int) -> list[np.ndarray]:
    """Effects whose sum is itself an effect; the parts need not commute."""
    Ws = [random_psd(rng, d) for _ in range(parts)]
    scale = operator_norm(sum(Ws)) + rng.uniform()
    return [W / scale for W in Ws]


def random_density(rng: np.random.Generator, d: int, rank: int | None = None) -> np.ndarray:
    W = random_psd(rng, d, rank)
    return W / np.trace(W).real


def random_pure_state(rng: np.random.Generator, d: int) -> np.ndarray:
    return random_density(rng, d, rank=1)


def random_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    Q, R = np.linalg.qr(complex_gaussian(rng, d, d))
    phases = np.diag(R) / np.abs(np.diag(R))
    return Q * phases


def random_isometry(rng: np.random.Generator, d_in: int, d_out: int) -> np.ndarray:
    return random_unitary(rng, d_out)[:, :d_in]


def random_povm_effects(rng: np.random.Generator, d: int, n: int) -> np.ndarray:
    """Generic full-rank POVM with ``n`` outcomes, shape ``(n, d, d)``."""
    raw = np.array([random_psd(rng, d) for _ in range(n)])
    S = raw.sum(axis=0)
    w, V = np.linalg.eigh(S)
    S_inv_half = (V / np.sqrt(w)) @ dagger(V)
    effects = S_inv_half @ raw @ S_inv_half
    return 0.5 * (effects + dagger(effects))


def random_pvm_effects(rng: np.random.Generator, d: int, n: int) -> np.ndarray:
    """Projections onto blocks of a random orthonormal basis; some may be zero."""
    U = random_unitary(rng, d)
    owner = rng.integers(0, n, size=d)
    effects = np.zeros((n, d, d), dtype=complex)
    for k in range(d):
        v = U[:, k : k + 1]
        effects[owner[k]] += v @ dagger(v)
    return effects


def random_masses(rng: np.random.Generator, n: int, low: float = 0.1, high: float = 2.0) -> np.ndarray:
    return rng.uniform(low, high, size=n)


def random_stochastic(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.dirichlet(np.ones(cols), size=rows)


def random_unit_vector(rng: np.random.Generator, dim: int = 3) -> np.ndarray:
    v = rng.standard_normal(dim)
    return v / np.linalg.norm(v)
