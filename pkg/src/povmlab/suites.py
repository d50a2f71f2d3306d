"""Randomized round-trip suites over the representation bijections."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .duality import (
    density_to_state,
    povm_from_statistical,
    povm_to_vn_map,
    predual_to_vn,
    state_to_density,
    statistical_map,
    vn_map_to_povm,
    vn_to_predual,
)
from .povm import POVM, integrate_along, module_morphism_to_povm
from .sampling import random_density, random_masses, random_povm_effects
from .spaces import FiniteMeasurableSpace, FiniteMeasure
from .tolerance import Tolerance, resolve

ROUNDTRIPS = ("module_morphism", "statistical_map", "vn_map", "predual_map", "busch_state")
THRESHOLDS = {name: 1e-10 for name in ROUNDTRIPS} | {"busch_state": 1e-9}


def random_instance(rng: np.random.Generator, dims=(2, 6), atoms=(1, 8), tol: Tolerance | None = None):
    """Random ``(POVM, strictly positive measure)`` pair."""
    d = int(rng.integers(dims[0], dims[1] + 1))
    n = int(rng.integers(atoms[0], atoms[1] + 1))
    space = FiniteMeasurableSpace.of_size(n)
    A = POVM(space, random_povm_effects(rng, d, n), tol)
    return A, FiniteMeasure(space, random_masses(rng, n))


def roundtrip_errors(rng: np.random.Generator, tol: Tolerance | None = None, dims=(2, 6), atoms=(1, 8)) -> dict[str, float]:
    """One random instance through every bijection; max entrywise error of each."""
    tol = resolve(tol)
    A, mu = random_instance(rng, dims, atoms, tol)
    d, space = A.hilbert_dim, A.space

    back = module_morphism_to_povm(lambda p: integrate_along(A, p, tol), space, tol)
    err_module = np.abs(back.effects - A.effects).max()

    back = povm_from_statistical(statistical_map(A), d, space, tol)
    err_stat = np.abs(back.effects - A.effects).max()

    psi = povm_to_vn_map(A, mu, tol)
    err_vn = np.abs(vn_map_to_povm(psi).effects - A.effects).max()
    err_predual = np.abs(predual_to_vn(vn_to_predual(psi)).images - psi.images).max()

    rho = random_density(rng, d)
    err_busch = np.abs(state_to_density(density_to_state(rho, tol), d, tol) - rho).max()

    return dict(zip(ROUNDTRIPS, map(float, (err_module, err_stat, err_vn, err_predual, err_busch))))


def run_roundtrips(trials: int, seed: int, parallel: bool = False, tol: Tolerance | None = None) -> dict[str, float]:
    """Max error per bijection over ``trials`` independently seeded instances.

    Each trial has its own spawned generator, so results do not depend on
    ``parallel`` or on scheduling order.
    """
    children = np.random.SeedSequence(seed).spawn(trials)
    run = lambda ss: roundtrip_errors(np.random.default_rng(ss), tol)  # noqa: E731
    if parallel:
        with ThreadPoolExecutor() as pool:
            results = list(pool.map(run, children))
    else:
        results = [run(ss) for ss in children]
    return {name: max((r[name] for r in results), default=0.0) for name in ROUNDTRIPS}
