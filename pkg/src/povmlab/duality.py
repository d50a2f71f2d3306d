"""Equivalent representations of a POVM and the conversions between them.

* statistical maps ``ρ ↦ (x ↦ tr(ρ A_x))`` from states to distributions;
* states as functionals on effects (``ρ ↦ (E ↦ tr(ρ E))``);
* positive unital maps ``ψ : L∞(X, μ) -> B(H)`` (:class:`VnMap`);
* trace-compatible positive maps ``Φ : T(H) -> L¹(X, μ)`` (:class:`PredualMap`).

Black-box functionals are turned back into operators by state tomography
over a fixed informationally complete family of rank-one projectors, with
a few redundant probes so that inconsistent (non-affine) inputs show up as
a least-squares residual.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    NotADensityMatrix,
    NotAffine,
    NotAState,
    NotContinuous,
    NotPositive,
    SpaceMismatch,
)
from .operators import as_matrix, check_density, check_isometry, dagger, hermitian_part
from .povm import POVM, check_mu_continuous, integrate_along
from .sampling import random_density, rng_from
from .spaces import (
    BoundedFunction,
    Distribution,
    FiniteMeasurableSpace,
    FiniteMeasure,
    IntegrableFunction,
    KleisliMap,
    MeasureMorphism,
    kleisli_extension,
    l1_action,
    linfty_action,
)
from .tolerance import Tolerance, resolve

# ---------------------------------------------------------------------------
# tomography
# ---------------------------------------------------------------------------


def _projector(v: np.ndarray) -> np.ndarray:
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


def tomography_family(d: int, redundant: bool = True) -> list[np.ndarray]:
    """Rank-one projectors spanning the Hermitian matrices on ``C^d``.

    The basic family is ``e_j e_j†`` together with the projectors onto
    ``(e_j + e_k)/√2`` and ``(e_j + i e_k)/√2`` for ``j < k``: ``d²`` states.
    With ``redundant`` the ``e_j - e_k`` and ``e_j - i e_k`` projectors are
    appended so the linear systems are overdetermined.
    """
    eye = np.eye(d, dtype=complex)
    fam = [_projector(eye[j]) for j in range(d)]
    phases = (1, 1j, -1, -1j) if redundant else (1, 1j)
    for j in range(d):
        for k in range(j + 1, d):
            fam.extend(_projector(eye[j] + c * eye[k]) for c in phases)
    return fam


def _design(ops: Sequence[np.ndarray]) -> np.ndarray:
    # row s maps vec(A) to tr(ops[s] A)
    return np.array([np.asarray(P).T.reshape(-1) for P in ops])


def _solve(ops: Sequence[np.ndarray], values: np.ndarray, d: int) -> tuple[np.ndarray, float]:
    """Least-squares operators ``A_k`` with ``tr(ops[s] A_k) = values[s, k]``."""
    M = _design(ops)
    V = np.asarray(values, dtype=complex).reshape(len(ops), -1)
    X, *_ = np.linalg.lstsq(M, V, rcond=None)
    residual = float(np.abs(M @ X - V).max()) if V.size else 0.0
    A = X.T.reshape(-1, d, d)
    return A, residual


def _probe_states(d: int) -> list[np.ndarray]:
    states = tomography_family(d)
    if d > 1:
        states.append(np.eye(d, dtype=complex) / d)
        states.append(random_density(np.random.default_rng(1729), d))
    return states


# ---------------------------------------------------------------------------
# statistical maps
# ---------------------------------------------------------------------------


class StatisticalMap:
    """Affine map from density matrices to distributions on ``povm.space``."""

    def __init__(self, povm: POVM):
        self.povm = povm

    @property
    def space(self) -> FiniteMeasurableSpace:
        return self.povm.space

    @property
    def hilbert_dim(self) -> int:
        return self.povm.hilbert_dim

    def probabilities(self, rho) -> np.ndarray:
        R = as_matrix(rho)
        if R.shape != (self.hilbert_dim,) * 2:
            raise DimensionMismatch(f"state is {R.shape}, POVM acts on C^{self.hilbert_dim}")
        return np.einsum("ab,xba->x", R, self.povm.effects).real

    def __call__(self, rho) -> Distribution:
        rho = check_density(rho, self.povm.tol)
        return Distribution(self.space, np.clip(self.probabilities(rho), 0.0, 1.0), self.povm.tol)


def statistical_map(A: POVM) -> StatisticalMap:
    return StatisticalMap(A)


def povm_from_statistical(
    alpha: Callable[[np.ndarray], Distribution | Sequence[float]],
    d: int,
    space: FiniteMeasurableSpace,
    tol: Tolerance | None = None,
) -> POVM:
    """Recover the POVM behind a black-box statistical map by tomography."""
    tol = resolve(tol)
    states = _probe_states(d)
    rows = []
    for rho in states:
        out = alpha(rho)
        p = out.prob if isinstance(out, Distribution) else np.asarray(out, dtype=float)
        if p.shape != (len(space),):
            raise SpaceMismatch(f"map returned {p.shape[0]} probabilities for {len(space)} atoms")
        rows.append(p)
    effects, residual = _solve(states, np.array(rows), d)
    if residual > tol.recon:
        raise NotAffine(f"tomography system inconsistent (residual {residual:.3e})")
    return POVM(space, hermitian_part(effects), tol)


# ---------------------------------------------------------------------------
# states as functionals on effects
# ---------------------------------------------------------------------------


class StateFunctional:
    """The effect-module morphism ``E ↦ tr(ρ E)`` into [0, 1]."""

    def __init__(self, rho: np.ndarray):
        self.rho = rho

    def __call__(self, E) -> float:
        return float(np.einsum("ab,ba->", self.rho, as_matrix(E)).real)


def density_to_state(rho, tol: Tolerance | None = None) -> StateFunctional:
    return StateFunctional(check_density(rho, tol))


def state_to_density(s: Callable[[np.ndarray], float], d: int, tol: Tolerance | None = None) -> np.ndarray:
    """Reconstruct ``ρ`` from a functional on effects.

    Probes the tomography projectors plus ``0`` and ``id``; rejects the
    input with ``NotAState`` when no density matrix reproduces the probes.
    """
    tol = resolve(tol)
    probes = tomography_family(d) + [np.zeros((d, d), dtype=complex), np.eye(d, dtype=complex)]
    values = np.array([s(E) for E in probes], dtype=float)
    (rho,), residual = _solve(probes, values, d)
    if residual > tol.recon:
        raise NotAState(f"functional is not of the form tr(ρ·) (residual {residual:.3e})")
    try:
        return check_density(rho, tol)
    except NotADensityMatrix as exc:
        raise NotAState(str(exc)) from None


@dataclass(frozen=True, eq=False)
class DensityDistribution:
    """Finitely supported probability distribution over density matrices."""

    weights: np.ndarray
    states: tuple[np.ndarray, ...]
    tol: Tolerance | None = None

    def __post_init__(self):
        tol = resolve(self.tol)
        w = np.asarray(self.weights, dtype=float)
        states = tuple(check_density(r, tol) for r in self.states)
        if w.shape != (len(states),) or not states:
            raise ValueError("need one weight per state and at least one state")
        if len({r.shape for r in states}) != 1:
            raise DimensionMismatch("states act on different spaces")
        if np.any(w < 0) or abs(w.sum() - 1) > tol.prob:
            raise ValueError("weights must be nonnegative and sum to 1")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "states", states)

    def map(self, fn: Callable[[np.ndarray], np.ndarray]) -> "DensityDistribution":
        return DensityDistribution(self.weights, tuple(fn(r) for r in self.states), self.tol)


def barycenter(phi: DensityDistribution) -> np.ndarray:
    """Average state ``Σ_i w_i ρ_i``."""
    return check_density(np.tensordot(phi.weights, np.array(phi.states), axes=1), phi.tol)


def dm_map(g, rho, tol: Tolerance | None = None) -> np.ndarray:
    """Push a state forward along an isometry: ``g ρ g†``."""
    G = check_isometry(g, tol)
    R = check_density(rho, tol)
    if G.shape[1] != R.shape[0]:
        raise DimensionMismatch(f"isometry is {G.shape}, state is {R.shape}")
    return check_density(G @ R @ dagger(G), tol)


# ---------------------------------------------------------------------------
# L∞ -> B(H) and T(H) -> L¹
# ---------------------------------------------------------------------------


class VnMap:
    """Positive unital linear map ``L∞(X, μ) -> B(C^d)``.

    Stored by its values on atom indicators; images at μ-null atoms are
    forced to zero since the indicator of a null atom is the zero class.
    """

    def __init__(self, measure: FiniteMeasure, images, tol: Tolerance | None = None):
        self.tol = tol = resolve(tol)
        imgs = np.array(images, dtype=complex)
        n = len(measure.space)
        if imgs.ndim != 3 or imgs.shape[0] != n or imgs.shape[1] != imgs.shape[2]:
            raise DimensionMismatch(f"images shape {imgs.shape} for {n} atoms")
        imgs[~measure.positive] = 0
        if np.abs(imgs - dagger(imgs)).max(initial=0.0) > tol.herm:
            raise NotPositive("image is not Hermitian")
        imgs = hermitian_part(imgs)
        lowest = float(np.linalg.eigvalsh(imgs).min())
        if lowest < -tol.psd:
            raise NotPositive(f"image has eigenvalue {lowest:.3e}")
        unit = float(np.linalg.norm(imgs.sum(axis=0) - np.eye(imgs.shape[1]), 2))
        if unit > tol.norm:
            raise NotPositive(f"map is not unital (‖ψ(1) - id‖ = {unit:.3e})")
        imgs.setflags(write=False)
        self.measure = measure
        self.images = imgs

    @property
    def space(self) -> FiniteMeasurableSpace:
        return self.measure.space

    @property
    def hilbert_dim(self) -> int:
        return self.images.shape[1]

    def __call__(self, f) -> np.ndarray:
        if isinstance(f, BoundedFunction):
            if f.space != self.space:
                raise SpaceMismatch("function and map live on different spaces")
            vals = f.values
        else:
            vals = np.asarray(f, dtype=complex)
        return np.tensordot(vals, self.images, axes=1)

    def image(self, label: str) -> np.ndarray:
        return self.images[self.space.index(label)]


def povm_to_vn_map(A: POVM, mu: FiniteMeasure, tol: Tolerance | None = None) -> VnMap:
    """``ψ(f) = ∫ f dA``; needs μ-continuity to be well defined on classes."""
    tol = tol or A.tol
    if not check_mu_continuous(A, mu, tol):
        raise NotContinuous("POVM charges a μ-null atom, so ψ is not well defined")
    return VnMap(mu, A.effects, tol)


def vn_map_to_povm(psi: VnMap) -> POVM:
    return POVM(psi.space, psi.images, psi.tol)


def multiplicativity_defect(psi: VnMap) -> float:
    """``max ‖ψ(1_x 1_y) - ψ(1_x) ψ(1_y)‖`` over atom pairs."""
    P = psi.images
    products = P[:, None] @ P[None, :]
    n = len(P)
    products[np.arange(n), np.arange(n)] -= P
    return float(np.linalg.norm(products, ord=2, axis=(-2, -1)).max())


def is_star_homomorphism(psi: VnMap, tol: Tolerance | None = None) -> bool:
    return multiplicativity_defect(psi) <= resolve(tol or psi.tol).recon


class PredualMap:
    """Positive map ``T(C^d) -> L¹(X, μ)``, ``T ↦ (x ↦ tr(T B_x))``.

    The morphism condition of base norm spaces, ``∫ Φ(T) dμ = tr(T)``, is
    verified on ``T = id`` and on every matrix unit.
    """

    def __init__(self, measure: FiniteMeasure, kernel, tol: Tolerance | None = None):
        self.tol = tol = resolve(tol)
        K = np.array(kernel, dtype=complex)
        n = len(measure.space)
        if K.ndim != 3 or K.shape[0] != n or K.shape[1] != K.shape[2]:
            raise DimensionMismatch(f"kernel shape {K.shape} for {n} atoms")
        K[~measure.positive] = 0
        if np.abs(K - dagger(K)).max(initial=0.0) > tol.herm:
            raise NotPositive("kernel operator is not Hermitian")
        K = hermitian_part(K)
        lowest = float(np.linalg.eigvalsh(K).min())
        if lowest < -tol.psd:
            raise NotPositive(f"kernel operator has eigenvalue {lowest:.3e}")
        K.setflags(write=False)
        self.measure = measure
        self.kernel = K
        self.trace_residual = self._trace_residual()
        if self.trace_residual > tol.recon:
            raise NotPositive(f"not trace compatible (residual {self.trace_residual:.3e})")

    @property
    def space(self) -> FiniteMeasurableSpace:
        return self.measure.space

    @property
    def hilbert_dim(self) -> int:
        return self.kernel.shape[1]

    def values(self, T) -> np.ndarray:
        T = as_matrix(T)
        if T.shape != (self.hilbert_dim,) * 2:
            raise DimensionMismatch(f"T is {T.shape}, map acts on C^{self.hilbert_dim}")
        return np.einsum("ab,xba->x", T, self.kernel)

    def __call__(self, T) -> IntegrableFunction:
        return IntegrableFunction(self.space, self.values(T), self.measure)

    def _trace_residual(self) -> float:
        d = self.hilbert_dim
        worst = abs(np.dot(self.values(np.eye(d)), self.measure.mass) - d)
        for a in range(d):
            for b in range(d):
                E = np.zeros((d, d))
                E[a, b] = 1.0
                got = np.dot(self.values(E), self.measure.mass)
                worst = max(worst, abs(got - (1.0 if a == b else 0.0)))
        return float(worst)


def vn_to_predual(psi: VnMap) -> PredualMap:
    """Kernel ``B_x = ψ(1_x) / μ({x})``, zero on null atoms."""
    mass = psi.measure.mass
    K = np.zeros_like(psi.images)
    pos = mass > 0
    K[pos] = psi.images[pos] / mass[pos, None, None]
    return PredualMap(psi.measure, K, psi.tol)


def predual_to_vn(Phi: PredualMap) -> VnMap:
    """Read off ``ψ(1_x)`` entrywise from ``Φ`` evaluated on matrix units."""
    d = Phi.hilbert_dim
    mass = Phi.measure.mass
    images = np.zeros((len(mass), d, d), dtype=complex)
    for a in range(d):
        for b in range(d):
            E = np.zeros((d, d))
            E[a, b] = 1.0
            # tr(E_ab B) = B[b, a]
            images[:, b, a] = Phi(E).values * mass
    return VnMap(Phi.measure, images, Phi.tol)


# ---------------------------------------------------------------------------
# commuting squares
# ---------------------------------------------------------------------------


def _square_shapes(dH: int, dK: int, X, Y, f: KleisliMap, G: np.ndarray) -> None:
    if G.shape != (dK, dH):
        raise DimensionMismatch(f"isometry is {G.shape}, expected ({dK}, {dH})")
    if f.domain != X or f.codomain != Y:
        raise DimensionMismatch("kernel does not connect the two outcome spaces")


def check_comma_square_dm(
    alpha: StatisticalMap,
    beta: StatisticalMap,
    f: KleisliMap,
    g,
    test_states: Sequence[np.ndarray] | None = None,
    tol: Tolerance | None = None,
    seed=0,
) -> bool:
    """Does ``β(g ρ g†) = K(f)(α(ρ))`` hold for every test state?

    By affinity it suffices to test an informationally complete family,
    which is the default; two random states are added on top.
    """
    tol = resolve(tol)
    G = check_isometry(g, tol)
    dH = alpha.hilbert_dim
    _square_shapes(dH, beta.hilbert_dim, alpha.space, beta.space, f, G)
    if test_states is None:
        rng = rng_from(seed)
        test_states = tomography_family(dH) + [random_density(rng, dH) for _ in range(2)]
    for rho in test_states:
        rho = check_density(rho, tol)
        lhs = beta.probabilities(G @ rho @ dagger(G))
        rhs = kleisli_extension(f, alpha(rho)).prob
        if np.abs(lhs - rhs).max() > tol.prob:
            return False
    return True


def check_comma_square_ef(
    A: POVM,
    B: POVM,
    f: KleisliMap,
    g,
    test_predicates: Sequence[BoundedFunction] | None = None,
    tol: Tolerance | None = None,
    seed=0,
) -> bool:
    """Does ``∫ (q ∘ f) dA = g† (∫ q dB) g`` hold for every test predicate?

    Both sides are linear in ``q``, so singleton indicators on ``Y`` (the
    default) suffice; two random predicates are added on top.
    """
    tol = resolve(tol)
    G = check_isometry(g, tol)
    _square_shapes(A.hilbert_dim, B.hilbert_dim, A.space, B.space, f, G)
    if test_predicates is None:
        rng = rng_from(seed)
        test_predicates = [BoundedFunction.indicator(B.space, [y]) for y in B.space.atoms]
        test_predicates += [BoundedFunction(B.space, rng.uniform(size=len(B.space))) for _ in range(2)]
    for q in test_predicates:
        lhs = integrate_along(A, f.pullback(q), tol)
        rhs = dagger(G) @ integrate_along(B, q, tol) @ G
        if np.linalg.norm(lhs - rhs, 2) > tol.recon:
            return False
    return True


def _matrix_units(d: int):
    for a in range(d):
        for b in range(d):
            E = np.zeros((d, d), dtype=complex)
            E[a, b] = 1.0
            yield E


def naturality_defect(psi: VnMap, g=None, f: MeasureMorphism | None = None) -> float:
    """Largest entrywise deviation in the square tested by :func:`check_naturality_vn`."""
    if (g is None) == (f is None):
        raise ValueError("give exactly one of an isometry g or a measure morphism f")
    Phi = vn_to_predual(psi)
    worst = 0.0
    if g is not None:
        G = check_isometry(g, psi.tol)
        if G.shape[0] != psi.hilbert_dim:
            raise DimensionMismatch(f"isometry is {G.shape}, ψ acts on C^{psi.hilbert_dim}")
        pulled = VnMap(psi.measure, dagger(G) @ psi.images @ G, psi.tol)
        lhs_map = vn_to_predual(pulled)
        for T in _matrix_units(G.shape[1]):
            lhs = lhs_map.values(T)
            rhs = Phi.values(G @ T @ dagger(G))
            worst = max(worst, float(np.abs(lhs - rhs).max()))
        return worst

    if f.source != psi.measure:
        raise SpaceMismatch("morphism source must be the measure space of ψ")
    Y, nu = f.map.codomain, f.target
    composed_images = [
        psi(linfty_action(f, BoundedFunction.indicator(Y, [y], nu))) for y in Y.atoms
    ]
    lhs_map = vn_to_predual(VnMap(nu, composed_images, psi.tol))
    subsets = list(Y.subsets()) if len(Y) <= 12 else [(y,) for y in Y.atoms]
    for T in _matrix_units(psi.hilbert_dim):
        lhs = lhs_map(T)
        rhs = l1_action(f, Phi(T))
        pos = nu.positive
        worst = max(worst, float(np.abs(lhs.values[pos] - rhs.values[pos]).max(initial=0.0)))
        for N in subsets:
            mask = Y.mask(N)
            diff = np.dot(lhs.values * mask, nu.mass) - np.dot(rhs.values * mask, nu.mass)
            worst = max(worst, float(abs(diff)))
    return worst


def check_naturality_vn(
    psi: VnMap, g=None, f: MeasureMorphism | None = None, tol: Tolerance | None = None
) -> bool:
    """Naturality of ``ψ ↦ Φ_ψ``.

    * isometry ``g : C^m -> C^d`` (``ψ`` lands in ``B(C^d)``):
      ``Φ_{g†ψ(·)g} = Φ_ψ ∘ (T ↦ g T g†)``;
    * measure morphism ``f : (X, μ) -> (Y, ν)`` with ``ψ`` on ``L∞(X, μ)``:
      ``Φ_{ψ ∘ L∞(f)} = L¹(f) ∘ Φ_ψ``, compared pointwise and on every subset.
    """
    return naturality_defect(psi, g=g, f=f) <= resolve(tol or psi.tol).recon
