"""Spin-1/2 direction measurement followed by a spin-component measurement.

The sphere is replaced by a finite grid with equal weights ``4π/N``; the
direction POVM gets the effect ``(w/4π)(id + n·σ)`` at grid point ``n``.
Measuring it and then ``S_n = {½(id ± n·σ)}`` along the observed direction
never yields ``-``, and the ``+`` branch reproduces the direction POVM.
Both facts hold atom by atom, so they are checked at floating-point
tolerance on any grid whose raw effects already sum to the identity.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass
from typing import Iterable, Literal, Sequence

import numpy as np

from .errors import BadParameter, NotUnit
from .operators import operator_norm
from .povm import POVM, repair_normalization
from .sequential import IndexedPOVMFamily, evaluate_composite, sequential_compose
from .spaces import FiniteMeasurableSpace, FiniteMeasure
from .tolerance import Tolerance, resolve

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = np.array([SIGMA_X, SIGMA_Y, SIGMA_Z])
for _m in (SIGMA_X, SIGMA_Y, SIGMA_Z, PAULI):
    _m.setflags(write=False)

ID2 = np.eye(2, dtype=complex)
FOUR_PI = 4 * np.pi
GOLDEN_ANGLE = np.pi * (3 - np.sqrt(5))

Scheme = Literal["fibonacci", "octahedral_symmetrized"]
SCHEMES = ("fibonacci", "octahedral_symmetrized")
DEFAULT_POINTS = 2000
DEFAULT_SCHEME = "octahedral_symmetrized"


def n_dot_sigma(n) -> np.ndarray:
    """``n·σ`` for one vector (shape (3,)) or a stack (shape (k, 3))."""
    return np.tensordot(np.asarray(n, dtype=float), PAULI, axes=1)


@dataclass(frozen=True, eq=False)
class SphereGrid:
    points: np.ndarray
    weights: np.ndarray
    scheme: str

    def __post_init__(self):
        P = np.asarray(self.points, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if P.ndim != 2 or P.shape[1] != 3 or w.shape != (P.shape[0],):
            raise BadParameter("points must be (n, 3) with one weight each")
        if np.abs(np.linalg.norm(P, axis=1) - 1).max() > 1e-12:
            raise BadParameter("grid points must be unit vectors")
        if np.any(w <= 0):
            raise BadParameter("weights must be positive")
        P.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "points", P)
        object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return len(self.weights)

    @property
    def atoms(self) -> tuple[str, ...]:
        return tuple(f"n{i}" for i in range(len(self)))

    @property
    def space(self) -> FiniteMeasurableSpace:
        return FiniteMeasurableSpace(self.atoms)

    @property
    def measure(self) -> FiniteMeasure:
        return FiniteMeasure(self.space, self.weights)

    @property
    def first_moment(self) -> np.ndarray:
        """``Σ w_i n_i``, correctly rounded; exactly zero for antipodally symmetric grids."""
        terms = self.weights[:, None] * self.points
        return np.array([math.fsum(col) for col in terms.T])

    def hemisphere(self, axis=(0.0, 0.0, 1.0)) -> tuple[str, ...]:
        """Atoms with ``n·v > 0``."""
        v = np.asarray(axis, dtype=float)
        return tuple(a for a, p in zip(self.atoms, self.points) if p @ v > 0)


def _fibonacci_points(n: int) -> np.ndarray:
    k = np.arange(n) + 0.5
    z = 1 - 2 * k / n
    r = np.sqrt(1 - z * z)
    phi = GOLDEN_ANGLE * np.arange(n)
    P = np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    return P / np.linalg.norm(P, axis=1, keepdims=True)


def _upper_hemisphere_points(k: int) -> np.ndarray:
    """``k`` directions, one per antipodal pair.

    Up to three are the coordinate axes (z, x, y); beyond that an
    equal-area Fibonacci spiral on the upper hemisphere, which has no
    antipodal pairs among its points.
    """
    axes = np.array([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    if k <= 3:
        return axes[:k]
    j = np.arange(k) + 0.5
    z = 1 - j / k
    r = np.sqrt(1 - z * z)
    phi = GOLDEN_ANGLE * np.arange(k)
    P = np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    return P / np.linalg.norm(P, axis=1, keepdims=True)


def build_grid(n_points: int = DEFAULT_POINTS, scheme: Scheme = DEFAULT_SCHEME) -> SphereGrid:
    """Equal-weight sphere grid.

    ``octahedral_symmetrized`` lists ``k = n_points/2`` directions and then
    their antipodes, so ``Σ w_i n_i = 0`` exactly; 2 points give ``±z`` and
    6 points the octahedron ``±x, ±y, ±z``.  ``fibonacci`` is the usual
    golden-angle spiral, which is only approximately balanced.
    """
    if isinstance(n_points, bool) or not isinstance(n_points, (int, np.integer)) or n_points < 2:
        raise BadParameter(f"need at least 2 grid points, got {n_points!r}")
    if scheme == "fibonacci":
        P = _fibonacci_points(int(n_points))
    elif scheme == "octahedral_symmetrized":
        if n_points % 2:
            raise BadParameter(f"symmetrized grids need an even point count, got {n_points}")
        half = _upper_hemisphere_points(n_points // 2)
        P = np.vstack([half, -half])
    else:
        raise BadParameter(f"unknown scheme {scheme!r}; choose from {SCHEMES}")
    return SphereGrid(P, np.full(len(P), FOUR_PI / len(P)), scheme)


def direction_povm(grid: SphereGrid, tol: Tolerance | None = None) -> POVM:
    """Discretized direction POVM ``D``, normalized by the symmetric repair."""
    raw = (grid.weights / FOUR_PI)[:, None, None] * (ID2 + n_dot_sigma(grid.points))
    return repair_normalization(raw, grid.space, tol)


def spin_component_povm(n, tol: Tolerance | None = None) -> POVM:
    """``S_n`` on the outcomes ``+`` and ``-``."""
    v = np.asarray(n, dtype=float)
    if v.shape != (3,) or abs(np.linalg.norm(v) - 1) > resolve(tol).norm:
        raise NotUnit(f"direction must be a unit 3-vector, got {n!r}")
    ns = n_dot_sigma(v)
    return POVM.from_effects(("+", "-"), [0.5 * (ID2 + ns), 0.5 * (ID2 - ns)], tol)


@dataclass
class SpinReport:
    grid_size: int
    scheme: str
    region_size: int
    minus_branch_norm: float
    plus_branch_deviation: float
    normalization_residual: float
    raw_normalization_residual: float
    quadrature_first_moment: float
    weight_sum_error: float
    elapsed_seconds: float
    threshold: float = 1e-10

    @property
    def claims_hold(self) -> bool:
        return (
            self.minus_branch_norm <= self.threshold
            and self.plus_branch_deviation <= self.threshold
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["claims_hold"] = self.claims_hold
        return d


def run_spin_experiment(
    grid: SphereGrid,
    region: Iterable[str] | None = None,
    tol: Tolerance | None = None,
    threshold: float = 1e-10,
) -> SpinReport:
    """Compose ``D`` with ``S`` over ``grid`` and measure both branches on ``region``.

    ``region`` defaults to the northern hemisphere ``n_z > 0``.
    """
    start = time.perf_counter()
    tol = resolve(tol)
    region = grid.hemisphere() if region is None else tuple(region)
    space = grid.space
    space.indices(region)

    raw_sum = (grid.weights / FOUR_PI) @ (ID2 + n_dot_sigma(grid.points)).reshape(len(grid), 4)
    raw_residual = operator_norm(raw_sum.reshape(2, 2) - ID2)

    D = direction_povm(grid, tol)
    family = IndexedPOVMFamily(space, tuple(spin_component_povm(n, tol) for n in grid.points))
    DS = sequential_compose(D, grid.measure, family, tol)

    minus = evaluate_composite(DS, region, {x: ["-"] for x in region})
    plus = evaluate_composite(DS, region, {x: ["+"] for x in region})
    return SpinReport(
        grid_size=len(grid),
        scheme=grid.scheme,
        region_size=len(region),
        minus_branch_norm=operator_norm(minus),
        plus_branch_deviation=operator_norm(plus - D.evaluate(region)),
        normalization_residual=operator_norm(D.effects.sum(axis=0) - ID2),
        raw_normalization_residual=raw_residual,
        quadrature_first_moment=float(np.linalg.norm(grid.first_moment)),
        weight_sum_error=abs(float(grid.weights.sum()) - FOUR_PI),
        elapsed_seconds=time.perf_counter() - start,
        threshold=threshold,
    )


def region_from_spec(grid: SphereGrid, spec: str) -> tuple[str, ...]:
    """Parse ``north``, ``south``, ``all``, ``none``, ``axis:x,y,z`` or ``indices:i,j,...``."""
    spec = spec.strip()
    if spec == "north":
        return grid.hemisphere((0, 0, 1))
    if spec == "south":
        return grid.hemisphere((0, 0, -1))
    if spec == "all":
        return grid.atoms
    if spec == "none":
        return ()
    kind, _, rest = spec.partition(":")
    try:
        values = [v for v in rest.split(",") if v.strip()]
        if kind == "axis":
            axis = [float(v) for v in values]
            if len(axis) != 3:
                raise ValueError
            return grid.hemisphere(axis)
        if kind == "indices":
            idx = sorted({int(v) for v in values})
            if any(not 0 <= i < len(grid) for i in idx):
                raise ValueError
            return tuple(grid.atoms[i] for i in idx)
    except ValueError:
        pass
    raise BadParameter(f"cannot parse region {spec!r}")
