import numpy as np
import pytest
from hypothesis import given, strategies as st

from povmlab.errors import DimensionMismatch, NotHermitian, NotPSD
from povmlab.operators import (
    check_density,
    check_isometry,
    classify,
    conjugate_by_isometry,
    operator_norm,
    psd_sqrt,
    spectral_decompose,
    trace,
)
from povmlab.sampling import complex_gaussian, random_psd, random_unitary
from povmlab.tolerance import Tolerance

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)
I2 = np.eye(2)
EPS = 1e-9

seeds = st.integers(0, 2**32 - 1)


def reconstruct(w, V):
    return (V * w) @ V.conj().T


class TestSpectralDecompose:
    def test_sigma_z(self):
        w, V = spectral_decompose(SZ)
        assert np.allclose(w, [1, -1])
        assert np.allclose(np.abs(V), np.eye(2))

    def test_identity(self):
        w, _ = spectral_decompose(I2)
        assert np.allclose(w, [1, 1])

    def test_sigma_x(self):
        w, V = spectral_decompose(SX)
        assert np.allclose(w, [1, -1])
        # eigenvectors are (1,1)/√2 and (1,-1)/√2 up to phase
        assert abs(abs(V[:, 0] @ np.array([1, 1]) / np.sqrt(2)) - 1) < 1e-12
        assert abs(abs(V[:, 1] @ np.array([1, -1]) / np.sqrt(2)) - 1) < 1e-12
        assert operator_norm(reconstruct(w, V) - SX) <= EPS

    def test_descending(self, rng):
        H = random_psd(rng, 5) - 2 * np.eye(5)
        w, _ = spectral_decompose(H)
        assert np.all(np.diff(w) <= 0)

    def test_errors(self):
        with pytest.raises(NotHermitian):
            spectral_decompose(np.array([[0, 1], [0, 0]]))
        with pytest.raises(DimensionMismatch):
            spectral_decompose(np.ones((2, 3)))

    @given(seeds, st.integers(1, 6))
    def test_reconstruction(self, seed, d):
        rng = np.random.default_rng(seed)
        G = complex_gaussian(rng, d, d)
        H = G + G.conj().T
        w, V = spectral_decompose(H)
        assert operator_norm(reconstruct(w, V) - H) <= EPS
        assert operator_norm(V.conj().T @ V - np.eye(d)) <= EPS


class TestPsdSqrt:
    def test_diagonal(self):
        assert np.allclose(psd_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))

    def test_identity(self):
        assert np.allclose(psd_sqrt(I2), I2)

    def test_i_plus_sigma_x(self):
        B = psd_sqrt(I2 + SX)
        assert operator_norm(B @ B - (I2 + SX)) <= EPS
        assert operator_norm(B - (I2 + SX) / np.sqrt(2)) <= EPS

    def test_small_negative_clamped(self):
        B = psd_sqrt(np.diag([1.0, -1e-12]))
        assert np.allclose(B, np.diag([1.0, 0.0]))

    def test_not_psd(self):
        with pytest.raises(NotPSD):
            psd_sqrt(np.diag([1.0, -1e-3]))

    def test_stack(self, rng):
        stack = np.array([random_psd(rng, 3) for _ in range(4)])
        roots = psd_sqrt(stack)
        for A, B in zip(stack, roots):
            assert np.allclose(B, psd_sqrt(A))

    @given(seeds, st.integers(1, 6))
    def test_square_and_commute(self, seed, d):
        rng = np.random.default_rng(seed)
        A = random_psd(rng, d, rank=int(rng.integers(1, d + 1)))
        A /= operator_norm(A)
        B = psd_sqrt(A)
        assert operator_norm(B @ B - A) <= EPS
        assert operator_norm(B @ A - A @ B) <= EPS
        assert np.linalg.eigvalsh(B).min() >= -EPS


class TestClassify:
    @pytest.mark.parametrize(
        "A, flags",
        [
            (0.5 * I2, (True, True, True, False)),
            (np.diag([1.0, 0.0]), (True, True, True, True)),
            (np.diag([1.5, 0.0]), (True, True, False, False)),
            (SZ, (True, False, False, False)),
            (np.array([[0, 1], [0, 0]]), (False, False, False, False)),
        ],
    )
    def test_examples(self, A, flags):
        f = classify(A)
        assert (f.hermitian, f.psd, f.effect, f.projection) == flags

    def test_not_square(self):
        with pytest.raises(DimensionMismatch):
            classify(np.ones((2, 3)))

    def test_monotone_on_random_matrices(self, rng):
        for k in range(1000):
            d = int(rng.integers(1, 5))
            kind = k % 4
            if kind == 0:
                A = complex_gaussian(rng, d, d)
            elif kind == 1:
                G = complex_gaussian(rng, d, d)
                A = G + G.conj().T
            elif kind == 2:
                A = random_psd(rng, d) * rng.uniform(0.1, 1.5) / d
            else:
                U = random_unitary(rng, d)
                P = U[:, : int(rng.integers(0, d + 1))]
                A = P @ P.conj().T
            f = classify(A)
            assert not f.projection or f.effect
            assert not f.effect or f.psd
            assert not f.psd or f.hermitian


class TestNormTrace:
    @pytest.mark.parametrize("A, expected", [(SZ, 1.0), (np.diag([2.0, 3.0]), 3.0), (np.zeros((2, 2)), 0.0)])
    def test_norm(self, A, expected):
        assert operator_norm(A) == pytest.approx(expected)

    @pytest.mark.parametrize("A, expected", [(I2, 2), (SX, 0), (np.diag([0.75, 0.25]), 1)])
    def test_trace(self, A, expected):
        assert trace(A) == pytest.approx(expected)

    def test_norm_hermitian_is_max_abs_eigenvalue(self, rng):
        G = complex_gaussian(rng, 4, 4)
        H = G + G.conj().T
        assert operator_norm(H) == pytest.approx(np.abs(np.linalg.eigvalsh(H)).max())

    @given(seeds)
    def test_subadditive(self, seed):
        rng = np.random.default_rng(seed)
        A, B = complex_gaussian(rng, 3, 3), complex_gaussian(rng, 3, 3)
        assert operator_norm(A + B) <= operator_norm(A) + operator_norm(B) + EPS


class TestConjugate:
    def test_identity(self, rng):
        A = complex_gaussian(rng, 3, 3)
        assert np.allclose(conjugate_by_isometry(np.eye(3), A), A)

    def test_embedding(self):
        g = np.array([[1.0], [0.0]])
        assert np.allclose(conjugate_by_isometry(g, [[1.0]]), np.diag([1.0, 0.0]))

    def test_unitary_swap(self):
        assert np.allclose(conjugate_by_isometry(SX, np.diag([1.0, 0.0])), np.diag([0.0, 1.0]))

    def test_adjoint_direction(self):
        g = np.array([[1.0], [0.0]])
        assert np.allclose(conjugate_by_isometry(g, np.diag([0.3, 0.7]), "adjoint"), [[0.3]])

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            conjugate_by_isometry(np.eye(2), np.eye(3))

    @given(seeds, st.integers(1, 5))
    def test_unitary_preserves_trace(self, seed, d):
        rng = np.random.default_rng(seed)
        A = complex_gaussian(rng, d, d)
        U = random_unitary(rng, d)
        assert abs(np.trace(conjugate_by_isometry(U, A)) - np.trace(A)) <= EPS

    def test_preserves_psd(self, rng):
        g = random_unitary(rng, 4)[:, :2]
        B = conjugate_by_isometry(g, random_psd(rng, 2))
        assert classify(B).psd


def test_validators(rng):
    check_density(np.diag([0.75, 0.25]))
    with pytest.raises(ValueError):
        check_density(np.diag([0.75, 0.75]))
    check_isometry(random_unitary(rng, 3)[:, :2])
    with pytest.raises(ValueError):
        check_isometry(np.ones((2, 1)))


def test_tolerance_parse():
    t = Tolerance.parse("1e-6")
    assert t.recon == t.psd == 1e-6
    t = Tolerance.parse("recon=1e-7,psd=1e-8")
    assert (t.recon, t.psd, t.herm) == (1e-7, 1e-8, 1e-9)
    with pytest.raises(ValueError):
        Tolerance.parse("bogus=1")


def test_env_override(monkeypatch):
    from povmlab import tolerance

    monkeypatch.setenv("POVMLAB_TOLERANCE", "norm=1e-4")
    tolerance.set_default_tolerance(None)
    assert tolerance.default_tolerance().norm == 1e-4
