import numpy as np
import pytest

from conftest import random_spd
from minksum.spd import SpdError, SpdMatrix, geometric_mean, spd_sqrt, sym_eigen


class TestSymEigen:
    def test_diagonal(self):
        out = sym_eigen(np.diag([3.0, 1.0]))
        assert np.allclose(out.eigenvalues, [1.0, 3.0])
        assert np.allclose(np.abs(out.eigenvectors), [[0, 1], [1, 0]])

    def test_identity(self):
        out = sym_eigen(np.eye(4))
        assert np.allclose(out.eigenvalues, np.ones(4))

    def test_reconstruction_random(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            m = rng.normal(size=(5, 5))
            m = m + m.T
            out = sym_eigen(m)
            v, lam = out.eigenvectors, out.eigenvalues
            assert np.linalg.norm(v @ np.diag(lam) @ v.T - m) <= 1e-10 * (
                1.0 + np.linalg.norm(m)
            )
            assert np.linalg.norm(v.T @ v - np.eye(5)) < 1e-12
            assert np.all(np.diff(lam) >= 0.0)

    def test_deterministic_signs(self):
        rng = np.random.default_rng(3)
        m = random_spd(rng, 4)
        a = sym_eigen(m).eigenvectors
        b = sym_eigen(m.copy()).eigenvectors
        assert np.array_equal(a, b)
        # largest-magnitude entry of each eigenvector is positive
        for col in a.T:
            assert col[np.argmax(np.abs(col))] > 0

    def test_rejects_nonsymmetric(self):
        with pytest.raises(SpdError):
            sym_eigen(np.array([[1.0, 2.0], [0.0, 1.0]]))


class TestSpdMatrix:
    def test_rejects_indefinite(self):
        with pytest.raises(SpdError):
            SpdMatrix(np.diag([1.0, -1.0]))

    def test_rejects_near_singular(self):
        with pytest.raises(SpdError):
            SpdMatrix(np.diag([1.0, 1e-14]))

    def test_symmetrizes_roundoff(self):
        m = np.array([[2.0, 1.0 + 1e-14], [1.0, 2.0]])
        s = SpdMatrix(m)
        assert np.array_equal(s.entries, s.entries.T)

    def test_det(self):
        s = SpdMatrix(np.diag([2.0, 3.0]))
        assert s.det() == pytest.approx(6.0, rel=1e-12)


class TestSqrt:
    def test_diagonal(self):
        r = spd_sqrt(SpdMatrix(np.diag([4.0, 9.0])))
        assert np.allclose(r.entries, np.diag([2.0, 3.0]))

    def test_identity(self):
        r = spd_sqrt(SpdMatrix(np.eye(3)))
        assert np.allclose(r.entries, np.eye(3))

    def test_squares_back(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            m = random_spd(rng, 3)
            r = spd_sqrt(SpdMatrix(m)).entries
            assert np.linalg.norm(r @ r - m) <= 1e-10 * np.linalg.norm(m)

    def test_scaling(self):
        rng = np.random.default_rng(8)
        m = random_spd(rng, 3)
        r = spd_sqrt(SpdMatrix(m)).entries
        rc = spd_sqrt(SpdMatrix(4.0 * m)).entries
        assert np.allclose(rc, 2.0 * r, rtol=1e-12, atol=1e-12)


class TestGeometricMean:
    def test_equal_arguments(self):
        rng = np.random.default_rng(9)
        p = SpdMatrix(random_spd(rng, 3))
        g = geometric_mean(p, p)
        assert np.allclose(g.entries, p.entries, rtol=1e-10)

    def test_commuting_diagonal(self):
        g = geometric_mean(SpdMatrix(np.diag([4.0, 1.0])), SpdMatrix(np.diag([1.0, 4.0])))
        assert np.allclose(g.entries, 2.0 * np.eye(2), rtol=1e-12)

    def test_riccati_identity(self):
        # the mean G is the unique SPD solution of G P^-1 G = Q
        rng = np.random.default_rng(10)
        for _ in range(20):
            p = random_spd(rng, 3)
            q = random_spd(rng, 3)
            g = geometric_mean(SpdMatrix(p), SpdMatrix(q)).entries
            lhs = g @ np.linalg.inv(p) @ g
            assert np.linalg.norm(lhs - q) <= 1e-9 * np.linalg.norm(q)

    def test_symmetric_in_arguments(self):
        rng = np.random.default_rng(12)
        p = SpdMatrix(random_spd(rng, 4))
        q = SpdMatrix(random_spd(rng, 4))
        ab = geometric_mean(p, q).entries
        ba = geometric_mean(q, p).entries
        assert np.linalg.norm(ab - ba) <= 1e-10 * np.linalg.norm(ab)

    def test_commuting_reduces_to_sqrt_product(self):
        rng = np.random.default_rng(13)
        q = np.linalg.qr(rng.normal(size=(3, 3)))[0]
        p1 = q @ np.diag([1.0, 2.0, 3.0]) @ q.T
        p2 = q @ np.diag([4.0, 5.0, 6.0]) @ q.T
        g = geometric_mean(SpdMatrix(p1), SpdMatrix(p2)).entries
        expected = spd_sqrt(SpdMatrix(p1)).entries @ spd_sqrt(SpdMatrix(p2)).entries
        assert np.allclose(g, expected, rtol=1e-9, atol=1e-10)

    def test_dimension_mismatch(self):
        with pytest.raises(SpdError):
            geometric_mean(SpdMatrix(np.eye(2)), SpdMatrix(np.eye(3)))
