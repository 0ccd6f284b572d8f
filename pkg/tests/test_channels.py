import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from smsec import NumericalError, an_projector, noise_covariance, sample_channel


def test_sample_channel_deterministic():
    a = sample_channel(np.random.default_rng(99), 3, 5)
    b = sample_channel(np.random.default_rng(99), 3, 5)
    np.testing.assert_array_equal(a, b)


def test_sample_channel_moments():
    rng = np.random.default_rng(0)
    samples = sample_channel(rng, 100, 1000)  # 1e5 entries
    assert abs(np.mean(np.abs(samples) ** 2) - 1.0) <= 0.02
    assert abs(np.mean(samples)) <= 0.01


def test_sample_channel_bad_dims():
    with pytest.raises(ValueError):
        sample_channel(np.random.default_rng(0), 0, 3)


def test_projector_row_vector_channel():
    proj = an_projector(np.array([[1.0, 0.0]], dtype=complex))
    np.testing.assert_allclose(proj.t_an, np.diag([0.0, 1.0]), atol=1e-12)
    assert proj.mu_norm == pytest.approx(1.0, abs=1e-12)


def test_projector_columns_span_null_space(rng):
    # independent oracle: orthonormal null-space basis from scipy
    H = sample_channel(rng, 2, 4)
    proj = an_projector(H)
    basis = scipy.linalg.null_space(H)
    for col in proj.t_an.T:
        residual = col - basis @ (basis.conj().T @ col)
        assert np.linalg.norm(residual) <= 1e-10


def test_projector_square_channel_rejected():
    with pytest.raises(ValueError):
        an_projector(np.eye(2, dtype=complex))


def test_projector_rank_deficient_rejected():
    H = np.array([[1.0, 2.0, 0.0], [2.0, 4.0, 0.0]], dtype=complex)  # rank 1
    with pytest.raises(NumericalError):
        an_projector(H)


@settings(max_examples=25, deadline=None)
@given(
    seed=st.integers(0, 10_000),
    n_b=st.integers(1, 3),
    extra=st.integers(1, 5),
)
def test_projector_invariants(seed, n_b, extra):
    n_tx = n_b + extra
    H = sample_channel(np.random.default_rng(seed), n_b, n_tx)
    proj = an_projector(H)
    t = proj.t_an
    assert abs(np.trace(t @ t.conj().T).real - 1.0) <= 1e-10
    assert np.linalg.norm(H @ t) <= 1e-10 * np.linalg.norm(H)
    # up to the 1/mu scaling the projector is idempotent
    raw = proj.mu_norm * t
    assert np.linalg.norm(raw @ raw - raw) <= 1e-10
    # mu equals sqrt of the null-space dimension for full-rank H
    assert proj.mu_norm == pytest.approx(np.sqrt(n_tx - n_b), abs=1e-9)


def test_noise_covariance_reduces_for_legitimate_channel(rng):
    H = sample_channel(rng, 2, 4)
    proj = an_projector(H)
    Q = noise_covariance(H, proj, p2=0.7, sigma2=0.3)
    np.testing.assert_allclose(Q, 0.3 * np.eye(2), atol=1e-12)


def test_noise_covariance_no_an(rng):
    G = sample_channel(rng, 2, 4)
    proj = an_projector(sample_channel(rng, 2, 4))
    Q = noise_covariance(G, proj, p2=0.0, sigma2=2.5)
    np.testing.assert_array_equal(Q, 2.5 * np.eye(2))


def test_noise_covariance_matches_manual_arithmetic(rng):
    # independent oracle: entry-by-entry loops, no matrix products
    H = sample_channel(rng, 2, 5)
    G = sample_channel(rng, 3, 5)
    proj = an_projector(H)
    p2, sigma2 = 1.0, 1.0
    Q = noise_covariance(G, proj, p2, sigma2)
    A = np.empty((3, 5), dtype=complex)
    for i in range(3):
        for j in range(5):
            A[i, j] = sum(G[i, r] * proj.t_an[r, j] for r in range(5))
    expected = np.empty((3, 3), dtype=complex)
    for i in range(3):
        for k in range(3):
            expected[i, k] = p2 * sum(A[i, j] * np.conj(A[k, j]) for j in range(5))
            if i == k:
                expected[i, k] += sigma2
    np.testing.assert_allclose(Q, expected, atol=1e-12)


def test_noise_covariance_hermitian_pd(rng):
    G = sample_channel(rng, 2, 4)
    proj = an_projector(sample_channel(rng, 2, 4))
    sigma2 = 0.05
    Q = noise_covariance(G, proj, p2=3.0, sigma2=sigma2)
    assert np.linalg.norm(Q - Q.conj().T) <= 1e-12 * np.linalg.norm(Q)
    assert np.linalg.eigvalsh(Q)[0] >= sigma2 * (1 - 1e-9)
