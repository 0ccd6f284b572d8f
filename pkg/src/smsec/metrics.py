"""Secrecy metrics for finite-alphabet spatial modulation.

Two routes to the same quantity:

* ``mi_monte_carlo`` / ``secrecy_rate_mc``: the exact mutual information of
  the whitened link, estimated by averaging the log-sum-exp likelihood ratio
  over sampled noise realizations.
* ``mi_lower_bound`` / ``asr``: the closed-form Jensen-style approximation
  of each link's mutual information; their difference is the approximate
  secrecy rate (ASR) used as the optimization objective.

The closed form is driven by :class:`QuadFormCache`: for every ordered pair
of SM symbols it precomputes the Hermitian matrix that turns the whitened
pairwise distance into a quadratic form in the precoding vector,

    ||Q^{-1/2} C diag(v) (s_k - s_k')||^2 = v^H A_{kk'} v,
    A_{kk'} = (C^H Q^{-1} C) * conj(d d^H)  elementwise, d = s_k - s_k'.

Note the conjugate on the symbol-difference outer product: it is required
for the identity above to hold per pair (the Hadamard factorization of
diag(v)^H R diag(v) pairs R with the *transpose* of the difference outer
product).  Since d has at most two nonzero entries, each A has at most four.

All log-of-sum-of-exponentials are evaluated with max-shifting so that high
signal-to-noise ratios do not underflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NumericalError
from .model import ANProjector, ChannelPair, PowerConfig, SMCodebook, noise_covariance

__all__ = [
    "QuadFormCache",
    "MIEstimate",
    "whiten",
    "build_cache",
    "mi_lower_bound",
    "asr",
    "mi_monte_carlo",
    "secrecy_rate_mc",
]

_LN2 = math.log(2.0)


def log2sumexp2(x: np.ndarray, axis: int = -1) -> np.ndarray:
    """Max-shifted log2 of a sum of 2**x terms along ``axis``.

    Working in base-2 units end to end keeps the degenerate all-zero case
    exact: log2sumexp2(zeros(K)) == log2(K) bit for bit when K is a power
    of two, which several zero-rate contracts rely on.
    """
    x = np.asarray(x, dtype=float)
    m = np.max(x, axis=axis, keepdims=True)
    out = np.log2(np.sum(np.exp2(x - m), axis=axis)) + np.squeeze(m, axis=axis)
    return out


@dataclass(frozen=True)
class QuadFormCache:
    """Pairwise quadratic-form matrices for both links, plus the Gram factors.

    ``b_mats``/``e_mats`` have shape (N_t, M, N_t, M, N_t, N_t): entry
    [n-1, m-1, n'-1, m'-1] is the Hermitian PSD matrix pairing symbol
    (n, m) against (n', m') on the legitimate / eavesdropper link.  The
    diagonal pairs (n, m) == (n', m') are exactly zero.

    ``gram_b``/``gram_e`` are the whitened channel Grams C^H Q^{-1} C.
    Immutable after construction; safe to share across threads.
    """

    b_mats: np.ndarray
    e_mats: np.ndarray
    gram_b: np.ndarray
    gram_e: np.ndarray
    p1: float
    n_tx: int
    M: int

    @property
    def n_signals(self) -> int:
        return self.M * self.n_tx

    @property
    def b_flat(self) -> np.ndarray:
        """b_mats with the two (n, m) pairs flattened antenna-major: (K, K, N_t, N_t)."""
        K = self.n_signals
        return self.b_mats.reshape(K, K, self.n_tx, self.n_tx)

    @property
    def e_flat(self) -> np.ndarray:
        K = self.n_signals
        return self.e_mats.reshape(K, K, self.n_tx, self.n_tx)

    def pair_index(self, n: int, m: int) -> int:
        """Flatten 1-based (n, m) to the antenna-major linear index."""
        if not (1 <= n <= self.n_tx and 1 <= m <= self.M):
            raise ValueError(f"pair ({n}, {m}) out of range")
        return (n - 1) * self.M + (m - 1)


@dataclass(frozen=True)
class MIEstimate:
    """Monte-Carlo mutual-information estimate in bits per channel use."""

    value: float
    std_error: float
    n_samples: int

    def __post_init__(self):
        if self.value < 0 or self.std_error < 0:
            raise ValueError("estimate and standard error must be nonnegative")


def whiten(Q: np.ndarray) -> np.ndarray:
    """Hermitian inverse square root Q^{-1/2}, so that W Q W^H = I.

    Computed by eigendecomposition of the symmetrized input; raises
    :class:`NumericalError` if Q is not positive definite.
    """
    S = (Q + Q.conj().T) / 2
    eigvals, U = np.linalg.eigh(S)
    if eigvals[0] <= 0:
        raise NumericalError(f"covariance not positive definite (min eig {eigvals[0]:g})")
    W = (U / np.sqrt(eigvals)) @ U.conj().T
    return (W + W.conj().T) / 2


def _difference_vectors(codebook: SMCodebook) -> np.ndarray:
    """All pairwise SM symbol differences, shape (K, K, N_t)."""
    S = codebook.signal_matrix().T  # (K, N_t)
    return S[:, None, :] - S[None, :, :]


def _whitened_gram(C: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Hermitian C^H Q^{-1} C via a positive-definite solve."""
    gram = C.conj().T @ scipy.linalg.solve(Q, C, assume_a="pos")
    return (gram + gram.conj().T) / 2


def build_cache(
    channels: ChannelPair,
    proj: ANProjector,
    powers: PowerConfig,
    codebook: SMCodebook,
) -> QuadFormCache:
    """Precompute the pairwise quadratic-form matrices for both links.

    The legitimate link's interference covariance reduces exactly to
    sigma_b^2 * I because the AN projector nulls H; the eavesdropper's is
    the full AN-plus-noise covariance.
    """
    H, G = channels.H, channels.G
    n_tx, M = codebook.n_tx, codebook.M
    if H.shape[1] != n_tx:
        raise ValueError("channel and codebook transmit dimensions differ")

    # Bob's covariance reduces exactly to sigma_b^2 * I (the projector nulls
    # H); both Grams go through the same solve so a fully symmetric instance
    # yields bit-identical pair matrices on the two links.
    q_b = powers.sigma2_b * np.eye(H.shape[0])
    q_e = noise_covariance(G, proj, powers.p2, powers.sigma2_e)
    gram_b = _whitened_gram(H, q_b)
    gram_e = _whitened_gram(G, q_e)

    diff = _difference_vectors(codebook)  # (K, K, N_t)
    outer = np.einsum("abi,abj->abij", diff.conj(), diff)
    b_flat = gram_b[None, None, :, :] * outer
    e_flat = gram_e[None, None, :, :] * outer

    shape = (n_tx, M, n_tx, M, n_tx, n_tx)
    return QuadFormCache(
        b_mats=b_flat.reshape(shape),
        e_mats=e_flat.reshape(shape),
        gram_b=gram_b,
        gram_e=gram_e,
        p1=powers.p1,
        n_tx=n_tx,
        M=M,
    )


def _pair_quadforms(flat_mats: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Real quadratic forms v^H A_{kk'} v for every pair, shape (K, K)."""
    return np.real(np.einsum("abij,i,j->ab", flat_mats, v.conj(), v, optimize=True))


def _side_mats(cache: QuadFormCache, side: str) -> np.ndarray:
    if side == "bob":
        return cache.b_flat
    if side == "eve":
        return cache.e_flat
    raise ValueError(f"side must be 'bob' or 'eve', got {side!r}")


def mi_lower_bound(cache: QuadFormCache, side: str, v: np.ndarray) -> float:
    """Closed-form link-rate approximation in bits (Jensen-style construction).

    log2(M*N_t) - (1/(M*N_t)) * sum_k log2 sum_k' exp(-p1 * v^H A_{kk'} v / 2).

    Tracks the Monte-Carlo mutual information closely over the whole SNR
    range and is exact in both limits, but despite the name it is not a
    strict one-sided bound: in the mid-SNR transition region it can
    overshoot the true value by a few hundredths of a bit.
    """
    K = cache.n_signals
    q = _pair_quadforms(_side_mats(cache, side), np.asarray(v, dtype=complex))
    inner = log2sumexp2(-0.5 * cache.p1 * q / _LN2, axis=1)
    return float(np.log2(K) - np.mean(inner))


def asr(cache: QuadFormCache, v: np.ndarray, clamp: bool = False) -> float:
    """Approximate secrecy rate: Jensen bound difference between the links.

    Evaluated directly from the cached pair matrices, so the log2(M*N_t)
    terms cancel analytically.  With ``clamp`` the value is floored at 0,
    matching the reported (rather than optimized) secrecy rate.
    """
    v = np.asarray(v, dtype=complex)
    qb = _pair_quadforms(cache.b_flat, v)
    qe = _pair_quadforms(cache.e_flat, v)
    inner_b = log2sumexp2(-0.5 * cache.p1 * qb / _LN2, axis=1)
    inner_e = log2sumexp2(-0.5 * cache.p1 * qe / _LN2, axis=1)
    value = float(np.mean(inner_e - inner_b))
    return max(value, 0.0) if clamp else value


def _complex_noise(rng: np.random.Generator, n_samp: int, dim: int) -> np.ndarray:
    """n_samp i.i.d. CN(0, I_dim) rows."""
    re = rng.standard_normal((n_samp, dim))
    im = rng.standard_normal((n_samp, dim))
    return (re + 1j * im) / np.sqrt(2.0)


def _mc_per_sample(
    channel: np.ndarray,
    whitening: np.ndarray,
    codebook: SMCodebook,
    v: np.ndarray,
    p1: float,
    noise: np.ndarray,
) -> np.ndarray:
    """Per-noise-sample mutual-information estimates, shape (n_samp,).

    For each transmitted (n, m) the integrand is
    log2 sum_{n',m'} exp(||w||^2 - ||alpha + w||^2) with
    alpha = sqrt(p1) * Wh * C * diag(v) * (s_{n,m} - s_{n',m'}); expanding
    the squares leaves exponent -||alpha||^2 - 2 Re(alpha^H w), so only the
    (K, K, N) difference tensor and one contraction with the samples are
    needed.  Noise samples are shared across the outer (n, m) sum.
    """
    K = codebook.n_signals
    F = whitening @ channel  # (N, N_t)
    T = np.sqrt(p1) * (F @ (v[:, None] * codebook.signal_matrix()))  # (N, K)
    alpha = T.T[:, None, :] - T.T[None, :, :]  # (K, K, N)
    norm2 = np.sum(np.abs(alpha) ** 2, axis=2)  # (K, K)
    cross = 2 * np.real(np.einsum("abj,sj->sab", alpha.conj(), noise, optimize=True))
    expo = -(norm2[None, :, :] + cross) / _LN2  # (S, K, K), base-2 units
    inner = log2sumexp2(expo, axis=2)  # (S, K)
    return np.log2(K) - np.mean(inner, axis=1)


def mi_monte_carlo(
    channel: np.ndarray,
    whitening: np.ndarray,
    codebook: SMCodebook,
    v: np.ndarray,
    p1: float,
    n_samp: int,
    rng: np.random.Generator,
) -> MIEstimate:
    """Monte-Carlo mutual information of one link over the whitened channel.

    ``channel`` is the raw link matrix (N x N_t) and ``whitening`` its
    interference-plus-noise inverse square root.  The expectation over the
    whitened noise is replaced by an ``n_samp``-sample average; the reported
    standard error is the per-sample standard deviation divided by
    sqrt(n_samp).  The value is floored at 0 (the estimator can dip below
    zero by sampling noise alone).
    """
    if n_samp < 1:
        raise ValueError("n_samp must be >= 1")
    v = np.asarray(v, dtype=complex)
    noise = _complex_noise(rng, n_samp, channel.shape[0])
    per_sample = _mc_per_sample(channel, whitening, codebook, v, p1, noise)
    value = float(np.mean(per_sample))
    if n_samp > 1:
        std_error = float(np.std(per_sample, ddof=1) / np.sqrt(n_samp))
    else:
        std_error = 0.0
    return MIEstimate(value=max(value, 0.0), std_error=std_error, n_samples=n_samp)


def secrecy_rate_mc(
    channels: ChannelPair,
    proj: ANProjector,
    powers: PowerConfig,
    codebook: SMCodebook,
    v: np.ndarray,
    n_samp: int,
    rng: np.random.Generator,
) -> float:
    """Monte-Carlo secrecy rate [I(bob) - I(eve)]^+ in bits per channel use.

    Both links are estimated with ``n_samp`` noise realizations drawn from
    generators seeded identically (common random numbers), which cancels
    shared sampling noise in the difference.
    """
    # Bob's interference covariance is exactly sigma_b^2 * I (AN is nulled);
    # still run it through whiten() so both links share a code path and a
    # fully symmetric instance (G = H, equal noise) cancels bit for bit.
    wh_b = whiten(powers.sigma2_b * np.eye(channels.H.shape[0]))
    q_e = noise_covariance(channels.G, proj, powers.p2, powers.sigma2_e)
    wh_e = whiten(q_e)

    noise_seed = int(rng.integers(0, 2**63))
    mi_b = mi_monte_carlo(
        channels.H, wh_b, codebook, v, powers.p1, n_samp, np.random.default_rng(noise_seed)
    )
    mi_e = mi_monte_carlo(
        channels.G, wh_e, codebook, v, powers.p1, n_samp, np.random.default_rng(noise_seed)
    )
    return max(mi_b.value - mi_e.value, 0.0)
