"""Precoder optimizers for the approximate and Monte-Carlo secrecy rates.

Three methods over the trace-ball feasible set tr(v v^H) <= N_t:

* :func:`max_asr_gd`: gradient ascent on the closed-form approximate
  secrecy rate, with power renormalization after each step and step-size
  halving on non-improving steps.
* :func:`max_sr_gd`: the same ascent loop driven by the Monte-Carlo
  secrecy rate under frozen noise samples (common random numbers), so the
  objective and its sample-average gradient are deterministic within a run.
* :func:`max_asr_sca`: lift to W = v v^H, drop the rank-one constraint,
  and maximize the resulting difference of convex log-sum-exp terms by
  successive convex approximation: linearize the convex (eavesdropper)
  term at the current iterate and solve each concave subproblem by
  projected gradient ascent over the spectrahedron
  {W Hermitian, W >= 0, tr(W) <= N_t}.  A rank-one precoder is recovered
  from the solution by :func:`extract_precoder` (leading eigenvector, or
  Gaussian randomization when the solution is not numerically rank one).

Objectives are optimized unclamped; the [.]^+ floor applies only to
reported secrecy rates (clamping would kill gradients wherever the
eavesdropper is momentarily ahead).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import softmax

from .errors import NumericalError
from .metrics import (
    _complex_noise,
    _difference_vectors,
    _mc_per_sample,
    _pair_quadforms,
    QuadFormCache,
    asr,
    log2sumexp2,
    whiten,
)
from .model import ANProjector, ChannelPair, PowerConfig, SMCodebook, noise_covariance

__all__ = [
    "GDParams",
    "SCAParams",
    "OptTrace",
    "default_precoder",
    "random_precoder",
    "asr_gradient",
    "max_asr_gd",
    "max_sr_gd",
    "f1",
    "f2",
    "grad_f1",
    "project_spectrahedron",
    "solve_sca_subproblem",
    "relaxed_asr",
    "max_asr_sca",
    "extract_precoder",
    "power_sweep_rounding",
]

_LN2 = math.log(2.0)

# Smallest backtracking step before a line search gives up.
_STEP_FLOOR = 1e-14


@dataclass(frozen=True)
class GDParams:
    """Gradient-ascent controls: initial step, halving floor, iteration cap.

    The step also halves after an accepted step that improves the objective
    by less than ``min_improve``; without a plateau rule the fixed-step
    ascent can crawl along flat ridges for hundreds of iterations, never
    triggering the rejection path that shrinks the step.
    """

    step_init: float = 0.5
    step_min: float = 0.01
    max_iters: int = 100
    min_improve: float = 5e-3

    def __post_init__(self):
        if self.step_init <= 0 or self.step_min <= 0:
            raise ValueError("step sizes must be positive")
        if self.step_min >= self.step_init:
            raise ValueError("step_min must be below step_init")
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")
        if self.min_improve < 0:
            raise ValueError("min_improve must be nonnegative")


@dataclass(frozen=True)
class SCAParams:
    """Successive-convex-approximation controls.

    ``tol`` stops the outer loop once consecutive relaxed objectives agree;
    ``inner_tol``/``inner_max`` bound the projected-gradient subproblem
    solver; ``rank_tol`` is the eigenvalue-ratio threshold below which the
    lifted solution counts as rank one; ``n_randomizations`` is the number
    of Gaussian rounding candidates otherwise.
    """

    tol: float = 0.001
    max_outer: int = 50
    inner_tol: float = 1e-8
    inner_max: int = 500
    rank_tol: float = 1e-3
    n_randomizations: int = 100

    def __post_init__(self):
        if min(self.tol, self.inner_tol, self.rank_tol) <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_outer < 1 or self.inner_max < 1 or self.n_randomizations < 0:
            raise ValueError("iteration counts must be positive")


@dataclass(frozen=True)
class OptTrace:
    """Optimizer run record: accepted-objective history and the final iterate."""

    objective_history: list[float]
    iterations: int
    converged: bool
    final_vector: np.ndarray


def default_precoder(n_tx: int) -> np.ndarray:
    """All-ones precoding vector (tr(v v^H) = N_t); the no-precoding baseline."""
    return np.ones(n_tx, dtype=complex)


def random_precoder(n_tx: int, rng: np.random.Generator) -> np.ndarray:
    """Random complex Gaussian precoder rescaled onto the power sphere."""
    v = (rng.standard_normal(n_tx) + 1j * rng.standard_normal(n_tx)) / np.sqrt(2)
    return _renormalize(v, n_tx)


def _renormalize(v: np.ndarray, n_tx: int) -> np.ndarray:
    """Rescale onto the power sphere tr(v v^H) = N_t."""
    power = float(np.sum(np.abs(v) ** 2))
    if power == 0.0:
        raise ValueError("cannot renormalize the zero vector")
    return v * np.sqrt(n_tx / power)


def _check_start(v0: np.ndarray, n_tx: int) -> np.ndarray:
    v0 = np.asarray(v0, dtype=complex)
    if len(v0) != n_tx:
        raise ValueError(f"start vector must have length {n_tx}")
    power = float(np.sum(np.abs(v0) ** 2))
    if power == 0.0:
        raise ValueError("start vector must be nonzero (the origin is stationary)")
    if power > n_tx * (1 + 1e-9):
        raise ValueError("start vector violates the power constraint tr(v v^H) <= N_t")
    return v0


def asr_gradient(cache: QuadFormCache, v: np.ndarray) -> np.ndarray:
    """Conjugate (Wirtinger) gradient of the unclamped approximate secrecy rate.

    A perturbation d changes the objective by 2*Re(grad^H d) to first
    order.  Both links' terms are softmax-weighted sums of the cached pair
    matrices applied to v, so evaluation is O(K^2 N_t^2) with K = M*N_t.
    """
    v = np.asarray(v, dtype=complex)
    p1 = cache.p1
    qb = _pair_quadforms(cache.b_flat, v)
    qe = _pair_quadforms(cache.e_flat, v)
    pb = softmax(-0.5 * p1 * qb, axis=1)
    pe = softmax(-0.5 * p1 * qe, axis=1)
    bv = np.einsum("abij,j->abi", cache.b_flat, v, optimize=True)
    ev = np.einsum("abij,j->abi", cache.e_flat, v, optimize=True)
    term_b = np.einsum("ab,abi->i", pb, bv, optimize=True)
    term_e = np.einsum("ab,abi->i", pe, ev, optimize=True)
    return (p1 / (2 * _LN2 * cache.n_signals)) * (term_b - term_e)


def _ascend(value_fn, grad_fn, v0: np.ndarray, n_tx: int, params: GDParams) -> OptTrace:
    """Shared ascent loop: step, renormalize, accept if not worse, else halve.

    Steps that decrease the objective are rejected and halve the step;
    accepted steps that improve by less than ``min_improve`` also halve it
    (plateau rule), so the run terminates once progress stalls.  The step
    size only ever shrinks; the run stops when it falls below ``step_min``
    (converged) or after ``max_iters`` accepted updates.  ``iterations``
    counts accepted updates.
    """
    v = _check_start(v0, n_tx)
    mu = params.step_init
    history = [value_fn(v)]
    grad = grad_fn(v)
    iterations = 0
    converged = False
    while True:
        if mu < params.step_min:
            converged = True
            break
        if iterations >= params.max_iters:
            break
        candidate = _renormalize(v + mu * grad, n_tx)
        value = value_fn(candidate)
        if value >= history[-1]:
            v = candidate
            history.append(value)
            iterations += 1
            grad = grad_fn(v)
            if value - history[-2] < params.min_improve:
                mu /= 2
        else:
            mu /= 2
    return OptTrace(
        objective_history=history,
        iterations=iterations,
        converged=converged,
        final_vector=v,
    )


def max_asr_gd(cache: QuadFormCache, v0: np.ndarray, params: GDParams) -> OptTrace:
    """Gradient ascent on the approximate secrecy rate (unclamped).

    Accepted-iterate objectives are non-decreasing by construction; the
    final vector satisfies tr(v v^H) <= N_t.
    """
    return _ascend(
        lambda v: asr(cache, v, clamp=False),
        lambda v: asr_gradient(cache, v),
        v0,
        cache.n_tx,
        params,
    )


class _SampledSecrecyObjective:
    """Monte-Carlo secrecy rate with frozen noise: deterministic in v.

    Freezes ``n_samp`` whitened-noise realizations per link (identically
    seeded on both links) so that repeated evaluations are a pure function
    of the precoder, making the ascent loop's accept/reject decisions and
    finite-difference checks well defined.
    """

    def __init__(
        self,
        channels: ChannelPair,
        proj: ANProjector,
        powers: PowerConfig,
        codebook: SMCodebook,
        n_samp: int,
        rng: np.random.Generator,
    ):
        if n_samp < 1:
            raise ValueError("n_samp must be >= 1")
        self.codebook = codebook
        self.p1 = powers.p1
        wh_b = whiten(powers.sigma2_b * np.eye(channels.H.shape[0]))
        q_e = noise_covariance(channels.G, proj, powers.p2, powers.sigma2_e)
        wh_e = whiten(q_e)
        self.channel_b = channels.H
        self.channel_e = channels.G
        self.F_b = wh_b @ channels.H
        self.F_e = wh_e @ channels.G
        self.wh_b = wh_b
        self.wh_e = wh_e
        seed = int(rng.integers(0, 2**63))
        self.noise_b = _complex_noise(np.random.default_rng(seed), n_samp, channels.H.shape[0])
        self.noise_e = _complex_noise(np.random.default_rng(seed), n_samp, channels.G.shape[0])
        self.diff = _difference_vectors(codebook)  # (K, K, N_t)
        self.z_b = self.noise_b @ self.F_b.conj()  # rows F^H w_s
        self.z_e = self.noise_e @ self.F_e.conj()

    def value(self, v: np.ndarray) -> float:
        v = np.asarray(v, dtype=complex)
        mi_b = np.mean(
            _mc_per_sample(self.channel_b, self.wh_b, self.codebook, v, self.p1, self.noise_b)
        )
        mi_e = np.mean(
            _mc_per_sample(self.channel_e, self.wh_e, self.codebook, v, self.p1, self.noise_e)
        )
        return float(mi_b - mi_e)

    def _side_gradient(self, F, z, noise, v) -> np.ndarray:
        # d/d(conj v) of the fixed-sample link MI.  With A_kk' =
        # sqrt(p1) F diag(d_kk') and per-sample exponents
        # g = -||A v||^2 - 2 Re((A v)^H w), the chain rule gives
        # dg/d(conj v) = -sqrt(p1) conj(d) * (F^H alpha + F^H w) elementwise.
        K = self.codebook.n_signals
        n_samp = noise.shape[0]
        T = np.sqrt(self.p1) * (F @ (v[:, None] * self.codebook.signal_matrix()))
        alpha = T.T[:, None, :] - T.T[None, :, :]  # (K, K, N)
        norm2 = np.sum(np.abs(alpha) ** 2, axis=2)
        cross = 2 * np.real(np.einsum("abj,sj->sab", alpha.conj(), noise, optimize=True))
        weights = softmax(-(norm2[None, :, :] + cross), axis=2)  # (S, K, K)
        u = np.einsum("rj,abr->abj", F.conj(), alpha, optimize=True)  # F^H alpha
        dbar = self.diff.conj()
        term_u = np.einsum("ab,abj->j", weights.sum(axis=0), dbar * u, optimize=True)
        term_z = np.einsum("sab,abj,sj->j", weights, dbar, z, optimize=True)
        scale = np.sqrt(self.p1) / (K * n_samp * _LN2)
        return scale * (term_u + term_z)

    def gradient(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=complex)
        g_b = self._side_gradient(self.F_b, self.z_b, self.noise_b, v)
        g_e = self._side_gradient(self.F_e, self.z_e, self.noise_e, v)
        return g_b - g_e


def max_sr_gd(
    channels: ChannelPair,
    proj: ANProjector,
    powers: PowerConfig,
    codebook: SMCodebook,
    v0: np.ndarray,
    params: GDParams,
    n_samp: int,
    rng: np.random.Generator,
) -> OptTrace:
    """Gradient ascent on the Monte-Carlo secrecy rate with frozen samples.

    The same ascent loop as :func:`max_asr_gd`, but the objective is the
    sampled (unclamped) secrecy rate under ``n_samp`` noise realizations
    drawn once from ``rng``, and the gradient is the matching
    sample-average analytic gradient.
    """
    objective = _SampledSecrecyObjective(channels, proj, powers, codebook, n_samp, rng)
    return _ascend(objective.value, objective.gradient, v0, codebook.n_tx, params)


# ---------------------------------------------------------------------------
# Lifted (SDR) objective machinery
# ---------------------------------------------------------------------------


def _pair_traces(flat_mats: np.ndarray, W: np.ndarray) -> np.ndarray:
    """Real traces tr(W A_{kk'}) for every pair, shape (K, K)."""
    return np.real(np.einsum("abij,ji->ab", flat_mats, W, optimize=True))


def _lifted_logterms(flat_mats: np.ndarray, W: np.ndarray, p1: float) -> np.ndarray:
    """Per-k log2 sum_k' exp(-p1 tr(W A)/2), shape (K,)."""
    t = _pair_traces(flat_mats, W)
    return log2sumexp2(-0.5 * p1 * t / _LN2, axis=1)


def _mean_lifted_grad(flat_mats: np.ndarray, W: np.ndarray, p1: float) -> np.ndarray:
    """(1/K) sum_k of the lifted log-sum-exp gradient at W (Hermitian)."""
    K = flat_mats.shape[0]
    t = _pair_traces(flat_mats, W)
    weights = softmax(-0.5 * p1 * t, axis=1)
    g = np.einsum("ab,abji->ij", weights, flat_mats.conj(), optimize=True)
    g = -p1 / (2 * _LN2 * K) * g
    return (g + g.conj().T) / 2


def f1(cache: QuadFormCache, W: np.ndarray, n: int, m: int) -> float:
    """Eavesdropper-side lifted log-sum-exp term for transmitted pair (n, m).

    log2 sum_{n',m'} exp(-p1 tr(W E) / 2); convex in W.  The signal power
    p1 is kept inside the exponent so that W = v v^H reproduces the
    vector-form objective exactly.
    """
    k = cache.pair_index(n, m)
    return float(_lifted_logterms_single(cache.e_flat[k], W, cache.p1))


def f2(cache: QuadFormCache, W: np.ndarray, n: int, m: int) -> float:
    """Legitimate-side lifted log-sum-exp term for transmitted pair (n, m)."""
    k = cache.pair_index(n, m)
    return float(_lifted_logterms_single(cache.b_flat[k], W, cache.p1))


def _lifted_logterms_single(mats_k: np.ndarray, W: np.ndarray, p1: float) -> float:
    t = np.real(np.einsum("aij,ji->a", mats_k, W, optimize=True))
    return float(log2sumexp2(-0.5 * p1 * t / _LN2, axis=0))


def grad_f1(cache: QuadFormCache, W0: np.ndarray, n: int, m: int) -> np.ndarray:
    """Gradient of :func:`f1` at W0, in the trace pairing.

    Satisfies f1(W0 + D) ~= f1(W0) + Re tr(grad * D) to first order, and
    the convexity of f1 makes the first-order expansion a global
    underestimator.
    """
    k = cache.pair_index(n, m)
    mats = cache.e_flat[k]
    t = np.real(np.einsum("aij,ji->a", mats, W0, optimize=True))
    weights = softmax(-0.5 * cache.p1 * t)
    g = np.einsum("a,aji->ij", weights, mats.conj(), optimize=True)
    return -cache.p1 / (2 * _LN2) * g


def project_spectrahedron(W: np.ndarray, budget: float) -> np.ndarray:
    """Frobenius-nearest point of {X Hermitian, X >= 0, tr(X) <= budget}.

    Eigendecomposes the symmetrized input and projects the spectrum onto
    {lam >= 0, sum(lam) <= budget}: clip negatives, and if the sum still
    exceeds the budget apply the sorted-threshold uniform shift (simplex
    projection) before re-clipping.
    """
    if budget <= 0:
        raise ValueError("budget must be positive")
    drift = np.linalg.norm(W - W.conj().T)
    if drift > 1e-10 * max(1.0, np.linalg.norm(W)):
        raise ValueError("input is not Hermitian (drift exceeds 1e-10)")
    S = (W + W.conj().T) / 2
    lam, U = np.linalg.eigh(S)
    clipped = np.clip(lam, 0.0, None)
    if clipped.sum() > budget:
        clipped = _project_capped_simplex(lam, budget)
    out = (U * clipped) @ U.conj().T
    return (out + out.conj().T) / 2


def _project_capped_simplex(lam: np.ndarray, budget: float) -> np.ndarray:
    """Euclidean projection of lam onto {x >= 0, sum(x) = budget}."""
    srt = np.sort(lam)[::-1]
    css = np.cumsum(srt)
    j = np.arange(1, len(lam) + 1)
    valid = srt - (css - budget) / j > 0
    rho = int(np.max(np.nonzero(valid)[0]))
    tau = (css[rho] - budget) / (rho + 1)
    return np.clip(lam - tau, 0.0, None)


def relaxed_asr(cache: QuadFormCache, W: np.ndarray) -> float:
    """Lifted approximate secrecy rate at a Hermitian W (unclamped).

    Averages the per-pair difference of the eavesdropper and legitimate
    lifted log-sum-exp terms; at W = v v^H this equals ``asr(cache, v)``.
    """
    inner_e = _lifted_logterms(cache.e_flat, W, cache.p1)
    inner_b = _lifted_logterms(cache.b_flat, W, cache.p1)
    return float(np.mean(inner_e - inner_b))


def _check_feasible(W: np.ndarray, budget: float, slack: float = 1e-6) -> None:
    drift = np.linalg.norm(W - W.conj().T)
    if drift > 1e-8 * max(1.0, np.linalg.norm(W)):
        raise ValueError("W must be Hermitian")
    eigvals = np.linalg.eigvalsh((W + W.conj().T) / 2)
    if eigvals[0] < -slack or np.real(np.trace(W)) > budget * (1 + 1e-9) + slack:
        raise ValueError("W is outside the spectrahedron feasible set")


def solve_sca_subproblem(
    cache: QuadFormCache, W_prev: np.ndarray, params: SCAParams
) -> np.ndarray:
    """One concave surrogate maximization of the lifted objective.

    The convex eavesdropper term is Taylor-linearized at ``W_prev``; the
    resulting concave surrogate (linear minus convex) is maximized over the
    spectrahedron by projected gradient ascent with backtracking, starting
    at ``W_prev``.  The returned point is feasible with surrogate value no
    worse than at the start.
    """
    budget = float(cache.n_tx)
    _check_feasible(W_prev, budget)
    p1 = cache.p1

    lin_grad = _mean_lifted_grad(cache.e_flat, W_prev, p1)  # constant linear part
    lin_const = float(np.mean(_lifted_logterms(cache.e_flat, W_prev, p1)))

    def surrogate(W: np.ndarray) -> float:
        linear = lin_const + float(np.real(np.sum(lin_grad * (W - W_prev).T)))
        return linear - float(np.mean(_lifted_logterms(cache.b_flat, W, p1)))

    W = project_spectrahedron(W_prev, budget)
    current = surrogate(W)
    step = 1.0
    for _ in range(params.inner_max):
        grad = lin_grad - _mean_lifted_grad(cache.b_flat, W, p1)
        improved = False
        while step >= _STEP_FLOOR:
            candidate = project_spectrahedron(W + step * grad, budget)
            value = surrogate(candidate)
            if value > current:
                improved = True
                break
            step /= 2
        if not improved:
            break
        gain = value - current
        W, current = candidate, value
        step *= 2
        if gain < params.inner_tol:
            break
    return W


def max_asr_sca(
    cache: QuadFormCache, v0: np.ndarray, params: SCAParams
) -> tuple[np.ndarray, OptTrace]:
    """Successive convex approximation on the lifted, rank-relaxed objective.

    Starts from W_0 = v0 v0^H and repeats surrogate maximizations until two
    consecutive relaxed objectives differ by at most ``tol`` (or
    ``max_outer`` is hit).  The history is monotone non-decreasing since
    each surrogate underestimates the objective and is solved at least as
    well as its start point.

    Returns the final lifted matrix and a trace whose ``final_vector`` is
    the power-scaled leading eigenvector (use :func:`extract_precoder` for
    randomized rounding).
    """
    v0 = _check_start(v0, cache.n_tx)
    W = np.outer(v0, v0.conj())
    history = [relaxed_asr(cache, W)]
    converged = False
    iterations = 0
    for _ in range(params.max_outer):
        W = solve_sca_subproblem(cache, W, params)
        history.append(relaxed_asr(cache, W))
        iterations += 1
        if abs(history[-1] - history[-2]) <= params.tol:
            converged = True
            break
    lam, U = np.linalg.eigh((W + W.conj().T) / 2)
    lead = np.sqrt(cache.n_tx) * U[:, -1]
    trace = OptTrace(
        objective_history=history,
        iterations=iterations,
        converged=converged,
        final_vector=lead,
    )
    return W, trace


def _rounding_directions(
    W_star: np.ndarray, n_randomizations: int, rng: np.random.Generator
) -> tuple[np.ndarray, list[np.ndarray], np.ndarray]:
    """Leading eigenvector plus unit-norm Gaussian directions shaped by W_star."""
    lam, U = np.linalg.eigh((W_star + W_star.conj().T) / 2)
    if lam[-1] <= 0:
        raise NumericalError("lifted solution has no positive eigenvalue")
    n = W_star.shape[0]
    factor = U * np.sqrt(np.clip(lam, 0.0, None))
    directions = []
    for _ in range(n_randomizations):
        z = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2)
        xi = factor @ z
        norm = np.linalg.norm(xi)
        if norm > 0:
            directions.append(xi / norm)
    return U[:, -1], directions, lam


def extract_precoder(
    cache: QuadFormCache,
    W_star: np.ndarray,
    params: SCAParams,
    rng: np.random.Generator,
) -> np.ndarray:
    """Rank-one precoder from a lifted solution, at full transmit power.

    If the spectrum is numerically rank one (second eigenvalue within
    ``rank_tol`` of zero relative to the first) the scaled leading
    eigenvector is returned.  Otherwise ``n_randomizations`` Gaussian
    candidates shaped by W_star are drawn, each rescaled onto the power
    sphere tr(v v^H) = N_t, and the best by approximate secrecy rate wins;
    the scaled leading eigenvector always competes.

    See :func:`power_sweep_rounding` for rounding that also searches over
    transmit power, which matters when the lifted solution's trace sits
    strictly inside the budget.
    """
    n_tx = cache.n_tx
    lead_dir, directions, lam = _rounding_directions(W_star, params.n_randomizations, rng)
    lead = np.sqrt(n_tx) * lead_dir
    if len(lam) == 1 or lam[-2] / lam[-1] <= params.rank_tol:
        return lead
    candidates = [lead] + [np.sqrt(n_tx) * d for d in directions]
    scores = [asr(cache, c, clamp=False) for c in candidates]
    return candidates[int(np.argmax(scores))]


def power_sweep_rounding(
    cache: QuadFormCache,
    W_star: np.ndarray,
    params: SCAParams,
    rng: np.random.Generator,
    n_power_grid: int = 64,
) -> np.ndarray:
    """Gaussian rounding with a transmit-power line search per direction.

    The rank-relaxed optimum often uses strictly less than the full power
    budget (pushing the eavesdropper term down faster than the legitimate
    one); forcing rounded candidates onto the full-power sphere then
    discards exactly what the lifted solution gained.  Here every direction
    (the leading eigenvector plus ``n_randomizations`` Gaussian draws from
    W_star) is swept over tr(v v^H) in (0, N_t] (quadratic forms scale linearly
    with the power, so a whole ray costs one extra log-sum-exp per grid
    point) and the best (direction, power) pair by approximate secrecy
    rate is returned.  The grid includes both the full budget and
    tr(W_star), so the result is never worse than full-power rounding over
    the same directions.
    """
    n_tx = cache.n_tx
    lead_dir, directions, _ = _rounding_directions(W_star, params.n_randomizations, rng)
    trace_w = float(np.clip(np.real(np.trace(W_star)), n_tx / n_power_grid, n_tx))
    t_grid = np.unique(
        np.concatenate([np.linspace(n_tx / n_power_grid, n_tx, n_power_grid), [trace_w]])
    )
    best_vec, best_val = None, -np.inf
    for direction in [lead_dir] + directions:
        qb = _pair_quadforms(cache.b_flat, direction)
        qe = _pair_quadforms(cache.e_flat, direction)
        xb = -0.5 * cache.p1 * np.multiply.outer(t_grid, qb) / _LN2
        xe = -0.5 * cache.p1 * np.multiply.outer(t_grid, qe) / _LN2
        values = np.mean(log2sumexp2(xe, axis=2) - log2sumexp2(xb, axis=2), axis=1)
        i = int(np.argmax(values))
        if values[i] > best_val:
            best_val = float(values[i])
            best_vec = np.sqrt(t_grid[i]) * direction
    return best_vec
