"""Closed-form predictions and exact oracles.

Two independent exact computations live here next to the asymptotic
formulas: an O(n) recursion for the first and second moments of the pair,
and an O(n^3) dynamic program for the full joint distribution. They share
no code path with the simulator, so agreement between all three is a
meaningful check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .params import DEFAULT_INIT
from .spectral import Regime, spectral_params

DP_DEFAULT_CAP = 1000


class RegimeError(ValueError):
    """Raised when a prediction is requested outside its regime of validity."""


@dataclass(frozen=True)
class LimitLawPrediction:
    """One walker's limit law: scaling and limit variance.

    scaling_exponent is the power of n in the normalization; log_factor
    marks the extra sqrt(log n) of the critical regime. lil_coefficient is
    the explicit envelope constant for S_n / sqrt(2 n log log n) where one
    is known; None with lil_bound_exists=True means a finite envelope
    exists but its constant is not specified.
    """

    regime: Regime
    walker: int
    scaling_exponent: float
    log_factor: bool
    variance: float | None
    variance_second_walker: float | None
    lil_coefficient: float | None
    lil_bound_exists: bool


def predicted_variance(params, walker=1):
    """Limit variance of the CLT normalization for the given walker.

    srw-coupled (one alpha zero): the learning walker satisfies
        S_n / sqrt((1 + 2*alpha^2) n) -> N(0, 1),
    the non-learning walker is a plain SRW (variance 1).

    same signs, a1*a2 < 1/4:  Var -> (1 + 2*a1^2 - 2*a1*a2)/(1 - 4*a1*a2)
    same signs, a1*a2 = 1/4:  S_n/sqrt(n log n) -> N(0, (a1+a2)/(4*a2))
    opposite signs (always diffusive):
        walker 1: (1 + 2*a1^2 - 2*a1*a2)/(1 - 4*a1*a2), walker 2 swaps a1, a2.

    Superdiffusive parameters have no Gaussian limit for S_n and raise
    RegimeError.
    """
    if walker not in (1, 2):
        raise ValueError(f"walker must be 1 or 2: got {walker}")
    a_own, a_other = _oriented(params, walker)
    spec = spectral_params(params)
    regime = spec.regime
    lil_coeff = None
    lil_exists = True
    if regime is Regime.SRW_COUPLED:
        # The learner (own alpha nonzero, partner's zero) gets the inflated
        # variance 1 + 2*alpha^2; a walker with alpha = 0 is a plain SRW.
        variance = _srw_coupled_variance(params, walker)
        other = _srw_coupled_variance(params, 3 - walker)
        lil_coeff = 1.0 + math.sqrt(2.0) * abs(a_own) if _is_learner(params, walker) else 1.0
        return LimitLawPrediction(
            regime=regime, walker=walker, scaling_exponent=0.5, log_factor=False,
            variance=variance, variance_second_walker=other,
            lil_coefficient=lil_coeff, lil_bound_exists=True,
        )
    if regime is Regime.SUPERDIFFUSIVE:
        raise RegimeError(
            "no Gaussian limit for S_n itself when alpha1*alpha2 > 1/4"
        )
    if regime is Regime.CRITICAL:
        variance = (params.alpha1 + params.alpha2) / (4.0 * a_own)
        other = (params.alpha1 + params.alpha2) / (4.0 * a_other)
        return LimitLawPrediction(
            regime=regime, walker=walker, scaling_exponent=0.5, log_factor=True,
            variance=variance, variance_second_walker=other,
            lil_coefficient=None, lil_bound_exists=True,
        )
    # Diffusive (same signs below the boundary) and mixed signs share the
    # variance formula; they differ only in which lam is real.
    prod = params.alpha1 * params.alpha2
    variance = (1.0 + 2.0 * a_own**2 - 2.0 * prod) / (1.0 - 4.0 * prod)
    other = (1.0 + 2.0 * a_other**2 - 2.0 * prod) / (1.0 - 4.0 * prod)
    return LimitLawPrediction(
        regime=regime, walker=walker, scaling_exponent=0.5, log_factor=False,
        variance=variance, variance_second_walker=other,
        lil_coefficient=None, lil_bound_exists=True,
    )


def _oriented(params, walker):
    if walker == 1:
        return params.alpha1, params.alpha2
    return params.alpha2, params.alpha1


def _is_learner(params, walker):
    a_own, a_other = _oriented(params, walker)
    return a_own != 0.0 and a_other == 0.0


def _srw_coupled_variance(params, walker):
    a_own, a_other = _oriented(params, walker)
    if a_own != 0.0 and a_other == 0.0:
        return 1.0 + 2.0 * a_own**2
    return 1.0


@dataclass(frozen=True)
class FluctuationPrediction:
    """Law of n^(|lam|-1/2) * (S_n/n^|lam| - W) in the superdiffusive regime.

    For |lam| in (1/2, 1) this is a centered Gaussian with the stated
    variance. On the boundary |lam| = 1 the limit is a Gaussian mixture
    whose characteristic function is E exp(-(1 - W^2) t^2 / 3); use
    mixture_cf with W samples to evaluate it.
    """

    walker: int
    abs_lam: float
    variance: float | None
    mixture: bool


def fluctuation_law(params, walker=1):
    """Fluctuation prediction for |lam| in (1/2, 1].

    Variance formula for |lam| < 1:
        (1 + a1/a2) * sqrt(a1*a2) / (4*a1*a2 - 1)
    (swap a1, a2 for walker 2).
    """
    if walker not in (1, 2):
        raise ValueError(f"walker must be 1 or 2: got {walker}")
    spec = spectral_params(params)
    if spec.regime is not Regime.SUPERDIFFUSIVE:
        raise RegimeError("fluctuation law applies only when |lam| > 1/2")
    abs_lam = abs(spec.lam)
    if abs_lam == 1.0:
        return FluctuationPrediction(walker=walker, abs_lam=1.0, variance=None, mixture=True)
    a_own, a_other = _oriented(params, walker)
    prod = params.alpha1 * params.alpha2
    variance = (1.0 + a_own / a_other) * math.sqrt(prod) / (4.0 * prod - 1.0)
    return FluctuationPrediction(
        walker=walker, abs_lam=abs_lam, variance=variance, mixture=False
    )


def mixture_cf(t, w_values):
    """E exp(-(1 - W^2) t^2 / 3) over the given W samples (plug-in mixture)."""
    w = np.asarray(w_values, dtype=np.float64)
    return float(np.mean(np.exp(-(1.0 - w * w) * t * t / 3.0)))


@dataclass(frozen=True)
class LilEnvelope:
    """Upper envelope for max_k |S_k| / sqrt(2 k log log k).

    coefficient is the explicit constant where one is known (the
    srw-coupled case: 1 + sqrt(2)|alpha| for the learner, 1 for a plain
    SRW); None with bound_exists=True means a finite constant exists but
    is unspecified. value_at is the envelope evaluated at n when the
    coefficient is known.
    """

    coefficient: float | None
    bound_exists: bool
    normalizer: str
    value_at: float | None


def lil_envelope(params, n=None, walker=1):
    """Law-of-the-iterated-logarithm envelope data for the given walker."""
    if walker not in (1, 2):
        raise ValueError(f"walker must be 1 or 2: got {walker}")
    a_own, a_other = _oriented(params, walker)
    spec = spectral_params(params)
    if spec.regime is Regime.SRW_COUPLED:
        coeff = 1.0 + math.sqrt(2.0) * abs(a_own) if _is_learner(params, walker) else 1.0
        value = None
        if n is not None and n >= 3:
            value = coeff * math.sqrt(2.0 * n * math.log(math.log(n)))
        return LilEnvelope(coefficient=coeff, bound_exists=True,
                           normalizer="sqrt_2n_loglog", value_at=value)
    if spec.regime in (Regime.DIFFUSIVE, Regime.MIXED_SIGN):
        return LilEnvelope(coefficient=None, bound_exists=True,
                           normalizer="sqrt_n_loglog", value_at=None)
    if spec.regime is Regime.CRITICAL:
        return LilEnvelope(coefficient=None, bound_exists=True,
                           normalizer="sqrt_n_logn_logloglog", value_at=None)
    # Superdiffusive: S_n grows like n^|lam|, no loglog envelope.
    return LilEnvelope(coefficient=None, bound_exists=False,
                       normalizer="none", value_at=None)


@dataclass(frozen=True)
class MomentState:
    """Exact moments at one time: means, second moments, cross moment."""

    n: int
    m1: float
    m2: float
    q1: float
    q2: float
    c: float

    @property
    def var1(self):
        return self.q1 - self.m1**2

    @property
    def var2(self):
        return self.q2 - self.m2**2


class MomentTable:
    """Sequence of exact MomentStates for n = 1..n_max (index n-1)."""

    def __init__(self, m1, m2, q1, q2, c):
        self.m1 = m1
        self.m2 = m2
        self.q1 = q1
        self.q2 = q2
        self.c = c

    def __len__(self):
        return len(self.m1)

    def __getitem__(self, i):
        if isinstance(i, slice):
            raise TypeError("MomentTable does not support slicing; index by position")
        if i < 0:
            i += len(self)
        return MomentState(
            n=i + 1,
            m1=float(self.m1[i]), m2=float(self.m2[i]),
            q1=float(self.q1[i]), q2=float(self.q2[i]), c=float(self.c[i]),
        )

    def state(self, n):
        """MomentState at time n (1-based)."""
        if not 1 <= n <= len(self):
            raise IndexError(f"n must be in [1, {len(self)}]: got {n}")
        return self[n - 1]

    def variance1(self):
        return self.q1 - self.m1**2

    def variance2(self):
        return self.q2 - self.m2**2


def moment_recursion(params, init=DEFAULT_INIT, n_max=1000):
    """Exact E S, E S^2 and E S1*S2 for every n <= n_max, O(n_max) time.

    One step advances the five moments using only the conditional step
    means alpha_i*s_other/n and conditional independence:

        m1' = m1 + a1*m2/n            q1' = q1 + 2*a1*c/n + 1
        m2' = m2 + a2*m1/n            q2' = q2 + 2*a2*c/n + 1
        c'  = c + a2*q1/n + a1*q2/n + a1*a2*c/n^2
    """
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1: got {n_max}")
    arrays = _kernels.moment_recursion_arrays(
        params.alpha1, params.alpha2, init.x1_first, init.x1_second, n_max
    )
    return MomentTable(*arrays)


@dataclass(frozen=True)
class DistributionTable:
    """Exact joint law of (S1_n, S2_n) on the parity-respecting lattice.

    probs[i, j] = P(S1_n = s1_values[i], S2_n = s2_values[j]).
    """

    n: int
    s1_values: np.ndarray
    s2_values: np.ndarray
    probs: np.ndarray

    def total_mass(self):
        return float(self.probs.sum())

    def marginal1(self):
        return self.probs.sum(axis=1)

    def marginal2(self):
        return self.probs.sum(axis=0)

    def prob(self, s1, s2):
        i = np.searchsorted(self.s1_values, s1)
        j = np.searchsorted(self.s2_values, s2)
        ok1 = i < len(self.s1_values) and self.s1_values[i] == s1
        ok2 = j < len(self.s2_values) and self.s2_values[j] == s2
        return float(self.probs[i, j]) if ok1 and ok2 else 0.0

    def moments(self):
        """MomentState computed from the table (for cross-checks)."""
        s1 = self.s1_values.astype(np.float64)
        s2 = self.s2_values.astype(np.float64)
        p1 = self.marginal1()
        p2 = self.marginal2()
        m1 = float(np.dot(p1, s1))
        m2 = float(np.dot(p2, s2))
        q1 = float(np.dot(p1, s1 * s1))
        q2 = float(np.dot(p2, s2 * s2))
        c = float(s1 @ self.probs @ s2)
        return MomentState(n=self.n, m1=m1, m2=m2, q1=q1, q2=q2, c=c)


def exact_distribution_dp(params, init=DEFAULT_INIT, n=10, max_n=DP_DEFAULT_CAP):
    """Exact joint distribution at time n by dynamic programming.

    Valid because the pair is Markov in (n, s1, s2) with conditionally
    independent coordinates. The full parity-respecting lattice is
    carried, nothing is truncated: O(n^3) time, O(n^2) space, so runs are
    capped (default 1000).
    """
    if n < 1:
        raise ValueError(f"n must be >= 1: got {n}")
    if n > max_n:
        raise ValueError(f"n={n} exceeds the DP cap {max_n}; raise max_n explicitly")
    table = _kernels.dp_joint_table(
        params.alpha1, params.alpha2, init.x1_first, init.x1_second, n
    )
    offsets = 2 * np.arange(n, dtype=np.int64) - (n - 1)
    return DistributionTable(
        n=n,
        s1_values=init.x1_first + offsets,
        s2_values=init.x1_second + offsets,
        probs=table,
    )
