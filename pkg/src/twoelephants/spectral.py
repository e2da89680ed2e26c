"""Spectral parameters and Gamma-ratio weight schedules.

The scaled pair z_n = (S1_n/n, S2_n/n) satisfies a Robbins-Monro-type
recursion z_{n+1} - z_n = (A z_n + noise)/(n+1) with drift matrix

    A = [[-1, alpha2],
         [alpha1, -1]],

whose eigenvalues are -1 - lam and -1 + lam with eigenvectors (1, -r) and
(1, r), where lam = sgn(alpha2)*sqrt(alpha1*alpha2) and
r = sqrt(alpha1/alpha2) (both purely imaginary when the alphas have
opposite signs). Everything downstream keys off lam: regime
classification, limit variances, and the deterministic weights gamma_n,
beta_n that turn the eigen-coordinates into weighted martingale sums.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np
from scipy.special import gamma as _complex_gamma

# Tolerance used for the critical boundary |lam| = 1/2 when the exact
# rational comparison of alpha1*alpha2 with 1/4 does not hit it exactly.
CRITICAL_BOUNDARY_TOL = 1e-12

# Regression guard for the Gamma-ratio sum: the remainder of the closed
# form is O(log n); the coefficient was fitted empirically over three
# decades of n and carries margin. Not a claim from the underlying theory.
GAMMA_RATIO_LOG_GUARD = 1.0


class Regime(str, Enum):
    """Asymptotic regime of the pair, decided by alpha1*alpha2."""

    SRW_COUPLED = "srw_coupled"      # one alpha is zero: that walker is a plain SRW
    DIFFUSIVE = "diffusive"          # 0 < alpha1*alpha2 < 1/4
    CRITICAL = "critical"            # alpha1*alpha2 = 1/4
    SUPERDIFFUSIVE = "superdiffusive"  # alpha1*alpha2 > 1/4
    MIXED_SIGN = "mixed_sign"        # alpha1*alpha2 < 0: always diffusive


@dataclass(frozen=True)
class SpectralParams:
    """Eigen-data of the drift matrix: lam, r, and the regime.

    lam and r are None in the SRW_COUPLED regime (the drift matrix is
    defective there in the relevant sense: one walker ignores the other).
    lam = r * alpha2 always; lam is real iff alpha1*alpha2 > 0 and purely
    imaginary iff alpha1*alpha2 < 0.
    """

    lam: complex | None
    r: complex | None
    regime: Regime


def spectral_params(params):
    """Classify the regime and compute (lam, r) from the alphas.

    The boundary alpha1*alpha2 = 1/4 is decided in exact rational
    arithmetic (floats are dyadic); inputs within CRITICAL_BOUNDARY_TOL of
    the boundary are classified critical as well.
    """
    a1, a2 = params.alpha1, params.alpha2
    prod = a1 * a2
    if prod == 0.0:
        return SpectralParams(lam=None, r=None, regime=Regime.SRW_COUPLED)
    sgn2 = 1.0 if a2 > 0 else -1.0
    if prod > 0:
        lam = complex(sgn2 * math.sqrt(prod), 0.0)
        r = complex(math.sqrt(a1 / a2), 0.0)
        exact = params.alpha_product_exact()
        if exact == Fraction(1, 4) or abs(prod - 0.25) <= CRITICAL_BOUNDARY_TOL:
            regime = Regime.CRITICAL
        elif prod < 0.25:
            regime = Regime.DIFFUSIVE
        else:
            regime = Regime.SUPERDIFFUSIVE
        return SpectralParams(lam=lam, r=r, regime=regime)
    lam = complex(0.0, sgn2 * math.sqrt(-prod))
    r = complex(0.0, math.sqrt(-a1 / a2))
    return SpectralParams(lam=lam, r=r, regime=Regime.MIXED_SIGN)


def beta_weight(n, exponent):
    """beta_n for the branch with signed exponent s (s = +lam or -lam).

    beta_n(s) = prod_{k=1}^{n-1} (1 - (1+s)/(k+1))
              = Gamma(n - s) / (Gamma(1 - s) * Gamma(n + 1)),

    with beta_1 = 1. Real s goes through log-Gamma differences (no
    overflow at large n); complex s goes through the running product,
    which is stable since |1 - gamma_k| <= 1 + O(1/k).
    """
    if n < 1:
        raise ValueError(f"n must be >= 1: got {n}")
    s = complex(exponent)
    if s.imag == 0.0:
        sr = s.real
        if sr == 1.0:
            # Gamma(1 - s) pole: the product telescopes through a zero.
            return 1.0 if n == 1 else 0.0
        return math.exp(
            math.lgamma(n - sr) - math.lgamma(1.0 - sr) - math.lgamma(n + 1)
        )
    out = 1.0 + 0.0j
    for k in range(1, n):
        out *= (k - s) / (k + 1)
    return out


@dataclass(frozen=True)
class WeightSchedule:
    """Deterministic weight tables for one branch.

    gammas[j-1] = (1 + s)/(j + 1)      for j = 1..n-1
    betas[j-1]  = beta_j(s)            for j = 1..n, beta_1 = 1
    hat_betas   = 2/(j*(j-1)) for j = 2..n, populated only when s = +-1
                  (indexed hat_betas[j-2])
    """

    exponent: complex
    gammas: np.ndarray
    betas: np.ndarray
    hat_betas: np.ndarray | None


def weight_schedule(exponent, n):
    """Tables of gamma_j and beta_j for j up to n, via the exact recursion

    beta_{j+1} = beta_j * (1 - gamma_j) with beta_1 = 1.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1: got {n}")
    s = complex(exponent)
    j = np.arange(1, n, dtype=np.float64)
    gammas = (1.0 + s) / (j + 1.0)
    betas = np.empty(n, dtype=np.complex128)
    betas[0] = 1.0
    if n > 1:
        np.cumprod(1.0 - gammas, out=betas[1:])
    hat = None
    if s in (1.0 + 0.0j, -1.0 + 0.0j) and n >= 2:
        jj = np.arange(2, n + 1, dtype=np.float64)
        hat = 2.0 / (jj * (jj - 1.0))
    return WeightSchedule(exponent=s, gammas=gammas, betas=betas, hat_betas=hat)


def hat_beta(n):
    """hat_beta_n = 2/(n*(n-1)), the weight used on the |lam| = 1 boundary."""
    if n < 2:
        raise ValueError(f"n must be >= 2: got {n}")
    return 2.0 / (n * (n - 1.0))


def gamma_ratio_sum(n, exponent):
    """Direct and closed-form values of sum_{j=2}^n Gamma(j)^2/Gamma(j+s)^2.

    Defined for purely imaginary s (the mixed-sign regime). The closed
    form keeps only the leading term,

        Gamma(n+1)^2 / ((1 - 2s) * n * Gamma(n+s)^2),

    and the remainder |direct - closed| is O(log n) (empirical guard
    GAMMA_RATIO_LOG_GUARD). Returns (closed_form, direct_sum), both
    complex.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2: got {n}")
    s = complex(exponent)
    if s.real != 0.0 or s.imag == 0.0:
        raise ValueError(f"exponent must be purely imaginary: got {exponent}")
    # t_j = Gamma(j)/Gamma(j+s), built by the stable running product
    # t_{j+1} = t_j * j/(j+s) from t_2 = 1/Gamma(2+s).
    j = np.arange(2, n + 1, dtype=np.float64)
    ratios = j / (j + s)
    t = np.empty(n - 1, dtype=np.complex128)
    t[0] = 1.0 / _complex_gamma(2.0 + s)
    if n > 2:
        np.cumprod(ratios[:-1], out=t[1:])
        t[1:] *= t[0]
    direct = complex(np.sum(t * t))
    t_np1 = t[-1] * ratios[-1]  # Gamma(n+1)/Gamma(n+1+s)
    top = (n + s) * t_np1       # Gamma(n+1)/Gamma(n+s)
    closed = top * top / ((1.0 - 2.0 * s) * n)
    return closed, direct
