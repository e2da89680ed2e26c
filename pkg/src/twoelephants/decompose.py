"""Eigen-coordinates of the pair and their martingale decompositions.

Projecting (S1_n, S2_n)/n on the drift matrix's eigenvectors gives

    x_n = (S1_n - r*S2_n)/n,   y_n = (S1_n + r*S2_n)/n,

which satisfy scalar recursions x_{n+1} - x_n = (1+lam)/(n+1) *
(-x_n + eps_x) driven by martingale difference sequences eps. Weighted by
the beta/gamma schedules these become closed-form sums; this module
computes the coordinates, the differences, the weighted martingales, and
the closed-form reconstructions used as per-path identity checks.

All arithmetic is done in complex doubles, one code path for real and
imaginary lam.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import check_nontrivial_init
from .spectral import Regime, hat_beta, spectral_params, weight_schedule


@dataclass(frozen=True)
class XYPath:
    """Eigen-coordinate view of one trajectory (times 1..n at index 0..n-1).

    eps_x[j-1] and eps_y[j-1] hold the martingale differences attached to
    the step at time j+1, for j = 1..n-1. mart_x[k-1] = M^x_k with
    M^x_1 = 0, and likewise mart_y.
    """

    lam: complex
    r: complex
    xs: np.ndarray
    ys: np.ndarray
    eps_x: np.ndarray
    eps_y: np.ndarray
    mart_x: np.ndarray
    mart_y: np.ndarray


def xy_decompose(traj, spec=None):
    """Decompose a trajectory into eigen-coordinates and martingale parts.

    Requires alpha1*alpha2 != 0 and lam != +-1 (the |lam| = 1 boundary has
    its own decomposition, see lambda_one_path).
    """
    if spec is None:
        spec = spectral_params(traj.params)
    if spec.regime is Regime.SRW_COUPLED:
        raise ValueError("eigen-decomposition needs alpha1*alpha2 != 0")
    lam, r = spec.lam, spec.r
    if lam in (1.0 + 0.0j, -1.0 + 0.0j):
        raise ValueError("lam = +-1 uses lambda_one_path, not xy_decompose")
    n = len(traj)
    times = np.arange(1, n + 1, dtype=np.float64)
    s1 = traj.positions1.astype(np.float64)
    s2 = traj.positions2.astype(np.float64)
    xs = (s1 - r * s2) / times
    ys = (s1 + r * s2) / times
    x1steps = traj.steps1[1:].astype(np.float64)
    x2steps = traj.steps2[1:].astype(np.float64)
    eps_x = (x1steps - r * x2steps + lam * xs[:-1]) / (1.0 + lam)
    eps_y = (x1steps + r * x2steps - lam * ys[:-1]) / (1.0 - lam)
    sched_p = weight_schedule(lam, n)
    sched_m = weight_schedule(-lam, n)
    mart_x = np.zeros(n, dtype=np.complex128)
    mart_y = np.zeros(n, dtype=np.complex128)
    if n > 1:
        mart_x[1:] = np.cumsum(sched_p.gammas / sched_p.betas[1:] * eps_x)
        mart_y[1:] = np.cumsum(sched_m.gammas / sched_m.betas[1:] * eps_y)
    return XYPath(
        lam=lam, r=r, xs=xs, ys=ys,
        eps_x=eps_x, eps_y=eps_y, mart_x=mart_x, mart_y=mart_y,
    )


def closed_form_xy(path):
    """Rebuild (x_n, y_n) from the martingale differences alone.

    Accumulates the weighted sums through the exact recursions

        x_{n+1} = (1 - gamma_n(+lam)) x_n + gamma_n(+lam) eps_x_{n+1}
        y_{n+1} = (1 - gamma_n(-lam)) y_n + gamma_n(-lam) eps_y_{n+1}

    rather than forming large beta ratios, which keeps the evaluation
    stable in the superdiffusive regime. Algebraically the result equals
    beta_n * (x_1 + sum_j gamma_j/beta_{j+1} eps_{j+1}); numerically it is
    an independent accumulation channel, so comparing it against the
    directly computed coordinates is a real consistency check.
    """
    lam = path.lam
    n = len(path.xs)
    xs_hat = np.empty(n, dtype=np.complex128)
    ys_hat = np.empty(n, dtype=np.complex128)
    ax = path.xs[0]
    ay = path.ys[0]
    xs_hat[0] = ax
    ys_hat[0] = ay
    for j in range(1, n):
        gx = (1.0 + lam) / (j + 1.0)
        gy = (1.0 - lam) / (j + 1.0)
        ax = (1.0 - gx) * ax + gx * path.eps_x[j - 1]
        ay = (1.0 - gy) * ay + gy * path.eps_y[j - 1]
        xs_hat[j] = ax
        ys_hat[j] = ay
    return xs_hat, ys_hat


def reconstruct_positions(path):
    """Invert the eigen-coordinates: S1 = n(x+y)/2, S2 = n(y-x)/(2r)."""
    n = len(path.xs)
    times = np.arange(1, n + 1, dtype=np.float64)
    s1 = times * (path.xs + path.ys) / 2.0
    s2 = times * (path.ys - path.xs) / (2.0 * path.r)
    return s1, s2


def conditional_second_moments(state, spec, params):
    """Conditional second moments of the next martingale differences.

    Given the state at time j (positions s1, s2; x and y the
    eigen-coordinates):

      (1+lam)^2 E[eps_x^2 | F_j] = 1 + a1/a2 - a1*a2*x^2 - 2r*a1*a2*s1*s2/j^2
      (1-lam)^2 E[eps_y^2 | F_j] = 1 + a1/a2 - a1*a2*y^2 + 2r*a1*a2*s1*s2/j^2
      (1-a1*a2) E[eps_x*eps_y | F_j] = 1 - a1/a2 + a1*a2*x*y

    Returns the three conditional moments (not the left-hand prefactored
    forms), as complex numbers.
    """
    a1, a2 = params.alpha1, params.alpha2
    if a1 * a2 == 0.0:
        raise ValueError("conditional moments need alpha1*alpha2 != 0")
    lam, r = spec.lam, spec.r
    j = float(state.n)
    x = (state.s1 - r * state.s2) / j
    y = (state.s1 + r * state.s2) / j
    cross_pos = 2.0 * r * a1 * a2 * state.s1 * state.s2 / (j * j)
    base = 1.0 + a1 / a2
    var_x = (base - a1 * a2 * x * x - cross_pos) / (1.0 + lam) ** 2
    var_y = (base - a1 * a2 * y * y + cross_pos) / (1.0 - lam) ** 2
    cross = (1.0 - a1 / a2 + a1 * a2 * x * y) / (1.0 - a1 * a2)
    return var_x, var_y, cross


@dataclass(frozen=True)
class LambdaOnePath:
    """Decomposition on the |lam| = 1 boundary (alpha1 = alpha2 = +-1).

    One eigen-coordinate is a bounded martingale (y when lam = 1, x when
    lam = -1); the other satisfies the hat-beta closed form

        c_n = hat_beta_n * (c_2 + sum_{j=2}^{n-1} j * eps_{j+1}),

    with eps the martingale difference of that coordinate. ``closed``
    rebuilds the non-martingale coordinate through the equivalent exact
    recursion c_{n+1} = c_n*(n-1)/(n+1) + 2*eps_{n+1}/(n+1).
    """

    lam: float
    xs: np.ndarray
    ys: np.ndarray
    eps: np.ndarray
    martingale_coordinate: str
    closed: np.ndarray


def lambda_one_path(traj):
    """Decompose a path at alpha1 = alpha2 = +-1 (requires n >= 2)."""
    a1, a2 = traj.params.alpha1, traj.params.alpha2
    if not (a1 == a2 and abs(a1) == 1.0):
        raise ValueError("lambda_one_path needs alpha1 = alpha2 = +1 or -1")
    check_nontrivial_init(traj.params, traj.init)
    n = len(traj)
    if n < 2:
        raise ValueError("need at least 2 steps on the |lam| = 1 boundary")
    lam = a1  # r = 1, lam = alpha
    times = np.arange(1, n + 1, dtype=np.float64)
    s1 = traj.positions1.astype(np.float64)
    s2 = traj.positions2.astype(np.float64)
    xs = (s1 - s2) / times
    ys = (s1 + s2) / times
    x1steps = traj.steps1[1:].astype(np.float64)
    x2steps = traj.steps2[1:].astype(np.float64)
    if lam == 1.0:
        # y is the bounded martingale; x has the hat-beta closed form.
        eps = (x1steps - x2steps + xs[:-1]) / 2.0
        target = xs
        coord = "y"
    else:
        eps = (x1steps + x2steps + ys[:-1]) / 2.0
        target = ys
        coord = "x"
    closed = np.empty(n)
    closed[0] = target[0]
    closed[1] = target[1]
    acc = target[1]
    for j in range(2, n):
        # step from time j to j+1: index j holds time j+1
        acc = acc * (j - 1.0) / (j + 1.0) + 2.0 * eps[j - 1] / (j + 1.0)
        closed[j] = acc
    return LambdaOnePath(
        lam=float(lam), xs=xs, ys=ys, eps=eps,
        martingale_coordinate=coord, closed=closed,
    )
