"""The coupled pair of memory walkers.

Walker 1 draws a uniformly random past step of walker 2 and repeats it
with probability p1 (reverses it otherwise); walker 2 does the same with
walker 1's past and p2. Both move at every step. Because the steps are
+-1-valued, the conditional law of the next move depends on the past only
through (n, s1, s2), so simulation is O(1) per step.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import _kernels, rng
from .params import DEFAULT_INIT, InitialCondition, ReinforcementParams


@dataclass(frozen=True)
class PairState:
    """Positions of both walkers after n steps."""

    n: int
    s1: int
    s2: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1: got {self.n}")
        for name, s in (("s1", self.s1), ("s2", self.s2)):
            if abs(s) > self.n or (s - self.n) % 2 != 0:
                raise ValueError(f"{name}={s} is not a reachable position at n={self.n}")


@dataclass(frozen=True)
class Trajectory:
    """A simulated path of the pair.

    positions are prefix sums of steps; ``master_seed`` and ``replica``
    identify the Philox stream that produced the path.
    """

    params: ReinforcementParams
    init: InitialCondition
    steps1: np.ndarray
    steps2: np.ndarray
    positions1: np.ndarray
    positions2: np.ndarray
    master_seed: int
    replica: int

    def __len__(self):
        return len(self.positions1)

    def state_at(self, n):
        """PairState after n steps (1-based)."""
        if not 1 <= n <= len(self):
            raise IndexError(f"n must be in [1, {len(self)}]: got {n}")
        return PairState(n, int(self.positions1[n - 1]), int(self.positions2[n - 1]))


def step_probabilities(state, params):
    """Conditional up-step probabilities of the next move of each walker.

    Averaging the repeat/reverse decision over a uniform draw from the
    partner's past steps gives P(next step = +1) = 1/2 + alpha*s_other/(2n)
    for each walker; the two coordinates are conditionally independent
    given the state. The conditional means are exactly alpha1*s2/n and
    alpha2*s1/n.
    """
    if state.n < 1:
        raise ValueError("conditional step law is undefined before the first step")
    pu1 = 0.5 + (params.alpha1 * state.s2) / (2.0 * state.n)
    pu2 = 0.5 + (params.alpha2 * state.s1) / (2.0 * state.n)
    return pu1, pu2


def simulate_pair(params, init=DEFAULT_INIT, n_steps=1000, seed=0, replica=0):
    """Simulate the pair for n_steps steps, O(1) work per step.

    Bit-reproducible: the path is a pure function of (params, init,
    n_steps, seed, replica), with the uniforms drawn from the Philox
    stream (seed, replica). A single trajectory equals replica r of an
    ensemble run with the same master seed.
    """
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1: got {n_steps}")
    m = n_steps - 1
    u = rng.stream(seed, replica).random((1, m, 2))
    s1 = np.empty((1, n_steps), dtype=np.int64)
    s2 = np.empty((1, n_steps), dtype=np.int64)
    _kernels.walk_pair_paths(
        params.alpha1, params.alpha2, init.x1_first, init.x1_second, u, s1, s2
    )
    positions1 = s1[0]
    positions2 = s2[0]
    steps1 = np.diff(positions1, prepend=0).astype(np.int8)
    steps2 = np.diff(positions2, prepend=0).astype(np.int8)
    return Trajectory(
        params=params,
        init=init,
        steps1=steps1,
        steps2=steps2,
        positions1=positions1,
        positions2=positions2,
        master_seed=int(seed),
        replica=int(replica),
    )


def martingale_component(traj):
    """Walker 1's position minus its accumulated conditional drift.

    M_n = S1_n - alpha1 * sum_{i=1}^{n-1} S2_i / i. The increments are
    X1_{n+1} - alpha1*S2_n/n, each bounded by 1 + |alpha1| in absolute
    value, and M is a martingale; ensemble averages of M_n - M_1 provide a
    direct statistical check of the model dynamics.
    """
    if len(traj) < 1:
        raise ValueError("trajectory is empty")
    s1 = traj.positions1.astype(np.float64)
    s2 = traj.positions2.astype(np.float64)
    times = np.arange(1, len(traj) + 1, dtype=np.float64)
    drift = np.concatenate(
        ([0.0], np.cumsum(traj.params.alpha1 * s2[:-1] / times[:-1]))
    )
    return s1 - drift


def write_trajectory_csv(traj, fileobj):
    """Write the path as integer rows ``step,x1,x2,s1,s2``."""
    writer = csv.writer(fileobj, lineterminator="\n")
    writer.writerow(["step", "x1", "x2", "s1", "s2"])
    for k in range(len(traj)):
        writer.writerow(
            [
                k + 1,
                int(traj.steps1[k]),
                int(traj.steps2[k]),
                int(traj.positions1[k]),
                int(traj.positions2[k]),
            ]
        )
