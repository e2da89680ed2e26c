"""Tree-weighted reassembly of walker 1 over a coin-flip partner.

When p2 = 1/2 the partner's steps are i.i.d. fair signs, and walker 1's
position has a second construction: grow a recursive tree that records how
many times each partner step k was consulted (the out-degree d(k)), run an
independent +-1(p1) walk to depth d(k) to accumulate the repeat/reverse
decisions for that step, and sum

    S_n = x1 + sum_k B_k(d(k)) * X_k,

where X_k is the partner's k-th step. The two constructions have the same
law; comparing them is one of the package's cross-checks.
"""

from __future__ import annotations

import numpy as np

from .tree import grow

__all__ = [
    "BiasedWalkBank",
    "biased_square_moments",
    "assemble_walk",
    "normalized_square_sum",
    "conditional_mean_square_sum",
    "sample_final_values",
    "sample_position",
]


def biased_square_moments(m, p1):
    """Mean and variance of the squared endpoint of a +-1(p1) walk.

    For B_m the sum of m i.i.d. +-1 steps with P(+1) = p1 and
    alpha = 2*p1 - 1:

        E B_m^2   = 4*m*p1*(1 - p1) + m^2 * alpha^2
        Var B_m^2 = 2*m*(m-1) * (1 + 2*(m-2)*alpha^2 - (2*m-3)*alpha^4)
    """
    if m < 0:
        raise ValueError(f"m must be >= 0: got {m}")
    alpha = 2.0 * p1 - 1.0
    mean_sq = 4.0 * m * p1 * (1.0 - p1) + float(m) ** 2 * alpha**2
    var_sq = (
        2.0 * m * (m - 1) * (1.0 + 2.0 * (m - 2) * alpha**2 - (2.0 * m - 3) * alpha**4)
    )
    return mean_sq, var_sq


class BiasedWalkBank:
    """Independent biased walks, one per tree vertex.

    Vertex k gets exactly d(k) increments, drawn in vertex order from the
    generator, so total work is O(n) and a bank is reproducible given
    (profile, stream). ``path(k)`` holds the running values B_0..B_{d(k)}
    with B_0 = 0.
    """

    def __init__(self, profile, p1, generator):
        self.n = profile.n
        self.p1 = float(p1)
        degrees = profile.degrees
        total = int(degrees.sum())
        flat = np.where(generator.random(total) < self.p1, 1, -1).astype(np.int64)
        offsets = np.concatenate(([0], np.cumsum(degrees)))
        self._paths = []
        for k in range(self.n):
            inc = flat[offsets[k] : offsets[k + 1]]
            self._paths.append(np.concatenate(([0], np.cumsum(inc))))

    def depth(self, k):
        return len(self._paths[k - 1]) - 1

    def path(self, k):
        """Running values of vertex k's walk, length depth(k) + 1."""
        return self._paths[k - 1]

    def value(self, k, m):
        """B_m for vertex k; raises if the bank is too shallow."""
        p = self._paths[k - 1]
        if m >= len(p):
            raise ValueError(
                f"bank too short for vertex {k}: depth {len(p) - 1}, requested {m}"
            )
        return int(p[m])

    def endpoints(self, degrees):
        """Endpoints B_{d(k)} for all vertices at the given depths."""
        return np.array(
            [self.value(k + 1, int(degrees[k])) for k in range(self.n)],
            dtype=np.int64,
        )


def assemble_walk(profile, bank, rademacher_steps, x1):
    """Rebuild walker 1's position from tree, bank and partner steps.

    rademacher_steps are the partner's steps X_1..X_n, entries +-1. The
    result is bounded by 1 + sum_k d(k) = n in absolute value.
    """
    steps = np.asarray(rademacher_steps, dtype=np.int64)
    if len(steps) != profile.n:
        raise ValueError(f"need {profile.n} partner steps, got {len(steps)}")
    if not np.all(np.abs(steps) == 1):
        raise ValueError("partner steps must be +1 or -1")
    if bank.n != profile.n:
        raise ValueError(f"bank covers {bank.n} vertices, profile has {profile.n}")
    vals = bank.endpoints(profile.degrees)
    return int(x1 + np.dot(vals, steps))


def normalized_square_sum(profile, bank):
    """sum_k B_k(d(k))^2 / (n * (1 + 2*alpha1^2)); concentrates near 1."""
    vals = bank.endpoints(profile.degrees).astype(np.float64)
    alpha = 2.0 * bank.p1 - 1.0
    return float(np.dot(vals, vals) / (profile.n * (1.0 + 2.0 * alpha**2)))


def conditional_mean_square_sum(profile, p1):
    """Expected normalized square sum given the tree:

    (4*(n-1)*p1*(1-p1) + alpha^2 * sum_k d(k)^2) / (n * (1 + 2*alpha^2)).
    """
    alpha = 2.0 * p1 - 1.0
    d = profile.degrees.astype(np.float64)
    num = 4.0 * (profile.n - 1) * p1 * (1.0 - p1) + alpha**2 * float(np.dot(d, d))
    return num / (profile.n * (1.0 + 2.0 * alpha**2))


def sample_final_values(degrees, p1, generator):
    """Endpoints of biased walks at the given depths, one binomial per vertex.

    Law-equal to building a full bank: a +-1(p1) walk of length d ends at
    2*Binomial(d, p1) - d. Used on the ensemble fast path.
    """
    d = np.asarray(degrees, dtype=np.int64)
    return 2 * generator.binomial(d, p1) - d


def sample_position(n, p1, x1_first, x1_second, generator):
    """One draw of walker 1's position at time n via the tree construction.

    Draw order per replica is fixed: attachment choices, then walk
    endpoints, then partner signs.
    """
    profile = grow(n, generator)
    vals = sample_final_values(profile.degrees, p1, generator)
    steps = np.empty(n, dtype=np.int64)
    steps[0] = x1_second
    if n > 1:
        steps[1:] = np.where(generator.random(n - 1) < 0.5, 1, -1)
    return int(x1_first + np.dot(vals, steps))
