"""Pure NumPy / pure Python kernels for the three hot loops.

Each function has a compiled twin in ``_core.pyx`` that keeps the exact
same expression order and IEEE-754 double operations, so the two backends
produce bit-identical output (tests assert this). Any edit here must be
mirrored there.
"""

from __future__ import annotations

import numpy as np


def walk_pair_paths(alpha1, alpha2, x1, x2, u, s1_out, s2_out):
    """Advance a chunk of coupled walks from pre-drawn uniforms.

    Parameters
    ----------
    alpha1, alpha2 : float
        Reinforcement parameters of the two walkers.
    x1, x2 : int
        First steps, each +1 or -1.
    u : (R, m, 2) float64
        Uniforms in [0, 1); replica r consumes ``u[r, k-1, i-1]`` for
        walker i's step at time k+1.
    s1_out, s2_out : (R, m+1) int64
        Filled with the position paths S_1 .. S_{m+1}.
    """
    nrep, m, _ = u.shape
    s1 = np.full(nrep, x1, dtype=np.int64)
    s2 = np.full(nrep, x2, dtype=np.int64)
    s1_out[:, 0] = s1
    s2_out[:, 0] = s2
    for k in range(1, m + 1):
        twok = 2.0 * k
        # Both up-probabilities use the state at time k; the coordinates
        # are conditionally independent given that state.
        pu1 = 0.5 + (alpha1 * s2) / twok
        pu2 = 0.5 + (alpha2 * s1) / twok
        s1 += np.where(u[:, k - 1, 0] < pu1, 1, -1)
        s2 += np.where(u[:, k - 1, 1] < pu2, 1, -1)
        s1_out[:, k] = s1
        s2_out[:, k] = s2


def dp_joint_table(alpha1, alpha2, x1, x2, n):
    """Exact joint law of the pair at time n, tabulated over up-step counts.

    Returns T of shape (n, n) with T[a, b] = P(walker 1 took a up-steps and
    walker 2 took b up-steps among steps 2..n). Positions follow as
    s1 = x1 + 2a - (n-1), s2 = x2 + 2b - (n-1). O(n^3) time, O(n^2) space.
    """
    table = np.zeros((1, 1))
    table[0, 0] = 1.0
    for k in range(1, n):
        idx = np.arange(k, dtype=np.int64)
        s1v = (x1 + 2 * idx - (k - 1)).astype(np.float64)
        s2v = (x2 + 2 * idx - (k - 1)).astype(np.float64)
        twok = 2.0 * k
        pu1 = 0.5 + (alpha1 * s2v) / twok  # walker-1 up prob, depends on b
        pu2 = 0.5 + (alpha2 * s1v) / twok  # walker-2 up prob, depends on a
        pm1 = 1.0 - pu1
        pm2 = 1.0 - pu2
        up1 = table * pu1[np.newaxis, :]
        dn1 = table * pm1[np.newaxis, :]
        nxt = np.zeros((k + 1, k + 1))
        nxt[1:, 1:] += up1 * pu2[:, np.newaxis]
        nxt[1:, :-1] += up1 * pm2[:, np.newaxis]
        nxt[:-1, 1:] += dn1 * pu2[:, np.newaxis]
        nxt[:-1, :-1] += dn1 * pm2[:, np.newaxis]
        table = nxt
    return table


def moment_recursion_arrays(alpha1, alpha2, x1, x2, n_max):
    """Exact E S, E S^2 and cross-moment sequences for n = 1 .. n_max.

    One step of the recursion advances (m1, m2, q1, q2, c) at time n to
    time n+1 using only the conditional step means alpha_i * s_other / n
    and the conditional independence of the two steps.
    """
    m1 = np.empty(n_max)
    m2 = np.empty(n_max)
    q1 = np.empty(n_max)
    q2 = np.empty(n_max)
    c = np.empty(n_max)
    a = float(x1)
    b = float(x2)
    v1 = 1.0
    v2 = 1.0
    cc = float(x1 * x2)
    m1[0] = a
    m2[0] = b
    q1[0] = v1
    q2[0] = v2
    c[0] = cc
    for k in range(1, n_max):
        fn = float(k)
        na = a + (alpha1 * b) / fn
        nb = b + (alpha2 * a) / fn
        nv1 = v1 + (2.0 * alpha1 * cc) / fn + 1.0
        nv2 = v2 + (2.0 * alpha2 * cc) / fn + 1.0
        ncc = cc + (alpha2 * v1) / fn + (alpha1 * v2) / fn \
            + (alpha1 * alpha2 * cc) / (fn * fn)
        a = na
        b = nb
        v1 = nv1
        v2 = nv2
        cc = ncc
        m1[k] = a
        m2[k] = b
        q1[k] = v1
        q2[k] = v2
        c[k] = cc
    return m1, m2, q1, q2, c
