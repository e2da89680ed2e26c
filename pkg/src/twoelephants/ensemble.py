"""Deterministic parallel ensemble engine and statistical verifiers.

Replica r of a run with master seed s always consumes the Philox stream
(s, r), so results are bit-identical for any worker count or chunking.
Chunks of replicas are simulated together (the compiled kernel releases
the GIL, so threads give real parallelism); reducers write per-replica
results by index and summaries are computed afterwards in index order
with compensated summation, keeping aggregation order-stable.
"""

from __future__ import annotations

import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

from . import _kernels, rng
from .construction import sample_position
from .params import DEFAULT_INIT, check_nontrivial_init
from .spectral import Regime, spectral_params
from .theory import (
    RegimeError,
    fluctuation_law,
    lil_envelope,
    mixture_cf,
    moment_recursion,
    predicted_variance,
)

KINDS = ("clt", "critical", "superdiffusive", "fluctuation", "equivalence", "lil_scan")

# Asymptotic critical coefficient for the one-sample KS statistic at the
# 1% level: D < KS_ONE_SAMPLE_1PCT / sqrt(R) under the null (the Gaussian
# target is fully specified, no parameters are estimated, so no Lilliefors
# correction applies).
KS_ONE_SAMPLE_1PCT = 1.63

# Coefficient of the two-sample equivalence threshold D < c * sqrt(2/R)
# for equal sample sizes R. Deliberately conservative (the asymptotic 1%
# point would be 1.63).
KS_TWO_SAMPLE_COEFF = 1.95

_CHUNK_BYTES = 192 * 2**20  # per-worker buffer budget


@dataclass(frozen=True)
class EnsembleConfig:
    """One ensemble experiment: what to simulate and how it is keyed."""

    params: object
    init: object = DEFAULT_INIT
    n_steps: int = 1000
    replicas: int = 100
    master_seed: int = 0
    kind: str = "clt"
    horizon_for_w: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}; one of {KINDS}")
        if self.n_steps < 1:
            raise ValueError(f"n_steps must be >= 1: got {self.n_steps}")
        if self.replicas < 2:
            raise ValueError(f"replicas must be >= 2: got {self.replicas}")
        if self.horizon_for_w is not None and self.horizon_for_w <= self.n_steps:
            raise ValueError(
                f"horizon_for_w must exceed n_steps: got {self.horizon_for_w} <= {self.n_steps}"
            )


@dataclass
class EnsembleSummary:
    """Per-replica scaled statistics plus their summary and test values."""

    kind: str
    n_steps: int
    replicas: int
    master_seed: int
    values: np.ndarray
    sample_mean: float
    sample_variance: float
    se_mean: float
    se_variance: float
    target_mean: float | None = None
    target_variance: float | None = None
    ks_statistic: float | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        out = {
            "kind": self.kind,
            "n_steps": self.n_steps,
            "replicas": self.replicas,
            "master_seed": self.master_seed,
            "sample_mean": self.sample_mean,
            "sample_variance": self.sample_variance,
            "se_mean": self.se_mean,
            "se_variance": self.se_variance,
            "target_mean": self.target_mean,
            "target_variance": self.target_variance,
            "ks_statistic": self.ks_statistic,
            "values": [float(v) for v in self.values],
        }
        out.update(_jsonable(self.extra))
        return out


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


# ---------------------------------------------------------------------------
# engine


def _chunk_size(n_steps, replicas, threads):
    per_replica = 40 * max(n_steps, 1)  # paths (2x8) + uniforms (2x8) + slack
    budget = _CHUNK_BYTES // max(threads, 1)
    return int(max(1, min(replicas, budget // per_replica, 2048)))


def _ordered_parallel(tasks, fn, threads):
    """Apply fn over tasks, yielding results in task order."""
    if threads <= 1:
        for t in tasks:
            yield fn(t)
        return
    with ThreadPoolExecutor(max_workers=threads) as ex:
        pending = deque()
        for t in tasks:
            pending.append(ex.submit(fn, t))
            if len(pending) >= 2 * threads:
                yield pending.popleft().result()
        while pending:
            yield pending.popleft().result()


def iter_path_chunks(params, init, n_steps, replicas, master_seed,
                     threads=1, replica_offset=0):
    """Yield (start_index, s1_paths, s2_paths) for all replicas, in order.

    Path arrays have shape (chunk, n_steps) and hold positions at times
    1..n_steps. Replica start_index + i consumes stream
    (master_seed, replica_offset + start_index + i).
    """
    csize = _chunk_size(n_steps, replicas, threads)
    starts = range(0, replicas, csize)

    def simulate(start):
        count = min(csize, replicas - start)
        m = n_steps - 1
        u = np.empty((count, m, 2))
        for i in range(count):
            u[i] = rng.stream(master_seed, replica_offset + start + i).random((m, 2))
        s1 = np.empty((count, n_steps), dtype=np.int64)
        s2 = np.empty((count, n_steps), dtype=np.int64)
        _kernels.walk_pair_paths(
            params.alpha1, params.alpha2, init.x1_first, init.x1_second, u, s1, s2
        )
        return start, s1, s2

    yield from _ordered_parallel(starts, simulate, threads)


def _collect_positions(config, threads, times):
    """Positions of both walkers at the requested times, per replica."""
    cols = [t - 1 for t in times]
    out = {t: (np.empty(config.replicas), np.empty(config.replicas)) for t in times}
    for start, s1, s2 in iter_path_chunks(
        config.params, config.init, config.n_steps, config.replicas,
        config.master_seed, threads,
    ):
        stop = start + s1.shape[0]
        for t, col in zip(times, cols):
            out[t][0][start:stop] = s1[:, col]
            out[t][1][start:stop] = s2[:, col]
    return out


def _basic_stats(values):
    r = len(values)
    vals = [float(v) for v in values]
    mean = math.fsum(vals) / r
    var = math.fsum((v - mean) ** 2 for v in vals) / (r - 1)
    m4 = math.fsum((v - mean) ** 4 for v in vals) / r
    var_of_var = (m4 - (r - 3) / (r - 1) * var * var) / r
    return mean, var, math.sqrt(var / r), math.sqrt(max(var_of_var, 0.0))


def _summary(config, values, **kw):
    mean, var, se_m, se_v = _basic_stats(values)
    return EnsembleSummary(
        kind=config.kind, n_steps=config.n_steps, replicas=config.replicas,
        master_seed=config.master_seed, values=np.asarray(values, dtype=np.float64),
        sample_mean=mean, sample_variance=var, se_mean=se_m, se_variance=se_v, **kw,
    )


# ---------------------------------------------------------------------------
# statistics


def ks_against_gaussian(samples, mean, variance):
    """One-sample Kolmogorov-Smirnov statistic against a fixed Gaussian."""
    if variance <= 0:
        raise ValueError(f"variance must be positive: got {variance}")
    x = np.sort(np.asarray(samples, dtype=np.float64))
    r = len(x)
    if r < 50:
        raise ValueError(f"need at least 50 samples: got {r}")
    cdf = ndtr((x - mean) / math.sqrt(variance))
    i = np.arange(1, r + 1, dtype=np.float64)
    d_plus = np.max(i / r - cdf)
    d_minus = np.max(cdf - (i - 1.0) / r)
    return float(max(d_plus, d_minus))


def ks_two_sample(a, b):
    """Two-sample Kolmogorov-Smirnov statistic (sup-distance of ECDFs)."""
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    both = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, both, side="right") / len(a)
    cdf_b = np.searchsorted(b, both, side="right") / len(b)
    return float(np.max(np.abs(cdf_a - cdf_b)))


# ---------------------------------------------------------------------------
# experiments


def run_ensemble(config, threads=1):
    """Run the configured experiment; deterministic given master_seed."""
    kind = config.kind
    if kind == "clt":
        return _run_clt(config, threads)
    if kind == "critical":
        return _run_critical(config, threads)
    if kind == "superdiffusive":
        return estimate_w(config, threads)
    if kind == "fluctuation":
        return fluctuation_experiment(config, threads)
    if kind == "equivalence":
        return construction_equivalence(
            config.params, config.n_steps, config.replicas, config.master_seed,
            init=config.init, threads=threads,
        )
    if kind == "lil_scan":
        return lil_scan(config, threads)
    raise ValueError(f"unknown experiment kind {kind!r}")


def _run_clt(config, threads):
    n = config.n_steps
    table = moment_recursion(config.params, config.init, n)
    st = table.state(n)
    sqrt_n = math.sqrt(n)
    pos = _collect_positions(config, threads, [n])
    s1, s2 = pos[n]
    values = s1 / sqrt_n
    target_mean = st.m1 / sqrt_n
    target_var = st.var1 / n
    ks = ks_against_gaussian(values, target_mean, target_var) if len(values) >= 50 else None
    try:
        asym = predicted_variance(config.params, walker=1).variance
    except RegimeError:
        asym = None
    w2_mean, w2_var, _, _ = _basic_stats(s2 / sqrt_n)
    return _summary(
        config, values,
        target_mean=target_mean, target_variance=target_var, ks_statistic=ks,
        extra={
            "asymptotic_variance": asym,
            "exact_variance_over_n": st.var1 / n,
            "walker2_sample_mean": w2_mean,
            "walker2_sample_variance": w2_var,
            "walker2_exact_variance_over_n": st.var2 / n,
        },
    )


def _run_critical(config, threads):
    n = config.n_steps
    if n < 3:
        raise ValueError("critical scaling needs n_steps >= 3")
    table = moment_recursion(config.params, config.init, n)
    st = table.state(n)
    scale = math.sqrt(n * math.log(n))
    pos = _collect_positions(config, threads, [n])
    s1, _ = pos[n]
    # Center by the exact mean: the asymptotic statement absorbs the
    # O(n^lam) mean drift, a finite-n sample should not.
    values = (s1 - st.m1) / scale
    target_var = st.var1 / (n * math.log(n))
    ks = ks_against_gaussian(values, 0.0, target_var) if len(values) >= 50 else None
    pred = predicted_variance(config.params, walker=1)
    return _summary(
        config, values,
        target_mean=0.0, target_variance=target_var, ks_statistic=ks,
        extra={
            "asymptotic_variance": pred.variance,
            "exact_over_asymptotic": target_var / pred.variance,
        },
    )


def estimate_w(config, threads):
    """Per-replica estimates of the almost-sure limit W = lim S1_n / n^|lam|.

    Also reports the coupled gap |S1/n^lam - sgn(a2)*sqrt(a1/a2)*S2/n^lam|,
    which tends to zero because both walkers share the same limit up to
    the coupling factor.
    """
    spec = spectral_params(config.params)
    if spec.regime is not Regime.SUPERDIFFUSIVE:
        raise RegimeError("W estimation applies only when alpha1*alpha2 > 1/4")
    abs_lam = abs(spec.lam)
    n = config.n_steps
    scale = n**abs_lam
    coupling = math.copysign(1.0, config.params.alpha2) * math.sqrt(
        config.params.alpha1 / config.params.alpha2
    )
    pos = _collect_positions(config, threads, [n])
    s1, s2 = pos[n]
    w_hat = s1 / scale
    gaps = np.abs(w_hat - coupling * (s2 / scale))
    return _summary(
        config, w_hat,
        extra={
            "abs_lam": abs_lam,
            "coupling_factor": coupling,
            "median_coupled_gap": float(np.median(gaps)),
            "max_coupled_gap": float(np.max(gaps)),
            "gaps": gaps,
        },
    )


def fluctuation_experiment(config, threads=1, t_grid=(0.5, 1.0)):
    """Scaled fluctuation of S1_n/n^|lam| around its almost-sure limit.

    W is proxied per replica by continuing the same path to the horizon N
    and using S1_N/N^|lam|; with N >= 100 n the proxy error sits an order
    of magnitude below the fluctuation scale. For |lam| < 1 the sample
    variance is compared against the predicted Gaussian variance; on the
    boundary |lam| = 1 the empirical characteristic function is compared
    against the plug-in W-mixture E exp(-(1 - W^2) t^2 / 3).
    """
    spec = spectral_params(config.params)
    if spec.regime is not Regime.SUPERDIFFUSIVE or spec.lam.imag != 0.0:
        raise RegimeError("fluctuation law applies only for real |lam| > 1/2")
    n = config.n_steps
    horizon = config.horizon_for_w
    if horizon is None or horizon < 100 * n:
        raise ValueError(
            f"insufficient horizon: need horizon_for_w >= 100*n_steps = {100 * n}"
        )
    abs_lam = abs(spec.lam)
    if abs_lam == 1.0:
        check_nontrivial_init(config.params, config.init)
    full = EnsembleConfig(
        params=config.params, init=config.init, n_steps=horizon,
        replicas=config.replicas, master_seed=config.master_seed, kind=config.kind,
        horizon_for_w=None,
    )
    pos = _collect_positions(full, threads, [n, horizon])
    s1_n, _ = pos[n]
    s1_h, _ = pos[horizon]
    w_hat = s1_h / horizon**abs_lam
    values = n ** (abs_lam - 0.5) * (s1_n / n**abs_lam - w_hat)
    pred = fluctuation_law(config.params, walker=1)
    extra = {"abs_lam": abs_lam, "horizon_for_w": horizon, "w_hat": w_hat}
    target_var = None
    ks = None
    if not pred.mixture:
        target_var = pred.variance
        if len(values) >= 50:
            ks = ks_against_gaussian(values, 0.0, target_var)
    else:
        ecf = [complex(np.mean(np.exp(1j * t * values))) for t in t_grid]
        mix = [mixture_cf(t, w_hat) for t in t_grid]
        extra.update(
            {
                "t_grid": list(t_grid),
                "ecf_real": [z.real for z in ecf],
                "ecf_imag": [z.imag for z in ecf],
                "mixture_cf": mix,
                "cf_abs_error": [abs(z - m) for z, m in zip(ecf, mix)],
            }
        )
    return _summary(
        config, values,
        target_mean=0.0, target_variance=target_var, ks_statistic=ks, extra=extra,
    )


def lil_scan(config, threads=1):
    """Path maxima of |S1_k| / sqrt(2 k log log k) plus a recurrence probe.

    Reports the per-path maximum over k in [100, n], the ensemble maximum,
    the fraction of paths exceeding the explicit envelope coefficient
    where one exists, and the fraction of paths that revisit 0 after step
    10 (a finite-horizon recurrence proxy).
    """
    n = config.n_steps
    if n < 1000:
        raise ValueError(f"lil_scan needs n_steps >= 1000: got {n}")
    k = np.arange(100, n + 1, dtype=np.float64)
    envelope = np.sqrt(2.0 * k * np.log(np.log(k)))
    stats = np.empty(config.replicas)
    returned = np.empty(config.replicas, dtype=bool)
    for start, s1, _s2 in iter_path_chunks(
        config.params, config.init, n, config.replicas, config.master_seed, threads,
    ):
        stop = start + s1.shape[0]
        scaled = np.abs(s1[:, 99:]) / envelope
        stats[start:stop] = scaled.max(axis=1)
        returned[start:stop] = np.any(s1[:, 10:] == 0, axis=1)
    env = lil_envelope(config.params, n=n, walker=1)
    frac_exceed = None
    if env.coefficient is not None:
        frac_exceed = float(np.mean(stats > env.coefficient))
    return _summary(
        config, stats,
        extra={
            "max_statistic": float(np.max(stats)),
            "envelope_coefficient": env.coefficient,
            "envelope_bound_exists": env.bound_exists,
            "fraction_exceeding_envelope": frac_exceed,
            "return_fraction": float(np.mean(returned)),
            "all_paths_return_to_zero": bool(np.all(returned)),
        },
    )


def construction_equivalence(params, n, replicas, master_seed,
                             init=DEFAULT_INIT, threads=1):
    """Two-sample comparison of the direct model against the tree build.

    Requires p2 = 1/2 (the partner must be a plain coin-flip walker, which
    is the regime where the tree-weighted construction is defined). Direct
    endpoints use replica streams 0..R-1; construction endpoints use
    streams R..2R-1 of the same master seed.
    """
    if params.alpha2 != 0.0:
        raise ValueError("construction equivalence requires p2 = 1/2 (alpha2 = 0)")
    config = EnsembleConfig(
        params=params, init=init, n_steps=n, replicas=replicas,
        master_seed=master_seed, kind="equivalence",
    )
    pos = _collect_positions(config, threads, [n])
    direct = pos[n][0]
    constructed = np.empty(replicas)
    for i in range(replicas):
        gen = rng.stream(master_seed, replicas + i)
        constructed[i] = sample_position(n, params.p1, init.x1_first, init.x1_second, gen)
    ks = ks_two_sample(direct, constructed)
    threshold = KS_TWO_SAMPLE_COEFF * math.sqrt(2.0 / replicas)
    sqrt_n = math.sqrt(n)
    summary = _summary(config, direct / sqrt_n, ks_statistic=ks)
    cmean, cvar, _, _ = _basic_stats(constructed / sqrt_n)
    summary.extra = {
        "two_sample_ks": ks,
        "ks_threshold": threshold,
        "ks_below_threshold": bool(ks < threshold),
        "construction_sample_mean": cmean,
        "construction_sample_variance": cvar,
        "construction_values": constructed / sqrt_n,
    }
    return summary
