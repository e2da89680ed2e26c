"""Command-line entry point.

Subcommands: simulate, ensemble, regime, tree, exact, verify. Stochastic
subcommands require an explicit --seed (there is no environment override;
seeds must be visible in the invocation). Output is JSON by default, CSV
for tabular dumps; every stochastic output embeds the master seed and the
resolved configuration. Execution-only settings (--threads, --out) are
not part of the resolved configuration, so reruns with different worker
counts produce byte-identical output.

A JSON config file may supply any value (--config file.json); explicit
flags override it.

Exit codes: 0 success, 2 configuration error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import __version__
from ._kernels import backend as kernel_backend
from .decompose import (
    closed_form_xy,
    lambda_one_path,
    reconstruct_positions,
    xy_decompose,
)
from .ensemble import (
    KINDS,
    KS_TWO_SAMPLE_COEFF,
    EnsembleConfig,
    construction_equivalence,
    run_ensemble,
)
from .model import simulate_pair, write_trajectory_csv
from .params import InitialCondition, ReinforcementParams, check_nontrivial_init
from .spectral import Regime, spectral_params
from .theory import (
    RegimeError,
    exact_distribution_dp,
    moment_recursion,
    predicted_variance,
)
from .tree import degree_histogram, grow, mean_square_statistic


class ConfigError(Exception):
    """Invalid or inconsistent configuration; exits with status 2."""


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        _merge_config_file(args)
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, RegimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="twoelephants",
        description="Simulate and verify the coupled pair of memory walkers.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    sim = sub.add_parser("simulate", help="simulate one trajectory, CSV output")
    _add_common(sim, params=True, init=True)
    sim.add_argument("--n", type=int, default=None, help="number of steps")
    sim.add_argument("--seed", type=int, default=None, help="master seed (required)")
    sim.add_argument("--replica", type=int, default=0, help="stream index")
    sim.set_defaults(func=_cmd_simulate)

    ens = sub.add_parser("ensemble", help="run a Monte Carlo experiment")
    _add_common(ens, params=True, init=True)
    ens.add_argument("--kind", choices=KINDS, default=None)
    ens.add_argument("--n", type=int, default=None)
    ens.add_argument("--replicas", type=int, default=None)
    ens.add_argument("--seed", type=int, default=None)
    ens.add_argument("--horizon", type=int, default=None,
                     help="proxy-W horizon for fluctuation runs (default 100*n)")
    ens.add_argument("--threads", type=int, default=None,
                     help="worker threads (default: hardware parallelism)")
    ens.add_argument("--values-csv", default=None,
                     help="also dump per-replica values as CSV replica,value")
    ens.set_defaults(func=_cmd_ensemble)

    reg = sub.add_parser("regime", help="spectral parameters and predicted variances")
    _add_common(reg, params=True, init=False)
    reg.set_defaults(func=_cmd_regime)

    tre = sub.add_parser("tree", help="grow a recursive tree, report degree statistics")
    _add_common(tre, params=False, init=False)
    tre.add_argument("--n", type=int, default=None)
    tre.add_argument("--seed", type=int, default=None)
    tre.set_defaults(func=_cmd_tree)

    exa = sub.add_parser("exact", help="exact moments (CSV) and optional DP table")
    _add_common(exa, params=True, init=True)
    exa.add_argument("--n", type=int, default=None)
    exa.add_argument("--stride", type=int, default=1, help="emit every stride-th row")
    exa.add_argument("--dp-table", default=None,
                     help="also write the exact joint distribution at --dp-n to this CSV")
    exa.add_argument("--dp-n", type=int, default=None)
    exa.set_defaults(func=_cmd_exact)

    ver = sub.add_parser("verify", help="self-checks against exact identities")
    versub = ver.add_subparsers(dest="target", required=True)

    vc = versub.add_parser("construction", help="tree construction vs direct model")
    vc.add_argument("--config", default=None, help="JSON config file")
    vc.add_argument("--alpha1", type=float, default=None)
    vc.add_argument("--p1", type=float, default=None)
    vc.add_argument("--n", type=int, default=2000)
    vc.add_argument("--replicas", type=int, default=2000)
    vc.add_argument("--seed", type=int, default=None)
    vc.add_argument("--threads", type=int, default=None)
    vc.add_argument("--out", default=None)
    vc.set_defaults(func=_cmd_verify_construction)

    vd = versub.add_parser("decomposition", help="eigen-coordinate path identities")
    _add_common(vd, params=True, init=True)
    vd.add_argument("--n", type=int, default=10000)
    vd.add_argument("--paths", type=int, default=20)
    vd.add_argument("--seed", type=int, default=None)
    vd.set_defaults(func=_cmd_verify_decomposition)

    return parser


def _add_common(p, params, init):
    p.add_argument("--config", default=None, help="JSON config file")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    if params:
        p.add_argument("--p1", type=float, default=None)
        p.add_argument("--p2", type=float, default=None)
        p.add_argument("--alpha1", type=float, default=None)
        p.add_argument("--alpha2", type=float, default=None)
    if init:
        p.add_argument("--init1", type=int, choices=(-1, 1), default=None,
                       help="first step of walker 1 (default +1)")
        p.add_argument("--init2", type=int, choices=(-1, 1), default=None,
                       help="first step of walker 2 (default +1)")


def _merge_config_file(args):
    """Fill unset values from the JSON config file; explicit flags win."""
    path = getattr(args, "config", None)
    if not path:
        return
    with open(path) as fh:
        data = json.load(fh)
    for key, value in data.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr) or attr in ("func", "config", "subcommand", "target"):
            raise ConfigError(f"unknown config key {key!r}")
        if getattr(args, attr) is None:
            setattr(args, attr, value)


def _resolve_params(args):
    has_p = args.p1 is not None or args.p2 is not None
    has_a = args.alpha1 is not None or args.alpha2 is not None
    if has_p and has_a:
        raise ConfigError("give either (--p1, --p2) or (--alpha1, --alpha2), not both")
    if has_p:
        if args.p1 is None or args.p2 is None:
            missing = "p1" if args.p1 is None else "p2"
            raise ConfigError(f"--{missing} is required when memory probabilities are used")
        return ReinforcementParams.from_p(args.p1, args.p2)
    if has_a:
        if args.alpha1 is None or args.alpha2 is None:
            missing = "alpha1" if args.alpha1 is None else "alpha2"
            raise ConfigError(f"--{missing} is required when reinforcement parameters are used")
        return ReinforcementParams(args.alpha1, args.alpha2)
    raise ConfigError("parameters missing: give (--p1, --p2) or (--alpha1, --alpha2)")


def _resolve_init(args):
    x1 = 1 if args.init1 is None else args.init1
    x2 = 1 if args.init2 is None else args.init2
    if x1 not in (-1, 1) or x2 not in (-1, 1):
        raise ConfigError("init1 and init2 must be +1 or -1")
    return InitialCondition(x1, x2)


def _require(args, name):
    value = getattr(args, name)
    if value is None:
        raise ConfigError(f"--{name.replace('_', '-')} is required")
    return value


def _require_seed(args):
    seed = _require(args, "seed")
    if seed < 0:
        raise ConfigError(f"--seed must be non-negative: got {seed}")
    return seed


def _emit_text(text, out_path):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(payload, out_path):
    _emit_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", out_path)


def _params_dict(params):
    return {
        "alpha1": params.alpha1,
        "alpha2": params.alpha2,
        "p1": params.p1,
        "p2": params.p2,
    }


def _threads(args):
    t = getattr(args, "threads", None)
    if t is None:
        return os.cpu_count() or 1
    if t < 1:
        raise ConfigError(f"--threads must be >= 1: got {t}")
    return t


# ---------------------------------------------------------------------------
# subcommands


def _cmd_simulate(args):
    params = _resolve_params(args)
    init = _resolve_init(args)
    n = _require(args, "n")
    seed = _require_seed(args)
    traj = simulate_pair(params, init, n_steps=n, seed=seed, replica=args.replica)
    buf = io.StringIO()
    buf.write(f"# config: {json.dumps(_params_dict(params), sort_keys=True)}\n")
    buf.write(f"# init: [{init.x1_first}, {init.x1_second}]  "
              f"seed: {seed}  replica: {args.replica}  n: {n}\n")
    write_trajectory_csv(traj, buf)
    _emit_text(buf.getvalue(), args.out)
    return 0


def _cmd_ensemble(args):
    params = _resolve_params(args)
    init = _resolve_init(args)
    kind = _require(args, "kind")
    n = _require(args, "n")
    replicas = _require(args, "replicas")
    seed = _require_seed(args)
    horizon = args.horizon
    if kind == "fluctuation" and horizon is None:
        horizon = 100 * n
    try:
        config = EnsembleConfig(
            params=params, init=init, n_steps=n, replicas=replicas,
            master_seed=seed, kind=kind, horizon_for_w=horizon,
        )
        summary = run_ensemble(config, threads=_threads(args))
    except (ValueError, RegimeError) as exc:
        raise ConfigError(str(exc)) from exc
    payload = {
        "config": {
            "subcommand": "ensemble",
            "kind": kind,
            "params": _params_dict(params),
            "init": [init.x1_first, init.x1_second],
            "n": n,
            "replicas": replicas,
            "master_seed": seed,
            "horizon_for_w": horizon,
        },
        "summary": summary.to_dict(),
        "kernel_backend": kernel_backend(),
    }
    _emit_json(payload, args.out)
    if args.values_csv:
        with open(args.values_csv, "w") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["replica", "value"])
            for i, v in enumerate(summary.values):
                writer.writerow([i, repr(float(v))])
    return 0


def _cmd_regime(args):
    params = _resolve_params(args)
    spec = spectral_params(params)
    payload = {
        "config": {"subcommand": "regime", "params": _params_dict(params)},
        "lambda_re": None if spec.lam is None else spec.lam.real,
        "lambda_im": None if spec.lam is None else spec.lam.imag,
        "r_re": None if spec.r is None else spec.r.real,
        "r_im": None if spec.r is None else spec.r.imag,
        "regime": spec.regime.value,
    }
    predicted = {}
    for walker in (1, 2):
        try:
            pred = predicted_variance(params, walker=walker)
            predicted[f"walker{walker}"] = {
                "variance": pred.variance,
                "scaling_exponent": pred.scaling_exponent,
                "log_factor": pred.log_factor,
            }
        except RegimeError:
            predicted[f"walker{walker}"] = {
                "variance": None,
                "scaling_exponent": abs(spec.lam),
                "log_factor": False,
                "note": "superdiffusive: S_n/n^|lambda| converges a.s., no Gaussian limit",
            }
    payload["predicted_variances"] = predicted
    _emit_json(payload, args.out)
    return 0


def _cmd_tree(args):
    n = _require(args, "n")
    seed = _require_seed(args)
    if n < 1:
        raise ConfigError(f"--n must be >= 1: got {n}")
    profile = grow(n, seed)
    hist = degree_histogram(profile)
    checks = {
        "degree_sum_equals_n_minus_1": bool(int(profile.degrees.sum()) == n - 1),
        "histogram_total_equals_n": bool(sum(hist.counts.values()) == n),
        "last_vertex_is_leaf": bool(profile.degrees[-1] == 0),
    }
    payload = {
        "config": {"subcommand": "tree", "n": n, "master_seed": seed},
        "n": n,
        "t_n": mean_square_statistic(profile),
        "max_degree": hist.max_degree,
        "histogram": {str(k): v for k, v in sorted(hist.counts.items())},
        "checks": checks,
    }
    _emit_json(payload, args.out)
    return 0


def _cmd_exact(args):
    params = _resolve_params(args)
    init = _resolve_init(args)
    n = _require(args, "n")
    if n < 1:
        raise ConfigError(f"--n must be >= 1: got {n}")
    if args.stride < 1:
        raise ConfigError(f"--stride must be >= 1: got {args.stride}")
    table = moment_recursion(params, init, n)
    buf = io.StringIO()
    buf.write(f"# config: {json.dumps(_params_dict(params), sort_keys=True)} "
              f"init: [{init.x1_first}, {init.x1_second}]\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "m1", "m2", "q1", "q2", "c", "var1_over_n"])
    rows = list(range(args.stride - 1, n, args.stride))
    if not rows or rows[-1] != n - 1:
        rows.append(n - 1)
    for i in rows:
        st = table[i]
        writer.writerow(
            [st.n, repr(st.m1), repr(st.m2), repr(st.q1), repr(st.q2), repr(st.c),
             repr(st.var1 / st.n)]
        )
    _emit_text(buf.getvalue(), args.out)
    if args.dp_table:
        dp_n = args.dp_n if args.dp_n is not None else min(n, 200)
        dist = exact_distribution_dp(params, init, n=dp_n)
        with open(args.dp_table, "w") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["s1", "s2", "prob"])
            for i, s1 in enumerate(dist.s1_values):
                for j, s2 in enumerate(dist.s2_values):
                    p = dist.probs[i, j]
                    if p > 0.0:
                        w.writerow([int(s1), int(s2), repr(float(p))])
    return 0


def _cmd_verify_construction(args):
    seed = _require_seed(args)
    if args.p1 is not None and args.alpha1 is not None:
        raise ConfigError("give either --p1 or --alpha1, not both")
    if args.p1 is not None:
        params = ReinforcementParams.from_p(args.p1, 0.5)
    elif args.alpha1 is not None:
        params = ReinforcementParams(args.alpha1, 0.0)
    else:
        raise ConfigError("parameters missing: give --p1 or --alpha1")
    summary = construction_equivalence(
        params, args.n, args.replicas, seed, threads=_threads(args)
    )
    ok = summary.extra["ks_below_threshold"]
    payload = {
        "config": {
            "subcommand": "verify construction",
            "params": _params_dict(params),
            "n": args.n,
            "replicas": args.replicas,
            "master_seed": seed,
        },
        "two_sample_ks": summary.extra["two_sample_ks"],
        "ks_threshold": summary.extra["ks_threshold"],
        "ks_coefficient": KS_TWO_SAMPLE_COEFF,
        "direct_sample_variance": summary.sample_variance,
        "construction_sample_variance": summary.extra["construction_sample_variance"],
        "pass": bool(ok),
    }
    _emit_json(payload, args.out)
    return 0 if ok else 3


def _cmd_verify_decomposition(args):
    params = _resolve_params(args)
    init = _resolve_init(args)
    seed = _require_seed(args)
    if args.n < 2 or args.paths < 2:
        raise ConfigError("need --n >= 2 and --paths >= 2")
    spec = spectral_params(params)
    if spec.regime is Regime.SRW_COUPLED:
        raise ConfigError("decomposition needs alpha1*alpha2 != 0")
    boundary = spec.lam in (1.0 + 0.0j, -1.0 + 0.0j)
    if boundary:
        try:
            check_nontrivial_init(params, init)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    max_recon = 0.0
    max_closed_rel = 0.0
    finals = []
    for rep in range(args.paths):
        traj = simulate_pair(params, init, n_steps=args.n, seed=seed, replica=rep)
        if boundary:
            path = lambda_one_path(traj)
            target = path.xs if path.martingale_coordinate == "y" else path.ys
            scale = max(float(np.max(np.abs(target))), 1e-300)
            err = float(np.max(np.abs(path.closed - target))) / scale
            max_closed_rel = max(max_closed_rel, err)
            mart = path.ys if path.martingale_coordinate == "y" else path.xs
            finals.append(float(mart[-1] - mart[1]))
        else:
            path = xy_decompose(traj, spec)
            xs_hat, ys_hat = closed_form_xy(path)
            for hat, ref in ((xs_hat, path.xs), (ys_hat, path.ys)):
                scale = max(float(np.max(np.abs(ref))), 1e-300)
                err = float(np.max(np.abs(hat - ref))) / scale
                max_closed_rel = max(max_closed_rel, err)
            s1r, s2r = reconstruct_positions(path)
            rerr = max(
                float(np.max(np.abs(s1r - traj.positions1))),
                float(np.max(np.abs(s2r - traj.positions2))),
            )
            max_recon = max(max_recon, rerr)
            finals.append(complex(path.mart_x[-1]).real)
    finals = np.asarray(finals, dtype=np.float64)
    sd = float(np.std(finals, ddof=1))
    z = 0.0 if sd == 0.0 else float(np.mean(finals) / (sd / math.sqrt(len(finals))))
    ok = max_closed_rel < 1e-9 and max_recon < 1e-9 * args.n and abs(z) < 6.0
    payload = {
        "config": {
            "subcommand": "verify decomposition",
            "params": _params_dict(params),
            "init": [init.x1_first, init.x1_second],
            "n": args.n,
            "paths": args.paths,
            "master_seed": seed,
        },
        "max_reconstruction_err": max_recon,
        "max_closed_form_rel_err": max_closed_rel,
        "martingale_z_scores": {"final_mean_z": z},
        "pass": bool(ok),
    }
    _emit_json(payload, args.out)
    return 0 if ok else 3


if __name__ == "__main__":
    sys.exit(main())
