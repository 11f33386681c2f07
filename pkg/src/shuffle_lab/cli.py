"""Command-line front end.

Subcommands
-----------
bounds          gamma / phi_max / second moments / defect and the T values
exact-tv        exact total-variation curve on a small deck (n <= cap)
mc-tv           Monte Carlo statistic lower-bound curve
eigen-check     per-position drift residuals + eigenvalue cross-checks
defect          per-position defect delta(k) and rho_hat
rudvalis-verify closed-form n-step law vs the n-th kernel power
mix-scaling     mixing-time estimates across an n-grid

Output is CSV (default) or JSON with an embedded metadata header (tool
version, config echo, RNG algorithm, log conventions); identical config and
seed give byte-identical files.  Exit codes: 0 ok, 2 config error,
3 lemma inapplicable (gamma >= 1/2), 4 exact-enumeration cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INAPPLICABLE = 3
EXIT_CAP = 4


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def _meta(args, extra=None) -> dict:
    from . import __version__, backend, rng

    # echo everything that determines the result; the output path does not
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out")}
    meta = {
        "tool": "shuffle-lab",
        "version": __version__,
        "backend": backend.BACKEND_NAME,
        "rng": rng.ALGORITHM,
        "log_base": "e (natural; log2 only in the single-card tail bound)",
        "config": cfg,
    }
    if extra:
        meta.update(extra)
    return meta


def _emit(args, meta: dict, header: list[str], rows: list[tuple], scalars=None):
    out = sys.stdout
    close = False
    if args.out:
        out = open(args.out, "w", newline="")
        close = True
    try:
        if args.format == "json":
            payload = dict(scalars or {})
            if rows:
                payload["rows"] = [dict(zip(header, r)) for r in rows]
            payload["meta"] = meta
            json.dump(payload, out, indent=2, sort_keys=True)
            out.write("\n")
        else:
            for key, val in sorted(meta.items()):
                if key == "config":
                    for ck, cv in val.items():
                        out.write(f"# config.{ck} = {cv}\n")
                else:
                    out.write(f"# {key} = {val}\n")
            if scalars:
                for k, v in scalars.items():
                    out.write(f"# {k} = {_fmt(v)}\n")
            if rows:
                out.write(",".join(header) + "\n")
                for r in rows:
                    out.write(",".join(_fmt(v) for v in r) + "\n")
    finally:
        if close:
            out.close()


def _model(args):
    from . import models

    if args.model == "rudvalis":
        return models.rudvalis()
    if args.model == "overhand":
        return models.overhand(args.p)
    return models.circular_overhand(args.p)


def _eps(args, n: int) -> float:
    if args.eps == "auto":
        if n < 3:
            raise ValueError("eps=auto needs n >= 3 (eps = 1/ln n)")
        return 1.0 / math.log(n)
    e = float(args.eps)
    if not 0.0 < e < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    return e


def cmd_bounds(args) -> int:
    from . import bounds as bd
    from . import spectral

    m = _model(args)
    n = args.n
    eps = _eps(args, n)
    rep = spectral.spectral_report(m, n, trials=args.trials, seed=args.seed)
    if args.r_policy == "analytic":
        r = rep.r_analytic
    else:  # guarded empirical, never below the analytic bound
        r = max(rep.r_analytic, 1.5 * rep.r_empirical)
    t21 = bd.wilson_T(bd.BoundInputs(rep.phi_max, r, rep.gamma, eps))
    t32 = bd.extended_T(bd.BoundInputs(rep.phi_max, r, rep.gamma, eps, rep.rho_hat))
    asym = bd.asymptotic_bounds(n, m.p)
    if m.kind == "rudvalis":
        scale = n  # lemma runs on the n-step chain; report raw shuffle steps
        t_asym = asym.rudvalis
        t_alt = asym.rudvalis
    else:
        scale = 1
        t_asym = asym.theorem31
        t_alt = bd.overhand_displacement_coefficient(m.p) * n * n * math.log(n)
    scalars = {
        "gamma": rep.gamma,
        "phi_max": rep.phi_max,
        "v_series": rep.v_series,
        "r_analytic": rep.r_analytic,
        "r_empirical": rep.r_empirical,
        "rho_hat": rep.rho_hat,
        "T_lemma21": scale * t21.t_real,
        "T_lemma32": scale * t32.t_real,
        "T_asymptotic": t_asym,
        "T_asymptotic_displacement": t_alt,
        "threshold_c": t32.threshold,
        "eps": eps,
        "vacuous": t32.vacuous,
    }
    _emit(args, _meta(args, {"time_unit": "raw shuffle steps"}), [], [], scalars)
    return EXIT_OK


def cmd_exact_tv(args) -> int:
    from . import tvlab

    m = _model(args)
    curve = tvlab.exact_tv_curve(m, args.n, args.t_max, cap=args.cap)
    rows = [(r.t, r.tv) for r in curve.rows]
    _emit(args, _meta(args), ["t", "tv"], rows)
    return EXIT_OK


def cmd_mc_tv(args) -> int:
    import numpy as np

    from . import tvlab

    m = _model(args)
    t_max = args.t_max
    stride = max(1, t_max // 512)
    ts = np.arange(0, t_max + 1, stride, dtype=np.int64)
    curve = tvlab.mc_phi_curve(m, args.n, ts, args.trials, args.seed)
    rows = [(r.t, r.tv, r.ci_low, r.ci_high) for r in curve.rows]
    _emit(
        args,
        _meta(args, {"estimator": "sup-threshold statistic lower bound"}),
        ["t", "tv", "ci_low", "ci_high"],
        rows,
    )
    return EXIT_OK


def cmd_eigen_check(args) -> int:
    from . import chain, spectral

    m = _model(args)
    n = args.n
    s = spectral.TrackedStatistic(n)
    delta, rho_hat = spectral.drift_defect(s, m, n)
    gamma = spectral.gamma_exact(m, n)
    extra = {
        "gamma_series": gamma,
        "gamma_closed_form": spectral.gamma_closed_form(m, n),
        "max_abs_residual": float(abs(delta).max()),
        "rho_hat": rho_hat,
    }
    if m.kind == "circular":
        q = chain.circular_displacement_law(n, m.p)
        K = chain.position_kernel(m, n)
        extra["fourier_subdominant"] = chain.circulant_subdominant(q)
        extra["power_iteration_subdominant"] = chain.subdominant_eigenvalue(K)
    rows = [(k + 1, float(delta[k])) for k in range(n)]
    _emit(args, _meta(args, extra), ["position", "residual"], rows)
    return EXIT_OK


def cmd_defect(args) -> int:
    from . import spectral

    m = _model(args)
    s = spectral.TrackedStatistic(args.n)
    delta, rho_hat = spectral.drift_defect(s, m, args.n)
    rows = [(k + 1, float(delta[k])) for k in range(args.n)]
    _emit(args, _meta(args), ["position", "delta"], rows, {"rho_hat": rho_hat})
    return EXIT_OK


def cmd_rudvalis_verify(args) -> int:
    from . import chain, models

    n = args.n
    K = chain.position_kernel(models.rudvalis(), n)
    power = chain.kernel_power(K, n)
    closed = chain.rudvalis_nstep_kernel(n)
    diff = float(abs(power.rows - closed.rows).max())
    _emit(args, _meta(args), [], [], {"n": n, "max_abs_diff": diff})
    return EXIT_OK


def cmd_mix_scaling(args) -> int:
    from . import rng, tvlab

    m = _model(args)
    grid = [int(v) for v in args.n_grid.split(",")]
    rows = []
    for n in grid:
        if n <= args.cap:
            tau = tvlab.mixing_time_exact(m, n, args.delta, cap=args.cap)
            rows.append((n, tau, "exact"))
        else:
            tau, _ = tvlab.mixing_time_proxy(
                m, n, args.delta, args.trials, rng.derive_seed(args.seed, n)
            )
            rows.append((n, -1 if tau is None else tau, "mc-proxy"))
    _emit(
        args,
        _meta(args, {"delta": args.delta, "tau_unit": "raw shuffle steps"}),
        ["n", "tau", "estimator"],
        rows,
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="shuffle-lab",
        description="Mixing-time experiments for overhand and Rudvalis shuffles",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, model=True, trials_default=1000):
        if model:
            sp.add_argument(
                "--model",
                choices=["overhand", "circular", "rudvalis"],
                required=True,
            )
            sp.add_argument("--p", type=float, default=0.5, help="cut probability")
        sp.add_argument("--n", type=int, required=True, help="deck size")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--trials", type=int, default=trials_default)
        sp.add_argument("--format", choices=["csv", "json"], default="csv")
        sp.add_argument("--out", default=None, help="output path (default stdout)")

    sp = sub.add_parser("bounds", help="lemma and asymptotic T values")
    common(sp)
    sp.add_argument("--eps", default="auto", help='separation eps or "auto" (1/ln n)')
    sp.add_argument(
        "--r-policy",
        choices=["analytic", "empirical-guarded"],
        default="analytic",
        help="R for the certificates: the series bound, or "
        "max(analytic, 1.5 * empirical)",
    )
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("exact-tv", help="exact TV curve (n <= cap)")
    common(sp)
    sp.add_argument("--t-max", type=int, default=50)
    sp.add_argument("--cap", type=int, default=8)
    sp.set_defaults(func=cmd_exact_tv)

    sp = sub.add_parser("mc-tv", help="Monte Carlo statistic TV lower bounds")
    common(sp, trials_default=2000)
    sp.add_argument("--t-max", type=int, default=200)
    sp.set_defaults(func=cmd_mc_tv)

    sp = sub.add_parser("eigen-check", help="drift residuals + eigenvalue checks")
    common(sp)
    sp.set_defaults(func=cmd_eigen_check)

    sp = sub.add_parser("defect", help="defect delta(.) and rho_hat")
    common(sp)
    sp.set_defaults(func=cmd_defect)

    sp = sub.add_parser("rudvalis-verify", help="closed form vs kernel power")
    common(sp, model=False)
    sp.set_defaults(func=cmd_rudvalis_verify)

    sp = sub.add_parser("mix-scaling", help="tau estimates across an n-grid")
    common(sp, trials_default=2000)
    sp.add_argument("--n-grid", default="", help="comma list, e.g. 32,64,128")
    sp.add_argument("--delta", type=float, default=0.25)
    sp.add_argument("--cap", type=int, default=8)
    sp.set_defaults(func=cmd_mix_scaling)
    return ap


def main(argv=None) -> int:
    from .bounds import InapplicableLemmaError
    from .perm import CapExceededError

    ap = build_parser()
    args = ap.parse_args(argv)
    if getattr(args, "n_grid", None) == "":
        if args.command == "mix-scaling":
            args.n_grid = str(args.n)
    try:
        return args.func(args)
    except InapplicableLemmaError as e:
        print(f"shuffle-lab: inapplicable lemma: {e}", file=sys.stderr)
        return EXIT_INAPPLICABLE
    except CapExceededError as e:
        print(f"shuffle-lab: cap exceeded: {e}", file=sys.stderr)
        return EXIT_CAP
    except (ValueError, KeyError) as e:
        print(f"shuffle-lab: config error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
