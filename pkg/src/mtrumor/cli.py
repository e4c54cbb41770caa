"""Command-line interface.

Subcommands: constants, dj, dist, simulate, rates, verify.  Human output
prints 6 significant digits; --csv / --json print 17 (lossless float64
round-trip).  Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import automata, exact_dist, harness, rates, simulate
from .config import ResourceCaps
from .constants import default_constants, derive_constants, solve_fixed_point

_CONV_FLAGS = {"formula": "formula", "paper-literal": "paper_literal"}


def _num(text: str) -> int:
    """Integer argument accepting scientific notation (1e6)."""
    v = float(text)
    if v != int(v) or v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return int(v)


def _grid(text: str) -> list[int]:
    """Comma list (possibly scientific) or geometric range a:b:xF."""
    if ":" in text:
        a, b, fac = text.split(":")
        if not fac.startswith("x"):
            raise argparse.ArgumentTypeError("geometric range must end in xFACTOR")
        lo, hi, f = float(a), float(b), float(fac[1:])
        if lo < 1 or hi < lo or f <= 1:
            raise argparse.ArgumentTypeError(f"bad range {text}")
        out, v = [], lo
        while v <= hi * (1 + 1e-12):
            out.append(int(round(v)))
            v *= f
        return out
    return [_num(t) for t in text.split(",")]


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.split(",")]


def _fmt(v: float, fmt: str) -> str:
    return f"{v:.17g}" if fmt in ("csv", "json") else f"{v:.6g}"


def _out_format(args) -> str:
    if getattr(args, "json", False):
        return "json"
    if getattr(args, "csv", False):
        return "csv"
    return "human"


def _print_report(rep: harness.DeviationReport, fmt: str) -> None:
    if fmt == "csv":
        sys.stdout.write(rep.to_csv())
    elif fmt == "json":
        print(rep.to_json())
    else:
        for r in rep.rows:
            print(f"{r.check} n={r.n:.6g} b_n={r.b_n:.6g} param={r.param:.6g} "
                  f"empirical={r.empirical:.6g} target={r.target:.6g} "
                  f"backend={r.backend}")


def _cmd_constants(args, caps) -> int:
    c = derive_constants(solve_fixed_point(args.tolerance))
    fields = ("x_inf", "v_inf", "sigma2", "varrho", "kappa", "alpha", "beta")
    if args.json:
        print(json.dumps({f: getattr(c, f) for f in fields}))
    else:
        for f in fields:
            print(f"{f} = {_fmt(getattr(c, f), 'human')}")
    return 0


def _cmd_dj(args, caps) -> int:
    table = automata.get_table(args.max, caps)
    c = default_constants()
    fmt = _out_format(args)
    rows = []
    for j in range(1, args.max + 1):
        d = table.d(j)
        dec = str(d) if d.bit_length() <= 256 else f"~2^{d.bit_length()}"
        rows.append((j, dec, table.log_d(j), automata.asymptotic_ratio(j, table, c)))
    if fmt == "csv":
        print("j,d_j,ln_d_j,asymptotic_ratio")
        for j, dec, ld, ratio in rows:
            print(f"{j},{dec},{ld:.17g},{ratio:.17g}")
    else:
        for j, dec, ld, ratio in rows:
            print(f"j={j} d_j={dec} ln={ld:.6g} ratio={ratio:.6g}")
    return 0


def _cmd_dist(args, caps) -> int:
    n = args.n
    if args.check_oracle:
        formula = exact_dist.distribution(n, "auto", caps=caps)
        dp = exact_dist.dp_distribution(n, caps=caps)
        err = float(np.max(np.abs(
            np.exp(formula.dense_log_pmf()) - np.exp(dp.dense_log_pmf()[:n])
        )))
        print(f"max |formula - dp| over k: {err:.6g}")
        return 0
    dist = exact_dist.distribution(n, args.backend, caps=caps)
    lp = dist.dense_log_pmf()
    fmt = _out_format(args)
    if fmt == "json":
        print(json.dumps({
            "n": n, "backend": dist.backend,
            "pmf": [float(p) for p in np.exp(lp)],
            "log_pmf": [float(v) for v in lp],
        }))
    elif fmt == "csv":
        print("k,P,lnP")
        for k in range(dist.support_size):
            print(f"{k},{math.exp(lp[k]):.17g},{lp[k]:.17g}")
    else:
        for k in range(dist.support_size):
            print(f"k={k} P={math.exp(lp[k]):.6g} lnP={lp[k]:.6g}")
    return 0


def _cmd_simulate(args, caps) -> int:
    conv = _CONV_FLAGS[args.rate_convention]
    cfg = simulate.SimConfig(n=args.n, rate_convention=conv,
                             seed=args.seed, streams=args.streams)
    if args.trajectory:
        traj = simulate.sample_trajectory(cfg)
        print("time,i,j,z")
        for t, i, j in traj.events:
            print(f"{t:.17g},{i},{j},{cfg.n + 1 - i - j}")
        return 0
    hist = simulate.sample_batch(cfg, args.samples, threads=args.threads)
    fmt = _out_format(args)
    if fmt == "csv":
        print("k,count")
        for k, cnt in enumerate(hist):
            if cnt:
                print(f"{k},{cnt}")
    else:
        for k, cnt in enumerate(hist):
            if cnt:
                print(f"k={k} count={cnt}")
    return 0


def _cmd_rates(args, caps) -> int:
    a, b, step = (float(t) for t in args.grid.split(":"))
    if step <= 0 or b < a:
        raise ValueError(f"bad grid {args.grid}")
    xs = np.arange(a, b + step * 0.5, step)
    fn = {"h": rates.rate_h, "H": rates.rate_H, "J": rates.rate_J}[args.which]
    vals = [float(fn(x)) for x in xs]
    if args.csv:
        print(f"x,{args.which}")
        for x, v in zip(xs, vals):
            print(f"{x:.17g},{v:.17g}")
    else:
        for x, v in zip(xs, vals):
            print(f"{args.which}({x:.6g}) = {v:.6g}")
    return 0


def _cmd_verify(args, caps) -> int:
    scale = harness.scale_by_name(args.scale)
    which = args.what
    if which == "mdp":
        rep = harness.mdp_table(args.z, scale, args.n_grid, caps=caps)
    elif which == "ldp":
        rep = harness.ldp_table(args.x, args.n_grid, caps=caps)
    elif which == "clt":
        rep = harness.clt_check(args.n_grid, caps=caps)
    elif which == "local":
        rep = harness.local_mdp_check(args.z, scale, args.n_grid, caps=caps)
    elif which == "tightness":
        rep = harness.tightness_check(args.L, scale, args.n_grid,
                                      delta=args.delta, caps=caps)
    elif which == "endpoint":
        rep = harness.endpoint_probe(args.n_grid, scale, caps=caps)
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(which)
    _print_report(rep, _out_format(args))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="mtrumor",
        description="Maki-Thompson rumour model: exact distribution, "
                    "simulation, deviation tables.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("constants", help="print model constants")
    pc.add_argument("--json", action="store_true")
    pc.add_argument("--tolerance", type=float, default=1e-14)
    pc.set_defaults(fn=_cmd_constants)

    pd = sub.add_parser("dj", help="exact d_j table")
    pd.add_argument("--max", type=_num, required=True)
    pd.add_argument("--csv", action="store_true")
    pd.set_defaults(fn=_cmd_dj)

    pq = sub.add_parser("dist", help="final-size distribution")
    pq.add_argument("--n", type=_num, required=True)
    pq.add_argument("--backend", default="auto",
                    choices=("auto",) + exact_dist.BACKENDS)
    pq.add_argument("--csv", action="store_true")
    pq.add_argument("--json", action="store_true")
    pq.add_argument("--check-oracle", action="store_true")
    pq.set_defaults(fn=_cmd_dist)

    ps = sub.add_parser("simulate", help="sample the process")
    ps.add_argument("--n", type=_num, required=True)
    ps.add_argument("--samples", type=_num, default=1)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--streams", type=_num, default=1)
    ps.add_argument("--threads", type=_num, default=1)
    ps.add_argument("--rate-convention", default="formula",
                    choices=sorted(_CONV_FLAGS))
    ps.add_argument("--trajectory", action="store_true")
    ps.add_argument("--csv", action="store_true")
    ps.set_defaults(fn=_cmd_simulate)

    pr = sub.add_parser("rates", help="rate functions on a grid")
    pr.add_argument("--grid", required=True, metavar="A:B:STEP")
    pr.add_argument("--which", default="h", choices=("h", "H", "J"))
    pr.add_argument("--csv", action="store_true")
    pr.set_defaults(fn=_cmd_rates)

    pv = sub.add_parser("verify", help="convergence tables")
    pv.add_argument("what", choices=("mdp", "ldp", "clt", "local",
                                     "tightness", "endpoint"))
    pv.add_argument("--n-grid", type=_grid, required=True)
    pv.add_argument("--scale", default="log_quarter", choices=sorted(harness.SCALES))
    pv.add_argument("--z", type=_floats, default=[1.0])
    pv.add_argument("--x", type=_floats, default=[0.15, 0.3])
    pv.add_argument("--L", type=_floats, default=[2.0])
    pv.add_argument("--delta", type=float, default=0.1)
    pv.add_argument("--csv", action="store_true")
    pv.add_argument("--json", action="store_true")
    pv.set_defaults(fn=_cmd_verify)

    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    caps = ResourceCaps.from_env()
    try:
        return args.fn(args, caps)
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
