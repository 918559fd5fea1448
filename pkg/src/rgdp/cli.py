"""Command-line interface: calibration, sampling and the experiment tables.

Every subcommand writes a CSV preceded by a ``#`` manifest block. The
manifest records the exact argument vector, so ``rgdp replay FILE``
regenerates FILE byte for byte.

Exit codes: 0 success, 2 invalid parameters, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import shlex
import sys
from datetime import datetime, timezone
from typing import Optional, Sequence

import numpy as np

from . import __version__
from . import manifolds as mf
from ._validation import check_random_state, derive_seed
from .calibration import CalibrationConfig, calibrate
from .experiments import FIG1_COLUMNS, UTILITY_COLUMNS, fig1_budget, sphere_utility
from .samplers import ChainConfig, RiemannianGaussian, RiemannianLaplace, exact_sample, mh_sample

TAG_CALIBRATE = 3
TAG_SAMPLE = 4

CALIBRATE_COLUMNS = ("manifold", "dim", "delta", "sigma", "method", "mu", "mu_min", "mu_max", "seed")


class UsageError(ValueError):
    pass


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


# Options that do not influence the numbers are kept out of the manifest so
# that a replay to another path or with other parallelism is byte-identical.
_UNRECORDED = ("out", "threads", "stamp")


def _strip(argv: Sequence[str]) -> list[str]:
    res, skip = [], False
    for a in argv:
        if skip:
            skip = False
            continue
        name = a.split("=", 1)[0]
        if name.startswith("--") and name[2:].replace("-", "_") in _UNRECORDED:
            skip = "=" not in a and name != "--stamp"
            continue
        res.append(a)
    return res


def _manifest(argv: Sequence[str], args: argparse.Namespace) -> list[str]:
    lines = [f"rgdp {__version__}", f"subcommand: {args.command}", f"command: rgdp {shlex.join(_strip(argv))}"]
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("command", "func") + _UNRECORDED}
    lines += [f"{k}: {v}" for k, v in params.items()]
    if args.stamp:
        lines.append(f"timestamp: {datetime.now(timezone.utc).isoformat(timespec='seconds')}")
    return ["# " + line for line in lines]


def _write(args, argv, columns, rows, footer: Sequence[str] = ()) -> None:
    buf = io.StringIO()
    for line in _manifest(argv, args):
        buf.write(line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in columns])
    for line in footer:
        buf.write("# " + line + "\n")
    text = buf.getvalue()
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)


def _manifold(kind: str, dim: int) -> mf.ManifoldSpec:
    if kind == "circle":
        dim = 1
    return mf.ManifoldSpec(kind, dim)


def cmd_calibrate(args, argv) -> None:
    M = _manifold(args.manifold, args.dim)
    cfg = CalibrationConfig(args.delta, args.sigma, n=args.n, n_eps=args.n_eps, eps_max=args.eps_max, m=args.m)
    method = args.method
    if method == "auto":
        method = {"euclidean": "closed-form", "circle": "analytic"}.get(M.kind, "mcmc")
    rng = check_random_state(derive_seed(args.seed, TAG_CALIBRATE))
    budget = calibrate(M, args.delta, args.sigma, method=method, cfg=cfg, rng=rng)
    spread = budget.spread
    row = {"manifold": M.kind, "dim": M.dim, "delta": float(args.delta), "sigma": float(args.sigma),
           "method": method, "mu": budget.mu, "mu_min": spread.min if spread else None,
           "mu_max": spread.max if spread else None, "seed": args.seed}
    _write(args, argv, CALIBRATE_COLUMNS, [row])


def cmd_fig1_budget(args, argv) -> None:
    ks = range(1, 17) if args.k is None else args.k
    rows = fig1_budget(args.target, seed=args.seed, ks=ks, delta_sens=args.delta, replicates=args.replicates,
                       n=args.n, n_eps=args.n_eps, m=args.m, threads=args.threads)
    _write(args, argv, FIG1_COLUMNS, rows)


def cmd_sphere_utility(args, argv) -> None:
    ks = range(1, 13) if args.k is None else args.k
    rows = sphere_utility(seed=args.seed, ks=ks, threads=args.threads, repetitions=args.repetitions,
                          n_points=args.n_points, radius=args.radius, dim=args.dim,
                          n=args.n, n_eps=args.n_eps, m=args.m)
    _write(args, argv, UTILITY_COLUMNS, rows)


def cmd_sample(args, argv) -> None:
    M = _manifold(args.manifold, args.dim)
    if args.footprint is None:
        foot = M.origin()
    else:
        foot = np.array([float(v) for v in args.footprint.split(",")])
    law = RiemannianGaussian if args.dist == "gaussian" else RiemannianLaplace
    dist = law(M, foot, args.rate)
    rng = check_random_state(derive_seed(args.seed, TAG_SAMPLE))
    footer = []
    if args.sampler == "exact":
        if M.kind != "circle" or args.dist != "gaussian":
            raise UsageError("the exact sampler is available only for the Gaussian on the circle")
        draws = exact_sample(dist, args.n, rng)
    else:
        res = mh_sample(dist, args.n, ChainConfig(burn_in=args.burn_in, thin=args.thin), rng)
        draws = res.samples
        footer.append(f"acceptance_rate: {res.acceptance_rate!r}")
    columns = ("theta",) if M.kind == "circle" else tuple(f"x{i}" for i in range(M.ambient_dim))
    rows = [dict(zip(columns, map(float, d))) for d in draws]
    _write(args, argv, columns, rows, footer)


def _common(p: argparse.ArgumentParser, seed_default: int = 0) -> None:
    p.add_argument("--seed", type=int, default=seed_default)
    p.add_argument("--out", default=None, help="output CSV path (default: stdout)")
    p.add_argument("--stamp", action="store_true", help="add a timestamp line to the manifest")


def _mc(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, default=1000, help="Monte-Carlo draws per distribution and replicate")
    p.add_argument("--n-eps", type=int, default=1000, help="size of the eps grid")
    p.add_argument("--m", type=int, default=100, help="replicates averaged per calibration")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rgdp", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"rgdp {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("calibrate", help="privacy budget mu of a Riemannian Gaussian")
    p.add_argument("--manifold", choices=mf.KINDS, required=True)
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--delta", type=float, required=True, help="global sensitivity")
    p.add_argument("--sigma", type=float, required=True, help="rate of the Gaussian")
    p.add_argument("--method", choices=("auto", "analytic", "mcmc", "closed-form"), default="auto")
    p.add_argument("--eps-max", type=float, default=None)
    _mc(p)
    _common(p)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("fig1-budget", help="mu against sigma = k/4 on the circle or the line")
    p.add_argument("--target", choices=("circle", "euclidean"), required=True)
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--replicates", type=int, default=20)
    p.add_argument("--k", type=int, nargs="+", default=None, help="subset of k (default 1..16)")
    p.add_argument("--threads", type=int, default=None)
    _mc(p)
    _common(p)
    p.set_defaults(func=cmd_fig1_budget)

    p = sub.add_parser("sphere-utility", help="Gaussian vs Laplace private Fréchet means on the sphere")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--n-points", type=int, default=10)
    p.add_argument("--radius", type=float, default=math.pi / 8)
    p.add_argument("--repetitions", type=int, default=1000)
    p.add_argument("--k", type=int, nargs="+", default=None, help="subset of k (default 1..12)")
    p.add_argument("--threads", type=int, default=None)
    _mc(p)
    _common(p)
    p.set_defaults(func=cmd_sphere_utility)

    p = sub.add_parser("sample", help="draw from a Riemannian Gaussian or Laplace law")
    p.add_argument("--manifold", choices=mf.KINDS, required=True)
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--dist", choices=("gaussian", "laplace"), default="gaussian")
    p.add_argument("--footprint", default=None, help="comma-separated ambient coordinates (default: origin)")
    p.add_argument("--rate", type=float, required=True)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--sampler", choices=("mh", "exact"), default="mh")
    p.add_argument("--burn-in", type=int, default=1000)
    p.add_argument("--thin", type=int, default=5)
    _common(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("replay", help="re-run the command recorded in a CSV manifest")
    p.add_argument("file")
    p.add_argument("--out", default=None, help="output CSV path (default: stdout)")
    return parser


def _recorded_argv(path: str) -> list[str]:
    with open(path) as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            if line.startswith("# command: rgdp "):
                return shlex.split(line[len("# command: rgdp "):])
    raise UsageError(f"{path} carries no rgdp manifest")


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "replay":
            recorded = _recorded_argv(args.file)
            if args.out is not None:
                recorded += ["--out", args.out]
            return main(recorded)
        args.func(args, argv)
    except (ValueError, TypeError) as exc:
        print(f"rgdp: error: {exc}", file=sys.stderr)
        return 2
    except ArithmeticError as exc:
        print(f"rgdp: numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
