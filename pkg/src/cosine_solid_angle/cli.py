"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 oracle disagreement or failed
concordance.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import analytic, campaign, oracle, sweep
from .errors import ConvergenceError, DomainError, InvalidGeometry, InvalidSweep
from .geom import CylinderGeometry, DiscGeometry, SpreadGeometry

SEED_ENV = "COSINE_SOLID_ANGLE_SEED"

EXIT_OK, EXIT_INVALID, EXIT_DISAGREE = 0, 2, 3


class _Disagreement(Exception):
    pass


def _default_seed():
    raw = os.environ.get(SEED_ENV, "0")
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"error: {SEED_ENV} must be an integer, got {raw!r}")


def _num(x):
    return f"{x:.15g}"


def _add_eval_flags(p, oracles):
    p.add_argument("--format", choices=("plain", "csv", "json"), default="plain")
    p.add_argument("--steradians", action="store_true", help="report 2*pi times the hemisphere-normalised value")
    p.add_argument("--verify", choices=oracles, help="co-compute an independent oracle")
    _add_oracle_flags(p)


def _add_oracle_flags(p):
    p.add_argument("--samples", type=int, default=1_000_000, help="Monte Carlo sample count")
    p.add_argument("--seed", type=int, default=None, help=f"Monte Carlo seed (default ${SEED_ENV} or 0)")
    p.add_argument("--chunks", type=int, default=16)
    p.add_argument("--tol", type=float, default=1e-10, help="quadrature absolute tolerance")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cosine-solid-angle",
        description="Solid angles of cylinders and discs seen from a point cosine source (hemisphere = 1).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("point", help="whole cylindrical detector")
    for name in ("r", "d", "l1", "l2"):
        p.add_argument(f"--{name}", type=float, required=True)
    _add_eval_flags(p, ("mc", "quad", "direct2d"))

    p = sub.add_parser("disc", help="single disc parallel to the source plane")
    for name in ("r", "d", "l"):
        p.add_argument(f"--{name}", type=float, required=True)
    _add_eval_flags(p, ("mc", "quad", "direct2d"))

    p = sub.add_parser("spread", help="coaxial disc source and disc detector")
    p.add_argument("--rs", type=float, required=True)
    p.add_argument("--rd", type=float, required=True)
    p.add_argument("--l", type=float, required=True)
    _add_eval_flags(p, ("mc", "quad"))

    p = sub.add_parser("sweep", help="tabulate one quantity while one parameter varies")
    p.add_argument("--quantity", choices=("total", "circ", "cyl0", "spread"), default="total")
    p.add_argument("--vary", help="parameter to vary (l1, l2, d, r, l, r_s, r_d)")
    p.add_argument("--from", dest="start", type=float)
    p.add_argument("--to", dest="stop", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--set", dest="fixed", action="append", default=[], metavar="NAME=VALUE",
                   help="fixed parameter; repeatable")
    p.add_argument("--log", action="store_true", help="logarithmic step spacing")
    p.add_argument("--oracle", choices=("mc", "quadrature", "direct2d"))
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--precision", type=int, default=9)
    p.add_argument("--output", help="write to this file (atomically) instead of stdout")
    p.add_argument("--canonical", metavar="DIR",
                   help="write the bundled l1 sweeps (r=1, lengths 5 and 10) into DIR")
    _add_oracle_flags(p)

    p = sub.add_parser("verify", help="randomised oracle concordance campaign")
    p.add_argument("--cases", type=int, default=200)
    p.add_argument("--tol", type=float, default=1e-10, help="quadrature tolerance; cases pass within 10*tol")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--mc-cases", type=int, default=10)
    p.add_argument("--mc-samples", type=int, default=100_000)
    return parser


def _mc_cfg(args):
    seed = _default_seed() if args.seed is None else args.seed
    return oracle.McConfig(args.samples, seed, args.chunks)


def _quad_cfg(args):
    return oracle.QuadConfig(abs_tol=args.tol)


def _check_oracle(exact, res, args):
    delta = res.value - exact
    if res.method == "mc":
        sigma = max(res.stderr, math.sqrt(exact * (1 - exact) / args.samples))
        ok = abs(delta) <= 4 * sigma
    else:
        ok = abs(delta) <= 10 * args.tol
    return delta, ok


def _report(args, value, regime=None, res=None, delta=None):
    k = 2 * math.pi if args.steradians else 1.0
    units = "sr" if args.steradians else "hemisphere"
    out = sys.stdout
    if args.format == "plain":
        out.write(_num(value * k) + "\n")
        if regime:
            out.write(f"regime={regime}\n")
        if res is not None:
            line = f"oracle={res.method} value={_num(res.value * k)} delta={_num(delta * k)}"
            if res.stderr is not None:
                line += f" stderr={_num(res.stderr * k)}"
            out.write(line + "\n")
    elif args.format == "json":
        doc = {"omega": value * k, "units": units}
        if regime:
            doc["regime"] = regime
        if res is not None:
            doc["oracle"] = {
                "method": res.method,
                "value": res.value * k,
                "stderr": None if res.stderr is None else res.stderr * k,
                "delta": delta * k,
            }
        out.write(json.dumps(doc) + "\n")
    else:
        out.write("omega,regime,oracle,oracle_stderr,delta\n")
        cells = [_num(value * k), regime or ""]
        if res is None:
            cells += ["", "", ""]
        else:
            cells += [
                _num(res.value * k),
                "" if res.stderr is None else _num(res.stderr * k),
                _num(delta * k),
            ]
        out.write(",".join(cells) + "\n")


def _evaluate(args, exact, regime, run_oracle):
    res = delta = None
    ok = True
    if args.verify:
        res = run_oracle(args.verify)
        delta, ok = _check_oracle(exact, res, args)
    _report(args, exact, regime, res, delta)
    if not ok:
        raise _Disagreement(f"oracle disagrees with the closed form by {delta:.3e}")


def cmd_point(args):
    geom = CylinderGeometry(args.r, args.d, args.l1, args.l2)
    exact = analytic.omega_total(geom).value
    regime = analytic.classify(geom)

    def run(kind):
        if kind == "mc":
            return oracle.mc_omega(geom, _mc_cfg(args))
        if kind == "quad":
            return oracle.quad_total(geom, _quad_cfg(args))
        return oracle.direct_2d_omega(geom, _quad_cfg(args))

    _evaluate(args, exact, regime, run)


def cmd_disc(args):
    geom = DiscGeometry(args.r, args.d, args.l)
    exact = analytic.omega_circ(geom).value

    def run(kind):
        if kind == "mc":
            return oracle.mc_omega(geom, _mc_cfg(args))
        if kind == "quad":
            target = "circ_dgr" if geom.d > geom.r else "circ_rgd"
            return oracle.quad_azimuthal(target, geom.l, geom.r, geom.d, _quad_cfg(args))
        return oracle.direct_2d_omega(geom, _quad_cfg(args))

    _evaluate(args, exact, None, run)


def cmd_spread(args):
    geom = SpreadGeometry(args.rs, args.rd, args.l)
    exact = analytic.omega_spread(geom).value

    def run(kind):
        if kind == "mc":
            return oracle.mc_omega_spread(geom, _mc_cfg(args))
        return oracle.quad_spread(geom, _quad_cfg(args))

    _evaluate(args, exact, None, run)


def _parse_fixed(items):
    fixed = {}
    for item in items:
        name, sep, value = item.partition("=")
        if not sep:
            raise InvalidSweep(f"--set expects NAME=VALUE, got {item!r}")
        try:
            fixed[name.strip()] = float(value)
        except ValueError:
            raise InvalidSweep(f"--set {name}: {value!r} is not a number")
    return fixed


def cmd_sweep(args):
    if args.canonical:
        os.makedirs(args.canonical, exist_ok=True)
        for (length, d), records in sweep.canonical_sweeps().items():
            path = os.path.join(args.canonical, f"l1_sweep_length{length:g}_d{d:g}.{args.format}")
            sweep.write_records(path, records, args.format, args.precision)
            print(path)
        return
    missing = [f for f in ("vary", "start", "stop", "steps") if getattr(args, f) is None]
    if missing:
        raise InvalidSweep("missing " + ", ".join("--" + {"vary": "vary", "start": "from", "stop": "to"}.get(m, m) for m in missing))
    spec = sweep.SweepSpec(
        varying=args.vary,
        start=args.start,
        stop=args.stop,
        steps=args.steps,
        fixed=_parse_fixed(args.fixed),
        quantity=args.quantity,
        oracle=args.oracle,
        spacing="log" if args.log else "linear",
        mc=_mc_cfg(args),
        quad=_quad_cfg(args),
    )
    records = sweep.run_sweep(spec)
    if args.output:
        sweep.write_records(args.output, records, args.format, args.precision)
    else:
        sys.stdout.write(sweep.emit(records, args.format, args.precision).decode("utf-8"))


def cmd_verify(args):
    if args.cases < 1:
        raise InvalidSweep("--cases must be >= 1")
    if args.mc_cases < 0:
        raise InvalidSweep("--mc-cases must be >= 0")
    seed = _default_seed() if args.seed is None else args.seed
    cfg = oracle.QuadConfig(abs_tol=args.tol)
    limit = 10 * args.tol
    quad, direct = campaign.quadrature_suites(args.cases, seed, cfg, limit, limit)
    ok = quad.failed == 0 and direct.failed == 0
    print(quad.line())
    print(direct.line())
    if args.mc_cases:
        mc, mc_ok = campaign.mc_suite(args.mc_cases, args.mc_samples, seed)
        print(mc.line())
        ok = ok and mc_ok
    print("PASS" if ok else "FAIL")
    if not ok:
        raise _Disagreement("concordance failures")


COMMANDS = {"point": cmd_point, "disc": cmd_disc, "spread": cmd_spread, "sweep": cmd_sweep, "verify": cmd_verify}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except (InvalidGeometry, DomainError, InvalidSweep, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (_Disagreement, ConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DISAGREE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
