"""Command line interface: config ingestion, subcommand dispatch, CSV/SVG
emission.  Exit codes: 0 success, 2 usage/config error, 1 domain error with a
one-line ``ERROR <code>: <detail>`` message."""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys

from . import __version__
from .errors import ConfigError, FavlabError
from .exprs import parse_expr
from .ifs import IFS, attractor_hull, parse_word, word_str
from .favard import (
    bound_curves,
    favard,
    fit_decay,
    schedule as make_schedule,
)
from .projection import density_profile, density_witness, visibility_estimate
from .relclose import RelCloseCertificate, SearchBudget, find_pair, double_family, power_family
from .rotation import diophantine_profile, epsilon_net
from .counting import avoidance_count, h2_length_bound, removal_recursion
from .svg import render_svg


def _config_hash(args):
    blob = json.dumps(
        {k: v for k, v in sorted(vars(args).items()) if k != "func"},
        default=str,
        sort_keys=True,
    )
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def _csv_header(args):
    return f"# favlab {__version__} config={_config_hash(args)} seed={args.seed}\n"


def _emit(args, text, path=None):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_ifs(args):
    return IFS.from_json(args.ifs)


def cmd_dim(args):
    ifs = _load_ifs(args)
    print(f"gamma {ifs.gamma}")
    return 0


def cmd_render(args):
    ifs = _load_ifs(args)
    theta = parse_expr(args.theta).value if args.theta else None
    doc = render_svg(ifs, args.depth, theta=theta)
    _emit(args, doc, args.svg)
    return 0


def cmd_favard(args):
    ifs = _load_ifs(args)
    body = attractor_hull(ifs) if args.hull else None
    res = favard(ifs, args.n, args.angles, body=body)
    rows = [_csv_header(args), "n,theta,length\n"]
    for theta, length in zip(res.thetas.tolist(), res.lengths.tolist()):
        rows.append(f"{args.n},{theta!r},{length!r}\n")
    rows.append(f"{args.n},{res.value!r},{res.max_over_theta!r}\n")
    _emit(args, "".join(rows), args.csv)
    if args.svg:
        _emit(args, render_svg(ifs, min(args.n, 6)), args.svg)
    if args.csv:
        print(f"favard {res.value} max_over_theta {res.max_over_theta}")
    return 0


def cmd_decay_fit(args):
    samples = {}
    with open(args.csv, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("n,"):
                continue
            parts = line.split(",")
            try:
                n = int(parts[0])
                val = float(parts[-1])
            except ValueError:
                continue
            samples.setdefault(n, []).append(val)
    # with several rows per level the last one is the summary row; drop it
    series = [
        (n, sum(v[:-1]) / (len(v) - 1) if len(v) > 1 else v[0])
        for n, v in sorted(samples.items())
    ]
    fit = fit_decay(series)
    sched = make_schedule_like(args)
    curves = bound_curves(
        sched, args.c_low, args.C_ls, args.a_ls, [n for n, _ in fit.samples],
        A=fit.A_hat,
    )
    print(f"A_hat {fit.A_hat} B_hat {fit.B_hat} residual {fit.residual}")
    print("n,observed,mattila,log_star,log_power")
    for (n, obs), lo, ls, th in zip(
        fit.samples, curves["mattila"], curves["log_star"], curves["log_power"]
    ):
        print(f"{n},{obs!r},{lo!r},{ls!r},{th!r}")
    return 0


def make_schedule_like(args):
    # schedule constants for the bound curves without requiring an IFS file
    from .favard import FavardSchedule, bound_constant

    return FavardSchedule(
        c1=args.c1, k=args.k, d=args.d, delta=args.delta, n=1, m=args.m,
        s_n=0.0, log_L_n=0.0, log_neg_log_rho=0.0,
        B=bound_constant(args.k, args.d, args.m, args.delta),
        s_lower_bound=0.0, inequality_holds=True,
    )


def _write_cert(args, cert):
    payload = json.dumps(cert.to_dict(), indent=2, sort_keys=True) + "\n"
    _emit(args, payload, getattr(args, "out", None))
    if getattr(args, "out", None):
        print(
            f"certificate {len(cert.words)} words eps {cert.eps} theta {cert.theta}"
        )
    return 0


def cmd_relclose_find(args):
    ifs = _load_ifs(args)
    phi = None
    if args.phi is not None:
        phi_val = parse_expr(args.phi).value
        phi = lambda _theta: phi_val  # noqa: E731
    cert = find_pair(ifs, args.eps, phi, SearchBudget(max_depth=args.depth))
    return _write_cert(args, cert)


def cmd_relclose_double(args):
    ifs = _load_ifs(args)
    with open(args.cert, "r", encoding="utf-8") as fh:
        cert = RelCloseCertificate.from_dict(json.load(fh))
    out = double_family(ifs, cert, args.eps, SearchBudget(max_depth=args.depth))
    return _write_cert(args, out)


def cmd_relclose_power(args):
    ifs = _load_ifs(args)
    cert = power_family(ifs, parse_word(args.u), parse_word(args.v), args.n,
                        eps=args.eps)
    return _write_cert(args, cert)


def cmd_density(args):
    ifs = _load_ifs(args)
    theta = parse_expr(args.theta).value
    with open(args.cert, "r", encoding="utf-8") as fh:
        cert = RelCloseCertificate.from_dict(json.load(fh))
    wit = density_witness(ifs, cert, theta)
    rows = [_csv_header(args), "r,ratio\n"]
    if wit.b > 0.0:
        radii = [wit.b * 2.0**-j for j in range(4)]
        try:
            ratios = density_profile(ifs, theta, wit.x, radii, args.n)
            for r, q in zip(radii, ratios):
                rows.append(f"{r!r},{q!r}\n")
        except FavlabError:
            pass
    _emit(args, "".join(rows), args.csv)
    print(
        f"x {wit.x} b {wit.b} log10_b {wit.log10_b} ratio {wit.ratio} "
        f"steering_len {wit.steering_word_len}"
    )
    return 0


def cmd_visible(args):
    ifs = _load_ifs(args)
    rows = [_csv_header(args), "n,covering_sum\n"]
    for n in range(1, args.n + 1):
        est = visibility_estimate(ifs, (args.ax, args.ay), args.s, n)
        rows.append(f"{n},{est.covering_sum!r}\n")
    _emit(args, "".join(rows), args.csv)
    return 0


def cmd_dioph(args):
    alpha = parse_expr(args.alpha)
    prof = diophantine_profile(alpha.as_fraction(), args.nmax, args.d)
    print(f"c_hat {prof.c_hat} d_hat {prof.d_hat}")
    print("N,M,residual")
    for n, m, res in prof.convergents:
        print(f"{n},{m},{res!r}")
    return 0


def cmd_net(args):
    theta1 = parse_expr(args.theta_over_pi).value * math.pi
    net = epsilon_net(theta1, args.eps, args.pmax, d=args.d)
    print(f"p {net.p} max_gap {net.max_gap} c1_hat {net.c1_hat}")
    return 0


def cmd_count_avoid(args):
    exact, bound = avoidance_count(args.m, args.s, args.blocks)
    h2 = h2_length_bound(args.m, args.s, args.blocks, 1.0 / args.m)
    print(f"exact {exact} bound {bound}")
    print(
        f"h2 {h2['value']} e_bound {h2['e_bound']} "
        f"applicable {h2['e_bound_applicable']}"
    )
    return 0


def cmd_count_removal(args):
    ifs = _load_ifs(args)
    phi = parse_expr(args.phi).value
    trace = removal_recursion(ifs, parse_word(args.target), phi, args.eps,
                              args.steps)
    print(f"c {trace.c} n0 {trace.n0} survivors {trace.survivors}")
    print("step,mass")
    for i, mass in enumerate(trace.masses):
        print(f"{i},{mass!r}")
    return 0


def cmd_schedule(args):
    ifs = _load_ifs(args)
    sched = make_schedule(ifs, args.n, args.c1, args.k, args.d, args.delta)
    print(
        f"s_n {sched.s_n} log_L_n {sched.log_L_n} "
        f"log_neg_log_rho {sched.log_neg_log_rho} B {sched.B} "
        f"inequality_holds {sched.inequality_holds}"
    )
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="favlab")
    p.add_argument("--seed", type=int, default=0)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, **kw):
        sp = sub.add_parser(name, **kw)
        sp.set_defaults(func=fn)
        return sp

    sp = add("dim", cmd_dim)
    sp.add_argument("--ifs", required=True)

    sp = add("render", cmd_render)
    sp.add_argument("--ifs", required=True)
    sp.add_argument("--depth", type=int, required=True)
    sp.add_argument("--svg")
    sp.add_argument("--theta")

    sp = add("favard", cmd_favard)
    sp.add_argument("--ifs", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--angles", type=int, required=True)
    sp.add_argument("--hull", action="store_true")
    sp.add_argument("--csv")
    sp.add_argument("--svg")

    decay = sub.add_parser("decay")
    dsub = decay.add_subparsers(dest="subcommand", required=True)
    sp = dsub.add_parser("fit")
    sp.set_defaults(func=cmd_decay_fit)
    sp.add_argument("--csv", required=True)
    sp.add_argument("--c1", type=float, default=1.0)
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--d", type=float, default=2.0)
    sp.add_argument("--delta", type=float, default=0.1)
    sp.add_argument("--m", type=int, default=3)
    sp.add_argument("--c-low", type=float, default=1.0)
    sp.add_argument("--C-ls", dest="C_ls", type=float, default=1.0)
    sp.add_argument("--a-ls", dest="a_ls", type=float, default=1.0)

    rel = sub.add_parser("relclose")
    rsub = rel.add_subparsers(dest="subcommand", required=True)
    sp = rsub.add_parser("find")
    sp.set_defaults(func=cmd_relclose_find)
    sp.add_argument("--ifs", required=True)
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--phi")
    sp.add_argument("--depth", type=int, default=12)
    sp.add_argument("--out")
    sp = rsub.add_parser("double")
    sp.set_defaults(func=cmd_relclose_double)
    sp.add_argument("--ifs", required=True)
    sp.add_argument("--cert", required=True)
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--depth", type=int, default=12)
    sp.add_argument("--out")
    sp = rsub.add_parser("power")
    sp.set_defaults(func=cmd_relclose_power)
    sp.add_argument("--ifs", required=True)
    sp.add_argument("--u", required=True)
    sp.add_argument("--v", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--eps", type=float, default=1e-6)
    sp.add_argument("--out")

    sp = add("density", cmd_density)
    sp.add_argument("--ifs", required=True)
    sp.add_argument("--theta", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--cert", required=True)
    sp.add_argument("--csv")

    sp = add("visible", cmd_visible)
    sp.add_argument("--ifs", required=True)
    sp.add_argument("--ax", type=float, required=True)
    sp.add_argument("--ay", type=float, required=True)
    sp.add_argument("--s", type=float, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--csv")

    sp = add("dioph", cmd_dioph)
    sp.add_argument("--alpha", required=True)
    sp.add_argument("--nmax", type=int, required=True)
    sp.add_argument("--d", type=float, required=True)

    sp = add("net", cmd_net)
    sp.add_argument("--theta-over-pi", dest="theta_over_pi", required=True)
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--pmax", type=int, default=1_000_000)
    sp.add_argument("--d", type=float, default=2.0)

    count = sub.add_parser("count")
    csub = count.add_subparsers(dest="subcommand", required=True)
    sp = csub.add_parser("avoid")
    sp.set_defaults(func=cmd_count_avoid)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--blocks", type=int, required=True)
    sp = csub.add_parser("removal")
    sp.set_defaults(func=cmd_count_removal)
    sp.add_argument("--ifs", required=True)
    sp.add_argument("--target", required=True)
    sp.add_argument("--steps", type=int, required=True)
    sp.add_argument("--phi", default="0")
    sp.add_argument("--eps", type=float, default=2.0)

    sp = add("schedule", cmd_schedule)
    sp.add_argument("--ifs", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--c1", type=float, default=1.0)
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--d", type=float, default=2.0)
    sp.add_argument("--delta", type=float, default=0.1)

    return p


def run(argv):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    print(
        "config: " + json.dumps(
            {k: v for k, v in sorted(vars(args).items()) if k != "func"},
            default=str, sort_keys=True,
        ),
        file=sys.stderr,
    )
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"ERROR {e}", file=sys.stderr)
        return 2
    except FavlabError as e:
        print(f"ERROR {e}", file=sys.stderr)
        return 1


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
