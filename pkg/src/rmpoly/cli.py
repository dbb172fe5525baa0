"""Command-line entry point: ``rmpoly {sample,polygon,certify,experiment,turyn}``.

Output is JSON lines: a metadata header ``{"type": "meta", ...}`` followed by
results. ``--format csv`` (experiment only) writes the metadata as a single
``# meta: {...}`` comment line ahead of the CSV table.

Exit codes: 0 success / Irreducible, 1 Reducible, 2 usage or input error,
3 Unknown. The default seed is read from ``RMPOLY_SEED`` (else 0).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import __version__
from .certify import CertifyConfig, certify, large_factor_bound
from .errors import CertificationUnavailable, RmpolyError
from .experiments import (
    ExperimentConfig,
    metadata,
    run_trials,
    summarize,
    summary_csv,
    turyn_experiment,
    write_jsonl,
)
from .multfunc import character_mult_function, sample_mult_function
from .polycore import IntPolynomial, ShiftedResidues, build_polynomial, dyadic_profile, newton_polygon, shift_mod

EXIT_CODES = {"Irreducible": 0, "Reducible": 1, "Unknown": 3}
EXIT_USAGE = 2


class InputError(Exception):
    pass


def _default_seed():
    raw = os.environ.get("RMPOLY_SEED")
    return int(raw, 0) if raw else 0


def _dump(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _int_list(text):
    return [int(t) for t in text.replace(",", " ").split()]


def _add_common(p, seed=True):
    if seed:
        p.add_argument("--seed", type=lambda s: int(s, 0), default=_default_seed(), help="master seed (u64)")
    p.add_argument("--out", help="write output here instead of stdout")


def _add_source(p):
    g = p.add_argument_group("polynomial source (pick one)")
    g.add_argument("--coeffs", help='coefficients, constant first, e.g. "1 1 -1 1"')
    g.add_argument("--file", help="file of whitespace-separated coefficients ('-' for stdin)")
    g.add_argument("--n", type=int, help="sample P_{f,N} with this N")
    g.add_argument("--trial", type=int, default=0)
    g.add_argument("--turyn", nargs=2, type=int, metavar=("D", "P"), help="cofactor of the Turyn polynomial F_{d,p}")


def _add_certify_flags(p):
    p.add_argument("--B", type=int, default=CertifyConfig.small_factor_bound, help="small-factor bound")
    p.add_argument("--search-bound", type=int, default=CertifyConfig.polygon_search_bound)
    p.add_argument("--modp-primes", type=_int_list, default=None)
    p.add_argument("--mod-exp", type=int, default=CertifyConfig.residue_exponent, help="residue exponent m")


def _cfg_from(args):
    return CertifyConfig(
        small_factor_bound=args.B,
        polygon_search_bound=args.search_bound,
        modp_primes=tuple(args.modp_primes) if args.modp_primes else None,
        residue_exponent=args.mod_exp,
    )


def _load_poly(args):
    chosen = [x is not None for x in (args.coeffs, args.file, args.n, args.turyn)]
    if sum(chosen) != 1:
        raise InputError("give exactly one of --coeffs, --file, --n, --turyn")
    try:
        if args.coeffs is not None:
            return IntPolynomial.from_text(args.coeffs), {"coeffs": args.coeffs}
        if args.file is not None:
            text = sys.stdin.read() if args.file == "-" else open(args.file).read()
            return IntPolynomial.from_text(text), {"file": args.file}
        if args.n is not None:
            f = sample_mult_function(args.seed, args.trial, args.n)
            return build_polynomial(f, args.n), {"n": args.n, "seed": args.seed, "trial": args.trial}
        d, p = args.turyn
        return build_polynomial(character_mult_function(p, d), d), {"turyn": [d, p]}
    except (OSError, ValueError) as exc:
        raise InputError(str(exc)) from exc


def _emit(args, lines):
    text = "".join(line + "\n" for line in lines)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_sample(args):
    if args.n is None or args.n < 1:
        raise InputError("--n must be >= 1")
    f = sample_mult_function(args.seed, args.trial, args.n)
    P = build_polynomial(f, args.n)
    meta = metadata("sample", {"n": args.n, "trial": args.trial}, args.seed)
    body = {"type": "sample", "sign_function": f.to_record(), "coefficients": list(P.coeffs)}
    _emit(args, [_dump({"type": "meta", **meta}), _dump(body)])
    return 0


def cmd_polygon(args):
    P, source = _load_poly(args)
    if not 1 <= args.mod_exp <= 16:
        raise InputError("--mod-exp must lie in [1, 16]")
    meta = metadata("polygon", {"source": source, "mod_exp": args.mod_exp, "shift": not args.no_shift}, getattr(args, "seed", None))
    if P.deg < 1:
        sys.stderr.write("degenerate polynomial of degree 0: no Newton polygon\n")
        return EXIT_USAGE
    try:
        if args.no_shift:
            mask = (1 << args.mod_exp) - 1
            residues = ShiftedResidues(args.mod_exp, np.array([c & mask for c in P.coeffs], dtype=np.uint64))
        else:
            residues = shift_mod(P, args.mod_exp)
        poly = newton_polygon(dyadic_profile(residues))
        edge = large_factor_bound(poly)
    except CertificationUnavailable as exc:
        sys.stderr.write(f"polygon unavailable: {exc}\n")
        return EXIT_USAGE
    body = {"type": "polygon", **poly.to_dict(), "large_factor_edge": edge.to_dict() if edge else None}
    _emit(args, [_dump({"type": "meta", **meta}), _dump(body)])
    return 0


def cmd_certify(args):
    P, source = _load_poly(args)
    cfg = _cfg_from(args)
    meta = metadata("certify", {"source": source, "certify": cfg.to_dict()}, getattr(args, "seed", None))
    cert = certify(P, cfg)
    _emit(args, [_dump({"type": "meta", **meta}), _dump({"type": "certificate", **cert.to_dict()})])
    return EXIT_CODES[cert.verdict]


def cmd_experiment(args):
    if args.config:
        with open(args.config) as fh:
            cfg = ExperimentConfig.from_dict(json.load(fh))
    else:
        cfg = ExperimentConfig(
            master=args.seed,
            k_range=tuple(args.k),
            trials=args.trials,
            A=args.A,
            certify=_cfg_from(args),
            workers=args.workers,
            exhaustive=args.exhaustive,
        )
    if args.workers != 1:
        cfg = ExperimentConfig.from_dict({**cfg.to_dict(), "workers": args.workers})
    records = run_trials(cfg)
    summary = summarize(cfg, records)
    for s in summary.per_k:
        sys.stderr.write(f"k={s.k} N={s.N} T={s.T} counts={s.counts}\n")
    meta = metadata("experiment", cfg.to_dict(), cfg.master)
    if args.format == "csv":
        buf = io.StringIO()
        buf.write("# meta: " + _dump(meta) + "\n")
        csv.writer(buf, lineterminator="\n").writerows(summary_csv(summary))
        text = buf.getvalue()
    else:
        buf = io.StringIO()
        write_jsonl(buf, meta, records, summary, timing=args.timing)
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_turyn(args):
    cfg = _cfg_from(args)
    result = turyn_experiment(args.d, (args.p_lo, args.p_hi), args.trials, cfg, master=args.seed)
    meta = metadata(
        "turyn",
        {"d": args.d, "p_lo": args.p_lo, "p_hi": args.p_hi, "trials": args.trials, "certify": cfg.to_dict(), "note": result["note"]},
        args.seed,
    )
    lines = [_dump({"type": "meta", **meta})]
    lines += [_dump({"type": "trial", **row}) for row in result["trials"]]
    per_d = {str(d): v for d, v in result["per_d"].items()}
    lines.append(_dump({"type": "summary", "p_range": result["p_range"], "num_primes": result["num_primes"], "per_d": per_d}))
    _emit(args, lines)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="rmpoly", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"rmpoly {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="sample f and P_{f,N}")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trial", type=int, default=0)
    _add_common(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("polygon", help="2-adic Newton polygon of P(X+1)")
    _add_source(p)
    p.add_argument("--mod-exp", type=int, default=CertifyConfig.residue_exponent)
    p.add_argument("--no-shift", action="store_true", help="polygon of P itself instead of P(X+1)")
    _add_common(p)
    p.set_defaults(func=cmd_polygon)

    p = sub.add_parser("certify", help="certify irreducibility over Q")
    _add_source(p)
    _add_certify_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("experiment", help="Monte Carlo irreducibility experiment over N = 2^k")
    p.add_argument("--k", type=int, nargs="+", default=[4, 6, 8])
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--A", type=int, default=None)
    p.add_argument("--exhaustive", action="store_true", help="enumerate every prime-sign pattern")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--config", help="JSON experiment config (overrides the flags above)")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--timing", action="store_true", help="include per-trial wall time (breaks byte-reproducibility)")
    _add_certify_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("turyn", help="certify Turyn-polynomial cofactors for random primes")
    p.add_argument("--d", type=_int_list, required=True, help="degrees, e.g. '8' or '4,8'")
    p.add_argument("--p-lo", type=int, default=None)
    p.add_argument("--p-hi", type=int, default=10**6)
    p.add_argument("--trials", type=int, default=50)
    _add_certify_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_turyn)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "turyn" and args.p_lo is None:
        args.p_lo = max(args.d) + 1
    try:
        return args.func(args)
    except (InputError, RmpolyError, ValueError, OSError) as exc:
        sys.stderr.write(f"rmpoly {args.command}: {exc}\n")
        return EXIT_USAGE


def main_entry():  # pragma: no cover
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    main_entry()
