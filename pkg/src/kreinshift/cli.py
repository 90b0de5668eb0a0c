"""Command-line driver for verification campaigns.

Subcommands wrap the library: `norm` and `specrad` report certified
operator norms and spectral radius sandwiches, `growth` classifies
orbit growth for all four operator variants, `krein` runs the doubled
space identity batteries, `lemma <id>` runs named verification presets,
and `oracle` runs the randomized finite-dimensional batteries.

Exit codes: 0 pass, 1 check failed, 2 uncertified but consistent,
3 inconclusive, 64 usage error.  JSON output is deterministic: the same
config and seed produce byte-identical bytes, and the resolved config
is echoed into every report.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np
from mpmath import mp

from . import findim, growth, krein, shift_ops, weights
from .growth import GrowthQuery, GrowthStatus, classify_all_kinds, classify_growth
from .krein import (
    DoubledOperator,
    SpanSign,
    density_witness,
    generator_identity_battery,
    j_unitarity_check,
    random_unitarity_samples,
    sign_definiteness_check,
)
from .shift_ops import (
    JSON_SCHEMA,
    OperatorKind,
    ShiftOperator,
    flip_conjugate_check,
    norm_power,
    specrad_bounds,
)
from .weights import OscillatingWeights, parse_weight_spec, tail_derivative_bound

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_UNCERTIFIED = 2
EXIT_INCONCLUSIVE = 3
EXIT_USAGE = 64

_KIND_CHOICES = {
    "forward": OperatorKind.FORWARD,
    "inverse": OperatorKind.INVERSE,
    "adjoint": OperatorKind.ADJOINT,
    "adjoint-inverse": OperatorKind.ADJOINT_INVERSE,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--weights", default="paper:c=2",
                   help="weight family: const | geom:r=<real> | paper:c=<real> | "
                        "user:log=<expr in n> (default: %(default)s)")
    p.add_argument("--precision-bits", type=int, default=weights.DEFAULT_PRECISION_BITS,
                   help="working precision for log-weight evaluation (default: %(default)s)")
    p.add_argument("--output", choices=("text", "json", "csv"), default="text",
                   help="report format (default: %(default)s)")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for randomized batteries (default: %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kreinshift", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("norm", help="certified log operator norm of a shift power")
    _add_common(p)
    p.add_argument("--N", type=int, default=1, help="power (default: %(default)s)")
    p.add_argument("--window", type=int, default=1_000_000,
                   help="scan half-width (default: %(default)s)")
    p.add_argument("--kind", choices=sorted(_KIND_CHOICES), default="forward")

    p = sub.add_parser("specrad", help="spectral radius sandwich from the Gelfand sequence")
    _add_common(p)
    p.add_argument("--max-pow", type=int, default=12,
                   help="largest power is 2**this (default: %(default)s)")
    p.add_argument("--window", type=int, default=1_000_000)
    p.add_argument("--witness-k", type=int, default=2)
    p.add_argument("--kind", choices=sorted(_KIND_CHOICES), default="forward")

    p = sub.add_parser("growth", help="orbit growth classification for all four kinds")
    _add_common(p)
    p.add_argument("--rate", type=float, required=True, help="growth rate a > 0")
    p.add_argument("--witness-k", type=int, default=2)
    p.add_argument("--horizon-exp", type=int, default=20,
                   help="scan schedule reaches 2**this (default: %(default)s)")
    p.add_argument("--kind", choices=sorted(_KIND_CHOICES) + ["all"], default="all")

    p = sub.add_parser("krein", help="doubled-space identity batteries")
    _add_common(p)
    p.add_argument("--range", type=int, default=20, dest="range_limit",
                   help="generator powers run over [-range, range] (default: %(default)s)")
    p.add_argument("--unitarity-samples", type=int, default=50)

    p = sub.add_parser("lemma", help="named verification presets")
    _add_common(p)
    p.add_argument("lemma_id", choices=["1", "2", "3", "4", "5", "6", "7", "thm1"])
    p.add_argument("--window", type=int, default=100_000)
    p.add_argument("--max-pow", type=int, default=10)
    p.add_argument("--range", type=int, default=20, dest="range_limit")
    p.add_argument("--c", type=float, default=None,
                   help="growth base for thm1 (overrides --weights with paper:c=<c>)")

    p = sub.add_parser("oracle", help="randomized finite-dimensional batteries")
    _add_common(p)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--c", type=float, default=1.0)

    return parser


def _emit(payload: dict, args, rows=None) -> None:
    if args.output == "json":
        sys.stdout.write(json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n")
    elif args.output == "csv":
        if rows is None:
            raise UsageError("csv output is only available for specrad sweeps")
        sys.stdout.write("N,log_norm,root_estimate\n")
        for n, log_norm, root in rows:
            sys.stdout.write(f"{n},{_csv_num(log_norm)},{_csv_num(root)}\n")
    else:
        _emit_text(payload)


def _csv_num(x) -> str:
    return "" if x is None else repr(float(x))


def _emit_text(payload: dict, indent: int = 0) -> None:
    pad = "  " * indent
    for key, value in payload.items():
        if isinstance(value, dict):
            sys.stdout.write(f"{pad}{key}:\n")
            _emit_text(value, indent + 1)
        elif isinstance(value, list):
            sys.stdout.write(f"{pad}{key}: {json.dumps(value)}\n")
        else:
            sys.stdout.write(f"{pad}{key}: {value}\n")


def _config_echo(args, extra: dict | None = None) -> dict:
    config = {
        "command": args.command,
        "weights": getattr(args, "weights", None),
        "precision_bits": getattr(args, "precision_bits", None),
        "output": args.output,
        "seed": args.seed,
    }
    for name in ("N", "window", "max_pow", "witness_k", "rate", "horizon_exp",
                 "range_limit", "kind", "trials", "c", "lemma_id", "unitarity_samples"):
        if hasattr(args, name):
            config[name] = getattr(args, name)
    if extra:
        config.update(extra)
    return config


def _wrap(args, result: dict) -> dict:
    return {"schema": JSON_SCHEMA, "config": _config_echo(args), "result": result}


def cmd_norm(args) -> int:
    w = parse_weight_spec(args.weights, args.precision_bits)
    op = ShiftOperator(w, _KIND_CHOICES[args.kind])
    cert = norm_power(op, args.N, args.window)
    _emit(_wrap(args, cert.to_json_dict()), args)
    return EXIT_UNCERTIFIED if cert.lower_bound_only else EXIT_PASS


def cmd_specrad(args) -> int:
    w = parse_weight_spec(args.weights, args.precision_bits)
    op = ShiftOperator(w, _KIND_CHOICES[args.kind])
    bounds = specrad_bounds(op, args.max_pow, args.window, witness_k_max=args.witness_k)
    rows = [
        (c.power, c.certified_log_norm,
         None if c.certified_log_norm is None else math.exp(c.certified_log_norm / c.power))
        for c in bounds.certificates
    ]
    _emit(_wrap(args, bounds.to_json_dict()), args, rows=rows)
    return EXIT_PASS if bounds.certified else EXIT_UNCERTIFIED


def cmd_growth(args) -> int:
    w = parse_weight_spec(args.weights, args.precision_bits)
    if args.kind == "all":
        report = classify_all_kinds(w, args.rate, args.horizon_exp, args.witness_k)
        _emit(_wrap(args, report.to_json_dict()), args)
        return EXIT_INCONCLUSIVE if report.any_inconclusive else EXIT_PASS
    q = GrowthQuery(w, _KIND_CHOICES[args.kind], args.rate, args.horizon_exp, args.witness_k)
    verdict = classify_growth(q)
    _emit(_wrap(args, verdict.to_json_dict()), args)
    return EXIT_INCONCLUSIVE if verdict.status is GrowthStatus.INCONCLUSIVE else EXIT_PASS


def cmd_krein(args) -> int:
    w = parse_weight_spec(args.weights, args.precision_bits)
    if args.range_limit < 0:
        raise UsageError("--range must be >= 0")
    op = DoubledOperator(w)
    battery = generator_identity_battery(op, args.range_limit)
    rng = np.random.default_rng(args.seed)
    unitarity = j_unitarity_check(
        op, random_unitarity_samples(rng, args.unitarity_samples)
    )
    density_ok = all(
        density_witness(op, n).passed for n in range(-args.range_limit, args.range_limit + 1)
    )
    sign_plus = sign_definiteness_check(op, SpanSign.PLUS, {0: 1.0})
    sign_minus = sign_definiteness_check(op, SpanSign.MINUS, {0: 1.0})
    sign_ok = abs(sign_plus - 2.0) <= 1e-12 and abs(sign_minus + 2.0) <= 1e-12
    passed = battery.all_pass and unitarity.passed and density_ok and sign_ok
    result = {
        "battery": battery.to_json_dict(),
        "j_unitarity": unitarity.to_json_dict(),
        "density_pass": density_ok,
        "sign_definiteness_pass": sign_ok,
        "pass": passed,
    }
    _emit(_wrap(args, result), args)
    return EXIT_PASS if passed else EXIT_FAIL


def _lemma_ratio_bound_check(args, w, reverse: bool) -> tuple[dict, int]:
    """Presets 1-4: spectral radius upper bound from the measured ratio sup.

    Forward flavor: r(V) is at most the sup of |v_{n+1}/v_n|; reverse
    flavor mirrors it for the inverse.  The hypothesis sup is measured
    as max(scanned window sup, analytic tail), i.e. the 1-power
    certificate, so the check is non-vacuous for every certified family.
    """
    kind = OperatorKind.INVERSE if reverse else OperatorKind.FORWARD
    op = ShiftOperator(w, kind)
    cert1 = norm_power(op, 1, args.window)
    bounds = specrad_bounds(op, args.max_pow, args.window)
    if cert1.certified_log_norm is None or not bounds.certified:
        return {"status": "inconclusive: no certified tail for this family"}, EXIT_INCONCLUSIVE
    ok = bounds.upper_log <= cert1.certified_log_norm + 1e-12
    result = {
        "direction": "inverse" if reverse else "forward",
        "unit_ratio_sup_log": cert1.certified_log_norm,
        "specrad_upper_log": bounds.upper_log,
        "pass": bool(ok),
    }
    return result, EXIT_PASS if ok else EXIT_FAIL


def _lemma_construction_check(args, w) -> tuple[dict, int]:
    """Preset 6: sandwich around the growth base plus the quadruple verdict."""
    if not isinstance(w, OscillatingWeights):
        return {"status": "inconclusive: preset 6 needs paper:c=<c> weights"}, EXIT_INCONCLUSIVE
    log_c = math.log(w.c)
    sandwich = {}
    ok = True
    for kind in (OperatorKind.FORWARD, OperatorKind.INVERSE):
        bounds = specrad_bounds(ShiftOperator(w, kind), args.max_pow, args.window)
        good = (
            bounds.certified
            and bounds.lower_log >= log_c - 1e-12
            and bounds.upper_log <= log_c + 0.05
        )
        ok = ok and good
        sandwich[kind.value] = {
            "lower_log": bounds.lower_log,
            "upper_log": bounds.upper_log,
            "pass": bool(good),
        }
    quadruple = growth.s_trivial_all_four(w, w.c)
    ok = ok and quadruple.all_unbounded
    result = {
        "sandwich": sandwich,
        "growth": quadruple.to_json_dict(),
        "pass": bool(ok),
    }
    return result, EXIT_PASS if ok else EXIT_FAIL


def cmd_lemma(args) -> int:
    if args.lemma_id == "thm1" and args.c is not None:
        args.weights = f"paper:c={args.c!r}"
    w = parse_weight_spec(args.weights, args.precision_bits)

    if args.lemma_id in ("1", "2"):
        result, code = _lemma_ratio_bound_check(args, w, reverse=False)
    elif args.lemma_id in ("3", "4"):
        result, code = _lemma_ratio_bound_check(args, w, reverse=True)
    elif args.lemma_id == "5":
        if w.is_symmetric is False:
            raise UsageError("preset 5 (flip conjugation) needs symmetric weights")
        report = flip_conjugate_check(w, range(-1000, 1001))
        result = report.to_json_dict()
        code = EXIT_PASS if report.passed else EXIT_FAIL
    elif args.lemma_id == "6":
        result, code = _lemma_construction_check(args, w)
    elif args.lemma_id == "7":
        op = DoubledOperator(w)
        battery = generator_identity_battery(op, args.range_limit)
        result = battery.to_json_dict()
        code = EXIT_PASS if battery.all_pass else EXIT_FAIL
    else:  # thm1: composite (a) sandwich, (b) quadruple, (c) doubled-space structure
        if not isinstance(w, OscillatingWeights):
            raise UsageError("thm1 needs paper:c=<c> weights (or --c)")
        part_a_b, code_ab = _lemma_construction_check(args, w)
        op = DoubledOperator(w)
        battery = generator_identity_battery(op, args.range_limit)
        rng = np.random.default_rng(args.seed)
        unitarity = j_unitarity_check(op, random_unitarity_samples(rng, 50))
        density_ok = all(density_witness(op, n).passed
                         for n in range(-args.range_limit, args.range_limit + 1))
        part_c_ok = battery.all_pass and unitarity.passed and density_ok
        passed = code_ab == EXIT_PASS and part_c_ok
        result = {
            "a_spectral_radius": part_a_b.get("sandwich"),
            "b_growth": part_a_b.get("growth"),
            "c_invariant_subspaces": {
                "battery": battery.to_json_dict(),
                "j_unitarity": unitarity.to_json_dict(),
                "density_pass": density_ok,
                "pass": part_c_ok,
            },
            "pass": bool(passed),
        }
        code = EXIT_PASS if passed else EXIT_FAIL
    _emit(_wrap(args, result), args)
    return code


def cmd_oracle(args) -> int:
    rng = np.random.default_rng(args.seed)
    split_failures = 0
    for _ in range(args.trials):
        t1 = findim.sample_operator_with_gap(3, args.c, rng)
        t2 = findim.sample_operator_with_gap(4, args.c, rng)
        if not findim.check_direct_sum_split(t1, t2, args.c).passed:
            split_failures += 1
    bound_failures = 0
    for _ in range(args.trials):
        dim = int(rng.integers(2, 7))
        lead = int(rng.integers(1, dim))
        T, basis = findim.triangular_with_invariant_leading_block(dim, lead, rng, args.c)
        if not findim.check_invariant_subspace_bound(T, basis, args.c, 0.1).passed:
            bound_failures += 1
    passed = split_failures == 0 and bound_failures == 0
    result = {
        "trials": args.trials,
        "direct_sum_split_failures": split_failures,
        "invariant_bound_failures": bound_failures,
        "pass": passed,
    }
    _emit(_wrap(args, result), args)
    return EXIT_PASS if passed else EXIT_FAIL


_DISPATCH = {
    "norm": cmd_norm,
    "specrad": cmd_specrad,
    "growth": cmd_growth,
    "krein": cmd_krein,
    "lemma": cmd_lemma,
    "oracle": cmd_oracle,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _DISPATCH[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
