"""Command-line surface: one verdict or price per invocation, JSON out.

Exit codes: 0 the condition holds or a value was computed, 3 the condition
fails (a certificate or blocking description accompanies the report), 4 the
input is invalid, 5 an internal soundness check failed. Reports go to
standard output; errors are additionally emitted as structured JSON on
standard error. Output is deterministic: fixed key order, canonical
fractions. `--verify` replays every certificate in the report before
printing and aborts with exit 5 if any replay fails.
"""

import argparse
import json
import os
import sys

from . import arbitrage, marketio, redundancy, superhedge
from .errors import (
    ArbitrageError,
    DomainError,
    PreconditionError,
    SoundnessError,
    StructureError,
)
from .model import Claim, MarketModel

EXIT_OK = 0
EXIT_FAILS = 3
EXIT_INVALID = 4
EXIT_UNSOUND = 5

_GREEN = "\x1b[32m"
_RED = "\x1b[31m"
_RESET = "\x1b[0m"


def _report(command: str, verdict: str, values=None, certificates=None, diagnostics=None) -> dict:
    return {
        "command": command,
        "verdict": verdict,
        "values": values or {},
        "certificates": certificates or {},
        "diagnostics": diagnostics or {},
    }


def _load_market(path: str) -> MarketModel:
    with open(path, "rb") as handle:
        return marketio.parse_market(handle.read())


def _load_claim(path: str, m: MarketModel) -> Claim:
    with open(path, "rb") as handle:
        return marketio.parse_claim(handle.read(), m)


def _option_index(m: MarketModel, name: str) -> int:
    for i, opt in enumerate(m.options):
        if opt.name == name:
            return i
    raise DomainError(f"no option named {name!r}")


def _generator_index(m: MarketModel, name: str) -> int:
    names = m.measures.names or [f"P{k}" for k in range(len(m.measures.generators))]
    for i, gen_name in enumerate(names):
        if gen_name == name:
            return i
    raise DomainError(f"no generator named {name!r}")


def _require(condition: bool, what: str) -> None:
    if not condition:
        raise SoundnessError(f"certificate replay failed: {what}")


def _cmd_check_na(args) -> tuple[int, dict]:
    m = _load_market(args.market)
    verdict = arbitrage.check_na(m)
    if verdict.holds:
        return EXIT_OK, _report("check-na", "holds")
    cert = verdict.certificate
    if args.verify:
        _require(arbitrage.verify_na_certificate(m, cert), "arbitrage certificate")
    return EXIT_FAILS, _report(
        "check-na",
        "fails",
        certificates={"arbitrage": marketio.na_certificate_to_json(m, cert)},
        diagnostics={"strictLeaf": cert.strict_leaf},
    )


def _cmd_check_nar(args) -> tuple[int, dict]:
    m = _load_market(args.market)
    verdict = arbitrage.check_nar(m)
    if not verdict.holds:
        return EXIT_FAILS, _report(
            "check-nar", "fails", diagnostics={"blocking": verdict.blocking}
        )
    witness = verdict.witness
    if args.verify:
        _require(arbitrage.verify_nar_witness(m, witness), "robustness witness")
    return EXIT_OK, _report(
        "check-nar",
        "holds",
        values={"slack": marketio.format_rational(witness.slack)},
        certificates={"witness": marketio.witness_to_json(m, witness)},
    )


def _cmd_superhedge(args) -> tuple[int, dict]:
    m = _load_market(args.market)
    f = _load_claim(args.claim, m)
    price, strategy = superhedge.superhedge_price(m, f)
    if args.verify:
        _require(
            superhedge.verify_super_replication(m, f, price, strategy),
            "super-replication",
        )
    return EXIT_OK, _report(
        "superhedge",
        "priced",
        values={"price": marketio.format_rational(price)},
        certificates={"strategy": marketio.strategy_to_json(m, strategy)},
    )


def _cmd_dual(args) -> tuple[int, dict]:
    m = _load_market(args.market)
    f = _load_claim(args.claim, m)
    value, measure = superhedge.dual_price(m, f)
    if args.verify:
        _require(arbitrage.verify_measure(m, measure), "dual measure")
    return EXIT_OK, _report(
        "dual",
        "priced",
        values={"value": marketio.format_rational(value)},
        certificates={"measure": marketio.measure_to_json(measure)},
    )


def _cmd_bounds(args) -> tuple[int, dict]:
    m = _load_market(args.market)
    i = _option_index(m, args.option)
    lower, upper = superhedge.price_bounds_excluding(m, i)
    return EXIT_OK, _report(
        "bounds",
        "computed",
        values={
            "lower": marketio.format_rational(lower),
            "upper": marketio.format_rational(upper),
        },
        diagnostics={"option": args.option},
    )


def _cmd_redundancy(args) -> tuple[int, dict]:
    m = _load_market(args.market)
    report = redundancy.all_spread_options_nonredundant(m)
    verdicts = []
    certificates = {}
    for i in sorted(report.verdicts):
        verdict = report.verdicts[i]
        name = m.options[i].name
        verdicts.append(
            {"option": name, "verdict": "nonRedundant" if verdict.non_redundant else "redundant"}
        )
        if not verdict.non_redundant:
            if args.verify:
                _require(
                    redundancy.verify_replication(m, i, verdict.certificate),
                    f"replication of {name}",
                )
            certificates[name] = marketio.replication_to_json(m, i, verdict.certificate)
    if report.all_non_redundant:
        return EXIT_OK, _report(
            "redundancy", "holds", diagnostics={"spreadOptions": verdicts}
        )
    return EXIT_FAILS, _report(
        "redundancy",
        "fails",
        certificates={"replications": certificates},
        diagnostics={"spreadOptions": verdicts},
    )


def _cmd_sharper_ftap(args) -> tuple[int, dict]:
    m = _load_market(args.market)
    bundle = redundancy.sharper_ftap(m)
    if not bundle.na.holds:
        cert = bundle.na.certificate
        if args.verify:
            _require(arbitrage.verify_na_certificate(m, cert), "arbitrage certificate")
        return EXIT_FAILS, _report(
            "sharper-ftap",
            "fails",
            certificates={"arbitrage": marketio.na_certificate_to_json(m, cert)},
            diagnostics={"strictLeaf": cert.strict_leaf},
        )
    if args.verify:
        _require(arbitrage.verify_nar_witness(m, bundle.nar_witness), "robustness witness")
        for q in bundle.dominating:
            _require(arbitrage.verify_measure(m, q), "dominating measure")
            _require(arbitrage.strictly_inside_quotes(m, q), "strict interiority")
    names = m.measures.names or [f"P{k}" for k in range(len(m.measures.generators))]
    return EXIT_OK, _report(
        "sharper-ftap",
        "holds",
        values={"slack": marketio.format_rational(bundle.nar_witness.slack)},
        certificates={
            "witness": marketio.witness_to_json(m, bundle.nar_witness),
            "dominating": {
                names[k]: marketio.measure_to_json(q)
                for k, q in enumerate(bundle.dominating)
            },
        },
    )


def _cmd_dominate(args) -> tuple[int, dict]:
    m = _load_market(args.market)
    k = _generator_index(m, args.generator)
    measure = arbitrage.dominating_measure(m, k)
    if args.verify:
        _require(arbitrage.verify_measure(m, measure), "dominating measure")
        _require(arbitrage.strictly_inside_quotes(m, measure), "strict interiority")
        generator = m.measures.generators[k]
        _require(
            all(measure.weights[p] > 0 for p, w in enumerate(generator) if w > 0),
            "domination",
        )
    return EXIT_OK, _report(
        "dominate",
        "computed",
        values={"generator": args.generator},
        certificates={"measure": marketio.measure_to_json(measure)},
    )


def _cmd_strict_dual(args) -> tuple[int, dict]:
    m = _load_market(args.market)
    f = _load_claim(args.claim, m)
    eps = marketio.parse_rational_text(args.eps)
    measure = superhedge.strict_dual_approx(m, f, eps)
    achieved = measure.expectation(f.payoff)
    if args.verify:
        _require(arbitrage.verify_measure(m, measure), "approximate dual measure")
        _require(arbitrage.strictly_inside_quotes(m, measure), "strict interiority")
        value, _ = superhedge.dual_price(m, f)
        _require(achieved >= value - eps, "epsilon optimality")
    return EXIT_OK, _report(
        "strict-dual",
        "computed",
        values={
            "value": marketio.format_rational(achieved),
            "eps": marketio.format_rational(eps),
        },
        certificates={"measure": marketio.measure_to_json(measure)},
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hedgecert",
        description="Exact arbitrage verdicts and super-hedging prices for "
        "finite markets with bid-ask quoted hedging options.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, help_text, *, claim=False, option=False, generator=False, eps=False):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("market", help="market JSON file")
        if claim:
            cmd.add_argument("--claim", required=True, help="claim JSON file")
        if option:
            cmd.add_argument("--option", required=True, help="option name")
        if generator:
            cmd.add_argument("--generator", required=True, help="generator name")
        if eps:
            cmd.add_argument("--eps", required=True, help="positive rational, e.g. 1/100")
        cmd.add_argument("--pretty", action="store_true", help="indented output")
        cmd.add_argument(
            "--verify", action="store_true", help="replay all certificates before printing"
        )
        cmd.set_defaults(handler=handler)

    add("check-na", _cmd_check_na, "decide no-arbitrage")
    add("check-nar", _cmd_check_nar, "decide robust no-arbitrage")
    add("superhedge", _cmd_superhedge, "super-hedging price of a claim", claim=True)
    add("dual", _cmd_dual, "dual price over consistent measures", claim=True)
    add("bounds", _cmd_bounds, "price interval for an option from the rest", option=True)
    add("redundancy", _cmd_redundancy, "non-redundancy of spread options")
    add("sharper-ftap", _cmd_sharper_ftap, "no-arbitrage verdict with full dual package")
    add("dominate", _cmd_dominate, "consistent measure dominating a generator", generator=True)
    add("strict-dual", _cmd_strict_dual, "strictly interior near-optimal dual measure",
        claim=True, eps=True)
    return parser


def _emit_error(kind: str, exc: Exception) -> None:
    payload = {"error": {"type": kind, "message": str(exc)}}
    print(json.dumps(payload, separators=(",", ":")), file=sys.stderr)


def _print_report(report: dict, pretty: bool) -> None:
    if pretty:
        text = json.dumps(report, indent=2)
        if sys.stdout.isatty() and not os.environ.get("NO_COLOR"):
            verdict = report.get("verdict", "")
            color = _GREEN if verdict in ("holds", "priced", "computed") else _RED
            text = text.replace(
                f'"verdict": "{verdict}"', f'"verdict": "{color}{verdict}{_RESET}"', 1
            )
        print(text)
    else:
        print(json.dumps(report, separators=(",", ":")))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    pretty = getattr(args, "pretty", False)
    command = args.command
    try:
        code, report = args.handler(args)
    except StructureError as exc:
        _emit_error("invalid-input", exc)
        return EXIT_INVALID
    except DomainError as exc:
        _emit_error("invalid-input", exc)
        return EXIT_INVALID
    except (OSError, FileNotFoundError) as exc:
        _emit_error("io-error", exc)
        return EXIT_INVALID
    except PreconditionError as exc:
        _emit_error("precondition", exc)
        _print_report(
            _report(command, "precondition-failed", diagnostics={"reason": str(exc)}),
            pretty,
        )
        return EXIT_FAILS
    except SoundnessError as exc:
        _emit_error("soundness", exc)
        return EXIT_UNSOUND
    except ArbitrageError as exc:
        _emit_error("arbitrage", exc)
        _print_report(
            _report(command, "fails", diagnostics={"blocking": exc.blocking}), pretty
        )
        return EXIT_FAILS
    _print_report(report, pretty)
    return code


if __name__ == "__main__":
    sys.exit(main())
