import argparse
import logging
import sys

from . import __version__
from .cheby import chebyshev_map, jacobian_symbolic
from .config import Settings, load_settings
from .errors import (BudgetExceededError, ConsistencyError, ConstraintError,
                     CoordinateOverflowError, GroupTooLargeError)
from .jacchar import expand_to_polynomials, jacobian_characters
from .rootsys import RootSystem, build_root_system, positive_roots
from .util import dump_json, setup_logging
from .verify import DEFAULT_KS, all_passed, run_acceptance, run_suite
from .weyl import WeylGroup, enumerate_group, longest_element, max_abs_entry

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECKS_FAILED = 1
EXIT_CONSTRAINT = 2
EXIT_LIMIT = 3
EXIT_CONSISTENCY = 4

DEFAULT_VERIFY_TYPES = ("A1", "A2", "A3", "B2", "B3", "C3", "G2")


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--max-weyl-order", type=_positive, default=None)
    common.add_argument("--max-pair-budget", type=_positive, default=None)
    common.add_argument("--workers", type=_positive, default=None)
    common.add_argument("-v", "--verbose", action="count", default=0)

    typed = argparse.ArgumentParser(add_help=False)
    typed.add_argument("type", nargs="?", help="Lie type, e.g. G2 or A1xA1")
    typed.add_argument("-t", "--type", dest="type_option", default=None)

    parser = argparse.ArgumentParser(prog="chebylie",
                                     description="Generalized Chebyshev maps and their Jacobians")
    parser.add_argument("--version", action="version", version=f"chebylie {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    commands.add_parser("info", parents=[common, typed], help="Cartan data of a type")
    weyl = commands.add_parser("weyl", parents=[common, typed], help="enumerate the Weyl group")
    weyl.add_argument("--matrices", action="store_true", help="print every T_w")

    cheby = commands.add_parser("chebyshev", parents=[common, typed], help="the map P^k")
    cheby.add_argument("-k", type=_positive, default=1)

    jacobian = commands.add_parser("jacobian", parents=[common, typed], help="the Jacobian of P^k")
    jacobian.add_argument("-k", type=_positive, default=1)
    jacobian.add_argument("--method", choices=("character", "symbolic", "both"), default="character")

    verify = commands.add_parser("verify", parents=[common], help="run the identity suite")
    verify.add_argument("types", nargs="*", help="types to check; the acceptance grid when omitted")
    verify.add_argument("-t", "--type", dest="type_option", action="append", default=None)
    verify.add_argument("-k", type=_positive, nargs="+", default=None)
    verify.add_argument("--timings", action="store_true", help="add the seconds column")
    return parser


def _resolve_type(args: argparse.Namespace) -> RootSystem:
    text = args.type_option or args.type
    if not text:
        raise ConstraintError("a Lie type is required (positional or --type)")
    return build_root_system(text)


def _settings(args: argparse.Namespace) -> Settings:
    return load_settings(workers=args.workers, max_weyl_order=args.max_weyl_order,
                         max_pair_budget=args.max_pair_budget)


def _matrix_text(matrix, label: str) -> list[str]:
    return [f"{label}[{i + 1},{j + 1}] = {entry}"
            for i, row in enumerate(matrix) for j, entry in enumerate(row)]


def _matrix_json(matrix) -> list[list]:
    return [[entry.to_json() for entry in row] for row in matrix]


def cmd_info(args, settings: Settings) -> tuple[dict, list[str], int]:
    rs = _resolve_type(args)
    payload = {"type": rs.name, "rank": rs.rank, "cartan": rs.cartan.tolist(),
               "degrees": list(rs.degrees), "weyl_order": rs.weyl_order, "m_g": rs.m_g,
               "positive_roots": len(positive_roots(rs))}
    lines = [f"type: {rs.name}", "cartan:"]
    lines += [f"  {row}" for row in rs.cartan.tolist()]
    lines += [f"degrees: {list(rs.degrees)}", f"|W|: {rs.weyl_order}", f"m_g: {rs.m_g}",
              f"positive roots: {payload['positive_roots']}"]
    return payload, lines, EXIT_OK


def _group(args, settings: Settings) -> WeylGroup:
    return enumerate_group(_resolve_type(args), settings.max_weyl_order)


def cmd_weyl(args, settings: Settings) -> tuple[dict, list[str], int]:
    grp = _group(args, settings)
    longest = longest_element(grp)
    payload = {"type": grp.root_system.name, "order": grp.order,
               "max_abs_entry": max_abs_entry(grp), "longest_length": longest.length}
    lines = [f"type: {grp.root_system.name}", f"|W|: {grp.order}",
             f"max |T_w| entry: {payload['max_abs_entry']}",
             f"longest element length: {longest.length}"]
    if args.matrices:
        payload["elements"] = [{"matrix": w.matrix.tolist(), "det": w.det_sign, "length": w.length}
                               for w in grp]
        lines += [f"{w.matrix.tolist()} det={w.det_sign} length={w.length}" for w in grp]
    return payload, lines, EXIT_OK


def cmd_chebyshev(args, settings: Settings) -> tuple[dict, list[str], int]:
    cheb = chebyshev_map(_group(args, settings), args.k)
    lines = [f"P^{cheb.k} for {cheb.type_name}:"]
    lines += [f"g{i + 1} = {g}" for i, g in enumerate(cheb.components)]
    return cheb.to_json(), lines, EXIT_OK


def cmd_jacobian(args, settings: Settings) -> tuple[dict, list[str], int]:
    grp = _group(args, settings)
    payload = {"type": grp.root_system.name, "k": args.k, "method": args.method}
    lines = [f"J(P^{args.k}) for {grp.root_system.name}:"]
    status = EXIT_OK
    characters = symbolic = None
    if args.method in ("character", "both"):
        characters = jacobian_characters(grp, args.k, budget=settings.max_pair_budget,
                                         workers=settings.workers)
        payload["characters"] = _matrix_json(characters)
        lines += _matrix_text(characters, "J")
    if args.method in ("symbolic", "both"):
        symbolic = jacobian_symbolic(grp, args.k)
        payload["polynomials"] = _matrix_json(symbolic)
        lines += _matrix_text(symbolic, "dg/dy")
    if args.method == "both":
        agreement = expand_to_polynomials(grp, characters) == symbolic
        payload["agreement"] = agreement
        lines.append(f"agreement: {str(agreement).lower()}")
        if not agreement:
            status = EXIT_CHECKS_FAILED
    return payload, lines, status


def cmd_verify(args, settings: Settings) -> tuple[dict, list[str], int]:
    types = args.type_option or args.types
    if types or args.k:
        types = types or list(DEFAULT_VERIFY_TYPES)
        ks = args.k or list(DEFAULT_KS)
        report = run_suite(types, ks, settings)
    else:
        ks = None
        report = run_acceptance(settings)
    if not args.timings:
        # Wall-clock times would make reports differ between runs
        report = report.drop(columns=["seconds"])
    passed = all_passed(report)
    payload = {"types": list(types) if ks else "acceptance", "ks": ks, "passed": passed,
               "checks": report.to_dict(orient="records")}
    lines = [report.to_string(index=False),
             f"{int(report['passed'].sum())}/{len(report)} checks passed"]
    return payload, lines, EXIT_OK if passed else EXIT_CHECKS_FAILED


COMMANDS = {"info": cmd_info, "weyl": cmd_weyl, "chebyshev": cmd_chebyshev,
            "jacobian": cmd_jacobian, "verify": cmd_verify}


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose)
    try:
        settings = _settings(args)
        payload, lines, status = COMMANDS[args.command](args, settings)
    except (ConstraintError, CoordinateOverflowError) as e:
        print(f"chebylie: error: {e}", file=sys.stderr)
        return EXIT_CONSTRAINT
    except (GroupTooLargeError, BudgetExceededError) as e:
        print(f"chebylie: {e}", file=sys.stderr)
        return EXIT_LIMIT
    except ConsistencyError as e:
        logger.debug("consistency failure", exc_info=True)
        print(f"chebylie: internal consistency error: {e}", file=sys.stderr)
        return EXIT_CONSISTENCY

    if args.format == "json":
        print(dump_json({"tool": "chebylie", "version": __version__, "command": args.command,
                         **payload}))
    else:
        print("\n".join(lines))
    return status


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
