"""``pga-infer``: exact posterior queries for programs on the command line.

Exit codes: 0 success, 1 bad input (I/O, syntax, semantic or query errors),
2 all mass rejected by observations, 3 divergent automaton, 4 oracle-check
violation.
"""

from __future__ import annotations

import argparse
import re
import sys
from fractions import Fraction

from .analysis import coefficient, expectation, marginal_table, normalize, total_mass
from .errors import DivergentAutomaton, ProgramSyntaxError, SemanticError, ZeroMassError
from .lang import parse
from .oracle import cross_check
from .report import QueryResult, approx, csv_table, dot_export, frac, json_report
from .semantics import TransformerConfig, infer

EXIT_OK, EXIT_INPUT, EXIT_REJECTED, EXIT_DIVERGENT, EXIT_ORACLE = 0, 1, 2, 3, 4

_POINT_RE = re.compile(r"^\s*P\s*\((.*)\)\s*$")
_BINDING_RE = re.compile(r"^\s*([A-Za-z][A-Za-z0-9_]*)\s*=\s*([0-9]+)\s*$")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # argparse's default exit status 2 would collide with the rejection code
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pga-infer", description="Exact Bayesian inference with probability generating automata.")
    p.add_argument("file", help="program file (.pp)")
    p.add_argument("--query", action="append", default=[], metavar="Q",
                   help='point query such as "P(X=3)" or "P(X=3, Y=1)"')
    p.add_argument("--marginal", action="append", default=[], metavar="VAR",
                   help="tabulate the marginal of VAR")
    p.add_argument("--max-degree", action="append", default=[], type=int, metavar="N",
                   help="degree bound for the matching --marginal (one value applies to all)")
    p.add_argument("--expect", action="append", default=[], metavar="VAR", help="expected value of VAR")
    p.add_argument("--unnormalized", action="store_true", help="report the unnormalized posterior")
    p.add_argument("--minimize", action="store_true", help="apply bisimulation minimization after every statement")
    p.add_argument("--dot", metavar="PATH", help="write the posterior PGA as a Graphviz file")
    p.add_argument("--json", action="store_true", help="emit a JSON report")
    p.add_argument("--csv", action="store_true", help="print marginal tables as CSV")
    p.add_argument("--oracle-check", action="store_true", help="cross-check against path enumeration")
    p.add_argument("--epsilon", default="1/1000000000", metavar="p/q",
                   help="truncation budget for --oracle-check (default 1/1000000000)")
    return p


def parse_point_query(q: str) -> dict[str, int]:
    m = _POINT_RE.match(q)
    if not m:
        raise UsageError(f"cannot parse query {q!r}; expected P(VAR=N, ...)")
    valuation = {}
    for part in m.group(1).split(","):
        b = _BINDING_RE.match(part)
        if not b:
            raise UsageError(f"cannot parse binding {part.strip()!r} in query {q!r}")
        if b.group(1) in valuation:
            raise UsageError(f"variable {b.group(1)} bound twice in query {q!r}")
        valuation[b.group(1)] = int(b.group(2))
    return valuation


def _marginal_requests(args) -> list[tuple[str, int]]:
    degrees = args.max_degree
    if not args.marginal:
        if degrees:
            raise UsageError("--max-degree given without --marginal")
        return []
    if not degrees:
        raise UsageError("--marginal needs --max-degree")
    if len(degrees) == 1:
        degrees = degrees * len(args.marginal)
    if len(degrees) != len(args.marginal):
        raise UsageError("give one --max-degree per --marginal, or a single one for all")
    if any(d < 0 for d in degrees):
        raise UsageError("--max-degree must be nonnegative")
    return list(zip(args.marginal, degrees))


def _parse_epsilon(text: str) -> Fraction:
    try:
        eps = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad --epsilon {text!r}") from None
    if eps <= 0:
        raise UsageError("--epsilon must be positive")
    return eps


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:  # --help or a usage error; report the status instead of exiting
        return e.code if isinstance(e.code, int) else EXIT_INPUT
    try:
        points = [(q, parse_point_query(q)) for q in args.query]
        marginals = _marginal_requests(args)
        eps = _parse_epsilon(args.epsilon) if args.oracle_check else None
    except UsageError as e:
        print(f"pga-infer: {e}", file=err)
        return EXIT_INPUT

    try:
        with open(args.file, encoding="utf-8") as fh:
            source = fh.read()
    except OSError as e:
        print(f"pga-infer: cannot read {args.file}: {e.strerror}", file=err)
        return EXIT_INPUT

    try:
        program = parse(source)
    except (ProgramSyntaxError, SemanticError) as e:
        print(f"{args.file}:{e}", file=err)
        return EXIT_INPUT

    cfg = TransformerConfig(auto_trim=True, minimize=args.minimize)
    try:
        unnormalized = infer(program, cfg)
        mass = total_mass(unnormalized)
        pga = unnormalized if args.unnormalized else normalize(unnormalized)

        results = []
        for text, valuation in points:
            canon = "P(" + ", ".join(f"{v}={n}" for v, n in valuation.items()) + ")"
            results.append(QueryResult("point", canon, coefficient(pga, valuation)))
        for var, degree in marginals:
            table = marginal_table(pga, [var], degree)
            results.append(QueryResult("marginal", var, table, table.residual))
        for var in args.expect:
            results.append(QueryResult("expectation", var, expectation(pga, var)))

        oracle = None
        if args.oracle_check:
            report = cross_check(unnormalized, program, eps)
            oracle = {
                "epsilon": frac(eps),
                "checked": report.checked,
                "violations": [str(v) for v in report.violations],
            }
    except ZeroMassError as e:
        print(f"pga-infer: {e}", file=err)
        return EXIT_REJECTED
    except DivergentAutomaton as e:
        print(f"pga-infer: divergent automaton: {e}", file=err)
        return EXIT_DIVERGENT

    if args.dot:
        try:
            with open(args.dot, "w", encoding="utf-8") as fh:
                fh.write(dot_export(pga))
        except OSError as e:
            print(f"pga-infer: cannot write {args.dot}: {e.strerror}", file=err)
            return EXIT_INPUT

    if args.json:
        out.write(json_report(args.file, not args.unnormalized, mass, results, oracle))
    else:
        _print_human(out, args, mass, results, oracle)

    if oracle is not None and oracle["violations"]:
        for v in oracle["violations"]:
            print(f"pga-infer: oracle mismatch: {v}", file=err)
        return EXIT_ORACLE
    return EXIT_OK


def _print_human(out, args, mass, results, oracle):
    kind = "unnormalized" if args.unnormalized else "normalized"
    print(f"posterior: {kind}; evidence mass {frac(mass)} (approx. {approx(mass)})", file=out)
    for r in results:
        if r.kind == "point":
            print(f"{r.target} = {frac(r.value)}  (approx. {approx(r.value)})", file=out)
        elif r.kind == "expectation":
            print(f"E[{r.target}] = {frac(r.value)}  (approx. {approx(r.value)})", file=out)
        elif args.csv:
            out.write(csv_table(r.value))
        else:
            print(f"marginal of {r.target}:", file=out)
            for key, p in sorted(r.value.entries.items()):
                print(f"  {r.target}={key[0]}: {frac(p)}  (approx. {approx(p)})", file=out)
            print(f"  residual: {frac(r.residual)}", file=out)
    if oracle is not None:
        status = "ok" if not oracle["violations"] else f"{len(oracle['violations'])} violation(s)"
        print(f"oracle check (epsilon {oracle['epsilon']}): {status}, {oracle['checked']} checks", file=out)


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
