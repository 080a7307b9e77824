"""koszulkit command line.

Exit codes: 0 when the property holds (or every cell passes), 1 when it fails,
2 on usage/input errors and undetermined confluence searches.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from importlib import resources
from pathlib import Path

from . import koszul, presentation
from .operators import Endomorphism, UndeterminedError
from .presentation import Presentation, PreconditionError, PresentationError
from .words import Alphabet, ParseError, parse_expression

FIXTURES = ("yang_mills", "symmetric_d3", "truncated_x3", "xyx")


class InputError(Exception):
    pass


def default_kmax() -> int:
    raw = os.environ.get("KOSZULKIT_KMAX", "64")
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"KOSZULKIT_KMAX must be an integer, got {raw!r}") from None


def _read(path: str) -> tuple[str, str]:
    p = Path(path)
    if p.exists():
        return p.read_text(encoding="utf-8"), str(p)
    name = p.stem if p.suffix == ".json" else path
    if name in FIXTURES:
        ref = resources.files("koszulkit") / "fixtures" / f"{name}.json"
        return ref.read_text(encoding="utf-8"), f"<fixture {name}>"
    raise InputError(f"{path}: no such file")


def load_file(path: str) -> Presentation:
    text, label = _read(path)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{label}:{e.lineno}:{e.colno}: {e.msg}") from None
    if not isinstance(data, dict):
        raise InputError(f"{label}: expected a JSON object")
    if data.get("field", "rational") != "rational":
        raise InputError(f"{label}: only the rational field is supported")
    for key in ("generators", "N"):
        if key not in data:
            raise InputError(f"{label}: missing {key!r}")
    try:
        alphabet = Alphabet(tuple(data["generators"]))
    except (TypeError, ValueError) as e:
        raise InputError(f"{label}: {e}") from None
    N = data["N"]
    if not isinstance(N, int) or N < 2:
        raise InputError(f"{label}: N must be an integer >= 2")
    rels = []
    for k, expr in enumerate(data.get("relations", []), 1):
        try:
            rels.append(parse_expression(expr, alphabet))
        except ParseError as e:
            raise InputError(f"{label}: relation {k}, column {e.column}: {e.message}") from None
    try:
        return presentation.load_and_interreduce(alphabet, N, rels)
    except PresentationError as e:
        raise InputError(f"{label}: {e}") from None


def cmd_check(args) -> int:
    P = load_file(args.file)
    report = P.side_confluence(args.k_max)
    report.extra_condition = P.extra_condition()
    branchings = presentation.critical_branchings(P)
    if args.json:
        out = {
            "side_confluent": report.side_confluent,
            "witnesses": {str(d): {"k": w.k, "confluent": w.confluent} for d, w in report.witnesses.items()},
            "extra_condition": report.extra_condition,
            "critical_branchings": [_branching(P, c) for c in branchings],
        }
        print(json.dumps(out, indent=2, sort_keys=True))
    else:
        print(report.summary())
        for c in branchings:
            print("  branching", _format_branching(P, c))
    return 0 if report.side_confluent and report.extra_condition else 1


def _branching(P: Presentation, c) -> dict:
    return {
        "w1": P.format(c.w1),
        "w2": P.format(c.w2),
        "w3": P.format(c.w3),
        "f": P.format(P.relations[c.f]),
        "g": P.format(P.relations[c.g]),
        "source": P.format(c.source),
    }


def _format_branching(P: Presentation, c) -> str:
    b = _branching(P, c)
    return f"({b['w1']}, {b['w2']}, {b['w3']}, f={b['f']}, g={b['g']})  source {b['source']}"


def cmd_nf(args) -> int:
    P = load_file(args.file)
    try:
        f = parse_expression(args.expr, P.alphabet)
    except ParseError as e:
        raise InputError(f"expression, column {e.column}: {e.message}") from None
    print(P.format(presentation.normal_form(P, f)))
    return 0


def cmd_jn(args) -> int:
    P = load_file(args.file)
    dims = []
    for n in range(args.max_n + 1):
        J = koszul.j_space(P, n)
        dims.append(J.dim)
        if args.verbose:
            basis = ", ".join(P.format(b) if b.degree else "1" for b in J.basis)
            print(f"J_{n} (degree {J.degree}): {basis or '0'}")
    print(dims)
    return 0


def cmd_verify(args) -> int:
    P = load_file(args.file)
    report = koszul.verify_homotopy(P, args.max_n, args.max_degree, jobs=args.jobs, k_max=args.k_max)
    print(report.grid())
    bad = report.first_failure
    if bad is None:
        print(f"all {len(report.cells)} cells pass ({report.seconds:.2f}s)")
    else:
        nfail = sum(not c.passed for c in report.cells)
        print(f"{nfail} of {len(report.cells)} cells FAIL; first at n={bad.n}, m={bad.m}")
        vec = " + ".join(f"{c}*{w}" for c, w in bad.witness["vector"])
        print(f"  witness: {vec}")
    if args.json:
        text = report.dumps()
        if args.json == "-":
            print(text)
        else:
            Path(args.json).write_text(text + "\n", encoding="utf-8")
    return 0 if report.passed else 1


def cmd_branchings(args) -> int:
    P = load_file(args.file)
    for c in presentation.critical_branchings(P):
        print(_format_branching(P, c))
    return 0


def cmd_opdump(args) -> int:
    P = load_file(args.file)
    if args.which == "S":
        op: Endomorphism = P.S
    else:
        C = koszul.KoszulComplex(P, args.k_max)
        if args.n is None or args.m is None:
            raise InputError("--n and --m are required for pair operators")
        if args.m < C.l(args.n):
            raise InputError(f"need m >= l_N(n) = {C.l(args.n)}")
        pair = C.pair(args.n, args.m)
        if args.which in ("F1", "F2"):
            op = getattr(pair, args.which)
        else:
            op = getattr(C.representation(args.n, args.m), args.which)
        print(f"pair ({args.n},{args.m}) confluent with k={pair.witness.k}")
    rows = op.format_rows(P.alphabet)
    for line in rows:
        print(line)
    if not rows:
        print("identity")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="koszulkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("file", help="presentation JSON file (or a shipped fixture name)")
        p.set_defaults(func=func)
        return p

    p = add("check", cmd_check, "side-confluence, extra-condition and critical branchings")
    p.add_argument("--k-max", type=int, default=None)
    p.add_argument("--json", action="store_true")

    p = add("nf", cmd_nf, "normal form of an expression")
    p.add_argument("expr")

    p = add("jn", cmd_jn, "dimensions of J_0..J_max-n")
    p.add_argument("--max-n", type=int, default=5)
    p.add_argument("-v", "--verbose", action="store_true")

    p = add("verify", cmd_verify, "check the left-bound homotopy cell by cell")
    p.add_argument("--max-degree", type=int, default=None)
    p.add_argument("--max-n", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--json", metavar="PATH", default=None, help="write the JSON report ('-' for stdout)")
    p.add_argument("--k-max", type=int, default=None)

    add("branchings", cmd_branchings, "list critical branchings")

    p = add("opdump", cmd_opdump, "print the nontrivial rows of an operator")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--which", choices=["S", "F1", "F2", "sigma", "gamma1", "gamma2", "lam"], default="gamma1")
    p.add_argument("--k-max", type=int, default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "k_max", 0) is None:
            args.k_max = default_kmax()
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except UndeterminedError as e:
        print(f"error: {e} (try --k-max or KOSZULKIT_KMAX)", file=sys.stderr)
        return 2
    except PreconditionError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
