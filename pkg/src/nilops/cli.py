"""Command-line front end: ``nilops <subcommand> [--format text|json]``.

Exit status is 0 on success, 1 on usage errors, 2 on computation errors
(parse, validation, budget) and 3 when the law suite has an unexpected
refutation or an error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from . import laws
from .modules import FiniteUnstableAlgebra, ModuleElement, ModuleValidationError, TruncationError, act
from .nilfilt import DEFAULT_C_MAX, ConsistencyError, UndeterminedError, filtration
from .parser import ParseError, SchemaError, load_module, parse_element, parse_op
from .steenrod import AdmissibleSum, adem_normalize, conjugate, full_basis, ideal_membership, multiply, subalgebra_basis
from .tor import TorConsistencyError, bar_tor

EXIT_USAGE = 1
EXIT_COMPUTATION = 2
EXIT_REFUTED = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _expr(text: str) -> AdmissibleSum:
    return adem_normalize(parse_op(text))


def _load(path: str):
    try:
        data = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return load_module(data)


def cmd_normalize(a) -> tuple[str, int]:
    raw = parse_op(a.expr)
    out = adem_normalize(raw)
    if a.format == "json":
        return _dump({"input": a.expr, "normal_form": str(out), "terms": [list(t) for t in out.terms]}), 0
    return f"{out}\n", 0


def cmd_conjugate(a) -> tuple[str, int]:
    out = conjugate(_expr(a.expr))
    if a.format == "json":
        return _dump({"input": a.expr, "conjugate": str(out), "terms": [list(t) for t in out.terms]}), 0
    return f"{out}\n", 0


def cmd_multiply(a) -> tuple[str, int]:
    out = multiply(_expr(a.left), _expr(a.right))
    if a.format == "json":
        return _dump({"left": a.left, "right": a.right, "product": str(out), "terms": [list(t) for t in out.terms]}), 0
    return f"{out}\n", 0


def cmd_basis(a) -> tuple[str, int]:
    if a.degree < 0:
        raise UsageError("--degree must be non-negative")
    if a.subalgebra is None:
        elems = [str(AdmissibleSum([m])) if m else "1" for m in full_basis(a.degree)]
        scope = "A"
    else:
        if a.subalgebra < 0:
            raise UsageError("--subalgebra must be non-negative")
        elems = [str(x) for x in subalgebra_basis(a.subalgebra, a.degree).basis[a.degree]]
        scope = f"A({a.subalgebra})"
    if a.format == "json":
        return _dump({"algebra": scope, "degree": a.degree, "dim": len(elems), "basis": elems}), 0
    lines = [f"# basis of {scope} in degree {a.degree}: dim {len(elems)}"] + elems
    return "\n".join(lines) + "\n", 0


def _element_label(m, x: ModuleElement) -> str:
    parts = [m.label(d, j) for d, v in x.components for j in _bits(v)]
    return " + ".join(parts) if parts else "0"


def _bits(v: int):
    j = 0
    while v:
        if v & 1:
            yield j
        v >>= 1
        j += 1


def cmd_act(a) -> tuple[str, int]:
    obj = _load(a.module)
    m = obj.module if isinstance(obj, FiniteUnstableAlgebra) else obj
    spec = parse_element(a.element)
    for d, v in spec.items():
        if d > m.top_degree or v >> m.dim(d):
            raise UsageError(f"element {a.element!r} is not in {m.name}")
    x = ModuleElement.from_components(m, spec)
    op = _expr(a.op)
    y = act(m, op, x)
    comps = {str(d): [j for j in _bits(v)] for d, v in y.components}
    if a.format == "json":
        return _dump({"module": m.name, "op": str(op), "element": a.element, "result": comps,
                      "label": _element_label(m, y)}), 0
    return f"{_element_label(m, y)}\n", 0


def cmd_filtration(a) -> tuple[str, int]:
    obj = _load(a.module)
    m = obj.module if isinstance(obj, FiniteUnstableAlgebra) else obj
    if a.smax < 0 or a.dmax < 0 or a.cmax < 0:
        raise UsageError("--smax, --dmax and --cmax must be non-negative")
    table = filtration(m, a.smax, a.dmax, a.cmax)
    return (table.to_json() + "\n", 0) if a.format == "json" else (table.to_text(), 0)


def cmd_tor(a) -> tuple[str, int]:
    obj = _load(a.algebra)
    if not isinstance(obj, FiniteUnstableAlgebra):
        raise UsageError(f"{a.algebra} describes a module, not an algebra (no products field)")
    if a.smax < 0 or a.tmax < 0:
        raise UsageError("--smax and --tmax must be non-negative")
    page = bar_tor(obj, a.smax, a.tmax)
    return (page.to_json() + "\n", 0) if a.format == "json" else (page.to_text(), 0)


def cmd_membership(a) -> tuple[str, int]:
    if a.n < 1:
        raise UsageError("--n must be at least 1")
    target = _expr(a.target)
    w = ideal_membership(target, a.n)
    pairs = None if w is None else [[str(x), str(y)] for x, y in w]
    if a.format == "json":
        return _dump({"n": a.n, "target": str(target), "member": w is not None, "witness": pairs}), 0
    if w is None:
        return f"{target} is not in Abar({a.n - 1}) Sq{1 << a.n} Abar({a.n - 1})\n", 0
    return "\n".join(f"({x}, {y})" for x, y in pairs) + "\n", 0


def cmd_laws(a) -> tuple[str, int]:
    only = a.only or None
    try:
        reports = laws.run_suite(only, seed=a.seed)
    except laws.UnknownLawError as exc:
        raise UsageError(f"unknown law {exc.args[0]!r}; known: {', '.join(laws.law_ids())}") from None
    out = laws.suite_json(reports, a.seed) + "\n" if a.format == "json" else laws.suite_text(reports, a.seed)
    return out, EXIT_REFUTED if any(r.failed for r in reports) else 0


def build_parser() -> argparse.ArgumentParser:
    fmt = _Parser(add_help=False)
    fmt.add_argument("--format", choices=("text", "json"), default="text")
    p = _Parser(prog="nilops", description="Steenrod algebra, nilpotent filtration and Tor computations over F_2.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("normalize", parents=[fmt], help="Adem normal form of an expression")
    s.add_argument("expr")
    s.set_defaults(run=cmd_normalize)
    s = sub.add_parser("conjugate", parents=[fmt], help="apply the conjugation chi")
    s.add_argument("expr")
    s.set_defaults(run=cmd_conjugate)
    s = sub.add_parser("multiply", parents=[fmt], help="product of two expressions")
    s.add_argument("left")
    s.add_argument("right")
    s.set_defaults(run=cmd_multiply)
    s = sub.add_parser("basis", parents=[fmt], help="admissible basis of A or A(n) in one degree")
    s.add_argument("--degree", type=int, required=True)
    s.add_argument("--subalgebra", type=int, metavar="N")
    s.set_defaults(run=cmd_basis)
    s = sub.add_parser("act", parents=[fmt], help="act on an element of a module file")
    s.add_argument("--module", required=True, metavar="FILE")
    s.add_argument("--op", required=True, metavar="EXPR")
    s.add_argument("--element", required=True, metavar="SPEC", help="e.g. '1:0 + 2:0,1'")
    s.set_defaults(run=cmd_act)
    s = sub.add_parser("filtration", parents=[fmt], help="nilpotent filtration table of a module file")
    s.add_argument("--module", required=True, metavar="FILE")
    s.add_argument("--smax", type=int, required=True)
    s.add_argument("--dmax", type=int, required=True)
    s.add_argument("--cmax", type=int, default=DEFAULT_C_MAX)
    s.set_defaults(run=cmd_filtration)
    s = sub.add_parser("tor", parents=[fmt], help="bar-complex Tor of an algebra file")
    s.add_argument("--algebra", required=True, metavar="FILE")
    s.add_argument("--smax", type=int, required=True)
    s.add_argument("--tmax", type=int, required=True)
    s.set_defaults(run=cmd_tor)
    s = sub.add_parser("membership", parents=[fmt], help="decide membership in Abar(n-1) Sq^(2^n) Abar(n-1)")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--target", required=True, metavar="EXPR")
    s.set_defaults(run=cmd_membership)
    s = sub.add_parser("laws", parents=[fmt], help="run the law suite")
    s.add_argument("--only", action="append", metavar="ID")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(run=cmd_laws)
    return p


_COMPUTATION_ERRORS = (
    ParseError,
    SchemaError,
    ModuleValidationError,
    TruncationError,
    UndeterminedError,
    ConsistencyError,
    TorConsistencyError,
    ValueError,
)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        out, code = args.run(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except _COMPUTATION_ERRORS as exc:
        print(f"nilops: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTATION
    sys.stdout.write(out)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
