"""Command-line front end: constructions, verifiers, filters, sweeps.

Exit codes: 0 success, 1 domain error (a named precondition failed),
2 internal consistency failure, 64 usage error.  Output is JSON with stable
key order and no timestamps (unless --timestamps), so repeated runs are
byte-identical.  Integers beyond 53-bit magnitude are emitted as decimal
strings for portability.
"""

from __future__ import annotations

import argparse
import datetime
import json
import sys

from .errors import ConsistencyError, DomainError
from .exact_lattice import (
    IntLattice,
    format_class,
    gram_of,
    orthogonal_complement,
    pair,
    square,
)
from .geography import (
    EXPLICIT_FILTER_LIMIT,
    construct_Xp,
    construct_Xp_prime,
    construct_Xpk,
    construct_Xpk_prime,
    construct_Z,
    construction1_recipe,
    execute_recipe,
    geography_recipe,
    geography_sweep,
)
from .manifold_ledger import ManifoldLedger
from .rational_surfaces import build_E, horizontal_fiber_class
from .surgery_calculus import verify_prop_P, verify_prop_Pprime
from .sw_bookkeeping import (
    basic_classes_E,
    blowup_formula,
    config_in_E_blowup,
    taut_filter,
    taut_filter_counts,
)

__all__ = ["main"]

SCHEMA_VERSION = "1"
_BIG = 2**53


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(64, f"{self.prog}: error: {message}\n")


def _jsonify(value):
    """Make a document JSON-safe; huge integers become decimal strings."""
    if isinstance(value, bool) or value is None or isinstance(value, (str, float)):
        return value
    if isinstance(value, int):
        return str(value) if abs(value) > _BIG else value
    if isinstance(value, dict):
        return {k: _jsonify(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonify(v) for v in value]
    raise TypeError(f"cannot serialize {type(value)!r}")


def _emit(doc: dict, args) -> None:
    if getattr(args, "timestamps", False):
        doc = dict(doc)
        doc["generated_at"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    text = json.dumps(_jsonify(doc), indent=2) + "\n"
    out = getattr(args, "out", None)
    if out and out != "-":
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _surface_entry(s) -> dict:
    return {
        "label": s.label,
        "genus": s.genus,
        "self_int": s.self_int,
        "symplectic": s.symplectic,
        "kind": s.kind,
        "coeffs": list(s.cls.coeffs) if s.cls is not None else None,
    }


def _check_entries(checks) -> list[dict]:
    return [{"name": c.name, "status": c.status, "detail": c.detail} for c in checks]


def ledger_document(ledger: ManifoldLedger, checks) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "name": ledger.name,
        "e": ledger.e,
        "sign": ledger.sign,
        "b_plus": ledger.b_plus,
        "b_minus": ledger.b_minus,
        "chi_h": ledger.chi_h,
        "c1_sq": ledger.c1sq,
        "simply_connected": ledger.simply_connected,
        "symplectic": ledger.symplectic,
        "surfaces": [_surface_entry(s) for s in ledger.surfaces],
        "provenance": list(ledger.provenance),
        "checks": _check_entries(checks),
    }


def revalidate_ledger_document(doc: dict) -> dict:
    """Re-run the ledger identities on a parsed document (round-trip check)."""
    e, sign = doc["e"], doc["sign"]
    return {
        "euler": e == 2 + doc["b_plus"] + doc["b_minus"],
        "signature": sign == doc["b_plus"] - doc["b_minus"],
        "chi_h": 4 * doc["chi_h"] == e + sign,
        "c1_sq": doc["c1_sq"] == 2 * e + 3 * sign,
    }


# -- construct ---------------------------------------------------------------


def _cmd_construct_xp(args) -> int:
    ledger, report = construct_Xp(args.p)
    _emit(ledger_document(ledger, report.checks), args)
    return 0


def _cmd_construct_xp_prime(args) -> int:
    ledger, report = construct_Xp_prime(args.p)
    _emit(ledger_document(ledger, report.checks), args)
    return 0


def _cmd_construct_xpk(args) -> int:
    build = construct_Xpk_prime if args.odd else construct_Xpk
    ledger, report = build(args.p, args.k)
    _emit(ledger_document(ledger, report.checks), args)
    return 0


def _cmd_construct_z(args) -> int:
    ledger, report = construct_Z(args.x, args.k)
    _emit(ledger_document(ledger, report.checks), args)
    return 0


# -- verify ------------------------------------------------------------------


def _verifier_document(report, command: str, params: dict) -> dict:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        **params,
        "title": report.title,
        "passed": report.passed,
        "checks": _check_entries(report.checks),
    }
    for key, value in report.data:
        if key not in params:
            doc[key] = value
    return doc


def _cmd_verify_prop_p(args) -> int:
    report = verify_prop_P(args.p)
    _emit(_verifier_document(report, "verify prop-p", {"p": args.p}), args)
    return 0 if report.passed else 2


def _cmd_verify_prop_p_prime(args) -> int:
    report = verify_prop_Pprime(args.p)
    _emit(_verifier_document(report, "verify prop-p-prime", {"p": args.p}), args)
    return 0 if report.passed else 2


def _cmd_verify_horizontal_fiber(args) -> int:
    lam = horizontal_fiber_class(args.q)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "verify horizontal-fiber",
        "q": args.q,
        "passed": True,
        "class": format_class(lam),
        "coeffs": list(lam.coeffs),
        "checks": [
            {
                "name": "unique_solution",
                "status": "verified",
                "detail": f"matches Sigma_R({args.q + 1})",
            }
        ],
    }
    _emit(doc, args)
    return 0


def _cmd_verify_e_fibersum(args) -> int:
    ledger = build_E(args.x)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "verify e-fibersum",
        "x": args.x,
        "passed": True,
        "e": ledger.e,
        "sign": ledger.sign,
        "chi_h": ledger.chi_h,
        "c1_sq": ledger.c1sq,
        "checks": [
            {
                "name": "dual_route",
                "status": "verified",
                "detail": f"E({args.x}) direct ledger equals the fiber-sum ledger",
            }
        ],
    }
    _emit(doc, args)
    return 0


# -- basic classes -----------------------------------------------------------


def _class_entries(classes) -> list[dict]:
    out = []
    for cls in classes.classes:
        m, eps = classes.fragment.split_basic_class(cls)
        out.append({"m": m, "eps": list(eps), "label": format_class(cls) or "0"})
    return out


def _cmd_basic_classes(args) -> int:
    x, k = args.x, args.k
    total = (x - 1) * 2**k
    if total > EXPLICIT_FILTER_LIMIT:
        raise DomainError(
            f"(x-1) 2^k = {total} classes exceed the listing limit "
            f"{EXPLICIT_FILTER_LIMIT}; use `sweep` for aggregated verification"
        )
    basic = blowup_formula(basic_classes_E(x), k)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "basic-classes",
        "x": x,
        "k": k,
        "count": len(basic),
        "classes": _class_entries(basic),
    }
    if args.filter:
        config = config_in_E_blowup(x, k)
        surv = taut_filter(basic, config)
        agg_count, max_abs = taut_filter_counts(x, k, config.n)
        doc["filter"] = {
            "n": config.n,
            "max_abs_pairing": max_abs,
            "survivor_count": len(surv),
            "aggregate_count": agg_count,
            "survivors": _class_entries(surv),
            "hypotheses": "verified",
        }
    _emit(doc, args)
    return 0


# -- geography / sweep -------------------------------------------------------


def _recipe_entry(recipe) -> dict:
    return {
        "route": recipe.route,
        "params": {k: v for k, v in recipe.params},
        "start": recipe.steps.start,
        "steps": [
            {"op": s.op, "params": {k: v for k, v in s.params}, "note": s.note}
            for s in recipe.steps.steps
        ],
        "expected": {
            "chi_h": recipe.expected[0],
            "c1_sq": recipe.expected[1],
            "basic_classes_up_to_sign": recipe.expected[2],
        },
    }


def _cmd_geography(args) -> int:
    recipe = geography_recipe(args.x, args.c)
    ledger, report = execute_recipe(recipe)
    alt = construction1_recipe(args.x, args.c)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "geography",
        "x": args.x,
        "c": args.c,
        "recipe": _recipe_entry(recipe),
        "alternate_routes": [_recipe_entry(alt)] if alt else [],
        "verification": {
            "name": ledger.name,
            "chi_h": ledger.chi_h,
            "c1_sq": ledger.c1sq,
            "basic_classes_up_to_sign": report.basic_class_count_up_to_sign,
            "basic_class_status": report.basic_class_status,
            "survivors": list(report.survivors),
            "checks": _check_entries(report.checks),
        },
    }
    _emit(doc, args)
    return 0


_TABLE_HEADER = "x\tc\troute\tk\tchi_h\tc1_sq\tbasic\tstatus\ttheorem_T"


def _table_lines(result) -> list[str]:
    lines = [_TABLE_HEADER]
    for r in result.rows:
        lines.append(
            f"{r.x}\t{r.c}\t{r.route}\t{r.k}\t{r.chi_h}\t{r.c1_sq}"
            f"\t{r.basic_classes_up_to_sign}\t{r.status}\t{int(r.theorem_T)}"
        )
    return lines


def _cmd_sweep(args) -> int:
    result = geography_sweep(args.x_max)
    table = "\n".join(_table_lines(result)) + "\n"
    if args.table == "-":
        sys.stdout.write(table)
    elif args.table:
        with open(args.table, "w", encoding="utf-8") as fh:
            fh.write(table)
    if args.svg:
        from .figures import render_sweep_svg

        render_sweep_svg(result, args.svg, width=args.width, height=args.height)
    if args.table != "-":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "command": "sweep",
            "x_max": args.x_max,
            "points": len(result.rows),
            "failures": len(result.failures),
            "theorem_T_points": result.theorem_T_count,
            "rows": [
                {
                    "x": r.x,
                    "c": r.c,
                    "route": r.route,
                    "k": r.k,
                    "status": r.status,
                    "theorem_T": r.theorem_T,
                }
                for r in result.rows
            ],
        }
        _emit(doc, args)
    if result.failures:
        raise ConsistencyError(
            f"{len(result.failures)} geography points failed verification"
        )
    return 0


# -- lattice utilities -------------------------------------------------------


def _load_lattice_input(path: str) -> tuple[IntLattice, list]:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    try:
        spec = data["lattice"]
        lat = IntLattice.make(spec["gram"], spec["labels"])
        classes = [lat.from_coeffs(c["coeffs"]) for c in data.get("classes", [])]
    except (KeyError, TypeError) as exc:
        raise DomainError(f"malformed lattice input: {exc}") from exc
    return lat, classes


def _cmd_lattice(args) -> int:
    lat, classes = _load_lattice_input(args.input)
    op = args.lattice_op
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": f"lattice {op}",
        "labels": list(lat.labels),
    }
    if op == "pair":
        if len(classes) != 2:
            raise DomainError("lattice pair needs exactly 2 classes")
        doc["result"] = pair(classes[0], classes[1])
    elif op == "square":
        if len(classes) != 1:
            raise DomainError("lattice square needs exactly 1 class")
        doc["result"] = square(classes[0])
    elif op == "gram":
        doc["result"] = gram_of(classes)
    elif op == "complement":
        comp = orthogonal_complement(lat, classes)
        doc["result"] = [list(v.coeffs) for v in comp]
        doc["classes"] = [format_class(v) for v in comp]
    _emit(doc, args)
    return 0


# -- parser ------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(
        prog="blowdown-lab",
        description="Exact invariant calculus for rational blowdowns and "
        "one-basic-class geography.",
    )
    parser.add_argument(
        "--timestamps",
        action="store_true",
        help="add a generated_at field (output is otherwise deterministic)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    construct = sub.add_parser("construct", help="build a manifold ledger")
    csub = construct.add_subparsers(dest="what", required=True)
    cxp = csub.add_parser("xp", help="X_p = R(2p-3) # S(p)")
    cxp.add_argument("--p", type=int, required=True)
    cxp.add_argument("--out")
    cxp.set_defaults(func=_cmd_construct_xp)
    cxpp = csub.add_parser("xp-prime", help="X'_p = R(2p-4) # S'(p)")
    cxpp.add_argument("--p", type=int, required=True)
    cxpp.add_argument("--out")
    cxpp.set_defaults(func=_cmd_construct_xp_prime)
    cxpk = csub.add_parser("xpk", help="X(p,k): blow down k (-4)-spheres in X_p")
    cxpk.add_argument("--p", type=int, required=True)
    cxpk.add_argument("--k", type=int, required=True)
    cxpk.add_argument("--odd", action="store_true", help="use the odd family X'(p,k)")
    cxpk.add_argument("--out")
    cxpk.set_defaults(func=_cmd_construct_xpk)
    cz = csub.add_parser("z", help="Z(x,k): blowdown of C_{x+2k-2} in E(x) # k CP2bar")
    cz.add_argument("--x", type=int, required=True)
    cz.add_argument("--k", type=int, required=True)
    cz.add_argument("--out")
    cz.set_defaults(func=_cmd_construct_z)

    verify = sub.add_parser("verify", help="run a lattice-level verifier")
    vsub = verify.add_subparsers(dest="what", required=True)
    vp = vsub.add_parser("prop-p", help="blowdown of C_{2p-6} in R(2p-3) yields S(p)")
    vp.add_argument("--p", type=int, required=True)
    vp.add_argument("--out")
    vp.set_defaults(func=_cmd_verify_prop_p)
    vpp = vsub.add_parser(
        "prop-p-prime", help="blowdown of C_{2p-7} in R(2p-4) yields S'(p)"
    )
    vpp.add_argument("--p", type=int, required=True)
    vpp.add_argument("--out")
    vpp.set_defaults(func=_cmd_verify_prop_p_prime)
    vhf = vsub.add_parser("horizontal-fiber", help="horizontal fiber class of R(q+1)")
    vhf.add_argument("--q", type=int, required=True)
    vhf.add_argument("--out")
    vhf.set_defaults(func=_cmd_verify_horizontal_fiber)
    vef = vsub.add_parser("e-fibersum", help="E(x) = R(x+1) # R(x+1) ledger agreement")
    vef.add_argument("--x", type=int, required=True)
    vef.add_argument("--out")
    vef.set_defaults(func=_cmd_verify_e_fibersum)

    bc = sub.add_parser("basic-classes", help="basic classes of E(x) # k CP2bar")
    bc.add_argument("--x", type=int, required=True)
    bc.add_argument("--k", type=int, required=True)
    bc.add_argument(
        "--filter", action="store_true", help="also apply the blowdown filter"
    )
    bc.add_argument("--out")
    bc.set_defaults(func=_cmd_basic_classes)

    geo = sub.add_parser("geography", help="recipe for a (chi_h, c1^2) target")
    geo.add_argument("--x", type=int, required=True)
    geo.add_argument("--c", type=int, required=True)
    geo.add_argument("--out")
    geo.set_defaults(func=_cmd_geography)

    sweep = sub.add_parser("sweep", help="verify every point of the region")
    sweep.add_argument("--x-max", dest="x_max", type=int, required=True)
    sweep.add_argument("--svg", help="write an SVG scatter of the region ('-' = stdout)")
    sweep.add_argument("--table", help="write the TSV coverage table ('-' = stdout)")
    sweep.add_argument("--width", type=int, default=800)
    sweep.add_argument("--height", type=int, default=600)
    sweep.add_argument("--out")
    sweep.set_defaults(func=_cmd_sweep)

    lattice = sub.add_parser("lattice", help="exact-lattice utilities on JSON input")
    lsub = lattice.add_subparsers(dest="lattice_op", required=True)
    for op, help_text in (
        ("pair", "pairing of two classes"),
        ("square", "self-intersection of one class"),
        ("complement", "saturated orthogonal complement of the classes"),
        ("gram", "pairwise intersection matrix"),
    ):
        lp = lsub.add_parser(op, help=help_text)
        lp.add_argument("--input", required=True)
        lp.add_argument("--out")
        lp.set_defaults(func=_cmd_lattice)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ConsistencyError as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
