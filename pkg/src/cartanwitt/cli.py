"""Command-line interface.

Subcommands: ``construct`` emits an algebra basis, ``decompose`` emits the
block decomposition with isomorphism types and composition factors,
``verify`` runs the theorem battery (exit 0 if every claim passes, 1
otherwise), ``identities`` checks the two integer identities.  Output is
deterministic; files written with --out are byte-identical across runs
(timings are kept out of files and shown only on the text stream).
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import CartanWittError, UnsupportedPrime
from .linalg import prime_field
from .theorems import (
    TheoremReport,
    decomposition_report,
    default_config,
    run_all,
    verify_identities,
)

SCHEMA = 1

_FAMILY_DEFAULT_N = {"W": (2, 3), "S": (2, 3), "H": (2, 4), "K": (3,)}
_MIN_N = {"W": 1, "S": 2, "H": 2, "K": 3}


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cartanwitt",
        description="Cartan-type simple Lie algebras over GF(p) as Witt-algebra modules",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, family_required=True):
        sp.add_argument("--out", help="write the report to this path")
        sp.add_argument("--format", choices=("json", "text"), default="json")

    sp = sub.add_parser("construct", help="build an algebra and emit its basis")
    sp.add_argument("--family", required=True, choices=("W", "S", "H", "K"))
    sp.add_argument("--n", required=True, type=int, help="variable count")
    sp.add_argument("--p", required=True, type=int)
    common(sp)

    sp = sub.add_parser("decompose", help="emit the block decomposition")
    sp.add_argument("--family", required=True, choices=("W", "S", "H", "K"))
    sp.add_argument("--n", required=True, type=int)
    sp.add_argument("--p", required=True, type=int)
    common(sp)

    sp = sub.add_parser("verify", help="run the verification battery")
    sp.add_argument("--family", default="all", choices=("all", "W", "S", "H", "K"))
    sp.add_argument("--p", help="comma-separated primes")
    sp.add_argument("--n", help="comma-separated variable counts")
    common(sp)

    sp = sub.add_parser("identities", help="check the integer identities")
    sp.add_argument("--n-max", type=int, default=6)
    sp.add_argument("--p-max", type=int, default=13)
    common(sp)
    return ap


class UsageError(Exception):
    pass


def _check_params(family: str, n: int, p: int):
    try:
        prime_field(p)
    except UnsupportedPrime as exc:
        raise UsageError(str(exc)) from None
    if n < _MIN_N[family]:
        raise UsageError(f"family {family} needs n >= {_MIN_N[family]}")
    if family == "H" and n % 2:
        raise UsageError("family H needs an even variable count")
    if family == "K" and n % 2 == 0:
        raise UsageError("family K needs an odd variable count")


def _parse_int_list(text: str | None, what: str) -> list[int] | None:
    if text is None:
        return None
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise UsageError(f"bad {what} list {text!r}") from None


def _verify_tasks(family: str, ps, ns) -> list[tuple]:
    if family == "all" and ps is None and ns is None:
        return default_config()
    tasks: list[tuple] = []
    ps = ps or [5]
    families = ("W", "S", "H", "K") if family == "all" else (family,)
    for p in ps:
        for fam in families:
            fam_ns = ns if ns is not None else _FAMILY_DEFAULT_N[fam]
            for n in fam_ns:
                if family == "all" and ns is not None:
                    # with an explicit joint list, route each n by parity fit
                    if fam == "H" and n % 2:
                        continue
                    if fam == "K" and n % 2 == 0:
                        continue
                    if n < _MIN_N[fam]:
                        continue
                _check_params(fam, n, p)
                tasks.append((fam, n, p))
    if family == "all":
        tasks.append(("identities", 6, 13))
    return tasks


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

def _dump_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _type_sort_key(label: str):
    kind, lam = label[0], int(label[2:-1])
    return (0 if kind == "V" else 1, lam)


def render_multiplicities(mults: dict[str, int]) -> str:
    parts = [
        f"{label}^{count}" if count != 1 else label
        for label, count in sorted(mults.items(), key=lambda kv: _type_sort_key(kv[0]))
    ]
    return " (+) ".join(parts) if parts else "0"


def _decomposition_text(doc: dict) -> str:
    lines = [
        f"{doc['family']}({doc['n']}) over GF({doc['p']}), dim {doc['dim']}",
        "  " + render_multiplicities(doc["multiplicities"]),
        "  composition factors: "
        + " + ".join(
            f"{c}[L({lam})]" for lam, c in sorted(
                doc["composition_factors"].items(), key=lambda kv: int(kv[0])
            ) if c
        ),
    ]
    return "\n".join(lines) + "\n"


def _report_text(reports: list[TheoremReport]) -> str:
    lines = []
    for r in reports:
        lines.append(f"{r.verdict.upper():4} {r.claim} ({r.millis} ms)")
        if "multiplicities" in r.computed:
            lines.append("     " + render_multiplicities(r.computed["multiplicities"]))
        for note in r.notes:
            lines.append(f"     note: {note}")
        if not r.ok:
            lines.append(f"     expected: {r.expected}")
            lines.append(f"     computed: {r.computed}")
    good = sum(r.ok for r in reports)
    lines.append(f"{good}/{len(reports)} claims pass")
    return "\n".join(lines) + "\n"


def _emit(doc_json: str, doc_text: str, args) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(doc_json if args.format == "json" else doc_text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(doc_json if args.format == "json" else doc_text)


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "construct":
            _check_params(args.family, args.n, args.p)
            from .cartan import algebra

            doc = {"schema": SCHEMA, "kind": "algebra", **algebra(args.family, args.n, args.p).to_json()}
            text = f"{args.family}({args.n}) over GF({args.p}), dim {doc['dim']}\n"
            _emit(_dump_json(doc), text, args)
            return 0

        if args.command == "decompose":
            _check_params(args.family, args.n, args.p)
            rep = decomposition_report(args.family, args.n, args.p)
            doc = {"schema": SCHEMA, "kind": "decomposition", **rep}
            _emit(_dump_json(doc), _decomposition_text(rep), args)
            return 0

        if args.command == "verify":
            ps = _parse_int_list(args.p, "prime")
            ns = _parse_int_list(args.n, "variable count")
            tasks = _verify_tasks(args.family, ps, ns)
            reports = run_all(tasks)
            doc = {
                "schema": SCHEMA,
                "kind": "verification",
                "all_pass": all(r.ok for r in reports),
                "reports": [r.to_json(include_millis=args.out is None) for r in reports],
            }
            _emit(_dump_json(doc), _report_text(reports), args)
            return 0 if all(r.ok for r in reports) else 1

        if args.command == "identities":
            report = verify_identities(args.n_max, args.p_max)
            doc = {
                "schema": SCHEMA,
                "kind": "verification",
                "all_pass": report.ok,
                "reports": [report.to_json(include_millis=args.out is None)],
            }
            _emit(_dump_json(doc), _report_text([report]), args)
            return 0 if report.ok else 1
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CartanWittError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
