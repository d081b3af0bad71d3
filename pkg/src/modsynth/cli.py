"""Command-line front end: synthesis, verification, batch scans, and the
closed-form reference cost calculators used for comparisons.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 resource
limit.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from math import gcd
from pathlib import Path

from . import circuit as circ
from . import modexp, numeric, pathsynth

REPORT_SCHEMA = 1


# --- reference cost calculators -----------------------------------------------


REFERENCE_SCHEMES = {
    # scheme -> (cnot polynomial, toffoli polynomial)
    "beckman-worst": (lambda n: 8 * n**2 + 16 * n - 18, lambda n: 36 * n**2 - 80 * n + 36),
    "beckman-avg": (lambda n: 6 * n**2 - 16 * n + 13, lambda n: 24 * n**2 - 50 * n + 26),
    "vedral": (lambda n: 96 * n**3 - 84 * n**2 + 15 * n, lambda n: 80 * n**3 - 100 * n**2 + 20 * n),
    "vanmeter": (lambda n: 40 * n**3 - 70 * n**2 + 15 * n, lambda n: 60 * n**3 - 75 * n**2 + 15 * n),
    "proposed-modexp": (
        lambda n: 6 * n**3 - 39 * n**2 + 76 * n - 62,
        lambda n: 24 * n**3 - 145 * n**2 + 243 * n - 104,
    ),
}


def reference_costs(n: int, scheme: str) -> tuple[int, int]:
    """(CNOT, Toffoli) from the published closed forms, n >= 5."""
    if n < 5:
        raise ValueError("reference formulas start at n = 5")
    if scheme not in REFERENCE_SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    fc, ft = REFERENCE_SCHEMES[scheme]
    return fc(n), ft(n)


# --- helpers --------------------------------------------------------------------


class UsageError(Exception):
    pass


def _write(path: str | None, text: str):
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _report_row(m: int, label, tcost: int, ccost: int, anc: int, structure: str) -> dict:
    return {
        "modulus": m,
        "bits": m.bit_length(),
        "multiplier_or_base": label,
        "t_cost": tcost,
        "cnot_cost": ccost,
        "ancillae": anc,
        "structure": structure,
    }


def _cdf_csv(costs: list[int]) -> str:
    lines = ["cost,fraction"]
    total = len(costs)
    seen = 0
    for cost in sorted(set(costs)):
        seen += sum(1 for c in costs if c == cost)
        lines.append(f"{cost},{seen / total}")
    return "\n".join(lines) + "\n"


# --- commands --------------------------------------------------------------------


def cmd_synth_mult(args) -> int:
    m, c = args.modulus, args.mult
    if gcd(c % m, m) != 1:
        raise UsageError("multiplier must be coprime with the modulus")
    if c % m == 1:
        circuit = circ.Circuit(m.bit_length(), tuple("d" * m.bit_length()), [], None)
        method, cost = "identity", 0
    else:
        circuit, method, cost = pathsynth.synth_mult_circuit(m, c, method=args.method)
    if not circ.verify_modmult(circuit, m, c % m):
        print("internal error: synthesized circuit failed verification", file=sys.stderr)
        return 1
    cnt = circ.counts(circuit)
    row = _report_row(m, c, cost, cnt.cnot, cnt.ancillae, method)
    _write(args.out, circ.render(circuit))
    print(json.dumps({"schema": REPORT_SCHEMA, "report": row}, indent=2))
    return 0


def cmd_synth_exp(args) -> int:
    m = args.modulus
    p = modexp.plan(m, b=args.base, l=args.controls)
    circuit = modexp.assemble(p)
    if not modexp.verify_modexp(circuit, m, p.b, p.l):
        print("internal error: assembled circuit failed verification", file=sys.stderr)
        return 1
    cnt = circ.counts(circuit)
    structure = " ".join(
        f"{e.c}({e.index + 1}){'~' if e.negated else ''}{'L' if e.placement == 'lut' else ''}"
        for e in p.entries
    )
    row = _report_row(m, p.b, cnt.toffoli, cnt.cnot, cnt.ancillae, structure)
    _write(args.out, circ.render(circuit))
    if args.out:
        Path(args.out).with_suffix(".plan.json").write_text(p.to_json())
    print(json.dumps({"schema": REPORT_SCHEMA, "report": row}, indent=2))
    return 0


def cmd_verify(args) -> int:
    try:
        circuit = circ.parse(Path(args.circuit).read_text())
    except circ.CircuitParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    if args.base is not None:
        ok = modexp.verify_modexp(circuit, args.modulus, args.base, args.controls)
    else:
        ok = circ.verify_modmult(circuit, args.modulus, args.mult)
    print("pass" if ok else "fail")
    return 0 if ok else 1


def _scan_mult_one(m: int) -> tuple[int, dict[int, int]]:
    res = pathsynth.dijkstra_all(m)
    return m, {c: e.cost for c, e in res.entries.items() if c != 1}


def cmd_scan(args) -> int:
    n = args.bits
    if n > 14:
        print("bit width beyond the search limit", file=sys.stderr)
        return 3
    moduli = numeric.semiprimes(n)
    rows = []
    all_costs: list[int] = []
    if args.kind == "mult":
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                results = dict(pool.map(_scan_mult_one, moduli))
        else:
            results = dict(_scan_mult_one(m) for m in moduli)
        for m in moduli:
            costs = results[m]
            all_costs += costs.values()
            rows.append(
                {
                    "modulus": m,
                    "max": max(costs.values()),
                    "min": min(costs.values()),
                    "avg": sum(costs.values()) / len(costs),
                    "costs": costs,
                }
            )
    else:
        for m in moduli:
            p = modexp.plan(m)
            c = modexp.assemble(p)
            if not modexp.verify_modexp(c, m, p.b, p.l):
                return 1
            t = circ.counts(c).toffoli
            all_costs.append(t)
            rows.append(
                {"modulus": m, "base": p.b, "controls": p.l, "t_cost": t}
            )
    report = {
        "schema": REPORT_SCHEMA,
        "kind": args.kind,
        "bits": n,
        "max": max(all_costs),
        "avg": sum(all_costs) / len(all_costs),
        "rows": rows,
    }
    _write(args.out, json.dumps(report, indent=2) + "\n")
    if args.cdf:
        Path(args.cdf).write_text(_cdf_csv(all_costs))
    return 0


def cmd_period(args) -> int:
    info = numeric.multiplicative_order(args.base, args.modulus)
    print(
        json.dumps(
            {
                "base": info.base,
                "modulus": info.modulus,
                "period": info.period,
                "useful": info.useful,
            }
        )
    )
    return 0


def cmd_srate(args) -> int:
    out = {"schema": REPORT_SCHEMA, "bits": args.bits, "rows": {}}
    for b in (2, 3, 5):
        pct, good, denom = modexp.success_rate(args.bits, b)
        out["rows"][str(b)] = {"pct": round(pct), "good": good, "of": denom}
    for label, group in (("2|3|5", [2, 3, 5]), ("6|10|15", [6, 10, 15]), ("4|9|25", [4, 9, 25])):
        pct, good, denom = modexp.success_rate(args.bits, group)
        out["rows"][label] = {"pct": round(pct, 1), "good": good, "of": denom}
    out["total"] = len(numeric.semiprimes(args.bits, balance=True))
    print(json.dumps(out, indent=2))
    return 0


def cmd_refcosts(args) -> int:
    cnot, toff = reference_costs(args.bits, args.scheme)
    print(json.dumps({"scheme": args.scheme, "bits": args.bits, "cnot": cnot, "toffoli": toff}))
    return 0


# --- dispatcher -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="modsynth")
    sub = ap.add_subparsers(dest="command", required=True)

    synth = sub.add_parser("synth", help="synthesize a circuit")
    synth_sub = synth.add_subparsers(dest="what", required=True)
    sm = synth_sub.add_parser("mult")
    sm.add_argument("--modulus", type=int, required=True)
    sm.add_argument("--mult", type=int, required=True)
    sm.add_argument(
        "--method",
        default="auto",
        choices=["auto", "dijkstra", "divrem", "binary", "csd", "bennett"],
    )
    sm.add_argument("--out")
    sm.set_defaults(fn=cmd_synth_mult)
    se = synth_sub.add_parser("exp")
    se.add_argument("--modulus", type=int, required=True)
    se.add_argument("--base", type=int)
    se.add_argument("--controls", type=int)
    se.add_argument("--out")
    se.set_defaults(fn=cmd_synth_exp)

    ver = sub.add_parser("verify", help="verify a circuit file")
    ver.add_argument("circuit")
    ver.add_argument("--modulus", type=int, required=True)
    ver.add_argument("--mult", type=int)
    ver.add_argument("--base", type=int)
    ver.add_argument("--controls", type=int)
    ver.set_defaults(fn=cmd_verify)

    scan = sub.add_parser("scan", help="batch costs over all n-bit semiprimes")
    scan.add_argument("--bits", type=int, required=True)
    scan.add_argument("--kind", choices=["mult", "exp"], default="mult")
    scan.add_argument("--out")
    scan.add_argument("--cdf")
    scan.add_argument("--jobs", type=int, default=1)
    scan.set_defaults(fn=cmd_scan)

    per = sub.add_parser("period")
    per.add_argument("--modulus", type=int, required=True)
    per.add_argument("--base", type=int, required=True)
    per.set_defaults(fn=cmd_period)

    sr = sub.add_parser("srate")
    sr.add_argument("--bits", type=int, required=True)
    sr.set_defaults(fn=cmd_srate)

    rc = sub.add_parser("refcosts")
    rc.add_argument("--bits", type=int, required=True)
    rc.add_argument(
        "--scheme",
        default="beckman-worst",
        choices=sorted(REFERENCE_SCHEMES),
    )
    rc.set_defaults(fn=cmd_refcosts)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except ResourceWarning as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
