"""Command-line driver: ``koszul-bezout <command> SYSTEM [options]``.

Exit codes: 0 when every check passes, 1 when a check fails or a
certificate is refused, 2 on bad usage or unparsable input.
"""
from __future__ import annotations

import argparse
import json
import sys as _sys
import time
import warnings
from pathlib import Path

from . import homology as hom
from .bezout import DegenerateSystemWarning, difference_jacobian, j_map, j_product
from .poly import ContextError
from .suite import verify_suite
from .textio import (ParseError, format_multivector, parse_multivector, parse_system_file,
                     serialize_system, system_namer)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _parse_order(text: str | None, n: int | None = None):
    if text is None:
        return None
    try:
        order = tuple(int(v) - 1 for v in text.split(","))
    except ValueError:
        raise UsageError(f"bad --order {text!r}") from None
    if sorted(order) != list(range(len(order))) or (n is not None and len(order) != n):
        raise UsageError(f"--order must be a permutation of 1..{n or len(order)}")
    return order


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--degree", "-D", type=int, help="truncation degree D")
    common.add_argument("--order", help="variable order for divided differences, e.g. 2,1")
    common.add_argument("--seed", type=int, help="random seed")
    common.add_argument("--json", action="store_true", help="emit a single JSON document")
    common.add_argument("-e", "--system-text", help="system given inline; ';' separates lines")

    p = argparse.ArgumentParser(prog="koszul-bezout",
                                description="Koszul complexes, difference Jacobians and their duality.")
    sub = p.add_subparsers(dest="command", required=True)

    def cmd(name, help_, system_optional=False):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.add_argument("system", nargs="?" if system_optional else None,
                        help="system file ('-' for stdin)")
        return sp

    for name, help_ in (("nabla", "print the divided-difference matrix"),
                        ("bezout", "print the difference Jacobian"),
                        ("quotient-dim", "dimension of the truncated quotient ring"),
                        ("inverse", "find (e, t) and check the homotopy inverse")):
        cmd(name, help_, system_optional=True)
    sp = cmd("jmap", "apply the J-map to a functional", system_optional=True)
    sp.add_argument("functional", help="functional such as '(x^1)_* f*^1'")
    sp = cmd("jproduct", "J-product of two functionals", system_optional=True)
    sp.add_argument("c1")
    sp.add_argument("c2")
    cmd("verify", "run the identity suite (random system from --seed if none given)",
        system_optional=True)
    sp = cmd("homology", "rank of truncated homology", system_optional=True)
    sp.add_argument("--fdeg", type=int, required=True, help="f-degree (negative for the dual complex)")
    return p


def _load_system(args):
    if args.system_text is not None and args.system is not None:
        raise UsageError("give either a system file or --system-text, not both")
    if args.system_text is not None:
        text = args.system_text
    elif args.system is None:
        return None
    elif args.system == "-":
        text = _sys.stdin.read()
    else:
        path = Path(args.system)
        if not path.is_file():
            raise UsageError(f"no such system file: {args.system}")
        text = path.read_text()
    return parse_system_file(text)


def _cert_json(cert, namer):
    if cert is None:
        return None
    return {"target": format_multivector(cert.target, namer),
            "preimage": None if cert.preimage is None else format_multivector(cert.preimage, namer),
            "D": cert.D, "projected": cert.projected}


def _result(name, status, value=None, certificate=None):
    r = {"name": name, "status": status}
    if value is not None:
        r["value"] = value
    if certificate is not None:
        r["certificate"] = certificate
    return r


def run(args: argparse.Namespace) -> tuple[int, dict]:
    """Execute parsed arguments; returns ``(exit code, report)``."""
    sf = _load_system(args)
    system = sf.system if sf else None
    degree = args.degree if args.degree is not None else (sf.degree if sf else None)
    seed = args.seed if args.seed is not None else (sf.seed if sf else None)
    if degree is not None and degree < 0:
        raise UsageError("--degree must be >= 0")
    if system is None and args.command != "verify":
        raise UsageError(f"{args.command} needs a system file or --system-text")
    if system is not None and args.order is not None:
        system = system.with_order(_parse_order(args.order, system.n))
    options = {"degree": degree, "order": args.order, "seed": seed}
    results = []

    if args.command == "verify":
        if system is None and seed is None:
            raise UsageError("verify needs a system or --seed")
        system, checks = verify_suite(seed if seed is not None else 0, system, degree)
        namer = system_namer(system)
        for c in checks:
            cert = c.detail.get("certificate") if c.detail else None
            value = None
            if not c.passed and c.difference is not None:
                value = format_multivector(c.difference, namer)
            results.append(_result(c.name, "pass" if c.passed else "fail", value,
                                   _cert_json(cert, namer) if cert is not None else None))
    else:
        namer = system_namer(system)
        short = system_namer(system, short_f=True)
        dctx = hom.dual_context(system.koszul().ctx)
        if args.command == "nabla":
            for i, row in enumerate(system.nabla()):
                for k, v in enumerate(row):
                    results.append(_result(f"nabla[f{i + 1}][{system.names[k]}]", "ok",
                                           format_multivector(v, namer)))
        elif args.command == "bezout":
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", DegenerateSystemWarning)
                J = difference_jacobian(system).J
            results.append(_result("J", "ok", format_multivector(J, namer)))
        elif args.command == "jmap":
            c = parse_multivector(args.functional, dctx, short)
            results.append(_result("jmap", "ok", format_multivector(j_map(system, c), short)))
        elif args.command == "jproduct":
            c1 = parse_multivector(args.c1, dctx, short)
            c2 = parse_multivector(args.c2, dctx, short)
            results.append(_result("jproduct", "ok", format_multivector(j_product(system, c1, c2), short)))
        elif args.command == "homology":
            rank, stab = hom.homology_rank(system, args.fdeg, degree)
            results.append(_result(f"homology_rank[{args.fdeg}]", "ok",
                                   {"rank": rank, "stabilized": stab}))
        elif args.command == "quotient-dim":
            dim, stab = hom.quotient_dimension(system, degree)
            results.append(_result("quotient_dimension", "ok", {"dimension": dim, "stabilized": stab}))
        elif args.command == "inverse":
            up = hom.find_unit_preimage(system, degree)
            if not up:
                results.append(_result("unit_preimage", "refused", up.reason))
            else:
                results.append(_result("e", "ok", format_multivector(up.e, short)))
                results.append(_result("t", "ok", format_multivector(up.t, short)))
                rep = hom.homotopy_inverse_check(system, up.e, up.t, D=up.D)
                for item in (1, 2, 3, 4):
                    ok_count, total = rep.counts()[item]
                    status = "pass" if ok_count == total and total > 0 else "fail"
                    results.append(_result(f"homotopy_inverse_item_{item}", status,
                                           {"certified": ok_count, "samples": total,
                                            "D": rep.notes[item]["D"]}))
    report = {"command": args.command,
              "system": serialize_system(system),
              "options": options,
              "results": results}
    failed = any(r["status"] in ("fail", "refused") for r in results)
    return (EXIT_FAIL if failed else EXIT_OK), report


def format_text(report: dict) -> str:
    lines = [f"command: {report['command']}"]
    lines += ["system:"] + ["  " + ln for ln in report["system"].splitlines()]
    opts = ", ".join(f"{k}={v}" for k, v in report["options"].items() if v is not None)
    if opts:
        lines.append(f"options: {opts}")
    for r in report["results"]:
        line = f"{r['name']}: {r['status']}"
        v = r.get("value")
        if isinstance(v, dict):
            line += " " + " ".join(f"{k}={str(x).lower() if isinstance(x, bool) else x}" for k, x in v.items())
        elif v is not None:
            line += f"  {v}"
        lines.append(line)
        cert = r.get("certificate")
        if cert:
            lines.append(f"  certificate at D={cert['D']}: {cert['preimage']}")
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    t0 = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse already printed the message
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        code, report = run(args)
    except (UsageError, ParseError, ContextError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_USAGE
    if args.json:
        report["elapsed_ms"] = round((time.perf_counter() - t0) * 1000, 3)
        print(json.dumps(report, indent=2))
    else:
        print(format_text(report), end="")
    return code


if __name__ == "__main__":
    raise SystemExit(main())
