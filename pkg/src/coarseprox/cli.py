"""Command-line front end.

Every command prints one JSON document with the keys ``command``,
``backend``, ``inputs``, ``result``, ``version`` and, where one exists,
``witness`` or ``certificate``.  Exit codes: 0 success, 1 the relation was
false where a witness was asked for (or a certificate did not validate, or
a check run missed its expected pattern), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import harness
from .backends import HalfLine, Metric, QHalfLine, SetClassError, ZMetric, get_backend
from .expr import ExprError, elaborate
from .normality import (
    CANONICAL_A,
    NotDisjoint,
    NotNested,
    PrecFails,
    interpolate,
    interpolate_star,
    nonnormality_certificate,
    search_interpolant,
    split_asymptotic,
    validate_certificate,
)
from .relations import B_MODES, PREC_MODES, b_rel, lambda_rel, nbhd, prec
from .serial import jsonify

SCHEMA_VERSION = "1"
BACKENDS = ("z-metric", "q-halfline", "windowed")


class UsageError(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get("COARSEPROX_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"COARSEPROX_SEED must be an integer, got {raw!r}") from None


def _windows(text: str | None) -> tuple[int, ...] | None:
    if text is None:
        return None
    try:
        ws = tuple(int(w) for w in text.split(",") if w.strip())
    except ValueError:
        raise UsageError(f"--windows expects comma-separated integers, got {text!r}") from None
    if not ws or any(w <= 0 for w in ws):
        raise UsageError("--windows needs at least one positive window")
    return ws


def _backend(args):
    kwargs = {}
    if args.backend == "windowed":
        ws = _windows(getattr(args, "windows", None))
        if ws:
            kwargs["windows"] = ws
    return get_backend(args.backend, **kwargs)


def _sets(backend, texts):
    try:
        return [elaborate(t, backend) for t in texts]
    except ExprError as exc:
        raise UsageError(f"syntax error: {exc}") from None
    except SetClassError as exc:
        raise UsageError(f"class mismatch for {backend.name}: {exc}") from None


def _doc(command: str, backend, inputs, result, **extra) -> dict:
    out = {
        "command": command,
        "backend": backend.name if backend is not None else None,
        "inputs": [backend.serialize(s) for s in inputs] if backend is not None else [],
        "result": result,
        "version": SCHEMA_VERSION,
    }
    out.update(extra)
    return out


def _verdict(v):
    return v if isinstance(v, bool) else jsonify(v)


# ---------------------------------------------------------------------------
# commands


_DECIDE_MODES = {
    "b": B_MODES + ("rule",),
    "prec": PREC_MODES + ("rule",),
    "nbhd": PREC_MODES + ("rule",),
    "lambda": ("rule",),
}


def cmd_decide(args) -> tuple[dict, int]:
    bk = _backend(args)
    a, b = _sets(bk, [args.expr1, args.expr2])
    mode = args.mode or ("rule" if args.relation == "lambda" else "image")
    if mode not in _DECIDE_MODES[args.relation]:
        raise UsageError(f"decide {args.relation} takes --mode in {_DECIDE_MODES[args.relation]}")
    if args.backend == "windowed" and mode not in ("image", "rule"):
        raise UsageError("the windowed backend only has the image evidence search")
    if args.backend == "windowed" and args.relation != "lambda":
        mode = "image"
    if args.relation == "lambda":
        r = lambda_rel(bk, a, b)
    else:
        fn = {"b": b_rel, "prec": prec, "nbhd": nbhd}[args.relation]
        r = fn(bk, a, b, mode)
    result = {"relation": args.relation, "verdict": _verdict(r.verdict), "mode": r.mode}
    return _doc("decide", bk, [a, b], result, witness=jsonify(r.witness)), 0


def cmd_bounded(args) -> tuple[dict, int]:
    bk = _backend(args)
    (a,) = _sets(bk, [args.expr])
    return _doc("bounded", bk, [a], {"verdict": _verdict(bk.bounded(a))}), 0


def _entourage(args, bk):
    if isinstance(bk, QHalfLine):
        if args.offsets is None:
            raise UsageError("the half-line backend takes --offsets")
        try:
            offs = [Fraction(c) for c in args.offsets.split(",") if c.strip()]
            t = Fraction(args.threshold or "0")
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"bad rational in --offsets/--threshold: {args.offsets!r}") from None
        if t < 0:
            raise UsageError("--threshold must be non-negative")
        return HalfLine(frozenset(offs), t)
    if args.radius is None:
        raise UsageError(f"the {bk.name} backend takes --radius")
    if args.radius < 0:
        raise UsageError("--radius must be non-negative")
    return Metric(args.radius)


def cmd_image(args) -> tuple[dict, int]:
    bk = _backend(args)
    (a,) = _sets(bk, [args.expr])
    e = _entourage(args, bk)
    img = bk.image(e, a)
    return _doc("image", bk, [a], {"entourage": jsonify(e), "image": bk.serialize(img)}), 0


def cmd_witness(args) -> tuple[dict, int]:
    bk = _backend(args)
    if isinstance(bk, QHalfLine) and args.kind == "normal":
        a, b = _sets(bk, [args.expr1, args.expr2])
        if not prec(bk, a, b).verdict:
            return _doc("witness", bk, [a, b], {"kind": "normal", "found": False, "reason": "A prec B fails"}), 1
        c = search_interpolant(bk, a, b)
        found = c is not None
        result = {"kind": "normal", "found": found}
        if not found:
            result["reason"] = "no representable interpolant"
        return _doc("witness", bk, [a, b], result, witness={"C": jsonify(c)} if found else None), 0 if found else 1
    if not isinstance(bk, ZMetric) and args.kind != "lambda":
        raise UsageError(f"witness {args.kind} needs --backend z-metric")
    a, b = _sets(bk, [args.expr1, args.expr2])
    try:
        if args.kind == "lambda":
            r = lambda_rel(bk, a, b)
            ok = r.verdict is True
            return _doc("witness", bk, [a, b], {"kind": "lambda", "found": ok}, witness=jsonify(r.witness)), 0 if ok else 1
        if args.kind == "normal":
            w = interpolate(bk, a, b)
        elif args.kind == "nested":
            w = interpolate_star(bk, a, b)
        else:
            x1, x2 = split_asymptotic(bk, a, b)
            return _doc("witness", bk, [a, b], {"kind": "split", "found": True}, witness={"X1": jsonify(x1), "X2": jsonify(x2)}), 0
    except (PrecFails, NotNested, NotDisjoint) as exc:
        return _doc("witness", bk, [a, b], {"kind": args.kind, "found": False, "reason": str(exc)}), 1
    return _doc("witness", bk, [a, b], {"kind": args.kind, "found": True}, witness=w.to_json()), 0


def cmd_certify(args) -> tuple[dict, int]:
    bk = QHalfLine()
    (c,) = _sets(bk, [args.candidate])
    try:
        cert = nonnormality_certificate(c, trace_len=args.trace)
    except PrecFails as exc:
        return _doc("certify", bk, [c], {"kind": "nonnormal", "issued": False, "reason": str(exc)}), 1
    data = cert.to_json()
    ok, problems = validate_certificate(data, min_trace=args.trace)
    result = {"kind": "nonnormal", "issued": True, "self_check": ok, "problems": problems}
    return _doc("certify", bk, [c], result, certificate=data), 0 if ok else 1


def cmd_validate(args) -> tuple[dict, int]:
    try:
        raw = sys.stdin.read() if args.cert == "-" else open(args.cert, encoding="utf-8").read()
        data = json.loads(raw)
    except OSError as exc:
        raise UsageError(f"cannot read {args.cert}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{args.cert} is not JSON: {exc}") from None
    if isinstance(data, dict) and "certificate" in data:
        data = data["certificate"]
    if not isinstance(data, dict):
        return _doc("validate", None, [], {"valid": False, "problems": ["not a certificate object"]}), 1
    ok, problems = validate_certificate(data, min_trace=args.trace)
    doc = _doc("validate", QHalfLine(), [], {"valid": ok, "problems": problems})
    doc["inputs"] = [data.get("candidate")]
    return doc, 0 if ok else 1


def cmd_check(args) -> tuple[dict, int]:
    if args.backend == "windowed":
        raise UsageError("the harness runs on the exact backends only")
    bk = get_backend(args.backend)
    seed = args.seed if args.seed is not None else _default_seed()
    plan = harness.SeedPlan(seed=seed)
    ws = _windows(args.windows)
    if ws:
        if len(ws) < 2:
            raise UsageError("--windows for check needs two windows")
        plan.oracle_windows = ws
    names = harness.SUITES if args.suite == "all" else (args.suite,)
    reports = [harness.run_suite(n, bk, plan) for n in names]
    ok = harness.pattern_ok(reports)
    result = {
        "seed": seed,
        "pattern_ok": ok,
        "expected_failures": sorted(harness.EXPECTED_Q_FAILURES) if isinstance(bk, QHalfLine) else [],
        "reports": [r.to_json() for r in reports],
    }
    return _doc("check", bk, [], result), 0 if ok else 1


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(2)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="coarseprox", description="Decide coarse proximity relations on concrete set classes.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, backend_default="z-metric"):
        sp.add_argument("--backend", choices=BACKENDS, default=backend_default)
        sp.add_argument("--windows", help="comma-separated windows, e.g. 100,1000")
        sp.add_argument("--out", help="also write the JSON document to this file")

    d = sub.add_parser("decide", help="decide b, lambda, prec or nbhd for two sets")
    d.add_argument("relation", choices=sorted(_DECIDE_MODES))
    d.add_argument("expr1")
    d.add_argument("expr2")
    d.add_argument("--mode", choices=sorted({m for ms in _DECIDE_MODES.values() for m in ms} | {"disjoint"}))
    common(d)
    d.set_defaults(fn=cmd_decide)

    b = sub.add_parser("bounded", help="decide boundedness of one set")
    b.add_argument("expr")
    common(b)
    b.set_defaults(fn=cmd_bounded)

    im = sub.add_parser("image", help="thicken a set by an entourage")
    im.add_argument("expr")
    im.add_argument("--radius", type=int)
    im.add_argument("--offsets", help='half-line offsets, e.g. "1/2,3"')
    im.add_argument("--threshold", help="half-line threshold (default 0)")
    common(im)
    im.set_defaults(fn=cmd_image)

    w = sub.add_parser("witness", help="construct an interpolant, split or resemblance witness")
    w.add_argument("kind", choices=("normal", "nested", "split", "lambda"))
    w.add_argument("expr1")
    w.add_argument("expr2")
    common(w)
    w.set_defaults(fn=cmd_witness)

    c = sub.add_parser("certify", help="issue a non-normality certificate on the half-line")
    c.add_argument("kind", choices=("nonnormal",))
    c.add_argument("--candidate", required=True)
    c.add_argument("--trace", type=int, default=50)
    c.add_argument("--out")
    c.set_defaults(fn=cmd_certify)

    v = sub.add_parser("validate", help="replay a certificate from a JSON file ('-' for stdin)")
    v.add_argument("cert")
    v.add_argument("--trace", type=int, default=50)
    v.add_argument("--out")
    v.set_defaults(fn=cmd_validate)

    ch = sub.add_parser("check", help="run the seeded property suites")
    ch.add_argument("--suite", choices=(*harness.SUITES, "all"), default="all")
    ch.add_argument("--seed", type=int)
    common(ch)
    ch.set_defaults(fn=cmd_check)
    return p


def run_command(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        doc, code = args.fn(args)
    except UsageError as exc:
        print(f"coarseprox: {exc}", file=sys.stderr)
        return 2
    text = json.dumps(doc, indent=2, sort_keys=True)
    print(text)
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return code


def main(argv: list[str] | None = None) -> None:
    sys.exit(run_command(argv))


if __name__ == "__main__":
    main()
