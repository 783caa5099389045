"""Command-line front end.

Exit codes: 0 when every check passes (or the answer is positive), 1 when a
property or decision is negative, 2 for unreadable or ill-formed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import envelope as env
from .document import DocumentError, Scenario, load_scenario, matrix_json, read_json, schema_check
from .fingroup import check_group
from .paction import check_partial_action, vec_str
from .setaction import check_set_paction, diagonal_set_action, envelope_adjoint_data, set_envelope
from .staralg import Ideal, check_algebra, unit_of

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT = 0, 1, 2
DEFAULT_SEED = 42
DEFAULT_SAMPLES = 1000

COMMANDS = ("validate", "units", "decide", "globalize", "family-check", "compare",
            "set-envelope", "norm-check", "schema-check")


def _need(sc: Scenario, *attrs: str):
    for a in attrs:
        if getattr(sc, a) is None:
            key = {"action": "action", "algebra": "algebra", "realization": "algebra.realization",
                   "set_action": "set_action", "envelope": "envelope"}[a]
            raise DocumentError(f"$.{key}: required by this command")


def _validated_action(sc: Scenario, result: dict):
    """Group, algebra and action checks; returns True when all pass."""
    _need(sc, "action")
    reps = [check_group(sc.group), check_algebra(sc.algebra)]
    ok = all(r.ok for r in reps)
    if ok:
        reps.append(check_partial_action(sc.action))
    result["checks"] = [r.to_dict() for r in reps]
    return all(r.ok for r in reps)


def _family(sc: Scenario, alpha):
    """The canonical family, with any document mutations applied."""
    fam = env.canonical_family(alpha)
    if isinstance(fam, env.FamilyFailure):
        return fam
    for lab, c in (sc.family_spec or {}).get("scale", {}).items():
        fam = fam.scaled(alpha.group.index(lab), c)
    return fam


def _envelope_json(pair: env.EnvelopePair) -> dict:
    g = pair.alpha.group
    return {
        "dim_B": pair.dim,
        "dim_A": pair.alpha.algebra.dim,
        "beta": {g.label(t): matrix_json(pair.action.matrix(t)) for t in range(g.order)},
        "mu": matrix_json(pair.embedding),
        "verification": pair.report.to_dict(),
    }


def cmd_validate(sc: Scenario, args, result: dict) -> int:
    reps = [check_group(sc.group)]
    if sc.algebra is not None:
        reps.append(check_algebra(sc.algebra))
    if sc.action is not None and all(r.ok for r in reps):
        reps.append(check_partial_action(sc.action))
    if sc.realization is not None and sc.algebra is not None:
        target = sc.action.algebra if sc.action is not None else sc.algebra
        reps.append(sc.realization.validate(target))
    if sc.set_action is not None:
        try:
            reps.append(check_set_paction(sc.set_action))
        except ValueError as exc:
            raise DocumentError(f"$.set_action: {exc}") from None
    result["checks"] = [r.to_dict() for r in reps]
    return EXIT_OK if all(r.ok for r in reps) else EXIT_NEGATIVE


def cmd_units(sc: Scenario, args, result: dict) -> int:
    if not _validated_action(sc, result):
        return EXIT_NEGATIVE
    alpha = sc.action
    g = alpha.group
    units = {}
    for t in range(g.order):
        u = unit_of(Ideal(alpha.domains[t], True), alpha.algebra)
        units[g.label(t)] = None if u is None else vec_str(u.coeffs)
    result["units"] = units
    if any(u is None for u in units.values()):
        result["missing"] = [k for k, u in units.items() if u is None]
        return EXIT_NEGATIVE
    rep = env.unital_identities_check(alpha)
    result["identities"] = rep.to_dict()
    return EXIT_OK if rep.ok else EXIT_NEGATIVE


def cmd_decide(sc: Scenario, args, result: dict) -> int:
    if not _validated_action(sc, result):
        return EXIT_NEGATIVE
    d = env.decide_envelope(sc.action)
    result["decision"] = "yes" if d.yes else "no"
    result["messages"] = d.messages
    if d.yes:
        result["envelope"] = _envelope_json(d.pair)
        return EXIT_OK
    result["reason"] = d.reason
    result["witness"] = d.witness
    result["justification"] = d.justification
    return EXIT_NEGATIVE


def _checked_family(sc: Scenario, result: dict):
    fam = _family(sc, sc.action)
    if isinstance(fam, env.FamilyFailure):
        result["family"] = {"ok": False, "failure": fam.witness(sc.action), "messages": fam.describe(sc.action)}
        return None, False
    reps = [env.check_family(sc.action, fam, m) for m in ("algebraic", "star")]
    result["family"] = {"ok": all(r.ok for r in reps), "modes": [r.to_dict() for r in reps],
                        "mutations": (sc.family_spec or {}).get("scale", {})}
    return fam, all(r.ok for r in reps)


def cmd_family_check(sc: Scenario, args, result: dict) -> int:
    if not _validated_action(sc, result):
        return EXIT_NEGATIVE
    _, ok = _checked_family(sc, result)
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_globalize(sc: Scenario, args, result: dict) -> int:
    if not _validated_action(sc, result):
        return EXIT_NEGATIVE
    fam, ok = _checked_family(sc, result)
    if not ok:
        return EXIT_NEGATIVE
    try:
        pair = env.globalize(sc.action, fam)
    except env.GlobalizationError as err:
        result["globalization"] = {"ok": False, "clause": err.clause, "witness": err.witness,
                                   "report": err.report.to_dict()}
        return EXIT_NEGATIVE
    result["envelope"] = _envelope_json(pair)
    return EXIT_OK


def cmd_compare(sc: Scenario, args, result: dict) -> int:
    """Canonical adjoint inclusion against the document's envelope, or against its mutated family."""
    if not _validated_action(sc, result):
        return EXIT_NEGATIVE
    alpha = sc.action
    base = env.canonical_family(alpha)
    if isinstance(base, env.FamilyFailure):
        result["failure"] = base.witness(alpha)
        return EXIT_NEGATIVE
    rep = env.check_family(alpha, base)
    if not rep.ok:
        result["family"] = rep.to_dict()
        return EXIT_NEGATIVE
    p1 = env.adjoint_inclusion(alpha, base)
    result["canonical"] = p1.report.to_dict()
    if sc.envelope is not None:
        beta, emb = sc.envelope
        vrep = check_partial_action(beta)
        if not vrep.ok:
            result["envelope_action"] = vrep.to_dict()
            return EXIT_NEGATIVE
        try:
            p2 = env.adjoint_inclusion_of_pair(alpha, beta, emb)
        except ValueError as exc:
            raise DocumentError(f"$.envelope: {exc}") from None
        result["against"] = "document envelope"
    elif sc.family_spec and sc.family_spec.get("scale"):
        p2 = env.adjoint_inclusion(alpha, _family(sc, alpha), validate=False)
        result["against"] = "mutated family (formal)"
    else:
        raise DocumentError("$.envelope: compare needs an 'envelope' or a 'family' mutation")
    c = env.compare_envelopes(p1, p2)
    result["comparison"] = "equal" if c.equal else "distinct"
    if not c.equal:
        result["witness"] = c.witness
    return EXIT_OK if c.equal else EXIT_NEGATIVE


def cmd_set_envelope(sc: Scenario, args, result: dict) -> int:
    x = sc.set_action
    if x is None and sc.action is not None:
        x = diagonal_set_action(sc.action)
    if x is None:
        raise DocumentError("$.set_action: required (or a diagonal action given by coordinate spans)")
    try:
        rep = check_set_paction(x)
    except ValueError as exc:
        raise DocumentError(f"$.set_action: {exc}") from None
    result["checks"] = [rep.to_dict()]
    if not rep.ok:
        return EXIT_NEGATIVE
    e = set_envelope(x)
    g = x.group
    result["size"] = e.size
    result["classes"] = [[[g.label(s), str(x.points[p])] for s, p in c] for c in e.classes]
    result["labels"] = e.labels()
    result["beta"] = {g.label(t): e.perms[t] for t in range(g.order)}
    result["iota"] = {str(x.points[i]): y for i, y in enumerate(e.iota)}
    if sc.action is not None and diagonal_set_action(sc.action) is not None:
        alpha = sc.action
        fam = env.canonical_family(alpha)
        if not isinstance(fam, env.FamilyFailure) and env.check_family(alpha, fam).ok:
            _, beta, emb = envelope_adjoint_data(e)
            c = env.compare_envelopes(env.adjoint_inclusion(alpha, fam), env.adjoint_inclusion_of_pair(alpha, beta, emb))
            result["oracle_comparison"] = "equal" if c.equal else "distinct"
            if not c.equal:
                return EXIT_NEGATIVE
    return EXIT_OK


def cmd_norm_check(sc: Scenario, args, result: dict) -> int:
    _need(sc, "action", "realization")
    if not _validated_action(sc, result):
        return EXIT_NEGATIVE
    vrep = sc.realization.validate(sc.action.algebra)
    result["realization"] = vrep.to_dict()
    if not vrep.ok:
        return EXIT_NEGATIVE
    seed = args.seed if args.seed is not None else sc.parameters.get("seed", DEFAULT_SEED)
    samples = args.samples if args.samples is not None else sc.parameters.get("samples", DEFAULT_SAMPLES)
    try:
        nc = env.norm_inequality_check(sc.action, sc.realization, samples, seed)
    except ValueError as exc:
        result["precondition"] = str(exc)
        return EXIT_NEGATIVE
    result["norm"] = nc.to_dict()
    return EXIT_OK if nc.ok else EXIT_NEGATIVE


HANDLERS = {
    "validate": cmd_validate,
    "units": cmd_units,
    "decide": cmd_decide,
    "globalize": cmd_globalize,
    "family-check": cmd_family_check,
    "compare": cmd_compare,
    "set-envelope": cmd_set_envelope,
    "norm-check": cmd_norm_check,
}


def _render_text(result: dict) -> str:
    lines = [f"{result['command']} {result['document']}: {result['status']}"]
    for key, value in result.items():
        if key in ("command", "document", "status", "exit_code"):
            continue
        if isinstance(value, dict) and "clauses" in value:
            lines.append(_report_text(key, value))
        elif key in ("checks", "modes") or (isinstance(value, list) and value and isinstance(value[0], dict)
                                           and "clauses" in value[0]):
            for r in value:
                lines.append(_report_text(r.get("subject", key), r))
        elif isinstance(value, dict) and key in ("family", "envelope"):
            lines.append(f"{key}:")
            for k, v in value.items():
                if isinstance(v, dict) and "clauses" in v:
                    lines.append(_report_text(k, v, "  "))
                elif isinstance(v, list) and v and isinstance(v[0], dict) and "clauses" in v[0]:
                    for r in v:
                        lines.append(_report_text(r.get("subject", k), r, "  "))
                else:
                    lines.append(f"  {k}: {json.dumps(v, sort_keys=True)}")
        elif key == "messages":
            lines.extend(f"  {m}" for m in value)
        else:
            lines.append(f"{key}: {json.dumps(value, sort_keys=True)}")
    return "\n".join(lines)


def _report_text(title: str, rep: dict, indent: str = "") -> str:
    out = [f"{indent}{title}: {'PASS' if rep['ok'] else 'FAIL'}"]
    for c in rep["clauses"]:
        line = f"{indent}  [{'PASS' if c['ok'] else 'FAIL'}] {c['name']}"
        if not c["ok"]:
            line += f" ({c['violations']} violation{'s' if c['violations'] != 1 else ''}; witness {json.dumps(c['witness'], sort_keys=True)})"
        out.append(line)
    return "\n".join(out)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="penvelope", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("document", help="path to a JSON scenario document")
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.add_argument("--seed", type=int, default=None, help=f"sampling seed (default {DEFAULT_SEED})")
    p.add_argument("--samples", type=int, default=None, help=f"norm-check samples (default {DEFAULT_SAMPLES})")
    return p


def run(argv: list[str]) -> tuple[int, str]:
    """Execute one invocation; returns the exit code and the rendered report."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK, ""
    if args.seed is not None and args.seed < 0 or args.samples is not None and args.samples < 0:
        return EXIT_INPUT, "error: --seed and --samples must be non-negative"
    name = Path(args.document).name
    result: dict = {"command": args.command, "document": name}
    try:
        doc = read_json(args.document)
        if args.command == "schema-check":
            diags = schema_check(doc)
            result["diagnostics"] = diags
            code = EXIT_OK if not diags else EXIT_NEGATIVE
        else:
            sc = load_scenario(doc, Path(args.document).stem)
            code = HANDLERS[args.command](sc, args, result)
    except DocumentError as exc:
        result = {"command": args.command, "document": name, "errors": exc.diagnostics}
        code = EXIT_INPUT
    result["exit_code"] = code
    result["status"] = {EXIT_OK: "ok", EXIT_NEGATIVE: "negative", EXIT_INPUT: "input error"}[code]
    if args.format == "json":
        return code, json.dumps(result, sort_keys=True, indent=2)
    return code, _render_text(result)


def main(argv: list[str] | None = None) -> int:
    code, out = run(sys.argv[1:] if argv is None else argv)
    if out:
        stream = sys.stderr if code == EXIT_INPUT and not out.startswith("{") else sys.stdout
        print(out, file=stream)
    return code


if __name__ == "__main__":
    sys.exit(main())
