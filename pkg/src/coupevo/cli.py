"""Command-line surface: history authoring with applicability feedback,
migration, validation, diffing and reconstruction.

Exit codes: 0 success (and empty diff), 1 domain error (or nonempty diff),
2 usage error. Commands never mutate their inputs except the history-authoring
subcommands, which rewrite the history file atomically (or write to -o).
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .catalog import OperationApplication, check_applicability, get_operation, list_operations
from .diff import MatchPolicy, convergence, diff_metamodels, diff_models
from .errors import CoupevoError
from .history import (
    History,
    history_stats,
    load_history,
    record_application,
    reconstruct,
    release,
    save_history,
    stats_table,
    undo_last,
)
from .instance import check_conformance, load_resource_set, save_resource_set
from .metamodel import validate_metamodel
from .mm_io import canonical_json, load_metamodel, save_metamodel, write_text
from .migrate import migrate
from . import minigmf


def _color_enabled() -> bool:
    mode = os.environ.get("COUPEVO_COLOR", "auto")
    if mode == "never":
        return False
    return sys.stdout.isatty()


def _paint(text: str, code: str) -> str:
    if _color_enabled():
        return f"\x1b[{code}m{text}\x1b[0m"
    return text


def _ok(text: str) -> str:
    return _paint(text, "32")


def _bad(text: str) -> str:
    return _paint(text, "31")


def format_stats(rows) -> str:
    """The three-column release-notes table: Operation | Kind | Number."""
    name_width = max([len("Operation")] + [len(r[0]) for r in rows])
    kind_width = max([len("Kind")] + [len(r[1]) for r in rows])
    lines = [f"{'Operation':<{name_width}} | {'Kind':<{kind_width}} | Number",
             f"{'-' * name_width} | {'-' * kind_width} | ------"]
    for name, kind, count in rows:
        lines.append(f"{name:<{name_width}} | {kind:<{kind_width}} | {count:>6}")
    return "\n".join(lines) + "\n"


def _scenario_registry(name: str | None):
    if name is None:
        return None
    return minigmf.SCENARIOS[name]()


# ---------------------------------------------------------------------------
# subcommand implementations


def _cmd_ops_list(args) -> int:
    for spec in list_operations():
        print(spec.name)
    return 0


def _cmd_ops_describe(args) -> int:
    spec = get_operation(args.name)
    print(spec.name)
    print(f"  {spec.doc}")
    print("  parameters:")
    for p in spec.params:
        shape = f"list of {p.kind}" if p.many else p.kind
        suffix = "" if p.required else " (optional)"
        print(f"    {p.name}: {shape}{suffix}")
    print("  constraints:")
    for name, _ in spec.constraints:
        print(f"    {name}")
    return 0


def _cmd_history_create(args) -> int:
    from .history import create_history

    out = Path(args.output)
    if out.exists() and not args.force:
        raise CoupevoError(f"{out}: output exists (use --force)")
    mm = load_metamodel(args.metamodel)
    history = create_history(mm)
    save_history(history, out)
    print(f"history created at {out}")
    return 0


def _parse_op_args(spec, pairs):
    by_name = {p.name: p for p in spec.params}
    out = {}
    for pair in pairs:
        key, eq, raw = pair.partition("=")
        if not eq:
            raise CoupevoError(f"--arg {pair!r} is not key=value")
        param = by_name.get(key)
        if param is None:
            raise CoupevoError(f"{spec.name} has no parameter {key!r}")
        out[key] = _parse_arg_value(param, raw)
    return out


def _parse_arg_value(param, raw: str):
    def one(text: str):
        if param.kind == "flag":
            if text.lower() in ("true", "1", "yes"):
                return True
            if text.lower() in ("false", "0", "no"):
                return False
            raise CoupevoError(f"parameter {param.name!r} takes true/false, got {text!r}")
        if param.kind == "literal":
            lowered = text.lower()
            if lowered in ("true", "false"):
                return lowered == "true"
            try:
                return int(text)
            except ValueError:
                pass
            try:
                return float(text)
            except ValueError:
                pass
            return text
        return text

    if param.many:
        return [one(part) for part in raw.split(",")] if raw else []
    return one(raw)


def _cmd_history_apply(args) -> int:
    history = load_history(args.history)
    spec = get_operation(args.op_name)
    op_args = _parse_op_args(spec, args.arg or [])
    results = check_applicability(spec, op_args, _head(history))
    for result in results:
        mark = _ok("satisfied") if result.satisfied else _bad("NOT satisfied")
        tail = f" ({result.message})" if result.message and not result.satisfied else ""
        print(f"  {result.constraint}: {mark}{tail}")
    if not all(r.satisfied for r in results):
        print(_bad(f"{spec.name}: not applicable; nothing recorded"))
        return 1
    record_application(history, OperationApplication(spec.name, op_args))
    out = Path(args.output or args.history)
    save_history(history, out)
    print(_ok(f"recorded {spec.name} ({out})"))
    if args.target:
        target = load_metamodel(args.target)
        entries = convergence(_head(history), target).entries
        print(f"diff entries: {len(entries)}")
    return 0


def _head(history: History):
    from .history import head_metamodel

    return head_metamodel(history)


def _cmd_history_undo(args) -> int:
    history = load_history(args.history)
    undo_last(history)
    save_history(history, Path(args.output or args.history))
    print("last change undone")
    return 0


def _cmd_history_release(args) -> int:
    history = load_history(args.history)
    release(history, args.label, force=args.force)
    save_history(history, Path(args.output or args.history))
    print(f"release {args.label!r} sealed")
    return 0


def _cmd_history_show(args) -> int:
    history = load_history(args.history)
    for ordinal, rel in enumerate(history.releases):
        state = "released" if rel.released else "open"
        print(f"release {ordinal} [{rel.label}] ({state}, {len(rel.changes)} changes)")
        for index, change in enumerate(rel.changes):
            from .migrate import _describe

            print(f"  {index}: {_describe(change)}")
    return 0


def _cmd_history_stats(args) -> int:
    history = load_history(args.history)
    sys.stdout.write(format_stats(stats_table(history)))
    return 0


def _cmd_history_reconstruct(args) -> int:
    history = load_history(args.history)
    point = "head" if args.at == "head" else int(args.at)
    mm = reconstruct(history, point)
    save_metamodel(mm, args.output)
    print(f"metamodel at {args.at} written to {args.output}")
    return 0


def _cmd_migrate(args) -> int:
    history = load_history(args.history)
    rset = load_resource_set(args.models)
    registry = _scenario_registry(args.scenario)
    migrated, report = migrate(rset, history, registry)
    written = save_resource_set(migrated, args.output)
    sys.stdout.write(report.to_text())
    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_validate(args) -> int:
    mm = load_metamodel(args.metamodel)
    meta_violations = validate_metamodel(mm)
    for v in meta_violations:
        print(_bad(str(v)))
    if meta_violations:
        return 1
    rset = load_resource_set(args.models)
    violations = check_conformance(rset, mm)
    for v in violations:
        print(_bad(str(v)))
    if violations:
        print(_bad(f"{len(violations)} violations"))
        return 1
    print(_ok("conforming"))
    return 0


def _finish_diff(diff, json_path) -> int:
    sys.stdout.write(diff.to_text())
    if json_path:
        write_text(json_path, canonical_json(diff.to_doc()))
    return 0 if diff.is_empty() else 1


def _cmd_diff_mm(args) -> int:
    return _finish_diff(diff_metamodels(load_metamodel(args.a), load_metamodel(args.b)),
                        args.json)


def _cmd_diff_model(args) -> int:
    set_a = load_resource_set(args.models)
    set_b = load_resource_set(args.against)
    policy = MatchPolicy(
        metamodel=load_metamodel(args.mm) if args.mm else None,
        ignore_reference_order=args.ignore_ref_order,
    )
    return _finish_diff(diff_models(set_a, set_b, policy), args.json)


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coupevo",
        description="Coupled metamodel/model evolution: record histories, migrate models.")
    sub = parser.add_subparsers(dest="command", required=True)

    ops = sub.add_parser("ops", help="browse the operation catalog")
    ops_sub = ops.add_subparsers(dest="ops_command", required=True)
    ops_sub.add_parser("list", help="list all operations").set_defaults(fn=_cmd_ops_list)
    describe = ops_sub.add_parser("describe", help="show one operation")
    describe.add_argument("name")
    describe.set_defaults(fn=_cmd_ops_describe)

    history = sub.add_parser("history", help="create and author a history")
    hist_sub = history.add_subparsers(dest="history_command", required=True)

    create = hist_sub.add_parser("create", help="start a history for a metamodel")
    create.add_argument("metamodel")
    create.add_argument("-o", "--output", required=True)
    create.add_argument("--force", action="store_true")
    create.set_defaults(fn=_cmd_history_create)

    apply_ = hist_sub.add_parser("apply", help="record a reusable operation")
    apply_.add_argument("history")
    apply_.add_argument("op_name")
    apply_.add_argument("--arg", action="append", metavar="KEY=VALUE")
    apply_.add_argument("--target", help="metamodel to show the convergence diff against")
    apply_.add_argument("-o", "--output", help="write the updated history here instead of in place")
    apply_.set_defaults(fn=_cmd_history_apply)

    undo = hist_sub.add_parser("undo", help="undo the last recorded change")
    undo.add_argument("history")
    undo.add_argument("-o", "--output")
    undo.set_defaults(fn=_cmd_history_undo)

    release_ = hist_sub.add_parser("release", help="seal the open release")
    release_.add_argument("history")
    release_.add_argument("label")
    release_.add_argument("--force", action="store_true", help="seal even when empty")
    release_.add_argument("-o", "--output")
    release_.set_defaults(fn=_cmd_history_release)

    show = hist_sub.add_parser("show", help="print releases and changes")
    show.add_argument("history")
    show.set_defaults(fn=_cmd_history_show)

    stats = hist_sub.add_parser("stats", help="operation usage table")
    stats.add_argument("history")
    stats.set_defaults(fn=_cmd_history_stats)

    rec = hist_sub.add_parser("reconstruct", help="write an intermediate metamodel version")
    rec.add_argument("history")
    rec.add_argument("--at", required=True, metavar="ORDINAL|head",
                     help="number of releases to replay, or 'head'")
    rec.add_argument("-o", "--output", required=True)
    rec.set_defaults(fn=_cmd_history_reconstruct)

    mig = sub.add_parser("migrate", help="migrate model files to the newest release")
    mig.add_argument("history")
    mig.add_argument("models", nargs="+")
    mig.add_argument("-o", "--output", required=True, help="output directory")
    mig.add_argument("--scenario", choices=sorted(minigmf.SCENARIOS),
                     help="select a compiled-in custom-migration hook registry")
    mig.set_defaults(fn=_cmd_migrate)

    val = sub.add_parser("validate", help="check models against a metamodel")
    val.add_argument("metamodel")
    val.add_argument("models", nargs="+")
    val.set_defaults(fn=_cmd_validate)

    dmm = sub.add_parser("diff-mm", help="structural metamodel diff")
    dmm.add_argument("a")
    dmm.add_argument("b")
    dmm.add_argument("--json", help="also write the diff as JSON")
    dmm.set_defaults(fn=_cmd_diff_mm)

    dmodel = sub.add_parser("diff-model", help="structural model diff")
    dmodel.add_argument("models", nargs="+")
    dmodel.add_argument("--against", nargs="+", required=True)
    dmodel.add_argument("--ignore-ref-order", action="store_true")
    dmodel.add_argument("--mm", help="metamodel for identifier-based matching")
    dmodel.add_argument("--json")
    dmodel.set_defaults(fn=_cmd_diff_model)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except CoupevoError as exc:
        print(_bad(f"error: {exc}"), file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
