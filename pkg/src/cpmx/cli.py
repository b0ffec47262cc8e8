"""``cpmx`` command-line interface.

Exit codes: 0 success, 1 usage error, 2 precondition or constraint error,
3 I/O or parse error. Failures print one JSON error object on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path
from typing import Any, Sequence

from .catalog import applicable_patterns, list_patterns, pattern_relations
from .configuration import Configuration, check_selection, derive_variant, enumerate_configurations
from .constraints import check_vcc_consistency, variant_dependents
from .errors import CpmError, FormatError, UnknownPattern
from .evolution import apply_pattern
from .io import dumps_canonical, export_dot, load_model, save_model
from .model import KINDS
from .trace import Trace, dumps_trace, loads_trace, record, replay, undo
from .validate import validate_model

EXIT_OK, EXIT_USAGE, EXIT_PRECONDITION, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would print usage and exit
        raise UsageError(message)


class _Failed(Exception):
    """A command that already knows its exit code and error object."""

    def __init__(self, code: int, payload: dict):
        super().__init__(payload.get("message", ""))
        self.code, self.payload = code, payload


# -- stream helpers ---------------------------------------------------------------


def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    return Path(path).read_bytes()


def _write(path: str | None, data: bytes | str) -> None:
    if isinstance(data, str):
        data = data.encode("utf-8")
    if path is None or path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
        return
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, target)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def _print_json(obj: Any) -> None:
    _write(None, dumps_canonical(obj) + "\n")


def _model(path: str):
    return load_model(_read(path))


def _json_file(path: str) -> Any:
    raw = _read(path)
    try:
        return json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise _Failed(EXIT_IO, {"error": "ParseError", "ids": [], "message": f"{path}: {exc}"}) from exc


def _load_trace(path: str) -> Trace:
    if path != "-" and not Path(path).exists():
        return Trace()
    return loads_trace(_read(path))


# -- commands -----------------------------------------------------------------------


def cmd_validate(args) -> int:
    report = validate_model(_model(args.model))
    _print_json(report.to_dict())
    if not report.ok:
        ids = sorted({i for v in report.violations for i in v.ids})
        raise _Failed(EXIT_PRECONDITION, {"error": "ValidationFailed", "ids": ids,
                                          "message": f"rules violated: {sorted(report.rules())}"})
    return EXIT_OK


def cmd_apply(args) -> int:
    model = _model(args.model)
    params = _json_file(args.params) if args.params else {}
    trace = _load_trace(args.trace) if args.trace else None
    result = apply_pattern(model, args.pattern, params)
    if trace is not None:
        trace = record(trace, result.trace_entry)
    _write(args.out, save_model(result.model))
    if trace is not None:
        _write(args.trace, dumps_trace(trace))
    return EXIT_OK


def cmd_patterns(args) -> int:
    if args.what == "list":
        _print_json([p.to_dict() for p in list_patterns()])
    elif args.dot:
        _write(None, pattern_relations().to_dot())
    else:
        graph = pattern_relations()
        _print_json({"nodes": list(graph.nodes),
                     "edges": [{"source": s, "relation": r, "target": t} for s, r, t in graph.edges]})
    return EXIT_OK


def cmd_applicable(args) -> int:
    verdicts = applicable_patterns(_model(args.model), args.target)
    _print_json([v.to_dict() for v in verdicts])
    return EXIT_OK


def cmd_audit(args) -> int:
    model = _model(args.model)
    dependents = {}
    for kind in KINDS:
        for el in model.table(kind).values():
            if el.is_variant:
                dependents[el.id] = sorted(variant_dependents(model, el.id, transitive=args.transitive))
    _print_json({"conflicts": [c.to_dict() for c in check_vcc_consistency(model)],
                 "dependents": dependents, "transitive": args.transitive})
    return EXIT_OK


def cmd_configure(args) -> int:
    model = _model(args.model)
    config = Configuration.parse(args.select)
    violations = check_selection(model, config)
    if args.out and not violations:
        _write(args.out, save_model(derive_variant(model, config)))
    _print_json({"selection": config.to_dict(), "valid": not violations,
                 "violations": [v.to_dict() for v in violations]})
    if violations:
        ids = sorted({i for v in violations for i in v.ids})
        raise _Failed(EXIT_PRECONDITION, {"error": "InvalidSelection", "ids": ids,
                                          "message": "; ".join(v.message for v in violations)})
    return EXIT_OK


def cmd_derive(args) -> int:
    model = _model(args.model)
    _write(args.out, save_model(derive_variant(model, Configuration.parse(args.select))))
    return EXIT_OK


def cmd_enumerate(args) -> int:
    configs = enumerate_configurations(_model(args.model))
    if args.count_only:
        _write(None, f"{len(configs)}\n")
    else:
        _print_json([c.to_dict() for c in configs])
    return EXIT_OK


def cmd_trace(args) -> int:
    if args.action == "show":
        trace = loads_trace(_read(args.file))
        _print_json([e.to_dict() for e in trace.entries])
        return EXIT_OK
    if not args.model or not args.trace:
        raise UsageError(f"trace {args.action} needs --model and --trace")
    model = _model(args.model)
    trace = loads_trace(_read(args.trace))
    if args.action == "replay":
        _write(args.out, save_model(replay(model, trace)))
    else:
        previous, rest = undo(model, trace)
        _write(args.out, save_model(previous))
        if args.trace != "-":
            _write(args.trace, dumps_trace(rest))
    return EXIT_OK


def cmd_export(args) -> int:
    model = _model(args.model)
    _write(args.out, export_dot(model) if args.dot else save_model(model))
    return EXIT_OK


# -- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cpmx", description="Evolve and configure configurable process models.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="check well-formedness rules")
    p.add_argument("--model", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("apply", help="apply an evolution pattern")
    p.add_argument("pattern")
    p.add_argument("--model", required=True)
    p.add_argument("--params")
    p.add_argument("--out")
    p.add_argument("--trace")
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("patterns", help="show the pattern catalog")
    p.add_argument("what", choices=["list", "graph"])
    p.add_argument("--dot", action="store_true")
    p.set_defaults(func=cmd_patterns)

    p = sub.add_parser("applicable", help="which patterns apply to a model or element")
    p.add_argument("--model", required=True)
    p.add_argument("--target")
    p.set_defaults(func=cmd_applicable)

    p = sub.add_parser("audit", help="report VCC conflicts and variant dependents")
    p.add_argument("--model", required=True)
    p.add_argument("--transitive", action="store_true")
    p.set_defaults(func=cmd_audit)

    for name, func, help_ in (("configure", cmd_configure, "check a selection, optionally deriving it"),
                              ("derive", cmd_derive, "derive the plain model for a selection")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--model", required=True)
        p.add_argument("--select", required=True, help="vp=variant,... (vp= selects nothing)")
        p.add_argument("--out")
        p.set_defaults(func=func)

    p = sub.add_parser("enumerate", help="list valid configurations")
    p.add_argument("--model", required=True)
    p.add_argument("--count-only", action="store_true")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("trace", help="inspect, replay or undo an evolution trace")
    p.add_argument("action", choices=["show", "replay", "undo"])
    p.add_argument("file", nargs="?", help="trace file for show")
    p.add_argument("--model")
    p.add_argument("--trace")
    p.add_argument("--out")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("export", help="write the model as canonical JSON or DOT")
    p.add_argument("--model", required=True)
    p.add_argument("--dot", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_export)
    return parser


def _fail(code: int, payload: dict) -> int:
    sys.stderr.write(json.dumps(payload, sort_keys=True, ensure_ascii=False) + "\n")
    return code


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "trace" and args.action == "show" and not args.file:
            raise UsageError("trace show needs a trace file")
        return args.func(args)
    except UsageError as exc:
        return _fail(EXIT_USAGE, {"error": "UsageError", "ids": [], "message": str(exc)})
    except _Failed as exc:
        return _fail(exc.code, exc.payload)
    except UnknownPattern as exc:
        return _fail(EXIT_USAGE, exc.to_dict())
    except FormatError as exc:
        return _fail(EXIT_IO, exc.to_dict())
    except CpmError as exc:
        code = EXIT_IO if exc.name == "EditApplicationFailed" else EXIT_PRECONDITION
        return _fail(code, exc.to_dict())
    except OSError as exc:
        return _fail(EXIT_IO, {"error": type(exc).__name__, "ids": [], "message": str(exc)})


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
