"""Command-line front end.

    hkbfs query --kb spillover.hkb --depth 2 --atom "safe(t)"
    hkbfs partition --kb spillover.hkb
    hkbfs trace --kb spillover.hkb --depth 2
    hkbfs compare --kb tiny.hkb
    hkbfs check-coherence --kb tiny.hkb
    hkbfs validate --kb spillover.hkb

Every command loads one KB file, grounds it at the depth bound (default
3) and prints either human-readable text or, with ``--format
structured``, one JSON object with the keys ``ka_size, depth,
iterations, true_atoms, false_atoms, undefined_atoms, diagnostics,
result`` (schema version 1; ``result`` carries the command verdict).
Output is byte-identical across runs on the same input.

Exit status: 0 success, 1 input or diagnostic errors, 2 usage errors,
3 incoherent knowledge base.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import IO

from . import engine, oracle
from .diagnostics import Diagnostic
from .errors import (
    GroundingLimitError,
    IncoherenceError,
    KBError,
    ParseError,
    UnknownAtomError,
)
from .grounding import DEFAULT_MAX_GROUND_RULES
from .model import Interpretation, sort_atoms
from .parser import load_kb, parse_ground_atom, validate_dl_safety

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_INCOHERENT = 3

STRUCTURED_SCHEMA_VERSION = 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hkbfs",
        description="well-founded reasoning over MKNF hybrid knowledge "
        "bases with function symbols",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, needs_atom in (
        ("query", True),
        ("partition", False),
        ("trace", False),
        ("compare", False),
        ("check-coherence", False),
        ("validate", False),
    ):
        cmd = sub.add_parser(name)
        cmd.add_argument("--kb", required=True, help="path to the KB file")
        cmd.add_argument(
            "--depth",
            type=int,
            default=3,
            help="term-depth bound k for grounding (default 3)",
        )
        cmd.add_argument(
            "--format",
            choices=("text", "structured"),
            default="text",
            dest="fmt",
        )
        cmd.add_argument(
            "--max-ground-rules",
            type=int,
            default=DEFAULT_MAX_GROUND_RULES,
            help="abort if the grounding would exceed this many rules",
        )
        if needs_atom:
            cmd.add_argument("--atom", required=True, help="ground query atom")
    return parser


def _atom_list(atoms) -> list[str]:
    return [str(a) for a in sort_atoms(atoms)]


def _diag_json(diags: list[Diagnostic]) -> list[dict]:
    return [
        {
            "severity": str(d.severity),
            "code": d.code,
            "message": d.message,
            "span": str(d.span) if d.span else None,
        }
        for d in diags
    ]


def _structured(
    out: IO[str],
    *,
    ka_size,
    depth,
    iterations,
    interp: Interpretation | None,
    ka=None,
    diagnostics=(),
    result=None,
) -> None:
    if interp is None:
        true_atoms: list[str] = []
        false_atoms: list[str] = []
        undefined: list[str] = []
    else:
        true_atoms = _atom_list(interp.true_atoms)
        false_atoms = _atom_list(interp.false_atoms)
        undefined = _atom_list(
            (ka or frozenset()) - interp.true_atoms - interp.false_atoms
        )
    document = {
        "ka_size": ka_size,
        "depth": depth,
        "iterations": iterations,
        "true_atoms": true_atoms,
        "false_atoms": false_atoms,
        "undefined_atoms": undefined,
        "diagnostics": _diag_json(list(diagnostics)),
        "result": result,
    }
    json.dump(document, out, indent=2, sort_keys=True)
    out.write("\n")


def _print_diagnostics(diags, out: IO[str]) -> None:
    for diag in diags:
        out.write(f"{diag}\n")


def _cmd_query(args, out: IO[str]) -> int:
    atom = parse_ground_atom(args.atom)
    ctx = engine.ground_context(args.kb_obj, args.depth, args.max_ground_rules)
    trace, interp = engine.iterated_fixpoint(ctx)
    if atom not in ctx.ka:
        raise UnknownAtomError(atom, ctx.depth_bound)
    verdict = interp.truth_of(atom)
    if args.fmt == "structured":
        _structured(
            out,
            ka_size=len(ctx.known),
            depth=ctx.depth_bound,
            iterations=trace.outer_steps,
            interp=interp,
            ka=ctx.ka,
            diagnostics=ctx.diagnostics,
            result=str(verdict),
        )
    else:
        out.write(f"{verdict} (k={ctx.depth_bound})\n")
        _print_diagnostics(ctx.diagnostics, out)
    return EXIT_OK


def _cmd_partition(args, out: IO[str]) -> int:
    ctx = engine.ground_context(args.kb_obj, args.depth, args.max_ground_rules)
    trace, interp = engine.iterated_fixpoint(ctx)
    undefined = ctx.ka - interp.true_atoms - interp.false_atoms
    if args.fmt == "structured":
        _structured(
            out,
            ka_size=len(ctx.known),
            depth=ctx.depth_bound,
            iterations=trace.outer_steps,
            interp=interp,
            ka=ctx.ka,
            diagnostics=ctx.diagnostics,
        )
    else:
        out.write(f"ka: {len(ctx.known)} atoms (k={ctx.depth_bound})\n")
        out.write(
            f"I_T ({len(interp.true_atoms)}): "
            + ", ".join(_atom_list(interp.true_atoms))
            + "\n"
        )
        out.write(
            f"I_F ({len(interp.false_atoms)}): "
            + ", ".join(_atom_list(interp.false_atoms))
            + "\n"
        )
        out.write(
            f"undefined ({len(undefined)}): "
            + ", ".join(_atom_list(undefined))
            + "\n"
        )
        _print_diagnostics(ctx.diagnostics, out)
    return EXIT_OK


def _format_step_sets(atoms) -> str:
    return "{" + ", ".join(_atom_list(atoms)) + "}"


def _cmd_trace(args, out: IO[str]) -> int:
    ctx = engine.ground_context(args.kb_obj, args.depth, args.max_ground_rules)
    trace, interp = engine.iterated_fixpoint(ctx)
    if args.fmt == "structured":
        _structured(
            out,
            ka_size=len(ctx.known),
            depth=ctx.depth_bound,
            iterations=trace.outer_steps,
            interp=interp,
            ka=ctx.ka,
            diagnostics=ctx.diagnostics,
        )
        return EXIT_OK
    out.write(f"ka: {len(ctx.known)} atoms (k={ctx.depth_bound})\n")
    for outer, (adds, removes) in enumerate(
        zip(trace.optrue_steps, trace.opfalse_steps), start=1
    ):
        out.write(f"outer step {outer}:\n")
        for i, added in enumerate(adds, start=1):
            out.write(f"  optrue↑{i} += {_format_step_sets(added)}\n")
        stage = trace.interpretations[outer]
        out.write(
            f"  optrue lfp ({len(stage.true_atoms)}): "
            + _format_step_sets(stage.true_atoms)
            + "\n"
        )
        for i, removed in enumerate(removes, start=1):
            out.write(f"  opfalse↓{i} -= {_format_step_sets(removed)}\n")
        out.write(
            f"  opfalse gfp ({len(stage.false_atoms)}): "
            + _format_step_sets(stage.false_atoms)
            + "\n"
        )
    out.write(
        f"fixpoint after {trace.outer_steps} outer steps: "
        f"I_{trace.outer_steps} = I_{trace.outer_steps - 1}\n"
    )
    undefined = ctx.ka - interp.true_atoms - interp.false_atoms
    out.write(f"I_T ({len(interp.true_atoms)}): {_format_step_sets(interp.true_atoms)}\n")
    out.write(f"I_F ({len(interp.false_atoms)}): {_format_step_sets(interp.false_atoms)}\n")
    out.write(f"undefined ({len(undefined)}): {_format_step_sets(undefined)}\n")
    _print_diagnostics(ctx.diagnostics, out)
    return EXIT_OK


def _cmd_compare(args, out: IO[str], err: IO[str]) -> int:
    if not args.kb_obj.is_function_free:
        err.write(
            "compare requires a function-free KB; this one uses function "
            "symbols\n"
        )
        return EXIT_USAGE
    ctx = engine.ground_context(args.kb_obj, args.depth, args.max_ground_rules)
    trace, interp = engine.iterated_fixpoint(ctx)
    report = engine.compare_semantics(ctx)
    if args.fmt == "structured":
        _structured(
            out,
            ka_size=len(ctx.known),
            depth=ctx.depth_bound,
            iterations=trace.outer_steps,
            interp=interp,
            ka=ctx.ka,
            diagnostics=ctx.diagnostics,
            result="match" if report.matched else "mismatch",
        )
        return EXIT_OK
    if report.matched:
        p_text = _format_step_sets(interp.true_atoms)
        n_text = _format_step_sets(ctx.ka - interp.false_atoms)
        out.write(
            f"MATCH: I_T=P_ω={p_text}, ka∖I_F=N_ω={n_text}\n"
        )
    else:
        out.write("MISMATCH:\n")
        if not report.true_side_match:
            out.write(
                "  true side: only-IFP="
                + _format_step_sets(report.only_ifp_true)
                + ", only-AFP="
                + _format_step_sets(report.only_afp_true)
                + "\n"
            )
        if not report.nonfalse_side_match:
            out.write(
                "  non-false side: only-IFP="
                + _format_step_sets(report.only_ifp_nonfalse)
                + ", only-AFP="
                + _format_step_sets(report.only_afp_nonfalse)
                + "\n"
            )
    _print_diagnostics(ctx.diagnostics, out)
    return EXIT_OK


def _cmd_check_coherence(args, out: IO[str]) -> int:
    ctx = engine.ground_context(args.kb_obj, args.depth, args.max_ground_rules)
    report = oracle.check_coherence(ctx)
    trace = engine.afp_trace(ctx)
    if args.fmt == "structured":
        interp = None
        if report.partition_ok:
            interp = Interpretation(report.p_omega, ctx.ka - report.n_omega)
        _structured(
            out,
            ka_size=len(ctx.known),
            depth=ctx.depth_bound,
            iterations=trace.steps,
            interp=interp,
            ka=ctx.ka,
            diagnostics=ctx.diagnostics,
            result="coherent" if report.coherent else "incoherent",
        )
        return EXIT_OK if report.coherent else EXIT_INCOHERENT
    verdict = "coherent" if report.coherent else "incoherent"
    out.write(f"{verdict} (k={ctx.depth_bound})\n")
    out.write(f"P_ω = {_format_step_sets(report.p_omega)}\n")
    out.write(f"N_ω = {_format_step_sets(report.n_omega)}\n")
    if report.stability is not None:
        out.write(
            "stable-partition check: "
            + ("pass" if report.stability.passed else "fail")
            + "\n"
        )
    else:
        out.write("stable-partition check: skipped (ka too large)\n")
    for reason in report.reasons:
        out.write(f"reason: {reason}\n")
    _print_diagnostics(ctx.diagnostics, out)
    return EXIT_OK if report.coherent else EXIT_INCOHERENT


def _cmd_validate(args, out: IO[str]) -> int:
    warnings = validate_dl_safety(args.kb_obj)
    if args.fmt == "structured":
        _structured(
            out,
            ka_size=None,
            depth=args.depth,
            iterations=None,
            interp=None,
            diagnostics=warnings,
            result="warnings" if warnings else "ok",
        )
        return EXIT_OK
    if not warnings:
        out.write("no diagnostics\n")
    else:
        _print_diagnostics(warnings, out)
    return EXIT_OK


def main(argv=None, stdout: IO[str] = None, stderr: IO[str] = None) -> int:
    out = stdout if stdout is not None else sys.stdout
    err = stderr if stderr is not None else sys.stderr
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK

    try:
        args.kb_obj = load_kb(args.kb)
    except OSError as exc:
        err.write(f"cannot read {args.kb}: {exc}\n")
        return EXIT_ERROR
    except ParseError as exc:
        for diag in exc.diagnostics:
            err.write(f"{diag}\n")
        return EXIT_ERROR

    try:
        if args.command == "query":
            return _cmd_query(args, out)
        if args.command == "partition":
            return _cmd_partition(args, out)
        if args.command == "trace":
            return _cmd_trace(args, out)
        if args.command == "compare":
            return _cmd_compare(args, out, err)
        if args.command == "check-coherence":
            return _cmd_check_coherence(args, out)
        if args.command == "validate":
            return _cmd_validate(args, out)
        raise AssertionError(f"unhandled command {args.command}")
    except ParseError as exc:
        for diag in exc.diagnostics:
            err.write(f"{diag}\n")
        return EXIT_ERROR
    except UnknownAtomError as exc:
        err.write(f"{exc}\n")
        return EXIT_ERROR
    except GroundingLimitError as exc:
        err.write(f"{exc}\n")
        return EXIT_ERROR
    except IncoherenceError as exc:
        err.write(f"incoherent knowledge base: {exc}\n")
        return EXIT_INCOHERENT
    except KBError as exc:
        err.write(f"{exc}\n")
        return EXIT_ERROR


def console() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    console()
