"""
Mixed-Choice Session Verifier — Entry Point

Subcommands over ``.mps`` programs:
- parse        validate and pretty-print
- check        type-check a session against a global type
- infer        synthesize a global type for a session
- simulate     run a session on a given trace or a seeded random schedule
- verify       model-check properties, or cross-check typing metatheory
- export-dot   dump the explored state graph
- batch        run every declared check and property over a corpus

Exit codes: 0 holds/accepted, 1 fails/rejected, 2 inconclusive, 3 usage or parse error.
"""

import sys
import json
import logging
import argparse
from pathlib import Path
from datetime import datetime
from typing import Dict, Iterable, List, Literal, Optional, Sequence

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError

# Add project root to path
PROJECT_ROOT = Path(__file__).parent.resolve()
sys.path.insert(0, str(PROJECT_ROOT))

from src.bounds import CheckBounds, ExplorationBounds
from src.config import Config
from src.corpus import batch_metrics, load_corpus, run_batch
from src.errors import MpsError, PreconditionViolation, TraceError, UsageError
from src.explorer import explore
from src.inference import STRATEGIES, infer
from src.message_queue import EMPTY_QUEUE
from src.oracles import (
    cross_check_session_fidelity,
    cross_check_subject_reduction,
    cross_check_type_progress,
    fuzz_satisfaction_preservation,
)
from src.printer import describe_session, pretty_print, pretty_print_session
from src.properties import PROPERTY_CHECKS, PropertyVerdict
from src.resolver import ResolvedProgram, load_program
from src.simulator import random_schedule, replay
from src.terms import GlobalNode, format_label, parse_trace
from src.type_checker import Status, Verdict, check, check_report

logger = logging.getLogger("main")

EXIT_OK, EXIT_FAILS, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 3

CROSS_CHECKS = ("subject-reduction", "session-fidelity", "type-progress")
PROPERTIES = tuple(PROPERTY_CHECKS) + CROSS_CHECKS + ("satisfaction-preservation",)


class RunConfig(BaseModel):
    """One validated invocation."""
    command: str
    inputs: List[Path] = Field(default_factory=list)
    global_name: Optional[str] = None
    session_name: Optional[str] = None
    max_states: int = Field(default=Config.MAX_STATES, gt=0)
    max_queue: int = Field(default=Config.MAX_QUEUE, gt=0)
    sound: bool = Config.SOUND_MODE
    strategy: Literal["satisfied-first", "full-set-only"] = Config.INFERENCE_STRATEGY
    seed: int = Config.RANDOM_SEED
    steps: int = Field(default=10, ge=0)
    count: int = Field(default=1000, gt=0)
    output_format: Literal["text", "json"] = "text"
    export_path: Optional[Path] = None

    @property
    def check_bounds(self) -> CheckBounds:
        return CheckBounds(max_visited=self.max_states, max_queue=self.max_queue)

    @property
    def exploration_bounds(self) -> ExplorationBounds:
        return ExplorationBounds(max_states=self.max_states, max_queue=self.max_queue)


# ── Logging Setup ────────────────────────────────────────────────────────────

def setup_logging(level: str, log_file: Optional[str] = None):
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file, encoding="utf-8"))
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        handlers=handlers,
    )


# ── Helpers ──────────────────────────────────────────────────────────────────

def load_inputs(paths: Sequence[Path], corpus_dir: Path) -> ResolvedProgram:
    """
    Resolve the given files (or directories) into one namespace. With no
    paths, the whole corpus directory is loaded and malformed files are skipped.
    """
    merged = ResolvedProgram()
    if not paths:
        corpus = load_corpus(corpus_dir)
        for diagnostic in corpus.diagnostics.items():
            logger.warning("Corpus file skipped: %s: %s", *diagnostic)
        programs = [corpus.programs[name] for name in sorted(corpus.programs)]
    else:
        programs = []
        for path in paths:
            if path.is_dir():
                corpus = load_corpus(path)
                if corpus.diagnostics:
                    name, message = next(iter(corpus.diagnostics.items()))
                    raise UsageError(f"{name}: {message}")
                programs.extend(corpus.programs[name] for name in sorted(corpus.programs))
            elif path.is_file():
                programs.append(load_program(path.read_text(encoding="utf-8"), source=path.name))
            else:
                raise UsageError(f"no such file or directory: {path}")

    for program in programs:
        clashes = (set(program.sessions) & set(merged.sessions)) | (set(program.globals) & set(merged.globals))
        for name in sorted(clashes):
            logger.warning("%s redeclares %r; the later declaration wins", program.source, name)
        merged.merge(program)
    return merged


def lookup_session(program: ResolvedProgram, name: Optional[str]):
    if not name:
        raise UsageError("--session is required")
    if name not in program.sessions:
        raise UsageError(f"unknown session {name!r} (known: {', '.join(sorted(program.sessions)) or 'none'})")
    return program.sessions[name]


def lookup_global(program: ResolvedProgram, name: Optional[str]) -> GlobalNode:
    if not name:
        raise UsageError("--global is required")
    if name not in program.globals:
        raise UsageError(f"unknown global type {name!r} (known: {', '.join(sorted(program.globals)) or 'none'})")
    return program.globals[name]


def exit_code_for(statuses: Iterable[str]) -> int:
    """Worst outcome wins: fails/rejected, then inconclusive."""
    statuses = list(statuses)
    if any(s in ("fails", "rejected") for s in statuses):
        return EXIT_FAILS
    if any(s == "inconclusive" for s in statuses):
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def emit(document, run: RunConfig, text: str):
    if run.output_format == "json":
        print(json.dumps(document, indent=2, ensure_ascii=False))
    else:
        print(text)


def verdict_text(verdict: Verdict) -> str:
    lines = [verdict.status.value + (f": {verdict.reason.value}" if verdict.reason else "")]
    lines.append(f"  visited {verdict.stats.visited} pairs, {verdict.stats.memo_hits} memo hits")
    if verdict.bound:
        lines.append(f"  bound hit: {verdict.bound}")
    if verdict.detail:
        lines.append(f"  {verdict.detail}")
    witness = verdict.witness
    if witness:
        lines.append(f"  at session: {witness.session}")
        lines.append(f"  global type: {witness.global_type}")
        if witness.trace:
            lines.append(f"  reached by: {', '.join(witness.trace)}")
        lines.append(f"  offered labels: {{{', '.join(witness.labels)}}}")
        lines.append("  coherent sets: " + "; ".join("{" + ", ".join(s) + "}" for s in witness.coherent_sets))
        if witness.premise:
            lines.append(f"  premise: {witness.premise}")
        lines.extend(f"  {d}" for d in witness.details)
    return "\n".join(lines)


def property_text(verdict: PropertyVerdict) -> str:
    lines = [f"{verdict.name}: {verdict.status.value}"
             f" ({verdict.coverage.states} states, {verdict.coverage.truncated} truncated)"]
    if verdict.detail:
        lines.append(f"  {verdict.detail}")
    if verdict.counterexample:
        ce = verdict.counterexample
        lines.append(f"  trace: {', '.join(ce.trace) or '(empty)'}")
        lines.append(f"  state: {ce.state}")
        lines.append(f"  obligation: {ce.obligation}")
    return "\n".join(lines)


def save_results_csv(rows: List[Dict], filepath: Path):
    """Save batch rows to CSV."""
    import pandas as pd
    if not rows:
        return
    df = pd.DataFrame(rows)
    cols = ["file", "kind", "global", "session", "status", "reason", "visited", "truncated"]
    df[[c for c in cols if c in df.columns]].to_csv(filepath, index=False, encoding="utf-8")
    logger.info("Saved %d rows to %s", len(df), filepath)


def save_metrics(metrics: Dict, filepath: Path):
    """Save batch metrics to JSON."""
    with open(filepath, "w", encoding="utf-8") as f:
        json.dump(metrics, f, indent=2, default=str)
    logger.info("Saved metrics to %s", filepath)


# ── Commands ─────────────────────────────────────────────────────────────────

def cmd_parse(run: RunConfig, program: ResolvedProgram) -> int:
    parts = [pretty_print(node, name) for name, node in sorted(program.processes.items())]
    parts += [pretty_print(node, name) for name, node in sorted(program.globals.items())]
    parts += [pretty_print_session(s, name) for name, s in sorted(program.sessions.items())]
    document = {
        "processes": sorted(program.processes),
        "globals": sorted(program.globals),
        "sessions": sorted(program.sessions),
        "checks": [list(c) for c in program.checks],
    }
    emit(document, run, "\n".join(parts).rstrip())
    return EXIT_OK


def cmd_check(run: RunConfig, program: ResolvedProgram) -> int:
    g = lookup_global(program, run.global_name)
    s = lookup_session(program, run.session_name)
    verdict = check(g, s, run.check_bounds, sound_mode=run.sound)
    logger.info("check %s %s: %s", run.global_name, run.session_name, verdict.status.value)
    emit(check_report(verdict), run, verdict_text(verdict))
    return exit_code_for([verdict.status.value])


def cmd_infer(run: RunConfig, program: ResolvedProgram) -> int:
    s = lookup_session(program, run.session_name)
    result = infer(s, run.check_bounds, run.strategy)
    if isinstance(result, GlobalNode):
        text = pretty_print(result, f"G_{run.session_name}").rstrip()
        emit({"status": Status.ACCEPTED.value, "strategy": run.strategy, "global": text}, run, text)
        return EXIT_OK
    emit(check_report(result), run, verdict_text(result))
    return exit_code_for([result.status.value])


def cmd_simulate(run: RunConfig, program: ResolvedProgram, trace_text: Optional[str], steps: Optional[int]) -> int:
    s = lookup_session(program, run.session_name)
    if trace_text is not None:
        trace = parse_trace(trace_text)
    elif steps is not None:
        trace = random_schedule(s, steps, run.seed)
    else:
        raise UsageError("simulate needs --trace or --random --steps N")
    try:
        states = replay(s, trace)
    except TraceError as e:
        print(f"trace does not replay: {e}", file=sys.stderr)
        return EXIT_FAILS
    document = {
        "trace": [format_label(label) for label in trace],
        "states": [describe_session(state) for state in states],
        "final": states[-1].is_final,
    }
    lines = [f"   {describe_session(states[0])}"]
    for label, state in zip(trace, states[1:]):
        lines.append(f"-- {format_label(label)} -->")
        lines.append(f"   {describe_session(state)}")
    lines.append(f"trace: {','.join(document['trace'])}")
    emit(document, run, "\n".join(lines))
    return EXIT_OK


def cmd_verify(run: RunConfig, program: ResolvedProgram, properties: List[str], count: int) -> int:
    verdicts: List[PropertyVerdict] = []
    session_properties = [p for p in properties if p in PROPERTY_CHECKS]
    if session_properties:
        s = lookup_session(program, run.session_name)
        graph = explore(s, run.exploration_bounds)
        verdicts.extend(PROPERTY_CHECKS[p](graph) for p in session_properties)
    for name in properties:
        if name in ("subject-reduction", "session-fidelity"):
            g = lookup_global(program, run.global_name)
            s = lookup_session(program, run.session_name)
            oracle = cross_check_subject_reduction if name == "subject-reduction" else cross_check_session_fidelity
            verdicts.append(oracle(g, s, run.check_bounds))
        elif name == "type-progress":
            g = lookup_global(program, run.global_name)
            queue = lookup_session(program, run.session_name).queue if run.session_name else EMPTY_QUEUE
            verdicts.append(cross_check_type_progress(g, queue, run.check_bounds))
        elif name == "satisfaction-preservation":
            verdicts.append(fuzz_satisfaction_preservation(run.seed, count))

    document = [v.to_document() for v in verdicts]
    emit(document if len(document) != 1 else document[0], run, "\n".join(property_text(v) for v in verdicts))
    return exit_code_for(v.status.value for v in verdicts)


def cmd_export_dot(run: RunConfig, program: ResolvedProgram) -> int:
    s = lookup_session(program, run.session_name)
    graph = explore(s, run.exploration_bounds)
    text = graph.to_json() if run.output_format == "json" else graph.to_dot()
    if run.export_path:
        run.export_path.write_text(text, encoding="utf-8")
        logger.info("Wrote %d states to %s", len(graph), run.export_path)
    else:
        print(text, end="")
    return EXIT_INCONCLUSIVE if graph.truncated else EXIT_OK


def cmd_batch(run: RunConfig, corpus_dir: Path, csv_path: Optional[Path]) -> int:
    config = Config()
    corpus = load_corpus(run.inputs[0] if run.inputs else corpus_dir)
    rows = run_batch(corpus, run.check_bounds, sound_mode=run.sound, show_progress=config.SHOW_PROGRESS)
    metrics = batch_metrics(rows, corpus)

    stamp = datetime.now().strftime("%Y%m%d_%H%M%S")
    config.OUTPUT_DIR.mkdir(parents=True, exist_ok=True)
    if csv_path is None:
        (config.OUTPUT_DIR / "csv").mkdir(parents=True, exist_ok=True)
        csv_path = config.OUTPUT_DIR / "csv" / f"batch_{stamp}.csv"
    save_results_csv(rows, csv_path)
    metrics["meta"] = {"timestamp": stamp, "csv": str(csv_path), "sound_mode": run.sound}
    save_metrics(metrics, config.OUTPUT_DIR / "batch_metrics.json")

    text = "\n".join(
        f"{row['status']:<13} {row['kind']:<19} {row['file']}: "
        + (f"{row['global']} |- {row['session']}" if row["global"] else row["session"])
        + (f"  ({row['reason']})" if row["reason"] else "")
        for row in rows
    )
    for name, message in sorted(corpus.diagnostics.items()):
        text += f"\nerror         {name}: {message}"
    emit({"rows": rows, "metrics": metrics}, run, text)
    statuses = [row["status"] for row in rows] + (["rejected"] if corpus.diagnostics else [])
    return exit_code_for(statuses)


# ── Main ─────────────────────────────────────────────────────────────────────

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("inputs", nargs="*", type=Path, help=".mps files or directories (default: the corpus)")
    common.add_argument("--corpus", type=Path, default=Config.CORPUS_DIR, help="Corpus directory used when no inputs are given")
    common.add_argument("--format", dest="output_format", choices=["text", "json"], default="text")
    common.add_argument("--max-states", type=int, default=Config.MAX_STATES, help="Bound on explored states / visited pairs")
    common.add_argument("--max-queue", type=int, default=Config.MAX_QUEUE, help="Bound on any one channel's length")
    common.add_argument("--log-file", type=str, default=None, help="Also write the log to this file")
    common.add_argument("--log-level", type=str, default=Config.LOG_LEVEL)

    parser = argparse.ArgumentParser(description="Mixed-choice multiparty session verifier")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("parse", parents=[common], help="Validate and pretty-print")

    p_check = sub.add_parser("check", parents=[common], help="Type-check a session")
    p_check.add_argument("--global", dest="global_name", required=True)
    p_check.add_argument("--session", dest="session_name", required=True)
    p_check.add_argument("--sound", action="store_true", help="Also require soundness at every step")

    p_infer = sub.add_parser("infer", parents=[common], help="Infer a global type")
    p_infer.add_argument("--session", dest="session_name", required=True)
    p_infer.add_argument("--strategy", choices=list(STRATEGIES), default=Config.INFERENCE_STRATEGY)

    p_sim = sub.add_parser("simulate", parents=[common], help="Run a session")
    p_sim.add_argument("--session", dest="session_name", required=True)
    mode = p_sim.add_mutually_exclusive_group(required=True)
    mode.add_argument("--trace", type=str, help="Comma-separated labels, e.g. c>s!req,s<c?req")
    mode.add_argument("--random", action="store_true", help="Seeded random schedule")
    p_sim.add_argument("--steps", type=int, default=10)
    p_sim.add_argument("--seed", type=int, default=Config.RANDOM_SEED)

    p_verify = sub.add_parser("verify", parents=[common], help="Model-check properties")
    p_verify.add_argument("--session", dest="session_name")
    p_verify.add_argument("--global", dest="global_name")
    p_verify.add_argument("--property", dest="properties", action="append", choices=list(PROPERTIES),
                          help="Repeatable; default: the three session properties")
    p_verify.add_argument("--seed", type=int, default=Config.RANDOM_SEED)
    p_verify.add_argument("--count", type=int, default=1000, help="Cases for satisfaction-preservation")

    p_dot = sub.add_parser("export-dot", parents=[common], help="Export the state graph")
    p_dot.add_argument("--session", dest="session_name", required=True)
    p_dot.add_argument("--output", dest="export_path", type=Path, default=None)

    p_batch = sub.add_parser("batch", parents=[common], help="Run the whole corpus")
    p_batch.add_argument("--csv", type=Path, default=None, help="Where to write the CSV summary")
    p_batch.add_argument("--sound", action="store_true")

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE

    setup_logging(args.log_level, args.log_file)

    try:
        run = RunConfig(
            command=args.command,
            inputs=args.inputs,
            global_name=getattr(args, "global_name", None),
            session_name=getattr(args, "session_name", None),
            max_states=args.max_states,
            max_queue=args.max_queue,
            sound=getattr(args, "sound", False),
            strategy=getattr(args, "strategy", Config.INFERENCE_STRATEGY),
            seed=getattr(args, "seed", Config.RANDOM_SEED),
            steps=getattr(args, "steps", 10),
            count=getattr(args, "count", 1000),
            output_format=args.output_format,
            export_path=getattr(args, "export_path", None),
        )
    except ValidationError as e:
        print(f"error: invalid arguments: {e}", file=sys.stderr)
        return EXIT_USAGE

    try:
        if run.command == "batch":
            return cmd_batch(run, args.corpus, args.csv)
        program = load_inputs(run.inputs, args.corpus)
        if run.command == "parse":
            return cmd_parse(run, program)
        if run.command == "check":
            return cmd_check(run, program)
        if run.command == "infer":
            return cmd_infer(run, program)
        if run.command == "simulate":
            return cmd_simulate(run, program, args.trace, run.steps if args.random else None)
        if run.command == "verify":
            return cmd_verify(run, program, args.properties or list(PROPERTY_CHECKS), run.count)
        if run.command == "export-dot":
            return cmd_export_dot(run, program)
    except PreconditionViolation as e:
        print(f"error: precondition not met: {e}", file=sys.stderr)
        return EXIT_USAGE
    except MpsError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
