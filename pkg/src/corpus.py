"""
Corpus — loads a directory of ``.mps`` programs and runs them in batch.

Each file is parsed and resolved on its own; a malformed file is reported
in the diagnostics and does not stop the others. Batch runs type-check the
declared (global, session) pairs and model-check every session.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from tqdm import tqdm

from .bounds import CheckBounds
from .config import Config
from .errors import MpsError
from .properties import check_properties
from .resolver import ResolvedProgram, load_program
from .session import Session
from .terms import GlobalNode
from .type_checker import check

logger = logging.getLogger(__name__)


@dataclass
class Corpus:
    """Resolved programs by file name, plus per-file diagnostics."""
    programs: Dict[str, ResolvedProgram] = field(default_factory=dict)
    diagnostics: Dict[str, str] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.programs)

    @property
    def sessions(self) -> Dict[str, Session]:
        return {name: s for program in self.programs.values() for name, s in program.sessions.items()}

    @property
    def globals(self) -> Dict[str, GlobalNode]:
        return {name: g for program in self.programs.values() for name, g in program.globals.items()}

    def declared_checks(self) -> List[Tuple[str, str, str]]:
        """
        (file, global, session) triples: ``# check G S`` pragmas, plus every
        session ``S`` with a global type named ``G_S`` in the same file.
        """
        triples = []
        for file_name, program in sorted(self.programs.items()):
            pairs = list(program.checks)
            for s_name in program.sessions:
                g_name = f"G_{s_name}"
                if g_name in program.globals and (g_name, s_name) not in pairs:
                    pairs.append((g_name, s_name))
            triples.extend((file_name, g, s) for g, s in pairs)
        return triples


def load_corpus(directory: Union[str, Path], suffix: str = Config.DSL_SUFFIX) -> Corpus:
    """Parse and resolve every ``*.mps`` file under ``directory``."""
    directory = Path(directory)
    corpus = Corpus()
    if not directory.is_dir():
        corpus.diagnostics[str(directory)] = "not a directory"
        logger.warning("Corpus directory not found: %s", directory)
        return corpus

    for path in sorted(directory.glob(f"*{suffix}")):
        try:
            corpus.programs[path.name] = load_program(path.read_text(encoding="utf-8"), source=path.name)
        except MpsError as e:
            corpus.diagnostics[path.name] = str(e)
            logger.warning("Skipping %s: %s", path.name, e)

    logger.info("Loaded %d corpus files (%d with errors)", len(corpus.programs), len(corpus.diagnostics))
    return corpus


# ═══════════════════════════════════════════════════════════════════════════
# Batch Runs
# ═══════════════════════════════════════════════════════════════════════════

def run_batch(
    corpus: Corpus,
    bounds: Optional[CheckBounds] = None,
    sound_mode: bool = False,
    show_progress: bool = Config.SHOW_PROGRESS,
) -> List[Dict]:
    """One result row per typing check and per (session, property)."""
    bounds = bounds or CheckBounds()
    rows: List[Dict] = []

    checks = corpus.declared_checks()
    for file_name, g_name, s_name in tqdm(checks, desc="typing", disable=not show_progress):
        program = corpus.programs[file_name]
        verdict = check(program.globals[g_name], program.sessions[s_name], bounds, sound_mode)
        rows.append({
            "file": file_name,
            "kind": "typing-sound" if sound_mode else "typing",
            "global": g_name,
            "session": s_name,
            "status": verdict.status.value,
            "reason": verdict.reason.value if verdict.reason else "",
            "visited": verdict.stats.visited,
            "truncated": 0,
        })

    sessions = [(f, name, s) for f, p in sorted(corpus.programs.items()) for name, s in p.sessions.items()]
    for file_name, s_name, session in tqdm(sessions, desc="properties", disable=not show_progress):
        for verdict in check_properties(session, bounds=bounds.exploration()):
            rows.append({
                "file": file_name,
                "kind": verdict.name,
                "global": "",
                "session": s_name,
                "status": verdict.status.value,
                "reason": verdict.counterexample.obligation if verdict.counterexample else "",
                "visited": verdict.coverage.states,
                "truncated": verdict.coverage.truncated,
            })
    return rows


def batch_metrics(rows: List[Dict], corpus: Optional[Corpus] = None) -> Dict:
    """Outcome counts overall and per kind."""
    by_kind: Dict[str, Counter] = {}
    for row in rows:
        by_kind.setdefault(row["kind"], Counter())[row["status"]] += 1
    metrics = {
        "total": len(rows),
        "status_distribution": dict(Counter(row["status"] for row in rows)),
        "by_kind": {kind: dict(counts) for kind, counts in sorted(by_kind.items())},
    }
    if corpus is not None:
        metrics["files"] = len(corpus.programs)
        metrics["diagnostics"] = dict(corpus.diagnostics)
    return metrics
