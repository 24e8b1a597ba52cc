"""Quick verification script for the project."""
import ast
import pathlib
import sys

def check_syntax():
    """Check all Python files parse correctly."""
    files = (
        list(pathlib.Path("src").glob("*.py"))
        + list(pathlib.Path("tests").glob("*.py"))
        + [pathlib.Path("main.py")]
    )
    ok = True
    for f in sorted(files):
        try:
            ast.parse(f.read_text(encoding="utf-8"))
            print(f"  OK: {f}")
        except SyntaxError as e:
            print(f"  FAIL: {f} -> {e}")
            ok = False
    return ok

def check_corpus():
    """Check every corpus file parses and resolves."""
    sys.path.insert(0, ".")
    from src.config import Config
    from src.corpus import load_corpus

    corpus = load_corpus(Config.CORPUS_DIR)
    print(f"  Loaded {len(corpus)} files: {len(corpus.sessions)} sessions, {len(corpus.globals)} global types")
    for name, message in sorted(corpus.diagnostics.items()):
        print(f"  FAIL: {name} -> {message}")
    print(f"  Declared checks: {len(corpus.declared_checks())}")
    return not corpus.diagnostics

def check_example_typing():
    """Type-check the client/server example and infer its type."""
    sys.path.insert(0, ".")
    from src.config import Config
    from src.corpus import load_corpus
    from src.inference import infer
    from src.printer import pretty_print
    from src.type_checker import check

    corpus = load_corpus(Config.CORPUS_DIR)
    program = corpus.programs["client_server.mps"]
    verdict = check(program.globals["G_cs"], program.sessions["CS"])
    print(f"  G_cs |- CS: {verdict.status.value}")
    inferred = infer(program.sessions["CS"])
    if hasattr(inferred, "status"):
        print(f"  infer CS: {inferred.status.value}")
        return False
    print("  infer CS:")
    print("    " + pretty_print(inferred, "G").strip())
    return verdict.accepted

if __name__ == "__main__":
    print("\n=== Syntax Check ===")
    ok1 = check_syntax()

    print("\n=== Corpus Check ===")
    try:
        ok2 = check_corpus()
    except Exception as e:
        print(f"  Import error: {e}")
        ok2 = False

    print("\n=== Typing Check ===")
    try:
        ok3 = check_example_typing()
    except Exception as e:
        print(f"  Error: {e}")
        ok3 = False

    print("\n=== Result ===")
    all_ok = ok1 and ok2 and ok3
    if all_ok:
        print("  ALL CHECKS PASSED")
    else:
        print(f"  syntax={ok1}, corpus={ok2}, typing={ok3}")
