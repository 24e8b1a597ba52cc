from src.bounds import CheckBounds
from src.corpus import batch_metrics, load_corpus, run_batch


def test_shipped_corpus_loads(corpus):
    assert corpus.diagnostics == {}
    assert set(corpus.programs) >= {
        "asynchrony.mps",
        "client_server.mps",
        "client_server_workers.mps",
        "counterexamples.mps",
        "time_out.mps",
        "weight.mps",
    }
    assert {"CS", "Workers", "TimeOut", "Stuck", "Orphan"} <= set(corpus.sessions)


def test_declared_checks(corpus):
    checks = corpus.declared_checks()
    assert ("client_server.mps", "G_cs", "CS") in checks
    assert ("time_out.mps", "G_timeout_displayed", "TimeOut") in checks
    # naming convention: G_<session>
    assert ("asynchrony.mps", "G_Exchange", "Exchange") in checks
    assert len(checks) == len(set(checks))


def test_malformed_file_is_reported(tmp_path):
    (tmp_path / "good.mps").write_text("session S = p :: q!l . end || q :: p?l . end with []")
    (tmp_path / "bad.mps").write_text("session S = p :: q!l end with []")
    corpus = load_corpus(tmp_path)
    assert set(corpus.programs) == {"good.mps"}
    assert "bad.mps" in corpus.diagnostics


def test_missing_directory(tmp_path):
    corpus = load_corpus(tmp_path / "absent")
    assert len(corpus) == 0
    assert corpus.diagnostics


def test_batch_rows_and_metrics(tmp_path):
    (tmp_path / "ping.mps").write_text(
        "# check G S\n"
        "global G = p q ! l . q p ? l . End\n"
        "session S = p :: q!l . end || q :: p?l . end with []\n"
    )
    corpus = load_corpus(tmp_path)
    rows = run_batch(corpus, CheckBounds(max_visited=100, max_queue=2), show_progress=False)
    assert [row["kind"] for row in rows] == ["typing", "lock-freedom", "orphan-freedom", "eventual-reception"]
    assert all(row["status"] in ("accepted", "holds") for row in rows)

    metrics = batch_metrics(rows, corpus)
    assert metrics["total"] == 4
    assert metrics["status_distribution"] == {"accepted": 1, "holds": 3}
    assert metrics["files"] == 1
