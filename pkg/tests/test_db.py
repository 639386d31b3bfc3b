import pytest

from talbot import db
from talbot.runtime import Runtime, close_runtime, get_runtime, init_runtime


def test_run_ledger(ledger):
    first = db.add_run("spectrum", "lambda = 0.01\n", "out")
    second = db.add_run("carpet", "lambda = 0.02\n", "out2")
    assert isinstance(first, int) and second > first
    db.finish_run(first, "ok")
    db.finish_run(second, "failed", "TruncationError: too small")

    rows = db.get_run_rows()
    assert [r["id"] for r in rows] == [second, first]
    assert rows[0]["status"] == "failed"
    assert rows[0]["message"].startswith("TruncationError")
    assert rows[1]["status"] == "ok"
    assert rows[1]["finished_at"] is not None
    assert len(db.get_run_rows(limit=1)) == 1


def test_spectrum_cache(ledger):
    assert db.lookup_spectrum(0.1, 5, 1e-9, 8) is None
    db.cache_spectrum(0.1, 5, 1e-9, 8, 64, 3e-12, [0.5, 1.5])
    db.cache_spectrum(0.1, 5, 1e-9, 8, 128, 1e-13, [0.55, 1.6])
    hit = db.lookup_spectrum(0.1, 5, 1e-9, 8)
    assert hit == {"n_max": 128, "residual": 1e-13, "energies": [0.55, 1.6]}
    assert db.lookup_spectrum(0.1, 5, 1e-10, 8) is None
    assert db.SpectrumRecord.select().count() == 1


def test_disabled_ledger_is_silent(ledger):
    db.close_db()
    assert not db.is_enabled()
    assert db.add_run("spectrum", "", "out") is None
    db.finish_run(None)
    assert db.get_run_rows() == []
    assert db.lookup_spectrum(0.1, 5, 1e-9, 8) is None


def test_runtime_map_keeps_order():
    pool = Runtime(threads=4)
    try:
        assert pool.map(lambda v: v * v, range(20)) == [v * v for v in range(20)]
    finally:
        pool.close()
    assert Runtime().map(str, [1, 2]) == ["1", "2"]
    with pytest.raises(ValueError):
        Runtime(threads=0)


def test_runtime_lifecycle(tmp_path):
    close_runtime()
    with pytest.raises(RuntimeError):
        get_runtime()
    rt = init_runtime(threads=2, db_path=str(tmp_path / "rt.db"))
    try:
        assert get_runtime() is rt
        assert db.is_enabled()
    finally:
        close_runtime()
    assert not db.is_enabled()
