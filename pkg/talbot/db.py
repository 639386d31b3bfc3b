from __future__ import annotations

import json
from datetime import datetime, timezone
from typing import Optional

from peewee import (
    AutoField,
    DatabaseProxy,
    DateTimeField,
    FloatField,
    IntegerField,
    Model,
    SqliteDatabase,
    TextField,
)

db_proxy: DatabaseProxy = DatabaseProxy()


def utcnow() -> datetime:
    return datetime.now(timezone.utc)


class BaseModel(Model):
    class Meta:
        database = db_proxy


class RunRecord(BaseModel):
    id = AutoField()
    command = TextField()  # spectrum, carpet, propagate, ...
    config = TextField()  # RunConfig.to_text()
    out_dir = TextField()
    status = TextField(default="running")  # running | ok | failed
    message = TextField(null=True)
    created_at = DateTimeField(default=utcnow)
    finished_at = DateTimeField(null=True)

    class Meta:
        indexes = ((("created_at",), False),)


class SpectrumRecord(BaseModel):
    """Сошедшийся размер базиса для (λ, k_max, tol, guard)."""

    id = AutoField()
    lam = FloatField()
    k_max = IntegerField()
    tol = FloatField()
    guard = IntegerField()
    n_max = IntegerField()
    residual = FloatField()
    energies = TextField()  # JSON, первые k_max + 1 уровней
    created_at = DateTimeField(default=utcnow)

    class Meta:
        indexes = ((("lam", "k_max", "tol", "guard"), True),)


def init_db(db_path: str) -> SqliteDatabase:
    db = SqliteDatabase(
        db_path,
        pragmas={
            "foreign_keys": 1,
            "journal_mode": "wal",
        },
        check_same_thread=False,
    )
    db_proxy.initialize(db)
    db.connect(reuse_if_open=True)
    db.create_tables([RunRecord, SpectrumRecord])
    return db


def close_db() -> None:
    db = db_proxy.obj
    if db and not db.is_closed():
        db.close()


def is_enabled() -> bool:
    db = db_proxy.obj
    return bool(db) and not db.is_closed()


def add_run(command: str, config: str, out_dir: str) -> Optional[int]:
    if not is_enabled():
        return None
    return RunRecord.create(command=command, config=config, out_dir=out_dir, created_at=utcnow()).id


def finish_run(run_id: Optional[int], status: str = "ok", message: Optional[str] = None) -> None:
    if run_id is None or not is_enabled():
        return
    RunRecord.update(status=status, message=message, finished_at=utcnow()).where(RunRecord.id == run_id).execute()


def get_run_rows(limit: int = 10) -> list[dict]:
    if not is_enabled():
        return []

    items = RunRecord.select().order_by(RunRecord.created_at.desc(), RunRecord.id.desc()).limit(limit)

    out: list[dict] = []
    for it in items:
        out.append(
            {
                "id": it.id,
                "command": it.command,
                "out_dir": it.out_dir,
                "status": it.status,
                "message": it.message,
                "created_at": it.created_at,
                "finished_at": it.finished_at,
            }
        )
    return out


def cache_spectrum(
    lam: float, k_max: int, tol: float, guard: int, n_max: int, residual: float, energies
) -> None:
    if not is_enabled():
        return
    SpectrumRecord.insert(
        lam=float(lam),
        k_max=int(k_max),
        tol=float(tol),
        guard=int(guard),
        n_max=int(n_max),
        residual=float(residual),
        energies=json.dumps([float(e) for e in energies]),
        created_at=utcnow(),
    ).on_conflict_replace().execute()


def lookup_spectrum(lam: float, k_max: int, tol: float, guard: int) -> Optional[dict]:
    """Только размер базиса: спектр всё равно пересчитывается при этом n_max."""
    if not is_enabled():
        return None
    rec = SpectrumRecord.get_or_none(
        (SpectrumRecord.lam == float(lam))
        & (SpectrumRecord.k_max == int(k_max))
        & (SpectrumRecord.tol == float(tol))
        & (SpectrumRecord.guard == int(guard))
    )
    if not rec:
        return None
    return {"n_max": rec.n_max, "residual": rec.residual, "energies": json.loads(rec.energies)}
