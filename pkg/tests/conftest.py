from __future__ import annotations

import numpy as np
import pytest

from talbot import db
from talbot.physics import TruncationSpec, build_hamiltonian, build_position, coherent_state, diagonalize


def decompose(lam: float, n_max: int, guard: int = 8):
    return diagonalize(build_hamiltonian(TruncationSpec(n_max, guard), lam), lam, guard=guard)


@pytest.fixture(scope="session")
def harmonic64():
    return decompose(0.0, 64)


@pytest.fixture(scope="session")
def weak128():
    """λ = 0.01, n_max = 128: рабочая точка коллапса и возрождения."""
    return decompose(0.01, 128)


@pytest.fixture(scope="session")
def beam64():
    return coherent_state(4j, 64)


@pytest.fixture(scope="session")
def beam128():
    return coherent_state(4j, 128)


@pytest.fixture(scope="session")
def x128():
    return build_position(TruncationSpec(128))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def ledger(tmp_path):
    database = db.init_db(str(tmp_path / "runs.db"))
    yield database
    db.close_db()


@pytest.fixture
def cli(tmp_path):
    """Запуск main() с каталогом результатов в tmp_path и без журнала."""
    from main import main

    def run(*args: str, out: str = "out", db_path: str = "") -> int:
        return main(["--out", str(tmp_path / out), "--db", db_path, *args])

    return run
