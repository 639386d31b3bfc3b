"""Тексты для --help и вывода в консоль.

Значения по умолчанию берутся из RunConfig, поэтому справка не расходится с кодом.
"""

from __future__ import annotations

from talbot.config import RunConfig

_D = RunConfig()

DESCRIPTION = (
    "Волновод с квартичной ангармоничностью: спектр мод, эволюция пучка, "
    "ковры Тальбота, коллапс и возрождение ⟨x(t)⟩."
)

EPILOG = (
    "Порядок настроек: значения по умолчанию -> переменные окружения "
    "(TALBOT_OUT_DIR, TALBOT_THREADS, TALBOT_DB_PATH) -> --config -> флаги.\n"
    "Коды выхода: 0 успех, 1 selftest нашёл расхождения, 2 ошибка расчёта или настроек."
)

COMMAND_HELP = {
    "spectrum": f"первые уровни E_k(λ) на сетке λ ∈ [{_D.lambda_min:g}, {_D.lambda_max:g}] -> spectrum.csv",
    "modes": f"профили мод φ_k(x) и φ_k(θ) для k = {','.join(map(str, _D.modes))} -> modes_spatial.csv, modes_phase.csv",
    "propagate": "⟨x(t)⟩ для когерентного входа и отчёт о возрождении -> x_expect.csv, revival.txt, revivals.csv",
    "carpet": "ковёр Тальбота |ψ(x,t)|² или |φ(θ,t)|² -> CSV и PGM/PPM, по запросу полярная развёртка",
    "dispersive": "полная эволюция против модели a1·n + a2·n² -> fidelity.csv, dispersive_spectrum.csv",
    "selftest": "встроенные проверки против аналитических оракулов",
    "history": "последние запуски из журнала",
}

FLAG_HELP = {
    "lambda": f"ангармоничность λ >= 0 (по умолчанию {_D.lam:g})",
    "alpha": "амплитуда когерентного входа, например 0+4i (по умолчанию 4i)",
    "n_max": f"размер базиса Фока; 0 значит подобрать по --tol (по умолчанию {_D.n_max})",
    "tol": f"допуск сходимости уровней при n_max = 0 (по умолчанию {_D.tol:g})",
    "guard": f"страховочные уровни для x̂⁴ (по умолчанию {_D.guard})",
    "x_extent": f"полуширина сетки по x (по умолчанию {_D.x_extent:g})",
    "x_points": f"число точек по x (по умолчанию {_D.x_points})",
    "phase_points": f"число точек по θ, не меньше 2·n_max (по умолчанию {_D.phase_points})",
    "t_max": f"длина распространения (по умолчанию {_D.t_max:g})",
    "dt": f"шаг по t для рядов (по умолчанию {_D.dt:g})",
    "normalization": f"нормировка ковра: frame | global | none (по умолчанию {_D.normalization})",
    "collapse_threshold": f"порог коллапса, доля начальной амплитуды (по умолчанию {_D.collapse_threshold:g})",
    "revival_threshold": f"порог возрождения, доля начальной амплитуды (по умолчанию {_D.revival_threshold:g})",
    "levels": f"число уровней (по умолчанию {_D.levels})",
    "lambda_min": f"начало сетки λ (по умолчанию {_D.lambda_min:g})",
    "lambda_max": f"конец сетки λ (по умолчанию {_D.lambda_max:g})",
    "lambda_points": f"число точек сетки λ (по умолчанию {_D.lambda_points})",
    "modes": "номера мод через запятую",
    "domain": f"spatial | phase (по умолчанию {_D.domain})",
    "colormap": f"gray (PGM, 16 бит) | viridis (PPM, 8 бит) (по умолчанию {_D.colormap})",
    "polar": "дополнительно полярная развёртка фазового ковра",
    "polar_size": f"сторона полярного растра в пикселях (по умолчанию {_D.polar_size})",
    "carpet_points": f"число строк ковра на [0, t_max], 0: строки с шагом --dt (по умолчанию {_D.carpet_points})",
    "windows": "дополнительно три окна: начало, T_rev/2 и T_rev",
    "window_width": f"ширина окна по t (по умолчанию {_D.window_width:g})",
}

GLOBAL_HELP = {
    "config": "файл настроек `key = value`",
    "out": f"каталог результатов (по умолчанию {_D.out_dir})",
    "seed": "зерно генератора для случайных проверок selftest",
    "threads": f"число потоков для параллельных участков (по умолчанию {_D.threads})",
    "db": f"журнал запусков SQLite; пустая строка отключает (по умолчанию {_D.db_path})",
    "verbose": "подробный лог (DEBUG)",
}

HISTORY_EMPTY = "Журнал пуст (или отключён через --db '')."
SELFTEST_OK = "selftest: все проверки пройдены"
SELFTEST_FAILED = "selftest: провалено {failed} из {total}"
