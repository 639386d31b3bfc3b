import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from talbot.config import load_config
from talbot.handlers import build_parser, dispatch, overrides_from_args
from talbot.physics import ConfigurationError, SimulationError
from talbot.runtime import close_runtime, init_runtime

log = logging.getLogger("talbot")


def setup_logging(verbose: bool = False) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="[%(levelname)s] %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def read_config_text(path: Optional[str]) -> Optional[str]:
    if not path:
        return None
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise ConfigurationError(f"cannot read config {path}: {e}") from e


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    setup_logging(ns.verbose)

    try:
        cfg = load_config(read_config_text(ns.config), overrides_from_args(ns))
        # Инициализация
        runtime = init_runtime(threads=cfg.threads, db_path=cfg.db_path)
        try:
            return dispatch(ns.command, cfg, runtime)
        finally:
            close_runtime()
    except SimulationError as e:
        log.error("%s: %s", type(e).__name__, e)
        return 2


if __name__ == "__main__":
    sys.exit(main())
