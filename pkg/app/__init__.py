import argparse
import logging
from typing import List, Optional

from dotenv import load_dotenv
from pydantic import ValidationError

from app.core.errors import ConfigError, QSealError
from app.core.logging_config import configure_logging
from app.core.settings import get_log_level
from app.repository.documents import DocumentRepository
from app.routers.analysis import get_analysis_router
from app.routers.experiment import get_experiment_router
from app.routers.protocol import get_protocol_router


def create_app() -> argparse.ArgumentParser:
    load_dotenv()

    repository = DocumentRepository()

    parser = argparse.ArgumentParser(
        prog="qseal",
        description="Симулятор квантовой печати классической информации и атак на нее",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="подробный журнал (DEBUG)")
    subparsers = parser.add_subparsers(dest="command", required=True)

    # Протокол: seal, read, grant, attack, verify
    get_protocol_router(subparsers, repository)
    # Анализатор: families, analyze
    get_analysis_router(subparsers, repository)
    get_experiment_router(subparsers, repository)

    return parser


def cli_main(argv: Optional[List[str]] = None) -> int:
    parser = create_app()
    logger = logging.getLogger(__name__)
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    configure_logging(get_log_level(), verbose=args.verbose)

    try:
        return args.handler(args)
    except ConfigError as e:
        logger.error(f"Ошибка параметров: {e}")
        return 2
    except (QSealError, ValidationError, OSError) as e:
        logger.error(f"Ошибка выполнения {args.command}: {e}")
        return 1
