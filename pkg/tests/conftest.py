import logging
import math

import numpy as np
import pytest

from app.repository.documents import DocumentRepository
from app.services.analyzer import protocol_families


@pytest.fixture
def rng():
    return np.random.default_rng(20050114)


@pytest.fixture
def families():
    return protocol_families()


@pytest.fixture
def repository(tmp_path):
    return DocumentRepository(tmp_path)


@pytest.fixture
def within_3sigma():
    """Проверка доли успехов в 3-сигма биномиальном интервале"""

    def check(successes: int, trials: int, p: float) -> bool:
        band = 3 * math.sqrt(p * (1 - p) / trials)
        return abs(successes / trials - p) <= band

    return check


@pytest.fixture(autouse=True)
def restore_root_logger():
    """CLI заменяет обработчики корневого логгера; возвращаем их после теста"""
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)
