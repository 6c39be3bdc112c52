class QSealError(Exception):
    """Базовая ошибка симулятора квантовой печати"""


class StateError(QSealError, ValueError):
    """Значение нарушает инвариант типа (норма, конечность, форма)"""


class DimensionError(QSealError):
    """Несовпадение размерностей"""


class EmptyFamilyError(QSealError):
    pass


class NotOrthonormalError(QSealError):
    pass


class CompletenessError(QSealError):
    """Набор проекторов не образует полное ортогональное разложение единицы"""


class NullOutcomeError(QSealError):
    """Исход с нулевой вероятностью (невозможная ветвь)"""


class EmptyMessageError(QSealError):
    pass


class RecordMismatchError(QSealError):
    """Длина записи Алисы не совпадает с памятью"""


class CopyRequestError(QSealError, IndexError):
    pass


class NotSealFormatError(QSealError):
    """Состояние триплета вне семейств кодирования протокола"""


class NotBreakableAsStatedError(QSealError):
    """Подпространства семейств не ортогональны: идеальное чтение невозможно"""


class ConfigError(QSealError):
    pass


class DocumentError(QSealError):
    """Документ не читается или имеет неверный формат"""
