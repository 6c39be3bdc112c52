import json
import logging
from pathlib import Path
from typing import Optional, Type, TypeVar

from pydantic import BaseModel, ValidationError

from app.core.errors import DocumentError, QSealError
from app.core.settings import get_data_dir
from app.models import FamiliesDocument, GrantDocument, MemoryDocument, RecordDocument
from app.services.analyzer import EncodingFamilies
from app.services.seal import CopyGrant, SealedMemory, SealRecord

logger = logging.getLogger(__name__)

DocumentT = TypeVar("DocumentT", bound=BaseModel)


class DocumentRepository:
    def __init__(self, base_dir: Optional[Path] = None):
        self.base_dir = Path(base_dir) if base_dir is not None else get_data_dir()

    def _resolve(self, path) -> Path:
        path = Path(path)
        return path if path.is_absolute() else self.base_dir / path

    def _read(self, path, model: Type[DocumentT]) -> DocumentT:
        """Чтение и валидация JSON-документа"""
        target = self._resolve(path)
        try:
            return model.model_validate_json(target.read_text(encoding="utf-8"))
        except OSError as e:
            raise DocumentError(f"не удалось прочитать {target}: {e}") from e
        except ValidationError as e:
            raise DocumentError(f"{target}: некорректный документ {model.__name__}: {e}") from e

    def _write(self, path, document: BaseModel) -> Path:
        target = self._resolve(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(document.model_dump_json(indent=2), encoding="utf-8")
        logger.info(f"Записан документ {type(document).__name__}: {target}")
        return target

    def _convert(self, path, action):
        # Инварианты предметной области проверяются уже после разбора JSON
        try:
            return action()
        except QSealError as e:
            raise DocumentError(f"{self._resolve(path)}: {e}") from e

    def load_memory(self, path) -> SealedMemory:
        document = self._read(path, MemoryDocument)
        return self._convert(path, document.to_memory)

    def save_memory(self, path, memory: SealedMemory) -> Path:
        return self._write(path, MemoryDocument.from_memory(memory))

    def load_record(self, path) -> SealRecord:
        document = self._read(path, RecordDocument)
        return self._convert(path, document.to_record)

    def save_record(self, path, record: SealRecord) -> Path:
        return self._write(path, RecordDocument.from_record(record))

    def load_grant(self, path) -> CopyGrant:
        document = self._read(path, GrantDocument)
        return self._convert(path, document.to_grant)

    def save_grant(self, path, grant: CopyGrant) -> Path:
        return self._write(path, GrantDocument.from_grant(grant))

    def load_families(self, path) -> EncodingFamilies:
        document = self._read(path, FamiliesDocument)
        return self._convert(path, document.to_families)

    def save_families(self, path, families: EncodingFamilies) -> Path:
        return self._write(path, FamiliesDocument.from_families(families))

    def load_raw(self, path) -> dict:
        target = self._resolve(path)
        try:
            data = json.loads(target.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise DocumentError(f"не удалось прочитать {target}: {e}") from e
        if not isinstance(data, dict):
            raise DocumentError(f"{target}: ожидался JSON-объект")
        return data

    def save_text(self, path, text: str) -> Path:
        target = self._resolve(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding="utf-8")
        logger.info(f"Записан отчет: {target}")
        return target
