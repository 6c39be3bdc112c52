from typing import Annotated, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from app.core.errors import ConfigError
from app.services.analyzer import DiscriminationMeasurement, EncodingFamilies, SubspaceDecomposition
from app.services.qla import StateVector
from app.services.seal import (
    ControlState,
    CopyEntry,
    CopyGrant,
    SealedMemory,
    SealRecord,
    TripletRecord,
)

FiniteFloat = Annotated[float, Field(allow_inf_nan=False)]
Amplitude = Tuple[FiniteFloat, FiniteFloat]
Matrix = List[List[Amplitude]]


def to_pairs(values: np.ndarray) -> List[Amplitude]:
    """Комплексные амплитуды в пары [re, im]"""
    return [(float(z.real), float(z.imag)) for z in np.asarray(values).ravel()]


def from_pairs(pairs: List[Amplitude]) -> np.ndarray:
    return np.array([complex(re, im) for re, im in pairs], dtype=np.complex128)


def to_matrix(matrix: np.ndarray) -> Matrix:
    return [to_pairs(row) for row in np.asarray(matrix)]


# Документы протокола
class TripletStateDTO(BaseModel):
    amps: List[Amplitude] = Field(..., min_length=8, max_length=8)


class MemoryDocument(BaseModel):
    """Публичная квантовая память"""
    triplets: List[TripletStateDTO]

    @classmethod
    def from_memory(cls, memory: SealedMemory) -> "MemoryDocument":
        return cls(triplets=[TripletStateDTO(amps=to_pairs(s.amps)) for s in memory.snapshot()])

    def to_memory(self) -> SealedMemory:
        return SealedMemory(StateVector(from_pairs(t.amps)) for t in self.triplets)


class ControlStateDTO(BaseModel):
    basis: Literal["X", "Y"]
    bit: Literal[0, 1]


class TripletRecordDTO(BaseModel):
    message_bit: Literal[0, 1]
    control_position: int = Field(..., ge=0, le=2)
    control_state: ControlStateDTO


class RecordDocument(BaseModel):
    """Секретная запись Алисы"""
    triplets: List[TripletRecordDTO] = Field(..., min_length=1)

    @classmethod
    def from_record(cls, record: SealRecord) -> "RecordDocument":
        return cls(triplets=[
            TripletRecordDTO(
                message_bit=t.message_bit,
                control_position=t.control_position,
                control_state=ControlStateDTO(basis=t.control_state.basis.value, bit=t.control_state.bit),
            )
            for t in record.triplets
        ])

    def to_record(self) -> SealRecord:
        return SealRecord(tuple(
            TripletRecord(
                t.message_bit,
                t.control_position,
                ControlState(t.control_state.basis, t.control_state.bit),
            )
            for t in self.triplets
        ))


class CopyEntryDTO(BaseModel):
    triplet_index: int = Field(..., ge=0)
    qubit_position: int = Field(..., ge=0, le=2)
    amps: List[Amplitude] = Field(..., min_length=2, max_length=2)


class GrantDocument(BaseModel):
    """Копии кубитов для Боба (без описания состояний)"""
    entries: List[CopyEntryDTO]

    @classmethod
    def from_grant(cls, grant: CopyGrant) -> "GrantDocument":
        return cls(entries=[
            CopyEntryDTO(triplet_index=e.triplet_index, qubit_position=e.qubit_position,
                         amps=to_pairs(e.copy.amps))
            for e in grant.entries
        ])

    def to_grant(self) -> CopyGrant:
        return CopyGrant(tuple(
            CopyEntry(e.triplet_index, e.qubit_position, StateVector(from_pairs(e.amps)))
            for e in self.entries
        ))


# Документы анализатора
class FamiliesDocument(BaseModel):
    dim: int = Field(..., ge=1)
    family0: List[List[Amplitude]] = Field(..., min_length=1)
    family1: List[List[Amplitude]] = Field(..., min_length=1)

    @classmethod
    def from_families(cls, families: EncodingFamilies) -> "FamiliesDocument":
        return cls(
            dim=families.dim,
            family0=[to_pairs(s.amps) for s in families.family0],
            family1=[to_pairs(s.amps) for s in families.family1],
        )

    def to_families(self) -> EncodingFamilies:
        return EncodingFamilies(
            dim=self.dim,
            family0=tuple(StateVector(from_pairs(s)) for s in self.family0),
            family1=tuple(StateVector(from_pairs(s)) for s in self.family1),
        )


class DecompositionDTO(BaseModel):
    dim: int
    dim0: int
    dim1: int
    max_cross_overlap: float
    principal_cosine: float
    certified: bool
    basis0: List[List[Amplitude]]
    basis1: List[List[Amplitude]]

    @classmethod
    def from_decomposition(cls, decomposition: SubspaceDecomposition) -> "DecompositionDTO":
        return cls(
            dim=decomposition.dim,
            dim0=len(decomposition.basis0),
            dim1=len(decomposition.basis1),
            max_cross_overlap=decomposition.max_cross_overlap,
            principal_cosine=decomposition.principal_cosine,
            certified=decomposition.certified,
            basis0=[to_pairs(e.amps) for e in decomposition.basis0],
            basis1=[to_pairs(e.amps) for e in decomposition.basis1],
        )


class MeasurementDTO(BaseModel):
    ambient_dim: int
    sector_dim: int
    padded_dim: int
    residual_dim: int
    logical_index: str
    p0: Matrix
    p1: Matrix
    embedding: Matrix
    injection: Matrix
    support_violation: float
    embedding_violation: float
    embedding_valid: bool
    min_family_fidelity: float
    readings: List[int]

    @classmethod
    def from_measurement(cls, measurement: DiscriminationMeasurement, **certificates) -> "MeasurementDTO":
        return cls(
            ambient_dim=measurement.ambient_dim,
            sector_dim=measurement.sector_dim,
            padded_dim=measurement.padded_dim,
            residual_dim=measurement.residual_dim,
            logical_index=measurement.logical_index,
            p0=to_matrix(measurement.p0.matrix),
            p1=to_matrix(measurement.p1.matrix),
            embedding=to_matrix(measurement.embedding.matrix),
            injection=to_matrix(measurement.injection),
            **certificates,
        )


class AnalysisReport(BaseModel):
    readable: bool
    decomposition: DecompositionDTO
    measurement: Optional[MeasurementDTO] = None
    reason: Optional[str] = None


# Эксперименты
class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scenario: Literal["honest_read", "single_qubit_attack", "collective_attack",
                      "swap_test_suite", "analyzer_demo"]
    message_bits: int = Field(1, ge=1)
    trials: int = Field(1, ge=1)
    seed: int = Field(0, ge=0, le=2 ** 64 - 1)
    output_format: Literal["json", "csv"] = "json"
    records: bool = False


def load_config(data: dict) -> ExperimentConfig:
    """Валидация конфигурации с сообщениями по полям"""
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in e.errors()
        )
        raise ConfigError(f"некорректная конфигурация: {problems}") from e


class TrialRecord(BaseModel):
    scenario: str
    trial: int
    bits_sealed: str
    bits_read: str
    detected: bool
    mean_fidelity: float
    bob_detected: Optional[bool] = None


class ExperimentReport(BaseModel):
    scenario: str
    trials: int
    message_bits: int
    seed: int
    bit_accuracy: float = Field(..., ge=0.0, le=1.0)
    bit_accuracy_3sigma: float
    detection_rate: float = Field(..., ge=0.0, le=1.0)
    detection_rate_3sigma: float
    mean_fidelity: float
    bob_detection_rate: Optional[float] = None
    records: Optional[List[TrialRecord]] = None
    wall_time: float
