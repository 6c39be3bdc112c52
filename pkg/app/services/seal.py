"""Протокол квантовой печати: запечатывание, честное чтение, проверки Алисы и Бобов."""
import logging
import threading
from contextlib import contextmanager
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from app.core.errors import (
    CopyRequestError,
    DimensionError,
    EmptyMessageError,
    RecordMismatchError,
    StateError,
)
from app.services.qla import (
    Operator,
    RandomStream,
    StateVector,
    born_sample,
    embed_qubit_operator,
    exchange_operator,
    identity,
    projector_onto,
    qubit_swap_operator,
    schmidt_factor,
    tensor,
    tensor_all,
)

logger = logging.getLogger(__name__)

TRIPLET_QUBITS = 3
TRIPLET_DIM = 2 ** TRIPLET_QUBITS

_SQRT2_INV = 1 / np.sqrt(2)

# Три взаимно несмещенных базиса кубита: z, x, y
SINGLE_QUBIT_BASES: Dict[str, StateVector] = {
    "0": StateVector(np.array([1, 0])),
    "1": StateVector(np.array([0, 1])),
    "0_x": StateVector(np.array([1, 1]) * _SQRT2_INV),
    "1_x": StateVector(np.array([1, -1]) * _SQRT2_INV),
    "0_y": StateVector(np.array([1, 1j]) * _SQRT2_INV),
    "1_y": StateVector(np.array([1, -1j]) * _SQRT2_INV),
}


class Basis(str, Enum):
    X = "X"
    Y = "Y"


@dataclass(frozen=True)
class ControlState:
    basis: Basis
    bit: int

    def __post_init__(self):
        object.__setattr__(self, "basis", Basis(self.basis))
        if self.bit not in (0, 1):
            raise StateError(f"бит контрольного состояния {self.bit!r}")

    @property
    def label(self) -> str:
        return f"{self.bit}_{self.basis.value.lower()}"

    def vector(self) -> StateVector:
        return SINGLE_QUBIT_BASES[self.label]


CONTROL_STATES: Tuple[ControlState, ...] = tuple(
    ControlState(basis, bit) for basis in Basis for bit in (0, 1)
)


@dataclass(frozen=True)
class TripletRecord:
    message_bit: int
    control_position: int
    control_state: ControlState

    def __post_init__(self):
        if self.message_bit not in (0, 1):
            raise StateError(f"бит сообщения {self.message_bit!r}")
        if not 0 <= self.control_position < TRIPLET_QUBITS:
            raise StateError(f"позиция контрольного кубита {self.control_position!r}")

    def qubit_state(self, position: int) -> StateVector:
        """Состояние, в котором Алиса приготовила кубит position"""
        if position == self.control_position:
            return self.control_state.vector()
        return SINGLE_QUBIT_BASES[str(self.message_bit)]

    def state(self) -> StateVector:
        return triplet_state(self.message_bit, self.control_position, self.control_state)


@dataclass(frozen=True)
class SealRecord:
    """Секрет Алисы: бит, позиция и состояние контрольного кубита для каждого триплета"""
    triplets: Tuple[TripletRecord, ...]

    def __post_init__(self):
        object.__setattr__(self, "triplets", tuple(self.triplets))

    def __len__(self) -> int:
        return len(self.triplets)

    @property
    def bits(self) -> List[int]:
        return [t.message_bit for t in self.triplets]


class SealedMemory:
    """Публичная квантовая память: по одному 8-мерному вектору на триплет.

    Изменяется только измерениями; измерения берут эксклюзивный доступ.
    """

    def __init__(self, triplets: Iterable[StateVector]):
        self._triplets: List[StateVector] = []
        for state in triplets:
            self._triplets.append(self._checked(state))
        self._lock = threading.RLock()

    @staticmethod
    def _checked(state: StateVector) -> StateVector:
        if state.dim != TRIPLET_DIM:
            raise DimensionError(f"состояние триплета размерности {state.dim}, ожидалось {TRIPLET_DIM}")
        return state

    def __len__(self) -> int:
        return len(self._triplets)

    def __getitem__(self, index: int) -> StateVector:
        return self._triplets[index]

    def __iter__(self) -> Iterator[StateVector]:
        return iter(list(self._triplets))

    def snapshot(self) -> Tuple[StateVector, ...]:
        with self._lock:
            return tuple(self._triplets)

    @contextmanager
    def exclusive(self):
        with self._lock:
            yield self

    def replace(self, index: int, state: StateVector) -> None:
        with self._lock:
            self._triplets[index] = self._checked(state)


@dataclass(frozen=True)
class CopyEntry:
    triplet_index: int
    qubit_position: int
    copy: StateVector


@dataclass(frozen=True)
class CopyGrant:
    """Копии кубитов для Боба: позиции и сами состояния, без их описания"""
    entries: Tuple[CopyEntry, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))


@dataclass(frozen=True)
class DetectionReport:
    per_triplet: Tuple[bool, ...]

    def __post_init__(self):
        object.__setattr__(self, "per_triplet", tuple(bool(f) for f in self.per_triplet))

    @property
    def detected(self) -> bool:
        return any(self.per_triplet)

    @property
    def flagged(self) -> List[int]:
        return [i for i, flag in enumerate(self.per_triplet) if flag]


@dataclass(frozen=True)
class SwapTestResult:
    passed: bool
    joint: StateVector
    post_a: Optional[StateVector]
    post_b: Optional[StateVector]


def triplet_state(message_bit: int, control_position: int, control_state: ControlState) -> StateVector:
    message = SINGLE_QUBIT_BASES[str(message_bit)]
    qubits = [control_state.vector() if k == control_position else message
              for k in range(TRIPLET_QUBITS)]
    return tensor_all(*qubits)


def triplet_family(bit: int) -> List[StateVector]:
    """12 состояний, кодирующих бит: 3 позиции x 4 контрольных состояния"""
    return [triplet_state(bit, position, control)
            for position in range(TRIPLET_QUBITS) for control in CONTROL_STATES]


def seal_message(bits: Sequence[int], rng: RandomStream) -> Tuple[SealedMemory, SealRecord]:
    if len(bits) == 0:
        raise EmptyMessageError("пустое сообщение")
    records = []
    for bit in bits:
        if bit not in (0, 1):
            raise StateError(f"бит сообщения {bit!r}")
        position = int(rng.integers(TRIPLET_QUBITS))
        control = CONTROL_STATES[int(rng.integers(len(CONTROL_STATES)))]
        records.append(TripletRecord(int(bit), position, control))
    memory = SealedMemory(r.state() for r in records)
    logger.debug(f"Запечатано сообщение из {len(records)} бит")
    return memory, SealRecord(tuple(records))


@lru_cache(maxsize=None)
def _z_projectors(position: int) -> Tuple[Operator, Operator]:
    zero = projector_onto([SINGLE_QUBIT_BASES["0"]])
    one = projector_onto([SINGLE_QUBIT_BASES["1"]])
    return (embed_qubit_operator(zero, position, TRIPLET_QUBITS),
            embed_qubit_operator(one, position, TRIPLET_QUBITS))


def _control_projectors(record: TripletRecord) -> Tuple[Operator, Operator]:
    match = projector_onto([record.control_state.vector()])
    miss = Operator(np.eye(2) - match.matrix)
    return (embed_qubit_operator(match, record.control_position, TRIPLET_QUBITS),
            embed_qubit_operator(miss, record.control_position, TRIPLET_QUBITS))


def read_triplet(state: StateVector, rng: RandomStream) -> Tuple[int, StateVector]:
    """z-измерение каждого кубита и голосование большинством"""
    outcomes = []
    for position in range(TRIPLET_QUBITS):
        outcome, state = born_sample(state, _z_projectors(position), rng)
        outcomes.append(outcome)
    logger.debug(f"Результат z-измерения триплета: {''.join(map(str, outcomes))}")
    return int(sum(outcomes) >= 2), state


def honest_read(memory: SealedMemory, rng: RandomStream) -> List[int]:
    bits = []
    with memory.exclusive():
        for index, state in enumerate(memory.snapshot()):
            bit, post = read_triplet(state, rng)
            memory.replace(index, post)
            bits.append(bit)
    logger.debug(f"Честное чтение: {len(bits)} бит")
    return bits


def alice_check(memory: SealedMemory, record: SealRecord, rng: RandomStream) -> DetectionReport:
    """Измерение контрольных кубитов в базисах приготовления"""
    if len(memory) != len(record):
        raise RecordMismatchError(f"память из {len(memory)} триплетов, запись из {len(record)}")
    flags = []
    with memory.exclusive():
        for index, triplet in enumerate(record.triplets):
            outcome, post = born_sample(memory[index], _control_projectors(triplet), rng)
            memory.replace(index, post)
            flags.append(outcome == 1)
    report = DetectionReport(tuple(flags))
    if report.detected:
        logger.debug(f"Алиса обнаружила вскрытие в триплетах {report.flagged}")
    else:
        logger.debug("Проверка Алисы: печать цела")
    return report


def distribute_copies(record: SealRecord, requests: Sequence[Tuple[int, int]]) -> CopyGrant:
    entries = []
    for triplet_index, qubit_position in requests:
        if not 0 <= triplet_index < len(record):
            raise CopyRequestError(f"триплет {triplet_index} вне сообщения из {len(record)}")
        if not 0 <= qubit_position < TRIPLET_QUBITS:
            raise CopyRequestError(f"позиция кубита {qubit_position} вне триплета")
        copy = record.triplets[triplet_index].qubit_state(qubit_position)
        entries.append(CopyEntry(triplet_index, qubit_position, copy))
    return CopyGrant(tuple(entries))


def control_requests(record: SealRecord) -> List[Tuple[int, int]]:
    return [(index, t.control_position) for index, t in enumerate(record.triplets)]


def _symmetric_projectors(swap: Operator) -> Tuple[Operator, Operator]:
    eye = np.eye(swap.dim)
    return Operator((eye + swap.matrix) / 2), Operator((eye - swap.matrix) / 2)


def swap_test(a: StateVector, b: StateVector, rng: RandomStream) -> SwapTestResult:
    """SWAP-тест как измерение Людерса на симметричном/антисимметричном подпространствах.

    Вероятность прохождения (1 + |<a|b>|^2) / 2. Если постсостояние пары
    остается произведением, post_a и post_b - его множители, иначе None.
    """
    if a.dim != b.dim:
        raise DimensionError(f"SWAP-тест для размерностей {a.dim} и {b.dim}")
    outcome, joint = born_sample(tensor(a, b), _symmetric_projectors(exchange_operator(a.dim)), rng)
    factors = schmidt_factor(joint, a.dim, b.dim)
    post_a, post_b = factors if factors is not None else (None, None)
    return SwapTestResult(outcome == 0, joint, post_a, post_b)


@lru_cache(maxsize=None)
def _borrowed_projectors(position: int) -> Tuple[Operator, Operator]:
    # Кубит 3 - копия Боба, присоединенная справа к триплету
    return _symmetric_projectors(qubit_swap_operator(TRIPLET_QUBITS + 1, position, TRIPLET_QUBITS))


def _return_borrowed(joint: StateVector, rng: RandomStream) -> Tuple[StateVector, StateVector]:
    factors = schmidt_factor(joint, TRIPLET_DIM, 2)
    if factors is not None:
        return factors
    # Запутанное постсостояние: Боб сбрасывает копию z-измерением
    zero = projector_onto([SINGLE_QUBIT_BASES["0"]])
    discard = (Operator(np.kron(identity(TRIPLET_DIM).matrix, zero.matrix)),
               Operator(np.kron(identity(TRIPLET_DIM).matrix, np.eye(2) - zero.matrix)))
    outcome, collapsed = born_sample(joint, discard, rng)
    triplet, _ = schmidt_factor(collapsed, TRIPLET_DIM, 2)
    return triplet, SINGLE_QUBIT_BASES[str(outcome)]


def bob_check(memory: SealedMemory, grant: CopyGrant,
              rng: RandomStream) -> Tuple[DetectionReport, CopyGrant]:
    """SWAP-тест каждой выданной копии с одолженным кубитом памяти.

    Возвращает отчет по триплетам и грант с копиями после теста.
    """
    flags = [False] * len(memory)
    refreshed = []
    with memory.exclusive():
        for entry in grant.entries:
            if not 0 <= entry.triplet_index < len(memory):
                raise CopyRequestError(f"триплет {entry.triplet_index} вне памяти из {len(memory)}")
            joint = tensor(memory[entry.triplet_index], entry.copy)
            outcome, post = born_sample(joint, _borrowed_projectors(entry.qubit_position), rng)
            triplet, copy = _return_borrowed(post, rng)
            memory.replace(entry.triplet_index, triplet)
            refreshed.append(CopyEntry(entry.triplet_index, entry.qubit_position, copy))
            if outcome == 1:
                flags[entry.triplet_index] = True
    report = DetectionReport(tuple(flags))
    if report.detected:
        logger.debug(f"Боб обнаружил вскрытие в триплетах {report.flagged}")
    else:
        logger.debug(f"Проверка Боба: {len(grant.entries)} SWAP-тестов пройдено")
    return report, CopyGrant(tuple(refreshed))
