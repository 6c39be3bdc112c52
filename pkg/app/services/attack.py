import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Sequence, Tuple

from app.core.errors import NotSealFormatError, RecordMismatchError, StateError
from app.services.qla import (
    EXACT_TOL,
    NULL_PROBABILITY,
    Operator,
    RandomStream,
    StateVector,
    basis_state,
    fidelity,
    outcome_probabilities,
    projector_onto,
)
from app.services.seal import SealedMemory, read_triplet

logger = logging.getLogger(__name__)

ZERO_SECTOR = ("000", "001", "010", "100")
ONE_SECTOR = ("111", "110", "101", "011")


@dataclass(frozen=True)
class AttackOutcome:
    bits: Tuple[int, ...]
    per_triplet_fidelity: Tuple[float, ...]

    def __post_init__(self):
        if len(self.bits) != len(self.per_triplet_fidelity):
            raise StateError("число бит не совпадает с числом триплетов")
        for value in self.per_triplet_fidelity:
            if not -EXACT_TOL <= value <= 1 + EXACT_TOL:
                raise StateError(f"точность {value!r} вне [0, 1]")


@lru_cache(maxsize=None)
def collective_projectors() -> Tuple[Operator, Operator]:
    """P0 на веса Хэмминга 0-1 и P1 на веса 2-3"""
    return (projector_onto([basis_state(s) for s in ZERO_SECTOR]),
            projector_onto([basis_state(s) for s in ONE_SECTOR]))


def single_qubit_attack(memory: SealedMemory, rng: RandomStream) -> AttackOutcome:
    """Объявленное покубитное чтение с учетом возмущения"""
    bits, fidelities = [], []
    with memory.exclusive():
        for index, before in enumerate(memory.snapshot()):
            bit, after = read_triplet(before, rng)
            memory.replace(index, after)
            bits.append(bit)
            fidelities.append(fidelity(before, after))
    logger.debug(f"Покубитная атака: {len(bits)} бит")
    return AttackOutcome(tuple(bits), tuple(fidelities))


def collective_attack(memory: SealedMemory) -> AttackOutcome:
    """Коллективное измерение {P0, P1} на каждом триплете.

    На состояниях протокола исход детерминирован, поэтому случайность не
    расходуется. Память меняется только если все триплеты в формате печати.
    """
    projectors = collective_projectors()
    plan: List[Tuple[int, StateVector, float]] = []
    with memory.exclusive():
        for index, before in enumerate(memory.snapshot()):
            p0, _ = outcome_probabilities(before, projectors)
            if p0 >= 1 - NULL_PROBABILITY:
                bit = 0
            elif p0 <= NULL_PROBABILITY:
                bit = 1
            else:
                raise NotSealFormatError(f"триплет {index}: вероятность исхода 0 равна {p0:.6f}")
            # Людерс для чистого состояния: P psi / |P psi|
            after = StateVector.normalized(projectors[bit].apply(before))
            plan.append((bit, after, fidelity(before, after)))
        for index, (_, after, _) in enumerate(plan):
            memory.replace(index, after)
    logger.debug(f"Коллективная атака: прочитано {len(plan)} бит")
    return AttackOutcome(tuple(b for b, _, _ in plan), tuple(f for _, _, f in plan))


def disturbance_report(before: Sequence[StateVector], after: Sequence[StateVector]) -> List[float]:
    """|<before|after>|^2 по триплетам"""
    if len(before) != len(after):
        raise RecordMismatchError(f"снимки разной длины: {len(before)} и {len(after)}")
    return [fidelity(b, a) for b, a in zip(before, after)]
