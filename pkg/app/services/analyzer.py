"""Анализатор произвольных семейств кодирования бита.

Проверяет безошибочную читаемость, строит разложение H = H0 + H1 на
ортогональные подпространства и синтезирует невозмущающее различающее
измерение вместе с вложением H ~ C^2 x H0 (логический кубит ведущий).
"""
import logging
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from app.core.errors import (
    CompletenessError,
    DimensionError,
    EmptyFamilyError,
    NotBreakableAsStatedError,
    NotSealFormatError,
    StateError,
)
from app.services.qla import (
    DERIVED_TOL,
    EXACT_TOL,
    NULL_PROBABILITY,
    DensityMatrix,
    Operator,
    RandomStream,
    StateVector,
    complete_basis,
    identity,
    lueders_update,
    orthonormal_basis,
    projector_onto,
    random_unitary,
)
from app.services.seal import triplet_family

logger = logging.getLogger(__name__)

ORTHOGONALITY_TOL = EXACT_TOL


@dataclass(frozen=True)
class EncodingFamilies:
    dim: int
    family0: Tuple[StateVector, ...]
    family1: Tuple[StateVector, ...]

    def __post_init__(self):
        object.__setattr__(self, "family0", tuple(self.family0))
        object.__setattr__(self, "family1", tuple(self.family1))
        if not self.family0 or not self.family1:
            raise EmptyFamilyError("оба семейства должны быть непустыми")
        for state in self.family0 + self.family1:
            if state.dim != self.dim:
                raise DimensionError(f"состояние размерности {state.dim} в семействе размерности {self.dim}")

    def family(self, bit: int) -> Tuple[StateVector, ...]:
        return self.family0 if bit == 0 else self.family1

    def states(self) -> Iterator[Tuple[int, StateVector]]:
        for bit in (0, 1):
            for state in self.family(bit):
                yield bit, state


@dataclass(frozen=True)
class BinaryPovm:
    p0: Operator
    p1: Operator

    def __post_init__(self):
        if self.p0.dim != self.p1.dim:
            raise DimensionError(f"элементы POVM размерностей {self.p0.dim} и {self.p1.dim}")
        for name, element in (("P0", self.p0), ("P1", self.p1)):
            if not element.is_hermitian(EXACT_TOL):
                raise StateError(f"{name} не эрмитов")
            lowest = float(np.min(np.linalg.eigvalsh(element.matrix)))
            if lowest < -DERIVED_TOL:
                raise StateError(f"{name} не положителен: min eig = {lowest!r}")
        if np.max(np.abs(self.p0.matrix + self.p1.matrix - np.eye(self.p0.dim))) > EXACT_TOL:
            raise CompletenessError("P0 + P1 != I")

    @property
    def dim(self) -> int:
        return self.p0.dim

    def element(self, bit: int) -> Operator:
        return self.p0 if bit == 0 else self.p1


@dataclass(frozen=True)
class SubspaceDecomposition:
    dim: int
    basis0: Tuple[StateVector, ...]
    basis1: Tuple[StateVector, ...]
    max_cross_overlap: float
    principal_cosine: float

    @property
    def certified(self) -> bool:
        return self.max_cross_overlap <= ORTHOGONALITY_TOL


@dataclass(frozen=True, eq=False)
class DiscriminationMeasurement:
    """Проекторы P0, P1 на исходном пространстве и вложение на дополненном.

    Дополненное пространство C^2 x C^m: индексы [b*m, (b+1)*m) - сектор b.
    injection - изометрия исходного пространства в дополненное (первые
    ambient_dim координат), дополнительные измерения идут после исходных.
    """
    p0: Operator
    p1: Operator
    embedding: Operator
    injection: np.ndarray
    sector_dim: int
    ambient_dim: int
    residual_dim: int = 0
    logical_index: str = "leading factor of C^2 x C^m"

    @property
    def padded_dim(self) -> int:
        return 2 * self.sector_dim

    def projector(self, bit: int) -> Operator:
        return self.p0 if bit == 0 else self.p1

    def logical_projector(self, bit: int) -> Operator:
        """|b><b| x I_m на дополненном пространстве"""
        selector = np.zeros((2, 2))
        selector[bit, bit] = 1.0
        return Operator(np.kron(selector, np.eye(self.sector_dim)))

    def read(self, state: StateVector, rng: Optional[RandomStream] = None) -> "BreakerReading":
        """Канал Людерса {P0, P1} на чистом состоянии"""
        if state.dim != self.ambient_dim:
            raise DimensionError(f"состояние размерности {state.dim}, измерение {self.ambient_dim}")
        rho = DensityMatrix.from_state(state)
        p0 = float(np.vdot(state.amps, self.p0.apply(state)).real)
        if p0 >= 1 - NULL_PROBABILITY:
            bit = 0
        elif p0 <= NULL_PROBABILITY:
            bit = 1
        elif rng is None:
            raise NotSealFormatError(f"состояние вне семейств: p0 = {p0:.6f}")
        else:
            bit = int(rng.random() >= p0)
        post, _ = lueders_update(rho, self.projector(bit))
        return BreakerReading(bit, post, post.fidelity(state))


@dataclass(frozen=True)
class BreakerReading:
    bit: int
    post: DensityMatrix
    fidelity: float


def _check_dims(families: EncodingFamilies, povm: BinaryPovm) -> None:
    if families.dim != povm.dim:
        raise DimensionError(f"семейства размерности {families.dim}, POVM {povm.dim}")


def check_perfect_readability(families: EncodingFamilies, povm: BinaryPovm) -> float:
    """max |<psi_b|P_b'|psi_b> - delta_bb'|; идеальная читаемость при <= 1e-10"""
    _check_dims(families, povm)
    worst = 0.0
    for bit, state in families.states():
        for reading in (0, 1):
            value = float(np.vdot(state.amps, povm.element(reading).apply(state)).real)
            worst = max(worst, abs(value - (1.0 if reading == bit else 0.0)))
    return worst


def decompose(families: EncodingFamilies) -> SubspaceDecomposition:
    basis0 = orthonormal_basis(families.family0)
    basis1 = orthonormal_basis(families.family1)
    b0 = np.column_stack([e.amps for e in basis0])
    b1 = np.column_stack([e.amps for e in basis1])
    cross = b0.conj().T @ b1
    decomposition = SubspaceDecomposition(
        dim=families.dim,
        basis0=tuple(basis0),
        basis1=tuple(basis1),
        max_cross_overlap=float(np.max(np.abs(cross))),
        principal_cosine=float(np.linalg.svd(cross, compute_uv=False)[0]),
    )
    logger.debug(
        f"Разложение: dim H0={len(basis0)}, dim H1={len(basis1)}, "
        f"перекрытие={decomposition.max_cross_overlap:.3e}"
    )
    return decomposition


def _require_certified(decomposition: SubspaceDecomposition) -> None:
    if not decomposition.certified:
        raise NotBreakableAsStatedError(
            f"подпространства не ортогональны: перекрытие {decomposition.max_cross_overlap:.3e}"
        )


def residual_subspace(decomposition: SubspaceDecomposition, dim: int) -> List[StateVector]:
    """Ортонормированное дополнение H0 + H1 до всего пространства"""
    _require_certified(decomposition)
    if dim != decomposition.dim:
        raise DimensionError(f"разложение размерности {decomposition.dim}, запрошено {dim}")
    return complete_basis(decomposition.basis0 + decomposition.basis1, dim)


def _sector_basis(projector: Operator, fallback: Sequence[StateVector]) -> List[StateVector]:
    # Проекции вычислительного базиса дают базис, выровненный по координатам
    projected = [projector.matrix[:, j] for j in range(projector.dim)]
    rank = int(round(float(np.trace(projector.matrix).real)))
    try:
        basis = orthonormal_basis(projected, tol=DERIVED_TOL)
    except EmptyFamilyError:
        basis = []
    return basis if len(basis) == rank else list(fallback)


def synthesize_breaker(families: EncodingFamilies) -> DiscriminationMeasurement:
    decomposition = decompose(families)
    _require_certified(decomposition)
    residual = residual_subspace(decomposition, families.dim)
    # Остаток пространства приписывается сектору 1
    p0 = projector_onto(decomposition.basis0)
    p1 = Operator(np.eye(families.dim) - p0.matrix)
    sector0 = _sector_basis(p0, decomposition.basis0)
    sector1 = _sector_basis(p1, list(decomposition.basis1) + residual)

    n = families.dim
    m = max(len(sector0), len(sector1))
    padded = 2 * m
    injection = np.zeros((padded, n), dtype=np.complex128)
    injection[:n, :n] = np.eye(n)
    columns = [[injection @ e.amps for e in sector0], [injection @ e.amps for e in sector1]]
    extra = iter(np.eye(padded, dtype=np.complex128)[n:])
    for sector in columns:
        while len(sector) < m:
            sector.append(next(extra))

    embedding = np.zeros((padded, padded), dtype=np.complex128)
    for bit, sector in enumerate(columns):
        for k, vector in enumerate(sector):
            embedding[bit * m + k, :] = vector.conj()
    measurement = DiscriminationMeasurement(
        p0=p0,
        p1=p1,
        embedding=Operator(embedding),
        injection=injection,
        sector_dim=m,
        ambient_dim=n,
        residual_dim=len(residual),
    )
    logger.debug(f"Синтезировано различающее измерение: сектор {m}, дополнение {padded - n}")
    return measurement


def _sqrt_psd(element: Operator) -> np.ndarray:
    values, vectors = np.linalg.eigh(element.matrix)
    # Шум собственных значений ~1e-16 после корня дал бы ~1e-8
    values = np.where(values <= NULL_PROBABILITY, 0.0, values)
    return (vectors * np.sqrt(values)) @ vectors.conj().T


def support_violation(measurement: DiscriminationMeasurement, families: EncodingFamilies) -> float:
    """max |sqrt(P_b') psi_b| по b != b'"""
    roots = (_sqrt_psd(measurement.p0), _sqrt_psd(measurement.p1))
    return max(float(np.linalg.norm(roots[1 - bit] @ state.amps)) for bit, state in families.states())


def embedding_violation(embedding: Operator, injection: np.ndarray, families: EncodingFamilies,
                        sector_dim: int) -> float:
    """Максимальная норма компоненты образа семейства b в секторе 1-b"""
    if embedding.dim != 2 * sector_dim or injection.shape != (embedding.dim, families.dim):
        raise DimensionError("вложение не согласовано с размерностями семейств")
    worst = 0.0
    for bit, state in families.states():
        image = embedding.matrix @ (injection @ state.amps)
        wrong = image[(1 - bit) * sector_dim:(2 - bit) * sector_dim]
        worst = max(worst, float(np.linalg.norm(wrong)))
    return worst


def check_embedding(embedding: Operator, injection: np.ndarray, families: EncodingFamilies,
                    sector_dim: int, tol: float = EXACT_TOL) -> bool:
    isometry = np.max(np.abs(injection.conj().T @ injection - np.eye(families.dim)))
    return (
        embedding.is_unitary(tol)
        and isometry <= tol
        and embedding_violation(embedding, injection, families, sector_dim) <= tol
    )


def protocol_families() -> EncodingFamilies:
    return EncodingFamilies(dim=8, family0=tuple(triplet_family(0)), family1=tuple(triplet_family(1)))


def protocol_embedding_witness() -> Tuple[Operator, np.ndarray, int]:
    """Перестановка |011> <-> |100>; логический бит - первый физический кубит"""
    swap = np.eye(8, dtype=np.complex128)
    swap[[3, 4]] = swap[[4, 3]]
    return Operator(swap), identity(8).matrix, 4


def random_binary_povm(dim: int, rng: RandomStream) -> BinaryPovm:
    """Случайный двухисходный POVM; в половине случаев проективный"""
    basis = random_unitary(dim, rng)
    weights = rng.random(dim)
    if rng.random() < 0.5:
        weights = np.round(weights)
    p0 = (basis * weights) @ basis.conj().T
    p0 = (p0 + p0.conj().T) / 2
    return BinaryPovm(Operator(p0), Operator(np.eye(dim) - p0))


def search_perfect_reader(families: EncodingFamilies, samples: int, rng: RandomStream) -> float:
    """Наименьшая ошибка чтения среди случайных POVM"""
    best = float("inf")
    for _ in range(samples):
        best = min(best, check_perfect_readability(families, random_binary_povm(families.dim, rng)))
    logger.debug(f"Поиск читателя: {samples} POVM, лучшая ошибка {best:.3e}")
    return best


def _random_states_in(columns: np.ndarray, count: int, rng: RandomStream) -> Tuple[StateVector, ...]:
    k = columns.shape[1]
    coefficients = rng.standard_normal((k, count)) + 1j * rng.standard_normal((k, count))
    return tuple(StateVector.normalized(columns @ coefficients[:, j]) for j in range(count))


def random_readable_families(dim: int, rng: RandomStream, max_size: int = 6) -> EncodingFamilies:
    """Семейства внутри двух случайных ортогональных подпространств"""
    if dim < 2:
        raise DimensionError("для двух ортогональных подпространств нужна размерность >= 2")
    frame = random_unitary(dim, rng)
    k0 = int(rng.integers(1, dim))
    k1 = int(rng.integers(1, dim - k0 + 1))
    return EncodingFamilies(
        dim=dim,
        family0=_random_states_in(frame[:, :k0], int(rng.integers(1, max_size + 1)), rng),
        family1=_random_states_in(frame[:, k0:k0 + k1], int(rng.integers(1, max_size + 1)), rng),
    )


def random_overlapping_families(dim: int, rng: RandomStream, min_overlap: float = 1e-3,
                                max_size: int = 4) -> EncodingFamilies:
    """Случайные семейства с перекрытием оболочек больше min_overlap"""
    whole = np.eye(dim, dtype=np.complex128)
    while True:
        families = EncodingFamilies(
            dim=dim,
            family0=_random_states_in(whole, int(rng.integers(1, max_size + 1)), rng),
            family1=_random_states_in(whole, int(rng.integers(1, max_size + 1)), rng),
        )
        if decompose(families).max_cross_overlap > min_overlap:
            return families
