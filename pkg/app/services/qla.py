"""Плотная комплексная линейная алгебра малых размерностей.

Векторы состояний, операторы, матрицы плотности, тензорное произведение,
ортонормализация, проекторы, выборка по правилу Борна и обновление Людерса.
Все значения неизменяемы; случайность передается явно через
``numpy.random.Generator``.
"""
import logging
from dataclasses import dataclass
from functools import reduce
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from app.core.errors import (
    CompletenessError,
    DimensionError,
    EmptyFamilyError,
    NotOrthonormalError,
    NullOutcomeError,
    StateError,
)

logger = logging.getLogger(__name__)

EXACT_TOL = 1e-10
DERIVED_TOL = 1e-8
NULL_PROBABILITY = 1e-12

RandomStream = np.random.Generator


def make_stream(seed: Optional[int] = None) -> RandomStream:
    return np.random.default_rng(seed)


def split_streams(seed: int, count: int) -> List[RandomStream]:
    """Независимые потоки, зависящие только от (seed, индекс)"""
    return [np.random.default_rng(child) for child in np.random.SeedSequence(seed).spawn(count)]


def _frozen_array(values, ndim: int, what: str) -> np.ndarray:
    arr = np.array(values, dtype=np.complex128)
    if arr.ndim != ndim or arr.size == 0:
        raise StateError(f"{what}: ожидался массив размерности {ndim}, получено {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise StateError(f"{what}: обнаружены NaN или бесконечности")
    arr.setflags(write=False)
    return arr


def _square(values, what: str) -> np.ndarray:
    arr = _frozen_array(values, 2, what)
    if arr.shape[0] != arr.shape[1]:
        raise StateError(f"{what}: матрица не квадратная {arr.shape}")
    return arr


def _max_abs(matrix: np.ndarray) -> float:
    return float(np.max(np.abs(matrix))) if matrix.size else 0.0


@dataclass(frozen=True, eq=False)
class StateVector:
    amps: np.ndarray

    def __post_init__(self):
        amps = _frozen_array(self.amps, 1, "StateVector")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > EXACT_TOL:
            raise StateError(f"StateVector не нормирован: |psi|^2 = {norm2!r}")
        object.__setattr__(self, "amps", amps)

    @classmethod
    def normalized(cls, values) -> "StateVector":
        arr = np.asarray(values, dtype=np.complex128)
        norm = float(np.linalg.norm(arr))
        if not np.isfinite(norm) or norm <= 0.0:
            raise StateError("нельзя нормировать нулевой или неконечный вектор")
        return cls(arr / norm)

    @property
    def dim(self) -> int:
        return int(self.amps.shape[0])

    def __repr__(self) -> str:
        return f"StateVector(dim={self.dim})"


@dataclass(frozen=True, eq=False)
class Operator:
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _square(self.matrix, "Operator"))

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def adjoint(self) -> np.ndarray:
        return self.matrix.conj().T

    def is_hermitian(self, tol: float = EXACT_TOL) -> bool:
        return _max_abs(self.matrix - self.adjoint) <= tol

    def is_unitary(self, tol: float = EXACT_TOL) -> bool:
        return _max_abs(self.adjoint @ self.matrix - np.eye(self.dim)) <= tol

    def is_projector(self, tol: float = EXACT_TOL) -> bool:
        m = self.matrix
        return _max_abs(m @ m - m) <= tol and self.is_hermitian(tol)

    def apply(self, state: StateVector) -> np.ndarray:
        """Ненормированный образ вектора"""
        if state.dim != self.dim:
            raise DimensionError(f"оператор {self.dim}x{self.dim} и вектор размерности {state.dim}")
        return self.matrix @ state.amps

    def __repr__(self) -> str:
        return f"Operator(dim={self.dim})"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray

    def __post_init__(self):
        m = _square(self.matrix, "DensityMatrix")
        if _max_abs(m - m.conj().T) > EXACT_TOL:
            raise StateError("DensityMatrix не эрмитова")
        trace = complex(np.trace(m))
        if abs(trace - 1.0) > EXACT_TOL:
            raise StateError(f"DensityMatrix: след {trace!r} != 1")
        lowest = float(np.min(np.linalg.eigvalsh(m)))
        if lowest < -DERIVED_TOL:
            raise StateError(f"DensityMatrix не положительна: min eig = {lowest!r}")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_state(cls, state: StateVector) -> "DensityMatrix":
        return cls(np.outer(state.amps, state.amps.conj()))

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    def fidelity(self, state: StateVector) -> float:
        """<psi|rho|psi>"""
        if state.dim != self.dim:
            raise DimensionError(f"матрица плотности {self.dim} и вектор {state.dim}")
        value = float(np.vdot(state.amps, self.matrix @ state.amps).real)
        return min(1.0, max(0.0, value))

    def __repr__(self) -> str:
        return f"DensityMatrix(dim={self.dim})"


Tensorable = Union[StateVector, Operator, DensityMatrix]


def tensor(a: Tensorable, b: Tensorable) -> Tensorable:
    if type(a) is not type(b):
        raise TypeError(f"тензорное произведение {type(a).__name__} и {type(b).__name__}")
    if isinstance(a, StateVector):
        return StateVector(np.kron(a.amps, b.amps))
    return type(a)(np.kron(a.matrix, b.matrix))


def tensor_all(*items: Tensorable) -> Tensorable:
    return reduce(tensor, items)


def inner(a: StateVector, b: StateVector) -> complex:
    if a.dim != b.dim:
        raise DimensionError(f"скалярное произведение векторов размерностей {a.dim} и {b.dim}")
    return complex(np.vdot(a.amps, b.amps))


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2; глобальная фаза не учитывается"""
    return min(1.0, abs(inner(a, b)) ** 2)


def basis_state(bits: str) -> StateVector:
    """|b0 b1 ... > в вычислительном базисе, кубит 0 - старший"""
    if not bits or set(bits) - {"0", "1"}:
        raise StateError(f"некорректная битовая строка {bits!r}")
    amps = np.zeros(2 ** len(bits), dtype=np.complex128)
    amps[int(bits, 2)] = 1.0
    return StateVector(amps)


def identity(dim: int) -> Operator:
    return Operator(np.eye(dim, dtype=np.complex128))


def _raw(vector: Union[StateVector, np.ndarray]) -> np.ndarray:
    if isinstance(vector, StateVector):
        return vector.amps
    return np.asarray(vector, dtype=np.complex128)


def _orthonormalize(columns: Sequence[np.ndarray], tol: float,
                    seed: Sequence[np.ndarray] = ()) -> List[np.ndarray]:
    # Модифицированный Грам-Шмидт с одним проходом переортогонализации
    basis = [np.asarray(e, dtype=np.complex128) for e in seed]
    fresh = []
    for column in columns:
        w = np.array(column, dtype=np.complex128)
        for _ in range(2):
            for e in basis:
                w -= np.vdot(e, w) * e
        norm = float(np.linalg.norm(w))
        if norm <= tol:
            continue
        e = w / norm
        basis.append(e)
        fresh.append(e)
    return fresh


def _common_dim(vectors: Sequence[np.ndarray]) -> int:
    dims = {v.shape[0] for v in vectors}
    if len(dims) != 1:
        raise DimensionError(f"векторы разных размерностей: {sorted(dims)}")
    return dims.pop()


def orthonormal_basis(vectors: Sequence[Union[StateVector, np.ndarray]],
                      tol: float = EXACT_TOL) -> List[StateVector]:
    """Ортонормированный базис линейной оболочки входных векторов"""
    if not vectors:
        raise EmptyFamilyError("пустой набор векторов")
    columns = [_raw(v) for v in vectors]
    _common_dim(columns)
    return [StateVector(e) for e in _orthonormalize(columns, tol)]


def complete_basis(basis: Sequence[StateVector], dim: int,
                   tol: float = EXACT_TOL) -> List[StateVector]:
    """Дополнение ортонормированного набора до базиса всего пространства"""
    seed = [_raw(v) for v in basis]
    if seed and _common_dim(seed) != dim:
        raise DimensionError(f"базис размерности {seed[0].shape[0]}, пространство {dim}")
    candidates = list(np.eye(dim, dtype=np.complex128))
    return [StateVector(e) for e in _orthonormalize(candidates, tol, seed=seed)]


def _check_orthonormal(columns: np.ndarray) -> None:
    gram = columns.conj().T @ columns
    deviation = _max_abs(gram - np.eye(gram.shape[0]))
    if deviation > EXACT_TOL:
        raise NotOrthonormalError(f"базис не ортонормирован: отклонение {deviation:.3e}")


def projector_onto(basis: Sequence[StateVector]) -> Operator:
    if not basis:
        raise EmptyFamilyError("пустой базис")
    columns = np.column_stack([_raw(v) for v in basis])
    _check_orthonormal(columns)
    projector = Operator(columns @ columns.conj().T)
    rank = float(np.trace(projector.matrix).real)
    if abs(rank - len(basis)) > DERIVED_TOL:
        raise NotOrthonormalError(f"ранг проектора {rank} != {len(basis)}")
    return projector


def embed_qubit_operator(op: Union[Operator, np.ndarray], position: int, n_qubits: int) -> Operator:
    """I x ... x op x ... x I, op действует на кубит position"""
    if not 0 <= position < n_qubits:
        raise DimensionError(f"кубит {position} вне регистра из {n_qubits}")
    local = op.matrix if isinstance(op, Operator) else np.asarray(op, dtype=np.complex128)
    if local.shape != (2, 2):
        raise DimensionError(f"ожидался оператор 2x2, получено {local.shape}")
    factors = [local if k == position else np.eye(2) for k in range(n_qubits)]
    return Operator(reduce(np.kron, factors))


def exchange_operator(dim: int) -> Operator:
    """SWAP двух систем одинаковой размерности: |i>|j> -> |j>|i>"""
    swap = np.zeros((dim * dim, dim * dim), dtype=np.complex128)
    for i in range(dim):
        for j in range(dim):
            swap[j * dim + i, i * dim + j] = 1.0
    return Operator(swap)


def qubit_swap_operator(n_qubits: int, first: int, second: int) -> Operator:
    size = 2 ** n_qubits
    swap = np.zeros((size, size), dtype=np.complex128)
    shift_a, shift_b = n_qubits - 1 - first, n_qubits - 1 - second
    for x in range(size):
        bit_a, bit_b = (x >> shift_a) & 1, (x >> shift_b) & 1
        y = x & ~((1 << shift_a) | (1 << shift_b)) | (bit_a << shift_b) | (bit_b << shift_a)
        swap[y, x] = 1.0
    return Operator(swap)


def random_unitary(dim: int, rng: RandomStream) -> np.ndarray:
    """Унитарная матрица по мере Хаара (QR комплексной гауссовой матрицы)"""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    phases = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * phases


def reduced_qubit_state(state: StateVector, position: int, n_qubits: int) -> DensityMatrix:
    if state.dim != 2 ** n_qubits:
        raise DimensionError(f"вектор размерности {state.dim} не является {n_qubits}-кубитным")
    tensor_form = np.moveaxis(state.amps.reshape([2] * n_qubits), position, 0).reshape(2, -1)
    rho = tensor_form @ tensor_form.conj().T
    return DensityMatrix((rho + rho.conj().T) / 2)


def schmidt_factor(state: StateVector, dim_a: int,
                   dim_b: int) -> Optional[Tuple[StateVector, StateVector]]:
    """Множители a, b с state = a x b, если состояние произведение; иначе None"""
    if state.dim != dim_a * dim_b:
        raise DimensionError(f"{state.dim} != {dim_a} * {dim_b}")
    u, s, vh = np.linalg.svd(state.amps.reshape(dim_a, dim_b))
    if s.size > 1 and s[1] > EXACT_TOL:
        return None
    return StateVector.normalized(u[:, 0]), StateVector.normalized(vh[0, :])


def _check_complete(projectors: Sequence[Operator], dim: int) -> None:
    total = np.zeros((dim, dim), dtype=np.complex128)
    for k, p in enumerate(projectors):
        if p.dim != dim:
            raise DimensionError(f"проектор {k} размерности {p.dim}, состояние {dim}")
        if not p.is_projector(DERIVED_TOL):
            raise CompletenessError(f"оператор {k} не является проектором")
        total += p.matrix
    if _max_abs(total - np.eye(dim)) > DERIVED_TOL:
        raise CompletenessError("сумма проекторов не равна единице")
    for i in range(len(projectors)):
        for j in range(i + 1, len(projectors)):
            if _max_abs(projectors[i].matrix @ projectors[j].matrix) > DERIVED_TOL:
                raise CompletenessError(f"проекторы {i} и {j} не ортогональны")


def born_sample(state: StateVector, projectors: Sequence[Operator],
                rng: RandomStream) -> Tuple[int, StateVector]:
    """Проективное измерение чистого состояния: исход и нормированное постсостояние"""
    if not projectors:
        raise CompletenessError("пустой набор проекторов")
    _check_complete(projectors, state.dim)
    images = [p.apply(state) for p in projectors]
    probabilities = np.array([float(np.vdot(v, v).real) for v in images])
    total = float(probabilities.sum())
    if abs(total - 1.0) > EXACT_TOL:
        raise CompletenessError(f"сумма вероятностей {total!r} != 1")
    outcome = int(rng.choice(len(projectors), p=probabilities / total))
    logger.debug(f"Исход {outcome} с вероятностью {probabilities[outcome]:.6f}")
    return outcome, StateVector.normalized(images[outcome])


def outcome_probabilities(state: StateVector, projectors: Sequence[Operator]) -> List[float]:
    return [float(np.vdot(v, v).real) for v in (p.apply(state) for p in projectors)]


def lueders_update(rho: DensityMatrix, projector: Operator) -> Tuple[DensityMatrix, float]:
    """rho -> P rho P / Tr[P rho P]"""
    if rho.dim != projector.dim:
        raise DimensionError(f"матрица плотности {rho.dim}, проектор {projector.dim}")
    if not projector.is_projector():
        raise StateError("оператор не является проектором")
    p = projector.matrix
    branch = p @ rho.matrix @ p
    probability = float(np.trace(branch).real)
    if probability < NULL_PROBABILITY:
        raise NullOutcomeError(f"вероятность исхода {probability:.3e}")
    post = branch / probability
    return DensityMatrix((post + post.conj().T) / 2), min(1.0, probability)
