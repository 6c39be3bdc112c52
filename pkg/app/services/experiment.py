import csv
import io
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from app.core.settings import get_thread_limit
from app.models import ExperimentConfig, ExperimentReport, TrialRecord
from app.services.analyzer import random_readable_families, synthesize_breaker
from app.services.attack import collective_attack, disturbance_report, single_qubit_attack
from app.services.qla import EXACT_TOL, RandomStream
from app.services.seal import (
    SealedMemory,
    alice_check,
    bob_check,
    control_requests,
    distribute_copies,
    honest_read,
    seal_message,
)

logger = logging.getLogger(__name__)

CSV_COLUMNS = ("scenario", "trial", "bits_sealed", "bits_read", "detected", "mean_fidelity")


@dataclass
class TrialResult:
    trial: int
    bits_sealed: List[int]
    bits_read: List[int]
    detected: bool
    fidelities: List[float]
    bob_detected: Optional[bool] = None


def three_sigma(rate: float, count: int) -> float:
    """3 сигма биномиального интервала"""
    return 3.0 * math.sqrt(rate * (1.0 - rate) / count)


def _honest(memory: SealedMemory, rng: RandomStream) -> Tuple[List[int], List[float]]:
    before = memory.snapshot()
    bits = honest_read(memory, rng)
    return bits, disturbance_report(before, memory.snapshot())


def _single(memory: SealedMemory, rng: RandomStream) -> Tuple[List[int], List[float]]:
    outcome = single_qubit_attack(memory, rng)
    return list(outcome.bits), list(outcome.per_triplet_fidelity)


def _collective(memory: SealedMemory, rng: RandomStream) -> Tuple[List[int], List[float]]:
    outcome = collective_attack(memory)
    return list(outcome.bits), list(outcome.per_triplet_fidelity)


READERS: Dict[str, Callable[[SealedMemory, RandomStream], Tuple[List[int], List[float]]]] = {
    "honest_read": _honest,
    "single_qubit_attack": _single,
    "collective_attack": _collective,
    "swap_test_suite": _honest,
}


def _memory_trial(scenario: str, trial: int, message_bits: int, rng: RandomStream) -> TrialResult:
    sealed = [int(b) for b in rng.integers(0, 2, size=message_bits)]
    memory, record = seal_message(sealed, rng)
    bits, fidelities = READERS[scenario](memory, rng)
    bob_detected = None
    if scenario == "swap_test_suite":
        grant = distribute_copies(record, control_requests(record))
        bob_report, _ = bob_check(memory, grant, rng)
        bob_detected = bob_report.detected
    report = alice_check(memory, record, rng)
    return TrialResult(trial, sealed, bits, report.detected, fidelities, bob_detected)


def _analyzer_trial(trial: int, message_bits: int, rng: RandomStream) -> TrialResult:
    families = random_readable_families(int(rng.integers(2, 17)), rng)
    breaker = synthesize_breaker(families)
    sealed = [int(b) for b in rng.integers(0, 2, size=message_bits)]
    bits, fidelities = [], []
    for bit in sealed:
        family = families.family(bit)
        reading = breaker.read(family[int(rng.integers(len(family)))])
        bits.append(reading.bit)
        fidelities.append(reading.fidelity)
    detected = any(f < 1 - EXACT_TOL for f in fidelities)
    return TrialResult(trial, sealed, bits, detected, fidelities)


def _run_trial(config: ExperimentConfig, trial: int, seed: np.random.SeedSequence) -> TrialResult:
    rng = np.random.default_rng(seed)
    if config.scenario == "analyzer_demo":
        return _analyzer_trial(trial, config.message_bits, rng)
    return _memory_trial(config.scenario, trial, config.message_bits, rng)


def _to_record(scenario: str, result: TrialResult) -> TrialRecord:
    return TrialRecord(
        scenario=scenario,
        trial=result.trial,
        bits_sealed="".join(map(str, result.bits_sealed)),
        bits_read="".join(map(str, result.bits_read)),
        detected=result.detected,
        mean_fidelity=float(np.mean(result.fidelities)),
        bob_detected=result.bob_detected,
    )


def run_experiment(config: ExperimentConfig, threads: Optional[int] = None) -> ExperimentReport:
    """Прогон испытаний; отчет зависит только от конфигурации и seed"""
    started = time.perf_counter()
    workers = max(1, min(threads or get_thread_limit(), config.trials))
    seeds = np.random.SeedSequence(config.seed).spawn(config.trials)
    logger.info(
        f"Эксперимент {config.scenario}: {config.trials} испытаний x {config.message_bits} бит, "
        f"seed={config.seed}, потоков={workers}"
    )
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(lambda i: _run_trial(config, i, seeds[i]), range(config.trials)))

    total_bits = sum(len(r.bits_sealed) for r in results)
    correct = sum(a == b for r in results for a, b in zip(r.bits_sealed, r.bits_read))
    bit_accuracy = correct / total_bits
    detection_rate = sum(r.detected for r in results) / config.trials
    fidelities = [f for r in results for f in r.fidelities]
    bob_rate = None
    if config.scenario == "swap_test_suite":
        bob_rate = sum(bool(r.bob_detected) for r in results) / config.trials

    with_records = config.records or config.output_format == "csv"
    report = ExperimentReport(
        scenario=config.scenario,
        trials=config.trials,
        message_bits=config.message_bits,
        seed=config.seed,
        bit_accuracy=bit_accuracy,
        bit_accuracy_3sigma=three_sigma(bit_accuracy, total_bits),
        detection_rate=detection_rate,
        detection_rate_3sigma=three_sigma(detection_rate, config.trials),
        mean_fidelity=float(np.mean(fidelities)),
        bob_detection_rate=bob_rate,
        records=[_to_record(config.scenario, r) for r in results] if with_records else None,
        wall_time=time.perf_counter() - started,
    )
    logger.info(
        f"Эксперимент завершен за {report.wall_time:.2f} с: точность={bit_accuracy:.4f}, "
        f"обнаружение={detection_rate:.4f}"
    )
    return report


def render_report(report: ExperimentReport, output_format: str) -> str:
    if output_format == "json":
        return report.model_dump_json(indent=2)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for record in report.records or []:
        writer.writerow([
            record.scenario,
            record.trial,
            record.bits_sealed,
            record.bits_read,
            int(record.detected),
            repr(record.mean_fidelity),
        ])
    return buffer.getvalue()
