import argparse
import logging
from typing import Tuple

from app.core.errors import ConfigError
from app.repository.documents import DocumentRepository
from app.services.attack import collective_attack, single_qubit_attack
from app.services.qla import make_stream
from app.services.seal import (
    alice_check,
    bob_check,
    control_requests,
    distribute_copies,
    honest_read,
    seal_message,
)

logger = logging.getLogger(__name__)


def bit_string(value: str) -> str:
    if not value or set(value) - {"0", "1"}:
        raise argparse.ArgumentTypeError(f"ожидалась строка из 0 и 1, получено {value!r}")
    return value


def slot(value: str) -> Tuple[int, int]:
    try:
        triplet, position = (int(part) for part in value.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"ожидалось ТРИПЛЕТ:ПОЗИЦИЯ, получено {value!r}")
    return triplet, position


def seed_value(value: str) -> int:
    try:
        seed = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed должен быть целым, получено {value!r}")
    if not 0 <= seed < 2 ** 64:
        raise argparse.ArgumentTypeError(f"seed вне диапазона [0, 2^64): {seed}")
    return seed


def _add_seed(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=seed_value, default=None, help="seed генератора случайных чисел")


def get_protocol_router(subparsers, repository: DocumentRepository) -> None:

    def seal(args) -> int:
        bits = [int(c) for c in args.bits]
        memory, record = seal_message(bits, make_stream(args.seed))
        repository.save_memory(args.out, memory)
        repository.save_record(args.record, record)
        logger.info(f"Запечатано сообщение из {len(bits)} бит")
        print(f"sealed {len(bits)} bits")
        return 0

    def read(args) -> int:
        memory = repository.load_memory(args.memory)
        bits = honest_read(memory, make_stream(args.seed))
        repository.save_memory(args.memory, memory)
        print("".join(map(str, bits)))
        return 0

    def grant(args) -> int:
        record = repository.load_record(args.record)
        requests = list(args.slot or [])
        if args.controls:
            requests.extend(control_requests(record))
        if not requests:
            raise ConfigError("не указано ни одного слота: --slot или --controls")
        repository.save_grant(args.out, distribute_copies(record, requests))
        print(f"granted {len(requests)} copies")
        return 0

    def attack(args) -> int:
        memory = repository.load_memory(args.memory)
        if args.mode == "collective":
            outcome = collective_attack(memory)
        else:
            outcome = single_qubit_attack(memory, make_stream(args.seed))
        repository.save_memory(args.memory, memory)
        logger.info(f"Атака {args.mode}: прочитано {len(outcome.bits)} бит")
        print("".join(map(str, outcome.bits)))
        print(" ".join(f"{f:.12f}" for f in outcome.per_triplet_fidelity))
        return 0

    def verify(args) -> int:
        memory = repository.load_memory(args.memory)
        rng = make_stream(args.seed)
        if args.role == "alice":
            if args.record is None:
                raise ConfigError("--as alice требует --record")
            report = alice_check(memory, repository.load_record(args.record), rng)
        else:
            if args.grant is None:
                raise ConfigError("--as bob требует --grant")
            report, refreshed = bob_check(memory, repository.load_grant(args.grant), rng)
            if args.refresh_grant:
                repository.save_grant(args.grant, refreshed)
        repository.save_memory(args.memory, memory)
        if report.detected:
            logger.warning(f"Проверка ({args.role}) обнаружила вскрытие в триплетах {report.flagged}")
            print("tampered " + " ".join(map(str, report.flagged)))
        else:
            logger.info(f"Проверка ({args.role}): печать цела")
            print("intact")
        return 0

    p = subparsers.add_parser("seal", help="запечатать сообщение")
    p.add_argument("--bits", type=bit_string, required=True)
    p.add_argument("--out", required=True, help="файл памяти")
    p.add_argument("--record", required=True, help="файл секретной записи Алисы")
    _add_seed(p)
    p.set_defaults(handler=seal)

    p = subparsers.add_parser("read", help="честное чтение в z-базисе")
    p.add_argument("--memory", required=True)
    _add_seed(p)
    p.set_defaults(handler=read)

    p = subparsers.add_parser("grant", help="выдать Бобу копии кубитов")
    p.add_argument("--record", required=True)
    p.add_argument("--slot", type=slot, action="append", help="ТРИПЛЕТ:ПОЗИЦИЯ, можно повторять")
    p.add_argument("--controls", action="store_true", help="копии всех контрольных кубитов")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=grant)

    p = subparsers.add_parser("attack", help="прочитать печать атакующим")
    p.add_argument("--mode", choices=("single", "collective"), required=True)
    p.add_argument("--memory", required=True)
    _add_seed(p)
    p.set_defaults(handler=attack)

    p = subparsers.add_parser("verify", help="проверить целостность печати")
    p.add_argument("--as", dest="role", choices=("alice", "bob"), required=True)
    p.add_argument("--memory", required=True)
    p.add_argument("--record")
    p.add_argument("--grant")
    p.add_argument("--refresh-grant", action="store_true", help="сохранить копии после SWAP-тестов")
    _add_seed(p)
    p.set_defaults(handler=verify)
