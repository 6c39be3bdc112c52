import logging

from app.models import load_config
from app.repository.documents import DocumentRepository
from app.services.experiment import render_report, run_experiment

logger = logging.getLogger(__name__)

SCENARIOS = ("honest_read", "single_qubit_attack", "collective_attack", "swap_test_suite", "analyzer_demo")


def get_experiment_router(subparsers, repository: DocumentRepository) -> None:

    def experiment(args) -> int:
        data = repository.load_raw(args.config) if args.config else {}
        overrides = {
            "scenario": args.scenario,
            "message_bits": args.bits,
            "trials": args.trials,
            "seed": args.seed,
            "output_format": args.format,
            "records": True if args.records else None,
        }
        data.update({k: v for k, v in overrides.items() if v is not None})
        config = load_config(data)
        report = run_experiment(config, threads=args.threads)
        text = render_report(report, config.output_format)
        if args.out:
            repository.save_text(args.out, text)
        else:
            print(text, end="" if text.endswith("\n") else "\n")
        return 0

    p = subparsers.add_parser("experiment", help="Монте-Карло эксперимент")
    p.add_argument("--config", help="JSON с ExperimentConfig; флаги имеют приоритет")
    p.add_argument("--scenario", choices=SCENARIOS)
    p.add_argument("--bits", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("--records", action="store_true", help="включить записи по испытаниям")
    p.add_argument("--threads", type=int, help="число потоков (иначе QSEAL_THREADS)")
    p.add_argument("--out")
    p.set_defaults(handler=experiment)
