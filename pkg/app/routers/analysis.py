import logging

from app.core.errors import NotBreakableAsStatedError
from app.models import AnalysisReport, DecompositionDTO, MeasurementDTO
from app.repository.documents import DocumentRepository
from app.services.analyzer import (
    EncodingFamilies,
    check_embedding,
    decompose,
    embedding_violation,
    protocol_families,
    support_violation,
    synthesize_breaker,
)

logger = logging.getLogger(__name__)


def analyze_families(families: EncodingFamilies) -> AnalysisReport:
    decomposition = decompose(families)
    try:
        measurement = synthesize_breaker(families)
    except NotBreakableAsStatedError as e:
        logger.warning(f"Семейства не допускают идеального чтения: {e}")
        return AnalysisReport(
            readable=False,
            decomposition=DecompositionDTO.from_decomposition(decomposition),
            reason=str(e),
        )
    logger.info(
        f"Семейства читаются без возмущения: сектор {measurement.sector_dim}, "
        f"дополнение {measurement.residual_dim}"
    )
    readings = [measurement.read(state) for _, state in families.states()]
    certificates = dict(
        support_violation=support_violation(measurement, families),
        embedding_violation=embedding_violation(
            measurement.embedding, measurement.injection, families, measurement.sector_dim),
        embedding_valid=check_embedding(
            measurement.embedding, measurement.injection, families, measurement.sector_dim),
        min_family_fidelity=min(r.fidelity for r in readings),
        readings=[r.bit for r in readings],
    )
    return AnalysisReport(
        readable=True,
        decomposition=DecompositionDTO.from_decomposition(decomposition),
        measurement=MeasurementDTO.from_measurement(measurement, **certificates),
    )


def get_analysis_router(subparsers, repository: DocumentRepository) -> None:

    def families(args) -> int:
        repository.save_families(args.out, protocol_families())
        print(f"wrote protocol families to {args.out}")
        return 0

    def analyze(args) -> int:
        source = protocol_families() if args.families is None else repository.load_families(args.families)
        text = analyze_families(source).model_dump_json(indent=2)
        if args.out:
            repository.save_text(args.out, text)
        else:
            print(text)
        return 0

    p = subparsers.add_parser("families", help="записать семейства триплетов протокола")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=families)

    p = subparsers.add_parser("analyze", help="разложение семейств и синтез различающего измерения")
    p.add_argument("--families", help="JSON семейств; по умолчанию семейства протокола")
    p.add_argument("--out")
    p.set_defaults(handler=analyze)
