"""
Command-line entry point

    battery-fdd <command> --config <path> [--jobs N] [--fixed-clock] [overrides]

Commands: ingest, describe, build-memory, build-kb, diagnose, evaluate, report.
The remote backend credential is read from the environment only.
"""

import argparse
import asyncio
import json
import logging
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from .agent import DiagnosisAgent, build_backend
from .alarms import AlarmRegistry
from .config import (
    BackendKind,
    ExclusionRule,
    PipelineConfig,
    SimilarityKind,
    VotingMode,
)
from .data import (
    TelemetryDecoder,
    read_decoded_records,
    write_decoded_records,
    write_error_report,
)
from .errors import BatteryFDDError, ConfigurationError, InputError
from .evaluation import evaluate_pipeline, metric_table, read_metric_report, write_reports
from .evaluation.report import METRICS_JSON
from .models import DiagnosisOutput
from .retrieval import CaseMemory, KnowledgeBase, load_documents
from .retrieval.case_memory import MEMORY_KIND
from .retrieval.persistence import (
    MANIFEST_FILE,
    ArtifactManifest,
    read_manifest,
    require_same_build,
    sidecar_name,
    timestamp,
    write_manifest,
)
from .text import DescriptionTemplates, describe_records, read_corpus, to_corpus_entry, write_corpus

logger = logging.getLogger("battery_fdd")

COMMANDS = ("ingest", "describe", "build-memory", "build-kb", "diagnose", "evaluate", "report")

QUALITY_FILE = "ingest_quality.json"
PREDICTIONS_FILE = "predictions.jsonl"

DECODED_KIND = "decoded_records"
CORPUS_KIND = "description_corpus"
DIAGNOSES_KIND = "diagnoses"
REPORTS_KIND = "evaluation_reports"


@dataclass
class CommandOptions:
    """Per-invocation flags that are not configuration"""
    fixed_clock: bool = False
    records: Optional[Path] = None
    record_ids: List[str] = field(default_factory=list)
    test_corpus: Optional[Path] = None
    exclusion: Optional[ExclusionRule] = None
    console: Optional[Console] = None


def setup_logging(level: str) -> None:
    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def _require(path: Path, what: str, hint: str) -> Path:
    if not path.exists():
        raise InputError(f"{what} not found at {path}; run '{hint}' first")
    return path


def _registry(config: PipelineConfig) -> AlarmRegistry:
    return AlarmRegistry.from_config(config.alarms)


def _templates(config: PipelineConfig) -> DescriptionTemplates:
    return DescriptionTemplates.from_file(config.paths.templates)


def _load_memory(config: PipelineConfig) -> CaseMemory:
    directory = _require(config.paths.memory / MANIFEST_FILE, "case memory", "build-memory").parent
    return CaseMemory.load(
        directory,
        config_hash=config.config_hash(),
        thresholds=config.thresholds,
        use_accelerator=config.memory.use_accelerator,
    )


def _load_kb(config: PipelineConfig) -> Optional[KnowledgeBase]:
    if not (config.paths.kb / MANIFEST_FILE).exists():
        logger.warning(f"No knowledge base at {config.paths.kb}; diagnosing without knowledge")
        return None
    return KnowledgeBase.load(
        config.paths.kb,
        config_hash=config.config_hash(),
        thresholds=config.thresholds,
        use_accelerator=config.memory.use_accelerator,
    )


def _stamp(
    config: PipelineConfig,
    options: CommandOptions,
    artifact: Path,
    kind: str,
    count: int,
    **parameters,
) -> Path:
    """Manifest for an artifact file (sidecar) or directory (manifest.json inside)"""
    manifest = ArtifactManifest(
        kind=kind,
        count=count,
        config_hash=config.config_hash(),
        created_at=timestamp(options.fixed_clock),
        similarity=config.memory.similarity.value,
        parameters=parameters,
    )
    if artifact.is_dir():
        return write_manifest(artifact, manifest)
    return write_manifest(artifact.parent, manifest, sidecar_name(artifact))


def _check_test_corpus(config: PipelineConfig, options: CommandOptions, test_path: Path) -> None:
    """Refuse a test corpus described under other settings than the memory"""
    memory_manifest = read_manifest(config.paths.memory, MEMORY_KIND)
    name = sidecar_name(test_path)
    if not (test_path.parent / name).exists():
        if options.test_corpus is None:
            raise InputError(f"{test_path} carries no manifest; run 'describe' again")
        logger.warning(f"{test_path} carries no manifest; its configuration is not checked")
        return
    corpus_manifest = read_manifest(test_path.parent, CORPUS_KIND, name=name)
    require_same_build(corpus_manifest, memory_manifest)


# Commands

def cmd_ingest(config: PipelineConfig, options: CommandOptions) -> int:
    if config.paths.input is None:
        raise ConfigurationError("no input file configured (paths.input or --input)")
    try:
        source = config.paths.input.read_bytes()
    except OSError as e:
        raise InputError(f"cannot read input {config.paths.input}: {e}") from e

    decoder = TelemetryDecoder(config.decode, max_workers=config.jobs)
    result = decoder.decode_source(source)
    write_decoded_records(result.records, config.paths.decoded)
    _stamp(config, options, config.paths.decoded, DECODED_KIND, len(result.records))
    write_error_report(result.errors, config.paths.ingest_errors)

    quality = decoder.generate_quality_report()
    (config.paths.workdir / QUALITY_FILE).write_text(
        json.dumps(asdict(quality), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    logger.info(
        f"Ingested {quality.valid_items}/{quality.total_items} rows "
        f"(error rate {quality.error_rate:.2%})"
    )
    return 0


def cmd_describe(config: PipelineConfig, options: CommandOptions) -> int:
    records = read_decoded_records(_require(config.paths.decoded, "decoded records", "ingest"))
    decoded_name = sidecar_name(config.paths.decoded)
    if (config.paths.decoded.parent / decoded_name).exists():
        decoded = read_manifest(config.paths.decoded.parent, DECODED_KIND, name=decoded_name)
        if decoded.count != len(records):
            raise InputError(
                f"{config.paths.decoded} holds {len(records)} records, manifest says {decoded.count}"
            )
    descriptions = describe_records(
        records, config.thresholds, _registry(config), _templates(config), max_workers=config.jobs
    )
    write_corpus([to_corpus_entry(d) for d in descriptions], config.paths.corpus)
    _stamp(config, options, config.paths.corpus, CORPUS_KIND, len(descriptions))
    logger.info(f"Wrote {len(descriptions)} descriptions to {config.paths.corpus}")
    return 0


def cmd_build_memory(config: PipelineConfig, options: CommandOptions) -> int:
    entries = read_corpus(_require(config.paths.corpus, "description corpus", "describe"))
    if not entries:
        raise InputError(f"{config.paths.corpus} holds no descriptions")
    memory = CaseMemory(
        entries,
        bits=config.alarms.bits,
        default_k=config.memory.k,
        similarity_kind=config.memory.similarity,
        thresholds=config.thresholds,
        use_accelerator=config.memory.use_accelerator,
    )
    memory.save(config.paths.memory, config.config_hash(), fixed_clock=options.fixed_clock)
    return 0


def cmd_build_kb(config: PipelineConfig, options: CommandOptions) -> int:
    if config.paths.knowledge_manifest is None:
        raise ConfigurationError("no knowledge manifest configured (paths.knowledge_manifest)")
    documents = load_documents(config.paths.knowledge_manifest)
    kb = KnowledgeBase.build(
        documents,
        max_tokens=config.knowledge.max_tokens,
        overlap_tokens=config.knowledge.overlap_tokens,
        default_r=config.knowledge.r,
        similarity_kind=config.memory.similarity,
        thresholds=config.thresholds,
        use_accelerator=config.memory.use_accelerator,
    )
    kb.save(config.paths.kb, config.config_hash(), fixed_clock=options.fixed_clock)
    return 0


def cmd_diagnose(config: PipelineConfig, options: CommandOptions) -> int:
    memory = _load_memory(config)
    kb = _load_kb(config)
    registry = _registry(config)

    records_path = options.records or config.paths.decoded
    records = read_decoded_records(_require(records_path, "decoded records", "ingest"))
    if options.record_ids:
        wanted = set(options.record_ids)
        records = [r for r in records if r.record_id in wanted]
        missing = wanted - {r.record_id for r in records}
        if missing:
            raise InputError(f"unknown record ids: {', '.join(sorted(missing))}")
    if not records:
        raise InputError("no records to diagnose")

    descriptions = describe_records(
        records, config.thresholds, registry, _templates(config), max_workers=config.jobs
    )
    backend = build_backend(config.generator, registry.notes_by_name())
    agent = DiagnosisAgent(
        memory,
        kb,
        registry,
        backend,
        k=config.memory.k,
        r=config.knowledge.r,
        voting=config.memory.voting,
        exclusion=options.exclusion or ExclusionRule.NONE,
        max_in_flight=config.generator.max_in_flight,
    )

    async def run() -> List[DiagnosisOutput]:
        try:
            return await agent.diagnose_batch(descriptions)
        finally:
            await agent.aclose()

    outputs = asyncio.run(run())
    config.paths.diagnoses.parent.mkdir(parents=True, exist_ok=True)
    with config.paths.diagnoses.open("w", encoding="utf-8", newline="\n") as handle:
        for output in outputs:
            handle.write(json.dumps(output.model_dump(mode="json"), sort_keys=True) + "\n")
    _stamp(
        config, options, config.paths.diagnoses, DIAGNOSES_KIND, len(outputs),
        k=config.memory.k, r=config.knowledge.r,
    )
    logger.info(f"Wrote {len(outputs)} diagnoses to {config.paths.diagnoses}")
    return 0


def cmd_evaluate(config: PipelineConfig, options: CommandOptions) -> int:
    memory = _load_memory(config)
    test_path = options.test_corpus or config.paths.corpus
    test_items = read_corpus(_require(test_path, "test corpus", "describe"))
    _check_test_corpus(config, options, test_path)

    exclusion = options.exclusion or config.evaluation.exclusion
    result = evaluate_pipeline(
        memory,
        test_items,
        thresholds=config.thresholds,
        k=config.memory.k,
        exclusion=exclusion,
        voting=config.memory.voting,
        max_workers=config.jobs,
    )
    registry = _registry(config)
    write_reports(result, config.paths.reports, names=dict(registry.names))
    with (config.paths.reports / PREDICTIONS_FILE).open("w", encoding="utf-8", newline="\n") as handle:
        for prediction in result.predictions:
            handle.write(json.dumps(asdict(prediction), sort_keys=True) + "\n")
    _stamp(
        config, options, config.paths.reports, REPORTS_KIND, len(result.predictions),
        k=config.memory.k, exclusion=exclusion.value, voting=config.memory.voting.value,
    )
    return 0


def cmd_report(config: PipelineConfig, options: CommandOptions) -> int:
    console = options.console or Console()
    _require(config.paths.reports / METRICS_JSON, "evaluation metrics", "evaluate")
    report = read_metric_report(config.paths.reports)
    frame = metric_table(report)

    table = Table(title="Fault detection metrics")
    table.add_column("Metric", style="cyan")
    for column in frame.columns:
        table.add_column(str(column), justify="right")
    for metric, row in frame.iterrows():
        table.add_row(str(metric), *[str(value) for value in row])
    console.print(table)

    if config.paths.diagnoses.exists():
        counts: Dict[str, int] = {}
        with config.paths.diagnoses.open("r", encoding="utf-8") as handle:
            for line in handle:
                if line.strip():
                    output = DiagnosisOutput.model_validate_json(line)
                    counts[output.generated_by.value] = counts.get(output.generated_by.value, 0) + 1
        summary = Table(title="Diagnoses by generator")
        summary.add_column("Generator", style="cyan")
        summary.add_column("Count", justify="right")
        for generator, count in sorted(counts.items()):
            summary.add_row(generator, str(count))
        console.print(summary)
    return 0


HANDLERS: Dict[str, Callable[[PipelineConfig, CommandOptions], int]] = {
    "ingest": cmd_ingest,
    "describe": cmd_describe,
    "build-memory": cmd_build_memory,
    "build-kb": cmd_build_kb,
    "diagnose": cmd_diagnose,
    "evaluate": cmd_evaluate,
    "report": cmd_report,
}


def run_command(name: str, config: PipelineConfig, options: Optional[CommandOptions] = None) -> int:
    """
    Run one pipeline command.

    Args:
        name: Command name
        config: Validated pipeline configuration
        options: Per-invocation flags

    Returns:
        Process exit status (0 on success)

    Raises:
        BatteryFDDError: any pipeline failure; exit_code gives its status
    """
    if name not in HANDLERS:
        raise ConfigurationError(f"unknown command '{name}'")
    options = options or CommandOptions()
    config.paths.workdir.mkdir(parents=True, exist_ok=True)
    logger.info(f"Running {name} in {config.paths.workdir}")
    return HANDLERS[name](config, options)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="battery-fdd",
        description="Training-free vehicle battery fault detection and diagnosis",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", type=Path, help="YAML configuration file")
    parser.add_argument("--jobs", type=int, help="Worker bound for parallel stages")
    parser.add_argument("--fixed-clock", action="store_true",
                        help="Write a fixed timestamp into manifests")
    parser.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"])

    overrides = parser.add_argument_group("overrides")
    overrides.add_argument("--input", type=Path, help="Raw telemetry file")
    overrides.add_argument("--workdir", type=Path, help="Artifact directory")
    overrides.add_argument("--k", type=int, help="Neighbors per query")
    overrides.add_argument("--r", type=int, help="Knowledge chunks per query")
    overrides.add_argument("--voting", choices=[m.value for m in VotingMode])
    overrides.add_argument("--similarity", choices=[s.value for s in SimilarityKind])
    overrides.add_argument("--exclusion", choices=[e.value for e in ExclusionRule])
    overrides.add_argument("--backend", choices=[b.value for b in BackendKind])

    selection = parser.add_argument_group("record selection")
    selection.add_argument("--records", type=Path, help="Decoded records to diagnose")
    selection.add_argument("--record-id", action="append", default=[], dest="record_ids",
                           help="Diagnose only this record id (repeatable)")
    selection.add_argument("--test-corpus", type=Path, help="Corpus evaluated against the memory")
    return parser


def apply_overrides(config: PipelineConfig, args: argparse.Namespace) -> PipelineConfig:
    """Flags win over file values"""
    data = config.model_dump()
    if args.jobs is not None:
        data["jobs"] = args.jobs
    if args.log_level is not None:
        data["log_level"] = args.log_level
    if args.input is not None:
        data["paths"]["input"] = args.input
    if args.workdir is not None:
        data["paths"]["workdir"] = args.workdir
    if args.k is not None:
        data["memory"]["k"] = args.k
    if args.r is not None:
        data["knowledge"]["r"] = args.r
    if args.voting is not None:
        data["memory"]["voting"] = args.voting
    if args.similarity is not None:
        data["memory"]["similarity"] = args.similarity
    if args.backend is not None:
        data["generator"]["kind"] = args.backend
    try:
        return PipelineConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigurationError(f"invalid override: {e}") from e


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level or "INFO")
    try:
        config = PipelineConfig.from_file(args.config) if args.config else PipelineConfig()
        config = apply_overrides(config, args)
        setup_logging(config.log_level)
        options = CommandOptions(
            fixed_clock=args.fixed_clock,
            records=args.records,
            record_ids=list(args.record_ids),
            test_corpus=args.test_corpus,
            exclusion=ExclusionRule(args.exclusion) if args.exclusion else None,
        )
        return run_command(args.command, config, options)
    except BatteryFDDError as e:
        logger.error(f"{args.command} failed: {e}")
        return e.exit_code
    except Exception as e:
        logger.exception(f"{args.command} failed unexpectedly: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
