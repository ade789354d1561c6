"""
Evaluation pipeline - describe, retrieve and vote per test record, then score
"""

import logging
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

from ..config import ExclusionRule, RuleThresholds, VotingMode
from ..errors import EvaluationError
from ..models import (
    OVERALL_ID,
    CombinationFlow,
    CooccurrenceGraph,
    CorpusEntry,
    MetricReport,
    StateDescription,
    TelemetryRecord,
    VehicleReport,
)
from ..retrieval import CaseMemory, vote, vote_bitwise
from ..text import DescriptionTemplates, describe_record
from .metrics import binary_anomaly_metrics, micro_metrics
from .structure import combination_flow, cooccurrence_graph

logger = logging.getLogger(__name__)

TestItem = Union[TelemetryRecord, StateDescription, CorpusEntry]


@dataclass
class Prediction:
    """Voted code for one test record"""
    record_id: str
    vehicle_id: str
    true_code: int
    pred_code: int
    no_evidence: bool = False


@dataclass
class EvaluationResult:
    """Everything an evaluation run produces"""
    report: MetricReport
    flow: CombinationFlow
    truth_graph: CooccurrenceGraph
    pred_graph: CooccurrenceGraph
    predictions: List[Prediction]


def vehicle_report(
    vehicle_id: str,
    truths: Sequence[int],
    preds: Sequence[int],
    bits: int,
    no_evidence: int = 0,
) -> VehicleReport:
    """Binary metrics always; multi-label metrics only when a fault is present"""
    fault_samples = sum(1 for code in truths if code != 0)
    return VehicleReport(
        vehicle_id=vehicle_id,
        samples=len(truths),
        fault_samples=fault_samples,
        binary=binary_anomaly_metrics(truths, preds),
        multi_label=micro_metrics(truths, preds, bits) if fault_samples else None,
        no_evidence=no_evidence,
    )


def _as_query(
    item: TestItem,
    thresholds: RuleThresholds,
    templates: Optional[DescriptionTemplates],
) -> Tuple[Union[StateDescription, CorpusEntry], int]:
    if isinstance(item, TelemetryRecord):
        return describe_record(item, thresholds, templates), item.alarm_code
    if item.alarm_code is None:
        raise EvaluationError(f"test record {item.record_id} carries no alarm code")
    return item, item.alarm_code


def evaluate_pipeline(
    memory: CaseMemory,
    test_items: Sequence[TestItem],
    thresholds: Optional[RuleThresholds] = None,
    k: Optional[int] = None,
    exclusion: ExclusionRule = ExclusionRule.NONE,
    voting: VotingMode = VotingMode.CODE,
    templates: Optional[DescriptionTemplates] = None,
    max_workers: int = 1,
) -> EvaluationResult:
    """
    Evaluate retrieval-and-vote detection on a test set.

    Args:
        memory: Case memory queried for every test record
        test_items: Telemetry records (described on the fly), descriptions or corpus entries
        thresholds: Band edges used to describe raw records; memory thresholds when None
        k: Neighbors per query; memory default when None
        exclusion: Cases a query may not retrieve
        voting: Whole-code or per-bit voting
        templates: Description templates for raw records
        max_workers: Vehicles evaluated in parallel

    Returns:
        EvaluationResult with vehicles in ascending id order; queries left without
        an eligible case predict 0 and are counted as no_evidence

    Raises:
        EvaluationError: empty test set, or a vehicle id equal to the pooled key
    """
    if not test_items:
        raise EvaluationError("cannot evaluate an empty test set")
    thresholds = thresholds or memory.thresholds

    by_vehicle: Dict[str, List[TestItem]] = defaultdict(list)
    for item in test_items:
        by_vehicle[item.vehicle_id].append(item)
    if OVERALL_ID in by_vehicle:
        raise EvaluationError(f"vehicle id '{OVERALL_ID}' is reserved for the pooled report")
    vehicle_ids = sorted(by_vehicle)

    def predict_vehicle(vehicle_id: str) -> List[Prediction]:
        queried = [_as_query(item, thresholds, templates) for item in by_vehicle[vehicle_id]]
        neighbor_lists = memory.retrieve_topk_many([query for query, _ in queried], k, exclusion)
        predictions = []
        for (query, truth), neighbors in zip(queried, neighbor_lists):
            if not neighbors:
                predictions.append(Prediction(query.record_id, vehicle_id, truth, 0, no_evidence=True))
                continue
            if voting == VotingMode.BITWISE:
                predicted = vote_bitwise(neighbors, memory.bits)
            else:
                predicted = vote(neighbors)
            predictions.append(Prediction(query.record_id, vehicle_id, truth, predicted))
        return predictions

    if max_workers > 1 and len(vehicle_ids) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            grouped = list(pool.map(predict_vehicle, vehicle_ids))
    else:
        grouped = [predict_vehicle(vehicle_id) for vehicle_id in vehicle_ids]

    reports = []
    predictions: List[Prediction] = []
    for vehicle_id, vehicle_predictions in zip(vehicle_ids, grouped):
        truths = [p.true_code for p in vehicle_predictions]
        preds = [p.pred_code for p in vehicle_predictions]
        missing = sum(1 for p in vehicle_predictions if p.no_evidence)
        reports.append(vehicle_report(vehicle_id, truths, preds, memory.bits, missing))
        predictions.extend(vehicle_predictions)

    truths = [p.true_code for p in predictions]
    preds = [p.pred_code for p in predictions]
    missing = sum(1 for p in predictions if p.no_evidence)
    overall = vehicle_report(OVERALL_ID, truths, preds, memory.bits, missing)
    if missing:
        logger.warning(
            f"{missing} queries had no eligible case after {exclusion.value} exclusion; "
            f"predicted normal"
        )

    if overall.multi_label is not None:
        logger.info(
            f"Evaluated {len(predictions)} records over {len(vehicle_ids)} vehicles: "
            f"micro-F1 {overall.multi_label.f1:.4f}, anomaly accuracy {overall.binary.accuracy:.4f}"
        )
    else:
        logger.info(
            f"Evaluated {len(predictions)} fault-free records over {len(vehicle_ids)} vehicles: "
            f"anomaly accuracy {overall.binary.accuracy:.4f}"
        )

    return EvaluationResult(
        report=MetricReport(vehicles=reports, overall=overall),
        flow=combination_flow(truths, preds),
        truth_graph=cooccurrence_graph(truths, memory.bits),
        pred_graph=cooccurrence_graph(preds, memory.bits),
        predictions=predictions,
    )


__all__ = ["OVERALL_ID", "Prediction", "EvaluationResult", "vehicle_report", "evaluate_pipeline"]
