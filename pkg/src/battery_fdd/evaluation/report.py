"""
Evaluation reports - metric tables, flow and graph records, SVG figures
"""

import json
import logging
import math
from pathlib import Path
from typing import Dict, List, Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

from ..models import CombinationFlow, CooccurrenceGraph, MetricReport, VehicleReport  # noqa: E402
from .pipeline import EvaluationResult  # noqa: E402

logger = logging.getLogger(__name__)

METRICS_CSV = "metrics.csv"
METRICS_JSON = "metrics.json"
FLOW_JSONL = "combination_flow.jsonl"
TRUTH_GRAPH_JSONL = "cooccurrence_truth.jsonl"
PRED_GRAPH_JSONL = "cooccurrence_pred.jsonl"
FLOW_SVG = "combination_flow.svg"
GRAPH_SVG = "cooccurrence.svg"

NOT_AVAILABLE = "n/a"
SVG_HASH_SALT = "battery-fdd"

# Row label -> (section, attribute)
METRIC_ROWS = {
    "Micro-Precision": ("multi_label", "precision"),
    "Micro-Recall": ("multi_label", "recall"),
    "Micro-F1": ("multi_label", "f1"),
    "Micro-Jaccard": ("multi_label", "jaccard"),
    "Anomaly-Accuracy": ("binary", "accuracy"),
    "Anomaly-Precision": ("binary", "precision"),
    "Anomaly-Recall": ("binary", "recall"),
    "Anomaly-F1": ("binary", "f1"),
}


def _cell(report: VehicleReport, section: str, attribute: str) -> str:
    metrics = getattr(report, section)
    if metrics is None:
        return NOT_AVAILABLE
    return f"{getattr(metrics, attribute):.4f}"


def metric_table(report: MetricReport) -> pd.DataFrame:
    """Metric rows by vehicle columns, overall last"""
    columns = report.vehicles + [report.overall]
    data: Dict[str, List[str]] = {}
    for vehicle in columns:
        values = [_cell(vehicle, section, attr) for section, attr in METRIC_ROWS.values()]
        values += [str(vehicle.samples), str(vehicle.fault_samples), str(vehicle.no_evidence)]
        data[vehicle.vehicle_id] = values
    index = list(METRIC_ROWS) + ["Samples", "Fault-Samples", "No-Evidence"]
    table = pd.DataFrame(data, index=index)
    table.index.name = "metric"
    return table


def _write_jsonl(rows: List[dict], path: Path) -> None:
    with path.open("w", encoding="utf-8", newline="\n") as handle:
        for row in rows:
            handle.write(json.dumps(row, sort_keys=True) + "\n")


def flow_rows(flow: CombinationFlow) -> List[dict]:
    return [entry.model_dump(mode="json") for entry in flow.entries]


def graph_rows(graph: CooccurrenceGraph) -> List[dict]:
    rows = [{"type": "node", "bit": bit, "count": count} for bit, count in sorted(graph.nodes.items())]
    rows += [{"type": "edge", "i": e.i, "j": e.j, "count": e.count} for e in graph.edges]
    return rows


def _save_svg(fig, path: Path) -> None:
    with matplotlib.rc_context({"svg.hashsalt": SVG_HASH_SALT, "svg.fonttype": "none"}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def plot_combination_flow(flow: CombinationFlow, path: Path) -> None:
    """Bipartite flow: true combinations left, predicted right, width by count"""
    fig, ax = plt.subplots(figsize=(8, 6))
    true_codes = sorted({e.true_code for e in flow.entries})
    pred_codes = sorted({e.pred_code for e in flow.entries})
    left = {code: i for i, code in enumerate(reversed(true_codes))}
    right = {code: i for i, code in enumerate(reversed(pred_codes))}
    widest = max((e.count for e in flow.entries), default=1)

    for entry in flow.entries:
        ax.plot(
            [0, 1],
            [left[entry.true_code], right[entry.pred_code]],
            color="tab:green" if entry.matched else "tab:red",
            linewidth=1 + 9 * entry.count / widest,
            alpha=0.6,
            solid_capstyle="butt",
        )
    for code, y in left.items():
        ax.text(-0.03, y, str(code), ha="right", va="center", fontsize=8)
    for code, y in right.items():
        ax.text(1.03, y, str(code), ha="left", va="center", fontsize=8)

    ax.set_xlim(-0.3, 1.3)
    ax.set_xticks([0, 1])
    ax.set_xticklabels(["ground truth", "predicted"])
    ax.set_yticks([])
    ax.set_title(f"Alarm combinations ({flow.matched_total}/{flow.total} matched)")
    for side in ("top", "right", "left"):
        ax.spines[side].set_visible(False)
    _save_svg(fig, path)


def _draw_graph(ax, graph: CooccurrenceGraph, title: str, names: Optional[Dict[int, str]]) -> None:
    bits = sorted(graph.nodes)
    positions = {
        bit: (math.cos(2 * math.pi * i / max(len(bits), 1)), math.sin(2 * math.pi * i / max(len(bits), 1)))
        for i, bit in enumerate(bits)
    }
    heaviest = max((e.count for e in graph.edges), default=1)
    largest = max(graph.nodes.values(), default=1)

    for edge in graph.edges:
        (x1, y1), (x2, y2) = positions[edge.i], positions[edge.j]
        ax.plot([x1, x2], [y1, y2], color="tab:gray", linewidth=0.5 + 5 * edge.count / heaviest, alpha=0.7)
    for bit in bits:
        x, y = positions[bit]
        ax.scatter([x], [y], s=80 + 600 * graph.nodes[bit] / largest, color="tab:blue", zorder=3)
        label = names.get(bit, str(bit)) if names else str(bit)
        ax.text(x * 1.18, y * 1.18, label, ha="center", va="center", fontsize=7)

    ax.set_title(title)
    ax.set_xlim(-1.5, 1.5)
    ax.set_ylim(-1.5, 1.5)
    ax.set_aspect("equal")
    ax.axis("off")


def plot_cooccurrence(
    truth: CooccurrenceGraph,
    pred: CooccurrenceGraph,
    path: Path,
    names: Optional[Dict[int, str]] = None,
) -> None:
    """Side-by-side ground-truth and predicted co-occurrence graphs"""
    fig, (left, right) = plt.subplots(1, 2, figsize=(12, 6))
    _draw_graph(left, truth, "Ground-truth co-occurrence", names)
    _draw_graph(right, pred, "Predicted co-occurrence", names)
    _save_svg(fig, path)


def write_reports(
    result: EvaluationResult,
    directory: Path,
    names: Optional[Dict[int, str]] = None,
) -> List[Path]:
    """
    Write every evaluation artifact.

    Args:
        result: Evaluation result
        directory: Output directory, created when missing
        names: Optional bit index to alarm name mapping for figure labels

    Returns:
        Written paths in a fixed order
    """
    directory.mkdir(parents=True, exist_ok=True)
    paths = [directory / name for name in (
        METRICS_CSV, METRICS_JSON, FLOW_JSONL, TRUTH_GRAPH_JSONL, PRED_GRAPH_JSONL, FLOW_SVG, GRAPH_SVG,
    )]
    csv_path, json_path, flow_path, truth_path, pred_path, flow_svg, graph_svg = paths

    metric_table(result.report).to_csv(csv_path, lineterminator="\n")
    json_path.write_text(
        json.dumps(result.report.model_dump(mode="json"), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    _write_jsonl(flow_rows(result.flow), flow_path)
    _write_jsonl(graph_rows(result.truth_graph), truth_path)
    _write_jsonl(graph_rows(result.pred_graph), pred_path)
    plot_combination_flow(result.flow, flow_svg)
    plot_cooccurrence(result.truth_graph, result.pred_graph, graph_svg, names)

    logger.info(f"Wrote {len(paths)} evaluation artifacts to {directory}")
    return paths


def read_metric_report(directory: Path) -> MetricReport:
    return MetricReport.model_validate_json((directory / METRICS_JSON).read_text(encoding="utf-8"))


__all__ = [
    "METRICS_CSV",
    "METRICS_JSON",
    "FLOW_JSONL",
    "TRUTH_GRAPH_JSONL",
    "PRED_GRAPH_JSONL",
    "FLOW_SVG",
    "GRAPH_SVG",
    "NOT_AVAILABLE",
    "metric_table",
    "flow_rows",
    "graph_rows",
    "plot_combination_flow",
    "plot_cooccurrence",
    "write_reports",
    "read_metric_report",
]
