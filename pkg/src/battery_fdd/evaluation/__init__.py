"""
Detection metrics, structural analyses and evaluation reports
"""

from .metrics import binary_anomaly_metrics, bit_counts, harmonic, micro_metrics, ratio
from .pipeline import EvaluationResult, Prediction, evaluate_pipeline, vehicle_report
from .report import metric_table, read_metric_report, write_reports
from .structure import combination_flow, cooccurrence_graph

__all__ = [
    "binary_anomaly_metrics",
    "bit_counts",
    "harmonic",
    "micro_metrics",
    "ratio",
    "EvaluationResult",
    "Prediction",
    "evaluate_pipeline",
    "vehicle_report",
    "metric_table",
    "read_metric_report",
    "write_reports",
    "combination_flow",
    "cooccurrence_graph",
]
