"""
Battery FDD - Training-free vehicle battery fault detection and diagnosis

Turns decoded battery telemetry into mechanism-informed state descriptions,
predicts multi-label alarm codes by similarity-weighted voting over a historical
case memory, retrieves maintenance knowledge and emits validated diagnoses with
maintenance recommendations.
"""

__version__ = "0.1.0"
__author__ = "Battery FDD Team"
__description__ = "Training-free vehicle battery fault detection and diagnosis"
