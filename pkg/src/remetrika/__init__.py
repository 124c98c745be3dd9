"""Exact remetrization of finite iterated function systems."""

from .chainmetric import MetricMatrix, WeightSequence, constant, dmu_exact, dmu_truncated, geometric
from .comparison import ComparisonFunction, psi_compose
from .converse import bessaga_metric, level_function, unbounded_metric, wong_metric
from .instance import AffineInstance, FiniteInstance, fixture, fixtures, load_instance, parse_instance
from .monoid import build_automaton, check_condition_a, has_attractor
from .remetrize import remetrize, verify_certificate

__all__ = [
    "AffineInstance",
    "ComparisonFunction",
    "FiniteInstance",
    "MetricMatrix",
    "WeightSequence",
    "bessaga_metric",
    "build_automaton",
    "check_condition_a",
    "constant",
    "dmu_exact",
    "dmu_truncated",
    "fixture",
    "fixtures",
    "geometric",
    "has_attractor",
    "level_function",
    "load_instance",
    "parse_instance",
    "psi_compose",
    "remetrize",
    "unbounded_metric",
    "verify_certificate",
    "wong_metric",
]
