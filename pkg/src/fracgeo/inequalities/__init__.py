"""Inequality and identity checks with structured pass/fail reports."""

from .reports import InequalityReport, InvalidSequenceError, SlicingSequence
from .suite import SUITE_SECTIONS, run_suite

__all__ = [
    "InequalityReport",
    "InvalidSequenceError",
    "SlicingSequence",
    "SUITE_SECTIONS",
    "run_suite",
]
