"""Interpreter, test harness, coverage and execution traces."""

from .harness import (
    CoverageMap,
    capture_traces,
    coverage_of_suite,
    dump_trace,
    load_trace,
    run_suite,
    run_test,
    suite_passes,
)
from .interpreter import (
    ASSERT_FAIL,
    DEFAULT_FUEL,
    PASS,
    RUNTIME_ERROR,
    TIMEOUT,
    ExecutionTrace,
    Interpreter,
    TestOutcome,
    render,
)

__all__ = [
    "ASSERT_FAIL",
    "DEFAULT_FUEL",
    "PASS",
    "RUNTIME_ERROR",
    "TIMEOUT",
    "CoverageMap",
    "ExecutionTrace",
    "Interpreter",
    "TestOutcome",
    "capture_traces",
    "coverage_of_suite",
    "dump_trace",
    "load_trace",
    "render",
    "run_suite",
    "run_test",
    "suite_passes",
]
