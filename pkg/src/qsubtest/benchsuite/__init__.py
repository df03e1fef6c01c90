"""Benchmark subroutines, specification oracles and their unit-test catalog."""

from .catalog import PAPER_IO_TYPES, BenchmarkEntry, catalog, get, names
from .oracles import (
    spec_grover,
    spec_inner_product,
    spec_purity,
    spec_qft,
    spec_qpe,
    spec_swap_test,
)
from .programs import all_programs, make_phase_oracle, upower_by_name

__all__ = [
    "BenchmarkEntry", "PAPER_IO_TYPES", "all_programs", "catalog", "get", "make_phase_oracle", "names",
    "spec_grover", "spec_inner_product", "spec_purity", "spec_qft", "spec_qpe", "spec_swap_test",
    "upower_by_name",
]
