"""Multilevel coordinate search."""
from .boxes import Box, SweepState, golden_splits, select_boxes, split_decision
from .config import McsConfig, preset
from .init_list import InitializationList, build_init_list, line_search_init
from .local_search import local_search
from .search import initialize, run_mcs, split_by_gain, split_by_rank

__all__ = [
    "Box", "SweepState", "golden_splits", "select_boxes", "split_decision", "McsConfig", "preset",
    "InitializationList", "build_init_list", "line_search_init", "local_search", "initialize",
    "run_mcs", "split_by_gain", "split_by_rank",
]
