"""Pedigree encodings of tours, pedigree graphs, and the connectivity game."""

from .cycles import (
    EvolvingCycle,
    Pedigree,
    PedigreeError,
    base_cycle,
    cycle_from_pedigree,
    enumerate_pedigrees,
    find_inserter,
    insert_node,
    kth_edge,
    nu_by_walk,
    pair,
    pedigree_count,
    pedigree_from_cycle,
    sample_uniform,
    segment_between,
)

__version__ = "0.1.0"

__all__ = [
    "EvolvingCycle",
    "Pedigree",
    "PedigreeError",
    "base_cycle",
    "cycle_from_pedigree",
    "enumerate_pedigrees",
    "find_inserter",
    "insert_node",
    "kth_edge",
    "nu_by_walk",
    "pair",
    "pedigree_count",
    "pedigree_from_cycle",
    "sample_uniform",
    "segment_between",
    "__version__",
]
