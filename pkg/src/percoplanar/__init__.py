"""Planarity of randomly percolated graphs: samplers, planarity oracle,
checkable non-planarity certificates, a constructive witness search and a
Monte Carlo harness."""

from .analysis import expected_short_cycles, giant_fixed_point, predicted_giant, series_identity_check
from .generators import FamilySpec, generate
from .graph import Graph, build_graph, girth, largest_component, read_edge_list, write_edge_list
from .harness import ExperimentConfig, emit_csv, load_config, parse_config, run_sweep, summarize
from .percolation import SampleParams, coupled_sampler, percolate, sample_gnp, two_round_sample
from .planarity import (Certificate, density_certificate, euler_bound, is_planar,
                        kuratowski_certificate, verify_certificate)
from .witness import WitnessParams, find_witness

__version__ = "0.1.0"

__all__ = [
    "Graph", "build_graph", "girth", "largest_component", "read_edge_list", "write_edge_list",
    "FamilySpec", "generate",
    "SampleParams", "coupled_sampler", "percolate", "sample_gnp", "two_round_sample",
    "Certificate", "density_certificate", "euler_bound", "is_planar", "kuratowski_certificate",
    "verify_certificate",
    "WitnessParams", "find_witness",
    "giant_fixed_point", "predicted_giant", "series_identity_check", "expected_short_cycles",
    "ExperimentConfig", "parse_config", "load_config", "run_sweep", "summarize", "emit_csv",
]
