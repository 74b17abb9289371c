"""Approximate core allocations for b-matching (multiple partners matching) games."""

from .bsolver import CertificateError, DualCover, HalfMatching, build_doubled, fold_back, solve, solve_bipartite_certified
from .canonical import OddCycleSet, canonicalize, eliminate_even_closed_trails, eliminate_odd_degree
from .instance import Coalition, Instance, InstanceError, gen_random, gen_tight_family, load_instance, make_instance, save_instance
from .mechanism import AllocationReport, allocate, guarantee_bound, round_odd_cycles, run_mechanism
from .oracle import BudgetExceeded, audit_core, coalition_values, gamma_exact, integrality_gap

__all__ = [
    "AllocationReport",
    "BudgetExceeded",
    "CertificateError",
    "Coalition",
    "DualCover",
    "HalfMatching",
    "Instance",
    "InstanceError",
    "OddCycleSet",
    "allocate",
    "audit_core",
    "build_doubled",
    "canonicalize",
    "coalition_values",
    "eliminate_even_closed_trails",
    "eliminate_odd_degree",
    "fold_back",
    "gamma_exact",
    "gen_random",
    "gen_tight_family",
    "guarantee_bound",
    "integrality_gap",
    "load_instance",
    "make_instance",
    "round_odd_cycles",
    "run_mechanism",
    "save_instance",
    "solve",
    "solve_bipartite_certified",
]
