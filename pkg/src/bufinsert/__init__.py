"""Optimal buffer insertion on RC routing trees with multiple buffer types."""
from .candidates import Candidate, CandidateList, convex_hull, convex_prune, insert_pruned, left_turn, merge_sorted
from .generate import gen_library, gen_net
from .net import (
    Assignment,
    BufferLibrary,
    BufferType,
    Driver,
    Edge,
    NetError,
    NetFormatError,
    RoutingTree,
    Sink,
    ValidationError,
    load_library,
    load_net,
    save_library,
    save_net,
)
from .oracle import BruteForceCapExceeded, EvalReport, brute_force, evaluate
from .solver import SolveResult, add_buffer_baseline, add_buffer_fast, add_wire, leaf_candidates, merge_branches, solve

__version__ = "0.1.0"
