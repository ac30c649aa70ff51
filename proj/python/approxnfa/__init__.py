"""Approximate reduction of packet-matching automata."""

from ._core import (
    Error,
    InfeasibleError,
    InputError,
    InvariantViolation,
    Nfa,
    ParameterError,
    ParseError,
    TrafficSample,
    UnsupportedFeature,
    bfs_reduce,
    compile_regex,
    compile_rules,
    evaluate,
    label,
    load_trace,
    lut_estimate,
    merge,
    merge_prune,
    parse_nfa,
    plan,
    prune,
    read_nfa,
    write_nfa,
    write_raw,
)

__all__ = [name for name in dir() if not name.startswith("_")]
