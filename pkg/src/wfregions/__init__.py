"""Structural change regions for block-structured workflow nets.

Parse old and new process models written as block expressions, compare
their composition trees, and decide which running instances can migrate —
without enumerating a single marking.  A brute-force reachability oracle
and a region-based baseline are included for validation.
"""

from __future__ import annotations

from .ctree import (
    CBlock,
    CNode,
    CTree,
    build_ctree,
    ctree_dot,
    delete_places,
    find_embedding,
    gcs,
    has_empty_path,
    is_breakoff,
    is_dysfunctional,
    markings_of,
    mgs_text,
    mpe_exists,
    places,
    sample_marking,
)
from .ecws import (
    AndBlock,
    BlockTree,
    LoopBlock,
    Place,
    SeqBlock,
    Transition,
    XorBlock,
    build_net,
    format_tree,
    parse,
    place_labels,
    transition_labels,
    validate_tree,
)
from .errors import (
    DuplicateLabelError,
    LexError,
    NotEnabledError,
    ParseError,
    SoundnessError,
    StateExplosionError,
    UnknownPlaceError,
    WfregionsError,
)
from .randomnets import (
    check_pair_agreement,
    mutate,
    random_net_pair,
    random_tree,
    shrink_pair,
)
from .regions import (
    AnalysisReport,
    ChangeSets,
    Decision,
    analyze,
    change_sets,
    decide_marking,
    member_sets,
    pscr_exists,
    report_json,
    scr,
)
from .sese import (
    SeseRegion,
    dynamic_region,
    improved_region,
    region_json,
    sese_region,
    static_region,
)
from .wfnet import (
    DEFAULT_STATE_CAP,
    Marking,
    MemberClass,
    OracleReport,
    WfNet,
    check_soundness,
    enabled_transitions,
    fire,
    marking_text,
    oracle_classify,
    parse_marking,
    reachability_graph,
    reachable_markings,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisReport",
    "AndBlock",
    "BlockTree",
    "CBlock",
    "CNode",
    "CTree",
    "ChangeSets",
    "DEFAULT_STATE_CAP",
    "Decision",
    "DuplicateLabelError",
    "LexError",
    "LoopBlock",
    "Marking",
    "MemberClass",
    "NotEnabledError",
    "OracleReport",
    "ParseError",
    "Place",
    "SeqBlock",
    "SeseRegion",
    "SoundnessError",
    "StateExplosionError",
    "Transition",
    "UnknownPlaceError",
    "WfNet",
    "WfregionsError",
    "XorBlock",
    "analyze",
    "build_ctree",
    "build_net",
    "change_sets",
    "check_pair_agreement",
    "check_soundness",
    "ctree_dot",
    "decide_marking",
    "delete_places",
    "dynamic_region",
    "enabled_transitions",
    "find_embedding",
    "fire",
    "format_tree",
    "gcs",
    "has_empty_path",
    "improved_region",
    "is_breakoff",
    "is_dysfunctional",
    "marking_text",
    "markings_of",
    "member_sets",
    "mgs_text",
    "mpe_exists",
    "mutate",
    "oracle_classify",
    "parse",
    "parse_marking",
    "place_labels",
    "places",
    "pscr_exists",
    "random_net_pair",
    "random_tree",
    "reachability_graph",
    "reachable_markings",
    "region_json",
    "report_json",
    "sample_marking",
    "scr",
    "sese_region",
    "shrink_pair",
    "static_region",
    "transition_labels",
    "validate_tree",
]
