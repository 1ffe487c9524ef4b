"""Structural change regions for migrating running instances between nets.

Given the old and the new net as concurrency trees, every old place is
classified by how the change affects the markings it participates in:
removed, lost or acquired concurrency, or reformed concurrency (weakly —
some of its concurrent markings die; strongly — all of them do).  From the
classes follow the overestimated and the perfect member places, the
structural change region (every place occurring in some non-migratable
marking), and — when one exists — the perfect region whose members hit
exactly the non-migratable markings, giving per-marking decisions with no
false calls in either direction.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ctree import (
    CTree,
    delete_places,
    gcs,
    is_breakoff,
    mpe_exists,
    places,
)
from .ecws import BlockTree
from .wfnet import Marking, MemberClass

from enum import Enum


class Decision(Enum):
    MIGRATABLE = "migratable"
    NON_MIGRATABLE = "non_migratable"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class ChangeSets:
    """Old-net places grouped by change property (mutually disjoint except
    that strong reformed is a subset of weak reformed)."""

    cr_r: frozenset[str]  # removed in the new net
    cr_lc: frozenset[str]  # lost concurrency (concurrent -> sequential)
    cr_ac: frozenset[str]  # acquired concurrency (sequential -> concurrent)
    cr_wrc: frozenset[str]  # weak reformed concurrency
    cr_src: frozenset[str]  # strong reformed concurrency (subset of weak)


@dataclass(frozen=True)
class AnalysisReport:
    change_sets: ChangeSets
    over: frozenset[str]
    perf: frozenset[str]
    scr: frozenset[str]
    pscr_exists: bool
    pscr: frozenset[str] | None
    per_place: dict[str, MemberClass]


def change_sets(c: CTree, c2: CTree) -> ChangeSets:
    """Classify every old place by its change property.

    Removal is tested first; positional (root/non-root) moves next; places
    concurrent in both nets are compared through their concurrent-submarking
    trees — an embedding failure means weak reformed concurrency, and weak
    plus a break-off of the places lost from (or new in) the concurrent
    surroundings means strong.
    """
    r: set[str] = set()
    lc: set[str] = set()
    ac: set[str] = set()
    wrc: set[str] = set()
    src: set[str] = set()
    new_places = places(c2)
    for p in sorted(places(c)):
        in_root_old = p in c.own_places
        in_root_new = p in c2.own_places
        if p not in new_places:
            r.add(p)
        elif not in_root_old and in_root_new:
            lc.add(p)
        elif in_root_old and not in_root_new:
            ac.add(p)
        elif not in_root_old and not in_root_new:
            g, g2 = gcs(p, c), gcs(p, c2)
            if not mpe_exists(g, g2):
                wrc.add(p)
                lost = places(g) - places(g2)
                gained = places(g2) - places(g)
                if is_breakoff(g, lost) or is_breakoff(g2, gained):
                    src.add(p)
    return ChangeSets(
        cr_r=frozenset(r),
        cr_lc=frozenset(lc),
        cr_ac=frozenset(ac),
        cr_wrc=frozenset(wrc),
        cr_src=frozenset(src),
    )


def member_sets(cs: ChangeSets) -> tuple[frozenset[str], frozenset[str]]:
    """Split the classified places into (overestimated, perfect members)."""
    over = cs.cr_wrc - cs.cr_src
    perf = cs.cr_r | cs.cr_lc | cs.cr_ac | cs.cr_src
    return over, perf


def scr(over: frozenset[str], perf: frozenset[str]) -> frozenset[str]:
    """The structural change region: all places of non-migratable markings."""
    return over | perf


def pscr_exists(
    c: CTree, c2: CTree, over: frozenset[str], perf: frozenset[str]
) -> bool:
    """Decide whether the perfect members hit every non-migratable marking.

    Cheap cases first: with no overestimated places the perfect members are
    the whole region; if they break off the old tree, every old marking hits
    them anyway; if they break off only the new tree, markings avoiding them
    die in the new net unseen.  Otherwise both trees survive deletion of the
    perfect members and the question reduces to an embedding check between
    the surviving trees.
    """
    if not over:
        return True
    if is_breakoff(c, perf):
        return True
    if is_breakoff(c2, perf):
        return False
    return mpe_exists(delete_places(c, perf), delete_places(c2, perf))


def analyze(old: BlockTree, new: BlockTree) -> AnalysisReport:
    """Full structural analysis of an old/new net pair."""
    from .ctree import build_ctree

    c, c2 = build_ctree(old), build_ctree(new)
    cs = change_sets(c, c2)
    over, perf = member_sets(cs)
    region = scr(over, perf)
    exists = pscr_exists(c, c2, over, perf)
    per_place = {
        p: (
            MemberClass.PERFECT_MEMBER
            if p in perf
            else MemberClass.OVERESTIMATION
            if p in over
            else MemberClass.SAFE
        )
        for p in places(c)
    }
    return AnalysisReport(
        change_sets=cs,
        over=over,
        perf=perf,
        scr=region,
        pscr_exists=exists,
        pscr=perf if exists else None,
        per_place=per_place,
    )


def decide_marking(m: Marking, report: AnalysisReport) -> Decision:
    """Decide migratability of one old-net marking from the report.

    With a perfect region the answer is exact both ways.  Without one, a
    marking outside the whole region is migratable and one touching a
    perfect member is not; markings touching only overestimated places stay
    undecided.
    """
    if report.pscr_exists:
        assert report.pscr is not None
        return (
            Decision.NON_MIGRATABLE if m & report.pscr else Decision.MIGRATABLE
        )
    if not m & report.scr:
        return Decision.MIGRATABLE
    if m & report.perf:
        return Decision.NON_MIGRATABLE
    return Decision.UNKNOWN


def report_json(report: AnalysisReport) -> dict:
    """Plain-data form of a report with sorted label arrays."""
    return {
        "cr_r": sorted(report.change_sets.cr_r),
        "cr_lc": sorted(report.change_sets.cr_lc),
        "cr_ac": sorted(report.change_sets.cr_ac),
        "cr_wrc": sorted(report.change_sets.cr_wrc),
        "cr_src": sorted(report.change_sets.cr_src),
        "over": sorted(report.over),
        "perf": sorted(report.perf),
        "scr": sorted(report.scr),
        "pscr_exists": report.pscr_exists,
        "pscr": sorted(report.pscr) if report.pscr is not None else None,
        "per_place": {p: cls.value for p, cls in sorted(report.per_place.items())},
    }
