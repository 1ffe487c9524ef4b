"""Workflow-net semantics: the token game, reachability, and the migration oracle.

A marking is a plain ``frozenset`` of place labels; because the nets built
from ECWS text are safe, a set is a faithful representation.  The oracle
compares two nets purely through their reachable marking sets: a marking of
the old net is migratable exactly when the same label set is reachable in the
new net.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

from .errors import (
    NotEnabledError,
    SoundnessError,
    StateExplosionError,
    UnknownPlaceError,
)

Marking = frozenset[str]

#: Default bound on the number of distinct markings explored per net.
DEFAULT_STATE_CAP = 1_000_000


def marking_text(marking: Marking) -> str:
    """Canonical text form of a marking: sorted labels joined by commas."""
    return ",".join(sorted(marking))


def parse_marking(text: str) -> Marking:
    """Inverse of :func:`marking_text`; raises ValueError on malformed input."""
    labels = [part.strip() for part in text.split(",")]
    if not labels or any(not label for label in labels):
        raise ValueError(f"malformed marking text: {text!r}")
    for label in labels:
        if not label.replace("_", "a").isalnum() or label[0].isdigit():
            raise ValueError(f"not a valid label: {label!r}")
    return frozenset(labels)


@dataclass(frozen=True)
class WfNet:
    """A workflow net with one source place and one sink place."""

    places: frozenset[str]
    transitions: frozenset[str]
    arcs: frozenset[tuple[str, str]]
    init: str
    end: str

    @cached_property
    def pre(self) -> dict[str, frozenset[str]]:
        """Input places of each transition."""
        acc: dict[str, set[str]] = {t: set() for t in self.transitions}
        for src, dst in self.arcs:
            if dst in acc:
                acc[dst].add(src)
        return {t: frozenset(ps) for t, ps in acc.items()}

    @cached_property
    def post(self) -> dict[str, frozenset[str]]:
        """Output places of each transition."""
        acc: dict[str, set[str]] = {t: set() for t in self.transitions}
        for src, dst in self.arcs:
            if src in acc:
                acc[src].add(dst)
        return {t: frozenset(ps) for t, ps in acc.items()}

    @property
    def initial_marking(self) -> Marking:
        return frozenset((self.init,))

    @property
    def final_marking(self) -> Marking:
        return frozenset((self.end,))


def _check_marking(net: WfNet, marking: Marking) -> None:
    unknown = marking - net.places
    if unknown:
        raise UnknownPlaceError(
            f"marking names places not in the net: {marking_text(unknown)}"
        )


def enabled_transitions(net: WfNet, marking: Marking) -> frozenset[str]:
    """Transitions whose input places are all marked."""
    _check_marking(net, marking)
    return frozenset(t for t in net.transitions if net.pre[t] <= marking)


def fire(net: WfNet, marking: Marking, transition: str) -> Marking:
    """Fire one enabled transition and return the successor marking."""
    _check_marking(net, marking)
    if transition not in net.transitions or not net.pre[transition] <= marking:
        raise NotEnabledError(f"transition {transition!r} is not enabled")
    return (marking - net.pre[transition]) | net.post[transition]


def reachability_graph(
    net: WfNet, cap: int = DEFAULT_STATE_CAP
) -> dict[Marking, tuple[tuple[str, Marking], ...]]:
    """Breadth-first reachability from the initial marking.

    Returns the full successor relation, keyed by marking.  Raises
    StateExplosionError once more than ``cap`` markings have been found and
    SoundnessError if a firing would put a second token on a place (the nets
    this package builds are safe, so that indicates a malformed net).
    """
    start = net.initial_marking
    graph: dict[Marking, tuple[tuple[str, Marking], ...]] = {}
    queue: deque[Marking] = deque((start,))
    seen = {start}
    while queue:
        marking = queue.popleft()
        succs = []
        for t in sorted(net.transitions):
            pre = net.pre[t]
            if not pre <= marking:
                continue
            rest = marking - pre
            if rest & net.post[t]:
                raise SoundnessError(
                    f"firing {t!r} at {{{marking_text(marking)}}} duplicates a token"
                )
            nxt = rest | net.post[t]
            succs.append((t, nxt))
            if nxt not in seen:
                if len(seen) >= cap:
                    raise StateExplosionError(
                        f"more than {cap} markings reachable"
                    )
                seen.add(nxt)
                queue.append(nxt)
        graph[marking] = tuple(succs)
    return graph


def reachable_markings(net: WfNet, cap: int = DEFAULT_STATE_CAP) -> frozenset[Marking]:
    """The set of markings reachable from the initial marking."""
    return frozenset(reachability_graph(net, cap))


def check_soundness(net: WfNet, cap: int = DEFAULT_STATE_CAP) -> None:
    """Verify proper termination and absence of dead transitions.

    Every reachable marking must be able to reach the final marking, and
    every transition must fire somewhere in the reachability graph.
    """
    graph = reachability_graph(net, cap)
    final = net.final_marking
    if final not in graph:
        raise SoundnessError("final marking is not reachable")

    fired = {t for succs in graph.values() for t, _ in succs}
    dead = net.transitions - fired
    if dead:
        raise SoundnessError(f"dead transitions: {', '.join(sorted(dead))}")

    predecessors: dict[Marking, set[Marking]] = {m: set() for m in graph}
    for m, succs in graph.items():
        for _, nxt in succs:
            predecessors[nxt].add(m)
    can_finish = {final}
    queue = deque((final,))
    while queue:
        for prev in predecessors[queue.popleft()]:
            if prev not in can_finish:
                can_finish.add(prev)
                queue.append(prev)
    stuck = set(graph) - can_finish
    if stuck:
        sample = marking_text(min(stuck, key=marking_text))
        raise SoundnessError(f"marking {{{sample}}} cannot reach the final marking")


class MemberClass(Enum):
    """How a place of the old net relates to non-migratable markings."""

    SAFE = "safe"
    OVERESTIMATION = "overestimation"
    PERFECT_MEMBER = "perfect_member"


@dataclass(frozen=True)
class OracleReport:
    """Ground-truth migration analysis computed from reachable marking sets."""

    reachable_old: frozenset[Marking]
    reachable_new: frozenset[Marking]
    non_migratable: frozenset[Marking]
    per_place: dict[str, MemberClass]
    semantic_scr: frozenset[str]
    semantic_pscr_exists: bool
    semantic_pscr: frozenset[str] | None


def oracle_classify(
    old: WfNet, new: WfNet, cap: int = DEFAULT_STATE_CAP
) -> OracleReport:
    """Classify every place of ``old`` by exhaustive marking comparison.

    A place is a perfect member when it appears in at least one old marking
    and every old marking containing it is unreachable in the new net; it is
    an overestimation when it appears in both migratable and non-migratable
    markings; otherwise it is safe.  The semantic counterpart of the perfect
    region exists exactly when every non-migratable marking contains a
    perfect member.
    """
    check_soundness(old, cap)
    check_soundness(new, cap)
    reachable_old = reachable_markings(old, cap)
    reachable_new = reachable_markings(new, cap)
    non_migratable = frozenset(m for m in reachable_old if m not in reachable_new)

    per_place: dict[str, MemberClass] = {}
    for place in old.places:
        with_place = [m for m in reachable_old if place in m]
        bad = [m for m in with_place if m in non_migratable]
        if bad and len(bad) == len(with_place):
            per_place[place] = MemberClass.PERFECT_MEMBER
        elif bad:
            per_place[place] = MemberClass.OVERESTIMATION
        else:
            per_place[place] = MemberClass.SAFE

    perfect = frozenset(
        p for p, cls in per_place.items() if cls is MemberClass.PERFECT_MEMBER
    )
    scr = frozenset(p for m in non_migratable for p in m)
    pscr_exists = all(m & perfect for m in non_migratable)
    return OracleReport(
        reachable_old=reachable_old,
        reachable_new=reachable_new,
        non_migratable=non_migratable,
        per_place=per_place,
        semantic_scr=scr,
        semantic_pscr_exists=pscr_exists,
        semantic_pscr=perfect if pscr_exists else None,
    )
