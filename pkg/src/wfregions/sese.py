"""Baseline change regions built from single-entry/single-exit fragments.

The baseline has three stages.  The static region is every old-net node that
touches an arc present in only one of the two nets.  The dynamic region
grows each connected group of static nodes into the smallest place-bordered
fragment of the old block tree containing it: a contiguous stretch of one
sequence, where parallel, choice, and loop blocks count as indivisible — a
group reaching into a block drags in the whole block, and padding that runs
off a transition-bordered branch drags in the enclosing block instead.  The
improved region then drops each fragment's entry and exit place, keeping
only the interior.

Fragments that overlap, or that meet at a shared transition, merge into one
region; boundaries are re-derived on the merged coverage, so the improved
region is a function of the dynamic place set alone.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ecws import (
    AndBlock,
    BlockTree,
    Element,
    LoopBlock,
    Place,
    SeqBlock,
    Transition,
    XorBlock,
    place_labels,
)
from .wfnet import WfNet

#: Address of a sequence inside the tree: (element index, branch index)
#: steps, where the branch index is the AND/XOR branch position, 0 for a
#: loop's forward part, and 1 for its back part.
_SeqPath = tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class SeseRegion:
    static_nodes: frozenset[str]
    dynamic_places: frozenset[str]
    improved_places: frozenset[str]


def static_region(old: WfNet, new: WfNet) -> frozenset[str]:
    """Old-net nodes incident to arcs present in exactly one net."""
    old_nodes = old.places | old.transitions
    changed = (old.arcs - new.arcs) | (new.arcs - old.arcs)
    touched = {end for arc in changed for end in arc}
    return frozenset(touched & old_nodes)


def dynamic_region(old_tree: BlockTree, static_nodes: frozenset[str]) -> frozenset[str]:
    """Places of the minimal place-bordered fragments covering the changes.

    Static nodes are grouped into connected components (adjacency = sharing
    an arc in the old net, rebuilt here from the tree); each component is
    expanded to its fragment and the fragment place sets are unioned.
    """
    if not static_nodes:
        return frozenset()
    index = _index_tree(old_tree)
    adjacency = _static_adjacency(old_tree, static_nodes)
    out: set[str] = set()
    for component in _components(adjacency):
        seq_path, lo, hi = _expand(old_tree, index, component)
        seq = _seq_at(old_tree, seq_path)
        out |= place_labels(SeqBlock(tuple(seq.children[lo : hi + 1])))
    return frozenset(out)


def improved_region(old_tree: BlockTree, dynamic_places: frozenset[str]) -> frozenset[str]:
    """Dynamic region minus the entry and exit place of every fragment.

    Fragments are recovered from the covered elements of the tree: maximal
    covered stretches of each sequence, trimmed at both ends to genuine
    places (blocks trimmed off an end are scanned on their own, as are
    blocks that are not fully covered).
    """
    removed: set[str] = set()

    def covered(el: Element) -> bool:
        if isinstance(el, Place):
            return el.label in dynamic_places
        if isinstance(el, Transition):
            return True
        return _block_places(el) <= dynamic_places

    def descend(el: Element) -> None:
        if isinstance(el, (AndBlock, XorBlock)):
            for branch in el.branches:
                scan(branch)
        elif isinstance(el, LoopBlock):
            scan(el.forward)
            scan(el.back)

    def scan(seq: SeqBlock) -> None:
        runs: list[tuple[int, int]] = []
        start: int | None = None
        for i, child in enumerate(seq.children):
            if covered(child):
                if start is None:
                    start = i
            else:
                if start is not None:
                    runs.append((start, i - 1))
                    start = None
                descend(child)
        if start is not None:
            runs.append((start, len(seq.children) - 1))
        for lo, hi in runs:
            while lo <= hi and not isinstance(seq.children[lo], Place):
                descend(seq.children[lo])
                lo += 1
            while hi >= lo and not isinstance(seq.children[hi], Place):
                descend(seq.children[hi])
                hi -= 1
            if lo <= hi:
                removed.add(seq.children[lo].label)  # type: ignore[union-attr]
                removed.add(seq.children[hi].label)  # type: ignore[union-attr]

    scan(old_tree)
    return dynamic_places - removed


def sese_region(old_tree: BlockTree, old: WfNet, new: WfNet) -> SeseRegion:
    static = static_region(old, new)
    dynamic = dynamic_region(old_tree, static)
    improved = improved_region(old_tree, dynamic)
    return SeseRegion(static, dynamic, improved)


def region_json(region: SeseRegion) -> dict:
    return {
        "static": sorted(region.static_nodes),
        "dynamic": sorted(region.dynamic_places),
        "improved": sorted(region.improved_places),
    }


# ── fragment expansion machinery ────────────────────────────────────────────


def _block_places(el: Element) -> frozenset[str]:
    if isinstance(el, (AndBlock, XorBlock)):
        out: frozenset[str] = frozenset()
        for branch in el.branches:
            out |= place_labels(branch)
        return out
    assert isinstance(el, LoopBlock)
    return place_labels(el.forward) | place_labels(el.back)


def _index_tree(tree: BlockTree) -> dict[str, tuple[_SeqPath, int]]:
    """Label → (address of its sequence, its element index there)."""
    index: dict[str, tuple[_SeqPath, int]] = {}

    def walk(seq: SeqBlock, path: _SeqPath) -> None:
        for i, child in enumerate(seq.children):
            if isinstance(child, (Place, Transition)):
                index[child.label] = (path, i)
            elif isinstance(child, (AndBlock, XorBlock)):
                for b, branch in enumerate(child.branches):
                    walk(branch, (*path, (i, b)))
            else:
                walk(child.forward, (*path, (i, 0)))
                walk(child.back, (*path, (i, 1)))

    walk(tree, ())
    return index


def _seq_at(tree: BlockTree, path: _SeqPath) -> SeqBlock:
    seq = tree
    for elem_idx, branch_idx in path:
        child = seq.children[elem_idx]
        if isinstance(child, (AndBlock, XorBlock)):
            seq = child.branches[branch_idx]
        else:
            assert isinstance(child, LoopBlock)
            seq = child.forward if branch_idx == 0 else child.back
    return seq


def _static_adjacency(
    tree: BlockTree, static_nodes: frozenset[str]
) -> dict[str, set[str]]:
    from .ecws import build_net

    net = build_net(tree)
    adjacency: dict[str, set[str]] = {n: set() for n in static_nodes}
    for a, b in net.arcs:
        if a in static_nodes and b in static_nodes:
            adjacency[a].add(b)
            adjacency[b].add(a)
    return adjacency


def _components(adjacency: dict[str, set[str]]) -> list[set[str]]:
    seen: set[str] = set()
    components: list[set[str]] = []
    for start in sorted(adjacency):
        if start in seen:
            continue
        component = {start}
        queue = [start]
        while queue:
            for neighbour in adjacency[queue.pop()]:
                if neighbour not in component:
                    component.add(neighbour)
                    queue.append(neighbour)
        seen |= component
        components.append(component)
    return components


def _expand(
    tree: BlockTree, index: dict[str, tuple[_SeqPath, int]], component: set[str]
) -> tuple[_SeqPath, int, int]:
    """Smallest place-bordered stretch of one sequence covering the group."""
    paths = [index[label] for label in component]
    common = paths[0][0]
    for seq_path, _ in paths[1:]:
        limit = 0
        for a, b in zip(common, seq_path):
            if a != b:
                break
            limit += 1
        common = common[:limit]
    idxs = {
        elem_idx if len(seq_path) == len(common) else seq_path[len(common)][0]
        for seq_path, elem_idx in paths
    }
    while True:
        seq = _seq_at(tree, common)
        lo, hi = min(idxs), max(idxs)
        while lo >= 0 and not isinstance(seq.children[lo], Place):
            lo -= 1
        while hi < len(seq.children) and not isinstance(seq.children[hi], Place):
            hi += 1
        if lo < 0 or hi >= len(seq.children):
            # padding ran off a transition-bordered branch: the enclosing
            # block becomes part of the fragment, so retry one level up
            idxs = {common[-1][0]}
            common = common[:-1]
            continue
        return common, lo, hi
