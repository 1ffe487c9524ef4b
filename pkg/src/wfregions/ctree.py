"""Concurrency trees: a compact generator for every marking of a net.

A concurrency tree (C-tree) abstracts a block-structured net down to what can
be marked together.  A :class:`CNode` holds, in walk order, elements that are
mutually exclusive alternatives — place labels plus :class:`CBlock` elements.
A CBlock stands for a parallel block: it holds one branch CNode per parallel
branch, and a marking drawn from it takes one sub-marking from *every*
branch.  Sequences, choices, and loops never deepen the tree; only parallel
blocks do.

On top of the tree this module provides: the set of places concurrent with a
given place (:func:`gcs`), exhaustive and sampled marking generation,
deletion of places, the dysfunctionality test (can the tree still generate a
marking?), break-off sets (place sets hitting every marking), and the
marking-preserving embedding check (:func:`mpe_exists`) that decides whether
every marking one tree generates is also generable by another.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property

from .ecws import AndBlock, BlockTree, LoopBlock, Place, SeqBlock, Transition, XorBlock
from .errors import UnknownPlaceError
from .wfnet import Marking

# ── tree types ──────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class CNode:
    """Mutually exclusive alternatives: place labels and parallel blocks."""

    elements: tuple["str | CBlock", ...]

    @cached_property
    def own_places(self) -> frozenset[str]:
        """Places held directly by this node (not inside block elements)."""
        return frozenset(el for el in self.elements if isinstance(el, str))

    @cached_property
    def blocks(self) -> tuple["CBlock", ...]:
        return tuple(el for el in self.elements if isinstance(el, CBlock))


@dataclass(frozen=True)
class CBlock:
    """A parallel block: one branch node per concurrent branch."""

    branches: tuple[CNode, ...]


CTree = CNode

#: Path of a node inside a tree: one (block index, branch index) step per
#: nesting level, where the block index counts only the CBlock elements of a
#: node, in element order.  The root's path is the empty tuple.
NodePath = tuple[tuple[int, int], ...]


# ── construction ────────────────────────────────────────────────────────────


def build_ctree(tree: BlockTree) -> CTree:
    """Abstract a block tree into its concurrency tree.

    Places of sequences, choice branches, and both loop parts all land in the
    same node; each parallel block becomes a CBlock element with one branch
    node per parallel branch.
    """

    def collect(seq: SeqBlock):
        for child in seq.children:
            if isinstance(child, Place):
                yield child.label
            elif isinstance(child, Transition):
                continue
            elif isinstance(child, AndBlock):
                yield CBlock(tuple(CNode(tuple(collect(b))) for b in child.branches))
            elif isinstance(child, XorBlock):
                for branch in child.branches:
                    yield from collect(branch)
            else:
                assert isinstance(child, LoopBlock)
                yield from collect(child.forward)
                yield from collect(child.back)

    return CNode(tuple(collect(tree)))


def places(c: CTree) -> frozenset[str]:
    """All place labels anywhere in the tree."""
    acc: set[str] = set()
    stack = [c]
    while stack:
        node = stack.pop()
        for el in node.elements:
            if isinstance(el, str):
                acc.add(el)
            else:
                stack.extend(el.branches)
    return frozenset(acc)


def node_at(c: CTree, path: NodePath) -> CNode:
    """Navigate to the node addressed by ``path`` (see :data:`NodePath`)."""
    node = c
    for block_idx, branch_idx in path:
        node = node.blocks[block_idx].branches[branch_idx]
    return node


# ── concurrent-submarking generator ─────────────────────────────────────────


def gcs(p: str, c: CTree) -> CTree:
    """The sub-tree generating exactly the markings concurrent with ``p``.

    Along the path from the root to p's node, every node is stripped down to
    the single on-path block, sibling branches are kept whole, and p's own
    branch is cut off at the last step.  A place held by the root node is
    concurrent with nothing: its result is the empty tree.
    """
    path = _path_to(p, c)
    if path is None:
        raise UnknownPlaceError(f"place {p!r} does not occur in the tree")
    if not path:
        return CNode(())
    _, block, branch_idx = path[-1]
    cut = tuple(b for i, b in enumerate(block.branches) if i != branch_idx)
    current = CBlock(cut)
    for _, block, branch_idx in reversed(path[:-1]):
        connector = CNode((current,))
        replaced = tuple(
            connector if i == branch_idx else b for i, b in enumerate(block.branches)
        )
        current = CBlock(replaced)
    return CNode((current,))


def _path_to(p: str, c: CTree) -> list[tuple[CNode, CBlock, int]] | None:
    """Steps (node, on-path block, branch index) to the node holding p."""
    if p in c.own_places:
        return []
    for block in c.blocks:
        for i, branch in enumerate(block.branches):
            rest = _path_to(p, branch)
            if rest is not None:
                return [(c, block, i), *rest]
    return None


# ── marking generation ──────────────────────────────────────────────────────


def markings_of(c: CTree) -> frozenset[Marking]:
    """Every complete marking the tree generates.

    A marking picks one element of the node; a block element contributes one
    complete sub-marking from each of its branches.  A node with no pickable
    element generates nothing at all.
    """
    out: set[Marking] = set()
    for el in c.elements:
        if isinstance(el, str):
            out.add(frozenset((el,)))
        else:
            combos: set[frozenset[str]] = {frozenset()}
            for branch in el.branches:
                sub = markings_of(branch)
                combos = {m | s for m in combos for s in sub}
                if not combos:
                    break
            out.update(combos)
    return frozenset(out)


def sample_marking(c: CTree, rng: random.Random | None = None) -> Marking:
    """Draw one marking at random; raises ValueError on a dysfunctional tree."""
    rng = rng or random.Random()
    if is_dysfunctional(c):
        raise ValueError("the tree generates no markings")

    def draw(node: CNode) -> frozenset[str]:
        viable = [el for el in node.elements if _generable_element(el)]
        el = rng.choice(viable)
        if isinstance(el, str):
            return frozenset((el,))
        picked: frozenset[str] = frozenset()
        for branch in el.branches:
            picked |= draw(branch)
        return picked

    return draw(c)


# ── deletion, dysfunctionality, break-off ───────────────────────────────────


def delete_places(c: CTree, labels: frozenset[str] | set[str]) -> CTree:
    """Remove the given places from every node; the shape stays intact."""
    new_elements: list[str | CBlock] = []
    for el in c.elements:
        if isinstance(el, str):
            if el not in labels:
                new_elements.append(el)
        else:
            new_elements.append(
                CBlock(tuple(delete_places(b, labels) for b in el.branches))
            )
    return CNode(tuple(new_elements))


def _generable_element(el: "str | CBlock") -> bool:
    if isinstance(el, str):
        return True
    return all(_generable(b) for b in el.branches)


def _generable(node: CNode) -> bool:
    return any(_generable_element(el) for el in node.elements)


def has_empty_path(c: CTree) -> bool:
    """Fast screen: can a walk from the root die in a place-free dead end?

    A node with no place elements whose blocks all run into further empty
    paths cannot generate anything, so every dysfunctional tree has an empty
    path.  The converse fails — a sibling branch may still provide places —
    so a ``True`` here only means "possibly dysfunctional"; ``False`` proves
    the tree functional.
    """
    if c.own_places:
        return False
    if not c.elements:
        return True
    return any(
        any(has_empty_path(b) for b in block.branches) for block in c.blocks
    )


def is_dysfunctional(c: CTree) -> bool:
    """True iff the tree generates no marking at all."""
    if not has_empty_path(c):
        return False
    return not _generable(c)


def is_breakoff(c: CTree, labels: frozenset[str] | set[str]) -> bool:
    """True iff every marking of the tree meets ``labels``.

    Equivalently: deleting the set leaves the tree unable to generate any
    marking.
    """
    return is_dysfunctional(delete_places(c, frozenset(labels)))


# ── marking-preserving embedding ────────────────────────────────────────────


def mpe_exists(c: CTree, c2: CTree) -> bool:
    """Can ``c2`` generate every marking that ``c`` generates?

    Checked structurally: each node's places must reappear in the matched
    node of ``c2``, each of its marking-capable blocks must map injectively
    onto a distinct block there, and matched blocks must pair up their
    branches one-to-one (equal branch counts), recursively.  A block with a
    dead branch (possible after place deletion) never realizes a marking, so
    it imposes no requirement on ``c2``.
    """
    return find_embedding(c, c2) is not None


def find_embedding(c: CTree, c2: CTree) -> dict[NodePath, NodePath] | None:
    """Like :func:`mpe_exists` but returns a node-path witness.

    The witness maps the path of every node of ``c`` to the path of the node
    of ``c2`` it embeds into (paths as in :data:`NodePath`).  Subtrees inside
    non-generable blocks carry no markings and are absent from the witness.
    """
    memo: dict[tuple[int, int], bool] = {}

    def _live_blocks(n: CNode) -> list[int]:
        return [i for i, b in enumerate(n.blocks) if _generable_element(b)]

    def node_ok(n: CNode, n2: CNode) -> bool:
        key = (id(n), id(n2))
        if key in memo:
            return memo[key]
        memo[key] = False  # break self-recursion defensively; trees are acyclic
        ok = n.own_places <= n2.own_places and _match_blocks(n, n2) is not None
        memo[key] = ok
        return ok

    def _match_blocks(n: CNode, n2: CNode) -> list[int] | None:
        """Injective assignment of n's live blocks into n2's; None if impossible."""
        live = _live_blocks(n)
        return _max_matching(
            len(live),
            len(n2.blocks),
            lambda i, j: _block_pair_ok(n.blocks[live[i]], n2.blocks[j]),
        )

    def _block_pair_ok(b: CBlock, b2: CBlock) -> bool:
        if len(b.branches) != len(b2.branches):
            return False
        return (
            _max_matching(
                len(b.branches),
                len(b2.branches),
                lambda i, j: node_ok(b.branches[i], b2.branches[j]),
            )
            is not None
        )

    if not node_ok(c, c2):
        return None

    witness: dict[NodePath, NodePath] = {}

    def record(n: CNode, n2: CNode, path: NodePath, path2: NodePath) -> None:
        witness[path] = path2
        assignment = _match_blocks(n, n2)
        assert assignment is not None
        for local, j in enumerate(assignment):
            i = _live_blocks(n)[local]
            b, b2 = n.blocks[i], n2.blocks[j]
            branch_map = _max_matching(
                len(b.branches),
                len(b2.branches),
                lambda x, y, _b=b, _b2=b2: node_ok(_b.branches[x], _b2.branches[y]),
            )
            assert branch_map is not None
            for x, y in enumerate(branch_map):
                record(
                    b.branches[x],
                    b2.branches[y],
                    (*path, (i, x)),
                    (*path2, (j, y)),
                )

    record(c, c2, (), ())
    return witness


def _max_matching(n_left: int, n_right: int, edge) -> list[int] | None:
    """Left-saturating bipartite matching; returns right index per left node.

    Classic augmenting-path search; returns None when some left node cannot
    be matched.
    """
    match_right: list[int | None] = [None] * n_right

    def augment(i: int, seen: set[int]) -> bool:
        for j in range(n_right):
            if j in seen or not edge(i, j):
                continue
            seen.add(j)
            if match_right[j] is None or augment(match_right[j], seen):
                match_right[j] = i
                return True
        return False

    for i in range(n_left):
        if not augment(i, set()):
            return None
    out: list[int] = [0] * n_left
    for j, i in enumerate(match_right):
        if i is not None:
            out[i] = j
    return out


# ── text and DOT rendering ──────────────────────────────────────────────────


def mgs_text(c: CTree) -> str:
    """Nested set/tuple notation: nodes in braces, blocks in parentheses."""
    parts = []
    for el in c.elements:
        if isinstance(el, str):
            parts.append(el)
        else:
            parts.append("(" + ",".join(mgs_text(b) for b in el.branches) + ")")
    return "{" + ",".join(parts) + "}"


def ctree_dot(c: CTree) -> str:
    """Graphviz text: nodes as boxes listing places, blocks as squares."""
    lines = ["digraph ctree {", "  rankdir=TB;"]
    counter = 0

    def fresh(prefix: str) -> str:
        nonlocal counter
        counter += 1
        return f"{prefix}{counter}"

    def emit_node(node: CNode) -> str:
        name = fresh("n")
        label = ",".join(el for el in node.elements if isinstance(el, str)) or "∅"
        lines.append(f'  {name} [shape=box, label="{label}"];')
        for block in node.blocks:
            block_name = fresh("b")
            lines.append(f'  {block_name} [shape=square, label=""];')
            lines.append(f"  {name} -> {block_name};")
            for branch in block.branches:
                lines.append(f"  {block_name} -> {emit_node(branch)};")
        return name

    emit_node(c)
    lines.append("}")
    return "\n".join(lines)
