"""Parsing and printing of block-structured workflow nets in ECWS text form.

The text form writes a net as an alternating sequence of place and transition
labels with three bracket constructs::

    p1 t1 p2 t2 p3                    plain sequence
    p1 t1 (p2 t2 p3)(p4 t3 p5) t4 p6  parallel split/join, 2+ branches
    p1 [t1 p2 t2][t3 p3 t4] p5        exclusive choice, 2+ branches
    p1 t1 {p2 t2 p3}{t4 p4 t5} t6 p6  loop: forward part, then back part

Parenthesised branches are place-bordered and sit between the fork and join
transitions.  Bracketed branches are transition-bordered and sit between two
places.  The first loop group is the place-bordered forward part, the second
the transition-bordered way back.  Whitespace and commas are interchangeable
separators, ``#`` starts a comment running to end of line, and a letter
directly after a digit starts a new label, so ``p1t1p2`` reads as three
labels.

``parse`` produces a validated block tree, ``format_tree`` prints the
canonical separator-free text, and ``build_net`` wires the tree into a
:class:`~wfregions.wfnet.WfNet`.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DuplicateLabelError, LexError, ParseError, SoundnessError
from .wfnet import WfNet

# ── block tree ──────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class Place:
    label: str


@dataclass(frozen=True)
class Transition:
    label: str


@dataclass(frozen=True)
class SeqBlock:
    """An alternating run of place-like and transition-like elements."""

    children: tuple["Element", ...]


@dataclass(frozen=True)
class AndBlock:
    """Parallel branches, each place-bordered, between a fork and a join."""

    branches: tuple[SeqBlock, ...]


@dataclass(frozen=True)
class XorBlock:
    """Alternative branches, each transition-bordered, between two places."""

    branches: tuple[SeqBlock, ...]


@dataclass(frozen=True)
class LoopBlock:
    """A place-bordered forward part plus a transition-bordered back part."""

    forward: SeqBlock
    back: SeqBlock


Element = Place | Transition | AndBlock | XorBlock | LoopBlock

#: A whole net is simply the root sequence, which is place-bordered.
BlockTree = SeqBlock

_PLACE_LIKE = (Place, AndBlock, LoopBlock)
_TRANS_LIKE = (Transition, XorBlock)


# ── lexer ───────────────────────────────────────────────────────────────────

_BRACKETS = "()[]{}"


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", one of "()[]{}", or "eof"
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    """Split ECWS text into labels and brackets.

    Raises LexError on an illegal character or when the input holds no
    tokens at all.
    """
    tokens: list[Token] = []
    line, col = 1, 1
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
        elif ch.isspace() or ch == ",":
            col += 1
            i += 1
        elif ch == "#":
            while i < len(text) and text[i] != "\n":
                i += 1
        elif ch in _BRACKETS:
            tokens.append(Token(ch, ch, line, col))
            col += 1
            i += 1
        elif ch.isalpha() or ch == "_":
            start = i
            start_col = col
            i += 1
            while i < len(text):
                nxt = text[i]
                if nxt.isalpha() and text[i - 1].isdigit():
                    break  # a letter after a digit run starts a new label
                if nxt.isalnum() or nxt == "_":
                    i += 1
                else:
                    break
            tokens.append(Token("ident", text[start:i], line, start_col))
            col = start_col + (i - start)
        else:
            raise LexError(f"illegal character {ch!r}", line, col)
    if not tokens:
        raise LexError("empty input", line, col)
    tokens.append(Token("eof", "", line, col))
    return tokens


def _is_single_token(label: str) -> bool:
    try:
        tokens = tokenize(label)
    except LexError:
        return False
    return len(tokens) == 2 and tokens[0].kind == "ident" and tokens[0].text == label


# ── parser ──────────────────────────────────────────────────────────────────


class Parser:
    """Recursive-descent parser for the ECWS grammar."""

    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def _peek(self) -> Token:
        return self.tokens[self.pos]

    def _advance(self) -> Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def _expect(self, kind: str, what: str) -> Token:
        token = self._peek()
        if token.kind != kind:
            self._error(f"expected {what}, got {token.text or 'end of input'!r}", token)
        return self._advance()

    def _error(self, message: str, token: Token | None = None) -> None:
        token = token or self._peek()
        raise ParseError(message, token.line, token.col)

    def parse_net(self) -> SeqBlock:
        net = self.parse_pnet()
        token = self._peek()
        if token.kind != "eof":
            self._error(f"unexpected {token.text!r} after the net", token)
        return net

    def parse_pnet(self) -> SeqBlock:
        """A place-bordered sequence: the body of a net, branch, or loop."""
        children: list[Element] = [self._place()]
        while True:
            token = self._peek()
            if token.kind == "[":
                children.append(self._xor())
                children.append(self._place())
            elif token.kind == "ident":
                # An ident continues this sequence only when a place or block
                # follows it; otherwise it is the enclosing branch's border
                # transition and belongs to the caller.
                if self.tokens[self.pos + 1].kind not in ("ident", "(", "{"):
                    return SeqBlock(tuple(children))
                children.append(Transition(self._advance().text))
                nxt = self._peek()
                if nxt.kind == "(":
                    children.append(self._and())
                elif nxt.kind == "{":
                    children.append(self._loop())
                else:
                    children.append(self._place())
            elif token.kind in "({":
                self._error(
                    "a parallel or loop block must be preceded by a transition", token
                )
            else:
                return SeqBlock(tuple(children))

    def parse_tnet(self, closer: str) -> SeqBlock:
        """A transition-bordered sequence: a choice branch or a loop's back part."""
        first = self._transition()
        if self._peek().kind == closer:
            return SeqBlock((first,))
        body = self.parse_pnet()
        last = self._transition()
        return SeqBlock((first, *body.children, last))

    def _place(self) -> Place:
        return Place(self._expect("ident", "a place label").text)

    def _transition(self) -> Transition:
        return Transition(self._expect("ident", "a transition label").text)

    def _and(self) -> AndBlock:
        branches = [self._group("(", ")", lambda: self.parse_pnet())]
        while self._peek().kind == "(":
            branches.append(self._group("(", ")", lambda: self.parse_pnet()))
        if len(branches) < 2:
            self._error("a parallel block needs at least 2 branches")
        return AndBlock(tuple(branches))

    def _xor(self) -> XorBlock:
        branches = [self._group("[", "]", lambda: self.parse_tnet("]"))]
        while self._peek().kind == "[":
            branches.append(self._group("[", "]", lambda: self.parse_tnet("]")))
        if len(branches) < 2:
            self._error("a choice block needs at least 2 branches")
        return XorBlock(tuple(branches))

    def _loop(self) -> LoopBlock:
        forward = self._group("{", "}", lambda: self.parse_pnet())
        self._expect("{", "the '{' opening the loop's back part")
        back = self.parse_tnet("}")
        self._expect("}", "'}'")
        return LoopBlock(forward, back)

    def _group(self, opener: str, closer: str, inner) -> SeqBlock:
        self._expect(opener, f"'{opener}'")
        body = inner()
        self._expect(closer, f"'{closer}'")
        return body


def parse(text: str) -> SeqBlock:
    """Parse ECWS text into a validated block tree."""
    tree = Parser(tokenize(text)).parse_net()
    validate_tree(tree)
    return tree


# ── validation ──────────────────────────────────────────────────────────────


def validate_tree(tree: BlockTree) -> None:
    """Check every structural invariant of a block tree.

    Raises ParseError for shape violations and DuplicateLabelError when any
    label (place or transition) occurs twice.  Also rejects labels that the
    lexer could not reproduce as a single token, which would break the
    parse/format round trip.
    """
    _validate_pnet(tree)
    seen: set[str] = set()
    for label in iter_labels(tree):
        if label in seen:
            raise DuplicateLabelError(f"label {label!r} occurs more than once")
        if not _is_single_token(label):
            raise ParseError(f"label {label!r} does not survive relexing")
        seen.add(label)


def _validate_seq(seq: SeqBlock, place_bordered: bool) -> None:
    children = seq.children
    if not children:
        raise ParseError("empty sequence")
    border = Place if place_bordered else Transition
    if not isinstance(children[0], border) or not isinstance(children[-1], border):
        kind = "place" if place_bordered else "transition"
        raise ParseError(f"sequence must start and end with a {kind}")
    offset = 0 if place_bordered else 1
    for i, child in enumerate(children):
        expected = _PLACE_LIKE if (i + offset) % 2 == 0 else _TRANS_LIKE
        if not isinstance(child, expected):
            raise ParseError("sequence does not alternate places and transitions")
        if isinstance(child, (AndBlock, LoopBlock)):
            if i == 0 or i == len(children) - 1:
                raise ParseError("a parallel or loop block cannot border a sequence")
            if not isinstance(children[i - 1], Transition) or not isinstance(
                children[i + 1], Transition
            ):
                raise ParseError(
                    "a parallel or loop block must sit between two transitions"
                )
        elif isinstance(child, XorBlock):
            if i == 0 or i == len(children) - 1:
                raise ParseError("a choice block cannot border a sequence")
            if not isinstance(children[i - 1], Place) or not isinstance(
                children[i + 1], Place
            ):
                raise ParseError("a choice block must sit between two places")
    for child in children:
        if isinstance(child, AndBlock):
            if len(child.branches) < 2:
                raise ParseError("a parallel block needs at least 2 branches")
            for branch in child.branches:
                _validate_pnet(branch)
        elif isinstance(child, XorBlock):
            if len(child.branches) < 2:
                raise ParseError("a choice block needs at least 2 branches")
            for branch in child.branches:
                _validate_tnet(branch)
        elif isinstance(child, LoopBlock):
            _validate_pnet(child.forward)
            _validate_tnet(child.back)


def _validate_pnet(seq: SeqBlock) -> None:
    _validate_seq(seq, place_bordered=True)


def _validate_tnet(seq: SeqBlock) -> None:
    _validate_seq(seq, place_bordered=False)


def iter_labels(seq: SeqBlock):
    """Yield every place and transition label in textual order."""
    for child in seq.children:
        if isinstance(child, (Place, Transition)):
            yield child.label
        elif isinstance(child, (AndBlock, XorBlock)):
            for branch in child.branches:
                yield from iter_labels(branch)
        else:
            yield from iter_labels(child.forward)
            yield from iter_labels(child.back)


def place_labels(seq: SeqBlock) -> frozenset[str]:
    place_acc: set[str] = set()
    _collect_labels(seq, place_acc, None)
    return frozenset(place_acc)


def transition_labels(seq: SeqBlock) -> frozenset[str]:
    trans_acc: set[str] = set()
    _collect_labels(seq, None, trans_acc)
    return frozenset(trans_acc)


def _collect_labels(seq: SeqBlock, place_acc: set[str] | None, trans_acc: set[str] | None) -> None:
    for child in seq.children:
        if isinstance(child, Place):
            if place_acc is not None:
                place_acc.add(child.label)
        elif isinstance(child, Transition):
            if trans_acc is not None:
                trans_acc.add(child.label)
        elif isinstance(child, (AndBlock, XorBlock)):
            for branch in child.branches:
                _collect_labels(branch, place_acc, trans_acc)
        else:
            _collect_labels(child.forward, place_acc, trans_acc)
            _collect_labels(child.back, place_acc, trans_acc)


# ── canonical text ──────────────────────────────────────────────────────────


def format_tree(tree: BlockTree) -> str:
    """Render the canonical text of a block tree.

    The output contains no whitespace; a comma is inserted only where two
    adjacent labels would otherwise fuse into one token.
    """
    parts: list[str] = []
    _emit(tree, parts)
    out: list[str] = []
    for part in parts:
        if (
            out
            and out[-1][-1] not in _BRACKETS
            and part not in _BRACKETS
            and not (out[-1][-1].isdigit() and part[0].isalpha())
        ):
            out.append(",")
        out.append(part)
    return "".join(out)


def _emit(seq: SeqBlock, parts: list[str]) -> None:
    for child in seq.children:
        if isinstance(child, (Place, Transition)):
            parts.append(child.label)
        elif isinstance(child, (AndBlock, XorBlock)):
            opener, closer = ("(", ")") if isinstance(child, AndBlock) else ("[", "]")
            for branch in child.branches:
                parts.append(opener)
                _emit(branch, parts)
                parts.append(closer)
        else:
            parts.append("{")
            _emit(child.forward, parts)
            parts.append("}")
            parts.append("{")
            _emit(child.back, parts)
            parts.append("}")


# ── net construction ────────────────────────────────────────────────────────


def build_net(tree: BlockTree) -> WfNet:
    """Wire a validated block tree into a workflow net.

    Adjacent sequence elements are connected exit-to-entry.  A parallel
    block's entries are the first places of its branches (fed by the fork)
    and its exits the last places (feeding the join); a choice block's
    entries and exits are its branches' border transitions; a loop is
    entered and left through the first and last place of its forward part,
    with two extra arcs closing the cycle through the back part.
    """
    places: set[str] = set()
    transitions: set[str] = set()
    arcs: set[tuple[str, str]] = set()

    def register(seq: SeqBlock) -> None:
        for child in seq.children:
            if isinstance(child, Place):
                places.add(child.label)
            elif isinstance(child, Transition):
                transitions.add(child.label)
            elif isinstance(child, (AndBlock, XorBlock)):
                for branch in child.branches:
                    register(branch)
            else:
                register(child.forward)
                register(child.back)

    def entries(el: Element) -> list[str]:
        if isinstance(el, (Place, Transition)):
            return [el.label]
        if isinstance(el, AndBlock):
            return [_first_label(b) for b in el.branches]
        if isinstance(el, XorBlock):
            return [_first_label(b) for b in el.branches]
        return [_first_label(el.forward)]

    def exits(el: Element) -> list[str]:
        if isinstance(el, (Place, Transition)):
            return [el.label]
        if isinstance(el, (AndBlock, XorBlock)):
            return [_last_label(b) for b in el.branches]
        return [_last_label(el.forward)]

    def wire(seq: SeqBlock) -> None:
        for left, right in zip(seq.children, seq.children[1:]):
            for src in exits(left):
                for dst in entries(right):
                    arcs.add((src, dst))
        for child in seq.children:
            if isinstance(child, (AndBlock, XorBlock)):
                for branch in child.branches:
                    wire(branch)
            elif isinstance(child, LoopBlock):
                wire(child.forward)
                wire(child.back)
                arcs.add((_last_label(child.forward), _first_label(child.back)))
                arcs.add((_last_label(child.back), _first_label(child.forward)))

    register(tree)
    wire(tree)
    init = _first_label(tree)
    end = _last_label(tree)
    net = WfNet(
        places=frozenset(places),
        transitions=frozenset(transitions),
        arcs=frozenset(arcs),
        init=init,
        end=end,
    )
    _check_structure(net)
    return net


def _first_label(seq: SeqBlock) -> str:
    first = seq.children[0]
    assert isinstance(first, (Place, Transition))
    return first.label


def _last_label(seq: SeqBlock) -> str:
    last = seq.children[-1]
    assert isinstance(last, (Place, Transition))
    return last.label


def _check_structure(net: WfNet) -> None:
    """Source/sink arc direction plus connectedness of every node."""
    if any(dst == net.init for _, dst in net.arcs):
        raise SoundnessError("the source place has an incoming arc")
    if any(src == net.end for src, _ in net.arcs):
        raise SoundnessError("the sink place has an outgoing arc")
    nodes = net.places | net.transitions
    forward: dict[str, set[str]] = {n: set() for n in nodes}
    backward: dict[str, set[str]] = {n: set() for n in nodes}
    for src, dst in net.arcs:
        forward[src].add(dst)
        backward[dst].add(src)

    def closure(start: str, edges: dict[str, set[str]]) -> set[str]:
        seen = {start}
        stack = [start]
        while stack:
            for nxt in edges[stack.pop()]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return seen

    stranded = nodes - (closure(net.init, forward) & closure(net.end, backward))
    if stranded:
        raise SoundnessError(
            f"nodes not on a source-to-sink path: {', '.join(sorted(stranded))}"
        )
