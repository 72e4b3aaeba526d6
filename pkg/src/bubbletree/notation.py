"""Bracket notation: parse and print trees and point configurations.

Tree grammar (whitespace-insensitive)::

    tree     := '[' vertex ']'
    vertex   := weight children?
    children := '[' item (',' item)* ']'
    item     := vertex | mark
    mark     := ('★' | '*') positive-integer

A bare integer inside a child list is a leaf.  The root weight accepts the
tokens ``0~``, ``0̄`` and ``Kbar`` (all meaning a weight-0 root with the
barred-background flag); '·' is accepted between a weight and its child list
and is never emitted.  Output is always comma-separated.

Configuration grammar::

    config := '[' citem (',' citem)* ']'
    citem  := label ('=' '(' rat ',' rat ',' rat ',' rat ')')? config?

where ``label`` is an identifier with an optional leading '-' (mirror
points are conventionally written -z), and a label directly followed by a bracket is a
cluster base point with its screen points inside the bracket.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .bubble_trees import BubbleTree, TreeError, tree_to_bracket


class NotationError(ValueError):
    """Syntax error with a 0-based input position."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos] in " \t\r\n":
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str) -> None:
        self.skip_ws()
        if self.peek() != ch:
            raise NotationError(f"expected {ch!r}", self.pos)
        self.pos += 1

    def try_take(self, ch: str) -> bool:
        if self.peek() == ch:
            self.pos += 1
            return True
        return False

    def integer(self) -> int:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            raise NotationError("expected an integer", start)
        return int(self.text[start:self.pos])

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)


# ---------------------------------------------------------------------------
# trees
# ---------------------------------------------------------------------------

_BAR_COMBINING = "̄"  # combining macron, as in 0̄


@dataclass
class _RawVertex:
    weight: int
    barred: bool
    marks: list[int]
    children: list["_RawVertex"]


def _parse_weight(sc: _Scanner) -> tuple[int, bool]:
    sc.skip_ws()
    if sc.text.startswith("Kbar", sc.pos):
        sc.pos += 4
        return 0, True
    w = sc.integer()
    barred = False
    if sc.pos < len(sc.text) and sc.text[sc.pos] in ("~", _BAR_COMBINING):
        sc.pos += 1
        barred = True
    return w, barred


def _parse_vertex(sc: _Scanner) -> _RawVertex:
    w, barred = _parse_weight(sc)
    v = _RawVertex(w, barred, [], [])
    sc.skip_ws()
    # optional readability dot between a weight and its child list
    if sc.pos < len(sc.text) and sc.text[sc.pos] == "·":
        sc.pos += 1
    if sc.peek() == "[":
        sc.expect("[")
        while True:
            if sc.peek() in ("★", "*"):
                sc.pos += 1
                v.marks.append(sc.integer())
            else:
                v.children.append(_parse_vertex(sc))
            if sc.try_take(","):
                continue
            sc.expect("]")
            break
    return v


def _raw_to_tree(v: _RawVertex) -> BubbleTree:
    kids = [_raw_to_tree(c) for c in v.children]
    return BubbleTree.build(v.weight, kids, v.marks, barred=v.barred)


def parse_tree(s: str) -> BubbleTree:
    """Parse a bracket string into a validated bubble tree."""
    sc = _Scanner(s)
    sc.expect("[")
    raw = _parse_vertex(sc)
    sc.expect("]")
    if not sc.at_end():
        raise NotationError("trailing input after tree", sc.pos)
    t = BubbleTree(_raw_to_tree(raw)._root, raw.barred)
    violations = t.validate()
    if violations:
        raise TreeError("parsed tree is not a bubble tree: " + "; ".join(violations))
    return t


def print_tree(t: BubbleTree) -> str:
    """Canonical bracket string; parse_tree(print_tree(t)) == t."""
    s = tree_to_bracket(t)
    if t.barred and s.startswith("[0"):
        s = "[0~" + s[2:]
    return s


# ---------------------------------------------------------------------------
# configurations
# ---------------------------------------------------------------------------


@dataclass
class ConfigExpr:
    """A labeled point, optionally with exact coordinates and sub-points."""

    label: str
    coords: tuple[Fraction, Fraction, Fraction, Fraction] | None = None
    children: list["ConfigExpr"] = field(default_factory=list)

    def nesting_tree(self) -> BubbleTree:
        """The w-type shape of this configuration (unit leaf weights)."""

        def build(c: ConfigExpr) -> BubbleTree:
            if not c.children:
                return BubbleTree.build(1)
            return BubbleTree.build(0, [build(k) for k in c.children])

        return BubbleTree.build(0, [build(self)])


def _parse_label(sc: _Scanner) -> str:
    sc.skip_ws()
    start = sc.pos
    if sc.pos < len(sc.text) and sc.text[sc.pos] in "-−":
        sc.pos += 1
    while sc.pos < len(sc.text) and (sc.text[sc.pos].isalnum() or sc.text[sc.pos] == "_"):
        sc.pos += 1
    label = sc.text[start:sc.pos].replace("−", "-")
    if not label or label == "-" or not any(ch.isalpha() for ch in label):
        raise NotationError("expected a point label", start)
    return label


def _parse_rational(sc: _Scanner) -> Fraction:
    sc.skip_ws()
    start = sc.pos
    if sc.pos < len(sc.text) and sc.text[sc.pos] in "+-−":
        sc.pos += 1
    while sc.pos < len(sc.text) and (sc.text[sc.pos].isdigit() or sc.text[sc.pos] == "/"):
        sc.pos += 1
    token = sc.text[start:sc.pos].replace("−", "-")
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise NotationError(f"bad rational {token!r}", start) from None


def _parse_citem(sc: _Scanner) -> ConfigExpr:
    label = _parse_label(sc)
    out = ConfigExpr(label)
    if sc.peek() == "=":
        sc.expect("=")
        sc.expect("(")
        vals = [_parse_rational(sc)]
        for _ in range(3):
            sc.expect(",")
            vals.append(_parse_rational(sc))
        sc.expect(")")
        out.coords = tuple(vals)  # type: ignore[assignment]
    if sc.peek() == "[":
        sc.expect("[")
        while True:
            out.children.append(_parse_citem(sc))
            if sc.try_take(","):
                continue
            sc.expect("]")
            break
    return out


def parse_config(s: str) -> list[ConfigExpr]:
    """Parse a configuration bracket; returns the top-level points."""
    sc = _Scanner(s)
    sc.expect("[")
    items = [_parse_citem(sc)]
    while sc.try_take(","):
        items.append(_parse_citem(sc))
    sc.expect("]")
    if not sc.at_end():
        raise NotationError("trailing input after configuration", sc.pos)
    return items


def _citem_str(c: ConfigExpr) -> str:
    s = c.label
    if c.coords is not None:
        s += "=(%s)" % ",".join(str(x) for x in c.coords)
    if c.children:
        s += "[" + ",".join(_citem_str(k) for k in c.children) + "]"
    return s


def print_config(items: list[ConfigExpr]) -> str:
    return "[" + ",".join(_citem_str(c) for c in items) + "]"
