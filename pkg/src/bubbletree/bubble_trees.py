"""Bubble trees: the weighted rooted trees that index moduli strata.

A bubble tree is a rooted tree whose vertices carry non-negative integer
weights (charges) and, optionally, positive integer marked weights.  Every
non-root vertex v must satisfy: w(v) != 0, or v has at least two children and
every child subtree carries positive total charge.  The root is exempt (it
carries the base 4-manifold).  Children are unordered; all equality is via
canonical form.

Weight-0 roots are permitted (the background connection may carry no charge);
the standing geometric assumption that no *trivial* background instanton
occurs is metadata for the caller, never enforced structurally.

Dimension bookkeeping (validated by the codimension law rather than trusted):
the root of weight w0 with n0 children contributes 8*w0 - (3/2)(chi+sigma)
+ 4*n0 (its instanton moduli plus one 4-space bubble point per child); a
non-root vertex of weight w >= 1 with n children contributes 8w - 8 + 4n (the
balanced sphere moduli 8w - 3 - 5 plus bubble points); a ghost vertex with n
children contributes 4n - 5 (n weighted points balanced modulo translation
and dilation; for n = 2 this is 3, the real projective 3-space); each marked
weight on any vertex contributes +4.  Consequently
dim(top stratum) - dim(stratum of T) = 4|D| - 3*g(T), with |D| the edge count
and g(T) the ghost count, reflecting one R+ x SO(3) gluing factor per edge
and one SO(3) stabilizer factor per ghost.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Sequence


class TreeError(ValueError):
    pass


@dataclass(frozen=True)
class VertexRecord:
    """One row of the flattened vertex table (preorder ids)."""

    id: int
    weight: int
    marks: tuple[int, ...]
    parent: int | None


def _node(weight: int, marks: Iterable[int] = (), children: Iterable["_node"] = ()) -> tuple:
    # internal node: (weight, sorted marks, canonically sorted children)
    kids = tuple(sorted(children))
    return (int(weight), tuple(sorted(marks)), kids)


class BubbleTree:
    """Immutable bubble tree; vertex ids are canonical preorder indices."""

    __slots__ = ("_root", "_barred", "_records", "_charges")

    def __init__(self, root: tuple, barred: bool = False):
        object.__setattr__(self, "_root", root)
        object.__setattr__(self, "_barred", bool(barred))
        records: list[VertexRecord] = []

        def walk(n: tuple, parent: int | None) -> None:
            vid = len(records)
            records.append(VertexRecord(vid, n[0], n[1], parent))
            for c in n[2]:
                walk(c, vid)

        walk(root, None)
        object.__setattr__(self, "_records", tuple(records))
        charges: dict[int, int] = {}

        def charge(n: tuple, vid_box: list[int]) -> int:
            vid = vid_box[0]
            vid_box[0] += 1
            total = n[0] + sum(n[1])
            for c in n[2]:
                total += charge(c, vid_box)
            charges[vid] = total
            return total

        charge(root, [0])
        object.__setattr__(self, "_charges", charges)

    # -- construction ---------------------------------------------------
    @staticmethod
    def build(weight: int, children: Sequence["BubbleTree"] = (), marks: Iterable[int] = (),
              barred: bool = False) -> "BubbleTree":
        return BubbleTree(_node(weight, marks, [c._root for c in children]), barred)

    @staticmethod
    def from_vertex_list(rows: Sequence[tuple[int, int, Iterable[int], int | None]],
                         barred: bool = False) -> "BubbleTree":
        """Build from (id, weight, marks, parent) rows; exactly one root."""
        by_id = {r[0]: r for r in rows}
        kids: dict[int, list[int]] = {r[0]: [] for r in rows}
        roots = []
        for vid, _w, _m, parent in rows:
            if parent is None:
                roots.append(vid)
            else:
                if parent not in by_id:
                    raise TreeError(f"vertex {vid}: unknown parent {parent}")
                kids[parent].append(vid)
        if len(roots) != 1:
            raise TreeError(f"expected exactly one root, got {len(roots)}")

        seen: set[int] = set()

        def build(vid: int) -> tuple:
            if vid in seen:
                raise TreeError("cycle in vertex table")
            seen.add(vid)
            _vid, w, marks, _p = by_id[vid]
            return _node(w, marks, [build(k) for k in kids[vid]])

        root = build(roots[0])
        if len(seen) != len(rows):
            raise TreeError("disconnected vertex table")
        return BubbleTree(root, barred)

    # -- basic inspection -------------------------------------------------
    @property
    def barred(self) -> bool:
        return self._barred

    def vertices(self) -> tuple[VertexRecord, ...]:
        return self._records

    def num_vertices(self) -> int:
        return len(self._records)

    def num_edges(self) -> int:
        return len(self._records) - 1

    def weight(self, vid: int) -> int:
        return self._records[vid].weight

    def marks(self, vid: int) -> tuple[int, ...]:
        return self._records[vid].marks

    def parent(self, vid: int) -> int | None:
        return self._records[vid].parent

    def children(self, vid: int) -> tuple[int, ...]:
        return tuple(r.id for r in self._records if r.parent == vid)

    def total_charge(self, vid: int = 0) -> int:
        """Sum of weights and marked weights over the subtree at vid."""
        if vid not in self._charges:
            raise TreeError(f"unknown vertex {vid}")
        return self._charges[vid]

    def charge(self) -> int:
        return self._charges[0]

    def has_marks(self) -> bool:
        return any(r.marks for r in self._records)

    # -- Definition-style validation ---------------------------------------
    def validate(self) -> list[str]:
        """Empty list iff every non-root vertex satisfies the bubble-tree
        condition (nonzero weight, or >= 2 children all of positive charge)."""
        violations = []
        for r in self._records:
            if r.parent is None:
                continue  # root carries the base manifold and is exempt
            if r.weight != 0:
                continue
            kids = self.children(r.id)
            if len(kids) < 2:
                violations.append(
                    f"vertex {r.id}: ghost with {len(kids)} child(ren), needs >= 2"
                )
                continue
            for k in kids:
                if self.total_charge(k) <= 0:
                    violations.append(
                        f"vertex {r.id}: child {k} has total charge 0"
                    )
        return violations

    def is_valid(self) -> bool:
        return not self.validate()

    # -- ghosts and ends ---------------------------------------------------
    def ghost_vertices(self) -> tuple[int, ...]:
        return tuple(
            r.id for r in self._records if r.parent is not None and r.weight == 0
        )

    def is_ghost_tree(self) -> bool:
        return bool(self.ghost_vertices())

    def ends(self) -> tuple[tuple[int, ...], int | None]:
        """Ghost vertices of minimal total charge, and that charge (the
        energy); (empty, None) when the tree has no ghosts."""
        ghosts = self.ghost_vertices()
        if not ghosts:
            return (), None
        energy = min(self.total_charge(g) for g in ghosts)
        return tuple(g for g in ghosts if self.total_charge(g) == energy), energy

    # -- surgery -----------------------------------------------------------
    def _rows(self) -> list[list]:
        return [[r.id, r.weight, list(r.marks), r.parent] for r in self._records]

    def contract(self, child_id: int) -> "BubbleTree":
        """Contract the parent edge of child_id: the child is removed, its
        weight and marks move to the parent, its children are re-parented."""
        if child_id <= 0 or child_id >= len(self._records):
            raise TreeError(f"no edge with child vertex {child_id}")
        return self.psi_contract([child_id])[0]

    def psi_contract(self, support: Iterable[int]) -> tuple["BubbleTree", bool]:
        """Simultaneously contract the parent edges of all vertices in
        support (order-independent).  Returns (tree, contracted_flag);
        empty support maps the zero gluing parameter to the tree itself,
        returned unchanged with flag False."""
        support = set(support)
        if not support:
            return self, False
        for vid in support:
            if vid <= 0 or vid >= len(self._records):
                raise TreeError(f"no edge with child vertex {vid}")
        rows = self._rows()
        # absorb deepest vertices first so chained contractions merge upward
        depth = {}
        for r in self._records:
            depth[r.id] = 0 if r.parent is None else depth[r.parent] + 1
        alive = {row[0]: row for row in rows}
        for vid in sorted(support, key=lambda v: -depth[v]):
            row = alive.pop(vid)
            parent = alive[row[3]]
            parent[1] += row[1]
            parent[2].extend(row[2])
            for other in alive.values():
                if other[3] == vid:
                    other[3] = row[3]
        new_rows = [(r[0], r[1], r[2], r[3]) for r in alive.values()]
        return BubbleTree.from_vertex_list(new_rows, self._barred), True

    def cut_at(self, ghost_id: int) -> "BubbleTree":
        """Cut at a ghost vertex: delete it and its subtree, and add a marked
        weight equal to its total charge to its parent."""
        return self.cut_at_many([ghost_id])

    def cut_at_many(self, ghost_ids: Iterable[int]) -> "BubbleTree":
        """Simultaneously cut at several ghost vertices with disjoint
        subtrees (vertex ids refer to this tree)."""
        ghost_ids = sorted(set(ghost_ids))
        mark_at: dict[int, list[int]] = {}
        doomed: set[int] = set()
        for gid in ghost_ids:
            r = self._records[gid]
            if r.parent is None or r.weight != 0:
                raise TreeError(f"vertex {gid} is not a ghost vertex")
            mark_at.setdefault(r.parent, []).append(self.total_charge(gid))
            doomed.add(gid)
        changed = True
        while changed:
            changed = False
            for rec in self._records:
                if rec.parent in doomed and rec.id not in doomed:
                    doomed.add(rec.id)
                    changed = True
        for gid in ghost_ids:
            if self._records[gid].parent in doomed:
                raise TreeError("cut vertices must have disjoint subtrees")
        rows = []
        for rec in self._records:
            if rec.id in doomed:
                continue
            marks = list(rec.marks) + mark_at.get(rec.id, [])
            rows.append((rec.id, rec.weight, marks, rec.parent))
        return BubbleTree.from_vertex_list(rows, self._barred)

    # -- canonical form and ordering ----------------------------------------
    def canonical(self) -> str:
        """Deterministic bracket string; equal iff isomorphic as weighted
        rooted trees with unordered children."""
        return tree_to_bracket(self)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BubbleTree):
            return NotImplemented
        return self._root == other._root

    def __hash__(self) -> int:
        return hash(self._root)

    def __repr__(self) -> str:
        return f"BubbleTree({self.canonical()!r})"

    # -- serialization --------------------------------------------------------
    def to_json(self) -> dict:
        flags = []
        if self._records[0].weight == 0 and len(self.children(0)) == 1:
            flags.append("root_weight_zero_single_child")
        return {
            "schema": 1,
            "bracket": self.canonical(),
            "barred_root": self._barred,
            "flags": flags,
            "vertices": [
                {
                    "id": r.id,
                    "weight": r.weight,
                    "marks": list(r.marks),
                    "parent": r.parent,
                }
                for r in self._records
            ],
            "edges": [[r.parent, r.id] for r in self._records if r.parent is not None],
        }

    @staticmethod
    def from_json(data: dict) -> "BubbleTree":
        if data.get("schema") != 1:
            raise TreeError("unsupported schema")
        extra = set(data) - {"schema", "bracket", "barred_root", "flags", "vertices", "edges"}
        if extra:
            raise TreeError(f"unknown fields: {sorted(extra)}")
        rows = [
            (v["id"], v["weight"], v.get("marks", []), v["parent"])
            for v in data["vertices"]
        ]
        return BubbleTree.from_vertex_list(rows, data.get("barred_root", False))


# ---------------------------------------------------------------------------
# bracket printing (the parser lives in bubbletree.notation)
# ---------------------------------------------------------------------------


def _vertex_bracket(n: tuple) -> str:
    w, marks, kids = n
    items = [f"★{m}" for m in marks] + [_vertex_bracket(c) for c in kids]
    if not items:
        return str(w)
    return f"{w}[{','.join(items)}]"


def tree_to_bracket(t: BubbleTree) -> str:
    return f"[{_vertex_bracket(t._root)}]"


# ---------------------------------------------------------------------------
# enumeration of all bubble trees of a given total charge
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _subtrees(charge: int) -> tuple[tuple, ...]:
    """All canonical non-root subtrees of the given positive total charge."""
    out: list[tuple] = []
    for w in range(charge, -1, -1):
        rest = charge - w
        if rest == 0:
            if w > 0:
                out.append(_node(w))
            continue
        # a ghost needs >= 2 children, so its parts never reach the full
        # charge; capping the part size also keeps the recursion well-founded
        max_part = rest if w >= 1 else rest - 1
        for kids in _child_multisets(rest, max_part):
            out.append(_node(w, (), kids))
    return tuple(sorted(out))


def _child_multisets(total: int, max_part: int) -> Iterator[tuple]:
    """Multisets of non-root subtrees with total charge `total` and each
    part of charge <= max_part, generated in non-decreasing (charge, index)
    order so every multiset appears exactly once."""

    def rec(remaining: int, lo: tuple[int, int]) -> Iterator[tuple]:
        if remaining == 0:
            yield ()
            return
        for c in range(1, min(remaining, max_part) + 1):
            for pos, s in enumerate(_subtrees(c)):
                key = (c, pos)
                if key < lo:
                    continue
                for tail in rec(remaining - c, key):
                    yield (s,) + tail

    yield from rec(total, (0, 0))


def enumerate_trees(K: int) -> list[BubbleTree]:
    """All isomorphism classes of bubble trees of total charge K, every root
    weight 0..K permitted, sorted by canonical bracket."""
    if K < 1:
        raise TreeError("total charge must be >= 1")
    out = []
    for w0 in range(K, -1, -1):
        rest = K - w0
        if rest == 0:
            out.append(BubbleTree(_node(w0)))
            continue
        for kids in _child_multisets(rest, rest):
            out.append(BubbleTree(_node(w0, (), kids)))
    return sorted(out, key=lambda t: t.canonical())


# ---------------------------------------------------------------------------
# contraction order
# ---------------------------------------------------------------------------


def single_contractions(t: BubbleTree) -> list[BubbleTree]:
    """All trees obtained by contracting one edge (duplicates removed)."""
    seen: dict[str, BubbleTree] = {}
    for r in t.vertices():
        if r.parent is None:
            continue
        c = t.contract(r.id)
        seen.setdefault(c.canonical(), c)
    return [seen[k] for k in sorted(seen)]


def contraction_closure(t: BubbleTree) -> set[str]:
    """Canonical forms of every tree reachable by >= 0 contractions."""
    out: set[str] = set()
    stack = [t]
    while stack:
        cur = stack.pop()
        key = cur.canonical()
        if key in out:
            continue
        out.add(key)
        stack.extend(single_contractions(cur))
    return out


def tree_leq(t1: BubbleTree, t2: BubbleTree) -> bool:
    """t1 <= t2 iff t2 is reachable from t1 by a sequence of contractions."""
    if t1.charge() != t2.charge():
        raise TreeError("trees must have the same total charge")
    if t2.num_vertices() > t1.num_vertices():
        return False
    return t2.canonical() in contraction_closure(t1)


# ---------------------------------------------------------------------------
# stratum dimension bookkeeping
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DimExpr:
    """Affine expression const + coeff*(chi+sigma), exact rationals."""

    const: Fraction
    chi_sigma_coeff: Fraction

    def __add__(self, other: "DimExpr") -> "DimExpr":
        return DimExpr(self.const + other.const, self.chi_sigma_coeff + other.chi_sigma_coeff)

    def __sub__(self, other: "DimExpr") -> "DimExpr":
        return DimExpr(self.const - other.const, self.chi_sigma_coeff - other.chi_sigma_coeff)

    def eval(self, chi: int, sigma: int) -> Fraction:
        return self.const + self.chi_sigma_coeff * (chi + sigma)


def ghost_vertex_dimension(n_children: int) -> int:
    """Moduli dimension carried by a ghost vertex with n children: n weighted
    4-space points, balanced, modulo translations and dilation."""
    return 4 * n_children - 5


def dimension_expr(t: BubbleTree) -> DimExpr:
    """Stratum dimension as an affine expression in chi+sigma."""
    const = Fraction(0)
    for r in t.vertices():
        n = len(t.children(r.id))
        if r.parent is None:
            const += 8 * r.weight + 4 * n
        elif r.weight >= 1:
            const += 8 * r.weight - 8 + 4 * n
        else:
            const += ghost_vertex_dimension(n)
        const += 4 * len(r.marks)
    return DimExpr(const, Fraction(-3, 2))


@dataclass(frozen=True)
class StratumInfo:
    """Per-stratum dimension and symmetry bookkeeping."""

    tree: BubbleTree
    dimension: int
    ghost_count: int
    edge_count: int
    isotropy_dim: int
    gluing_dim: int
    dim_expr: DimExpr = field(compare=False)

    @property
    def codimension(self) -> int:
        return 4 * self.edge_count - 3 * self.ghost_count


def stratum_info(t: BubbleTree, chi: int, sigma: int) -> StratumInfo:
    violations = t.validate()
    if violations:
        raise TreeError("invalid tree: " + "; ".join(violations))
    if (chi + sigma) % 2 != 0:
        raise TreeError(f"chi+sigma must be even, got {chi}+{sigma}")
    expr = dimension_expr(t)
    dim = expr.eval(chi, sigma)
    assert dim.denominator == 1
    g = len(t.ghost_vertices())
    d = t.num_edges()
    if not t.has_marks():
        # the codimension law audits the derived per-vertex contributions
        top = 8 * t.charge() - Fraction(3, 2) * (chi + sigma)
        assert top - dim == 4 * d - 3 * g, "codimension law violated"
    return StratumInfo(
        tree=t,
        dimension=int(dim),
        ghost_count=g,
        edge_count=d,
        isotropy_dim=3 * g,
        gluing_dim=4 * d,
        dim_expr=expr,
    )


def validate_tree(t: BubbleTree) -> list[str]:
    return t.validate()


def total_charge(t: BubbleTree, vid: int) -> int:
    return t.total_charge(vid)


def contract(t: BubbleTree, child_id: int) -> BubbleTree:
    return t.contract(child_id)


def psi_contraction(t: BubbleTree, support: Iterable[int]) -> tuple[BubbleTree, bool]:
    return t.psi_contract(support)


def ghost_vertices(t: BubbleTree) -> tuple[int, ...]:
    return t.ghost_vertices()


def ends(t: BubbleTree) -> tuple[tuple[int, ...], int | None]:
    return t.ends()


def cut_at_end(t: BubbleTree, vid: int) -> BubbleTree:
    return t.cut_at(vid)


def canonical_form(t: BubbleTree) -> str:
    return t.canonical()
