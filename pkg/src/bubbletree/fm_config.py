"""Weighted configuration strata and degeneration limits.

Points live in flat rational 4-space (one chart of the base manifold; the
screens are tangent spaces, so curvature never enters the combinatorics).
A degenerating family is a polynomial path per point; its limit stratum is
computed by exact t-adic clustering: points are grouped by value at t=0, the
weighted barycenter path is subtracted inside each cluster, the relative
paths are rescaled by the minimal vanishing order, and groups of points that
still agree on the screen recurse.  Every screen satisfies sum(w_i z_i) = 0
exactly, and screens are kept as (direction, scale_squared) pairs because the
balanced-normalization scale is generally an irrational square root.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .bubble_trees import BubbleTree


class ConfigError(ValueError):
    pass


Vec4 = tuple[Fraction, Fraction, Fraction, Fraction]


def _vec(values: Iterable) -> Vec4:
    v = tuple(Fraction(x) for x in values)
    if len(v) != 4:
        raise ConfigError(f"expected a 4-vector, got {len(v)} entries")
    return v  # type: ignore[return-value]


def _vadd(a: Vec4, b: Vec4) -> Vec4:
    return tuple(x + y for x, y in zip(a, b))  # type: ignore[return-value]


def _vsub(a: Vec4, b: Vec4) -> Vec4:
    return tuple(x - y for x, y in zip(a, b))  # type: ignore[return-value]


def _vscale(a: Vec4, c: Fraction) -> Vec4:
    return tuple(x * c for x in a)  # type: ignore[return-value]


def _vnorm2(a: Vec4) -> Fraction:
    return sum(x * x for x in a)


ZERO4: Vec4 = (Fraction(0), Fraction(0), Fraction(0), Fraction(0))


@dataclass(frozen=True)
class WeightedConfiguration:
    """Rational 4-space points with positive integer weights."""

    points: tuple[Vec4, ...]
    weights: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.points) != len(self.weights):
            raise ConfigError("points and weights must match in length")
        if any(w <= 0 for w in self.weights):
            raise ConfigError("weights must be positive integers")

    @staticmethod
    def make(pairs: Sequence[tuple[Iterable, int]]) -> "WeightedConfiguration":
        return WeightedConfiguration(
            tuple(_vec(p) for p, _ in pairs), tuple(int(w) for _, w in pairs)
        )

    def total_weight(self) -> int:
        return sum(self.weights)

    def is_strict(self) -> bool:
        return all(a != b for a, b in combinations(self.points, 2))


def balanced_check(c: WeightedConfiguration) -> bool:
    """Exact test of sum(w_i x_i) = 0 and sum(w_i |x_i|^2) = sum(w_i)."""
    center = ZERO4
    second = Fraction(0)
    for p, w in zip(c.points, c.weights):
        center = _vadd(center, _vscale(p, Fraction(w)))
        second += w * _vnorm2(p)
    return center == ZERO4 and second == Fraction(c.total_weight())


def balance_class(c: WeightedConfiguration) -> tuple[WeightedConfiguration, Fraction]:
    """Translate to weighted barycenter zero and return the exact square of
    the normalizing scale: scale_squared * sum(w|z|^2) = sum(w).

    The balanced representative is scale * z for scale = sqrt(scale_squared),
    which is generally irrational; the (direction, scale_squared) pair is the
    exact datum of the class up to positive scaling.
    """
    W = c.total_weight()
    center = ZERO4
    for p, w in zip(c.points, c.weights):
        center = _vadd(center, _vscale(p, Fraction(w)))
    center = _vscale(center, Fraction(1, W))
    translated = tuple(_vsub(p, center) for p in c.points)
    second = sum(w * _vnorm2(z) for z, w in zip(translated, c.weights))
    if second == 0:
        raise ConfigError("all points coincide; no balance class")
    direction = WeightedConfiguration(translated, c.weights)
    return direction, Fraction(W) / second


# ---------------------------------------------------------------------------
# polynomial paths
# ---------------------------------------------------------------------------

Poly = tuple[Fraction, ...]  # coefficients by ascending t-power


def _poly(coeffs: Iterable) -> Poly:
    c = [Fraction(x) for x in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _poly_sub(a: Poly, b: Poly) -> Poly:
    n = max(len(a), len(b))
    return _poly(
        (a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)
    )


def _poly_scale(a: Poly, c: Fraction) -> Poly:
    return _poly(x * c for x in a)


def _poly_order(a: Poly) -> int | None:
    for i, c in enumerate(a):
        if c:
            return i
    return None


def _poly_coeff(a: Poly, k: int) -> Fraction:
    return a[k] if k < len(a) else Fraction(0)


@dataclass(frozen=True)
class PolynomialFamily:
    """Per point, a 4-vector of rational polynomials in one parameter t."""

    paths: tuple[tuple[Poly, Poly, Poly, Poly], ...]
    weights: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.paths:
            raise ConfigError("a family needs at least one point")
        if len(self.paths) != len(self.weights):
            raise ConfigError("paths and weights must match in length")
        if any(w <= 0 for w in self.weights):
            raise ConfigError("weights must be positive integers")
        for a, b in combinations(self.paths, 2):
            if all(_poly_sub(x, y) == () for x, y in zip(a, b)):
                raise ConfigError("family is not eventually distinct")

    @staticmethod
    def make(points: Sequence[tuple[Sequence[Iterable], int]]) -> "PolynomialFamily":
        paths = []
        weights = []
        for coords, w in points:
            if len(coords) != 4:
                raise ConfigError("each point needs 4 coordinate polynomials")
            paths.append(tuple(_poly(c) for c in coords))
            weights.append(int(w))
        return PolynomialFamily(tuple(paths), tuple(weights))

    @staticmethod
    def from_json(data: dict) -> "PolynomialFamily":
        if data.get("schema") != 1:
            raise ConfigError("unsupported schema")
        extra = set(data) - {"schema", "points"}
        if extra:
            raise ConfigError(f"unknown fields: {sorted(extra)}")
        for p in data["points"]:
            bad = set(p) - {"coords", "weight"}
            if bad:
                raise ConfigError(f"unknown point fields: {sorted(bad)}")
        return PolynomialFamily.make(
            [(p["coords"], p.get("weight", 1)) for p in data["points"]]
        )

    def value_at_zero(self, i: int) -> Vec4:
        return tuple(_poly_coeff(c, 0) for c in self.paths[i])  # type: ignore[return-value]


@dataclass(frozen=True)
class Screen:
    """A screen configuration attached to one ghost vertex: exact direction
    points with branch weights, plus the rational squared scale of the
    balanced representative and the t-order of the rescaling."""

    points: tuple[Vec4, ...]
    weights: tuple[int, ...]
    scale_squared: Fraction
    t_order: int

    def configuration(self) -> WeightedConfiguration:
        return WeightedConfiguration(self.points, self.weights)


@dataclass(frozen=True)
class LimitStratum:
    """Limit of a degenerating family: the w-type tree and its screens,
    keyed by ghost vertex id; leaf_points maps leaf vertex id to the index
    of the family point it carries."""

    tree: BubbleTree
    screens: dict[int, Screen]
    leaf_points: dict[int, int]


def _cluster_limit(
    paths: list[tuple[Poly, Poly, Poly, Poly]],
    weights: list[int],
    indices: list[int],
    min_order: int,
):
    """Recursive screen extraction for one cluster (>= 2 points known to
    agree below t-order min_order).

    Returns a subtree spec: ('leaf', point_index) or ('ghost', screen,
    [children])."""
    total = sum(weights)
    bary = tuple(
        _poly_scale(
            _poly(
                [
                    sum(Fraction(w) * _poly_coeff(p[axis], k) for p, w in zip(paths, weights))
                    for k in range(max((len(p[axis]) for p in paths), default=0))
                ]
            ),
            Fraction(1, total),
        )
        for axis in range(4)
    )
    rel = [tuple(_poly_sub(p[axis], bary[axis]) for axis in range(4)) for p in paths]
    orders = []
    for r in rel:
        o = [q for q in (_poly_order(c) for c in r) if q is not None]
        orders.append(min(o) if o else None)
    finite = [o for o in orders if o is not None]
    if not finite:
        raise ConfigError("family is not eventually distinct (coincident cluster)")
    m = min(finite)
    if m <= min_order:
        raise ConfigError(
            f"cluster rescaling order {m} does not exceed parent order {min_order}"
        )
    screen_pts = [tuple(_poly_coeff(c, m) for c in r) for r in rel]
    groups: dict[Vec4, list[int]] = {}
    for local, z in enumerate(screen_pts):
        groups.setdefault(z, []).append(local)
    group_keys = sorted(groups, key=lambda z: tuple(str(x) for x in z))
    branch_points: list[Vec4] = []
    branch_weights: list[int] = []
    children = []
    for z in group_keys:
        members = groups[z]
        branch_points.append(z)
        branch_weights.append(sum(weights[i] for i in members))
        if len(members) == 1:
            children.append(("leaf", indices[members[0]]))
        else:
            children.append(
                _cluster_limit(
                    [paths[i] for i in members],
                    [weights[i] for i in members],
                    [indices[i] for i in members],
                    m,
                )
            )
    center = ZERO4
    for z, w in zip(branch_points, branch_weights):
        center = _vadd(center, _vscale(z, Fraction(w)))
    assert center == ZERO4, "screen lost the zero-barycenter invariant"
    second = sum(w * _vnorm2(z) for z, w in zip(branch_points, branch_weights))
    screen = Screen(
        tuple(branch_points),
        tuple(branch_weights),
        Fraction(total) / second,
        m,
    )
    return ("ghost", screen, children)


def limit_stratum(f: PolynomialFamily) -> LimitStratum:
    """Compute the limit stratum of a colliding polynomial family."""
    n = len(f.paths)
    clusters: dict[Vec4, list[int]] = {}
    for i in range(n):
        clusters.setdefault(f.value_at_zero(i), []).append(i)
    specs = []
    for key in sorted(clusters, key=lambda z: tuple(str(x) for x in z)):
        members = clusters[key]
        if len(members) == 1:
            specs.append(("leaf", members[0]))
        else:
            specs.append(
                _cluster_limit(
                    [f.paths[i] for i in members],
                    [f.weights[i] for i in members],
                    members,
                    -1,
                )
            )

    screens: dict[int, Screen] = {}
    leaf_points: dict[int, int] = {}

    def build(spec) -> BubbleTree:
        if spec[0] == "leaf":
            return BubbleTree.build(f.weights[spec[1]])
        _, _screen, children = spec
        return BubbleTree.build(0, [build(c) for c in children])

    tree = BubbleTree.build(0, [build(s) for s in specs])

    # Re-locate each spec inside the canonical tree to key screens by vertex
    # id.  Isomorphic sibling specs are interchangeable, so matching each to
    # the first unused shape-equal child is a valid (and deterministic)
    # labeling.
    def assign(spec, vid: int) -> None:
        if spec[0] == "leaf":
            leaf_points[vid] = spec[1]
            return
        _, screen, children = spec
        screens[vid] = screen
        match(children, list(tree.children(vid)))

    def match(specs_list, kid_ids) -> None:
        used: set[int] = set()
        for spec in specs_list:
            target = build(spec)._root
            for k in kid_ids:
                if k not in used and _subtree_node(tree, k) == target:
                    used.add(k)
                    assign(spec, k)
                    break
            else:
                raise AssertionError("canonical re-location failed")

    match(specs, list(tree.children(0)))
    return LimitStratum(tree, screens, leaf_points)


def _subtree_node(t: BubbleTree, vid: int):
    kids = [_subtree_node(t, k) for k in t.children(vid)]
    return BubbleTree.build(t.weight(vid), [BubbleTree(k) for k in kids], t.marks(vid))._root


# ---------------------------------------------------------------------------
# w-type strata
# ---------------------------------------------------------------------------


def is_w_type(t: BubbleTree, weights: Sequence[int] | None = None) -> bool:
    """A w-type tree: exempt root, every internal non-root vertex a ghost,
    leaves positively weighted (optionally matching a given weight multiset)."""
    leaf_weights = []
    for r in t.vertices():
        kids = t.children(r.id)
        if r.marks:
            return False
        if r.parent is None:
            if r.weight != 0:
                return False
            continue
        if kids:
            if r.weight != 0:
                return False
        else:
            if r.weight <= 0:
                return False
            leaf_weights.append(r.weight)
    if weights is not None and sorted(leaf_weights) != sorted(weights):
        return False
    return True


def enumerate_fm_strata(weights: Sequence[int]) -> list[BubbleTree]:
    """All w-type trees over an exempt root for the given weight tuple:
    the strata of the compactified weighted configuration space."""
    w = [int(x) for x in weights]
    if not w or any(x <= 0 for x in w):
        raise ConfigError("weights must be positive integers")

    def cluster_trees(ws: tuple[int, ...]) -> list[BubbleTree]:
        # all ghost-rooted cluster structures over the multiset ws (|ws| >= 2);
        # a ghost needs >= 2 children, so 1-block partitions are excluded
        out: dict[str, BubbleTree] = {}
        for blocks in _multiset_partitions(ws):
            if len(blocks) < 2:
                continue
            for combo in _block_choices(blocks, cluster_trees):
                t = BubbleTree.build(0, list(combo))
                out.setdefault(t.canonical(), t)
        return [out[k] for k in sorted(out)]

    out: dict[str, BubbleTree] = {}
    for blocks in _multiset_partitions(tuple(sorted(w))):
        for combo in _block_choices(blocks, cluster_trees):
            t = BubbleTree.build(0, list(combo))
            out.setdefault(t.canonical(), t)
    return [out[k] for k in sorted(out)]


def _multiset_partitions(ws: tuple[int, ...]):
    """Partitions of a sorted multiset into unordered blocks (deduplicated;
    repeats from indistinguishable weights are filtered here, tree-level
    duplicates are removed downstream via canonical form)."""
    if not ws:
        yield ()
        return
    first, rest = ws[0], ws[1:]
    seen: set[tuple] = set()
    for mask in range(1 << len(rest)):
        block = (first,) + tuple(rest[i] for i in range(len(rest)) if mask >> i & 1)
        remainder = tuple(rest[i] for i in range(len(rest)) if not mask >> i & 1)
        for tail in _multiset_partitions(remainder):
            blocks = tuple(sorted((block,) + tail))
            if blocks in seen:
                continue
            seen.add(blocks)
            yield blocks


def _block_choices(blocks, cluster_trees):
    """For each block: a leaf if singleton, else any cluster structure;
    deduplicated by the sorted-children canonical form downstream."""
    if not blocks:
        yield ()
        return
    head, tail = blocks[0], blocks[1:]
    if len(head) == 1:
        heads = [BubbleTree.build(head[0])]
    else:
        heads = cluster_trees(head)
    for h in heads:
        for rest in _block_choices(tail, cluster_trees):
            yield (h,) + rest


_DEPTH_LETTERS = "xyzwvsabc"


def stratum_format(t: BubbleTree) -> str:
    """Bracket template with fresh point labels for a w-type tree; the
    output parses with notation.parse_config and its nesting matches t."""
    if not is_w_type(t):
        raise ConfigError("not a w-type tree")
    counters: dict[int, int] = {}

    def label(depth: int) -> str:
        counters[depth] = counters.get(depth, 0) + 1
        letter = _DEPTH_LETTERS[min(depth, len(_DEPTH_LETTERS) - 1)]
        return f"{letter}{counters[depth]}"

    def render(vid: int, depth: int) -> str:
        kids = t.children(vid)
        name = label(depth)
        if not kids:
            return name
        return name + "[" + ",".join(render(k, depth + 1) for k in kids) + "]"

    return "[" + ",".join(render(k, 0) for k in t.children(0)) + "]"


def limit_to_json(lim: LimitStratum) -> dict:
    from .notation import print_tree

    return {
        "schema": 1,
        "tree": print_tree(lim.tree),
        "format": stratum_format(lim.tree) if is_w_type(lim.tree) else None,
        "screens": {
            str(vid): {
                "points": [[str(x) for x in p] for p in s.points],
                "weights": list(s.weights),
                "scale_squared": str(s.scale_squared),
                "t_order": s.t_order,
            }
            for vid, s in sorted(lim.screens.items())
        },
        "leaf_points": {str(k): v for k, v in sorted(lim.leaf_points.items())},
    }
