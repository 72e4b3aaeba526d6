"""Flip resolution as surgery on the stratification poset.

A ghost vertex contributes a 3-dimensional stabilizer; the flip trades it for
an exceptional divisor: semi-blow-up of the gluing cell along the stratum,
then semi-blow-down of the complementary screen-sphere factor.  The surgery
is executed on the poset plus dimension/group metadata only (no chart
geometry): per flipped end with n children the gluing cell is one 4-space
factor per incident edge, so the flip sphere is S^{4(n+1)-1} and the
exceptional fiber has dimension 4(n+1)-4 after the free 3-dimensional group
action; the screen sphere has dimension 4n-5 and blows down to a 4n-4 disk,
so the neighborhood dimension is preserved.  Resolution runs inductively on
end energies m = 2..K; points of an exceptional divisor are assigned to the
trees obtained by contracting the support pattern of their gluing
coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .bubble_trees import (
    BubbleTree,
    StratumInfo,
    TreeError,
    enumerate_trees,
    single_contractions,
    stratum_info,
)


class FlipError(ValueError):
    pass


class AuditError(FlipError):
    """A dimension audit failed; this would falsify the surgery metadata."""


@dataclass(frozen=True)
class EndFlip:
    """Bookkeeping for one flipped ghost end."""

    vertex: int
    energy: int
    n_children: int
    sphere_dim: int
    fiber_dim: int
    screen_sphere_dim: int
    screen_disk_dim: int
    group: str
    group_dim: int
    z2_multiplicity: Fraction
    # support patterns over incident edges (0 = parent edge, 1..k = child
    # edges in canonical order) -> canonical target tree
    assignment: dict[tuple[int, ...], str]


@dataclass(frozen=True)
class FlipEvent:
    tree: str
    energy: int
    ends: tuple[EndFlip, ...]
    marked_tree: str
    audit: dict


@dataclass
class ExceptionalRecord:
    source_tree: str
    end_vertex: int
    pattern: tuple[int, ...]
    energy: int


@dataclass
class StratumPoset:
    """The stratification poset with per-stratum metadata and flip history."""

    K: int
    chi: int
    sigma: int
    info: dict[str, StratumInfo]
    active: set[str]
    hasse: list[tuple[str, str]]
    resolved: set[str] = field(default_factory=set)
    exceptional: dict[str, list[ExceptionalRecord]] = field(default_factory=dict)
    events: list[FlipEvent] = field(default_factory=list)

    def copy(self) -> "StratumPoset":
        return StratumPoset(
            self.K,
            self.chi,
            self.sigma,
            dict(self.info),
            set(self.active),
            list(self.hasse),
            set(self.resolved),
            {k: list(v) for k, v in self.exceptional.items()},
            list(self.events),
        )

    def trees(self) -> list[BubbleTree]:
        return [self.info[k].tree for k in sorted(self.active)]

    def ghost_trees(self) -> list[BubbleTree]:
        return [t for t in self.trees() if t.is_ghost_tree()]

    def maximal(self) -> str:
        tops = [k for k in self.info if self.info[k].edge_count == 0]
        assert len(tops) == 1
        return tops[0]

    def to_dot(self) -> str:
        lines = ["digraph strata {", "  rankdir=BT;"]
        for key in sorted(self.info):
            inf = self.info[key]
            style = ' style=filled fillcolor="#ffdddd"' if inf.ghost_count else ""
            state = "" if key in self.active else " (resolved)"
            lines.append(
                f'  "{key}" [label="{key}{state}\\ndim {inf.dimension}, '
                f"codim {inf.codimension}\"{style}];"
            )
        for a, b in sorted(self.hasse):
            lines.append(f'  "{a}" -> "{b}";')
        lines.append("}")
        return "\n".join(lines)


def build_poset(K: int, chi: int, sigma: int) -> StratumPoset:
    """Poset over all trees of total charge K with dimension metadata and
    the contraction order's cover relations."""
    trees = enumerate_trees(K)
    info = {t.canonical(): stratum_info(t, chi, sigma) for t in trees}
    hasse = []
    for t in trees:
        src = t.canonical()
        for c in single_contractions(t):
            hasse.append((src, c.canonical()))
    return StratumPoset(K, chi, sigma, info, set(info), sorted(set(hasse)))


def _incident_edges(t: BubbleTree, vid: int) -> list[tuple[int, int]]:
    """(index, edge-child-id) pairs for the edges at vid: index 0 is the
    parent edge (identified by vid itself), 1..k the child edges."""
    out = [(0, vid)]
    for i, k in enumerate(t.children(vid), start=1):
        out.append((i, k))
    return out


def exceptional_assignment(t: BubbleTree, vid: int) -> dict[tuple[int, ...], BubbleTree]:
    """Exceptional-divisor point assignment at a ghost end: each nonempty
    support pattern over the incident edges contracts those edges; the
    resulting tree receives the point."""
    if t.weight(vid) != 0 or t.parent(vid) is None:
        raise TreeError(f"vertex {vid} is not a ghost vertex")
    edges = _incident_edges(t, vid)
    out: dict[tuple[int, ...], BubbleTree] = {}
    for r in range(1, len(edges) + 1):
        for chosen in combinations(edges, r):
            pattern = tuple(i for i, _ in chosen)
            support = [cid for _, cid in chosen]
            contracted, did = t.psi_contract(support)
            assert did
            out[pattern] = contracted
    return out


def _end_flip(t: BubbleTree, vid: int, energy: int) -> EndFlip:
    n = len(t.children(vid))
    sphere_dim = 4 * (n + 1) - 1
    assignment = {
        pat: tree.canonical() for pat, tree in exceptional_assignment(t, vid).items()
    }
    return EndFlip(
        vertex=vid,
        energy=energy,
        n_children=n,
        sphere_dim=sphere_dim,
        fiber_dim=sphere_dim - 3,
        screen_sphere_dim=4 * n - 5,
        screen_disk_dim=4 * n - 4,
        group="SU(2) up to finite",
        group_dim=3,
        z2_multiplicity=Fraction(1, 2) ** (n + 1),
        assignment=assignment,
    )


def audit_dimensions(event: FlipEvent) -> list[str]:
    """Check the flip invariants; empty list means the audit passes."""
    failures = []
    for e in event.ends:
        want = 4 * (e.n_children + 1) - 1
        if e.sphere_dim != want:
            failures.append(
                f"end {e.vertex}: sphere_dim {e.sphere_dim} != 4(n+1)-1 = {want}"
            )
        if e.group_dim != 3:
            failures.append(f"end {e.vertex}: group dimension {e.group_dim} != 3")
        if e.fiber_dim != e.sphere_dim - e.group_dim:
            failures.append(
                f"end {e.vertex}: exceptional fiber {e.fiber_dim} != sphere - group"
            )
        # semi-blow-up then semi-blow-down: [0,1) x (screen sphere) x (gluing
        # cell) has the same dimension as (screen disk) x (gluing sphere)
        before = e.screen_sphere_dim + 4 * (e.n_children + 1)
        after = e.screen_disk_dim + e.sphere_dim
        if before != after:
            failures.append(
                f"end {e.vertex}: neighborhood dimension changed {before} -> {after}"
            )
    return failures


def flip_step(poset: StratumPoset, m: int) -> tuple[StratumPoset, list[FlipEvent]]:
    """One energy round: cut and flip every active ghost tree that has an
    end of energy m; smaller-energy ends must already be resolved."""
    out = poset.copy()
    todo = []
    for t in out.ghost_trees():
        _ends, energy = t.ends()
        if energy is None:
            continue
        if energy < m:
            raise FlipError(
                f"unresolved end of energy {energy} < {m} in {t.canonical()}"
            )
        if energy == m:
            todo.append(t)
    events = []
    for t in sorted(todo, key=lambda x: x.canonical()):
        end_ids, energy = t.ends()
        assert energy == m
        # all equal-energy ends of one tree are flipped simultaneously
        flips = tuple(_end_flip(t, vid, m) for vid in sorted(end_ids))
        marked = t.cut_at_many(end_ids)
        event = FlipEvent(
            tree=t.canonical(),
            energy=m,
            ends=flips,
            marked_tree=marked.canonical(),
            audit={
                "ends": [
                    {
                        "vertex": f.vertex,
                        "sphere_dim": f.sphere_dim,
                        "fiber_dim": f.fiber_dim,
                        "neighborhood_before": f.screen_sphere_dim
                        + 4 * (f.n_children + 1),
                        "neighborhood_after": f.screen_disk_dim + f.sphere_dim,
                    }
                    for f in flips
                ]
            },
        )
        failures = audit_dimensions(event)
        if failures:
            raise AuditError("; ".join(failures))
        events.append(event)
        key = t.canonical()
        out.active.discard(key)
        out.resolved.add(key)
        for e in flips:
            for pattern, target in sorted(e.assignment.items()):
                out.exceptional.setdefault(target, []).append(
                    ExceptionalRecord(key, e.vertex, pattern, m)
                )
    out.events.extend(events)
    _check_assignments(out, events, m)
    return out, events


def _check_assignments(poset: StratumPoset, events: list[FlipEvent], m: int) -> None:
    """Global compatibility: every assignment target is a valid tree of the
    same total charge known to the poset, full support removes the flipped
    ghost, and no target acquires a ghost end of smaller energy."""
    for ev in events:
        for e in ev.ends:
            if len(e.assignment) != 2 ** (e.n_children + 1) - 1:
                raise AuditError(
                    f"{ev.tree}: end {e.vertex} has an incomplete assignment table"
                )
            for pattern, target in e.assignment.items():
                if target not in poset.info:
                    raise AuditError(
                        f"{ev.tree}: assignment target {target} is not a stratum"
                    )
                tt = poset.info[target].tree
                if not tt.is_valid():
                    raise AuditError(f"assignment target {target} is invalid")
                _ends, energy = tt.ends()
                if energy is not None and energy < m:
                    raise AuditError(
                        f"target {target} has a ghost end of energy {energy} < {m}"
                    )
            full = tuple(range(e.n_children + 1))
            full_target = poset.info[e.assignment[full]].tree
            # the fully glued tree has strictly fewer ghosts than the source
            if len(full_target.ghost_vertices()) >= len(
                poset.info[ev.tree].tree.ghost_vertices()
            ):
                raise AuditError(
                    f"full support of {ev.tree} did not absorb the flipped ghost"
                )


def resolve(K: int, chi: int, sigma: int) -> tuple[StratumPoset, list[FlipEvent]]:
    """Run flip rounds for m = 2..K; the final poset is ghost-free with all
    stabilizer dimensions zero."""
    poset = build_poset(K, chi, sigma)
    log: list[FlipEvent] = []
    for m in range(2, K + 1):
        poset, events = flip_step(poset, m)
        log.extend(events)
    leftovers = poset.ghost_trees()
    if leftovers:
        raise AuditError(
            "ghost strata survived resolution: "
            + ", ".join(t.canonical() for t in leftovers)
        )
    for key in poset.active:
        if poset.info[key].isotropy_dim != 0:
            raise AuditError(f"stratum {key} kept a positive-dimensional stabilizer")
    return poset, log


def event_to_json(e: FlipEvent) -> dict:
    return {
        "tree": e.tree,
        "energy": e.energy,
        "marked_tree": e.marked_tree,
        "ends": [
            {
                "vertex": f.vertex,
                "energy": f.energy,
                "n_children": f.n_children,
                "sphere_dim": f.sphere_dim,
                "fiber_dim": f.fiber_dim,
                "screen_sphere_dim": f.screen_sphere_dim,
                "screen_disk_dim": f.screen_disk_dim,
                "group": f.group,
                "z2_multiplicity": str(f.z2_multiplicity),
                "assignment": {
                    ",".join(map(str, pat)): target
                    for pat, target in sorted(f.assignment.items())
                },
            }
            for f in e.ends
        ],
    }
