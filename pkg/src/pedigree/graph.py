"""The typed pedigree graph of a cycle pair and polytope vertex adjacency.

Given two evolving cycles A and B on [n], the pedigree graph has a vertex
for every node m in 4..n whose insertion edges differ between the cycles,
and up to four kinds of typed edges from each new vertex back to earlier
vertices.  Two pedigrees label adjacent vertices of the pedigree polytope
exactly when this graph is connected.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional

from .cycles import (
    EvolvingCycle,
    Pair,
    Pedigree,
    PedigreeError,
    cycle_from_pedigree,
    find_inserter,
)

T1_AB = "T1-AB"
T1_BA = "T1-BA"
T2_AB = "T2-AB"
T2_BA = "T2-BA"
TAGS = (T1_AB, T1_BA, T2_AB, T2_BA)


class IdenticalPedigreeError(PedigreeError):
    """Raised when adjacency is asked of one and the same polytope vertex."""


class InvariantViolation(AssertionError):
    """A structural guarantee failed; carries a replayable instance dump."""

    def __init__(self, message: str, dump: Optional[dict] = None):
        super().__init__(message if dump is None else f"{message}\n{json.dumps(dump)}")
        self.dump = dump or {}


@dataclass(frozen=True, order=True)
class TypedEdge:
    """Edge between vertices lo < hi, created at time hi, with a type tag."""

    lo: int
    hi: int
    tag: str

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise PedigreeError(f"typed edge needs lo < hi, got {self.lo},{self.hi}")
        if self.tag not in TAGS:
            raise PedigreeError(f"unknown edge tag {self.tag!r}")


class UnionFind:
    """Union-find with size union and path halving; elements added lazily."""

    def __init__(self) -> None:
        self.parent: dict[int, int] = {}
        self.size: dict[int, int] = {}
        self.components = 0

    def add(self, x: int) -> None:
        if x not in self.parent:
            self.parent[x] = x
            self.size[x] = 1
            self.components += 1

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self.components -= 1
        return True


def _components_of(vertices: Iterable[int], edges: Iterable[TypedEdge]) -> tuple[frozenset[int], ...]:
    uf = UnionFind()
    for v in vertices:
        uf.add(v)
    for e in edges:
        uf.union(e.lo, e.hi)
    groups: dict[int, set[int]] = {}
    for v in uf.parent:
        groups.setdefault(uf.find(v), set()).add(v)
    return tuple(sorted((frozenset(g) for g in groups.values()), key=min))


@dataclass(frozen=True)
class PedigreeGraph:
    """Immutable snapshot of the pedigree graph at time n."""

    n: int
    vertices: frozenset[int]
    typed_edges: frozenset[TypedEdge]
    components: tuple[frozenset[int], ...]

    @property
    def component_count(self) -> int:
        return len(self.components)

    @property
    def is_connected(self) -> bool:
        """A one-vertex graph counts as connected; an empty one does not."""
        return len(self.components) == 1

    def simple_edges(self) -> frozenset[Pair]:
        return frozenset((e.lo, e.hi) for e in self.typed_edges)

    def simple_degree(self, v: int) -> int:
        return sum(1 for (a, b) in self.simple_edges() if v in (a, b))

    def typed_past_degree(self, v: int) -> int:
        """Number of typed edges created at time v (those with hi == v)."""
        return sum(1 for e in self.typed_edges if e.hi == v)

    def restricted_to(self, m: int) -> "PedigreeGraph":
        """Induced subgraph on vertices <= m, re-timed to m."""
        vs = frozenset(v for v in self.vertices if v <= m)
        es = frozenset(e for e in self.typed_edges if e.hi <= m)
        return PedigreeGraph(m, vs, es, _components_of(vs, es))

    def sorted_edges(self) -> tuple[TypedEdge, ...]:
        return tuple(sorted(self.typed_edges, key=lambda e: (e.hi, e.lo, e.tag)))

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "vertices": sorted(self.vertices),
            "edges": [
                {"u": e.lo, "v": e.hi, "tag": e.tag} for e in self.sorted_edges()
            ],
            "components": self.component_count,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    def to_dot(self) -> str:
        lines = ["graph pedigree {"]
        for v in sorted(self.vertices):
            lines.append(f"  {v};")
        for e in self.sorted_edges():
            lines.append(f'  {e.lo} -- {e.hi} [label="{e.tag}"];')
        lines.append("}")
        return "\n".join(lines)


def empty_graph(n: int = 3) -> PedigreeGraph:
    return PedigreeGraph(n, frozenset(), frozenset(), ())


def is_vertex(a: EvolvingCycle, b: EvolvingCycle, m: int) -> bool:
    """Node m becomes a vertex iff its insertion edges differ.

    Nodes 1..3 are never vertices; their records are fixed conventions.
    """
    if m > a.n or m > b.n:
        raise PedigreeError(f"node {m} beyond cycle time ({a.n}, {b.n})")
    if m < 4:
        return False
    return a.nu_pair(m) != b.nu_pair(m)


def _directed_past_edges(
    new: int, own_pair: Pair, other: EvolvingCycle, t1_tag: str, t2_tag: str
) -> list[TypedEdge]:
    """Edges created at time ``new`` looking from one cycle into the other.

    A type-1 edge goes to the node of the other cycle that subdivided
    ``own_pair``, when that happened before ``new``.  Otherwise a type-2
    edge goes to max(own_pair), unless the other cycle's record of that
    node meets ``own_pair``.
    """
    edges = []
    k = find_inserter(other, own_pair)
    if k is not None and k < new:
        edges.append(TypedEdge(k, new, t1_tag))
    top = own_pair[1]
    if own_pair[0] not in other.nu_members(top):
        edges.append(TypedEdge(top, new, t2_tag))
    if len(edges) == 2:
        raise InvariantViolation(
            "type-1 and type-2 edges coexist in one direction",
            {"new": new, "pair": list(own_pair), "tags": [t1_tag, t2_tag]},
        )
    return edges


def past_edges(a: EvolvingCycle, b: EvolvingCycle, m: int) -> frozenset[TypedEdge]:
    """All typed edges from vertex m to earlier vertices.

    The cycles may have grown past m; the answer only depends on their
    state at time m.
    """
    if not is_vertex(a, b, m):
        raise PedigreeError(f"node {m} is not a vertex of the pedigree graph")
    found = _directed_past_edges(m, a.nu_pair(m), b, T1_AB, T2_AB)
    found += _directed_past_edges(m, b.nu_pair(m), a, T1_BA, T2_BA)
    for e in found:
        if e.lo < 4 or not is_vertex(a, b, e.lo):
            raise InvariantViolation(
                "typed edge target is not a vertex",
                {"edge": [e.lo, e.hi, e.tag], "a": a.pedigree.to_text(), "b": b.pedigree.to_text()},
            )
    return frozenset(found)


def extend(
    g: PedigreeGraph, a: EvolvingCycle, b: EvolvingCycle, m: int
) -> PedigreeGraph:
    """Advance the graph from time m-1 to time m."""
    if g.n != m - 1:
        raise PedigreeError(f"graph is at time {g.n}, cannot extend to {m}")
    if m > a.n or m > b.n:
        raise PedigreeError(f"cycles end at ({a.n}, {b.n}), cannot extend to {m}")
    if not is_vertex(a, b, m):
        return PedigreeGraph(m, g.vertices, g.typed_edges, g.components)
    new_edges = past_edges(a, b, m)
    vertices = g.vertices | {m}
    typed = g.typed_edges | new_edges
    touched = {e.lo for e in new_edges}
    merged = [c for c in g.components if c & touched]
    rest = [c for c in g.components if not (c & touched)]
    new_comp = frozenset({m}).union(*merged) if merged else frozenset({m})
    components = tuple(sorted(rest + [new_comp], key=min))
    return PedigreeGraph(m, vertices, typed, components)


def build(a: Pedigree, b: Pedigree) -> PedigreeGraph:
    """Fold the per-time extension over m = 4..n."""
    if a.n != b.n:
        raise PedigreeError(f"pedigree sizes differ: {a.n} vs {b.n}")
    if a.n < 4:
        raise PedigreeError("pedigree graphs need n >= 4")
    ca, cb = cycle_from_pedigree(a), cycle_from_pedigree(b)
    g = empty_graph()
    for m in range(4, a.n + 1):
        g = extend(g, ca, cb, m)
    return g


# -- fast adjacency route ----------------------------------------------------
#
# For bulk work (census over millions of pairs, the game engine) the walk
# based edge search above is too slow.  The same typed-edge targets follow
# from two O(1) facts about a pair {lo, hi} and a cycle C:
#   * the pair was an edge of C at some time  iff  lo is in nu_C(hi);
#   * if it was, the node that destroyed it is the unique k with
#     nu_C(k) = {lo, hi}, i.e. the inverse-nu map of C.
# A type-1 edge exists iff the pair was destroyed before the new node's
# time; a type-2 edge exists iff the pair never was an edge of C at all.


class CycleIndex:
    """Per-cycle lookup tables used by the fast adjacency route."""

    __slots__ = ("n", "nu", "destroyed")

    def __init__(self, c: EvolvingCycle):
        self.n = c.n
        self.nu = [()] + [c.nu_members(k) for k in range(1, c.n + 1)]
        self.destroyed = {c.nu_pair(m): m for m in range(4, c.n + 1)}


def _fast_target(own: Pair, other: CycleIndex, m: int) -> Optional[int]:
    """Target of the (at most one) typed edge from m in one direction."""
    lo, hi = own
    if lo in other.nu[hi]:
        k = other.destroyed.get(own)
        if k is not None and k < m:
            return k  # type-1: the pair was subdivided in the other cycle
        return None  # the pair is still an edge of the other cycle at m-1
    return hi  # type-2: the pair never was an edge there


def pedigree_adjacent(a: Pedigree, b: Pedigree) -> bool:
    """Polytope vertex adjacency: the pedigree graph must be connected."""
    if a.n != b.n:
        raise PedigreeError(f"pedigree sizes differ: {a.n} vs {b.n}")
    if a.n < 4:
        raise PedigreeError("adjacency needs n >= 4")
    if a == b:
        raise IdenticalPedigreeError(
            "identical pedigree: both arguments name the same polytope vertex"
        )
    ia = CycleIndex(cycle_from_pedigree(a))
    ib = CycleIndex(cycle_from_pedigree(b))
    return adjacent_from_indexes(ia, ib)


def adjacent_from_indexes(ia: CycleIndex, ib: CycleIndex) -> bool:
    """Connectivity of the pair's pedigree graph from prebuilt indexes."""
    uf = UnionFind()
    for m in range(4, ia.n + 1):
        pa = ia.nu[m]
        pb = ib.nu[m]
        if pa == pb:
            continue
        uf.add(m)
        ta = _fast_target(pa, ib, m)
        if ta is not None:
            uf.union(m, ta)
        tb = _fast_target(pb, ia, m)
        if tb is not None:
            uf.union(m, tb)
    return uf.components == 1


def graph_from_json(text: str) -> PedigreeGraph:
    """Inverse of PedigreeGraph.to_json (components are recomputed)."""
    try:
        obj = json.loads(text)
        vs = frozenset(int(v) for v in obj["vertices"])
        es = frozenset(
            TypedEdge(int(e["u"]), int(e["v"]), str(e["tag"])) for e in obj["edges"]
        )
        return PedigreeGraph(int(obj["n"]), vs, es, _components_of(vs, es))
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise PedigreeError(f"bad graph JSON: {exc}") from exc
