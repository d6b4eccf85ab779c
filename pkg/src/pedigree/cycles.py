"""Cycles built by node insertion and their pedigree encodings.

A cycle on nodes 1..n is grown from the triangle (1, 2, 3) by repeatedly
subdividing an edge: when node m is added, it is inserted into one of the
m-1 edges of the current cycle.  The sequence of chosen edge indices is the
pedigree of the cycle; pedigrees and cycles on [n] are in bijection.

Orientation convention: the positive direction of a cycle is the one in
which, starting from node 1, node 2 appears before node 3.  Edges are
counted in positive direction, the 1st edge being the one leaving node 1.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from itertools import product
from math import factorial
from typing import Iterator, Optional, Sequence

Pair = tuple[int, int]


class PedigreeError(ValueError):
    """Malformed pedigree, cycle, or node-pair input."""


def pair(i: int, j: int) -> Pair:
    """Canonical unordered node pair, smaller node first."""
    if i == j:
        raise PedigreeError(f"pair endpoints must differ, got {{{i},{j}}}")
    return (i, j) if i < j else (j, i)


def pedigree_count(n: int) -> int:
    """Number of distinct pedigrees (= cycles) on [n], which is (n-1)!/2."""
    if n < 3:
        raise PedigreeError(f"need n >= 3, got {n}")
    return factorial(n - 1) // 2


@dataclass(frozen=True)
class Pedigree:
    """Insertion-choice sequence of an evolving cycle.

    ``choices[k-3]`` is the 1-based index of the edge into which node k+1
    was inserted, for k = 3..n-1.  The triangle (n = 3) has no choices.
    """

    n: int
    choices: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.n < 3:
            raise PedigreeError(f"need n >= 3, got n={self.n}")
        if len(self.choices) != self.n - 3:
            raise PedigreeError(
                f"n={self.n} needs {self.n - 3} choices, got {len(self.choices)}"
            )
        for k, c in enumerate(self.choices, start=3):
            if not 1 <= c <= k:
                raise PedigreeError(f"choice c_{k}={c} out of range 1..{k}")

    # -- serialization ---------------------------------------------------

    def to_text(self, form: str = "idx") -> str:
        """Render as ``n:10;idx:1,2,...`` or ``n:10;nu:1-2,2-4,...``."""
        if form == "idx":
            return f"n:{self.n};idx:" + ",".join(str(c) for c in self.choices)
        if form == "nu":
            pairs = cycle_from_pedigree(self).nu_pairs()
            return f"n:{self.n};nu:" + ",".join(f"{a}-{b}" for a, b in pairs)
        raise PedigreeError(f"unknown pedigree text form {form!r}")

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "insertions": list(self.choices)})

    @classmethod
    def from_text(cls, text: str) -> "Pedigree":
        """Parse either text form; the two are interconvertible."""
        m = re.fullmatch(r"n:(\d+);(idx|nu):(.*)", text.strip())
        if not m:
            raise PedigreeError(f"cannot parse pedigree string {text!r}")
        n, form, body = int(m.group(1)), m.group(2), m.group(3)
        if form == "idx":
            choices = tuple(int(tok) for tok in body.split(",")) if body else ()
            return cls(n, choices)
        pairs = []
        if body:
            for tok in body.split(","):
                a, _, b = tok.partition("-")
                pairs.append(pair(int(a), int(b)))
        return pedigree_from_nu_pairs(n, pairs)

    @classmethod
    def from_json(cls, text: str) -> "Pedigree":
        try:
            obj = json.loads(text)
            return cls(int(obj["n"]), tuple(int(c) for c in obj["insertions"]))
        except (KeyError, TypeError, json.JSONDecodeError) as exc:
            raise PedigreeError(f"bad pedigree JSON: {exc}") from exc


@dataclass(frozen=True)
class EvolvingCycle:
    """A cycle on [n] with its insertion history.

    ``order`` lists the nodes in positive direction starting at node 1.
    ``nu_minus[k]``/``nu_plus[k]`` are the neighbors of k at its insertion
    time, in negative resp. positive direction (index 0 and 1 are padding;
    nodes 2 and 3 carry the fixed convention values).
    """

    n: int
    order: tuple[int, ...]
    nu_minus: tuple[int, ...]
    nu_plus: tuple[int, ...]
    pedigree: Pedigree

    def nu_members(self, k: int) -> tuple[int, ...]:
        """Nodes of nu(k): empty for k=1, (1,) for k=2, a 2-tuple above."""
        if k < 1 or k > self.n:
            raise PedigreeError(f"node {k} not in cycle on [{self.n}]")
        if k == 1:
            return ()
        if k == 2:
            return (1,)
        a, b = self.nu_minus[k], self.nu_plus[k]
        return (a, b) if a < b else (b, a)

    def nu_pair(self, k: int) -> Pair:
        """Canonical insertion edge of node k, defined for k >= 3."""
        if k < 3:
            raise PedigreeError(f"nu pair needs k >= 3, got {k}")
        members = self.nu_members(k)
        return (members[0], members[1])

    def nu_signed(self, k: int) -> tuple[int, int]:
        """(nu_minus, nu_plus) of node k, defined for k >= 2."""
        if k < 2:
            raise PedigreeError(f"nu record needs k >= 2, got {k}")
        return (self.nu_minus[k], self.nu_plus[k])

    def nu_pairs(self) -> tuple[Pair, ...]:
        """Insertion edges of nodes 4..n in order."""
        return tuple(self.nu_pair(k) for k in range(4, self.n + 1))

    def edges(self) -> Iterator[Pair]:
        """Edges in positive index order (1st edge first), canonical pairs."""
        o = self.order
        for idx in range(self.n):
            yield pair(o[idx], o[(idx + 1) % self.n])

    def edge_set(self) -> frozenset[Pair]:
        return frozenset(self.edges())

    def has_edge(self, p: Pair) -> bool:
        i = self.order.index(p[0])
        n = self.n
        return self.order[(i + 1) % n] == p[1] or self.order[i - 1] == p[1]


_TRIANGLE_NU_MINUS = (0, 0, 1, 2)
_TRIANGLE_NU_PLUS = (0, 0, 1, 1)


def base_cycle() -> EvolvingCycle:
    """The unique cycle on {1,2,3}, with the conventional nu records."""
    return EvolvingCycle(
        n=3,
        order=(1, 2, 3),
        nu_minus=_TRIANGLE_NU_MINUS,
        nu_plus=_TRIANGLE_NU_PLUS,
        pedigree=Pedigree(3),
    )


def kth_edge(c: EvolvingCycle, k: int) -> Pair:
    """The k-th edge in positive direction; edge 1 leaves node 1."""
    if not 1 <= k <= c.n:
        raise PedigreeError(f"edge index {k} out of range 1..{c.n}")
    return pair(c.order[k - 1], c.order[k % c.n])


def insert_node(c: EvolvingCycle, edge_index: int) -> EvolvingCycle:
    """Subdivide the indexed edge with the new node c.n + 1."""
    if not 1 <= edge_index <= c.n:
        raise PedigreeError(f"edge index {edge_index} out of range 1..{c.n}")
    m = c.n + 1
    order = list(c.order)
    minus = order[edge_index - 1]
    plus = order[edge_index % c.n]
    order.insert(edge_index, m)
    return EvolvingCycle(
        n=m,
        order=tuple(order),
        nu_minus=c.nu_minus + (minus,),
        nu_plus=c.nu_plus + (plus,),
        pedigree=Pedigree(m, c.pedigree.choices + (edge_index,)),
    )


def nu_by_walk(c: EvolvingCycle, k: int) -> tuple[int, int]:
    """Recover (nu_minus, nu_plus) of k by walking the final cycle.

    Walking from k in positive direction, the first node smaller than k is
    nu_plus(k); the negative-direction walk gives nu_minus(k).
    """
    if k < 2:
        raise PedigreeError(f"walk rule needs k >= 2, got {k}")
    if k > c.n:
        raise PedigreeError(f"node {k} not in cycle on [{c.n}]")
    o = c.order
    n = c.n
    i = o.index(k)
    j = i
    while True:
        j = (j + 1) % n
        if o[j] < k:
            plus = o[j]
            break
    j = i
    while True:
        j = (j - 1) % n
        if o[j] < k:
            minus = o[j]
            break
    return (minus, plus)


def segment_between(c: EvolvingCycle, i: int, j: int) -> tuple[int, ...]:
    """Open arc between i and j avoiding min({1,2,3} - {i,j}).

    Listed in positive traversal order.  The result restricted to nodes
    below any m >= max(i,j) does not depend on how far the cycle has grown.
    """
    if i == j:
        raise PedigreeError("segment endpoints must differ")
    if i > c.n or j > c.n or i < 1 or j < 1:
        raise PedigreeError(f"nodes {{{i},{j}}} not in cycle on [{c.n}]")
    avoid = min({1, 2, 3} - {i, j})
    o = c.order
    n = c.n
    arc: list[int] = []
    p = o.index(i)
    while True:
        p = (p + 1) % n
        node = o[p]
        if node == j:
            break
        arc.append(node)
    if avoid not in arc:
        return tuple(arc)
    arc = []
    p = o.index(j)
    while True:
        p = (p + 1) % n
        node = o[p]
        if node == i:
            break
        arc.append(node)
    return tuple(arc)


def find_inserter(c: EvolvingCycle, p: Pair) -> Optional[int]:
    """The node m with nu(m) = p, if any.

    Such an m exists iff the segment between the pair's nodes is non-empty
    and every node in it exceeds both; m is then the segment's minimum.
    """
    lo, hi = pair(p[0], p[1])
    if hi > c.n:
        raise PedigreeError(f"pair {{{lo},{hi}}} not within cycle on [{c.n}]")
    seg = segment_between(c, lo, hi)
    if not seg:
        return None
    m = min(seg)
    return m if m > hi else None


def cycle_from_pedigree(p: Pedigree) -> EvolvingCycle:
    """Replay the insertion choices from the triangle."""
    order = [1, 2, 3]
    nu_minus = [0, 0, 1, 2]
    nu_plus = [0, 0, 1, 1]
    for m, c in enumerate(p.choices, start=4):
        # choice c is validated against m-1 edges by the Pedigree invariant
        nu_minus.append(order[c - 1])
        nu_plus.append(order[c % (m - 1)])
        order.insert(c, m)
    return EvolvingCycle(
        n=p.n,
        order=tuple(order),
        nu_minus=tuple(nu_minus),
        nu_plus=tuple(nu_plus),
        pedigree=p,
    )


def pedigree_from_cycle(c: EvolvingCycle) -> Pedigree:
    """Invert the bijection by peeling the largest node repeatedly.

    Only the cyclic order is consulted, never the stored records, so this
    is an independent route for round-trip checking.
    """
    if c.n < 3:
        raise PedigreeError(f"need n >= 3, got {c.n}")
    order = list(c.order)
    choices: list[int] = []
    for m in range(c.n, 3, -1):
        i = order.index(m)
        minus = order[i - 1]
        del order[i]
        # after deletion the list still starts at node 1, so the 1-based
        # position of nu_minus(m) is the index of the subdivided edge
        choices.append(order.index(minus) + 1)
    choices.reverse()
    return Pedigree(c.n, tuple(choices))


def pedigree_from_nu_pairs(n: int, pairs: Sequence[Pair]) -> Pedigree:
    """Build a pedigree from the insertion edges of nodes 4..n."""
    if len(pairs) != n - 3:
        raise PedigreeError(f"n={n} needs {n - 3} nu pairs, got {len(pairs)}")
    order = [1, 2, 3]
    choices: list[int] = []
    for m, (a, b) in enumerate(pairs, start=4):
        i = order.index(a) if a in order else -1
        if i < 0 or b not in order:
            raise PedigreeError(f"nu pair {{{a},{b}}} of node {m}: unknown node")
        length = m - 1
        if order[(i + 1) % length] == b:
            idx = i + 1
        elif order[i - 1] == b:
            idx = i if i > 0 else length
        else:
            raise PedigreeError(
                f"nu pair {{{a},{b}}} of node {m} is not an edge at that time"
            )
        choices.append(idx)
        order.insert(idx, m)
    return Pedigree(n, tuple(choices))


def enumerate_pedigrees(n: int) -> Iterator[Pedigree]:
    """All pedigrees on [n], lexicographic in their choice tuples."""
    if n < 3:
        raise PedigreeError(f"need n >= 3, got {n}")
    for combo in product(*(range(1, k + 1) for k in range(3, n))):
        yield Pedigree(n, combo)


def sample_uniform(n: int, rng) -> Pedigree:
    """Each choice independently uniform, so the cycle is uniform on [n]."""
    if n < 3:
        raise PedigreeError(f"need n >= 3, got {n}")
    return Pedigree(n, tuple(rng.randint(1, k) for k in range(3, n)))
