"""The bundled 10-node demonstration pair and its round-by-round narration."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .cycles import EvolvingCycle, Pedigree, cycle_from_pedigree, find_inserter
from .graph import (
    T1_AB,
    T1_BA,
    T2_AB,
    T2_BA,
    PedigreeGraph,
    TypedEdge,
    empty_graph,
    extend,
    is_vertex,
)

DEMO_A = Pedigree(10, (1, 2, 4, 2, 6, 8, 8))
DEMO_B = Pedigree(10, (3, 1, 3, 5, 7, 8, 3))


@dataclass(frozen=True)
class RuleOutcome:
    tag: str
    target: Optional[int]
    reason: str


@dataclass(frozen=True)
class RoundReport:
    m: int
    alice_pair: tuple[int, int]
    bob_pair: tuple[int, int]
    vertex_added: bool
    rules: tuple[RuleOutcome, ...]
    isolated: bool
    components: int


def _explain_direction(
    m: int, own: tuple[int, int], other: EvolvingCycle, t1: str, t2: str
) -> tuple[RuleOutcome, RuleOutcome]:
    k = find_inserter(other, own)
    if k is not None and k < m:
        r1 = RuleOutcome(t1, k, f"node {k} subdivided {{{own[0]},{own[1]}}} in the other cycle")
    elif k is not None:
        r1 = RuleOutcome(t1, None, f"{{{own[0]},{own[1]}}} is only subdivided later (by {k})")
    else:
        r1 = RuleOutcome(t1, None, f"no node of the other cycle has record {{{own[0]},{own[1]}}}")
    low, top = own
    members = other.nu_members(top)
    if low in members:
        r2 = RuleOutcome(
            t2, None, f"blocked: {low} is in the other cycle's record of {top}"
        )
    else:
        r2 = RuleOutcome(t2, top, f"the other cycle's record of {top} avoids {low}")
    return r1, r2


def narrate(
    a: Pedigree = DEMO_A, b: Pedigree = DEMO_B
) -> tuple[tuple[RoundReport, ...], PedigreeGraph]:
    """Replay a pair and explain every rule application per round."""
    ca, cb = cycle_from_pedigree(a), cycle_from_pedigree(b)
    g = empty_graph()
    reports = []
    for m in range(4, a.n + 1):
        pa, pb = ca.nu_pair(m), cb.nu_pair(m)
        vertex = is_vertex(ca, cb, m)
        rules: tuple[RuleOutcome, ...] = ()
        isolated = False
        if vertex:
            ab = _explain_direction(m, pa, cb, T1_AB, T2_AB)
            ba = _explain_direction(m, pb, ca, T1_BA, T2_BA)
            rules = ab + ba
            isolated = all(r.target is None for r in rules)
        g = extend(g, ca, cb, m)
        reports.append(
            RoundReport(m, pa, pb, vertex, rules, isolated, g.component_count)
        )
    return tuple(reports), g


def narration_lines(a: Pedigree = DEMO_A, b: Pedigree = DEMO_B) -> list[str]:
    reports, g = narrate(a, b)
    out = []
    for r in reports:
        out.append(
            f"n={r.m}: Alice -> {set(r.alice_pair)}, Bob -> {set(r.bob_pair)}"
        )
        if not r.vertex_added:
            out.append("  records agree, no vertex added")
            continue
        out.append(f"  vertex {r.m} added")
        for rule in r.rules:
            if rule.target is None:
                out.append(f"  no {rule.tag} edge ({rule.reason})")
            else:
                out.append(f"  {rule.tag} edge {{{r.m},{rule.target}}} ({rule.reason})")
        if r.isolated:
            out.append(f"  vertex {r.m} is isolated")
        out.append(f"  components: {r.components}")
    out.append(f"final: connected={g.is_connected} vertices={sorted(g.vertices)}")
    return out


def demo_edges() -> frozenset[TypedEdge]:
    """The typed edges the demonstration pair must produce."""
    return frozenset(
        {
            TypedEdge(4, 5, T1_BA),
            TypedEdge(4, 5, T2_AB),
            TypedEdge(5, 7, T2_AB),
            TypedEdge(4, 7, T2_BA),
            TypedEdge(4, 9, T1_AB),
            TypedEdge(8, 9, T2_BA),
            TypedEdge(9, 10, T2_AB),
        }
    )
