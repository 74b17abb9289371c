"""Reshape a half-integral optimum so its non-integral edges form disjoint odd cycles.

Both phases flip x by -1/2, +1/2, -1/2, ... along a trail of non-integral
edges, which makes every edge of the trail integral. Paths between two
odd-degree support vertices and even closed trails keep w(G, x) unchanged at
an optimum, so the dual cover stays optimal for the result.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .bsolver import CertificateError, DualCover, HalfMatching
from .instance import Instance, Vertex


@dataclass(frozen=True)
class Trail:
    """Walk ``vertices[0] -e0- vertices[1] -e1- ...`` with pairwise distinct edges."""

    vertices: tuple
    edges: tuple[int, ...]

    def __post_init__(self):
        if len(self.vertices) != len(self.edges) + 1:
            raise ValueError("trail needs exactly one more vertex than edges")
        if len(set(self.edges)) != len(self.edges):
            raise ValueError("trail repeats an edge")

    @property
    def closed(self) -> bool:
        return len(self.edges) > 0 and self.vertices[0] == self.vertices[-1]

    def __len__(self) -> int:
        return len(self.edges)

    def check_against(self, inst: Instance) -> None:
        for k, a, b in zip(self.edges, self.vertices, self.vertices[1:]):
            u, v, _ = inst.edges[k]
            if {u, v} != {a, b}:
                raise ValueError(f"edge {k} does not join {a!r} and {b!r}")


@dataclass(frozen=True)
class FractionalSupport:
    """Subgraph G' of edges with odd ``twice_x``; adjacency lists in vertex order."""

    instance: Instance
    edges: frozenset[int]
    adjacency: dict[Vertex, tuple[tuple[Vertex, int], ...]]

    def degree(self, v: Vertex) -> int:
        return len(self.adjacency.get(v, ()))

    @property
    def vertices(self) -> list:
        return [v for v in self.instance.vertices if v in self.adjacency]

    def components(self) -> list[list]:
        seen = set()
        out = []
        for root in self.vertices:
            if root in seen:
                continue
            comp, stack = [], [root]
            seen.add(root)
            while stack:
                u = stack.pop()
                comp.append(u)
                for v, _ in self.adjacency[u]:
                    if v not in seen:
                        seen.add(v)
                        stack.append(v)
            order = self.instance.index
            out.append(sorted(comp, key=order.__getitem__))
        return out


@dataclass(frozen=True)
class OddCycle:
    """Simple odd cycle of the canonical support, walked from its lowest vertex."""

    vertices: tuple
    edges: tuple[int, ...]
    b_min: int
    twice_y_min: int | None = None
    argmin: Vertex | None = None

    @property
    def length(self) -> int:
        return len(self.edges)

    @property
    def y_min(self) -> Fraction | None:
        return None if self.twice_y_min is None else Fraction(self.twice_y_min, 2)


@dataclass(frozen=True)
class OddCycleSet:
    cycles: tuple[OddCycle, ...]

    def __len__(self) -> int:
        return len(self.cycles)

    def __iter__(self):
        return iter(self.cycles)

    @property
    def min_length(self) -> int | None:
        return min((c.length for c in self.cycles), default=None)

    @property
    def min_capacity(self) -> int | None:
        return min((c.b_min for c in self.cycles), default=None)

    def cycle_of(self) -> dict:
        return {v: c for c in self.cycles for v in c.vertices[:-1]}


def fractional_support(x: HalfMatching) -> FractionalSupport:
    inst = x.instance
    ks = x.support()
    adj: dict = {}
    for k in ks:
        u, v, _ = inst.edges[k]
        adj.setdefault(u, []).append((v, k))
        adj.setdefault(v, []).append((u, k))
    order = inst.index
    adjacency = {
        v: tuple(sorted(nbrs, key=lambda p: (order[p[0]], p[1]))) for v, nbrs in adj.items()
    }
    return FractionalSupport(inst, frozenset(ks), adjacency)


def apply_trail_ops(x: HalfMatching, trail: Trail) -> HalfMatching:
    """Subtract 1/2 on odd positions of the trail and add 1/2 on even ones.

    Raises ValueError if the trail leaves the support, an open trail does not
    join two odd-degree support vertices, or the result is infeasible.
    """
    inst = x.instance
    trail.check_against(inst)
    if any(x.twice_x[k] % 2 == 0 for k in trail.edges):
        raise ValueError("trail uses an edge outside the fractional support")
    if not trail.closed and len(trail) > 0:
        sup = fractional_support(x)
        ends = (trail.vertices[0], trail.vertices[-1])
        if ends[0] == ends[1] or any(sup.degree(v) % 2 == 0 for v in ends):
            raise ValueError("open trail must join two distinct odd-degree support vertices")
    twice = list(x.twice_x)
    for pos, k in enumerate(trail.edges):
        twice[k] += -1 if pos % 2 == 0 else 1
    out = HalfMatching(inst, tuple(twice))
    if not out.is_feasible():
        raise ValueError("trail operations violate a capacity constraint")
    return out


def _check_certified(x: HalfMatching, y: DualCover) -> None:
    if not (x.is_feasible() and y.is_feasible()) or x.twice_weight() != y.twice_value():
        raise ValueError("x and y are not a certified optimal pair")


def _bfs_path(sup: FractionalSupport, src: Vertex, targets: set) -> Trail | None:
    prev: dict = {src: None}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        if u in targets and u != src:
            verts, edges = [u], []
            while prev[u] is not None:
                p, k = prev[u]
                verts.append(p)
                edges.append(k)
                u = p
            return Trail(tuple(reversed(verts)), tuple(reversed(edges)))
        for v, k in sup.adjacency[u]:
            if v not in prev:
                prev[v] = (u, k)
                queue.append(v)
    return None


def eliminate_odd_degree(x: HalfMatching, y: DualCover) -> HalfMatching:
    """Clear every odd-degree vertex of the support, keeping w(G, x) fixed."""
    _check_certified(x, y)
    start_weight = x.twice_weight()
    while True:
        sup = fractional_support(x)
        odd = [v for v in sup.vertices if sup.degree(v) % 2]
        if not odd:
            break
        path = _bfs_path(sup, odd[0], set(odd))
        if path is None:
            raise CertificateError(f"odd-degree vertex {odd[0]!r} has no odd partner")
        x = apply_trail_ops(x, path)
        if x.twice_weight() != start_weight:
            raise CertificateError("weight changed along an odd-vertex path")
    return x


def _euler_circuit(sup: FractionalSupport, start: Vertex, comp: set) -> Trail:
    """Hierholzer circuit of one all-even component, neighbours taken in vertex order."""
    used: set[int] = set()
    ptr = {v: 0 for v in comp}
    stack: list[tuple[Vertex, int | None]] = [(start, None)]
    verts: list = []
    edges: list[int] = []
    while stack:
        u, via = stack[-1]
        nbrs = sup.adjacency[u]
        while ptr[u] < len(nbrs) and nbrs[ptr[u]][1] in used:
            ptr[u] += 1
        if ptr[u] < len(nbrs):
            v, k = nbrs[ptr[u]]
            used.add(k)
            stack.append((v, k))
        else:
            stack.pop()
            verts.append(u)
            if via is not None:
                edges.append(via)
    verts.reverse()
    edges.reverse()
    return Trail(tuple(verts), tuple(edges))


def _cycle_record(inst: Instance, sup: FractionalSupport, comp: list, y: DualCover | None) -> OddCycle:
    start = comp[0]
    verts, edges = [start], []
    prev_edge = None
    u = start
    while True:
        v, k = next((v, k) for v, k in sup.adjacency[u] if k != prev_edge)
        edges.append(k)
        verts.append(v)
        prev_edge, u = k, v
        if v == start:
            break
    b_min = min(inst.capacity[v] for v in comp)
    if y is None:
        return OddCycle(tuple(verts), tuple(edges), b_min)
    twice_y_min = min(y.twice_of(v) for v in comp)
    argmin = next(v for v in comp if y.twice_of(v) == twice_y_min)
    return OddCycle(tuple(verts), tuple(edges), b_min, twice_y_min, argmin)


def eliminate_even_closed_trails(
    x: HalfMatching, y: DualCover | None = None
) -> tuple[HalfMatching, OddCycleSet]:
    """Remove even closed trails until the support is disjoint simple odd cycles.

    A component that is a simple cycle is kept if odd and cleared if even.
    Otherwise it has a vertex of degree >= 4; its Euler circuit is cleared if
    even, else the circuit is split at that vertex into two closed trails of
    which one is even, and that one is cleared.
    """
    inst = x.instance
    start_weight = x.twice_weight()
    while True:
        sup = fractional_support(x)
        if any(sup.degree(v) % 2 for v in sup.vertices):
            raise ValueError("support has odd-degree vertices; eliminate them first")
        trail = None
        for comp in sup.components():
            hub = next((v for v in comp if sup.degree(v) > 2), None)
            if hub is None:
                if len(comp) % 2 == 0:
                    trail = _euler_circuit(sup, comp[0], set(comp))
                    break
                continue
            circuit = _euler_circuit(sup, hub, set(comp))
            if len(circuit) % 2 == 0:
                trail = circuit
            else:
                p = circuit.vertices.index(hub, 1)
                first = Trail(circuit.vertices[: p + 1], circuit.edges[:p])
                second = Trail(circuit.vertices[p:], circuit.edges[p:])
                trail = first if len(first) % 2 == 0 else second
            break
        if trail is None:
            break
        x = apply_trail_ops(x, trail)
        if x.twice_weight() != start_weight:
            raise CertificateError("weight changed along an even closed trail")

    sup = fractional_support(x)
    cycles = tuple(_cycle_record(inst, sup, comp, y) for comp in sup.components())
    return x, OddCycleSet(cycles)


def canonicalize(x: HalfMatching, y: DualCover) -> tuple[HalfMatching, OddCycleSet]:
    """Both phases; the result has the same weight and is certified by the same y."""
    x = eliminate_odd_degree(x, y)
    x, cycles = eliminate_even_closed_trails(x, y)
    _check_certified(x, y)
    check_canonical(x, cycles)
    return x, cycles


def check_canonical(x: HalfMatching, cycles: OddCycleSet) -> None:
    """Raise CertificateError unless the support is exactly ``cycles``."""
    sup = fractional_support(x)
    seen: set = set()
    covered: set[int] = set()
    for c in cycles:
        body = c.vertices[:-1]
        if c.length < 3 or c.length % 2 == 0 or len(set(body)) != c.length:
            raise CertificateError(f"not a simple odd cycle: {c.vertices!r}")
        if seen & set(body):
            raise CertificateError("odd cycles share a vertex")
        seen |= set(body)
        covered |= set(c.edges)
    if covered != set(sup.edges) or any(sup.degree(v) != 2 for v in sup.vertices):
        raise CertificateError("fractional support is not a disjoint union of the cycles")
